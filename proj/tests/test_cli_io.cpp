#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "qmoney/run_config.hpp"

using namespace qmoney;
using namespace qmoney::cli;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return QMONEY_CLI_PATH; }

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "qmoney_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  const fs::path log = scratch_dir() / "last_output.txt";
  const std::string cmd =
      std::string(cli_path()) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (output) *output = slurp(log);
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("minimal threshold config parses and validates") {
  const RunConfig cfg = parse_config_json(
      {{"mode", "threshold"}, {"mu", 1.0}, {"eta", 0.77}});
  CHECK(cfg.mode == RunMode::Threshold);
  CHECK(cfg.mu == 1.0);
  CHECK(cfg.eta == 0.77);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("out-of-range eta is rejected by name") {
  const RunConfig cfg =
      parse_config_json({{"mode", "threshold"}, {"mu", 1.0}, {"eta", 1.3}});
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("eta") != std::string::npos);
  }
}

TEST_CASE("sweep with an empty mu list is rejected") {
  const RunConfig cfg = parse_config_json(
      {{"mode", "sweep"},
       {"mu_values", nlohmann::json::array()},
       {"eta_values", {0.7}}});
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("unknown keys are rejected with their path") {
  try {
    (void)parse_config_json({{"mode", "threshold"}, {"mysterious", 1}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mysterious") != std::string::npos);
  }
  try {
    (void)parse_config_json(
        {{"channel", {{"mu", 1.0}, {"dark_rate", 0.1}}}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("channel.dark_rate") != std::string::npos);
  }
}

TEST_CASE("config key documentation matches the shipped schema") {
  const fs::path schema_path =
      fs::path(QMONEY_FIXTURE_DIR).parent_path().parent_path() / "docs" /
      "config_schema.json";
  std::ifstream in(schema_path);
  REQUIRE(in.good());
  nlohmann::json schema;
  in >> schema;
  const auto& keys = schema.at("keys");
  std::set<std::string> documented;
  for (const ConfigKeyDoc& doc : config_key_docs()) documented.insert(doc.key);
  std::set<std::string> declared;
  for (auto it = keys.begin(); it != keys.end(); ++it) declared.insert(it.key());
  CHECK(documented == declared);
}

TEST_CASE("atomic write leaves no temp file behind") {
  const fs::path target = scratch_dir() / "atomic.txt";
  atomic_write_file(target.string(), "payload\n");
  CHECK(slurp(target) == "payload\n");
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));
  atomic_write_file(target.string(), "payload2\n");
  CHECK(slurp(target) == "payload2\n");
}

TEST_CASE("cli: threshold at the no-cloning boundary prints zero and exits 0") {
  std::string out;
  const int rc = run_cli("threshold --mu 1 --eta 0.5", &out);
  CHECK(rc == 0);
  CHECK(out.find("epsilon_threshold") != std::string::npos);
  const double value = std::stod(out.substr(out.find('=') + 1));
  CHECK(value < 1e-4);
}

TEST_CASE("cli: validation failures exit 3") {
  std::string out;
  CHECK(run_cli("threshold --mu 1 --eta 1.5", &out) == 3);
  CHECK(out.find("eta") != std::string::npos);
  CHECK(run_cli("sweep", &out) == 3);
}

TEST_CASE("cli: solver failure exits 2") {
  std::string out;
  const int rc = run_cli("threshold --mu 1 --eta 0.77 --max-iter 2", &out);
  CHECK(rc == 2);
  CHECK(out.find("MAX_ITER") != std::string::npos);
}

TEST_CASE("cli: help lists every config key") {
  std::string out;
  const int rc = run_cli("--help", &out);
  CHECK(rc == 0);
  for (const ConfigKeyDoc& doc : config_key_docs()) {
    CAPTURE(doc.key);
    CHECK(out.find(doc.key) != std::string::npos);
  }
}

TEST_CASE("cli: config file plus flag override") {
  const fs::path cfg = scratch_dir() / "th.json";
  write_file(cfg, R"({"mode": "threshold", "mu": 1.0, "eta": 1.5})");
  std::string out;
  // The file alone fails validation; the flag override fixes it.
  CHECK(run_cli("threshold --config " + cfg.string(), &out) == 3);
  CHECK(run_cli("threshold --config " + cfg.string() + " --eta 0.5", &out) == 0);
}

TEST_CASE("cli: config path from the environment") {
  const fs::path cfg = scratch_dir() / "env.json";
  write_file(cfg, R"({"mode": "threshold", "mu": 1.0, "eta": 0.45})");
  std::string out;
  const fs::path log = scratch_dir() / "env_out.txt";
  const std::string cmd = "QMONEY_CONFIG=" + cfg.string() + " " + cli_path() +
                          " threshold > " + log.string() + " 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(slurp(log).find("epsilon_threshold") != std::string::npos);
}

TEST_CASE("cli: sweep CSV round-trips exactly at 12 significant digits") {
  const fs::path out_csv = scratch_dir() / "grid.csv";
  std::string out;
  const int rc = run_cli("sweep --mu 0.8 1.0 --eta 0.6 0.7 --out " +
                             out_csv.string(),
                         &out);
  REQUIRE(rc == 0);
  const std::string first = slurp(out_csv);
  REQUIRE(std::count(first.begin(), first.end(), '\n') == 5);
  // Re-parse and re-format every numeric field: identical text.
  std::istringstream lines(first);
  std::string header, line;
  std::getline(lines, header);
  std::ostringstream rebuilt;
  rebuilt << header << '\n';
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(cells, cell, ',')) parts.push_back(cell);
    REQUIRE(parts.size() == 6);
    for (int i = 0; i < 5; ++i) {
      rebuilt << fmt_g12(std::stod(parts[i])) << ',';
    }
    rebuilt << parts[5] << '\n';
  }
  CHECK(rebuilt.str() == first);
}

TEST_CASE("cli: sweep JSON output reloads with identical values") {
  const fs::path out_json = scratch_dir() / "grid.json";
  std::string out;
  const int rc = run_cli(
      "sweep --mu 1.0 --eta 0.6 0.7 --format json --out " + out_json.string(),
      &out);
  REQUIRE(rc == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out_json));
  CHECK(j.at("results").size() == 2);
  // secure-region plot layout from the same grid
  const fs::path region = scratch_dir() / "region.csv";
  CHECK(run_cli("sweep --mu 1.0 --eta 0.6 0.7 --plot secure-region --out " +
                    region.string(),
                &out) == 0);
  CHECK(slurp(region).rfind("eta,epsilon_threshold\n", 0) == 0);
}

TEST_CASE("cli: simulate is seed-deterministic") {
  const fs::path a = scratch_dir() / "sim_a.json";
  const fs::path b = scratch_dir() / "sim_b.json";
  std::string out;
  const std::string common =
      "simulate --mu 1 --encoding-error 0.004 --cycles 300 --seed 99 "
      "--format json --out ";
  REQUIRE(run_cli(common + a.string(), &out) == 0);
  REQUIRE(run_cli(common + b.string(), &out) == 0);
  CHECK(slurp(a) == slurp(b));
  const nlohmann::json ja = nlohmann::json::parse(slurp(a));
  CHECK(ja.at("cycles").get<int>() == 300);
}

TEST_CASE("cli: verdict reports security with the margin in sigma") {
  std::string out;
  const int rc = run_cli(
      "verdict --mu 1 --encoding-error 0.00315 --memory-efficiency 0.77 "
      "--background 0.00346 --storage --cycles 1000 --seed 4",
      &out);
  REQUIRE(rc == 0);
  CHECK(out.find("SECURE") != std::string::npos);
  CHECK(out.find("sigma") != std::string::npos);
}
