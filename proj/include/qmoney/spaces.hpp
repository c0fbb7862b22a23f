/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_SPACES_HPP
#define QMONEY_SPACES_HPP

#include <algorithm>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "qmoney/complex_matrix.hpp"

namespace qmoney {

// The three Hilbert-space factors of the cloning problem. The two copies
// live in the 3-dim verifier outcome space {|0>,|1>,|no-click>}; the
// initial space is the 7-dim photon-number-resolved state space.
enum class SpaceName { Copy1, Copy2, Initial };

struct SpaceLabel {
  SpaceName name;
  Index dim;
};

inline SpaceLabel copy1_space() { return {SpaceName::Copy1, 3}; }
inline SpaceLabel copy2_space() { return {SpaceName::Copy2, 3}; }
inline SpaceLabel initial_space() { return {SpaceName::Initial, 7}; }

// Composite index convention: for spaces (s0, s1, ...) listed left to
// right, the full index is (((i0*d1)+i1)*d2+i2)... i.e. the leftmost label
// is the slowest-varying index (standard Kronecker ordering).
//
// Generic engine: `keep[t]` selects which tensor factors survive. The
// traced-out factors are summed over their diagonal.
inline ComplexMatrix partial_trace_dims(const ComplexMatrix& m,
                                        const std::vector<Index>& dims,
                                        const std::vector<bool>& keep) {
  if (dims.size() != keep.size()) {
    throw std::invalid_argument("partial_trace: dims/keep size mismatch");
  }
  Index total = 1;
  for (Index d : dims) {
    if (d <= 0) throw std::invalid_argument("partial_trace: bad factor dim");
    total *= d;
  }
  if (m.rows() != total || m.cols() != total) {
    throw std::invalid_argument("partial_trace: matrix dim " +
                                std::to_string(m.rows()) +
                                " does not match factor product " +
                                std::to_string(total));
  }
  Index kept_total = 1;
  for (std::size_t t = 0; t < dims.size(); ++t) {
    if (keep[t]) kept_total *= dims[t];
  }

  const auto digits = [&](Index flat) {
    std::vector<Index> d(dims.size());
    for (std::size_t t = dims.size(); t-- > 0;) {
      d[t] = flat % dims[t];
      flat /= dims[t];
    }
    return d;
  };
  const auto kept_flat = [&](const std::vector<Index>& dig) {
    Index flat = 0;
    for (std::size_t t = 0; t < dims.size(); ++t) {
      if (keep[t]) flat = flat * dims[t] + dig[t];
    }
    return flat;
  };

  ComplexMatrix out = ComplexMatrix::Zero(kept_total, kept_total);
  for (Index r = 0; r < total; ++r) {
    const auto rd = digits(r);
    for (Index c = 0; c < total; ++c) {
      const auto cd = digits(c);
      bool diag = true;
      for (std::size_t t = 0; t < dims.size(); ++t) {
        if (!keep[t] && rd[t] != cd[t]) {
          diag = false;
          break;
        }
      }
      if (diag) out(kept_flat(rd), kept_flat(cd)) += m(r, c);
    }
  }
  return out;
}

// Trace out the factors named in `traced_out`, keeping the rest in order.
inline HermitianOperator partial_trace(const HermitianOperator& m,
                                       const std::vector<SpaceLabel>& spaces,
                                       const std::vector<SpaceName>& traced_out) {
  for (SpaceName t : traced_out) {
    const bool known = std::any_of(spaces.begin(), spaces.end(),
                                   [&](const SpaceLabel& s) { return s.name == t; });
    if (!known) {
      throw std::invalid_argument(
          "partial_trace: traced_out label is not one of the given spaces");
    }
  }
  std::vector<Index> dims;
  std::vector<bool> keep;
  dims.reserve(spaces.size());
  keep.reserve(spaces.size());
  for (const SpaceLabel& s : spaces) {
    dims.push_back(s.dim);
    keep.push_back(std::none_of(traced_out.begin(), traced_out.end(),
                                [&](SpaceName t) { return t == s.name; }));
  }
  ComplexMatrix out = partial_trace_dims(m.matrix(), dims, keep);
  return HermitianOperator(std::move(out), m.hermiticity_tol() * 10);
}

}  // namespace qmoney

#endif  // QMONEY_SPACES_HPP
