/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_TEXT_FORMAT_HPP
#define QMONEY_TEXT_FORMAT_HPP

#include <cstdio>
#include <string>

namespace qmoney {

// Canonical numeric format for CSV/JSON text output: 12 significant
// digits, '.' decimal separator (C locale).
inline std::string fmt_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace qmoney

#endif  // QMONEY_TEXT_FORMAT_HPP
