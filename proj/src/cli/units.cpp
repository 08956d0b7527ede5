// Copyright 2026 The pme Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pme/cli/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

namespace pme::cli {
namespace {

struct Unit {
  std::string_view symbol;
  Dimension dim;
  double scale;
};

constexpr double kAmu = 1.66053906660e-27;

constexpr std::array<Unit, 26> kUnits{{
    {"m", Dimension::Length, 1.0},
    {"mm", Dimension::Length, 1e-3},
    {"um", Dimension::Length, 1e-6},
    {"\xC2\xB5m", Dimension::Length, 1e-6},
    {"nm", Dimension::Length, 1e-9},
    {"pm", Dimension::Length, 1e-12},
    {"Hz", Dimension::Frequency, 1.0},
    {"kHz", Dimension::Frequency, 1e3},
    {"MHz", Dimension::Frequency, 1e6},
    {"GHz", Dimension::Frequency, 1e9},
    {"THz", Dimension::Frequency, 1e12},
    {"s", Dimension::Time, 1.0},
    {"ms", Dimension::Time, 1e-3},
    {"us", Dimension::Time, 1e-6},
    {"\xC2\xB5s", Dimension::Time, 1e-6},
    {"ns", Dimension::Time, 1e-9},
    {"ps", Dimension::Time, 1e-12},
    {"rad", Dimension::Angle, 1.0},
    {"mrad", Dimension::Angle, 1e-3},
    {"deg", Dimension::Angle, std::numbers::pi / 180.0},
    {"V", Dimension::Voltage, 1.0},
    {"mV", Dimension::Voltage, 1e-3},
    {"kV", Dimension::Voltage, 1e3},
    {"kg", Dimension::Mass, 1.0},
    {"amu", Dimension::Mass, kAmu},
    {"u", Dimension::Mass, kAmu},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_string(Dimension dim) {
  switch (dim) {
    case Dimension::Dimensionless:
      return "dimensionless";
    case Dimension::Length:
      return "length";
    case Dimension::Frequency:
      return "frequency";
    case Dimension::Time:
      return "time";
    case Dimension::Angle:
      return "angle";
    case Dimension::Voltage:
      return "voltage";
    case Dimension::Mass:
      return "mass";
  }
  return "?";
}

double parse_quantity(std::string_view text, Dimension dim) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr == s.data()) throw UnitError("not a number: '" + std::string(text) + "'");
  const std::string_view suffix = trim(s.substr(static_cast<std::size_t>(ptr - s.data())));
  if (!std::isfinite(value)) throw UnitError("value is not finite: '" + std::string(text) + "'");
  if (suffix.empty()) return value;
  for (const Unit& u : kUnits) {
    if (u.symbol != suffix) continue;
    if (u.dim != dim)
      throw UnitError("unit '" + std::string(suffix) + "' is a " + to_string(u.dim) + ", expected " + to_string(dim));
    return value * u.scale;
  }
  throw UnitError("unknown unit '" + std::string(suffix) + "'");
}

}  // namespace pme::cli
