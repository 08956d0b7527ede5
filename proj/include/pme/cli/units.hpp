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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pme::cli {

enum class Dimension { Dimensionless, Length, Frequency, Time, Angle, Voltage, Mass };

std::string to_string(Dimension dim);

class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parses "62 um", "493nm", "10 GHz", "0.5" into SI base units (meters, hertz,
// seconds, radians, volts, kilograms). A bare number is taken as already in SI.
double parse_quantity(std::string_view text, Dimension dim);

}  // namespace pme::cli
