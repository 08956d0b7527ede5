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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pme {

struct HyperfineIsotope {
  int mass_number = 0;
  double splitting_ghz = 0;
};

struct SpeciesPreset {
  std::string name;
  double p12_wavelength_nm = 0;
  double p32_wavelength_nm = 0;
  std::vector<HyperfineIsotope> isotopes;
};

// Bundled table, version 1.
inline constexpr int kSpeciesTableVersion = 1;

std::span<const SpeciesPreset> species_presets();

// Lookup by name ("Ca+", "Sr+", "Ba+", "Yb+"); case-sensitive.
std::optional<SpeciesPreset> find_species(std::string_view name);

}  // namespace pme
