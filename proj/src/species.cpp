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

#include "pme/species.hpp"

#include <algorithm>

namespace pme {

std::span<const SpeciesPreset> species_presets() {
  static const std::vector<SpeciesPreset> table = {
      {"Ca+", 397, 393, {{43, 3.2}}},
      {"Sr+", 422, 408, {{87, 5.0}}},
      {"Ba+", 493, 455, {{133, 9.9}, {137, 8.0}}},
      {"Yb+", 369, 329, {{171, 12.6}, {173, 10.5}}},
  };
  return table;
}

std::optional<SpeciesPreset> find_species(std::string_view name) {
  const auto table = species_presets();
  const auto it = std::find_if(table.begin(), table.end(), [&](const SpeciesPreset& s) { return s.name == name; });
  if (it == table.end()) return std::nullopt;
  return *it;
}

}  // namespace pme
