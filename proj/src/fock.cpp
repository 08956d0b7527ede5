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

#include "pme/fock.hpp"

namespace pme {

std::string to_string(Channel channel) {
  switch (channel) {
    case Channel::Path: return "path";
    case Channel::TE0: return "TE0";
    case Channel::TE1: return "TE1";
    case Channel::FreqRed: return "red";
    case Channel::FreqBlue: return "blue";
    case Channel::BinEarly: return "early";
    case Channel::BinLate: return "late";
  }
  return "?";
}

std::string to_string(const ModeLabel& mode) {
  return "n" + std::to_string(mode.node) + "." + to_string(mode.channel) +
         (mode.match == Match::Matched ? "" : ".orth");
}

std::string to_string(BellState state) {
  return state == BellState::PsiPlus ? "psi+" : "psi-";
}

FockBasis::FockBasis(std::vector<ModeLabel> modes) : modes_(std::move(modes)) {
  std::sort(modes_.begin(), modes_.end());
  modes_.erase(std::unique(modes_.begin(), modes_.end()), modes_.end());
  const std::size_t k = modes_.size();
  configs_.emplace_back(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    Occupation occ(k, 0);
    occ[i] = 1;
    configs_.push_back(std::move(occ));
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      Occupation occ(k, 0);
      ++occ[i];
      ++occ[j];
      configs_.push_back(std::move(occ));
    }
  }
  for (std::size_t c = 0; c < configs_.size(); ++c)
    lookup_.emplace(configs_[c], static_cast<Eigen::Index>(c));
}

Eigen::Index FockBasis::photon_index(const Occupation& occ) const {
  const auto it = lookup_.find(occ);
  if (it == lookup_.end()) throw std::out_of_range("FockBasis: occupation outside truncated space");
  return it->second;
}

std::optional<std::size_t> FockBasis::find_mode(const ModeLabel& mode) const {
  const auto it = std::lower_bound(modes_.begin(), modes_.end(), mode);
  if (it == modes_.end() || *it != mode) return std::nullopt;
  return static_cast<std::size_t>(it - modes_.begin());
}

std::size_t FockBasis::mode_index(const ModeLabel& mode) const {
  if (const auto m = find_mode(mode)) return *m;
  throw std::invalid_argument("FockBasis: mode " + to_string(mode) + " is not in the basis");
}

}  // namespace pme
