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

#include "pme/protocols.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace pme {
namespace {

constexpr double kSpeedOfLight = 299792458.0;

using C = std::complex<double>;

// Channel pair carried by each kind: index 0 pairs with the ion in |down>,
// index 1 with |up>. The number kind uses only the path channel.
std::vector<Channel> channels_of(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Number:
      return {Channel::Path};
    case ProtocolKind::TimeBin:
      return {Channel::BinEarly, Channel::BinLate};
    case ProtocolKind::Polarization:
      return {Channel::TE0, Channel::TE1};
    case ProtocolKind::Frequency:
      return {Channel::FreqRed, Channel::FreqBlue};
  }
  return {};
}

bool resolves_channels(const ProtocolConfig& c) {
  return c.kind == ProtocolKind::TimeBin || (c.kind != ProtocolKind::Number && c.enhanced_analyzer);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

// Phase picked up by the node-1 photon that heralds ion 2 in |up>.
double node_phase(const ProtocolConfig& c, double path_difference) {
  const double dk = 2 * std::numbers::pi * c.frequency_splitting / kSpeedOfLight;
  switch (c.kind) {
    case ProtocolKind::Number:
      return 2 * std::numbers::pi / c.wavelength * path_difference;
    case ProtocolKind::TimeBin:
      return dk * path_difference + c.qubit_detuning * c.bin_separation;
    case ProtocolKind::Polarization:
    case ProtocolKind::Frequency:
      return dk * path_difference;
  }
  return 0.0;
}

struct Detector {
  std::string name;
  int port = 0;
  int channel = -1;  // -1: all channels of the port
};

std::vector<Detector> analyzer_detectors(const ProtocolConfig& c) {
  std::vector<Detector> out;
  const auto chans = channels_of(c.kind);
  for (int port = 0; port < 2; ++port) {
    if (resolves_channels(c)) {
      for (int ch = 0; ch < 2; ++ch)
        out.push_back({"p" + std::to_string(port) + "." + to_string(chans[static_cast<std::size_t>(ch)]), port, ch});
    } else {
      out.push_back({"p" + std::to_string(port), port, -1});
    }
  }
  return out;
}

// Herald classification for a click pattern; returns false for invalid patterns.
bool classify(const ProtocolConfig& c, const std::vector<Detector>& dets, std::uint32_t pattern, double phase,
              HeraldEntry& e) {
  std::vector<const Detector*> fired;
  for (std::size_t d = 0; d < dets.size(); ++d)
    if (pattern >> d & 1u) fired.push_back(&dets[d]);
  if (c.kind == ProtocolKind::Number) {
    if (fired.size() != 1) return false;
    e.target = BellState::PsiPlus;
    e.correction = {(fired[0]->port == 0 ? 0.5 : -0.5) * std::numbers::pi + phase, false};
    return true;
  }
  if (fired.size() != 2) return false;
  if (!resolves_channels(c)) {
    // one click per port
    e.target = BellState::PsiMinus;
    e.correction = {phase, false};
    return true;
  }
  if (fired[0]->channel == fired[1]->channel) return false;
  e.target = fired[0]->port == fired[1]->port ? BellState::PsiPlus : BellState::PsiMinus;
  e.correction = {phase, false};
  return true;
}

}  // namespace

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Number:
      return "number";
    case ProtocolKind::TimeBin:
      return "time-bin";
    case ProtocolKind::Polarization:
      return "polarization";
    case ProtocolKind::Frequency:
      return "frequency";
  }
  return "?";
}

std::optional<ProtocolKind> parse_protocol_kind(std::string_view name) {
  for (auto k : {ProtocolKind::Number, ProtocolKind::TimeBin, ProtocolKind::Polarization, ProtocolKind::Frequency})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

std::vector<std::string> validate(const ProtocolConfig& c) {
  std::vector<std::string> out;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
  };
  for (int n = 0; n < 2; ++n) {
    const NodeParams& p = c.nodes[static_cast<std::size_t>(n)];
    const std::string tag = "node " + std::to_string(n) + ": ";
    check(in_unit(p.excitation_probability), tag + "excitation probability must lie in [0, 1]");
    check(p.branching_ratio > 0.0 && p.branching_ratio <= 1.0, tag + "branching ratio must lie in (0, 1]");
    check(p.solid_angle_fraction >= 0.0 && p.solid_angle_fraction < 0.5,
          tag + "solid-angle fraction must lie in [0, 0.5)");
    check(in_unit(p.transmission), tag + "transmission must lie in [0, 1]");
    check(in_unit(p.detector_efficiency), tag + "detector efficiency must lie in [0, 1]");
    check(in_unit(p.crosstalk), tag + "cross-talk amplitude must lie in [0, 1]");
    if (c.kind == ProtocolKind::Number || c.kind == ProtocolKind::TimeBin)
      check(p.crosstalk == 0.0, tag + "cross-talk applies to the polarization and frequency kinds only");
  }
  check(c.wavelength > 0.0, "wavelength must be positive");
  check(std::isfinite(c.path_difference), "path difference must be finite");
  check(in_unit(c.mode_overlap), "mode overlap must lie in [0, 1]");
  check(in_unit(c.transmissivity), "transmissivity must lie in [0, 1]");
  check(c.motional_fidelity >= 0.0 && c.motional_fidelity <= 1.0, "motional fidelity factor must lie in [0, 1]");
  if (c.kind == ProtocolKind::Frequency)
    check(c.frequency_splitting != 0.0, "frequency kind requires a nonzero frequency splitting");
  if (c.kind == ProtocolKind::TimeBin) {
    check(c.lifetime > 0.0, "excited-state lifetime must be positive");
    check(c.bin_separation > c.lifetime,
          "time bins must be separated by more than the excited-state lifetime (bin_separation > lifetime)");
  }
  return out;
}

void require_valid(const ProtocolConfig& config) {
  const auto diags = validate(config);
  if (!diags.empty()) throw std::invalid_argument("invalid protocol config: " + diags.front());
}

NodeState prepare_node_state(const ProtocolConfig& c, int node) {
  require_valid(c);
  if (node != 0 && node != 1) throw std::invalid_argument("prepare_node_state: node must be 0 or 1");
  const NodeParams& p = c.nodes[static_cast<std::size_t>(node)];
  const auto chans = channels_of(c.kind);
  NodeState s;
  s.node = node;
  // Node 1 carries the distinguishable component.
  const double m = node == 1 ? c.mode_overlap : 1.0;
  auto emit = [&](IonLevel level, Channel ch, C amp) {
    if (m > 0.0) s.terms.push_back({level, ModeLabel{node, ch, Match::Matched}, amp * std::sqrt(m)});
    if (m < 1.0) s.terms.push_back({level, ModeLabel{node, ch, Match::Orthogonal}, amp * std::sqrt(1.0 - m)});
  };
  const double half = 1.0 / std::sqrt(2.0);
  if (c.kind == ProtocolKind::Number) {
    const double pe = p.excitation_probability;
    if (pe < 1.0) s.terms.push_back({IonLevel::Down, std::nullopt, C(std::sqrt(1.0 - pe))});
    if (pe > 0.0) emit(IonLevel::Up, chans[0], C(std::sqrt(pe)));
    s.emission_transmission = p.branching_ratio;
  } else {
    emit(IonLevel::Down, chans[0], C(half));
    emit(IonLevel::Up, chans[1], C(half));
    s.emission_transmission = p.excitation_probability * p.branching_ratio;
  }
  return s;
}

double HeraldTable::dominant_fidelity() const {
  if (!dominant) throw std::runtime_error("herald table has no successful pattern");
  return entries[*dominant].fidelity;
}

double HeraldTable::probability_sum() const {
  double s = 0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

HeraldTable run_protocol(const ProtocolConfig& config) { return run_protocol(config, 0.0); }

HeraldTable run_protocol(const ProtocolConfig& c, double path_offset) {
  require_valid(c);
  const auto chans = channels_of(c.kind);
  const NodeState n0 = prepare_node_state(c, 0);
  const NodeState n1 = prepare_node_state(c, 1);

  std::vector<ModeLabel> modes;
  const bool need_orthogonal = c.mode_overlap < 1.0;
  for (int node = 0; node < 2; ++node)
    for (Channel ch : chans) {
      modes.push_back({node, ch, Match::Matched});
      if (need_orthogonal) modes.push_back({node, ch, Match::Orthogonal});
    }

  std::vector<KetTerm<double>> kets;
  for (const auto& a : n0.terms)
    for (const auto& b : n1.terms) {
      BasisKet k{a.level, b.level, {}};
      if (a.photon) k.occupations[*a.photon] = 1;
      if (b.photon) k.occupations[*b.photon] = 1;
      kets.push_back({k, a.amplitude * b.amplitude});
    }
  JointState<double> state = make_state<double>(kets, modes);

  // Collection and transport losses; detector inefficiency beyond the
  // common analyzer efficiency is attributed to the node's path.
  const double eta_det = std::max(c.nodes[0].detector_efficiency, c.nodes[1].detector_efficiency);
  for (int node = 0; node < 2; ++node) {
    const NodeParams& p = c.nodes[static_cast<std::size_t>(node)];
    const double extra = eta_det > 0.0 ? p.detector_efficiency / eta_det : 1.0;
    const double t = (node == 0 ? n0 : n1).emission_transmission * p.solid_angle_fraction * p.transmission * extra;
    for (const auto& m : modes)
      if (m.node == node) state = apply_loss(state, m, t);
  }

  const double nominal = node_phase(c, c.path_difference);
  const double actual = node_phase(c, c.path_difference + path_offset);
  if (actual != 0.0)
    for (const auto& m : modes)
      if (m.node == 1 && m.channel == chans.back()) state = apply_phase(state, m, actual);

  // Coherent leakage between the two channel modes at each collection site.
  for (int node = 0; node < 2; ++node) {
    const NodeParams& p = c.nodes[static_cast<std::size_t>(node)];
    if (p.crosstalk == 0.0) continue;
    for (Match mt : {Match::Matched, Match::Orthogonal}) {
      const ModeLabel from{node, chans[1], mt};
      if (!state.basis().find_mode(from)) continue;
      state = apply_crosstalk(state, from, ModeLabel{node, chans[0], mt}, p.crosstalk, p.crosstalk_phase);
    }
  }

  for (Channel ch : chans)
    for (Match mt : {Match::Matched, Match::Orthogonal}) {
      const ModeLabel a{0, ch, mt};
      if (!state.basis().find_mode(a)) continue;
      state = apply_beamsplitter(state, BeamsplitterSpec{a, ModeLabel{1, ch, mt}, c.transmissivity, 0.0});
    }

  const auto dets = analyzer_detectors(c);
  std::vector<DetectorSpec> specs;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    DetectorSpec spec{static_cast<int>(d), {}, eta_det};
    for (const auto& m : state.basis().modes()) {
      if (m.node != dets[d].port) continue;
      if (dets[d].channel >= 0 && m.channel != chans[static_cast<std::size_t>(dets[d].channel)]) continue;
      spec.modes.push_back(m);
    }
    specs.push_back(std::move(spec));
  }

  HeraldTable table;
  table.kind = c.kind;
  for (const auto& d : dets) table.detectors.push_back(d.name);
  double weighted = 0.0;
  for (const auto& out : detect(state, specs)) {
    HeraldEntry e;
    e.pattern = out.pattern;
    e.probability = out.probability;
    e.ions = out.ions;
    e.valid = classify(c, dets, out.pattern, nominal, e);
    if (e.valid && e.probability > 0.0) {
      e.fidelity = bell_fidelity(e.ions, e.target, e.correction);
      if (c.kind == ProtocolKind::Number) e.fidelity *= c.motional_fidelity;
      table.total_success += e.probability;
      weighted += e.probability * e.fidelity;
      const double best = table.dominant ? table.entries[*table.dominant].probability : 0.0;
      if (!table.dominant || e.probability > best * (1.0 + 1e-12)) table.dominant = table.entries.size();
    }
    table.entries.push_back(e);
  }
  if (table.total_success > 0.0) table.mean_fidelity = weighted / table.total_success;
  return table;
}

double analytic_herald_prob(const ProtocolConfig& c) {
  require_valid(c);
  double per_node[2];
  for (int n = 0; n < 2; ++n) {
    const NodeParams& p = c.nodes[static_cast<std::size_t>(n)];
    per_node[n] = p.excitation_probability * p.branching_ratio * p.epsilon();
  }
  if (c.kind == ProtocolKind::Number) return per_node[0] + per_node[1];
  const double prefactor = resolves_channels(c) ? 0.5 : 0.25;
  return prefactor * per_node[0] * per_node[1];
}

double rate_ratio_number_vs_two_photon(double p_e, double epsilon, double gamma) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("rate ratio: epsilon must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("rate ratio: branching ratio must be positive");
  return 4.0 * p_e / (gamma * epsilon);
}

double phase_jitter_fidelity(const ProtocolConfig& config, double sigma_l, int samples, std::uint64_t seed) {
  if (!(sigma_l >= 0.0)) throw std::invalid_argument("phase jitter: sigma must be non-negative");
  if (sigma_l == 0.0) return run_protocol(config).mean_fidelity;
  if (samples < 1) throw std::invalid_argument("phase jitter: need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double u = (i + u01(rng)) / samples;
    const double z = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
    sum += run_protocol(config, sigma_l * z).mean_fidelity;
  }
  return sum / samples;
}

double balance_excitation(double p_e1, double epsilon1, double epsilon2) {
  if (!(epsilon2 > 0.0)) throw std::invalid_argument("balance_excitation: epsilon2 must be positive");
  if (!(p_e1 >= 0.0 && epsilon1 >= 0.0)) throw std::invalid_argument("balance_excitation: negative input");
  const double p_e2 = p_e1 * epsilon1 / epsilon2;
  if (p_e2 > 1.0) {
    std::ostringstream msg;
    msg << "balance_excitation: required excitation probability " << p_e2
        << " exceeds 1; losses too asymmetric to compensate";
    throw std::domain_error(msg.str());
  }
  return p_e2;
}

double splitter_imbalance_infidelity(const ProtocolConfig& config, double transmissivity) {
  if (!in_unit(transmissivity)) throw std::invalid_argument("splitter imbalance: T outside [0, 1]");
  ProtocolConfig balanced = config;
  balanced.transmissivity = 0.5;
  ProtocolConfig skewed = config;
  skewed.transmissivity = transmissivity;
  return run_protocol(balanced).dominant_fidelity() - run_protocol(skewed).dominant_fidelity();
}

}  // namespace pme
