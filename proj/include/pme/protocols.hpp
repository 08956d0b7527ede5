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

// Heralded two-node entanglement protocols built on the Fock engine.
//
// Each node contributes one ion qubit and at most one photon. The photons of
// node 0 and node 1 enter ports 0 and 1 of a beamsplitter (one per channel
// and internal component); detectors sit on the output ports. After
// interference the mode label `node` denotes the output port.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pme/fock.hpp"

namespace pme {

enum class ProtocolKind { Number, TimeBin, Polarization, Frequency };

std::string to_string(ProtocolKind kind);
std::optional<ProtocolKind> parse_protocol_kind(std::string_view name);

struct NodeParams {
  double excitation_probability = 0.05;  // p_e
  double branching_ratio = 1.0;          // gamma
  double solid_angle_fraction = 0.1;     // Omega / 4 pi
  double transmission = 1.0;             // p_t
  double detector_efficiency = 1.0;      // eta_D
  double crosstalk = 0.0;                // chi, amplitude leaked between the two channels at this node
  double crosstalk_phase = 0.0;          // phase of the leaked amplitude

  double epsilon() const { return solid_angle_fraction * transmission * detector_efficiency; }
};

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::Number;
  std::array<NodeParams, 2> nodes{};
  double wavelength = 493e-9;          // lambda_0 [m]
  double path_difference = 0.0;        // Delta l of node 1 relative to node 0 [m]
  double frequency_splitting = 10e9;   // Delta nu between the two photon colors [Hz]
  double qubit_detuning = 0.0;         // Delta omega between the two ion qubits [rad/s]
  double mode_overlap = 1.0;           // M
  double transmissivity = 0.5;         // analyzer beamsplitter T
  bool enhanced_analyzer = true;
  double bin_separation = 1e-6;        // Delta t [s]
  double lifetime = 8e-9;              // tau [s]
  double motional_fidelity = 1.0;      // multiplicative factor, number kind only
};

// Human-readable problems with the configuration; empty when it is runnable.
std::vector<std::string> validate(const ProtocolConfig& config);

// Throws std::invalid_argument carrying the first diagnostic.
void require_valid(const ProtocolConfig& config);

// One branch of a node's ion-photon state. `photon` is empty for vacuum.
struct NodeTerm {
  IonLevel level = IonLevel::Down;
  std::optional<ModeLabel> photon;
  std::complex<double> amplitude;
};

struct NodeState {
  int node = 0;
  std::vector<NodeTerm> terms;
  // Probability that an emitted photon enters the tracked channel
  // (gamma for the number kind, p_e * gamma otherwise).
  double emission_transmission = 1.0;
};

NodeState prepare_node_state(const ProtocolConfig& config, int node);

struct HeraldEntry {
  std::uint32_t pattern = 0;
  double probability = 0.0;
  IonMatrix<double> ions = IonMatrix<double>::Zero();
  bool valid = false;
  BellState target = BellState::PsiMinus;
  Correction correction;
  double fidelity = 0.0;  // only meaningful for valid entries with probability > 0
};

struct HeraldTable {
  ProtocolKind kind = ProtocolKind::Number;
  std::vector<std::string> detectors;
  std::vector<HeraldEntry> entries;
  double total_success = 0.0;
  double mean_fidelity = 0.0;  // success-weighted over valid entries
  std::optional<std::size_t> dominant;

  double dominant_fidelity() const;
  double probability_sum() const;
};

HeraldTable run_protocol(const ProtocolConfig& config);

// Same as run_protocol with an additional path-length offset on node 1 that the
// corrections do not compensate.
HeraldTable run_protocol(const ProtocolConfig& config, double path_offset);

double analytic_herald_prob(const ProtocolConfig& config);

double rate_ratio_number_vs_two_photon(double p_e, double epsilon, double gamma = 1.0);

// Average of the success-weighted fidelity over a Gaussian path-length jitter.
// Uses stratified normal samples so small sample counts remain accurate.
double phase_jitter_fidelity(const ProtocolConfig& config, double sigma_l, int samples = 1024,
                             std::uint64_t seed = 1);

double balance_excitation(double p_e1, double epsilon1, double epsilon2);

// Loss of dominant-herald fidelity caused by an analyzer transmissivity T
// relative to a balanced splitter.
double splitter_imbalance_infidelity(const ProtocolConfig& config, double transmissivity);

}  // namespace pme
