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

// Dipole emission patterns and their collection by a planar aperture below
// the ion. The ion sits at the origin, the aperture lies in the plane z = -h.

#include <Eigen/Core>

#include <utility>

#include "pme/protocols.hpp"
#include "pme/trap_geometry.hpp"

namespace pme {

enum class TransitionKind { Pi, Sigma, Isotropic };

struct DipoleTransition {
  TransitionKind kind = TransitionKind::Pi;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitY();  // quantization axis
};

// Emitted power per steradian along `direction`, normalized to unit total.
double dipole_intensity(const DipoleTransition& t, const Eigen::Vector3d& direction);

enum class CollectionRegion { Aperture, FullSphere };

struct CollectionChannel {
  DipoleTransition transition;
  ApertureSpec aperture;
  double branching_weight = 1.0;
  CollectionRegion region = CollectionRegion::Aperture;
};

// Fraction of the emitted power that reaches the collection region
// (the branching weight is not applied).
double collected_fraction(const CollectionChannel& ch, double rel_tol = 1e-8);

struct ChannelBalance {
  double pi_channel = 0.0;
  double sigma_channel = 0.0;
  double ratio() const { return pi_channel / sigma_channel; }
};

ChannelBalance channel_balance(const ApertureSpec& aperture, double pi_weight = 1.0 / 3.0,
                               double sigma_weight = 2.0 / 3.0);

// Largest loss of dominant-herald fidelity of the polarization protocol when
// one collection site leaks power fraction 10^(dB/10) between its two
// channel waveguides, maximized over the phase of the leaked light.
double crosstalk_infidelity(const ProtocolConfig& config, double crosstalk_db, int phase_steps = 16);

// Squared overlap of two exponentially decaying single-photon wavepackets
// offset in time by dt.
double temporal_overlap(double dt, double tau);

}  // namespace pme
