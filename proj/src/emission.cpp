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

#include "pme/emission.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pme {
namespace {

constexpr double kPi = std::numbers::pi;

template <typename F>
double integrate(F f, double lo, double hi, double rel_tol) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, rel_tol);
}

}  // namespace

double dipole_intensity(const DipoleTransition& t, const Eigen::Vector3d& direction) {
  const double n = direction.norm();
  if (!(n > 0.0)) throw std::invalid_argument("dipole_intensity: zero direction");
  if (t.kind == TransitionKind::Isotropic) return 1.0 / (4 * kPi);
  const double an = t.axis.norm();
  if (std::abs(an - 1.0) > 1e-12) throw std::invalid_argument("dipole_intensity: quantization axis not normalized");
  const double c = t.axis.dot(direction) / n;
  const double c2 = std::min(1.0, c * c);
  if (t.kind == TransitionKind::Pi) return 3.0 / (8 * kPi) * (1.0 - c2);
  return 3.0 / (16 * kPi) * (1.0 + c2);
}

double collected_fraction(const CollectionChannel& ch, double rel_tol) {
  const auto& t = ch.transition;
  if (ch.region == CollectionRegion::FullSphere) {
    auto ring = [&](double theta) {
      const double s = std::sin(theta);
      auto around = [&](double phi) {
        return dipole_intensity(t, {s * std::cos(phi), s * std::sin(phi), std::cos(theta)});
      };
      return s * integrate(around, 0.0, 2 * kPi, rel_tol);
    };
    return integrate(ring, 0.0, kPi, rel_tol);
  }
  const ApertureSpec& ap = ch.aperture;
  if (!ap.centered) throw std::invalid_argument("collected_fraction: only centered apertures are supported");
  if (!(ap.height > 0.0)) throw std::invalid_argument("collected_fraction: height must be positive");
  if (ap.length <= 0.0 || ap.width <= 0.0) return 0.0;
  // Angles u (along x) and v (along y) as seen from the ion; dOmega = cos v du dv.
  const double h = ap.height;
  const double u_max = std::atan(ap.length / 2 / h);
  auto strip = [&](double u) {
    const double rho = h / std::cos(u);
    const double v_max = std::atan(ap.width / 2 / rho);
    auto inner = [&](double v) {
      const double cv = std::cos(v);
      return cv * dipole_intensity(t, {std::sin(u) * cv, std::sin(v), -std::cos(u) * cv});
    };
    return integrate(inner, -v_max, v_max, rel_tol);
  };
  return integrate(strip, -u_max, u_max, rel_tol);
}

ChannelBalance channel_balance(const ApertureSpec& aperture, double pi_weight, double sigma_weight) {
  if (pi_weight < 0.0 || sigma_weight < 0.0 || std::abs(pi_weight + sigma_weight - 1.0) > 1e-12)
    throw std::invalid_argument("channel_balance: branching weights must be non-negative and sum to 1");
  CollectionChannel pi{{TransitionKind::Pi, Eigen::Vector3d::UnitY()}, aperture, pi_weight};
  CollectionChannel sigma{{TransitionKind::Sigma, Eigen::Vector3d::UnitY()}, aperture, sigma_weight};
  ChannelBalance out;
  out.pi_channel = pi_weight == 0.0 ? 0.0 : pi_weight * collected_fraction(pi);
  out.sigma_channel = sigma_weight == 0.0 ? 0.0 : sigma_weight * collected_fraction(sigma);
  return out;
}

double crosstalk_infidelity(const ProtocolConfig& config, double crosstalk_db, int phase_steps) {
  if (crosstalk_db > 0.0) throw std::invalid_argument("crosstalk_infidelity: cross-talk must be <= 0 dB");
  if (phase_steps < 1) throw std::invalid_argument("crosstalk_infidelity: need at least one phase step");
  ProtocolConfig base = config;
  base.kind = ProtocolKind::Polarization;
  for (auto& n : base.nodes) n.crosstalk = 0.0;
  const double reference = run_protocol(base).dominant_fidelity();
  const double chi = std::sqrt(std::pow(10.0, crosstalk_db / 10.0));
  if (chi == 0.0) return 0.0;
  double worst = 0.0;
  for (int k = 0; k < phase_steps; ++k) {
    ProtocolConfig c = base;
    c.nodes[1].crosstalk = chi;
    c.nodes[1].crosstalk_phase = 2 * kPi * k / phase_steps;
    worst = std::max(worst, reference - run_protocol(c).dominant_fidelity());
  }
  return worst;
}

double temporal_overlap(double dt, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("temporal_overlap: lifetime must be positive");
  return std::exp(-std::abs(dt) / tau);
}

}  // namespace pme
