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

#include "pme/trap_geometry.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pme/errors.hpp"

namespace pme {
namespace {

constexpr double kMicron = 1e-6;

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

double field_norm2(const TrapGeometry& g, double x, double y) { return rail_field(g, x, y).squaredNorm(); }

double omega_at_step(const TrapGeometry& g, double y0, double s) {
  auto f = [&](double x, double y) { return field_norm2(g, x, y); };
  Eigen::Matrix2d hess;
  const double f0 = f(0.0, y0);
  hess(0, 0) = (f(s, y0) - 2 * f0 + f(-s, y0)) / (s * s);
  hess(1, 1) = (f(0.0, y0 + s) - 2 * f0 + f(0.0, y0 - s)) / (s * s);
  hess(0, 1) = hess(1, 0) =
      (f(s, y0 + s) - f(s, y0 - s) - f(-s, y0 + s) + f(-s, y0 - s)) / (4 * s * s);
  // Psi / m = (q/m)^2 |E|^2 / (4 Omega^2); geometry in micrometers, field in V/um
  const double scale = g.q_over_m * g.q_over_m / (4 * g.drive_frequency * g.drive_frequency) /
                       (kMicron * kMicron) / (kMicron * kMicron);
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(hess).eigenvalues();
  if (!(ev.maxCoeff() > 0.0)) throw NumericalError("radial_frequency: pseudopotential is not confining");
  return std::sqrt(scale * ev.maxCoeff());
}

}  // namespace

TrapGeometry TrapGeometry::from_rails(double a, double b) {
  TrapGeometry g;
  g.a = a;
  g.b = b;
  g.h = ion_height(a, b);
  return g;
}

double ion_height(double a, double b) {
  require_positive(a, "ion_height: gap a");
  require_positive(b, "ion_height: rail width b");
  return std::sqrt(a * (a + 2 * b)) / 2;
}

double rf_gap_for_height(double h, double b) {
  require_positive(h, "rf_gap_for_height: height h");
  require_positive(b, "rf_gap_for_height: rail width b");
  return std::sqrt(b * b + 4 * h * h) - b;
}

double rail_width_for_height(double h, double a) {
  require_positive(h, "rail_width_for_height: height h");
  require_positive(a, "rail_width_for_height: gap a");
  if (!(a < 2 * h)) throw std::invalid_argument("rail_width_for_height: gap must be below 2h");
  return (4 * h * h - a * a) / (2 * a);
}

double solid_angle_fraction(const ApertureSpec& ap) {
  if (!ap.centered) throw std::invalid_argument("solid_angle_fraction: only centered apertures are supported");
  require_positive(ap.height, "solid_angle_fraction: height");
  if (ap.length < 0.0 || ap.width < 0.0) throw std::invalid_argument("solid_angle_fraction: negative extent");
  if (ap.length == 0.0 || ap.width == 0.0) return 0.0;
  const double h = ap.height;
  const double al = ap.length / 2;
  const double be = ap.width / 2;
  double omega;
  if (std::isinf(al) && std::isinf(be)) {
    omega = 2 * std::numbers::pi;
  } else if (std::isinf(al)) {
    omega = 4 * std::atan(be / h);
  } else if (std::isinf(be)) {
    omega = 4 * std::atan(al / h);
  } else {
    omega = 4 * std::atan(al * be / (h * std::sqrt(al * al + be * be + h * h)));
  }
  return omega / (4 * std::numbers::pi);
}

MonteCarloEstimate solid_angle_monte_carlo(const ApertureSpec& ap, std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("solid_angle_monte_carlo: need at least one sample");
  require_positive(ap.height, "solid_angle_monte_carlo: height");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double al = ap.length / 2;
  const double be = ap.width / 2;
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    // uniform on the lower hemisphere: cos(polar) uniform in (0, 1]
    const double c = 1.0 - u01(rng);
    const double phi = 2 * std::numbers::pi * u01(rng);
    const double s = std::sqrt(std::max(0.0, 1 - c * c));
    const double t = ap.height / c;
    if (std::abs(t * s * std::cos(phi)) < al && std::abs(t * s * std::sin(phi)) < be) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  return {0.5 * p, 0.5 * std::sqrt(p * (1 - p) / static_cast<double>(n_samples))};
}

Eigen::Vector2d strip_field(double x1, double x2, double voltage, double x, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("strip_field: y must be positive");
  const double d1 = x1 - x;
  const double d2 = x2 - x;
  const double r1 = y * y + d1 * d1;
  const double r2 = y * y + d2 * d2;
  const double k = voltage / std::numbers::pi;
  const double dphi_dx = k * (-y / r2 + y / r1);
  const double dphi_dy = k * (-d2 / r2 + d1 / r1);
  return {-dphi_dx, -dphi_dy};
}

Eigen::Vector2d rail_field(const TrapGeometry& g, double x, double y) {
  const double inner = g.a / 2;
  const double outer = g.a / 2 + g.b;
  return strip_field(inner, outer, g.voltage, x, y) + strip_field(-outer, -inner, g.voltage, x, y);
}

double rf_null_height(const TrapGeometry& g) {
  require_positive(g.a, "rf_null_height: gap a");
  require_positive(g.b, "rf_null_height: rail width b");
  // On the symmetry axis E_x vanishes; E_y changes sign once at the null.
  auto ey = [&](double y) { return rail_field(g, 0.0, y)(1); };
  const double scale = g.a / 2 + g.b;
  double lo = 1e-6 * scale;
  double hi = scale;
  while (ey(lo) * ey(hi) > 0.0 && hi < 1e6 * scale) hi *= 2;
  if (ey(lo) * ey(hi) > 0.0) throw NumericalError("rf_null_height: no RF null found");
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(ey, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

double radial_frequency(const TrapGeometry& g) {
  require_positive(g.a, "radial_frequency: gap a");
  require_positive(g.b, "radial_frequency: rail width b");
  require_positive(g.drive_frequency, "radial_frequency: drive frequency");
  const double y0 = rf_null_height(g);
  const double step = y0 / 1000;
  const double w1 = omega_at_step(g, y0, step);
  const double w2 = omega_at_step(g, y0, step / 2);
  if (std::abs(w1 - w2) > 1e-3 * std::abs(w2)) throw NumericalError("radial_frequency: Hessian not converged in step");
  return w2;
}

std::vector<TradeoffRow> exposure_strength_tradeoff(double h, double l, const std::vector<double>& a_grid,
                                                    const TrapGeometry& drive) {
  require_positive(h, "exposure_strength_tradeoff: height");
  std::vector<TradeoffRow> rows;
  rows.reserve(a_grid.size());
  double best = 0.0;
  for (double a : a_grid) {
    if (!(a > 0.0 && a < 2 * h)) throw std::invalid_argument("exposure_strength_tradeoff: gap outside (0, 2h)");
    TradeoffRow row;
    row.a = a;
    row.b = rail_width_for_height(h, a);
    TrapGeometry g = drive;
    g.a = a;
    g.b = row.b;
    g.h = h;
    g.l = l;
    row.omega_r = radial_frequency(g);
    row.exposure = solid_angle_fraction({l, a, h, true});
    best = std::max(best, row.omega_r);
    rows.push_back(row);
  }
  for (auto& row : rows) row.normalized_omega_r = best > 0.0 ? row.omega_r / best : 0.0;
  return rows;
}

double strength_optimal_gap(double h, const TrapGeometry& drive) {
  require_positive(h, "strength_optimal_gap: height");
  auto neg = [&](double a) {
    TrapGeometry g = drive;
    g.a = a;
    g.b = rail_width_for_height(h, a);
    g.h = h;
    return -radial_frequency(g);
  };
  const auto r = boost::math::tools::brent_find_minima(neg, 0.05 * h, 1.95 * h, 40);
  return r.first;
}

}  // namespace pme
