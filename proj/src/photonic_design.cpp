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

#include "pme/photonic_design.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "pme/errors.hpp"

namespace pme {
namespace {

// Guided optical path from the ion's foot to x, in micrometers.
double guided_path(const GratingSpec& spec, double x) {
  if (!spec.n_eff_profile) return spec.n_eff * (x - spec.x_ion_um);
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(spec.n_eff_profile, spec.x_ion_um, x, 15,
                                                                      1e-13);
}

double free_path(const GratingSpec& spec, double x) { return std::hypot(x - spec.x_ion_um, spec.height_um); }

void check_spec(const GratingSpec& spec) {
  if (!(spec.wavelength_nm > 0.0)) throw std::invalid_argument("grating: wavelength must be positive");
  if (!(spec.n_eff > 1.0)) throw std::invalid_argument("grating: effective index must exceed 1");
  if (!(spec.height_um > 0.0)) throw std::invalid_argument("grating: ion height must be positive");
  if (!(spec.x_max_um > spec.x_min_um)) throw std::invalid_argument("grating: span is degenerate");
  if (!(spec.min_pitch_nm > 0.0)) throw std::invalid_argument("grating: minimum pitch must be positive");
  if (spec.order < 1) throw std::invalid_argument("grating: diffraction order must be >= 1");
}

}  // namespace

double pitch_for_angle(double wavelength_nm, double n_eff, double theta, int order) {
  const double denom = n_eff - std::sin(theta);
  if (!(denom > 0.0) || !std::isfinite(denom) || order < 1)
    throw std::domain_error("pitch_for_angle: no propagating diffraction order for this angle");
  return order * wavelength_nm / denom;
}

double pitch_for_angle(const GratingSpec& spec, double theta) {
  return pitch_for_angle(spec.wavelength_nm, spec.n_eff, theta, spec.order);
}

std::vector<Tooth> tooth_positions(const GratingSpec& spec) {
  check_spec(spec);
  const double lambda_um = spec.order * spec.wavelength_nm * 1e-3;
  const double c = spec.height_um - 0.5 * lambda_um;
  auto path = [&](double x) { return guided_path(spec, x) + free_path(spec, x) - c; };
  const double lo = path(spec.x_min_um) / lambda_um;
  const double hi = path(spec.x_max_um) / lambda_um;
  const int m_first = static_cast<int>(std::ceil(lo));
  const int m_last = static_cast<int>(std::floor(hi));
  if (m_last < m_first) throw std::invalid_argument("tooth_positions: no tooth falls inside the span");

  std::vector<Tooth> teeth;
  teeth.reserve(static_cast<std::size_t>(m_last - m_first + 1));
  double left = spec.x_min_um;
  for (int m = m_first; m <= m_last; ++m) {
    auto f = [&](double x) { return path(x) - m * lambda_um; };
    double x;
    if (f(left) == 0.0) {
      x = left;
    } else if (f(spec.x_max_um) == 0.0) {
      x = spec.x_max_um;
    } else {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(f, left, spec.x_max_um,
                                                       boost::math::tools::eps_tolerance<double>(50), iters);
      x = 0.5 * (r.first + r.second);
    }
    Tooth t;
    t.index = m;
    t.x_um = x;
    t.residual_nm = f(x) * 1e3;
    if (std::abs(t.residual_nm) > 1e-6 * spec.wavelength_nm)
      throw NumericalError("tooth_positions: constant-path root did not converge");
    teeth.push_back(t);
    left = x;
  }
  for (std::size_t k = 0; k < teeth.size(); ++k) {
    if (teeth.size() < 2) break;
    const std::size_t i = k + 1 < teeth.size() ? k : k - 1;
    const double x0 = teeth[i].x_um;
    const double x1 = teeth[i + 1].x_um;
    const double mid = 0.5 * (x0 + x1);
    teeth[k].pitch_nm = (x1 - x0) * 1e3;
    teeth[k].angle_deg = std::asin((spec.x_ion_um - mid) / free_path(spec, mid)) * 180.0 / std::numbers::pi;
  }
  return teeth;
}

std::vector<PitchViolation> fabrication_lint(const std::vector<Tooth>& teeth, double min_pitch_nm) {
  std::vector<PitchViolation> out;
  for (std::size_t k = 0; k + 1 < teeth.size(); ++k) {
    const double pitch = (teeth[k + 1].x_um - teeth[k].x_um) * 1e3;
    if (pitch < min_pitch_nm) out.push_back({static_cast<int>(k), pitch});
  }
  return out;
}

double adiabatic_length_scale(double delta_ref, double length_ref, double delta_target) {
  if (!(delta_ref > 0.0 && delta_ref < 1.0) || !(delta_target > 0.0 && delta_target < 1.0))
    throw std::invalid_argument("adiabatic_length_scale: delta must lie in (0, 1)");
  if (!(length_ref > 0.0)) throw std::invalid_argument("adiabatic_length_scale: reference length must be positive");
  return length_ref * std::sqrt(delta_ref / delta_target);
}

void write_tooth_csv(std::ostream& out, const std::vector<Tooth>& teeth, double min_pitch_nm) {
  out << "index,x_um,pitch_nm,angle_deg,fabricable\n";
  char buf[160];
  for (const auto& t : teeth) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", t.index, t.x_um, t.pitch_nm, t.angle_deg,
                  t.pitch_nm >= min_pitch_nm ? 1 : 0);
    out << buf;
  }
}

}  // namespace pme
