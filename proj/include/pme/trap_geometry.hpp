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

// Five-wire surface-electrode trap geometry in the gapless-plane model:
// two RF rails of width b separated by a gap a, all other electrodes grounded.
// Lengths are in micrometers unless stated otherwise.

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <vector>

namespace pme {

inline constexpr double kInfiniteLength = std::numeric_limits<double>::infinity();

struct TrapGeometry {
  double a = 62.0;   // RF gap
  double b = 50.0;   // RF electrode width
  double h = 50.0;   // ion height
  double l = 100.0;  // grating length
  double voltage = 100.0;                 // RF amplitude [V]
  double drive_frequency = 2 * 3.141592653589793 * 30e6;  // Omega_rf [rad/s]
  double q_over_m = 1.602176634e-19 / (138 * 1.66053906660e-27);  // [C/kg]

  // Geometry whose ion height follows from (a, b).
  static TrapGeometry from_rails(double a, double b);
};

// Rectangular aperture centered below the ion. `length` runs along the trap
// axis (x), `width` across the RF gap (y). Either may be kInfiniteLength.
struct ApertureSpec {
  double length = 100.0;
  double width = 62.0;
  double height = 50.0;
  bool centered = true;
};

double ion_height(double a, double b);
double rf_gap_for_height(double h, double b);

// RF electrode width that keeps the ion at height h for gap a.
double rail_width_for_height(double h, double a);

double solid_angle_fraction(const ApertureSpec& ap);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

MonteCarloEstimate solid_angle_monte_carlo(const ApertureSpec& ap, std::int64_t n_samples, std::uint64_t seed);

// Field -grad(phi) of a strip held at `voltage` between x1 and x2 in an
// otherwise grounded plane, evaluated at (x, y) with y > 0. Units of the
// result are volts per unit of the coordinates.
Eigen::Vector2d strip_field(double x1, double x2, double voltage, double x, double y);

// Total RF field of the two rails of `geom` at (x, y) (same length unit as geom).
Eigen::Vector2d rail_field(const TrapGeometry& geom, double x, double y);

// Height of the RF null above the rail centerline, located from the field.
double rf_null_height(const TrapGeometry& geom);

// Radial secular frequency [rad/s] from the pseudopotential curvature.
double radial_frequency(const TrapGeometry& geom);

struct TradeoffRow {
  double a = 0.0;
  double b = 0.0;
  double omega_r = 0.0;
  double normalized_omega_r = 0.0;
  double exposure = 0.0;
};

// Sweep along the fixed-height constraint curve. `normalized_omega_r` is
// relative to the largest value in the grid.
std::vector<TradeoffRow> exposure_strength_tradeoff(double h, double l, const std::vector<double>& a_grid,
                                                    const TrapGeometry& drive = {});

// Gap that maximizes the radial frequency on the fixed-height constraint curve.
double strength_optimal_gap(double h, const TrapGeometry& drive = {});

}  // namespace pme
