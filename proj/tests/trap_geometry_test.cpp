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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pme/errors.hpp"

namespace pme {
namespace {

TEST(IonHeight, Examples) {
  EXPECT_NEAR(ion_height(61.80, 50), 50.0, 0.05);
  EXPECT_NEAR(ion_height(41, 100), 49.7, 0.1);
  EXPECT_NEAR(ion_height(100, 1e-12), 50.0, 1e-9);
  EXPECT_THROW(ion_height(0, 50), std::invalid_argument);
  EXPECT_THROW(ion_height(50, -1), std::invalid_argument);
}

TEST(RfGap, ExamplesAndRoundTrip) {
  EXPECT_NEAR(rf_gap_for_height(50, 50), 61.80, 0.01);
  EXPECT_NEAR(rf_gap_for_height(50, 100), 41.4, 0.1);
  EXPECT_LT(rf_gap_for_height(50, 1e9), 1e-5);
  EXPECT_THROW(rf_gap_for_height(-1, 50), std::invalid_argument);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.0, 200.0);
  for (int i = 0; i < 50; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_NEAR(rf_gap_for_height(ion_height(a, b), b) / a, 1.0, 1e-9);
    const double h = ion_height(a, b);
    EXPECT_NEAR(rail_width_for_height(h, a) / b, 1.0, 1e-9);
  }
  EXPECT_THROW(rail_width_for_height(50, 100), std::invalid_argument);
}

TEST(SolidAngle, Examples) {
  EXPECT_NEAR(solid_angle_fraction({100, 62, 50, true}), 0.122, 0.001);
  EXPECT_DOUBLE_EQ(solid_angle_fraction({kInfiniteLength, 100, 50, true}), 0.25);
  EXPECT_EQ(solid_angle_fraction({0, 62, 50, true}), 0.0);
  EXPECT_DOUBLE_EQ(solid_angle_fraction({kInfiniteLength, kInfiniteLength, 50, true}), 0.5);
  EXPECT_THROW(solid_angle_fraction({100, 62, 50, false}), std::invalid_argument);
}

TEST(SolidAngle, MonotoneAndSymmetric) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1.0, 300.0);
  for (int i = 0; i < 100; ++i) {
    const double l = u(rng), a = u(rng), h = u(rng);
    const double f = solid_angle_fraction({l, a, h, true});
    EXPECT_GT(f, 0.0);
    EXPECT_LT(f, 0.5);
    EXPECT_GT(solid_angle_fraction({l * 1.01, a, h, true}), f);
    EXPECT_GT(solid_angle_fraction({l, a * 1.01, h, true}), f);
    EXPECT_LT(solid_angle_fraction({l, a, h * 1.01, true}), f);
    EXPECT_DOUBLE_EQ(solid_angle_fraction({a, l, h, true}), f);
  }
}

TEST(SolidAngleMonteCarlo, Examples) {
  const ApertureSpec nominal{100, 62, 50, true};
  const auto mc = solid_angle_monte_carlo(nominal, 1000000, 11);
  EXPECT_NEAR(mc.estimate, solid_angle_fraction(nominal), 3 * mc.std_error);
  EXPECT_NEAR(mc.estimate, 0.122, 3 * mc.std_error + 0.001);
  const auto half = solid_angle_monte_carlo({kInfiniteLength, kInfiniteLength, 50, true}, 10000, 3);
  EXPECT_NEAR(half.estimate, 0.5, 3 * half.std_error + 1e-15);
  EXPECT_EQ(solid_angle_monte_carlo({0, 62, 50, true}, 10000, 3).estimate, 0.0);
}

TEST(SolidAngleMonteCarlo, AgreesOnRandomGeometries) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(5.0, 200.0);
  int outside = 0;
  for (int i = 0; i < 20; ++i) {
    const ApertureSpec ap{u(rng), u(rng), u(rng), true};
    const auto mc = solid_angle_monte_carlo(ap, 200000, 100 + i);
    if (std::abs(mc.estimate - solid_angle_fraction(ap)) > 3 * mc.std_error) ++outside;
  }
  // 3 sigma: expect 0.05 excursions out of 20 on average
  EXPECT_LE(outside, 1);
}

TEST(SolidAngleMonteCarlo, SeedDeterminism) {
  const ApertureSpec ap{100, 62, 50, true};
  const auto a = solid_angle_monte_carlo(ap, 20000, 9);
  const auto b = solid_angle_monte_carlo(ap, 20000, 9);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
}

// Potential of a strip at voltage V in a grounded plane.
double strip_potential(double x1, double x2, double v, double x, double y) {
  return v / std::numbers::pi * (std::atan((x2 - x) / y) - std::atan((x1 - x) / y));
}

TEST(StripField, MatchesNumericalGradientOfPotential) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 50; ++i) {
    const double x1 = u(rng), x2 = x1 + 1 + std::abs(u(rng));
    const double x = u(rng), y = 1 + std::abs(u(rng));
    const double d = 1e-5 * y;
    const double ex = -(strip_potential(x1, x2, 7, x + d, y) - strip_potential(x1, x2, 7, x - d, y)) / (2 * d);
    const double ey = -(strip_potential(x1, x2, 7, x, y + d) - strip_potential(x1, x2, 7, x, y - d)) / (2 * d);
    const Eigen::Vector2d e = strip_field(x1, x2, 7, x, y);
    const double scale = 7 / y;
    EXPECT_NEAR(e(0), ex, 1e-6 * scale);
    EXPECT_NEAR(e(1), ey, 1e-6 * scale);
  }
}

TEST(StripField, SymmetryFarFieldAndNull) {
  EXPECT_NEAR(strip_field(-10, 10, 1, 0, 5)(0), 0.0, 1e-15);
  EXPECT_LT(strip_field(-10, 10, 1, 0, 1e8).norm(), 1e-12);
  EXPECT_THROW(strip_field(-10, 10, 1, 0, 0), std::invalid_argument);
  const auto g = TrapGeometry::from_rails(62, 50);
  const Eigen::Vector2d e = rail_field(g, 0, ion_height(62, 50));
  EXPECT_LT(e.norm(), 1e-9 * g.voltage / g.h);
}

TEST(RfNull, MatchesIonHeightOnRandomRails) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(5.0, 200.0);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng), b = u(rng);
    const auto g = TrapGeometry::from_rails(a, b);
    EXPECT_NEAR(rf_null_height(g) / ion_height(a, b), 1.0, 1e-3) << "a " << a << " b " << b;
  }
}

TEST(RadialFrequency, LinearInVoltage) {
  auto g = TrapGeometry::from_rails(62, 50);
  const double w = radial_frequency(g);
  EXPECT_GT(w, 0.0);
  g.voltage *= 2;
  EXPECT_NEAR(radial_frequency(g) / w, 2.0, 1e-6);
}

TEST(RadialFrequency, StrengthOptimumOnFixedHeightCurve) {
  const double a = strength_optimal_gap(50);
  EXPECT_NEAR(a, 41, 2);
  EXPECT_NEAR(rail_width_for_height(50, a), 100, 5);
}

std::vector<double> grid(double from, double to, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(from + (to - from) * i / (n - 1));
  return g;
}

TEST(Tradeoff, ShapeOfBothCurves) {
  const auto rows = exposure_strength_tradeoff(50, 100, grid(1, 99, 99));
  const auto peak = std::max_element(rows.begin(), rows.end(),
                                     [](const auto& x, const auto& y) { return x.omega_r < y.omega_r; });
  EXPECT_NEAR(peak->a, 41, 2);
  EXPECT_DOUBLE_EQ(peak->normalized_omega_r, 1.0);
  int turns = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].exposure, rows[i - 1].exposure);
    const bool rising = rows[i].omega_r > rows[i - 1].omega_r;
    if (i > 1 && rising != (rows[i - 1].omega_r > rows[i - 2].omega_r)) ++turns;
  }
  EXPECT_EQ(turns, 1);  // exactly one interior maximum
  EXPECT_LT(rows.back().normalized_omega_r, 0.05);
  EXPECT_LT(rows.front().normalized_omega_r, 0.2);
  EXPECT_LT(rows.front().exposure, 0.01);
}

TEST(Tradeoff, Examples) {
  const auto at62 = exposure_strength_tradeoff(50, 100, {62});
  EXPECT_NEAR(at62[0].exposure, 0.122, 0.001);
  const double a = strength_optimal_gap(50);
  EXPECT_NEAR(solid_angle_fraction({kInfiniteLength, a, 50, true}), 0.125, 0.003);
  EXPECT_THROW(exposure_strength_tradeoff(50, 100, {100}), std::invalid_argument);
}

}  // namespace
}  // namespace pme
