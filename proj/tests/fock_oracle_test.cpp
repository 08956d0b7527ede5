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

#include <gtest/gtest.h>

#include <random>

#include "oracle/random_circuit.hpp"
#include "random_states.hpp"

namespace pme {
namespace {

using oracle::Circuit;
using oracle::Mat;
using oracle::TensorFock;

class OracleCircuits : public ::testing::TestWithParam<int> {};

TEST_P(OracleCircuits, EngineMatchesTensorProductReference) {
  const int num_modes = GetParam();
  std::mt19937_64 rng(1000 + num_modes);
  std::uniform_int_distribution<int> depth(1, 6);
  const auto modes = testing::make_modes(num_modes);
  const TensorFock space(num_modes);
  for (int trial = 0; trial < 12; ++trial) {
    const JointState<double> start = testing::random_state(rng, modes);
    ASSERT_EQ(start.basis().modes(), modes);
    Circuit c{start, oracle::to_tensor(space, start)};
    const int n = depth(rng);
    for (int k = 0; k < n; ++k) oracle::random_step(c, space, modes, rng);
    const Mat expected = oracle::from_tensor(space, c.engine.basis(), c.tensor);
    EXPECT_LT(oracle::leakage_outside_sector(space, c.tensor), 1e-12);
    EXPECT_LT((c.engine.matrix() - expected).cwiseAbs().maxCoeff(), tol::kOracle)
        << "modes " << num_modes << " trial " << trial << " depth " << n;
  }
}

INSTANTIATE_TEST_SUITE_P(ModeCounts, OracleCircuits, ::testing::Values(2, 3, 4));

TEST(Oracle, DetectionAgreesWithProjectorSum) {
  std::mt19937_64 rng(31337);
  const auto modes = testing::make_modes(3);
  const TensorFock space(3);
  const JointState<double> s = testing::random_state(rng, modes);
  const Mat rho = oracle::to_tensor(space, s);
  const double eta = 0.6;
  const auto out = detect(s, {DetectorSpec{0, {modes[0], modes[2]}, eta}});
  // P(click) = sum over configurations of (1 - (1 - eta)^(n0 + n2)) rho_cc
  double click = 0;
  for (Eigen::Index ion = 0; ion < 4; ++ion)
    for (int n0 = 0; n0 < oracle::kCut; ++n0)
      for (int n1 = 0; n1 < oracle::kCut; ++n1)
        for (int n2 = 0; n2 < oracle::kCut; ++n2) {
          const Eigen::Index i = space.index(ion, Occupation{static_cast<std::uint8_t>(n0),
                                                             static_cast<std::uint8_t>(n1),
                                                             static_cast<std::uint8_t>(n2)});
          click += (1 - std::pow(1 - eta, n0 + n2)) * rho(i, i).real();
        }
  EXPECT_NEAR(out[1].probability, click, tol::kOracle);
}

}  // namespace
}  // namespace pme
