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

// Acceptance checks 1-12. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracle/random_circuit.hpp"
#include "pme/emission.hpp"
#include "pme/fock.hpp"
#include "pme/photonic_design.hpp"
#include "pme/protocols.hpp"
#include "pme/trap_geometry.hpp"
#include "random_states.hpp"

namespace {

using namespace pme;

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!ok || detail.empty()) {
      if (!detail.empty()) detail += "; ";
      detail += (ok ? "" : "FAILED ") + what;
    }
  }
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ProtocolConfig with_epsilon(ProtocolKind kind, double p_e, double eps) {
  ProtocolConfig c;
  c.kind = kind;
  for (auto& n : c.nodes) {
    n.excitation_probability = p_e;
    n.solid_angle_fraction = eps;
  }
  return c;
}

Verdict geometry_golden() {
  Verdict v;
  const double nominal = solid_angle_fraction({100, 62, 50, true});
  const double bound = solid_angle_fraction({kInfiniteLength, 100, 50, true});
  const double a_opt = strength_optimal_gap(50);
  const double optimal = solid_angle_fraction({kInfiniteLength, a_opt, 50, true});
  v.check(std::abs(nominal - 0.122) <= 0.001, "exposure(l=100,a=62,h=50) = " + num(nominal));
  v.check(bound == 0.25, "exposure(l=inf,a=2h) = " + num(bound, 17));
  v.check(std::abs(optimal - 0.125) <= 0.003, "strength-optimal strip exposure = " + num(optimal));
  v.detail = "exposure " + num(nominal) + ", bound " + num(bound, 17) + ", optimal-strip " + num(optimal) +
             (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict trap_strength() {
  Verdict v;
  std::vector<double> grid;
  for (double a = 5; a <= 99; a += 0.5) grid.push_back(a);
  const auto rows = exposure_strength_tradeoff(50, 100, grid);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].omega_r > rows[peak].omega_r) peak = i;
  bool monotone = true;
  for (std::size_t i = peak + 1; i < rows.size(); ++i) monotone = monotone && rows[i].omega_r < rows[i - 1].omega_r;
  const double tail = rows.back().normalized_omega_r;
  v.check(std::abs(rows[peak].a - 41) <= 2, "argmax a = " + num(rows[peak].a));
  v.check(std::abs(rows[peak].b - 100) <= 5, "b at argmax = " + num(rows[peak].b));
  v.check(monotone, "omega_r decreasing past the peak");
  v.check(tail < 0.05, "omega_r(99)/max = " + num(tail));
  v.detail = "argmax a = " + num(rows[peak].a) + " um, b = " + num(rows[peak].b) + " um, omega_r(99)/max = " +
             num(tail, 3) + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict herald_probabilities() {
  Verdict v;
  double worst = 0.0;
  for (double eps : {0.001, 0.005, 0.01, 0.02}) {
    for (double p_e : {0.01, 0.02, 0.05}) {
      const auto c = with_epsilon(ProtocolKind::Number, p_e, eps);
      const double r = rel(run_protocol(c).total_success, 2 * p_e * eps);
      worst = std::max(worst, r);
      if (r > 0.05) v.check(false, "number p_e=" + num(p_e) + " eps=" + num(eps) + " rel " + num(r));
    }
    for (ProtocolKind k : {ProtocolKind::TimeBin, ProtocolKind::Polarization, ProtocolKind::Frequency}) {
      for (double gamma : {1.0, 0.94}) {
        auto c = with_epsilon(k, 1.0, eps);
        for (auto& n : c.nodes) n.branching_ratio = gamma;
        const double x = gamma * eps;
        const double r = rel(run_protocol(c).total_success, 0.5 * x * x);
        worst = std::max(worst, r);
        if (r > 0.05) v.check(false, to_string(k) + " eps=" + num(eps) + " rel " + num(r));
      }
    }
  }
  double ratio_err = 0.0;
  for (ProtocolKind k : {ProtocolKind::Polarization, ProtocolKind::Frequency}) {
    for (double eps : {0.001, 0.01, 0.02}) {
      auto c = with_epsilon(k, 1.0, eps);
      const double enhanced = run_protocol(c).total_success;
      c.enhanced_analyzer = false;
      ratio_err = std::max(ratio_err, std::abs(enhanced / run_protocol(c).total_success - 2.0));
    }
  }
  v.check(ratio_err <= 1e-9, "enhanced/plain ratio error " + num(ratio_err));
  v.detail = "max rel deviation " + num(worst, 3) + ", enhanced/plain ratio error " + num(ratio_err, 3) +
             (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict fidelity_ceiling() {
  Verdict v;
  std::string values;
  for (double p_e : {0.02, 0.05, 0.1}) {
    const double f = run_protocol(with_epsilon(ProtocolKind::Number, p_e, 0.001)).mean_fidelity;
    v.check(std::abs(f - (1 - p_e)) <= 0.01, "p_e=" + num(p_e) + " F=" + num(f));
    values += (values.empty() ? "" : ", ") + ("F(" + num(p_e) + ") = " + num(f, 5));
  }
  v.detail = values + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict hom_and_oracle() {
  Verdict v;
  const ModeLabel a{0, Channel::Path, Match::Matched};
  const ModeLabel b{1, Channel::Path, Match::Matched};
  const auto two = make_state<double>({{BasisKet{IonLevel::Down, IonLevel::Down, {{a, 1}, {b, 1}}}, {1.0, 0.0}}});
  const auto out =
      detect(apply_beamsplitter(two, {a, b, 0.5, 0.0}), {DetectorSpec{0, {a}, 1.0}, DetectorSpec{1, {b}, 1.0}});
  const double coincidence = out[0b11].probability;
  v.check(coincidence <= 1e-12, "HOM coincidence " + num(coincidence));

  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> depth(1, 6);
  double worst = 0.0;
  int circuits = 0;
  for (int num_modes : {2, 3}) {
    const auto modes = testing::make_modes(num_modes);
    for (int i = 0; i < 50; ++i, ++circuits)
      worst = std::max(worst, oracle::random_circuit_deviation(testing::random_state(rng, modes), depth(rng), rng));
  }
  v.check(worst <= 1e-9, "oracle deviation " + num(worst));
  v.detail = "coincidence " + num(coincidence, 3) + ", " + std::to_string(circuits) +
             " circuits max deviation " + num(worst, 3) + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict splitter_imbalance() {
  Verdict v;
  const auto c = with_epsilon(ProtocolKind::Number, 0.01, 0.01);
  const double i51 = splitter_imbalance_infidelity(c, 0.51);
  const double i52 = splitter_imbalance_infidelity(c, 0.52);
  const double ratio = i52 / i51;
  v.check(i51 > 0 && i51 <= 4e-4, "infidelity(0.51) = " + num(i51));
  v.check(std::abs(ratio - 4) <= 0.4, "ratio = " + num(ratio));
  v.detail = "infidelity(T=0.51) = " + num(i51, 3) + ", ratio(0.52/0.51) = " + num(ratio, 5) +
             (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict crosstalk_bracket() {
  Verdict v;
  const auto c = with_epsilon(ProtocolKind::Polarization, 1.0, 0.01);
  const double low = crosstalk_infidelity(c, -22);
  const double high = crosstalk_infidelity(c, -5);
  v.check(low < 0.01, "-22 dB infidelity " + num(low));
  v.check(std::abs(high - 0.30) <= 0.15, "-5 dB infidelity " + num(high));
  v.detail = "-22 dB: " + num(low, 4) + ", -5 dB: " + num(high, 4) + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict rate_comparison() {
  Verdict v;
  double worst_formula = 0.0, worst_engine = 0.0;
  for (double p_e : {0.01, 0.05}) {
    for (double eps : {0.005, 0.01, 0.02}) {
      const double formula = rate_ratio_number_vs_two_photon(p_e, eps, 1.0);
      worst_formula = std::max(worst_formula, rel(formula, 4 * p_e / eps));
      const double number = run_protocol(with_epsilon(ProtocolKind::Number, p_e, eps)).total_success;
      const double two = run_protocol(with_epsilon(ProtocolKind::Polarization, 1.0, eps)).total_success;
      worst_engine = std::max(worst_engine, rel(number / two, formula));
    }
  }
  v.check(worst_formula <= 1e-15, "formula deviation " + num(worst_formula));
  v.check(worst_engine <= 0.05, "engine ratio deviation " + num(worst_engine));
  v.detail = "formula rel error " + num(worst_formula, 3) + ", engine ratio rel error " + num(worst_engine, 3) +
             (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict phase_stability() {
  Verdict v;
  const auto num_cfg = with_epsilon(ProtocolKind::Number, 0.01, 0.01);
  const double f_num = phase_jitter_fidelity(num_cfg, 10 * num_cfg.wavelength);
  auto tb = with_epsilon(ProtocolKind::TimeBin, 1.0, 0.01);
  tb.frequency_splitting = 10e9;
  const double penalty = run_protocol(tb).mean_fidelity - phase_jitter_fidelity(tb, 10 * tb.wavelength);
  v.check(std::abs(f_num - 0.5) <= 0.02, "number averaged F " + num(f_num));
  v.check(penalty <= 1e-6, "time-bin penalty " + num(penalty));
  v.detail = "number F = " + num(f_num, 5) + ", time-bin penalty = " + num(penalty, 3) +
             (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict mode_overlap() {
  Verdict v;
  std::string values;
  for (ProtocolKind k : {ProtocolKind::TimeBin, ProtocolKind::Polarization, ProtocolKind::Frequency}) {
    auto c = with_epsilon(k, 1.0, 0.01);
    const double ideal = run_protocol(c).mean_fidelity;
    c.mode_overlap = 0.99;
    const double infidelity = ideal - run_protocol(c).mean_fidelity;
    v.check(infidelity > 0 && infidelity <= 0.015, to_string(k) + " infidelity " + num(infidelity));
    values += (values.empty() ? "" : ", ") + to_string(k) + " " + num(infidelity, 3);
  }
  v.detail = "infidelity at M=0.99: " + values + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict loss_balancing() {
  Verdict v;
  const double eps1 = 0.01;
  double worst = 0.0, worst_unbalanced = 0.0;
  for (double p_e1 : {0.01, 0.02}) {
    for (double r : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      const double eps2 = eps1 / r;
      const double p_e2 = balance_excitation(p_e1, eps1, eps2);
      auto c = with_epsilon(ProtocolKind::Number, p_e1, eps1);
      c.nodes[1].solid_angle_fraction = eps2;
      const double unbalanced = run_protocol(c).mean_fidelity;
      c.nodes[1].excitation_probability = p_e2;
      const double balanced = run_protocol(c).mean_fidelity;
      const double reference =
          run_protocol(with_epsilon(ProtocolKind::Number, 0.5 * (p_e1 + p_e2), eps1)).mean_fidelity;
      worst = std::max(worst, std::abs(balanced - reference));
      worst_unbalanced = std::max(worst_unbalanced, std::abs(unbalanced - reference));
      if (std::abs(balanced - reference) > 1e-3)
        v.check(false, "p_e1=" + num(p_e1) + " r=" + num(r) + " diff " + num(balanced - reference));
    }
  }
  v.detail = "max |F_balanced - F_ref| = " + num(worst, 3) + " (before balancing up to " + num(worst_unbalanced, 3) +
             ")" + (v.pass ? "" : " | " + v.detail);
  return v;
}

Verdict grating_chirp() {
  Verdict v;
  double worst = 0.0;
  std::size_t teeth_checked = 0;
  std::vector<Tooth> default_teeth;
  for (double h : {20.0, 50.0, 200.0}) {
    GratingSpec spec;
    spec.height_um = h;
    const auto teeth = tooth_positions(spec);
    if (h == 50.0) default_teeth = teeth;
    for (const auto& t : teeth) worst = std::max(worst, std::abs(t.residual_nm) / spec.wavelength_nm);
    teeth_checked += teeth.size();
  }
  v.check(worst <= 1e-6, "max residual / lambda0 = " + num(worst));
  const double backward = pitch_for_angle(493, 1.6, -30 * std::numbers::pi / 180);
  v.check(backward < 240, "pitch(-30 deg) = " + num(backward));
  // the tooth pair emitting closest to -30 degrees must be flagged
  std::size_t nearest = 0;
  for (std::size_t i = 0; i + 1 < default_teeth.size(); ++i)
    if (std::abs(default_teeth[i].angle_deg + 30) < std::abs(default_teeth[nearest].angle_deg + 30)) nearest = i;
  bool flagged = false;
  for (const auto& viol : fabrication_lint(default_teeth, 240))
    flagged = flagged || static_cast<std::size_t>(viol.first) == nearest;
  v.check(flagged, "lint flags the -30 deg section");
  v.detail = std::to_string(teeth_checked) + " teeth, max residual/lambda0 " + num(worst, 3) +
             ", pitch(-30 deg) = " + num(backward, 5) + " nm, local pitch at " +
             num(default_teeth[nearest].angle_deg, 4) + " deg = " + num(default_teeth[nearest].pitch_nm, 5) +
             " nm flagged" + (v.pass ? "" : " | " + v.detail);
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime limit
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "geometry golden values", 1.0, geometry_golden},
      {2, "trap-strength optimum", 10.0, trap_strength},
      {3, "herald probabilities", 30.0, herald_probabilities},
      {4, "number-protocol fidelity ceiling", 0.0, fidelity_ceiling},
      {5, "HOM dip and oracle agreement", 0.0, hom_and_oracle},
      {6, "splitter imbalance", 0.0, splitter_imbalance},
      {7, "cross-talk bracket", 0.0, crosstalk_bracket},
      {8, "rate comparison", 0.0, rate_comparison},
      {9, "phase-stability contrast", 0.0, phase_stability},
      {10, "mode overlap", 0.0, mode_overlap},
      {11, "differential-loss balancing", 0.0, loss_balancing},
      {12, "grating chirp", 0.0, grating_chirp},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && seconds >= c.budget_s) {
      v.pass = false;
      v.detail += " | runtime " + num(seconds, 3) + " s exceeds " + num(c.budget_s) + " s";
    }
    if (!v.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), seconds);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
