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

// Exact density-operator engine over two ion qubits and a multimode Fock space
// truncated at two photons in total.
//
// Basis ordering is ion-major: index = ion * P + photon, where
// ion = 2 * level(ion1) + level(ion2) and photon enumerates occupations as
// vacuum, single photons in mode order, then pairs (i <= j) lexicographically.
// Every operation returns a new state; states are immutable values.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pme/tolerances.hpp"

namespace pme {

inline constexpr int kMaxPhotons = 2;

enum class IonLevel : std::uint8_t { Down = 0, Up = 1 };

enum class Channel : std::uint8_t {
  Path,
  TE0,
  TE1,
  FreqRed,
  FreqBlue,
  BinEarly,
  BinLate,
};

// Internal (spatio-temporal) component used to model distinguishability.
enum class Match : std::uint8_t { Matched, Orthogonal };

struct ModeLabel {
  int node = 0;
  Channel channel = Channel::Path;
  Match match = Match::Matched;

  auto operator<=>(const ModeLabel&) const = default;
};

std::string to_string(Channel channel);
std::string to_string(const ModeLabel& mode);

struct BasisKet {
  IonLevel ion1 = IonLevel::Down;
  IonLevel ion2 = IonLevel::Down;
  std::map<ModeLabel, int> occupations;
};

using Occupation = std::vector<std::uint8_t>;

class FockBasis {
 public:
  explicit FockBasis(std::vector<ModeLabel> modes);

  const std::vector<ModeLabel>& modes() const noexcept { return modes_; }
  std::size_t num_modes() const noexcept { return modes_.size(); }
  Eigen::Index photon_dim() const noexcept {
    return static_cast<Eigen::Index>(configs_.size());
  }
  Eigen::Index dim() const noexcept { return 4 * photon_dim(); }

  const Occupation& occupation(Eigen::Index photon) const {
    return configs_.at(static_cast<std::size_t>(photon));
  }
  // Throws std::out_of_range for occupations outside the truncated space.
  Eigen::Index photon_index(const Occupation& occ) const;

  std::optional<std::size_t> find_mode(const ModeLabel& mode) const;
  // Throws std::invalid_argument when the mode is not part of the basis.
  std::size_t mode_index(const ModeLabel& mode) const;

  static Eigen::Index ion_index(IonLevel ion1, IonLevel ion2) noexcept {
    return 2 * static_cast<Eigen::Index>(ion1) + static_cast<Eigen::Index>(ion2);
  }
  Eigen::Index index(Eigen::Index ion, Eigen::Index photon) const noexcept {
    return ion * photon_dim() + photon;
  }

 private:
  std::vector<ModeLabel> modes_;
  std::vector<Occupation> configs_;
  std::map<Occupation, Eigen::Index> lookup_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

// Two-qubit ion density matrix in the order |dd>, |du>, |ud>, |uu>
// (ion1 first, d = down, u = up).
template <typename Real>
using IonMatrix = Eigen::Matrix<std::complex<Real>, 4, 4>;

template <typename Real = double>
class JointState {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = CMatrix<Real>;

  JointState(BasisPtr basis, Matrix rho) : basis_(std::move(basis)), rho_(std::move(rho)) {
    if (!basis_) throw std::invalid_argument("JointState: null basis");
    if (rho_.rows() != basis_->dim() || rho_.cols() != basis_->dim())
      throw std::invalid_argument("JointState: matrix does not match basis dimension");
  }

  const FockBasis& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  const Matrix& matrix() const noexcept { return rho_; }
  Real trace() const { return rho_.trace().real(); }

 private:
  BasisPtr basis_;
  Matrix rho_;
};

template <typename Real>
struct KetTerm {
  BasisKet ket;
  std::complex<Real> amplitude;
};

// Two-mode transform a^+ -> sqrt(T) a^+ + i sqrt(1-T) e^{i phase} b^+,
// b^+ -> i sqrt(1-T) e^{-i phase} a^+ + sqrt(T) b^+.
struct BeamsplitterSpec {
  ModeLabel mode_a;
  ModeLabel mode_b;
  double transmissivity = 0.5;
  double phase = 0.0;
};

// Non-number-resolving detector. Each photon in a monitored mode fires the
// detector independently with probability `efficiency`.
struct DetectorSpec {
  int id = 0;
  std::vector<ModeLabel> modes;
  double efficiency = 1.0;
};

template <typename Real>
struct DetectionOutcome {
  std::uint32_t pattern = 0;  // bit k set: detector k clicked
  Real probability = 0;
  IonMatrix<Real> ions = IonMatrix<Real>::Zero();  // normalized when probability > 0
};

enum class BellState { PsiPlus, PsiMinus };

// Deterministic local correction on ion 1: the phase e^{i phase} on |up>,
// followed by a bit flip when `flip` is set.
struct Correction {
  double phase = 0.0;
  bool flip = false;
};

std::string to_string(BellState state);

struct StateDiagnostics {
  double hermiticity_error = 0;
  double min_eigenvalue = 0;
  double trace = 0;
  bool physical() const {
    return hermiticity_error <= tol::kHermiticity && min_eigenvalue >= -tol::kPositivity &&
           trace <= 1.0 + tol::kTrace;
  }
};

namespace detail {

inline BasisPtr make_basis(std::vector<ModeLabel> modes) {
  return std::make_shared<const FockBasis>(std::move(modes));
}

// Expands the product of creation operators sum_j s1[j] a_j^+ (and optionally
// s2) acting on vacuum into basis coefficients, accumulating into column `col` of `u`.
template <typename Real>
void accumulate_creation(const FockBasis& basis,
                         const std::vector<std::pair<std::size_t, std::complex<Real>>>& first,
                         const std::vector<std::pair<std::size_t, std::complex<Real>>>* second,
                         std::complex<Real> prefactor, CMatrix<Real>& u, Eigen::Index col) {
  const std::size_t k = basis.num_modes();
  if (second == nullptr) {
    for (const auto& [m, c] : first) {
      Occupation occ(k, 0);
      occ[m] = 1;
      u(basis.photon_index(occ), col) += prefactor * c;
    }
    return;
  }
  for (const auto& [m1, c1] : first) {
    for (const auto& [m2, c2] : *second) {
      Occupation occ(k, 0);
      ++occ[m1];
      ++occ[m2];
      // a_i^+ a_i^+ |0> = sqrt(2) |2_i>
      const Real norm = (m1 == m2) ? std::sqrt(Real(2)) : Real(1);
      u(basis.photon_index(occ), col) += prefactor * c1 * c2 * norm;
    }
  }
}

// Photon-space operator induced by the single-particle unitary `s` acting on
// the listed modes (a_{modes[k]}^+ -> sum_j s(j, k) a_{modes[j]}^+).
template <typename Real>
CMatrix<Real> passive_photon_operator(const FockBasis& basis, std::span<const std::size_t> modes,
                                      const CMatrix<Real>& s) {
  using C = std::complex<Real>;
  const Eigen::Index p = basis.photon_dim();
  const std::size_t k = basis.num_modes();
  // Image of each single creation operator.
  std::vector<std::vector<std::pair<std::size_t, C>>> image(k);
  for (std::size_t m = 0; m < k; ++m) image[m] = {{m, C(1)}};
  for (std::size_t col = 0; col < modes.size(); ++col) {
    auto& out = image[modes[col]];
    out.clear();
    for (std::size_t row = 0; row < modes.size(); ++row) {
      const C v = s(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
      if (v != C(0)) out.emplace_back(modes[row], v);
    }
  }
  CMatrix<Real> u = CMatrix<Real>::Zero(p, p);
  for (Eigen::Index c = 0; c < p; ++c) {
    const Occupation& occ = basis.occupation(c);
    std::vector<std::size_t> photons;
    for (std::size_t m = 0; m < k; ++m)
      for (int n = 0; n < occ[m]; ++n) photons.push_back(m);
    if (photons.empty()) {
      u(0, c) = C(1);
    } else if (photons.size() == 1) {
      accumulate_creation<Real>(basis, image[photons[0]], nullptr, C(1), u, c);
    } else {
      // |2_i> = (a_i^+)^2 / sqrt(2) |0>
      const Real norm = (photons[0] == photons[1]) ? Real(1) / std::sqrt(Real(2)) : Real(1);
      accumulate_creation<Real>(basis, image[photons[0]], &image[photons[1]], C(norm), u, c);
    }
  }
  return u;
}

template <typename Real>
CMatrix<Real> conjugate_blocks(const CMatrix<Real>& rho, const CMatrix<Real>& op) {
  const Eigen::Index p = op.rows();
  CMatrix<Real> out(rho.rows(), rho.cols());
  const CMatrix<Real> op_adj = op.adjoint();
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      out.block(i * p, j * p, p, p).noalias() = op * rho.block(i * p, j * p, p, p) * op_adj;
  return out;
}

template <typename Real>
CMatrix<Real> hermitize(const CMatrix<Real>& m) {
  return (m + m.adjoint()) / Real(2);
}

}  // namespace detail

template <typename Real = double>
JointState<Real> make_state(const std::vector<KetTerm<Real>>& kets,
                            std::span<const ModeLabel> extra_modes = {}) {
  using C = std::complex<Real>;
  if (kets.empty()) throw std::invalid_argument("make_state: empty ket list");
  std::vector<ModeLabel> modes(extra_modes.begin(), extra_modes.end());
  for (const auto& term : kets) {
    int total = 0;
    for (const auto& [mode, n] : term.ket.occupations) {
      if (n < 0 || n > kMaxPhotons)
        throw std::invalid_argument("make_state: occupation outside [0, 2] in mode " +
                                    to_string(mode));
      total += n;
      modes.push_back(mode);
    }
    if (total > kMaxPhotons)
      throw std::invalid_argument("make_state: more than two photons in a ket");
  }
  const BasisPtr basis = detail::make_basis(std::move(modes));
  Eigen::Matrix<C, Eigen::Dynamic, 1> psi = Eigen::Matrix<C, Eigen::Dynamic, 1>::Zero(basis->dim());
  for (const auto& term : kets) {
    Occupation occ(basis->num_modes(), 0);
    for (const auto& [mode, n] : term.ket.occupations)
      occ[basis->mode_index(mode)] = static_cast<std::uint8_t>(n);
    const Eigen::Index ion = FockBasis::ion_index(term.ket.ion1, term.ket.ion2);
    psi(basis->index(ion, basis->photon_index(occ))) += term.amplitude;
  }
  const Real norm = psi.norm();
  if (!(norm > Real(0))) throw std::invalid_argument("make_state: amplitudes are not normalizable");
  psi /= norm;
  return JointState<Real>(basis, psi * psi.adjoint());
}

// Embeds the state into a basis that additionally contains `modes`
// (new modes start in vacuum).
template <typename Real>
JointState<Real> extend_modes(const JointState<Real>& state, std::span<const ModeLabel> modes) {
  const FockBasis& old = state.basis();
  std::vector<ModeLabel> all = old.modes();
  all.insert(all.end(), modes.begin(), modes.end());
  const BasisPtr basis = detail::make_basis(std::move(all));
  if (basis->num_modes() == old.num_modes()) return state;
  std::vector<Eigen::Index> map(static_cast<std::size_t>(old.photon_dim()));
  for (Eigen::Index c = 0; c < old.photon_dim(); ++c) {
    Occupation occ(basis->num_modes(), 0);
    const Occupation& src = old.occupation(c);
    for (std::size_t m = 0; m < old.num_modes(); ++m) occ[basis->mode_index(old.modes()[m])] = src[m];
    map[static_cast<std::size_t>(c)] = basis->photon_index(occ);
  }
  CMatrix<Real> rho = CMatrix<Real>::Zero(basis->dim(), basis->dim());
  const Eigen::Index p_old = old.photon_dim();
  for (Eigen::Index i = 0; i < old.dim(); ++i) {
    const Eigen::Index ri = basis->index(i / p_old, map[static_cast<std::size_t>(i % p_old)]);
    for (Eigen::Index j = 0; j < old.dim(); ++j) {
      const Eigen::Index rj = basis->index(j / p_old, map[static_cast<std::size_t>(j % p_old)]);
      rho(ri, rj) = state.matrix()(i, j);
    }
  }
  return JointState<Real>(basis, std::move(rho));
}

// General passive linear-optical element: `s` is the single-particle unitary
// on `modes` (column k is the image of a_{modes[k]}^+).
template <typename Real>
JointState<Real> apply_linear_optics(const JointState<Real>& state,
                                     std::span<const ModeLabel> modes, const CMatrix<Real>& s) {
  if (s.rows() != static_cast<Eigen::Index>(modes.size()) || s.cols() != s.rows())
    throw std::invalid_argument("apply_linear_optics: transform size mismatch");
  std::vector<std::size_t> idx;
  for (const auto& m : modes) idx.push_back(state.basis().mode_index(m));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      if (idx[i] == idx[j]) throw std::invalid_argument("apply_linear_optics: repeated mode");
  const CMatrix<Real> u = detail::passive_photon_operator<Real>(state.basis(), idx, s);
  return JointState<Real>(state.basis_ptr(),
                          detail::hermitize<Real>(detail::conjugate_blocks<Real>(state.matrix(), u)));
}

template <typename Real>
CMatrix<Real> beamsplitter_matrix(double transmissivity, double phase) {
  using C = std::complex<Real>;
  const Real t = std::sqrt(Real(transmissivity));
  const Real r = std::sqrt(Real(1) - Real(transmissivity));
  const C i(0, 1);
  CMatrix<Real> s(2, 2);
  // column 0: image of a^+, column 1: image of b^+
  s(0, 0) = t;
  s(1, 0) = i * r * std::exp(i * Real(phase));
  s(0, 1) = i * r * std::exp(-i * Real(phase));
  s(1, 1) = t;
  return s;
}

template <typename Real>
JointState<Real> apply_beamsplitter(const JointState<Real>& state, const BeamsplitterSpec& bs) {
  if (bs.mode_a == bs.mode_b) throw std::invalid_argument("apply_beamsplitter: identical modes");
  if (!(bs.transmissivity >= 0.0 && bs.transmissivity <= 1.0))
    throw std::invalid_argument("apply_beamsplitter: transmissivity outside [0, 1]");
  const ModeLabel modes[2] = {bs.mode_a, bs.mode_b};
  return apply_linear_optics<Real>(state, modes, beamsplitter_matrix<Real>(bs.transmissivity, bs.phase));
}

template <typename Real>
JointState<Real> apply_phase(const JointState<Real>& state, const ModeLabel& mode, double phi) {
  CMatrix<Real> s(1, 1);
  s(0, 0) = std::exp(std::complex<Real>(0, Real(phi)));
  const ModeLabel modes[1] = {mode};
  return apply_linear_optics<Real>(state, modes, s);
}

// Coherent leakage of amplitude `chi` from `from` into `to`: a beamsplitter
// with transmissivity 1 - chi^2. Power cross-talk in dB is 10 log10(chi^2).
template <typename Real>
JointState<Real> apply_crosstalk(const JointState<Real>& state, const ModeLabel& from,
                                 const ModeLabel& to, double chi, double phase = 0.0) {
  if (!(chi >= 0.0 && chi <= 1.0)) throw std::invalid_argument("apply_crosstalk: chi outside [0, 1]");
  if (from == to) throw std::invalid_argument("apply_crosstalk: identical modes");
  return apply_beamsplitter(state, BeamsplitterSpec{from, to, 1.0 - chi * chi, phase});
}

// Single-mode amplitude damping with transmission p.
template <typename Real>
JointState<Real> apply_loss(const JointState<Real>& state, const ModeLabel& mode, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("apply_loss: transmission outside [0, 1]");
  const FockBasis& basis = state.basis();
  const std::size_t m = basis.mode_index(mode);
  const Eigen::Index dim_p = basis.photon_dim();
  const Real keep = Real(p);
  const Real lose = Real(1) - Real(p);
  CMatrix<Real> out = CMatrix<Real>::Zero(state.matrix().rows(), state.matrix().cols());
  for (int lost = 0; lost <= kMaxPhotons; ++lost) {
    CMatrix<Real> k = CMatrix<Real>::Zero(dim_p, dim_p);
    bool any = false;
    for (Eigen::Index c = 0; c < dim_p; ++c) {
      const Occupation& occ = basis.occupation(c);
      const int n = occ[m];
      if (n < lost) continue;
      Occupation target = occ;
      target[m] = static_cast<std::uint8_t>(n - lost);
      const Real binom = (n == 2 && lost == 1) ? Real(2) : Real(1);
      const Real amp = std::sqrt(binom * std::pow(keep, n - lost) * std::pow(lose, lost));
      if (amp == Real(0)) continue;
      k(basis.photon_index(target), c) = amp;
      any = true;
    }
    if (any) out += detail::conjugate_blocks<Real>(state.matrix(), k);
  }
  return JointState<Real>(state.basis_ptr(), detail::hermitize<Real>(out));
}

// Partial trace over all photonic modes.
template <typename Real>
IonMatrix<Real> reduce_to_ions(const JointState<Real>& state) {
  const Eigen::Index p = state.basis().photon_dim();
  IonMatrix<Real> ions = IonMatrix<Real>::Zero();
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) ions(i, j) = state.matrix().block(i * p, j * p, p, p).trace();
  return ions;
}

template <typename Real>
std::vector<DetectionOutcome<Real>> detect(const JointState<Real>& state,
                                           const std::vector<DetectorSpec>& detectors) {
  const FockBasis& basis = state.basis();
  const std::size_t nd = detectors.size();
  if (nd > 16) throw std::invalid_argument("detect: at most 16 detectors supported");
  std::vector<int> owner(basis.num_modes(), -1);
  for (std::size_t d = 0; d < nd; ++d) {
    const auto& det = detectors[d];
    if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0))
      throw std::invalid_argument("detect: efficiency outside [0, 1]");
    for (const auto& mode : det.modes) {
      const std::size_t m = basis.mode_index(mode);
      if (owner[m] != -1) throw std::invalid_argument("detect: overlapping detector mode sets");
      owner[m] = static_cast<int>(d);
    }
  }
  const Eigen::Index dim_p = basis.photon_dim();
  // Photons seen by each detector, per photon configuration.
  std::vector<std::vector<int>> counts(static_cast<std::size_t>(dim_p), std::vector<int>(nd, 0));
  for (Eigen::Index c = 0; c < dim_p; ++c) {
    const Occupation& occ = basis.occupation(c);
    for (std::size_t m = 0; m < occ.size(); ++m)
      if (owner[m] >= 0) counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(owner[m])] += occ[m];
  }
  std::vector<DetectionOutcome<Real>> outcomes;
  const std::uint32_t npatterns = 1u << nd;
  outcomes.reserve(npatterns);
  for (std::uint32_t pattern = 0; pattern < npatterns; ++pattern) {
    DetectionOutcome<Real> out;
    out.pattern = pattern;
    for (Eigen::Index c = 0; c < dim_p; ++c) {
      Real w = 1;
      for (std::size_t d = 0; d < nd; ++d) {
        const Real none = std::pow(Real(1) - Real(detectors[d].efficiency),
                                   counts[static_cast<std::size_t>(c)][d]);
        w *= (pattern >> d & 1u) ? Real(1) - none : none;
      }
      if (w == Real(0)) continue;
      for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
          out.ions(i, j) += w * state.matrix()(basis.index(i, c), basis.index(j, c));
    }
    out.probability = std::max(Real(0), out.ions.trace().real());
    if (out.probability > Real(0)) out.ions /= out.ions.trace().real();
    outcomes.push_back(out);
  }
  return outcomes;
}

template <typename Real>
Eigen::Matrix<std::complex<Real>, 4, 1> bell_vector(BellState target) {
  Eigen::Matrix<std::complex<Real>, 4, 1> v = Eigen::Matrix<std::complex<Real>, 4, 1>::Zero();
  const Real s = Real(1) / std::sqrt(Real(2));
  const Eigen::Index ud = FockBasis::ion_index(IonLevel::Up, IonLevel::Down);
  const Eigen::Index du = FockBasis::ion_index(IonLevel::Down, IonLevel::Up);
  v(ud) = s;
  v(du) = target == BellState::PsiPlus ? s : -s;
  return v;
}

template <typename Real>
IonMatrix<Real> correction_unitary(const Correction& corr) {
  using C = std::complex<Real>;
  Eigen::Matrix<C, 2, 2> u1;
  u1 << C(1), C(0), C(0), std::exp(C(0, Real(corr.phase)));
  if (corr.flip) {
    Eigen::Matrix<C, 2, 2> x;
    x << C(0), C(1), C(1), C(0);
    u1 = x * u1;
  }
  IonMatrix<Real> u = IonMatrix<Real>::Zero();
  // ion1 is the more significant index
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) u(2 * a + k, 2 * b + k) = u1(a, b);
  return u;
}

template <typename Real>
Real bell_fidelity(const IonMatrix<Real>& rho, BellState target, const Correction& corr = {}) {
  const Real tr = rho.trace().real();
  if (std::abs(tr - Real(1)) > Real(tol::kNormalized))
    throw std::invalid_argument("bell_fidelity: ion state is not trace-normalized");
  const IonMatrix<Real> u = correction_unitary<Real>(corr);
  const auto psi = bell_vector<Real>(target);
  const auto corrected = (u * rho * u.adjoint()).eval();
  return std::clamp((psi.adjoint() * corrected * psi)(0, 0).real(), Real(0), Real(1));
}

template <typename Real>
StateDiagnostics diagnose(const JointState<Real>& state) {
  StateDiagnostics d;
  const auto& rho = state.matrix();
  d.hermiticity_error = static_cast<double>((rho - rho.adjoint()).cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(detail::hermitize<Real>(rho), Eigen::EigenvaluesOnly);
  d.min_eigenvalue = static_cast<double>(es.eigenvalues().minCoeff());
  d.trace = static_cast<double>(state.trace());
  return d;
}

}  // namespace pme
