// Copyright 2026 The diqkd-sim Authors
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

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace diqkd::quantum {

template <typename Scalar>
using Matrix2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

/// Basis order |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ with |↑⟩ the +1 eigenstate of Z.
template <typename Scalar = double>
class TwoQubitState {
 public:
  /// Validates the matrix. Eigenvalues in [-1e-10, 0) are clipped to zero;
  /// anything below that throws.
  explicit TwoQubitState(const Matrix4<Scalar>& rho) : rho_(rho) { validate(); }

  static TwoQubitState maximally_mixed() {
    return TwoQubitState(Matrix4<Scalar>::Identity() * std::complex<Scalar>(Scalar(0.25), 0));
  }

  static TwoQubitState pure(const Eigen::Matrix<std::complex<Scalar>, 4, 1>& psi) {
    return TwoQubitState(psi * psi.adjoint() / psi.squaredNorm());
  }

  const Matrix4<Scalar>& matrix() const { return rho_; }

  /// (1 - w) rho + w other.
  TwoQubitState mix(const TwoQubitState& other, Scalar w) const {
    return TwoQubitState((Scalar(1) - w) * rho_ + w * other.rho_);
  }

 private:
  void validate() {
    const Scalar tol = Scalar(1e-12);
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw std::domain_error("TwoQubitState: matrix is not Hermitian");
    }
    if (std::abs(rho_.trace() - std::complex<Scalar>(1, 0)) > tol) {
      throw std::domain_error("TwoQubitState: trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix4<Scalar>> eig(rho_);
    const auto& vals = eig.eigenvalues();
    if (vals.minCoeff() < Scalar(-1e-10)) {
      throw std::domain_error("TwoQubitState: negative eigenvalue");
    }
    if (vals.minCoeff() < Scalar(0)) {
      const Eigen::Matrix<Scalar, 4, 1> clipped = vals.cwiseMax(Scalar(0));
      rho_ = eig.eigenvectors() * clipped.template cast<std::complex<Scalar>>().asDiagonal() *
             eig.eigenvectors().adjoint();
    }
  }

  Matrix4<Scalar> rho_;
};

template <typename Scalar = double>
struct BlochVector {
  Scalar nx = 0;
  Scalar ny = 0;
  Scalar nz = 1;

  /// Normalizes (x, y, z); throws on the zero vector.
  static BlochVector from(Scalar x, Scalar y, Scalar z) {
    const Scalar r = std::sqrt(x * x + y * y + z * z);
    if (!(r > Scalar(0))) throw std::domain_error("BlochVector: zero vector");
    return {x / r, y / r, z / r};
  }
  static BlochVector X() { return {1, 0, 0}; }
  static BlochVector Y() { return {0, 1, 0}; }
  static BlochVector Z() { return {0, 0, 1}; }

  bool is_unit(Scalar tol = Scalar(1e-12)) const {
    return std::abs(nx * nx + ny * ny + nz * nz - Scalar(1)) <= tol;
  }

  /// Image under conjugation by X: (x, y, z) -> (x, -y, -z).
  BlochVector bit_flipped() const { return {nx, -ny, -nz}; }
};

struct NoiseParams {
  double alpha_exc = 0.0;
  double dephase_lambda = 0.0;
  double white_noise = 0.0;
  double readout_flip = 0.0;
  double delta_phi = 0.0;
  int sign = +1;

  void validate() const {
    for (double p : {alpha_exc, dephase_lambda, white_noise, readout_flip}) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("NoiseParams: probability outside [0,1]");
    }
    if (sign != 1 && sign != -1) throw std::domain_error("NoiseParams: sign must be +1 or -1");
    if (!std::isfinite(delta_phi)) throw std::domain_error("NoiseParams: delta_phi not finite");
  }
};

struct LambDickeParams {
  std::array<double, 3> eta{0.0, 0.0, 0.0};
  std::array<double, 3> omega{0.0, 0.0, 0.0};
  double t = 0.0;
};

/// a·σ for a unit Bloch vector.
template <typename Scalar>
Matrix2<Scalar> pauli(const BlochVector<Scalar>& a) {
  using C = std::complex<Scalar>;
  Matrix2<Scalar> m;
  m << C(a.nz, 0), C(a.nx, -a.ny),
       C(a.nx, a.ny), C(-a.nz, 0);
  return m;
}

template <typename Scalar>
Matrix4<Scalar> kron(const Matrix2<Scalar>& a, const Matrix2<Scalar>& b) {
  Matrix4<Scalar> out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.template block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
  }
  return out;
}

/// (|↑↓⟩ + sign e^{iδφ}|↓↑⟩)/√2.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, 4, 1> bell_vector(int sign, Scalar delta_phi) {
  using C = std::complex<Scalar>;
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  Eigen::Matrix<C, 4, 1> psi = Eigen::Matrix<C, 4, 1>::Zero();
  psi(1) = C(r, 0);
  psi(2) = Scalar(sign) * r * std::polar(Scalar(1), delta_phi);
  return psi;
}

/// α|↑↑⟩⟨↑↑| + (1-α)|ψ±⟩⟨ψ±|, then coherence dephasing by (1-λ) and white
/// noise. Readout flips act on outcomes and are not applied here.
template <typename Scalar = double>
TwoQubitState<Scalar> build_heralded_state(const NoiseParams& params) {
  params.validate();
  using C = std::complex<Scalar>;
  const Scalar alpha = Scalar(params.alpha_exc);
  const auto psi = bell_vector<Scalar>(params.sign, Scalar(params.delta_phi));
  Matrix4<Scalar> rho = (Scalar(1) - alpha) * (psi * psi.adjoint());
  rho(0, 0) += C(alpha, 0);
  const Scalar keep = Scalar(1) - Scalar(params.dephase_lambda);
  rho(1, 2) *= keep;
  rho(2, 1) *= keep;
  const Scalar p = Scalar(params.white_noise);
  rho = (Scalar(1) - p) * rho + (p / Scalar(4)) * Matrix4<Scalar>::Identity();
  return TwoQubitState<Scalar>(rho);
}

/// Tr[ρ (a·σ ⊗ b·σ)]; flip_b conjugates the second qubit by X.
template <typename Scalar>
Scalar correlator(const TwoQubitState<Scalar>& rho, const BlochVector<Scalar>& a,
                  const BlochVector<Scalar>& b, bool flip_b) {
  const BlochVector<Scalar> bb = flip_b ? b.bit_flipped() : b;
  return (rho.matrix() * kron(pauli(a), pauli(bb))).trace().real();
}

/// P(o_a, o_b) for outcomes ±1 ordered (+,+), (+,-), (-,+), (-,-); each
/// party's outcome then flips independently with probability readout_flip.
template <typename Scalar>
std::array<Scalar, 4> outcome_distribution(const TwoQubitState<Scalar>& rho,
                                           const BlochVector<Scalar>& a,
                                           const BlochVector<Scalar>& b, Scalar readout_flip,
                                           bool flip_b = false) {
  const BlochVector<Scalar> bb = flip_b ? b.bit_flipped() : b;
  const Matrix2<Scalar> id = Matrix2<Scalar>::Identity();
  const Matrix2<Scalar> pa = pauli(a);
  const Matrix2<Scalar> pb = pauli(bb);
  std::array<Scalar, 4> ideal{};
  for (int i = 0; i < 2; ++i) {
    const Matrix2<Scalar> proj_a = (id + Scalar(i == 0 ? 1 : -1) * pa) / Scalar(2);
    for (int j = 0; j < 2; ++j) {
      const Matrix2<Scalar> proj_b = (id + Scalar(j == 0 ? 1 : -1) * pb) / Scalar(2);
      ideal[2 * i + j] = std::max(Scalar(0), (rho.matrix() * kron(proj_a, proj_b)).trace().real());
    }
  }
  const Scalar r = readout_flip;
  const Scalar k = Scalar(1) - r;
  std::array<Scalar, 4> out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out[2 * i + j] = k * k * ideal[2 * i + j] + k * r * ideal[2 * i + (1 - j)] +
                       r * k * ideal[2 * (1 - i) + j] + r * r * ideal[2 * (1 - i) + (1 - j)];
    }
  }
  return out;
}

/// Measurement axes for the CHSH combination: a[x], b[y].
template <typename Scalar = double>
struct ChshSettings {
  std::array<BlochVector<Scalar>, 2> a;
  std::array<BlochVector<Scalar>, 2> b;
};

/// x ∈ {Z, X}; y ∈ {(Z+X)/√2, (Z-X)/√2}. Optimal for the flipped ψ+ state.
template <typename Scalar = double>
ChshSettings<Scalar> standard_settings() {
  ChshSettings<Scalar> s;
  s.a = {BlochVector<Scalar>::Z(), BlochVector<Scalar>::X()};
  s.b = {BlochVector<Scalar>::from(1, 0, 1), BlochVector<Scalar>::from(-1, 0, 1)};
  return s;
}

/// E(0,0) + E(0,1) + E(1,0) - E(1,1).
template <typename Scalar>
Scalar chsh_value(const TwoQubitState<Scalar>& rho, const ChshSettings<Scalar>& s, bool flip_b) {
  return correlator(rho, s.a[0], s.b[0], flip_b) + correlator(rho, s.a[0], s.b[1], flip_b) +
         correlator(rho, s.a[1], s.b[0], flip_b) - correlator(rho, s.a[1], s.b[1], flip_b);
}

/// P(outcomes differ) in the key bases.
template <typename Scalar>
Scalar qber(const TwoQubitState<Scalar>& rho, const BlochVector<Scalar>& key_a,
            const BlochVector<Scalar>& key_b, bool flip_b, Scalar readout_flip) {
  const auto p = outcome_distribution(rho, key_a, key_b, readout_flip, flip_b);
  return p[1] + p[2];
}

inline double fidelity_from_visibilities(double v_zz, double v_xx) {
  return 0.25 * (1.0 + v_zz + 2.0 * v_xx);
}

/// ⟨ψ±|ρ|ψ±⟩.
template <typename Scalar>
Scalar bell_fidelity(const TwoQubitState<Scalar>& rho, int sign, Scalar delta_phi) {
  const auto psi = bell_vector<Scalar>(sign, delta_phi);
  return (psi.adjoint() * rho.matrix() * psi)(0, 0).real();
}

/// Noise parameters whose flipped-frame visibilities are v_z = ⟨ZZ⟩ and
/// v_x = ⟨XX⟩: v_z = 1 - 2α and v_x = (1-α)(1-λ).
inline NoiseParams calibrate_noise(double v_z, double v_x) {
  NoiseParams p;
  p.alpha_exc = 0.5 * (1.0 - v_z);
  if (!(p.alpha_exc >= 0.0 && p.alpha_exc < 1.0)) {
    throw std::domain_error("calibrate_noise: v_z must lie in (-1, 1]");
  }
  p.dephase_lambda = 1.0 - v_x / (1.0 - p.alpha_exc);
  p.validate();
  return p;
}

/// Π_i exp(-η_i² (1 + ω_i² t²)).
inline double debye_waller(const LambDickeParams& p) {
  double expo = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (p.eta[i] < 0.0 || p.omega[i] < 0.0 || p.t < 0.0) {
      throw std::domain_error("debye_waller: parameters must be nonnegative");
    }
    expo += p.eta[i] * p.eta[i] * (1.0 + p.omega[i] * p.omega[i] * p.t * p.t);
  }
  return std::exp(-expo);
}

inline double spi_visibility(double D, double p) {
  if (!(D > 0.0 && D <= 1.0) || !(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("spi_visibility: D in (0,1], p in [0,1]");
  }
  return D * (1.0 - p);
}

/// Click rates at the two interferometer outputs for excitation p; they sum
/// to p and the fringe visibility over φ is D(1-p).
inline std::pair<double, double> interference_fringe(double p, double D, double phi) {
  const double v = spi_visibility(D, p) * std::cos(phi);
  return {0.5 * p * (1.0 + v), 0.5 * p * (1.0 - v)};
}

}  // namespace diqkd::quantum
