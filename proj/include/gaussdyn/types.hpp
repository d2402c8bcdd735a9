#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "gaussdyn/errors.hpp"

// Core value types. Quadrature ordering is (p1, q1, p2, q2, ...) everywhere;
// all matrices over quadratures follow it. Units: hbar = m = k = 1.

namespace gaussdyn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Per-mode symplectic unit: Sigma = [[0, 1], [-1, 0]].
inline Eigen::Matrix2d sigma_unit() {
  Eigen::Matrix2d s;
  s << 0.0, 1.0, -1.0, 0.0;
  return s;
}

/// Block-diagonal Sigma_N with one `sigma_unit` block per mode.
inline Matrix sigma_blocks(int n_modes) {
  Matrix s = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m)
    s.block<2, 2>(2 * m, 2 * m) = sigma_unit();
  return s;
}

/// Commutator matrix D with D_{jk} = [r_j, r_k]: block-diagonal copies of
/// -i*Sigma. D is antisymmetric and squares to +I; iD equals the real
/// block-diagonal Sigma_N, which is what the real-arithmetic flow kernels use.
struct SymplecticForm {
  int n_modes = 1;
  ComplexMatrix d;

  /// iD, the real block-diagonal symplectic unit Sigma_N.
  Matrix real_sigma() const { return (Complex(0.0, 1.0) * d).real(); }
};

/// Time-dependent quadratic Hamiltonian H = r~ B(t) r + Delta~(t) r over
/// r = (p1, q1, ..., pN, qN). B(t) is real symmetric, Delta(t) real.
/// Coefficient callables must be pure; integrators evaluate them mid-step.
struct QuadraticHamiltonian {
  int n_modes = 1;
  std::function<Matrix(double)> b;
  std::function<Vector(double)> drive;
};

/// Gaussian state: mean quadrature vector and symmetrized covariance matrix
/// sigma_{jk} = <{r_j, r_k}>/2 - <r_j><r_k>.
struct GaussianState {
  int n_modes = 1;
  Vector mean;
  Matrix cov;
};

/// One-mode Gaussian density-matrix parameters:
///   rho(x, x') = N exp(-a1 x^2 + a12 x x' - conj(a1) x'^2 + b x + conj(b) x')
/// with integrability Re(a1) > a12/2 >= 0.
struct DensityParams1D {
  Complex a1;
  double a12 = 0.0;
  Complex b;
};

/// Two-mode zero-mean Gaussian density-matrix parameters. The exponent is
/// -1/2 y~ A y over y = (x1, x2, x1', x2') with
///   A = [[u, -v], [-v~, conj(u)]],
///   u = [[2 a11, -a12], [-a12, 2 a22]],  v = [[a13, a14], [conj(a14), a24]].
/// a13, a24 are real (Hermiticity of rho); means are fixed to zero.
struct DensityParamsBipartite {
  Complex a11;
  Complex a22;
  Complex a12;
  Complex a14;
  double a13 = 0.0;
  double a24 = 0.0;
};

/// Linear-invariant frame R(t) = Lambda(t) r + Gamma(t); Lambda is symplectic
/// (Lambda D Lambda~ = D), Lambda(0) = I, Gamma(0) = 0.
struct SymplecticFrame {
  Matrix lambda;
  Vector gamma;
  double t = 0.0;
};

/// Integrator selection. `dt` is the fixed step for rk4_fixed; for
/// rk45_adaptive it sets the output sample spacing while the internal step
/// adapts to rel_tol/abs_tol.
struct IntegratorConfig {
  enum class Method { rk4_fixed, rk45_adaptive };
  Method method = Method::rk4_fixed;
  double dt = 1e-3;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double t_max = 1.0;
  int sample_stride = 1;
  bool with_frame = false;            // co-integrate Lambda, Gamma, accum
  bool strict_symplectic = false;     // abort when frame drift exceeds 1e-6
};

/// Sampled evolution output. All populated series share `times`' length;
/// `frames`/`accums` are filled only when the frame is co-integrated,
/// `params_1d` only by the parameter-flow drivers.
struct Trajectory {
  std::vector<double> times;
  std::vector<GaussianState> states;
  std::vector<SymplecticFrame> frames;
  std::vector<double> accums;          // running integral of lam3_dot*lam6
  std::vector<double> energies;
  std::vector<double> det_cov;
  std::vector<DensityParams1D> params_1d;
};

}  // namespace gaussdyn
