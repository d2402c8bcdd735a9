#pragma once

#include <cmath>
#include <complex>

#include "gaussdyn/types.hpp"

// Gaussian-state data model: physicality tests, purity, the bidirectional
// maps between covariance form and density-matrix parameter form, and
// pointwise density-matrix evaluation.

namespace gaussdyn {

constexpr double kPhysicalityTol = 1e-9;

/// Robertson physicality: per-mode sigma_pp*sigma_qq - sigma_pq^2 >= 1/4,
/// det sigma >= (1/4)^N for N = 2, and sigma positive semidefinite,
/// all within `tol`.
inline bool is_physical(const GaussianState& s, double tol = kPhysicalityTol) {
  const int n = s.n_modes;
  if (s.cov.rows() != 2 * n || s.cov.cols() != 2 * n) return false;
  if ((s.cov - s.cov.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  for (int m = 0; m < n; ++m) {
    const double spp = s.cov(2 * m, 2 * m);
    const double sqq = s.cov(2 * m + 1, 2 * m + 1);
    const double spq = s.cov(2 * m, 2 * m + 1);
    if (spp * sqq - spq * spq < 0.25 - tol) return false;
  }
  if (n == 2 && s.cov.determinant() < 1.0 / 16.0 - tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.cov, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

/// Tr rho^2 = 1 / (2^N sqrt(det sigma)).
inline double purity(const GaussianState& s, double tol = kPhysicalityTol) {
  if (!is_physical(s, tol))
    throw NonPhysicalState("purity requires a physical state");
  return 1.0 / (std::pow(2.0, s.n_modes) * std::sqrt(s.cov.determinant()));
}

inline void check_integrable(const DensityParams1D& p) {
  if (!(p.a1.real() > p.a12 / 2.0) || p.a12 < 0.0)
    throw NonIntegrableParams("require Re(a1) > a12/2 >= 0");
}

/// Covariances and means of the one-mode parameter form:
///   <p> = Im b - 2 Im(a1) Re(b) / g,  <q> = Re(b) / g,  g = 2 Re(a1) - a12,
///   sigma = [[4|a1|^2 - a12^2, -2 Im a1], [-2 Im a1, 1]] / (2g).
inline GaussianState state_from_params_1d(const DensityParams1D& p) {
  check_integrable(p);
  const double g = 2.0 * p.a1.real() - p.a12;
  GaussianState s;
  s.n_modes = 1;
  s.mean = Vector(2);
  s.mean << p.b.imag() - 2.0 * p.a1.imag() * p.b.real() / g,
      p.b.real() / g;
  s.cov = Matrix(2, 2);
  const double a1i = p.a1.imag();
  s.cov << (4.0 * std::norm(p.a1) - p.a12 * p.a12) / (2.0 * g),
      -a1i / g, -a1i / g, 1.0 / (2.0 * g);
  return s;
}

/// Algebraic inverse of state_from_params_1d. Every physical one-mode state
/// maps onto integrable parameters: a12 = (det sigma - 1/4)/sigma_qq >= 0 by
/// the Robertson bound, and Re(a1) - a12/2 = 1/(4 sigma_qq) > 0.
inline DensityParams1D params_from_state_1d(const GaussianState& s,
                                            double tol = kPhysicalityTol) {
  if (s.n_modes != 1)
    throw DimensionMismatch("params_from_state_1d expects one mode");
  if (!is_physical(s, tol))
    throw NonPhysicalState("state violates the Robertson inequality");
  const double spp = s.cov(0, 0), spq = s.cov(0, 1), sqq = s.cov(1, 1);
  const double det = spp * sqq - spq * spq;
  DensityParams1D p;
  p.a12 = (det - 0.25) / sqq;
  const double a1r = 0.5 * spp - 0.5 * spq * spq / sqq + 1.0 / (8.0 * sqq);
  const double a1i = -spq / (2.0 * sqq);
  p.a1 = Complex(a1r, a1i);
  const double br = s.mean(1) / (2.0 * sqq);
  const double bi = s.mean(0) - spq * s.mean(1) / sqq;
  p.b = Complex(br, bi);
  if (p.a12 < 0.0 && p.a12 > -tol) p.a12 = 0.0;  // clip Robertson-boundary noise
  return p;
}

namespace detail {

struct BipartiteAColumns {
  Complex alpha;    // 2 a11 - a13
  Complex gamma;    // 2 a22 - a24
  Complex beta;     // a12 + a14
  Complex epsilon;  // a12 + conj(a14)
};

inline BipartiteAColumns a_columns(const DensityParamsBipartite& p) {
  return {2.0 * p.a11 - p.a13, 2.0 * p.a22 - p.a24, p.a12 + p.a14,
          p.a12 + std::conj(p.a14)};
}

}  // namespace detail

/// Forward map: the three q-covariances from the real-part quadratic form,
/// then the remaining seven second moments; means are zero by construction.
/// The complex combinations below have vanishing imaginary parts for any
/// admissible parameter set; the real part is returned.
///
/// `validate` runs the Robertson check on the result; comparisons against an
/// independently integrated covariance flow switch it off, since the check's
/// det-sigma margin is unresolvable once the state has grown large.
inline GaussianState covariances_from_bipartite_params(
    const DensityParamsBipartite& p, double tol = kPhysicalityTol,
    bool validate = true) {
  const double P = 2.0 * p.a11.real() - p.a13;
  const double Q = 2.0 * p.a22.real() - p.a24;
  const double R = 2.0 * p.a12.real() + 2.0 * p.a14.real();
  const double den = 4.0 * P * Q - R * R;
  if (std::abs(den) < 1e-14 * (1.0 + 4.0 * std::abs(P * Q) + R * R))
    throw SingularParameterMap("vanishing q-covariance denominator");
  if (P <= 0.0 || Q <= 0.0 || den <= 0.0)
    throw NonIntegrableParams("real quadratic form is not positive definite");

  const double q1q1 = 2.0 * Q / den;
  const double q1q2 = R / den;
  const double q2q2 = 2.0 * P / den;

  const auto [alpha, gamma, beta, epsilon] = detail::a_columns(p);
  const Complex i(0.0, 1.0);
  const Complex p1p1 = 2.0 * p.a11 - alpha * alpha * q1q1 -
                       beta * beta * q2q2 + 2.0 * alpha * beta * q1q2;
  const Complex p1q1 = i * (alpha * q1q1 - beta * q1q2 - 0.5);
  const Complex p1p2 = -p.a12 + gamma * beta * q2q2 + alpha * epsilon * q1q1 -
                       (gamma * alpha + epsilon * beta) * q1q2;
  const Complex p1q2 = i * (alpha * q1q2 - beta * q2q2);
  const Complex q1p2 = i * (gamma * q1q2 - epsilon * q1q1);
  const Complex p2p2 = 2.0 * p.a22 - gamma * gamma * q2q2 -
                       epsilon * epsilon * q1q1 + 2.0 * gamma * epsilon * q1q2;
  const Complex p2q2 = i * (gamma * q2q2 - epsilon * q1q2 - 0.5);

  GaussianState s;
  s.n_modes = 2;
  s.mean = Vector::Zero(4);
  s.cov = Matrix(4, 4);
  s.cov << p1p1.real(), p1q1.real(), p1p2.real(), p1q2.real(),
      p1q1.real(), q1q1, q1p2.real(), q1q2,
      p1p2.real(), q1p2.real(), p2p2.real(), p2q2.real(),
      p1q2.real(), q1q2, p2q2.real(), q2q2;
  if (validate && !is_physical(s, tol))
    throw NonPhysicalState("parameters map to a nonphysical covariance");
  return s;
}

/// Inverse of covariances_from_bipartite_params, derived by inverting the
/// q-block (which fixes the real parts of the A columns), solving the 2x2
/// linear systems the pq-covariances impose on the imaginary parts, and
/// reading the remaining parameters off the pp-covariance relations.
inline DensityParamsBipartite bipartite_params_from_covariances(
    const GaussianState& s, double tol = kPhysicalityTol) {
  if (s.n_modes != 2 || s.cov.rows() != 4)
    throw DimensionMismatch("expected a two-mode state");
  if (s.mean.cwiseAbs().maxCoeff() > tol)
    throw NonZeroMeans("the bipartite parameter form assumes zero means");
  if (!is_physical(s, tol))
    throw NonPhysicalState("state violates the Robertson inequalities");

  const double q1q1 = s.cov(1, 1), q1q2 = s.cov(1, 3), q2q2 = s.cov(3, 3);
  const double p1q1 = s.cov(0, 1), p1q2 = s.cov(0, 3);
  const double q1p2 = s.cov(1, 2), p2q2 = s.cov(2, 3);
  const double detq = q1q1 * q2q2 - q1q2 * q1q2;

  // sigma_q^{-1} = [[2P, -R], [-R, 2Q]]
  const double P = 0.5 * q2q2 / detq;
  const double Q = 0.5 * q1q1 / detq;
  const double R = q1q2 / detq;
  const double re_beta = P * q1q2 / q2q2;
  const double re_epsilon = Q * q1q2 / q1q1;

  // imaginary parts from the pq-covariances
  Eigen::Matrix2d m1;
  m1 << -q1q1, q1q2, -q1q2, q2q2;
  const Eigen::Vector2d ab = m1.colPivHouseholderQr().solve(
      Eigen::Vector2d(p1q1, p1q2));
  const double im_alpha = ab(0), im_beta = ab(1);
  Eigen::Matrix2d m2;
  m2 << q1q1, -q1q2, q1q2, -q2q2;
  const Eigen::Vector2d ge = m2.colPivHouseholderQr().solve(
      Eigen::Vector2d(q1p2, p2q2));
  const double im_epsilon = ge(0), im_gamma = ge(1);

  const Complex alpha(P, im_alpha), gamma(Q, im_gamma);
  const Complex beta(re_beta, im_beta), epsilon(re_epsilon, im_epsilon);

  DensityParamsBipartite p;
  const Complex a11_full =
      0.5 * (s.cov(0, 0) + alpha * alpha * q1q1 + beta * beta * q2q2 -
             2.0 * alpha * beta * q1q2);
  p.a11 = Complex(a11_full.real(), im_alpha / 2.0);
  p.a13 = 2.0 * p.a11.real() - P;
  const Complex a22_full =
      0.5 * (s.cov(2, 2) + gamma * gamma * q2q2 + epsilon * epsilon * q1q1 -
             2.0 * gamma * epsilon * q1q2);
  p.a22 = Complex(a22_full.real(), im_gamma / 2.0);
  p.a24 = 2.0 * p.a22.real() - Q;
  p.a12 = -s.cov(0, 2) + gamma * beta * q2q2 + alpha * epsilon * q1q1 -
          (gamma * alpha + epsilon * beta) * q1q2;
  p.a14 = beta - p.a12;
  return p;
}

/// Normalization constant of the one-mode parameter form.
inline double density_norm_1d(const DensityParams1D& p) {
  const double g = 2.0 * p.a1.real() - p.a12;
  const double br2 = 2.0 * p.b.real();
  return std::sqrt(g / M_PI) * std::exp(-br2 * br2 / (4.0 * g));
}

/// rho(x, x') for the one-mode parameter form; Hermitian by construction.
inline Complex density_eval_1d(const DensityParams1D& p, double x, double xp) {
  check_integrable(p);
  const Complex expo = -p.a1 * x * x + p.a12 * x * xp -
                       std::conj(p.a1) * xp * xp + p.b * x +
                       std::conj(p.b) * xp;
  return density_norm_1d(p) * std::exp(expo);
}

/// The 4x4 exponent matrix A = [[u, -v], [-v~, conj(u)]].
inline ComplexMatrix bipartite_a_matrix(const DensityParamsBipartite& p) {
  ComplexMatrix u(2, 2), v(2, 2);
  u << 2.0 * p.a11, -p.a12, -p.a12, 2.0 * p.a22;
  v << p.a13, p.a14, std::conj(p.a14), p.a24;
  ComplexMatrix a(4, 4);
  a.topLeftCorner(2, 2) = u;
  a.topRightCorner(2, 2) = -v;
  a.bottomLeftCorner(2, 2) = -v.transpose();
  a.bottomRightCorner(2, 2) = u.conjugate();
  return a;
}

/// Trace-normalizing constant: the diagonal restriction of the exponent is
/// the real quadratic form W = u + conj(u) - v - v~, so N = sqrt(det W)/(2 pi).
inline double density_norm_bipartite(const DensityParamsBipartite& p) {
  Eigen::Matrix2d w;
  const double P = 2.0 * p.a11.real() - p.a13;
  const double Q = 2.0 * p.a22.real() - p.a24;
  const double R = 2.0 * p.a12.real() + 2.0 * p.a14.real();
  w << 2.0 * P, -R, -R, 2.0 * Q;
  const double detw = w.determinant();
  if (detw <= 0.0 || P <= 0.0)
    throw NonIntegrableParams("real quadratic form is not positive definite");
  return std::sqrt(detw) / (2.0 * M_PI);
}

/// rho(x, x') for the zero-mean two-mode parameter form.
inline Complex density_eval_bipartite(const DensityParamsBipartite& p,
                                      const Eigen::Vector2d& x,
                                      const Eigen::Vector2d& xp) {
  const ComplexMatrix a = bipartite_a_matrix(p);
  Eigen::Vector4cd y;
  y << x(0), x(1), xp(0), xp(1);
  const Complex expo = -0.5 * (y.transpose() * a * y)(0);
  return density_norm_bipartite(p) * std::exp(expo);
}

}  // namespace gaussdyn
