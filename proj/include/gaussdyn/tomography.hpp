#pragma once

#include <cmath>
#include <vector>

#include "gaussdyn/gaussian_state.hpp"
#include "gaussdyn/quadrature.hpp"
#include "gaussdyn/types.hpp"

// Symplectic-tomogram representation: the homodyne quadrature
// X = mu q + nu p of a Gaussian state is normally distributed with
//   Xbar(mu, nu) = mu <q> + nu <p>,
//   var(mu, nu)  = mu^2 s_qq + nu^2 s_pp + 2 mu nu s_pq,
// plus the Fock/thermal reference tomograms and overlap probabilities.

namespace gaussdyn {

/// Frame-independent tomogram coefficients. `mean_form` holds the linear
/// coefficients of Xbar_i in (mu_i, nu_i); `dispersion_form` is the quadratic
/// form over (mu_1, nu_1[, mu_2, nu_2]) whose contractions give the
/// X-covariances. Both are the state's moments reordered q-before-p.
struct GaussianTomogram {
  int n_modes = 1;
  Vector mean_form;       // (<q1>, <p1>[, <q2>, <p2>])
  Matrix dispersion_form; // per-mode q-major reordering of sigma
};

namespace detail {

// Permutation taking (p1, q1, ...) indices to (q1, p1, ...).
inline Matrix qp_swap(int n_modes) {
  Matrix perm = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    perm(2 * m, 2 * m + 1) = 1.0;
    perm(2 * m + 1, 2 * m) = 1.0;
  }
  return perm;
}

inline GaussianTomogram tomogram_from_moments(const Vector& mean,
                                              const Matrix& cov, int n_modes) {
  const Matrix perm = qp_swap(n_modes);
  GaussianTomogram tg;
  tg.n_modes = n_modes;
  tg.mean_form = perm * mean;
  tg.dispersion_form = perm * cov * perm.transpose();
  return tg;
}

}  // namespace detail

/// One-mode tomogram of mode `mode` of a physical state.
inline GaussianTomogram tomogram_of_state(const GaussianState& s,
                                          int mode = 0) {
  if (!is_physical(s)) throw NonPhysicalState("tomogram of nonphysical state");
  if (mode < 0 || mode >= s.n_modes)
    throw DimensionMismatch("mode index out of range");
  return detail::tomogram_from_moments(s.mean.segment(2 * mode, 2),
                                       s.cov.block(2 * mode, 2 * mode, 2, 2),
                                       1);
}

inline double tomogram_mean(const GaussianTomogram& tg, double mu, double nu) {
  return mu * tg.mean_form(0) + nu * tg.mean_form(1);
}

inline double tomogram_dispersion(const GaussianTomogram& tg, double mu,
                                  double nu) {
  Eigen::Vector2d f(mu, nu);
  return f.dot(tg.dispersion_form.topLeftCorner<2, 2>() * f);
}

/// Normal density of the quadrature X in the (mu, nu) frame.
inline double tomogram_pdf(const GaussianTomogram& tg, double x, double mu,
                           double nu) {
  if (mu == 0.0 && nu == 0.0)
    throw DegenerateFrame("(mu, nu) = (0, 0) has no quadrature");
  const double var = tomogram_dispersion(tg, mu, nu);
  const double d = x - tomogram_mean(tg, mu, nu);
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

struct ThermalSpec {
  double beta = 1.0;
  int n_max = 0;
};

struct Thermal1D {
  DensityParams1D params;
  GaussianState state;
  double partition = 0.0;  // Z(beta) = 1 / (2 sinh(beta/2))
};

/// Oscillator thermal state: a1 = coth(beta)/2, a12 = 1/sinh(beta), b = 0.
/// The covariances follow from the parameter map:
/// s_qq = s_pp = coth(beta/2)/2, s_pq = 0.
inline Thermal1D thermal_state_1d(const ThermalSpec& spec) {
  if (spec.beta <= 0.0)
    throw Error("InvalidTemperature", "beta must be positive");
  Thermal1D out;
  out.params.a1 = Complex(0.5 / std::tanh(spec.beta), 0.0);
  out.params.a12 = 1.0 / std::sinh(spec.beta);
  out.params.b = Complex(0.0, 0.0);
  out.state = state_from_params_1d(out.params);
  out.partition = 1.0 / (2.0 * std::sinh(spec.beta / 2.0));
  return out;
}

/// Normalized Hermite function h_n(y) = H_n(y) exp(-y^2/2) / sqrt(2^n n! pi^{1/2}),
/// by the recurrence h_{n+1} = y sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1};
/// stable through n of a few hundred.
inline double hermite_function(int n, double y) {
  double h0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * y * y);
  if (n == 0) return h0;
  double h1 = std::sqrt(2.0) * y * h0;
  for (int k = 1; k < n; ++k) {
    const double h2 =
        y * std::sqrt(2.0 / (k + 1)) * h1 - std::sqrt(k / (k + 1.0)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// Tomogram of the n-th oscillator energy eigenstate; depends on the frame
/// only through mu^2 + nu^2.
inline double fock_tomogram(int n, double x, double mu, double nu) {
  if (mu == 0.0 && nu == 0.0)
    throw DegenerateFrame("(mu, nu) = (0, 0) has no quadrature");
  const double s2 = mu * mu + nu * nu;
  const double h = hermite_function(n, x / std::sqrt(s2));
  return h * h / std::sqrt(s2);
}

struct ThermalDecomposition {
  double partial_sum = 0.0;
  std::vector<double> weights;  // P_n = (1 - e^{-beta}) e^{-n beta}
};

/// Convex Fock decomposition of the thermal tomogram, truncated at n_max.
inline ThermalDecomposition thermal_decomposition(const ThermalSpec& spec,
                                                  double x, double mu,
                                                  double nu) {
  if (spec.beta <= 0.0)
    throw Error("InvalidTemperature", "beta must be positive");
  ThermalDecomposition out;
  const double base = 1.0 - std::exp(-spec.beta);
  out.weights.reserve(spec.n_max + 1);
  for (int n = 0; n <= spec.n_max; ++n) {
    const double pn = base * std::exp(-n * spec.beta);
    out.weights.push_back(pn);
    out.partial_sum += pn * fock_tomogram(n, x, mu, nu);
  }
  return out;
}

namespace detail {

inline const GaussHermiteRule& cached_gh_rule(int order) {
  static const GaussHermiteRule r64 = gauss_hermite(64);
  static const GaussHermiteRule r128 = gauss_hermite(128);
  static const GaussHermiteRule r256 = gauss_hermite(256);
  if (order == 64) return r64;
  if (order == 128) return r128;
  return r256;
}

// rho(x, x') factorizes as N f(x) conj(f(x')) exp(a12 x x'); the weighted
// Hermite-function samples are hoisted out of the double loop.
inline double overlap_quadrature(const DensityParams1D& p, int n,
                                 const GaussHermiteRule& rule) {
  const Eigen::Index m = rule.nodes.size();
  Eigen::VectorXcd v(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = rule.nodes(i);
    v(i) = rule.plain_weights(i) * hermite_function(n, x) *
           std::exp(-p.a1 * x * x + p.b * x);
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      acc += (v(i).real() * v(j).real() + v(i).imag() * v(j).imag()) *
             std::exp(p.a12 * rule.nodes(i) * rule.nodes(j));
  return density_norm_1d(p) * acc;
}

}  // namespace detail

/// P_n = Tr(rho |n><n|) as the position-representation double integral of
/// rho(x, x') h_n(x) h_n(x'), evaluated with two tensor Gauss-Hermite rules
/// of doubled order (64/128, escalated to 128/256 once the n-th Hermite
/// function outgrows the smaller rule's span); disagreement beyond 1e-6
/// raises QuadratureNotConverged.
inline double fock_overlap(const DensityParams1D& p, int n) {
  check_integrable(p);
  const int base = n < 32 ? 64 : 128;
  const double lo =
      detail::overlap_quadrature(p, n, detail::cached_gh_rule(base));
  const double hi =
      detail::overlap_quadrature(p, n, detail::cached_gh_rule(2 * base));
  if (std::abs(lo - hi) > 1e-6)
    throw QuadratureNotConverged("doubled-order overlap values disagree by " +
                                 std::to_string(std::abs(lo - hi)));
  return hi;
}

inline double fock_overlap(const GaussianState& s, int n) {
  return fock_overlap(params_from_state_1d(s), n);
}

/// Two-mode tomogram; X-covariances are the q-major reordered covariance
/// contracted with the per-mode frames.
inline GaussianTomogram two_mode_tomogram(const GaussianState& s) {
  if (s.n_modes != 2) throw DimensionMismatch("expected a two-mode state");
  if (!is_physical(s)) throw NonPhysicalState("tomogram of nonphysical state");
  return detail::tomogram_from_moments(s.mean, s.cov, 2);
}

/// 2x2 X-covariance of a two-mode tomogram in the given frames.
inline Eigen::Matrix2d x_covariance(const GaussianTomogram& tg, double mu1,
                                    double nu1, double mu2, double nu2) {
  if (tg.n_modes != 2) throw DimensionMismatch("expected a two-mode tomogram");
  Eigen::Matrix<double, 2, 4> k = Eigen::Matrix<double, 2, 4>::Zero();
  k(0, 0) = mu1; k(0, 1) = nu1;
  k(1, 2) = mu2; k(1, 3) = nu2;
  return k * tg.dispersion_form * k.transpose();
}

/// Joint normal density of (X1, X2).
inline double two_mode_tomogram_pdf(const GaussianTomogram& tg, double x1,
                                    double x2, double mu1, double nu1,
                                    double mu2, double nu2) {
  if ((mu1 == 0.0 && nu1 == 0.0) || (mu2 == 0.0 && nu2 == 0.0))
    throw DegenerateFrame("degenerate quadrature frame");
  const Eigen::Matrix2d cx = x_covariance(tg, mu1, nu1, mu2, nu2);
  Eigen::Vector2d d(x1 - mu1 * tg.mean_form(0) - nu1 * tg.mean_form(1),
                    x2 - mu2 * tg.mean_form(2) - nu2 * tg.mean_form(3));
  const double det = cx.determinant();
  return std::exp(-0.5 * d.dot(cx.inverse() * d)) /
         (2.0 * M_PI * std::sqrt(det));
}

/// Integrating out the other quadrature leaves the kept mode's normal
/// tomogram; for a Gaussian this is the corresponding diagonal block.
inline GaussianTomogram marginal_tomogram(const GaussianTomogram& tg,
                                          int keep_mode) {
  if (tg.n_modes != 2) throw DimensionMismatch("expected a two-mode tomogram");
  if (keep_mode < 0 || keep_mode > 1)
    throw DimensionMismatch("keep_mode must be 0 or 1");
  GaussianTomogram out;
  out.n_modes = 1;
  out.mean_form = tg.mean_form.segment(2 * keep_mode, 2);
  out.dispersion_form = tg.dispersion_form.block(2 * keep_mode, 2 * keep_mode,
                                                 2, 2);
  return out;
}

}  // namespace gaussdyn
