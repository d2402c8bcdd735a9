#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "gaussdyn/gaussian_state.hpp"
#include "gaussdyn/hamiltonians.hpp"
#include "gaussdyn/ode.hpp"
#include "gaussdyn/types.hpp"

// Flow kernels and trajectory drivers. The matrix forms below are the single
// source of truth for all component-level coefficient patterns:
//   sigma_dot = 2i (sigma B D - D B sigma) = 2 (K + K~), K = sigma B Sigma_N
//   mean_dot  = -i D (2 B m + Delta)       = -Sigma_N (2 B m + Delta)
//   Lambda_dot = 2i Lambda D B = 2 Lambda Sigma_N B,  Gamma_dot = Lambda Sigma_N Delta
// where D = -i Sigma_N, so every right-hand side is real.

namespace gaussdyn {

/// sigma_dot = 2i(sigma B D - D B sigma); exactly symmetric as computed.
template <class DerivedS, class DerivedB>
Matrix covariance_rhs(const Eigen::MatrixBase<DerivedS>& cov,
                      const Eigen::MatrixBase<DerivedB>& b,
                      const SymplecticForm& d) {
  if (cov.rows() != b.rows() || cov.rows() != d.d.rows())
    throw DimensionMismatch("covariance_rhs dimensions disagree");
  const Matrix k = cov * b * d.real_sigma();
  return 2.0 * (k + k.transpose());
}

/// mean_dot = -i D (2 B m + Delta).
inline Vector mean_rhs(const Vector& mean, const Matrix& b, const Vector& drive,
                       const SymplecticForm& d) {
  if (mean.size() != b.rows() || mean.size() != d.d.rows() ||
      drive.size() != mean.size())
    throw DimensionMismatch("mean_rhs dimensions disagree");
  return -d.real_sigma() * (2.0 * b * mean + drive);
}

/// (Lambda_dot, Gamma_dot) = (2i Lambda D B, i Lambda D Delta).
inline std::pair<Matrix, Vector> frame_rhs(const SymplecticFrame& f,
                                           const Matrix& b, const Vector& drive,
                                           const SymplecticForm& d) {
  if (f.lambda.rows() != b.rows() || f.lambda.rows() != d.d.rows())
    throw DimensionMismatch("frame_rhs dimensions disagree");
  const Matrix sig = d.real_sigma();
  return {2.0 * f.lambda * sig * b, f.lambda * sig * drive};
}

/// Lambda^{-1} = D Lambda~ D = -Sigma_N Lambda~ Sigma_N.
inline Matrix lambda_inverse(const Matrix& lambda) {
  const Matrix sig = sigma_blocks(static_cast<int>(lambda.rows()) / 2);
  return -sig * lambda.transpose() * sig;
}

/// Max-norm of Lambda D Lambda~ - D, the symplecticity defect.
inline double symplectic_defect(const SymplecticFrame& f) {
  const Matrix sig = sigma_blocks(static_cast<int>(f.lambda.rows()) / 2);
  return (f.lambda * sig * f.lambda.transpose() - sig).cwiseAbs().maxCoeff();
}

/// Pull a state through an invariant frame:
///   sigma(t) = Lambda^{-1} sigma(0) Lambda^{-~},  m(t) = Lambda^{-1}(m(0) - Gamma).
inline GaussianState apply_frame(const GaussianState& s0,
                                 const SymplecticFrame& f) {
  if (symplectic_defect(f) > 1e-6)
    throw NonSymplecticFrame("frame fails Lambda D Lambda~ = D");
  const Matrix linv = lambda_inverse(f.lambda);
  GaussianState s;
  s.n_modes = s0.n_modes;
  s.cov = linv * s0.cov * linv.transpose();
  s.mean = linv * (s0.mean - f.gamma);
  return s;
}

namespace detail {

// Flat layout: [mean (2N) | cov (4N^2, col-major) | lambda | gamma | accum].
struct PackLayout {
  int n = 0;
  bool with_frame = false;
  Eigen::Index mean_off = 0, cov_off = 0, lam_off = 0, gam_off = 0,
               acc_off = 0, size = 0;
};

inline PackLayout make_layout(int n_modes, bool with_frame) {
  PackLayout L;
  L.n = 2 * n_modes;
  L.with_frame = with_frame;
  L.mean_off = 0;
  L.cov_off = L.n;
  L.lam_off = L.cov_off + L.n * L.n;
  L.gam_off = L.lam_off + (with_frame ? L.n * L.n : 0);
  L.acc_off = L.gam_off + (with_frame ? L.n : 0);
  L.size = L.acc_off + (with_frame ? 1 : 0);
  return L;
}

}  // namespace detail

/// Integrate the covariance/mean flow (optionally co-integrating the
/// invariant frame and the propagator's accumulated integral of
/// lam3_dot*lam6). Records det sigma and <H> per sample.
inline Trajectory evolve(const QuadraticHamiltonian& h, const GaussianState& s0,
                         const IntegratorConfig& cfg,
                         double physicality_tol = kPhysicalityTol) {
  if (!is_physical(s0, physicality_tol))
    throw NonPhysicalState("initial state violates the Robertson inequality");
  if (cfg.dt <= 0.0 || cfg.t_max <= 0.0 || cfg.sample_stride < 1 ||
      cfg.rel_tol <= 0.0 || cfg.abs_tol <= 0.0)
    throw Error("InvalidIntegratorConfig", "dt, t_max, tolerances must be > 0");

  const SymplecticForm d = symplectic_form(h.n_modes);
  const auto L = detail::make_layout(h.n_modes, cfg.with_frame);
  const int n = L.n;

  Vector y0 = Vector::Zero(L.size);
  y0.segment(L.mean_off, n) = s0.mean;
  Eigen::Map<Matrix>(y0.data() + L.cov_off, n, n) = s0.cov;
  if (cfg.with_frame)
    Eigen::Map<Matrix>(y0.data() + L.lam_off, n, n) = Matrix::Identity(n, n);

  auto rhs = [&](double t, const Vector& y) {
    const Matrix b = h.b(t);
    const Vector delta = h.drive(t);
    Vector dy = Vector::Zero(L.size);
    const auto mean = y.segment(L.mean_off, n);
    const Eigen::Map<const Matrix> cov(y.data() + L.cov_off, n, n);
    dy.segment(L.mean_off, n) = -d.real_sigma() * (2.0 * b * mean + delta);
    const Matrix k = cov * b * d.real_sigma();
    Eigen::Map<Matrix>(dy.data() + L.cov_off, n, n) = 2.0 * (k + k.transpose());
    if (cfg.with_frame) {
      const Eigen::Map<const Matrix> lam(y.data() + L.lam_off, n, n);
      const Matrix sig = d.real_sigma();
      Eigen::Map<Matrix>(dy.data() + L.lam_off, n, n) = 2.0 * lam * sig * b;
      const Vector gdot = lam * sig * delta;
      dy.segment(L.gam_off, n) = gdot;
      // d/dt of the accumulated integral of gamma1_dot * gamma2 (one mode)
      if (h.n_modes == 1) dy(L.acc_off) = gdot(0) * y(L.gam_off + 1);
    }
    return dy;
  };

  Trajectory traj;
  auto record = [&](double t, const Vector& y) {
    GaussianState s;
    s.n_modes = h.n_modes;
    s.mean = y.segment(L.mean_off, n);
    s.cov = Eigen::Map<const Matrix>(y.data() + L.cov_off, n, n);
    traj.times.push_back(t);
    traj.det_cov.push_back(s.cov.determinant());
    traj.energies.push_back(mean_energy(h, s, t));
    if (cfg.with_frame) {
      SymplecticFrame f;
      f.lambda = Eigen::Map<const Matrix>(y.data() + L.lam_off, n, n);
      f.gamma = y.segment(L.gam_off, n);
      f.t = t;
      if (cfg.strict_symplectic && symplectic_defect(f) > 1e-6)
        throw NonSymplecticFrame("symplecticity drift exceeded 1e-6 at t = " +
                                 std::to_string(t));
      traj.frames.push_back(std::move(f));
      traj.accums.push_back(y(L.acc_off));
    }
    traj.states.push_back(std::move(s));
  };

  if (cfg.method == IntegratorConfig::Method::rk4_fixed) {
    const long long n_steps = std::llround(cfg.t_max / cfg.dt);
    ode::integrate_fixed(rhs, y0, 0.0, cfg.t_max, std::max(1LL, n_steps),
                         [&](long long i, double t, const Vector& y) {
                           if (i % cfg.sample_stride == 0) record(t, y);
                         });
  } else {
    const long long n_samples =
        std::max(1LL, std::llround(cfg.t_max / (cfg.dt * cfg.sample_stride)));
    const double sample_dt = cfg.t_max / static_cast<double>(n_samples);
    Vector y = y0;
    record(0.0, y);
    for (long long i = 0; i < n_samples; ++i) {
      ode::integrate_adaptive(rhs, y, i * sample_dt, (i + 1) * sample_dt,
                              cfg.rel_tol, cfg.abs_tol);
      record((i + 1) * sample_dt, y);
    }
  }
  return traj;
}

/// Convenience driver for the invariant frame alone.
inline Trajectory evolve_frame(const QuadraticHamiltonian& h,
                               const IntegratorConfig& cfg) {
  GaussianState vac;
  vac.n_modes = h.n_modes;
  vac.mean = Vector::Zero(2 * h.n_modes);
  vac.cov = 0.5 * Matrix::Identity(2 * h.n_modes, 2 * h.n_modes);
  IntegratorConfig c = cfg;
  c.with_frame = true;
  return evolve(h, vac, c);
}

// ---------------------------------------------------------------------------
// One-mode density-parameter flow.

struct DensityParams1DRate {
  Complex a1_dot;
  double a12_dot = 0.0;
  Complex b_dot;
};

/// Nonlinear parameter flow for B = [[w1, w2], [w2, w3]], drive (d1, d2):
///   a1_dot  = i (a12^2 - 4 a1^2) w1 - 4 a1 w2 + i w3
///   a12_dot = 4 a12 (i (conj(a1) - a1) w1 - w2)      (real)
///   b_dot   = (2 a1 - a12) d1 - i d2 - 2i a12 conj(b) w1 - 2 b (w2 + 2i a1 w1)
inline DensityParams1DRate params_rhs_1d(const DensityParams1D& p, double w1,
                                         double w2, double w3, double d1,
                                         double d2) {
  const Complex i(0.0, 1.0);
  DensityParams1DRate r;
  r.a1_dot = i * (p.a12 * p.a12 - 4.0 * p.a1 * p.a1) * w1 - 4.0 * p.a1 * w2 +
             i * w3;
  r.a12_dot = 4.0 * p.a12 * (2.0 * p.a1.imag() * w1 - w2);
  r.b_dot = (2.0 * p.a1 - p.a12) * d1 - i * d2 -
            2.0 * i * p.a12 * std::conj(p.b) * w1 -
            2.0 * p.b * (w2 + 2.0 * i * p.a1 * w1);
  return r;
}

/// Closed-form parameter transport through a one-mode frame. a1 uses the
/// lam4-cancelled equivalent (substituting lam1 lam5 - lam2 lam4 = 1), which
/// stays finite at the identity frame:
///   a1(t) = [2 conj(a1) + i lam1 lam2 + 2 (a1 - conj(a1)) lam1 lam5
///            + i d lam4 lam5] / (2 den),
///   den = lam1^2 - 2i (a1 - conj(a1)) lam1 lam4 + d lam4^2,
///   d = 4|a1|^2 - a12^2.
inline DensityParams1D params_closed_form_1d(const DensityParams1D& p0,
                                             const SymplecticFrame& f) {
  if (f.lambda.rows() != 2)
    throw DimensionMismatch("one-mode frame expected");
  const double l1 = f.lambda(0, 0), l2 = f.lambda(0, 1);
  const double l4 = f.lambda(1, 0), l5 = f.lambda(1, 1);
  const double l3 = f.gamma(0), l6 = f.gamma(1);
  const Complex i(0.0, 1.0);
  const Complex a1 = p0.a1, a1c = std::conj(p0.a1);
  const double dcoef = 4.0 * std::norm(a1) - p0.a12 * p0.a12;
  const Complex den =
      l1 * l1 - 2.0 * i * (a1 - a1c) * l1 * l4 + dcoef * l4 * l4;
  if (std::abs(den) < 1e-12 * (1.0 + l1 * l1 + dcoef * l4 * l4))
    throw SingularDenominator("parameter-transport denominator vanished");
  DensityParams1D p;
  p.a1 = (2.0 * a1c + i * l1 * l2 + 2.0 * (a1 - a1c) * l1 * l5 +
          i * dcoef * l4 * l5) /
         (2.0 * den);
  p.a12 = (p0.a12 / den).real();
  p.b = (l1 * (p0.b - i * l3 + (p0.a12 - 2.0 * a1) * l6) +
         l4 * ((2.0 * a1c - p0.a12) * l3 +
               i * (2.0 * a1c * p0.b + p0.a12 * std::conj(p0.b) -
                    dcoef * l6))) /
        den;
  return p;
}

// ---------------------------------------------------------------------------
// Two-mode density-parameter flow.

struct BipartiteParamsRate {
  Complex a11_dot, a22_dot, a12_dot, a14_dot;
  double a13_dot = 0.0, a24_dot = 0.0;
};

/// The six coupled parameter ODEs for the two-mode form, with w_{jk} read
/// directly as entries of the symmetric 4x4 coefficient matrix B.
inline BipartiteParamsRate params_rhs_bipartite(const DensityParamsBipartite& p,
                                                const Matrix& b) {
  if (b.rows() != 4 || b.cols() != 4)
    throw DimensionMismatch("expected a 4x4 coefficient matrix");
  const Complex i(0.0, 1.0);
  const double w11 = b(0, 0), w12 = b(0, 1), w13 = b(0, 2), w14 = b(0, 3);
  const double w22 = b(1, 1), w23 = b(1, 2), w24 = b(1, 3);
  const double w33 = b(2, 2), w34 = b(2, 3), w44 = b(3, 3);
  const Complex a11 = p.a11, a22 = p.a22, a12 = p.a12, a14 = p.a14;
  const Complex a11c = std::conj(a11), a22c = std::conj(a22);
  const Complex a12c = std::conj(a12), a14c = std::conj(a14);
  const double a13 = p.a13, a24 = p.a24;

  BipartiteParamsRate r;
  r.a11_dot = i * w22 - 4.0 * w12 * a11 + 2.0 * w23 * a12 +
              i * w11 * (-4.0 * a11 * a11 + a13 * a13) +
              2.0 * i * w13 * (2.0 * a11 * a12 + a13 * a14) -
              i * w33 * (a12 * a12 - a14 * a14);
  r.a22_dot = i * w44 + 2.0 * w14 * a12 -
              i * w11 * (a12 * a12 - a14c * a14c) - 4.0 * w34 * a22 +
              2.0 * i * w13 * (2.0 * a12 * a22 + a14c * a24) +
              i * w33 * (-4.0 * a22 * a22 + a24 * a24);
  r.a12_dot = -2.0 * i * w24 + 4.0 * w14 * a11 - 2.0 * w12 * a12 -
              2.0 * w34 * a12 - 2.0 * i * w11 * (2.0 * a11 * a12 + a13 * a14c) +
              4.0 * w23 * a22 +
              2.0 * i * w13 *
                  (a12 * a12 - a14 * a14c + 4.0 * a11 * a22 - a13 * a24) -
              2.0 * i * w33 * (2.0 * a12 * a22 + a14 * a24);
  const Complex a13_dot =
      -4.0 * w12 * a13 - 4.0 * i * w11 * (a11 - a11c) * a13 -
      2.0 * w23 * (a14 + a14c) +
      2.0 * i * w13 *
          ((a12 - a12c) * a13 + 2.0 * a11c * a14 - 2.0 * a11 * a14c) +
      2.0 * i * w33 * (-a12c * a14 + a12 * a14c);
  r.a13_dot = a13_dot.real();
  r.a14_dot = -2.0 * w14 * a13 - 2.0 * w12 * a14 - 2.0 * w34 * a14 -
              2.0 * i * w11 * (a12c * a13 + 2.0 * a11 * a14) - 2.0 * w23 * a24 +
              2.0 * i * w13 *
                  ((a12 - a12c) * a14 + 2.0 * a13 * a22c - 2.0 * a11 * a24) +
              2.0 * i * w33 * (2.0 * a14 * a22c + a12 * a24);
  const Complex a24_dot =
      -2.0 * w14 * (a14 + a14c) + 2.0 * i * w11 * (a12 * a14 - a12c * a14c) -
      4.0 * w34 * a24 + 4.0 * i * w33 * (-a22 + a22c) * a24 +
      2.0 * i * w13 *
          (-2.0 * a14 * a22 + 2.0 * a14c * a22c + (a12 - a12c) * a24);
  r.a24_dot = a24_dot.real();
  return r;
}

/// Fixed-step RK4 drive of the one-mode parameter flow; returns the sequence
/// of parameter records at the sample times of `cfg`.
inline std::vector<DensityParams1D> evolve_params_1d(
    const QuadraticHamiltonian& h, const DensityParams1D& p0,
    const IntegratorConfig& cfg) {
  check_integrable(p0);
  auto rhs = [&](double t, const Vector& y) {
    DensityParams1D p{Complex(y(0), y(1)), y(2), Complex(y(3), y(4))};
    const Matrix b = h.b(t);
    const Vector d = h.drive(t);
    const auto r = params_rhs_1d(p, b(0, 0), b(0, 1), b(1, 1), d(0), d(1));
    Vector dy(5);
    dy << r.a1_dot.real(), r.a1_dot.imag(), r.a12_dot, r.b_dot.real(),
        r.b_dot.imag();
    return dy;
  };
  Vector y0(5);
  y0 << p0.a1.real(), p0.a1.imag(), p0.a12, p0.b.real(), p0.b.imag();
  std::vector<DensityParams1D> out;
  const long long n_steps = std::llround(cfg.t_max / cfg.dt);
  ode::integrate_fixed(rhs, y0, 0.0, cfg.t_max, std::max(1LL, n_steps),
                       [&](long long i, double, const Vector& y) {
                         if (i % cfg.sample_stride == 0)
                           out.push_back({Complex(y(0), y(1)), y(2),
                                          Complex(y(3), y(4))});
                       });
  return out;
}

/// Same driver for the two-mode parameter flow.
inline std::vector<DensityParamsBipartite> evolve_params_bipartite(
    const QuadraticHamiltonian& h, const DensityParamsBipartite& p0,
    const IntegratorConfig& cfg) {
  auto pack = [](const DensityParamsBipartite& p) {
    Vector y(10);
    y << p.a11.real(), p.a11.imag(), p.a22.real(), p.a22.imag(), p.a12.real(),
        p.a12.imag(), p.a14.real(), p.a14.imag(), p.a13, p.a24;
    return y;
  };
  auto unpack = [](const Vector& y) {
    return DensityParamsBipartite{Complex(y(0), y(1)), Complex(y(2), y(3)),
                                  Complex(y(4), y(5)), Complex(y(6), y(7)),
                                  y(8), y(9)};
  };
  auto rhs = [&](double t, const Vector& y) {
    const auto r = params_rhs_bipartite(unpack(y), h.b(t));
    Vector dy(10);
    dy << r.a11_dot.real(), r.a11_dot.imag(), r.a22_dot.real(),
        r.a22_dot.imag(), r.a12_dot.real(), r.a12_dot.imag(), r.a14_dot.real(),
        r.a14_dot.imag(), r.a13_dot, r.a24_dot;
    return dy;
  };
  std::vector<DensityParamsBipartite> out;
  const long long n_steps = std::llround(cfg.t_max / cfg.dt);
  ode::integrate_fixed(rhs, pack(p0), 0.0, cfg.t_max, std::max(1LL, n_steps),
                       [&](long long i, double, const Vector& y) {
                         if (i % cfg.sample_stride == 0)
                           out.push_back(unpack(y));
                       });
  return out;
}

// ---------------------------------------------------------------------------
// One-mode Gaussian propagator.

/// G(x, x', t) built from the frame entries; `accum` is the co-integrated
/// integral of lam3_dot*lam6 up to the frame time. The square-root branch is
/// the principal one, which makes G approach the identity kernel as t -> 0+.
inline Complex propagator_1d(const SymplecticFrame& f, double accum, double x,
                             double xp) {
  if (f.lambda.rows() != 2)
    throw DimensionMismatch("one-mode frame expected");
  const double l1 = f.lambda(0, 0), l4 = f.lambda(1, 0), l5 = f.lambda(1, 1);
  const double l3 = f.gamma(0), l6 = f.gamma(1);
  if (std::abs(l4) < 1e-12)
    throw CausticSingularity("propagator degenerates as lam4 -> 0");
  const Complex i(0.0, 1.0);
  const Complex pref =
      1.0 / std::sqrt(Complex(0.0, -2.0 * M_PI * l4));
  const double bracket = l5 * x * x - 2.0 * x * xp + l1 * xp * xp +
                         2.0 * x * l6 + 2.0 * xp * (l3 * l4 - l1 * l6) +
                         l1 * l6 * l6 - 2.0 * l4 * accum;
  return pref * std::exp(-i / (2.0 * l4) * bracket);
}

}  // namespace gaussdyn
