#pragma once

#include <cmath>
#include <vector>

#include "gaussdyn/evolution.hpp"
#include "gaussdyn/gaussian_state.hpp"
#include "gaussdyn/hamiltonians.hpp"
#include "gaussdyn/types.hpp"

// The linear covariance-flow matrix M over the vectorized independent
// covariances (v_dot = M v), its null space, invariant-state construction,
// and the quasi-invariance diagnostic.

namespace gaussdyn {

/// Vector layouts:
///   one mode : v = (s_pp, s_pq, s_qq)
///   two modes: v = (s_p1p1, s_p1q1, s_p1p2, s_p1q2, s_q1q1,
///                   s_q1p2, s_q1q2, s_p2p2, s_p2q2, s_q2q2)
/// i.e. the upper triangle of sigma in row-major order.
struct FlowMatrix {
  Matrix m;
  double t = 0.0;
  int n_modes = 1;
};

inline Vector vectorize_cov(const Matrix& cov) {
  const int n = static_cast<int>(cov.rows());
  Vector v(n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v(k++) = cov(i, j);
  return v;
}

inline Matrix unvectorize_cov(const Vector& v, int n_modes) {
  const int n = 2 * n_modes;
  Matrix cov(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      cov(i, j) = v(k);
      cov(j, i) = v(k);
      ++k;
    }
  return cov;
}

/// One-mode flow matrix for B = [[w1, w2], [w2, w3]]:
///   [[-4 w2, -4 w3, 0], [2 w1, 0, -2 w3], [0, 4 w1, 4 w2]].
inline FlowMatrix build_flow_matrix_1d(double w1, double w2, double w3,
                                       double t = 0.0) {
  FlowMatrix f;
  f.n_modes = 1;
  f.t = t;
  f.m = Matrix(3, 3);
  f.m << -4.0 * w2, -4.0 * w3, 0.0,
      2.0 * w1, 0.0, -2.0 * w3,
      0.0, 4.0 * w1, 4.0 * w2;
  return f;
}

/// Two-mode flow matrix from a symmetric 4x4 coefficient matrix; exactly the
/// linearization of 2i(sigma B D - D B sigma) in the layout above.
inline FlowMatrix build_flow_matrix_2mode(const Matrix& b, double t = 0.0) {
  if (b.rows() != 4 || b.cols() != 4)
    throw DimensionMismatch("expected a 4x4 coefficient matrix");
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw NonSymmetricB("coefficient matrix must be symmetric");
  const double w11 = b(0, 0), w12 = b(0, 1), w13 = b(0, 2), w14 = b(0, 3);
  const double w22 = b(1, 1), w23 = b(1, 2), w24 = b(1, 3);
  const double w33 = b(2, 2), w34 = b(2, 3), w44 = b(3, 3);
  FlowMatrix f;
  f.n_modes = 2;
  f.t = t;
  f.m = Matrix(10, 10);
  f.m << -4*w12, -4*w22, -4*w23, -4*w24, 0, 0, 0, 0, 0, 0,
      2*w11, 0, 2*w13, 2*w14, -2*w22, -2*w23, -2*w24, 0, 0, 0,
      -2*w14, -2*w24, -2*(w12 + w34), -2*w44, 0, -2*w22, 0, -2*w23, -2*w24, 0,
      2*w13, 2*w23, 2*w33, 2*(w34 - w12), 0, 0, -2*w22, 0, -2*w23, -2*w24,
      0, 4*w11, 0, 0, 4*w12, 4*w13, 4*w14, 0, 0, 0,
      0, -2*w14, 2*w11, 0, -2*w24, 2*(w12 - w34), -2*w44, 2*w13, 2*w14, 0,
      0, 2*w13, 0, 2*w11, 2*w23, 2*w33, 2*(w12 + w34), 0, 2*w13, 2*w14,
      0, 0, -4*w14, 0, 0, -4*w24, 0, -4*w34, -4*w44, 0,
      0, 0, 2*w13, -2*w14, 0, 2*w23, -2*w24, 2*w33, 0, -2*w44,
      0, 0, 0, 4*w13, 0, 0, 4*w23, 0, 4*w33, 4*w34;
  return f;
}

struct NullSpaceResult {
  Matrix basis;  // orthonormal columns spanning ker(M)
  int rank = 0;
  Vector singular_values;
};

/// SVD null space; singular values below tol * s_max count as zero.
inline NullSpaceResult null_space(const FlowMatrix& f, double tol = 1e-10) {
  if (tol <= 0.0) throw Error("InvalidTolerance", "null-space tol must be > 0");
  Eigen::JacobiSVD<Matrix> svd(f.m, Eigen::ComputeFullV);
  NullSpaceResult r;
  r.singular_values = svd.singularValues();
  const double smax = r.singular_values.size() ? r.singular_values(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i)
    if (r.singular_values(i) > tol * smax) ++rank;
  r.rank = rank;
  const Eigen::Index n = f.m.cols();
  r.basis = svd.matrixV().rightCols(n - rank);
  return r;
}

namespace detail {

// Indices of the cross-covariance slots (everything except the per-mode
// variances) in the 10-vector layout.
inline std::vector<int> cross_slots_2mode() { return {1, 2, 3, 5, 6, 8}; }

inline Vector sign_canonical(Vector v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
  return v;
}

}  // namespace detail

/// Deterministic representatives of a <=2-dimensional null space. A pair of
/// basis vectors is rotated so the first has minimal weight on the
/// cross-covariance slots (the variance-supported stationary direction when
/// one exists) and the second is its orthogonal complement. Signs are fixed
/// by making the largest-magnitude entry positive.
inline std::vector<Vector> canonical_null_directions(const NullSpaceResult& ns,
                                                     int n_modes) {
  std::vector<Vector> dirs;
  const Eigen::Index k = ns.basis.cols();
  if (k == 0) return dirs;
  if (k == 1 || n_modes != 2 || ns.basis.rows() != 10) {
    for (Eigen::Index j = 0; j < k; ++j)
      dirs.push_back(detail::sign_canonical(ns.basis.col(j)));
    return dirs;
  }
  if (k == 2) {
    Matrix pb(6, 2);
    const auto slots = detail::cross_slots_2mode();
    for (int r = 0; r < 6; ++r) pb.row(r) = ns.basis.row(slots[r]);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(pb.transpose() * pb);
    const Eigen::Vector2d u = es.eigenvectors().col(0);  // min cross weight
    dirs.push_back(detail::sign_canonical(ns.basis * u));
    dirs.push_back(detail::sign_canonical(
        ns.basis * Eigen::Vector2d(-u(1), u(0))));
    return dirs;
  }
  for (Eigen::Index j = 0; j < k; ++j)
    dirs.push_back(detail::sign_canonical(ns.basis.col(j)));
  return dirs;
}

/// Whether some positive multiple of the covariance read off `direction`
/// (under either sign orientation) satisfies the Robertson inequalities:
/// needs positive semidefiniteness with strictly positive per-mode
/// determinants, which scaling then lifts over the 1/4 and 1/16 thresholds.
inline bool physical_after_scaling(const Vector& direction, int n_modes,
                                   double rel_tol = 1e-9) {
  const double scale = direction.cwiseAbs().maxCoeff();
  if (scale == 0.0) return false;
  for (const double orient : {1.0, -1.0}) {
    const Matrix cov = unvectorize_cov(orient * direction / scale, n_modes);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -rel_tol) continue;
    bool ok = true;
    for (int m = 0; m < n_modes && ok; ++m) {
      const double det_m = cov(2 * m, 2 * m) * cov(2 * m + 1, 2 * m + 1) -
                           cov(2 * m, 2 * m + 1) * cov(2 * m, 2 * m + 1);
      ok = det_m > rel_tol;
    }
    if (!ok) continue;
    if (n_modes == 2 && cov.determinant() <= rel_tol) continue;
    return true;
  }
  return false;
}

/// Smallest positive scale that lifts `cov` over the Robertson thresholds.
inline double physical_scale(const Matrix& cov) {
  const int n_modes = static_cast<int>(cov.rows()) / 2;
  double s = 0.0;
  for (int m = 0; m < n_modes; ++m) {
    const double det_m = cov(2 * m, 2 * m) * cov(2 * m + 1, 2 * m + 1) -
                         cov(2 * m, 2 * m + 1) * cov(2 * m, 2 * m + 1);
    if (det_m <= 0.0) throw UnphysicalC("direction is not scalable");
    s = std::max(s, std::sqrt(0.25 / det_m));
  }
  if (n_modes == 2) {
    const double det = cov.determinant();
    if (det <= 0.0) throw UnphysicalC("direction is not scalable");
    s = std::max(s, std::pow(1.0 / (16.0 * det), 0.25));
  }
  return s;
}

struct InvariantState1D {
  GaussianState state;
  DensityParams1D params;
};

/// Stationary one-mode state sigma = C [[w3/w1, -w2/w1], [-w2/w1, 1]] with
/// its parameter form; requires det sigma = C^2 (w3/w1 - (w2/w1)^2) > 1/4.
inline InvariantState1D invariant_state_1d(double c, double w1, double w2,
                                           double w3) {
  if (w1 == 0.0) throw ZeroOmega1("w1 must be nonzero");
  if (c <= 0.0) throw UnphysicalC("scale C must be positive");
  const double det = c * c * (w3 / w1 - (w2 / w1) * (w2 / w1));
  if (!(det > 0.25))
    throw UnphysicalC("C^2 (w3/w1 - w2^2/w1^2) must exceed 1/4");
  InvariantState1D out;
  out.state.n_modes = 1;
  out.state.mean = Vector::Zero(2);
  out.state.cov = Matrix(2, 2);
  out.state.cov << c * w3 / w1, -c * w2 / w1, -c * w2 / w1, c;
  const Complex i(0.0, 1.0);
  const Complex top = 4.0 * c * c * w1 * w3 +
                      (w1 + 2.0 * i * c * w2) * (w1 + 2.0 * i * c * w2);
  out.params.a1 = top / (8.0 * c * w1 * w1);
  out.params.a12 = (4.0 * det - 1.0) / (4.0 * c);
  out.params.b = Complex(0.0, 0.0);
  return out;
}

struct InvariantStateBipartite {
  GaussianState state;
  DensityParamsBipartite params;
};

/// sigma = C diag(w1 w2, w2/w1, w2^2, 1) as a dense matrix.
inline Matrix converter_invariant_cov(double c, double w1, double w2) {
  Vector d(4);
  d << c * w1 * w2, c * w2 / w1, c * w2 * w2, c;
  return d.asDiagonal();
}

/// Stationary frequency-converter state
/// sigma = C diag(w1 w2, w2/w1, w2^2, 1); stationary under the converter flow
/// for every pump frequency and coupling. Physical iff C w2 >= 1/2.
inline InvariantStateBipartite invariant_state_frequency_converter(double c,
                                                                   double w1,
                                                                   double w2) {
  if (w1 <= 0.0 || w2 <= 0.0)
    throw NonPositiveFrequency("mode frequencies must be positive");
  if (!(c * w2 >= 0.5 - kPhysicalityTol))
    throw UnphysicalC("need C w2 >= 1/2 for the Robertson bound");
  InvariantStateBipartite out;
  out.state.n_modes = 2;
  out.state.mean = Vector::Zero(4);
  out.state.cov = converter_invariant_cov(c, w1, w2);
  out.params.a11 = Complex(0.5 * (w1 / (4.0 * c * w2) + c * w1 * w2), 0.0);
  out.params.a22 = Complex(0.5 * (1.0 / (4.0 * c) + c * w2 * w2), 0.0);
  out.params.a12 = Complex(0.0, 0.0);
  out.params.a14 = Complex(0.0, 0.0);
  out.params.a13 = c * w1 * w2 - w1 / (4.0 * c * w2);
  out.params.a24 = c * w2 * w2 - 1.0 / (4.0 * c);
  return out;
}

/// Per-sample quasi-invariance score ||sigma_dot||_F / max(eps, |dE/dt|) with
/// the energy rate from centered finite differences on the sampled series
/// (one-sided at the ends). Small values mean the covariances drift slowly
/// relative to the mean energy.
inline std::vector<double> quasi_invariance_score(
    const Trajectory& traj, const QuadraticHamiltonian& h, double eps = 1e-12) {
  const std::size_t n = traj.times.size();
  if (n < 2 || traj.energies.size() != n)
    throw DimensionMismatch("trajectory must carry an energy series");
  const SymplecticForm d = symplectic_form(h.n_modes);
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    double de;
    if (i == 0)
      de = (traj.energies[1] - traj.energies[0]) /
           (traj.times[1] - traj.times[0]);
    else if (i + 1 == n)
      de = (traj.energies[n - 1] - traj.energies[n - 2]) /
           (traj.times[n - 1] - traj.times[n - 2]);
    else
      de = (traj.energies[i + 1] - traj.energies[i - 1]) /
           (traj.times[i + 1] - traj.times[i - 1]);
    const Matrix rate =
        covariance_rhs(traj.states[i].cov, h.b(traj.times[i]), d);
    score[i] = rate.norm() / std::max(eps, std::abs(de));
  }
  return score;
}

}  // namespace gaussdyn
