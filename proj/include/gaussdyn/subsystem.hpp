#pragma once

#include <cmath>
#include <vector>

#include "gaussdyn/gaussian_state.hpp"
#include "gaussdyn/types.hpp"

// Block decomposition of the two-mode covariance flow into per-subsystem
// unitary parts and the correlation-driven (nonunitary) remainders, plus the
// entanglement diagnostics used on trajectories.

namespace gaussdyn {

struct BipartiteBlocks {
  Eigen::Matrix2d s1, s2, s12;
  Eigen::Matrix2d b1, b2, b12;
};

/// 2x2 block extraction in (p1, q1 | p2, q2) ordering.
inline BipartiteBlocks decompose(const Matrix& cov, const Matrix& b) {
  if (cov.rows() != 4 || cov.cols() != 4 || b.rows() != 4 || b.cols() != 4)
    throw DimensionMismatch("decompose expects 4x4 matrices");
  BipartiteBlocks blocks;
  blocks.s1 = cov.topLeftCorner<2, 2>();
  blocks.s12 = cov.topRightCorner<2, 2>();
  blocks.s2 = cov.bottomRightCorner<2, 2>();
  blocks.b1 = b.topLeftCorner<2, 2>();
  blocks.b12 = b.topRightCorner<2, 2>();
  blocks.b2 = b.bottomRightCorner<2, 2>();
  return blocks;
}

struct SubsystemRates {
  Eigen::Matrix2d s1_dot, s2_dot, s12_dot;
  Eigen::Matrix2d unitary1, nonunitary1;
  Eigen::Matrix2d unitary2, nonunitary2;
};

/// Block form of the covariance flow. The sigma12-bearing remainders are the
/// nonunitary parts; unitary + nonunitary reassembles the total rate exactly.
inline SubsystemRates subsystem_rates(const BipartiteBlocks& bl) {
  const Eigen::Matrix2d sig = sigma_unit();
  SubsystemRates r;
  r.unitary1 = 2.0 * (bl.s1 * bl.b1 * sig - sig * bl.b1 * bl.s1);
  r.nonunitary1 = 2.0 * (bl.s12 * bl.b12.transpose() * sig -
                         sig * bl.b12 * bl.s12.transpose());
  r.s1_dot = r.unitary1 + r.nonunitary1;
  r.unitary2 = 2.0 * (bl.s2 * bl.b2 * sig - sig * bl.b2 * bl.s2);
  r.nonunitary2 = 2.0 * (bl.s12.transpose() * bl.b12 * sig -
                         sig * bl.b12.transpose() * bl.s12);
  r.s2_dot = r.unitary2 + r.nonunitary2;
  r.s12_dot = 2.0 * ((bl.s1 * bl.b12 + bl.s12 * bl.b2) * sig -
                     sig * (bl.b1 * bl.s12 + bl.b12 * bl.s2));
  return r;
}

struct SubsystemPuritySeries {
  std::vector<double> purity1, purity2, det_s1, det_s2;
};

/// Per-sample subsystem purities 1/(2 sqrt(det sigma_j)) along a two-mode
/// trajectory.
inline SubsystemPuritySeries subsystem_purities(const Trajectory& traj) {
  SubsystemPuritySeries out;
  for (const auto& s : traj.states) {
    if (s.n_modes != 2)
      throw DimensionMismatch("subsystem_purities expects a two-mode run");
    const double d1 = s.cov.topLeftCorner<2, 2>().determinant();
    const double d2 = s.cov.bottomRightCorner<2, 2>().determinant();
    if (d1 <= 0.0 || d2 <= 0.0)
      throw NonPhysicalState("subsystem covariance lost positivity");
    out.det_s1.push_back(d1);
    out.det_s2.push_back(d2);
    out.purity1.push_back(1.0 / (2.0 * std::sqrt(d1)));
    out.purity2.push_back(1.0 / (2.0 * std::sqrt(d2)));
  }
  return out;
}

/// E_N = max(0, -ln(2 nu_minus)) where nu_minus is the smallest symplectic
/// eigenvalue of the partially transposed covariance (p2 -> -p2). Standard
/// construction for Gaussian states (the quantity itself, not its formula,
/// is what the trajectory diagnostics track).
inline double log_negativity(const Matrix& cov,
                             double tol = kPhysicalityTol) {
  GaussianState s;
  s.n_modes = 2;
  s.mean = Vector::Zero(4);
  s.cov = cov;
  if (!is_physical(s, tol))
    throw NonPhysicalState("log_negativity requires a physical state");
  Matrix t = Matrix::Identity(4, 4);
  t(2, 2) = -1.0;  // momentum flip on mode 2
  const Matrix pt = t * cov * t;
  // Symplectic spectrum: eigenvalues of Sigma_N * pt come in +-(i nu) pairs.
  Eigen::EigenSolver<Matrix> es(sigma_blocks(2) * pt, false);
  double nu_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k)
    nu_min = std::min(nu_min, std::abs(es.eigenvalues()(k).imag()));
  return std::max(0.0, -std::log(2.0 * nu_min));
}

}  // namespace gaussdyn
