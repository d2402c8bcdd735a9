#pragma once

#include <cmath>

#include "gaussdyn/types.hpp"

namespace gaussdyn {

/// Gauss-Hermite rule. `plain_weights` are w_i * exp(x_i^2), assembled in log
/// space so high orders do not overflow; with them
///   integral f(x) dx ~= sum_i plain_weights_i f(x_i)
/// for integrands with Gaussian-type decay.
struct GaussHermiteRule {
  Vector nodes;
  Vector weights;        // classical weights for the exp(-x^2) measure
  Vector plain_weights;  // w_i exp(x_i^2)
};

namespace detail {

// Normalized Hermite functions h_0..h_{n} at x plus the running sum of
// h_k^2 for k < n. The recurrence is stable for every node of the rule.
struct HermiteEval {
  double hn;         // h_n(x)
  double hn_minus;   // h_{n-1}(x)
  double sum_sq;     // sum_{k<n} h_k(x)^2
};

inline HermiteEval hermite_ladder(int n, double x) {
  double h0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  HermiteEval e{h0, 0.0, 0.0};
  if (n == 0) return e;
  double h1 = std::sqrt(2.0) * x * h0;
  double sum = h0 * h0;
  for (int k = 1; k < n; ++k) {
    sum += h1 * h1;
    const double h2 =
        x * std::sqrt(2.0 / (k + 1)) * h1 - std::sqrt(k / (k + 1.0)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return {h1, h0, sum};
}

}  // namespace detail

/// Nodes from the Jacobi-matrix eigenvalues (off-diagonal sqrt(k/2)),
/// Newton-polished on the normalized Hermite function h_order; weights from
/// the Christoffel identity, whose plain form is 1 / sum_{k<order} h_k(x)^2
/// -- every factor is well scaled, so high orders neither overflow nor lose
/// the extreme nodes.
inline GaussHermiteRule gauss_hermite(int order) {
  Matrix jac = Matrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    jac(k, k - 1) = off;
    jac(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(jac, Eigen::EigenvaluesOnly);
  GaussHermiteRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = Vector(order);
  rule.plain_weights = Vector(order);
  for (int i = 0; i < order; ++i) {
    double x = rule.nodes(i);
    for (int it = 0; it < 2; ++it) {
      const auto e = detail::hermite_ladder(order, x);
      const double deriv =
          -x * e.hn + std::sqrt(2.0 * order) * e.hn_minus;
      if (deriv != 0.0) x -= e.hn / deriv;
    }
    rule.nodes(i) = x;
    const auto e = detail::hermite_ladder(order, x);
    rule.plain_weights(i) = 1.0 / e.sum_sq;
    rule.weights(i) = std::exp(-x * x) / e.sum_sq;
  }
  return rule;
}

/// integral over R of f(x) dx for f with Gaussian decay.
template <class F>
double integrate_gh(const GaussHermiteRule& rule, F&& f) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    acc += rule.plain_weights(i) * f(rule.nodes(i));
  return acc;
}

/// Tensor rule: integral over R^2 of f(x, y) dx dy.
template <class F>
double integrate_gh_2d(const GaussHermiteRule& rule, F&& f) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    for (Eigen::Index j = 0; j < rule.nodes.size(); ++j)
      acc += rule.plain_weights(i) * rule.plain_weights(j) *
             f(rule.nodes(i), rule.nodes(j));
  return acc;
}

}  // namespace gaussdyn
