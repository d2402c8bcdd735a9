#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "gaussdyn/types.hpp"

// Model builders. Each returns a QuadraticHamiltonian whose B(t) is symmetric
// by construction (both off-diagonal slots are assigned from one expression).

namespace gaussdyn {

using TimeFn = std::function<double(double)>;

/// Generic one-mode Hamiltonian with B(t) = [[w1, w2], [w2, w3]] and
/// drive (d1, d2).
inline QuadraticHamiltonian build_generic_1d(TimeFn w1, TimeFn w2, TimeFn w3,
                                             TimeFn d1, TimeFn d2) {
  QuadraticHamiltonian h;
  h.n_modes = 1;
  h.b = [w1 = std::move(w1), w2 = std::move(w2),
         w3 = std::move(w3)](double t) {
    Matrix b(2, 2);
    const double off = w2(t);
    b << w1(t), off, off, w3(t);
    return b;
  };
  h.drive = [d1 = std::move(d1), d2 = std::move(d2)](double t) {
    Vector d(2);
    d << d1(t), d2(t);
    return d;
  };
  return h;
}

/// H = (p^2 + omega^2 q^2)/2 + nu (pq + qp)/2, i.e. constant
/// B = [[1, nu], [nu, omega^2]]/2.
inline QuadraticHamiltonian build_coupled_oscillator(double omega, double nu) {
  QuadraticHamiltonian h;
  h.n_modes = 1;
  Matrix b(2, 2);
  b << 0.5, 0.5 * nu, 0.5 * nu, 0.5 * omega * omega;
  h.b = [b](double) { return b; };
  h.drive = [](double) { return Vector::Zero(2); };
  return h;
}

namespace detail {

// Shared two-mode beam-coupling layout; the converter and the amplifier
// differ only in the sign pattern of the mode-1 coupling row.
inline QuadraticHamiltonian build_two_mode_coupler(double omega1,
                                                   double omega2, double omega,
                                                   double kappa,
                                                   double mode1_sign) {
  if (omega1 <= 0.0 || omega2 <= 0.0)
    throw NonPositiveFrequency("mode frequencies must be positive");
  QuadraticHamiltonian h;
  h.n_modes = 2;
  h.b = [=](double t) {
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    const double root = std::sqrt(omega1 * omega2);
    Matrix b = Matrix::Zero(4, 4);
    b(0, 0) = 1.0;
    b(1, 1) = omega1 * omega1;
    b(2, 2) = 1.0;
    b(3, 3) = omega2 * omega2;
    const double b13 = mode1_sign * kappa * c / root;
    const double b14 = kappa * std::sqrt(omega2 / omega1) * s;
    const double b23 = mode1_sign * kappa * std::sqrt(omega1 / omega2) * s;
    const double b24 = -kappa * root * c;
    b(0, 2) = b13; b(2, 0) = b13;
    b(0, 3) = b14; b(3, 0) = b14;
    b(1, 2) = b23; b(2, 1) = b23;
    b(1, 3) = b24; b(3, 1) = b24;
    return Matrix(0.5 * b);
  };
  h.drive = [](double) { return Vector::Zero(4); };
  return h;
}

}  // namespace detail

/// Two beams exchanging quanta through a classical pump of frequency `omega`
/// and strength `kappa` (beam-splitter-type coupling).
inline QuadraticHamiltonian build_frequency_converter(double omega1,
                                                      double omega2,
                                                      double omega,
                                                      double kappa) {
  return detail::build_two_mode_coupler(omega1, omega2, omega, kappa, -1.0);
}

/// Nondegenerate parametric amplifier: pair creation/annihilation coupling;
/// flips the sign of the p1p2 and q1p2 entries relative to the converter.
inline QuadraticHamiltonian build_parametric_amplifier(double omega1,
                                                       double omega2,
                                                       double omega,
                                                       double kappa) {
  return detail::build_two_mode_coupler(omega1, omega2, omega, kappa, 1.0);
}

/// Commutator matrix D_{jk} = [r_j, r_k]: per-mode blocks -i*Sigma.
inline SymplecticForm symplectic_form(int n_modes) {
  SymplecticForm d;
  d.n_modes = n_modes;
  d.d = Complex(0.0, -1.0) * sigma_blocks(n_modes).cast<Complex>();
  return d;
}

/// Symmetrized-ordering expectation <H>(t) = tr(B sigma) + m~ B m + Delta~ m.
inline double mean_energy(const QuadraticHamiltonian& h, const GaussianState& s,
                          double t) {
  if (s.n_modes != h.n_modes)
    throw DimensionMismatch("state and Hamiltonian mode counts differ");
  const Matrix b = h.b(t);
  const Vector delta = h.drive(t);
  return (b * s.cov).trace() + s.mean.dot(b * s.mean) + delta.dot(s.mean);
}

}  // namespace gaussdyn
