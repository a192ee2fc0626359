#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "entsim/model.hpp"

namespace entsim {

/// Classical coupling v(j, theta), 2pi-periodic in each angle.
struct ClassicalCoupling {
  ClassicalAngleFn evaluate;
  int d_a = 1;
  int d_b = 1;

  int dof() const { return d_a + d_b; }
};

/// Gaussian packet in action space: center j_star, positive-definite
/// squeezing matrices per side. Coherent states have Lambda = 1/(2 j*).
struct PacketSpec {
  Eigen::VectorXd j_star;    // size d_a + d_b
  Eigen::MatrixXd lambda_a;  // d_a x d_a
  Eigen::MatrixXd lambda_b;  // d_b x d_b

  int d_a() const { return static_cast<int>(lambda_a.rows()); }
  int d_b() const { return static_cast<int>(lambda_b.rows()); }

  /// Product of coherent packets, all with the same action center.
  static PacketSpec coherent(double j_star, int d_a, int d_b);
};

/// The classical, hbar-independent matrix governing purity decay:
/// lambda_a^-1 * W * lambda_b^-1 * W^T with W the mixed action Hessian of
/// the averaged coupling. Its rank sets the asymptotic power law.
struct DecayMatrix {
  Eigen::MatrixXd matrix;       // d_a x d_a
  Eigen::VectorXd eigenvalues;  // real, nonnegative up to rounding
  int rank = 0;
  double trace = 0.0;
};

/// Average of v over the angle torus at fixed actions, on a uniform
/// tensor-product grid. Exact for trigonometric polynomials of degree
/// < quad_points_per_angle; equals the time average on nonresonant tori.
double torus_average(const ClassicalCoupling& v, std::span<const double> j,
                     int quad_points_per_angle);

/// Averaged coupling as a function of actions alone.
ClassicalFn averaged_coupling(const ClassicalCoupling& v, int quad_points_per_angle);

/// Mixed second derivatives d^2 vbar / d j_Ak d j_Bl by central differences.
/// If richardson_rel_change is given, it receives the relative change under
/// step halving (a smoothness guard; should be tiny for polynomial vbar).
Eigen::MatrixXd mixed_hessian(const ClassicalFn& vbar, std::span<const double> j_star,
                              int d_a, int d_b, double fd_step,
                              double* richardson_rel_change = nullptr);

/// Default finite-difference step for mixed_hessian.
double default_fd_step(std::span<const double> j_star);

DecayMatrix decay_matrix(const PacketSpec& packet, const Eigen::MatrixXd& hess);

/// 1 / sqrt(det(1 + (delta t)^2 u))
double purity_prediction(const DecayMatrix& u, double delta, double t);

/// 1 - (delta t)^2 tr(u) / 2
double linear_response(const DecayMatrix& u, double delta, double t);

/// Numerical rank of u = asymptotic power-law exponent of the decay.
int asymptotic_exponent(const DecayMatrix& u);

/// Largest time with delta * t * ||W||_2 < 1/hbar; +inf for zero Hessian.
double validity_window(double hess_spectral_norm, double delta, double hbar);

double spectral_norm(const Eigen::MatrixXd& m);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
};

/// Monte-Carlo evaluation of the purity as a phase-space integral: sample
/// actions (j, jt) from the product Gaussian packet densities and average
/// cos((delta t / hbar) * Phi) with the four-point phase
/// Phi = vbar(jA,jB) - vbar(jtA,jB) + vbar(jtA,jtB) - vbar(jA,jtB).
/// Independent check of the stationary-phase determinant formula.
McEstimate phase_space_purity_mc(const ClassicalFn& vbar, const PacketSpec& packet,
                                 double hbar, double delta, double t, long n_samples,
                                 std::uint64_t seed);

}  // namespace entsim
