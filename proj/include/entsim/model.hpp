#pragma once

#include <functional>

#include "entsim/fock.hpp"

namespace entsim {

/// Two anharmonic oscillators, one per side.
struct OneOneParams {
  double gamma_a = 1.0;
  double gamma_b = 0.6456;
  double delta_offset = 1.2;
  double hbar = 0.01;
  double delta = 0.04;
};

enum class CouplingCase { case_i, case_ii };

/// Four modes: (0,1) -> side A, (2,3) -> side B.
struct TwoTwoParams {
  double gamma_1 = 1.0;
  double gamma_2 = 0.64;
  double delta_offset = 1.2;
  double hbar = 0.1;
  double delta = 0.04;
  CouplingCase coupling_case = CouplingCase::case_i;
};

using ClassicalFn = std::function<double(std::span<const double> j)>;
using ClassicalAngleFn =
    std::function<double(std::span<const double> j, std::span<const double> theta)>;

/// Quantum operators plus the matching classical (action-angle) functions.
struct ModelSpec {
  SpaceConfig space;
  int d_a_modes = 1;
  int d_b_modes = 1;
  SparseOperator h0;  // diagonal in the Fock basis
  SparseOperator v;
  double delta = 0.0;
  double hbar = 1.0;
  ClassicalAngleFn classical_coupling;  // v(j, theta)
  ClassicalFn classical_h0;             // h0(j)
};

ModelSpec build_1x1(const OneOneParams& p, const SpaceConfig& space);
ModelSpec build_2x2(const TwoTwoParams& p, const SpaceConfig& space);

/// H0 + delta * V
SparseOperator total_h(const ModelSpec& m);

/// h0(j) + delta * v(j, theta); actions must be nonnegative.
double classical_hamiltonian(const ModelSpec& m, std::span<const double> j,
                             std::span<const double> theta);

/// (a+ + a)^2 on a single mode; diagonal part is 2n+1.
SparseOperator quadrature_sq_op(int dim);

}  // namespace entsim
