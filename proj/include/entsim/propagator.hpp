#pragma once

#include "entsim/fock.hpp"
#include "entsim/model.hpp"

namespace entsim {

enum class PropMethod { krylov, chebyshev };

struct PropagationConfig {
  PropMethod method = PropMethod::krylov;
  double step_dt = 0.5;                  // max internal step
  int krylov_dim = 30;
  double target_error_per_step = 1e-10;
  bool renormalize_each_step = true;
  int apply_threads = 1;                 // matvec row-parallelism
};

/// Strictly increasing, nonnegative sample times.
struct TimeGrid {
  std::vector<double> sample_times;

  explicit TimeGrid(std::vector<double> times);
  static TimeGrid linear(double t0, double t1, int n);
  static TimeGrid log_spaced(double t0, double t1, int n);  // t0 > 0
};

struct EvolveStats {
  double max_norm_drift = 0.0;  // per internal step, before renormalization
  long steps = 0;
  long matvecs = 0;
};

/// psi(t_k) = exp(-i H t_k / hbar) psi0 on the sample grid. H must be
/// hermitian; diagonal H is evolved by exact phase multiplication.
std::vector<StateVector> evolve(const SparseOperator& h, const StateVector& psi0,
                                const TimeGrid& grid, const PropagationConfig& cfg,
                                double hbar, EvolveStats* stats = nullptr);

struct DegeneracyReport {
  struct WeightedPair {
    long i = 0, j = 0;
    double weight = 0.0;
  };
  // degenerate level pairs connected by V and carrying initial weight
  std::vector<WeightedPair> weighted_pairs;
  bool off_diagonal = false;  // averaged coupling has entries off the diagonal
};

/// Infinite-time average of V in the eigenbasis of a diagonal H0: entries of
/// V between equal H0 levels survive (the diagonal part when H0 is
/// nondegenerate, block-diagonal projection otherwise).
SparseOperator diagonal_average(const SparseOperator& v, const SparseOperator& h0,
                                const StateVector* initial = nullptr,
                                DegeneracyReport* report = nullptr,
                                double gap_tol_rel = 1e-9, double weight_tol = 1e-8);

/// Evolution under the effective echo Hamiltonian delta * Vbar.
std::vector<StateVector> echo_evolve(const ModelSpec& m, const StateVector& psi0,
                                     const TimeGrid& grid, const PropagationConfig& cfg,
                                     DegeneracyReport* report = nullptr);

}  // namespace entsim
