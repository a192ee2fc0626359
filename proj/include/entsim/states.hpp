#pragma once

#include "entsim/fock.hpp"

namespace entsim {

/// Raised when a requested Fock truncation cannot hold the state's tail.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int suggested_dim)
      : std::runtime_error(what), suggested_dim(suggested_dim) {}
  int suggested_dim;
};

/// Coherent packet centered at classical action j_star. The amplitude is
/// real, alpha = sqrt(j_star/hbar); action-space squeezing is 1/(2 j_star).
struct CoherentSpec {
  double j_star;
  double hbar;

  double alpha() const;
  double squeezing() const { return 1.0 / (2.0 * j_star); }
};

/// Marginal Fock-level occupation of one mode.
struct ActionDensity {
  std::vector<double> probabilities;
  double participation_ratio = 1.0;
};

/// Poisson(mean) upper tail P(n > level).
double poisson_tail_above(double mean, int level);

/// Smallest dim with truncation tail P(n > dim-1) < tail_tol.
int min_coherent_dim(double mean, double tail_tol = 1e-10);

/// Single-mode coherent state, c_n = e^{-a^2/2} a^n / sqrt(n!), renormalized
/// over the truncated space. Requires the Poisson tail above dim-1 < 1e-10.
StateVector coherent_state(const CoherentSpec& spec, int dim);

/// Kronecker product of single-mode states in row-major mode order.
StateVector product_state(const std::vector<StateVector>& modes);

ActionDensity action_density(const StateVector& state, int mode);

}  // namespace entsim
