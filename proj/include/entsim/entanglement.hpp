#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "entsim/fock.hpp"

namespace entsim {

/// Contiguous bipartition: side A = leading d_a_modes of the space.
struct Bipartition {
  int d_a_modes = 0;
  int d_b_modes = 0;
  long dim_a = 0;
  long dim_b = 0;

  static Bipartition leading(const SpaceConfig& space, int d_a_modes);
};

enum class Provenance { quantum_full, quantum_echo, semiclassical, closed_form };

const char* provenance_name(Provenance p);

/// Sampled (t, I(t)) curve.
struct PuritySeries {
  std::vector<double> times;
  std::vector<double> values;
  Provenance provenance = Provenance::quantum_full;
  std::map<std::string, double> metadata;
};

/// tr rho_A^2 via the Gram matrix of the smaller side: the amplitude vector
/// reshapes row-major to C (dim_a x dim_b) and I = ||C'C||_F^2 = ||CC'||_F^2.
double purity(const StateVector& state, const Bipartition& part);
double purity(std::span<const cxd> amps, const Bipartition& part);

/// rho_A = tr_B |psi><psi|, returned dense (dim_a x dim_a).
Eigen::MatrixXcd reduced_density(const StateVector& state, const Bipartition& part);

PuritySeries purity_series(const std::vector<StateVector>& states,
                           const std::vector<double>& times, const Bipartition& part,
                           Provenance provenance);

struct PlateauStats {
  double mean = 0.0;
  double stddev = 0.0;
  int n_samples = 0;
};

/// Mean/std over the trailing window_fraction of the series.
PlateauStats plateau_estimate(const PuritySeries& series, double window_fraction);

}  // namespace entsim
