#include "entsim/entanglement.hpp"

#include <cmath>

namespace entsim {

Bipartition Bipartition::leading(const SpaceConfig& space, int d_a_modes) {
  if (d_a_modes < 1 || d_a_modes >= space.n_modes())
    throw std::invalid_argument("Bipartition: d_a_modes must leave both sides non-empty");
  Bipartition p;
  p.d_a_modes = d_a_modes;
  p.d_b_modes = space.n_modes() - d_a_modes;
  p.dim_a = 1;
  for (int k = 0; k < d_a_modes; ++k) p.dim_a *= space.mode_dims[k];
  p.dim_b = space.total_dim() / p.dim_a;
  return p;
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::quantum_full: return "quantum_full";
    case Provenance::quantum_echo: return "quantum_echo";
    case Provenance::semiclassical: return "semiclassical";
    case Provenance::closed_form: return "closed_form";
  }
  return "unknown";
}

using RowMat =
    Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double purity(std::span<const cxd> amps, const Bipartition& part) {
  if (static_cast<long>(amps.size()) != part.dim_a * part.dim_b)
    throw std::invalid_argument("purity: amplitude length != dim_a*dim_b");
  Eigen::Map<const RowMat> c(amps.data(), part.dim_a, part.dim_b);
  if (part.dim_b <= part.dim_a) {
    Eigen::MatrixXcd gram = c.adjoint() * c;
    return gram.squaredNorm();
  }
  Eigen::MatrixXcd gram = c * c.adjoint();
  return gram.squaredNorm();
}

double purity(const StateVector& state, const Bipartition& part) {
  if (part.dim_a * part.dim_b != state.space.total_dim())
    throw std::invalid_argument("purity: bipartition inconsistent with space");
  return purity(std::span<const cxd>(state.amplitudes), part);
}

Eigen::MatrixXcd reduced_density(const StateVector& state, const Bipartition& part) {
  if (part.dim_a * part.dim_b != state.space.total_dim())
    throw std::invalid_argument("reduced_density: bipartition inconsistent with space");
  Eigen::Map<const RowMat> c(state.amplitudes.data(), part.dim_a, part.dim_b);
  return c * c.adjoint();
}

PuritySeries purity_series(const std::vector<StateVector>& states,
                           const std::vector<double>& times, const Bipartition& part,
                           Provenance provenance) {
  if (states.size() != times.size())
    throw std::invalid_argument("purity_series: states/times length mismatch");
  PuritySeries s;
  s.times = times;
  s.values.reserve(states.size());
  for (const auto& st : states) s.values.push_back(purity(st, part));
  s.provenance = provenance;
  return s;
}

PlateauStats plateau_estimate(const PuritySeries& series, double window_fraction) {
  if (window_fraction <= 0.0 || window_fraction > 1.0)
    throw std::invalid_argument("plateau_estimate: window_fraction in (0,1] required");
  const long n = static_cast<long>(series.values.size());
  const long w = std::lround(std::floor(window_fraction * n));
  if (w < 8) throw std::invalid_argument("plateau_estimate: window too short (< 8 samples)");
  double mean = 0.0;
  for (long i = n - w; i < n; ++i) mean += series.values[i];
  mean /= w;
  double var = 0.0;
  for (long i = n - w; i < n; ++i) {
    double d = series.values[i] - mean;
    var += d * d;
  }
  var /= w;
  return PlateauStats{mean, std::sqrt(var), static_cast<int>(w)};
}

}  // namespace entsim
