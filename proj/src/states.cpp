#include "entsim/states.hpp"

#include <cmath>

namespace entsim {

namespace {
constexpr double kTailTol = 1e-10;
}

double CoherentSpec::alpha() const {
  if (j_star <= 0.0 || hbar <= 0.0)
    throw std::invalid_argument("CoherentSpec: j_star and hbar must be positive");
  return std::sqrt(j_star / hbar);
}

double poisson_tail_above(double mean, int level) {
  if (mean < 0.0) throw std::invalid_argument("poisson_tail_above: negative mean");
  if (level < 0) return 1.0;
  // 1 - CDF(level), summed in log space from the mode outward
  double cdf = 0.0;
  double log_p = -mean;  // log P(0)
  for (int n = 0; n <= level; ++n) {
    if (n > 0) log_p += std::log(mean) - std::log(double(n));
    cdf += std::exp(log_p);
  }
  return std::max(0.0, 1.0 - cdf);
}

int min_coherent_dim(double mean, double tail_tol) {
  int dim = 2;
  while (poisson_tail_above(mean, dim - 1) >= tail_tol) {
    ++dim;
    if (dim > 100000) throw std::invalid_argument("min_coherent_dim: mean too large");
  }
  return dim;
}

StateVector coherent_state(const CoherentSpec& spec, int dim) {
  if (dim < 2) throw std::invalid_argument("coherent_state: dim must be >= 2");
  const double a = spec.alpha();
  const double mean = a * a;
  double tail = poisson_tail_above(mean, dim - 1);
  if (tail >= kTailTol)
    throw TruncationError("coherent_state: truncation tail " + std::to_string(tail) +
                              " exceeds 1e-10; need dim >= " +
                              std::to_string(min_coherent_dim(mean)),
                          min_coherent_dim(mean));

  std::vector<cxd> amps(dim);
  // log c_n = -a^2/2 + n log a - lgamma(n+1)/2; alpha real so all c_n real
  for (int n = 0; n < dim; ++n) {
    double log_c = -0.5 * mean + n * std::log(a) - 0.5 * std::lgamma(double(n) + 1.0);
    amps[n] = std::exp(log_c);
  }
  double nrm = vec_norm(amps);
  for (auto& c : amps) c /= nrm;
  return StateVector(std::move(amps), SpaceConfig({dim}));
}

StateVector product_state(const std::vector<StateVector>& modes) {
  if (modes.empty()) throw std::invalid_argument("product_state: no factors");
  std::vector<int> dims;
  for (const auto& m : modes) {
    if (m.space.n_modes() != 1)
      throw std::invalid_argument("product_state: factors must be single-mode states");
    dims.push_back(m.space.mode_dims[0]);
  }
  SpaceConfig space(dims);
  std::vector<cxd> amps{1.0};
  for (const auto& m : modes) {
    std::vector<cxd> next(amps.size() * m.amplitudes.size());
    size_t k = 0;
    for (const cxd& left : amps)
      for (const cxd& right : m.amplitudes) next[k++] = left * right;
    amps = std::move(next);
  }
  double nrm = vec_norm(amps);
  for (auto& c : amps) c /= nrm;
  return StateVector(std::move(amps), std::move(space));
}

ActionDensity action_density(const StateVector& state, int mode) {
  const auto& space = state.space;
  if (mode < 0 || mode >= space.n_modes())
    throw std::invalid_argument("action_density: mode index out of range");
  const auto strides = space.strides();
  const long stride = strides[mode];
  const int d = space.mode_dims[mode];
  ActionDensity out;
  out.probabilities.assign(d, 0.0);
  const long total = space.total_dim();
  for (long idx = 0; idx < total; ++idx) {
    int n = static_cast<int>((idx / stride) % d);
    out.probabilities[n] += std::norm(state.amplitudes[idx]);
  }
  double sum_p2 = 0.0;
  for (double p : out.probabilities) sum_p2 += p * p;
  out.participation_ratio = sum_p2 > 0.0 ? 1.0 / sum_p2 : 1.0;
  return out;
}

}  // namespace entsim
