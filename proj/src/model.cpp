#include "entsim/model.hpp"

#include <cmath>

namespace entsim {

namespace {

// diag(hbar*n - offset) on one mode
SparseOperator shifted_action_diag(int dim, double hbar, double offset) {
  SparseOperator op{dim, {}, true};
  for (long n = 0; n < dim; ++n) {
    double v = hbar * double(n) - offset;
    if (std::abs(v) >= kSparseDropTol) op.entries.push_back({n, n, v});
  }
  return op;
}

double sin_sq(double x) {
  double s = std::sin(x);
  return s * s;
}

}  // namespace

SparseOperator quadrature_sq_op(int dim) {
  SparseOperator a = lowering_op(dim);
  SparseOperator ad = raising_op(dim);
  SparseOperator sum = op_combine({{1.0, &a}, {1.0, &ad}});
  SparseOperator out = op_multiply(sum, sum);
  out.hermitian_hint = true;
  return out;
}

ModelSpec build_1x1(const OneOneParams& p, const SpaceConfig& space) {
  if (space.n_modes() != 2)
    throw std::invalid_argument("build_1x1: space must have exactly 2 modes");
  if (p.hbar <= 0.0) throw std::invalid_argument("build_1x1: hbar must be positive");

  const double hbar = p.hbar;
  SparseOperator sa = shifted_action_diag(space.mode_dims[0], hbar, p.delta_offset);
  SparseOperator sb = shifted_action_diag(space.mode_dims[1], hbar, p.delta_offset);
  SparseOperator sa2 = op_multiply(sa, sa);
  SparseOperator sb2 = op_multiply(sb, sb);
  SparseOperator ea = embed(sa2, 0, space);
  SparseOperator eb = embed(sb2, 1, space);
  SparseOperator h0 = op_combine({{p.gamma_a, &ea}, {p.gamma_b, &eb}});
  h0.hermitian_hint = true;

  SparseOperator qa = embed(quadrature_sq_op(space.mode_dims[0]), 0, space);
  SparseOperator qb = embed(quadrature_sq_op(space.mode_dims[1]), 1, space);
  SparseOperator prod = op_multiply(qa, qb);
  SparseOperator v = op_combine({{hbar * hbar, &prod}});
  v.hermitian_hint = true;

  ModelSpec m{space, 1, 1, std::move(h0), std::move(v), p.delta, hbar, nullptr, nullptr};
  const double ga = p.gamma_a, gb = p.gamma_b, off = p.delta_offset;
  m.classical_h0 = [ga, gb, off](std::span<const double> j) {
    return ga * (j[0] - off) * (j[0] - off) + gb * (j[1] - off) * (j[1] - off);
  };
  m.classical_coupling = [](std::span<const double> j, std::span<const double> theta) {
    return 16.0 * j[0] * j[1] * sin_sq(theta[0]) * sin_sq(theta[1]);
  };
  return m;
}

ModelSpec build_2x2(const TwoTwoParams& p, const SpaceConfig& space) {
  if (space.n_modes() != 4)
    throw std::invalid_argument("build_2x2: space must have exactly 4 modes");
  if (p.hbar <= 0.0) throw std::invalid_argument("build_2x2: hbar must be positive");

  const double hbar = p.hbar;
  std::vector<SparseOperator> shifted;
  for (int k = 0; k < 4; ++k)
    shifted.push_back(
        embed(shifted_action_diag(space.mode_dims[k], hbar, p.delta_offset), k, space));
  SparseOperator pa = op_multiply(shifted[0], shifted[1]);
  SparseOperator pb = op_multiply(shifted[2], shifted[3]);
  SparseOperator h0 = op_combine({{p.gamma_1, &pa}, {p.gamma_2, &pb}});
  h0.hermitian_hint = true;

  std::vector<std::pair<int, int>> pairs;
  if (p.coupling_case == CouplingCase::case_i)
    pairs = {{0, 2}, {1, 3}};
  else
    pairs = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};

  std::vector<SparseOperator> quads;
  for (int k = 0; k < 4; ++k)
    quads.push_back(embed(quadrature_sq_op(space.mode_dims[k]), k, space));
  std::vector<SparseOperator> terms;
  for (auto [k, l] : pairs) terms.push_back(op_multiply(quads[k], quads[l]));
  std::vector<WeightedOp> weighted;
  for (const auto& t : terms) weighted.push_back({hbar * hbar, &t});
  SparseOperator v = op_combine(weighted);
  v.hermitian_hint = true;

  ModelSpec m{space, 2, 2, std::move(h0), std::move(v), p.delta, hbar, nullptr, nullptr};
  const double g1 = p.gamma_1, g2 = p.gamma_2, off = p.delta_offset;
  m.classical_h0 = [g1, g2, off](std::span<const double> j) {
    return g1 * (j[0] - off) * (j[1] - off) + g2 * (j[2] - off) * (j[3] - off);
  };
  m.classical_coupling = [pairs](std::span<const double> j,
                                 std::span<const double> theta) {
    double acc = 0.0;
    for (auto [k, l] : pairs)
      acc += 16.0 * j[k] * j[l] * sin_sq(theta[k]) * sin_sq(theta[l]);
    return acc;
  };
  return m;
}

SparseOperator total_h(const ModelSpec& m) {
  SparseOperator h = op_combine({{1.0, &m.h0}, {m.delta, &m.v}});
  h.hermitian_hint = true;
  return h;
}

double classical_hamiltonian(const ModelSpec& m, std::span<const double> j,
                             std::span<const double> theta) {
  if (static_cast<int>(j.size()) != m.space.n_modes() || j.size() != theta.size())
    throw std::invalid_argument("classical_hamiltonian: j/theta size mismatch");
  for (double jk : j)
    if (jk < 0.0) throw std::domain_error("classical_hamiltonian: negative action");
  return m.classical_h0(j) + m.delta * m.classical_coupling(j, theta);
}

}  // namespace entsim
