#include "entsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

namespace entsim {

SpaceConfig::SpaceConfig(std::vector<int> dims) : mode_dims(std::move(dims)) {
  if (mode_dims.empty()) throw std::invalid_argument("SpaceConfig: no modes");
  for (int d : mode_dims)
    if (d < 2) throw std::invalid_argument("SpaceConfig: every mode_dim must be >= 2");
}

long SpaceConfig::total_dim() const {
  long total = 1;
  for (int d : mode_dims) {
    if (total > (1L << 40) / d)
      throw std::invalid_argument("SpaceConfig: total dimension overflow");
    total *= d;
  }
  return total;
}

std::vector<long> SpaceConfig::strides() const {
  std::vector<long> s(mode_dims.size(), 1);
  for (int k = n_modes() - 2; k >= 0; --k) s[k] = s[k + 1] * mode_dims[k + 1];
  return s;
}

SparseOperator SparseOperator::zero(long dim) {
  if (dim < 1) throw std::invalid_argument("zero: dim must be positive");
  return SparseOperator{dim, {}, true};
}

SparseOperator SparseOperator::identity(long dim) {
  if (dim < 1) throw std::invalid_argument("identity: dim must be positive");
  SparseOperator op{dim, {}, true};
  op.entries.reserve(dim);
  for (long i = 0; i < dim; ++i) op.entries.push_back({i, i, 1.0});
  return op;
}

SparseOperator SparseOperator::from_entries(long dim, std::vector<Entry> raw,
                                            bool hermitian_hint) {
  if (dim < 1) throw std::invalid_argument("from_entries: dim must be positive");
  for (const auto& e : raw)
    if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim)
      throw std::invalid_argument("from_entries: index out of range");
  std::sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Entry> out;
  out.reserve(raw.size());
  for (const auto& e : raw) {
    if (!out.empty() && out.back().row == e.row && out.back().col == e.col)
      out.back().value += e.value;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](const Entry& e) { return std::abs(e.value) < kSparseDropTol; });
  return SparseOperator{dim, std::move(out), hermitian_hint};
}

bool SparseOperator::is_diagonal() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Entry& e) { return e.row == e.col; });
}

std::vector<cxd> SparseOperator::diagonal() const {
  std::vector<cxd> d(dim, 0.0);
  for (const auto& e : entries)
    if (e.row == e.col) d[e.row] = e.value;
  return d;
}

SparseOperator SparseOperator::dagger() const {
  std::vector<Entry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({e.col, e.row, std::conj(e.value)});
  return from_entries(dim, std::move(out), hermitian_hint);
}

bool SparseOperator::is_hermitian(double tol) const {
  // entries are canonically sorted, so the transposed entry is findable by
  // binary search
  auto find_value = [this](long r, long c) -> cxd {
    auto it = std::lower_bound(entries.begin(), entries.end(), std::pair{r, c},
                               [](const Entry& e, const std::pair<long, long>& key) {
                                 return e.row != key.first ? e.row < key.first
                                                           : e.col < key.second;
                               });
    if (it != entries.end() && it->row == r && it->col == c) return it->value;
    return cxd{0.0};
  };
  for (const auto& e : entries)
    if (std::abs(find_value(e.col, e.row) - std::conj(e.value)) > tol) return false;
  return true;
}

CsrMatrix::CsrMatrix(const SparseOperator& op) : dim_(op.dim) {
  row_ptr_.assign(dim_ + 1, 0);
  for (const auto& e : op.entries) ++row_ptr_[e.row + 1];
  for (long i = 0; i < dim_; ++i) row_ptr_[i + 1] += row_ptr_[i];
  col_.resize(op.entries.size());
  val_.resize(op.entries.size());
  // entries are canonical (row-sorted), so a single pass fills CSR in order
  std::vector<long> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
  for (const auto& e : op.entries) {
    long k = cursor[e.row]++;
    col_[k] = e.col;
    val_[k] = e.value;
  }
}

void CsrMatrix::apply(std::span<const cxd> x, std::span<cxd> y, int n_threads) const {
  if (static_cast<long>(x.size()) != dim_ || static_cast<long>(y.size()) != dim_)
    throw std::invalid_argument("CsrMatrix::apply: size mismatch");
  auto run_rows = [&](long r0, long r1) {
    for (long r = r0; r < r1; ++r) {
      cxd acc = 0.0;
      for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += val_[k] * x[col_[k]];
      y[r] = acc;
    }
  };
  if (n_threads <= 1 || dim_ < 4096) {
    run_rows(0, dim_);
    return;
  }
  std::vector<std::thread> workers;
  long block = (dim_ + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    long r0 = t * block, r1 = std::min(dim_, r0 + block);
    if (r0 >= r1) break;
    workers.emplace_back(run_rows, r0, r1);
  }
  for (auto& w : workers) w.join();
}

StateVector::StateVector(std::vector<cxd> amps, SpaceConfig sp, double norm_tol)
    : amplitudes(std::move(amps)), space(std::move(sp)), norm_tolerance(norm_tol) {
  if (static_cast<long>(amplitudes.size()) != space.total_dim())
    throw std::invalid_argument("StateVector: amplitude length != total_dim");
  double n = norm();
  if (std::abs(n - 1.0) > norm_tolerance)
    throw std::invalid_argument("StateVector: not normalized (norm = " +
                                std::to_string(n) + ")");
}

double StateVector::norm() const { return vec_norm(amplitudes); }

double vec_norm(std::span<const cxd> v) {
  double s = 0.0;
  for (const cxd& a : v) s += std::norm(a);
  return std::sqrt(s);
}

SparseOperator lowering_op(int dim) {
  if (dim < 2) throw std::invalid_argument("lowering_op: dim must be >= 2");
  SparseOperator op{dim, {}, false};
  op.entries.reserve(dim - 1);
  for (long n = 1; n < dim; ++n) op.entries.push_back({n - 1, n, std::sqrt(double(n))});
  return op;
}

SparseOperator raising_op(int dim) { return lowering_op(dim).dagger(); }

SparseOperator number_op(int dim) {
  if (dim < 2) throw std::invalid_argument("number_op: dim must be >= 2");
  SparseOperator op{dim, {}, true};
  op.entries.reserve(dim - 1);
  for (long n = 1; n < dim; ++n) op.entries.push_back({n, n, double(n)});
  return op;
}

SparseOperator embed(const SparseOperator& op, int mode, const SpaceConfig& space) {
  if (mode < 0 || mode >= space.n_modes())
    throw std::invalid_argument("embed: mode index out of range");
  if (op.dim != space.mode_dims[mode])
    throw std::invalid_argument("embed: operator dim does not match mode dim");

  const long total = space.total_dim();
  const auto strides = space.strides();
  const long stride = strides[mode];
  const long n_rest = total / op.dim;

  // Enumerate the joint index of all other modes; for each, offset the
  // entry indices by the fixed rest-configuration.
  std::vector<SparseOperator::Entry> out;
  out.reserve(op.entries.size() * n_rest);
  for (long rest = 0; rest < n_rest; ++rest) {
    // split rest into (block above mode, block below mode)
    long hi = rest / stride;           // indices of modes before `mode`
    long lo = rest % stride;           // indices of modes after `mode`
    long base = hi * stride * op.dim + lo;
    for (const auto& e : op.entries)
      out.push_back({base + e.row * stride, base + e.col * stride, e.value});
  }
  return SparseOperator::from_entries(total, std::move(out), op.hermitian_hint);
}

SparseOperator op_combine(std::span<const WeightedOp> terms) {
  if (terms.empty()) throw std::invalid_argument("op_combine: empty term list");
  long dim = terms.front().op->dim;
  std::vector<SparseOperator::Entry> out;
  bool herm = true;
  for (const auto& [coeff, op] : terms) {
    if (op->dim != dim) throw std::invalid_argument("op_combine: dim mismatch");
    herm = herm && op->hermitian_hint && std::abs(coeff.imag()) < kSparseDropTol;
    for (const auto& e : op->entries) out.push_back({e.row, e.col, coeff * e.value});
  }
  return SparseOperator::from_entries(dim, std::move(out), herm);
}

SparseOperator op_combine(std::initializer_list<WeightedOp> terms) {
  return op_combine(std::span<const WeightedOp>(terms.begin(), terms.size()));
}

SparseOperator op_multiply(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim != b.dim) throw std::invalid_argument("op_multiply: dim mismatch");
  // Row-sorted COO of b lets us walk each row by binary search.
  std::vector<long> b_row_start(b.dim + 1, 0);
  for (const auto& e : b.entries) ++b_row_start[e.row + 1];
  for (long i = 0; i < b.dim; ++i) b_row_start[i + 1] += b_row_start[i];

  std::vector<SparseOperator::Entry> out;
  for (const auto& ea : a.entries) {
    for (long k = b_row_start[ea.col]; k < b_row_start[ea.col + 1]; ++k) {
      const auto& eb = b.entries[k];
      out.push_back({ea.row, eb.col, ea.value * eb.value});
    }
  }
  return SparseOperator::from_entries(a.dim, std::move(out), false);
}

std::vector<cxd> apply(const SparseOperator& op, std::span<const cxd> amps) {
  if (static_cast<long>(amps.size()) != op.dim)
    throw std::invalid_argument("apply: dim mismatch");
  std::vector<cxd> out(op.dim, 0.0);
  for (const auto& e : op.entries) out[e.row] += e.value * amps[e.col];
  return out;
}

std::vector<cxd> apply(const SparseOperator& op, const StateVector& psi) {
  return apply(op, std::span<const cxd>(psi.amplitudes));
}

cxd expectation(const SparseOperator& op, const StateVector& psi) {
  cxd acc = 0.0;
  for (const auto& e : op.entries)
    acc += std::conj(psi.amplitudes[e.row]) * e.value * psi.amplitudes[e.col];
  return acc;
}

}  // namespace entsim
