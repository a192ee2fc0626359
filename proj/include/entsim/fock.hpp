#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace entsim {

using cxd = std::complex<double>;

// Magnitudes below this are dropped when a sparse operator is canonicalized.
inline constexpr double kSparseDropTol = 1e-15;

/// Truncated multi-mode Fock space. Mode ordering is row-major with mode 0
/// as the slowest index; all bipartitions take the leading modes as side A.
struct SpaceConfig {
  std::vector<int> mode_dims;

  explicit SpaceConfig(std::vector<int> dims);

  int n_modes() const { return static_cast<int>(mode_dims.size()); }
  long total_dim() const;
  /// strides[k] = product of mode_dims[k+1..]; basis index = sum n_k * strides[k]
  std::vector<long> strides() const;
};

/// Complex sparse matrix in canonical COO form: entries sorted by (row, col),
/// duplicates summed, magnitudes below kSparseDropTol dropped.
struct SparseOperator {
  struct Entry {
    long row;
    long col;
    cxd value;
  };

  long dim = 0;
  std::vector<Entry> entries;
  bool hermitian_hint = false;

  static SparseOperator zero(long dim);
  static SparseOperator identity(long dim);
  static SparseOperator from_entries(long dim, std::vector<Entry> raw,
                                     bool hermitian_hint = false);

  long nnz() const { return static_cast<long>(entries.size()); }
  bool is_diagonal() const;
  /// Dense main diagonal (length dim).
  std::vector<cxd> diagonal() const;
  SparseOperator dagger() const;
  /// Structural hermiticity check: entry set closed under (r,c,v) <-> (c,r,conj v).
  bool is_hermitian(double tol = 1e-12) const;
};

/// Compressed-row form for repeated matrix-vector products.
class CsrMatrix {
 public:
  explicit CsrMatrix(const SparseOperator& op);

  long dim() const { return dim_; }
  /// y = A x. Rows are independent, so a row-partitioned parallel run gives
  /// the same bits as the serial one.
  void apply(std::span<const cxd> x, std::span<cxd> y, int n_threads = 1) const;

 private:
  long dim_;
  std::vector<long> row_ptr_;
  std::vector<long> col_;
  std::vector<cxd> val_;
};

/// Normalized amplitude vector over a SpaceConfig.
struct StateVector {
  std::vector<cxd> amplitudes;
  SpaceConfig space;
  double norm_tolerance = 1e-9;

  /// Validates |norm - 1| <= norm_tolerance.
  StateVector(std::vector<cxd> amps, SpaceConfig space, double norm_tol = 1e-9);

  double norm() const;
};

double vec_norm(std::span<const cxd> v);

/// Ladder operator: a[n-1, n] = sqrt(n).
SparseOperator lowering_op(int dim);
SparseOperator raising_op(int dim);
/// diag(0, 1, ..., dim-1)
SparseOperator number_op(int dim);

/// Tensor-embed a single-mode operator: identity on every other mode.
SparseOperator embed(const SparseOperator& op, int mode, const SpaceConfig& space);

struct WeightedOp {
  cxd coeff;
  const SparseOperator* op;
};

SparseOperator op_combine(std::span<const WeightedOp> terms);
SparseOperator op_combine(std::initializer_list<WeightedOp> terms);
SparseOperator op_multiply(const SparseOperator& a, const SparseOperator& b);

/// Matrix-vector action; never renormalizes.
std::vector<cxd> apply(const SparseOperator& op, const StateVector& psi);
std::vector<cxd> apply(const SparseOperator& op, std::span<const cxd> amps);

/// <psi| op |psi>
cxd expectation(const SparseOperator& op, const StateVector& psi);

}  // namespace entsim
