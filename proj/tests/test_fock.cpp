#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "entsim/fock.hpp"
#include "oracles.hpp"

using namespace entsim;

TEST_CASE("lowering operator entries") {
  SparseOperator a2 = lowering_op(2);
  REQUIRE(a2.nnz() == 1);
  CHECK(a2.entries[0].row == 0);
  CHECK(a2.entries[0].col == 1);
  CHECK(a2.entries[0].value == cxd(1.0));

  SparseOperator a3 = lowering_op(3);
  REQUIRE(a3.nnz() == 2);
  CHECK(a3.entries[0].value == cxd(1.0));
  CHECK(a3.entries[1].value.real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(lowering_op(1), std::invalid_argument);
}

TEST_CASE("number operator equals raising*lowering and has known trace") {
  for (int dim : {2, 4, 7}) {
    SparseOperator n = number_op(dim);
    SparseOperator prod = op_multiply(raising_op(dim), lowering_op(dim));
    oracle::Mat dn = oracle::to_dense(n), dp = oracle::to_dense(prod);
    CHECK((dn - dp).norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(dn.trace().real() == doctest::Approx(dim * (dim - 1) / 2.0));
  }
  // dim=4 diagonal check
  auto diag = number_op(4).diagonal();
  for (int k = 0; k < 4; ++k) CHECK(diag[k].real() == doctest::Approx(double(k)));
}

TEST_CASE("ladder commutator is identity below the truncation edge") {
  for (int dim : {3, 5, 9}) {
    SparseOperator a = lowering_op(dim), ad = raising_op(dim);
    SparseOperator aad = op_multiply(a, ad), ada = op_multiply(ad, a);
    oracle::Mat comm = oracle::to_dense(aad) - oracle::to_dense(ada);
    for (long r = 0; r < dim - 1; ++r)
      for (long c = 0; c < dim - 1; ++c) {
        double expect = r == c ? 1.0 : 0.0;
        CHECK(std::abs(comm(r, c) - expect) < 1e-14);
      }
  }
}

TEST_CASE("embed respects the row-major mode ordering") {
  SpaceConfig space({2, 2});
  SparseOperator emb = embed(number_op(2), 0, space);
  auto diag = emb.diagonal();
  CHECK(diag[0].real() == doctest::Approx(0.0));
  CHECK(diag[1].real() == doctest::Approx(0.0));
  CHECK(diag[2].real() == doctest::Approx(1.0));
  CHECK(diag[3].real() == doctest::Approx(1.0));

  SparseOperator id = embed(SparseOperator::identity(2), 1, space);
  oracle::Mat did = oracle::to_dense(id);
  CHECK((did - oracle::Mat::Identity(4, 4)).norm() < 1e-15);

  CHECK_THROWS_AS(embed(number_op(3), 0, space), std::invalid_argument);
}

TEST_CASE("embedded hopping commutator matches the dense Kronecker oracle") {
  SpaceConfig space({2, 2});
  SparseOperator lhs = op_multiply(embed(lowering_op(2), 0, space),
                                   embed(raising_op(2), 1, space));
  SparseOperator rhs = op_multiply(embed(raising_op(2), 0, space),
                                   embed(lowering_op(2), 1, space));
  oracle::Mat comm = oracle::to_dense(op_multiply(lhs, rhs)) -
                     oracle::to_dense(op_multiply(rhs, lhs));

  oracle::Mat a = oracle::to_dense(lowering_op(2));
  oracle::Mat ad = oracle::to_dense(raising_op(2));
  oracle::Mat id = oracle::Mat::Identity(2, 2);
  oracle::Mat dl = oracle::kron(a, id) * oracle::kron(id, ad);
  oracle::Mat dr = oracle::kron(ad, id) * oracle::kron(id, a);
  oracle::Mat comm_oracle = dl * dr - dr * dl;
  CHECK((comm - comm_oracle).norm() < 1e-14);
}

TEST_CASE("embed preserves hermiticity and spectrum with multiplicity") {
  SpaceConfig space({3, 4});
  SparseOperator base = SparseOperator::from_entries(
      3, {{0, 0, 0.4}, {0, 1, cxd(0.2, 0.5)}, {1, 0, cxd(0.2, -0.5)}, {2, 2, -1.3}},
      true);
  SparseOperator emb = embed(base, 0, space);
  CHECK(emb.is_hermitian());

  Eigen::SelfAdjointEigenSolver<oracle::Mat> es_base(oracle::to_dense(base));
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es_emb(oracle::to_dense(emb));
  const long mult = space.total_dim() / base.dim;
  std::vector<double> expected;
  for (long i = 0; i < base.dim; ++i)
    for (long m = 0; m < mult; ++m) expected.push_back(es_base.eigenvalues()[i]);
  std::sort(expected.begin(), expected.end());
  for (long i = 0; i < space.total_dim(); ++i)
    CHECK(es_emb.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("op_combine cancels and apply matches the dense matvec oracle") {
  SpaceConfig space({3, 4});
  SparseOperator n0 = embed(number_op(3), 0, space);
  SparseOperator zero = op_combine({{1.0, &n0}, {-1.0, &n0}});
  CHECK(zero.nnz() == 0);

  auto amps = oracle::random_state(12, 42);
  StateVector psi(amps, space);
  SparseOperator idop = SparseOperator::identity(12);
  auto same = apply(idop, psi);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(same[i] - amps[i]) < 1e-15);

  SparseOperator a0 = embed(lowering_op(3), 0, space);
  SparseOperator a1 = embed(raising_op(4), 1, space);
  SparseOperator op = op_combine({{cxd(0.3, -0.7), &a0}, {cxd(1.1, 0.2), &a1}});
  auto got = apply(op, psi);
  oracle::Vec expect = oracle::to_dense(op) * oracle::to_eigen(amps);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-13);
}

TEST_CASE("apply is linear") {
  SpaceConfig space({3, 3});
  SparseOperator op = op_multiply(embed(lowering_op(3), 0, space),
                                  embed(raising_op(3), 1, space));
  auto psi = oracle::random_state(9, 1);
  auto phi = oracle::random_state(9, 2);
  cxd alpha(0.3, -0.4), beta(-1.2, 0.1);
  std::vector<cxd> mix(9);
  for (int i = 0; i < 9; ++i) mix[i] = alpha * psi[i] + beta * phi[i];
  auto lhs = apply(op, std::span<const cxd>(mix));
  auto ap = apply(op, std::span<const cxd>(psi));
  auto bp = apply(op, std::span<const cxd>(phi));
  for (int i = 0; i < 9; ++i)
    CHECK(std::abs(lhs[i] - (alpha * ap[i] + beta * bp[i])) < 1e-12);
}

TEST_CASE("canonicalization sums duplicates and drops tiny values") {
  auto op = SparseOperator::from_entries(
      3, {{0, 1, 0.5}, {0, 1, 0.5}, {2, 2, 1e-16}, {1, 0, cxd(0.0, 1.0)}});
  REQUIRE(op.nnz() == 2);
  CHECK(op.entries[0].row == 0);
  CHECK(op.entries[0].value == cxd(1.0));
  CHECK(op.entries[1].row == 1);

  CHECK_THROWS_AS(SparseOperator::from_entries(2, {{0, 5, 1.0}}), std::invalid_argument);
}

TEST_CASE("hermiticity check") {
  SparseOperator herm = SparseOperator::from_entries(
      2, {{0, 1, cxd(0.0, 1.0)}, {1, 0, cxd(0.0, -1.0)}});
  CHECK(herm.is_hermitian());
  SparseOperator skew = SparseOperator::from_entries(2, {{0, 1, cxd(0.0, 1.0)}});
  CHECK_FALSE(skew.is_hermitian());
}

TEST_CASE("CsrMatrix parallel apply agrees with serial") {
  SpaceConfig space({20, 20, 20});  // big enough to take the threaded path
  long dim = space.total_dim();
  SparseOperator op = embed(number_op(20), 1, space);
  CsrMatrix csr(op);
  auto amps = oracle::random_state(dim, 7);
  std::vector<cxd> y1(dim), y2(dim);
  csr.apply(amps, y1, 1);
  csr.apply(amps, y2, 4);
  for (long i = 0; i < dim; ++i) CHECK(std::abs(y1[i] - y2[i]) == 0.0);
}

TEST_CASE("StateVector validates normalization") {
  SpaceConfig space({2});
  CHECK_THROWS_AS(StateVector({1.0, 1.0}, space), std::invalid_argument);
  StateVector ok({1.0, 0.0}, space);
  CHECK(ok.norm() == doctest::Approx(1.0));
}
