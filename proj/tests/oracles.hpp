// Test-only dense reference implementations. Everything here goes through
// Eigen dense algebra and explicit index loops, independent of the sparse
// code paths under test.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "entsim/fock.hpp"

namespace oracle {

using entsim::cxd;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat to_dense(const entsim::SparseOperator& op) {
  Mat m = Mat::Zero(op.dim, op.dim);
  for (const auto& e : op.entries) m(e.row, e.col) += e.value;
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vec to_eigen(std::span<const cxd> v) {
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

inline std::vector<cxd> from_eigen(const Vec& v) {
  return std::vector<cxd>(v.data(), v.data() + v.size());
}

inline std::vector<cxd> random_state(long dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cxd> amps(dim);
  double nrm2 = 0.0;
  for (auto& a : amps) {
    a = cxd(g(rng), g(rng));
    nrm2 += std::norm(a);
  }
  double nrm = std::sqrt(nrm2);
  for (auto& a : amps) a /= nrm;
  return amps;
}

// explicit partial trace: rho_A(i,j) = sum_b C(i,b) conj(C(j,b)), then
// tr(rho_A^2) by double loop
inline double purity_brute(std::span<const cxd> amps, long dim_a, long dim_b) {
  Mat rho = Mat::Zero(dim_a, dim_a);
  for (long i = 0; i < dim_a; ++i)
    for (long j = 0; j < dim_a; ++j)
      for (long b = 0; b < dim_b; ++b)
        rho(i, j) += amps[i * dim_b + b] * std::conj(amps[j * dim_b + b]);
  cxd tr = 0.0;
  for (long i = 0; i < dim_a; ++i)
    for (long j = 0; j < dim_a; ++j) tr += rho(i, j) * rho(j, i);
  return tr.real();
}

// exp(-i H t / hbar) psi by dense diagonalization of hermitian H
inline Vec evolve_dense(const Mat& h, const Vec& psi, double t, double hbar) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec modes = es.eigenvectors().adjoint() * psi;
  for (long i = 0; i < modes.size(); ++i)
    modes[i] *= std::exp(cxd(0.0, -es.eigenvalues()[i] * t / hbar));
  return es.eigenvectors() * modes;
}

inline Mat random_unitary(long dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) a(i, j) = cxd(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  return q;
}

}  // namespace oracle
