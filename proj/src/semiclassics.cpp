#include "entsim/semiclassics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <random>

namespace entsim {

namespace {
constexpr double kRankTolRel = 1e-10;
}

PacketSpec PacketSpec::coherent(double j_star, int d_a, int d_b) {
  if (j_star <= 0.0) throw std::invalid_argument("PacketSpec: j_star must be positive");
  PacketSpec p;
  p.j_star = Eigen::VectorXd::Constant(d_a + d_b, j_star);
  p.lambda_a = Eigen::MatrixXd::Identity(d_a, d_a) / (2.0 * j_star);
  p.lambda_b = Eigen::MatrixXd::Identity(d_b, d_b) / (2.0 * j_star);
  return p;
}

double torus_average(const ClassicalCoupling& v, std::span<const double> j,
                     int quad_points_per_angle) {
  const int d = v.dof();
  if (static_cast<int>(j.size()) != d)
    throw std::invalid_argument("torus_average: action vector size mismatch");
  if (quad_points_per_angle < 4)
    throw std::invalid_argument("torus_average: need >= 4 points per angle");

  const int q = quad_points_per_angle;
  const double step = 2.0 * std::numbers::pi / q;
  long grid = 1;
  for (int k = 0; k < d; ++k) grid *= q;

  std::vector<double> theta(d, 0.0);
  double acc = 0.0;
  for (long idx = 0; idx < grid; ++idx) {
    long rest = idx;
    for (int k = d - 1; k >= 0; --k) {
      theta[k] = step * double(rest % q);
      rest /= q;
    }
    acc += v.evaluate(j, theta);
  }
  return acc / double(grid);
}

ClassicalFn averaged_coupling(const ClassicalCoupling& v, int quad_points_per_angle) {
  return [v, quad_points_per_angle](std::span<const double> j) {
    return torus_average(v, j, quad_points_per_angle);
  };
}

double default_fd_step(std::span<const double> j_star) {
  double m = 1.0;
  for (double j : j_star) m = std::max(m, std::abs(j));
  return 1e-4 * m;
}

namespace {

Eigen::MatrixXd hessian_at_step(const ClassicalFn& vbar, std::span<const double> j_star,
                                int d_a, int d_b, double h) {
  Eigen::MatrixXd w(d_a, d_b);
  std::vector<double> j(j_star.begin(), j_star.end());
  for (int k = 0; k < d_a; ++k) {
    for (int l = 0; l < d_b; ++l) {
      const int ia = k, ib = d_a + l;
      auto eval = [&](double sa, double sb) {
        j[ia] = j_star[ia] + sa * h;
        j[ib] = j_star[ib] + sb * h;
        double val = vbar(j);
        j[ia] = j_star[ia];
        j[ib] = j_star[ib];
        return val;
      };
      w(k, l) =
          (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h * h);
    }
  }
  return w;
}

}  // namespace

Eigen::MatrixXd mixed_hessian(const ClassicalFn& vbar, std::span<const double> j_star,
                              int d_a, int d_b, double fd_step,
                              double* richardson_rel_change) {
  if (d_a < 1 || d_b < 1)
    throw std::invalid_argument("mixed_hessian: need at least one DOF per side");
  if (static_cast<int>(j_star.size()) != d_a + d_b)
    throw std::invalid_argument("mixed_hessian: j_star size mismatch");
  double scale = 0.0;
  for (double j : j_star) scale = std::max(scale, std::abs(j));
  if (fd_step <= 0.0 || fd_step < 1e-12 * std::max(scale, 1.0))
    throw std::invalid_argument("mixed_hessian: step underflow relative to j_star");

  Eigen::MatrixXd w = hessian_at_step(vbar, j_star, d_a, d_b, fd_step);
  if (richardson_rel_change) {
    Eigen::MatrixXd w_half = hessian_at_step(vbar, j_star, d_a, d_b, 0.5 * fd_step);
    double denom = std::max(w.norm(), 1e-300);
    *richardson_rel_change = (w - w_half).norm() / denom;
  }
  return w;
}

DecayMatrix decay_matrix(const PacketSpec& packet, const Eigen::MatrixXd& hess) {
  const int d_a = packet.d_a(), d_b = packet.d_b();
  if (hess.rows() != d_a || hess.cols() != d_b)
    throw std::invalid_argument("decay_matrix: Hessian shape mismatch");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(packet.lambda_a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(packet.lambda_b);
  if (ea.eigenvalues().minCoeff() <= 0.0 || eb.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("decay_matrix: squeezing matrices must be positive definite");

  Eigen::MatrixXd la_inv = ea.operatorInverseSqrt() * ea.operatorInverseSqrt();
  Eigen::MatrixXd lb_inv = eb.operatorInverseSqrt() * eb.operatorInverseSqrt();

  DecayMatrix u;
  u.matrix = la_inv * hess * lb_inv * hess.transpose();
  u.trace = u.matrix.trace();

  // u is similar to the PSD matrix S = La^-1/2 W Lb^-1 W^T La^-1/2, so its
  // eigenvalues are real and nonnegative; read them off S.
  Eigen::MatrixXd root = ea.operatorInverseSqrt();
  Eigen::MatrixXd sym = root * hess * lb_inv * hess.transpose() * root;
  sym = 0.5 * (sym + sym.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  u.eigenvalues = es.eigenvalues().cwiseMax(0.0);

  double top = u.eigenvalues.size() ? u.eigenvalues.maxCoeff() : 0.0;
  u.rank = 0;
  for (int i = 0; i < u.eigenvalues.size(); ++i)
    if (u.eigenvalues[i] > kRankTolRel * top && top > 0.0) ++u.rank;
  return u;
}

double purity_prediction(const DecayMatrix& u, double delta, double t) {
  if (delta < 0.0) throw std::invalid_argument("purity_prediction: delta must be >= 0");
  const double z = delta * t * delta * t;
  double det = 1.0;
  for (int i = 0; i < u.eigenvalues.size(); ++i) det *= 1.0 + z * u.eigenvalues[i];
  return 1.0 / std::sqrt(det);
}

double linear_response(const DecayMatrix& u, double delta, double t) {
  const double z = delta * t * delta * t;
  return 1.0 - 0.5 * z * u.trace;
}

int asymptotic_exponent(const DecayMatrix& u) { return u.rank; }

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double validity_window(double hess_spectral_norm, double delta, double hbar) {
  if (hess_spectral_norm < 0.0 || delta < 0.0 || hbar <= 0.0)
    throw std::invalid_argument("validity_window: bad inputs");
  if (hess_spectral_norm == 0.0 || delta == 0.0)
    return std::numeric_limits<double>::infinity();
  return 1.0 / (delta * hbar * hess_spectral_norm);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4568bULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

McEstimate phase_space_purity_mc(const ClassicalFn& vbar, const PacketSpec& packet,
                                 double hbar, double delta, double t, long n_samples,
                                 std::uint64_t seed) {
  if (n_samples < 10000)
    throw std::invalid_argument("phase_space_purity_mc: need >= 1e4 samples");
  const int d_a = packet.d_a(), d_b = packet.d_b(), d = d_a + d_b;

  // density ~ exp(-(j-j*)' Lambda (j-j*) / hbar): covariance = hbar/2 Lambda^-1
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(packet.lambda_a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(packet.lambda_b);
  Eigen::MatrixXd sqrt_cov_a =
      std::sqrt(0.5 * hbar) * ea.operatorInverseSqrt();
  Eigen::MatrixXd sqrt_cov_b =
      std::sqrt(0.5 * hbar) * eb.operatorInverseSqrt();

  const double phase_scale = delta * t / hbar;

  // fixed chunking makes the sum independent of any parallel execution
  const int n_chunks = 64;
  const long per_chunk = (n_samples + n_chunks - 1) / n_chunks;

  double sum = 0.0, sum_sq = 0.0;
  long total = 0;
  std::vector<double> j(d), jt(d), j_mix1(d), j_mix2(d);
  Eigen::VectorXd ga(d_a), gb(d_b);

  for (int chunk = 0; chunk < n_chunks; ++chunk) {
    std::uint64_t chunk_state = seed + 0x9e3779b97f4a7c15ULL * (chunk + 1);
    std::mt19937_64 rng(splitmix64(chunk_state));
    std::normal_distribution<double> gauss(0.0, 1.0);
    long count = std::min(per_chunk, n_samples - total);
    for (long s = 0; s < count; ++s) {
      auto draw = [&](std::vector<double>& out) {
        for (int k = 0; k < d_a; ++k) ga[k] = gauss(rng);
        for (int k = 0; k < d_b; ++k) gb[k] = gauss(rng);
        Eigen::VectorXd da = sqrt_cov_a * ga;
        Eigen::VectorXd db = sqrt_cov_b * gb;
        for (int k = 0; k < d_a; ++k) out[k] = packet.j_star[k] + da[k];
        for (int k = 0; k < d_b; ++k) out[d_a + k] = packet.j_star[d_a + k] + db[k];
      };
      draw(j);
      draw(jt);
      // cross combinations (jA, jtB) and (jtA, jB)
      for (int k = 0; k < d_a; ++k) {
        j_mix1[k] = jt[k];
        j_mix2[k] = j[k];
      }
      for (int k = d_a; k < d; ++k) {
        j_mix1[k] = j[k];
        j_mix2[k] = jt[k];
      }
      double phi = vbar(j) - vbar(j_mix1) + vbar(jt) - vbar(j_mix2);
      double val = std::cos(phase_scale * phi);
      sum += val;
      sum_sq += val * val;
    }
    total += count;
  }

  McEstimate est;
  est.n_samples = total;
  est.value = sum / double(total);
  double var = std::max(0.0, sum_sq / double(total) - est.value * est.value);
  est.std_error = std::sqrt(var / double(total));
  return est;
}

}  // namespace entsim
