#include "entsim/propagator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace entsim {

TimeGrid::TimeGrid(std::vector<double> times) : sample_times(std::move(times)) {
  if (sample_times.empty()) throw std::invalid_argument("TimeGrid: empty");
  if (sample_times.front() < 0.0)
    throw std::invalid_argument("TimeGrid: times must be nonnegative");
  for (size_t i = 1; i < sample_times.size(); ++i)
    if (sample_times[i] <= sample_times[i - 1])
      throw std::invalid_argument("TimeGrid: times must be strictly increasing");
}

TimeGrid TimeGrid::linear(double t0, double t1, int n) {
  if (n < 1 || t1 <= t0) throw std::invalid_argument("TimeGrid::linear: bad range");
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i)
    ts[i] = n == 1 ? t0 : t0 + (t1 - t0) * double(i) / double(n - 1);
  return TimeGrid(std::move(ts));
}

TimeGrid TimeGrid::log_spaced(double t0, double t1, int n) {
  if (n < 1 || t0 <= 0.0 || t1 <= t0)
    throw std::invalid_argument("TimeGrid::log_spaced: need 0 < t0 < t1");
  std::vector<double> ts(n);
  double l0 = std::log(t0), l1 = std::log(t1);
  for (int i = 0; i < n; ++i)
    ts[i] = n == 1 ? t0 : std::exp(l0 + (l1 - l0) * double(i) / double(n - 1));
  return TimeGrid(std::move(ts));
}

namespace {

cxd dot(std::span<const cxd> a, std::span<const cxd> b) {
  cxd acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

std::vector<StateVector> evolve_diagonal(const SparseOperator& h,
                                         const StateVector& psi0, const TimeGrid& grid,
                                         double hbar) {
  std::vector<double> energies(h.dim, 0.0);
  for (const auto& e : h.entries) energies[e.row] = e.value.real();
  std::vector<StateVector> out;
  out.reserve(grid.sample_times.size());
  for (double t : grid.sample_times) {
    std::vector<cxd> amps(psi0.amplitudes.size());
    for (long i = 0; i < h.dim; ++i)
      amps[i] = psi0.amplitudes[i] *
                std::exp(cxd(0.0, -energies[i] * t / hbar));
    out.emplace_back(std::move(amps), psi0.space, psi0.norm_tolerance);
  }
  return out;
}

struct LanczosBasis {
  std::vector<std::vector<cxd>> q;  // orthonormal vectors, m_eff of them
  double beta0 = 1.0;               // norm of the input vector
  Eigen::VectorXd alpha;            // diagonal of T, size m_eff
  Eigen::VectorXd beta;             // off-diagonal, size m_eff-1
  double beta_next = 0.0;           // coupling to the discarded next vector
  bool invariant = false;           // happy breakdown: subspace is exact
  // eigen-decomposition of T
  Eigen::MatrixXd evec;
  Eigen::VectorXd eval;
};

LanczosBasis build_lanczos(const CsrMatrix& a, std::span<const cxd> v, int m,
                           int threads, long* matvecs) {
  const long n = a.dim();
  LanczosBasis basis;
  basis.q.reserve(m);
  std::vector<double> alpha, beta;

  std::vector<cxd> q0(v.begin(), v.end());
  basis.beta0 = vec_norm(q0);
  for (auto& c : q0) c /= basis.beta0;
  basis.q.push_back(std::move(q0));

  std::vector<cxd> w(n);
  for (int j = 0; j < m; ++j) {
    a.apply(basis.q[j], w, threads);
    ++*matvecs;
    double aj = dot(basis.q[j], w).real();
    alpha.push_back(aj);
    for (long i = 0; i < n; ++i) w[i] -= aj * basis.q[j][i];
    if (j > 0) {
      double bj = beta.back();
      for (long i = 0; i < n; ++i) w[i] -= bj * basis.q[j - 1][i];
    }
    // one full reorthogonalization pass keeps the basis clean at m ~ 30
    for (int i = 0; i <= j; ++i) {
      cxd c = dot(basis.q[i], w);
      for (long k = 0; k < n; ++k) w[k] -= c * basis.q[i][k];
    }
    double bnext = vec_norm(w);
    double scale = std::max({std::abs(aj), bnext, 1e-30});
    if (bnext <= 1e-13 * std::max(scale, 1.0)) {
      basis.invariant = true;
      basis.beta_next = 0.0;
      break;
    }
    if (j + 1 < m) {
      beta.push_back(bnext);
      std::vector<cxd> qn(n);
      for (long i = 0; i < n; ++i) qn[i] = w[i] / bnext;
      basis.q.push_back(std::move(qn));
    } else {
      basis.beta_next = bnext;
    }
  }

  const int m_eff = static_cast<int>(basis.q.size());
  basis.alpha = Eigen::Map<Eigen::VectorXd>(alpha.data(), m_eff);
  basis.beta = Eigen::VectorXd(std::max(0, m_eff - 1));
  for (int i = 0; i < m_eff - 1; ++i) basis.beta[i] = beta[i];

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m_eff, m_eff);
  for (int i = 0; i < m_eff; ++i) t(i, i) = basis.alpha[i];
  for (int i = 0; i < m_eff - 1; ++i) {
    t(i, i + 1) = basis.beta[i];
    t(i + 1, i) = basis.beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  basis.evec = es.eigenvectors();
  basis.eval = es.eigenvalues();
  return basis;
}

// coefficients of exp(-i dt T / hbar) e1 in the Lanczos basis
Eigen::VectorXcd small_exponential(const LanczosBasis& b, double dt, double hbar) {
  Eigen::VectorXd e1_modes = b.evec.row(0).transpose();  // U^T e1
  Eigen::VectorXcd phased(b.eval.size());
  for (int i = 0; i < b.eval.size(); ++i)
    phased[i] = std::exp(cxd(0.0, -b.eval[i] * dt / hbar)) * e1_modes[i];
  return b.evec * phased;
}

class KrylovStepper {
 public:
  KrylovStepper(const SparseOperator& h, const PropagationConfig& cfg, double hbar)
      : csr_(h), cfg_(cfg), hbar_(hbar) {}

  // advance psi by dt_total (may take several Krylov sub-steps)
  void advance(std::vector<cxd>& psi, double dt_total, EvolveStats& stats) {
    double remaining = dt_total;
    while (remaining > 1e-15 * std::max(1.0, dt_total)) {
      LanczosBasis basis = build_lanczos(csr_, psi, cfg_.krylov_dim,
                                         cfg_.apply_threads, &stats.matvecs);
      double dt = std::min(remaining, cfg_.step_dt);
      const int m_eff = static_cast<int>(basis.q.size());
      Eigen::VectorXcd u;
      for (;;) {
        u = small_exponential(basis, dt, hbar_);
        double err = basis.invariant
                         ? 0.0
                         : basis.beta_next * std::abs(u[m_eff - 1]) * dt / hbar_;
        if (err <= cfg_.target_error_per_step || basis.invariant) break;
        dt *= 0.5;
        if (dt < 1e-12 * cfg_.step_dt)
          throw std::runtime_error("evolve: Krylov step size underflow");
      }
      const long n = csr_.dim();
      std::vector<cxd> next(n, 0.0);
      for (int j = 0; j < m_eff; ++j) {
        const cxd c = basis.beta0 * u[j];
        const auto& qj = basis.q[j];
        for (long i = 0; i < n; ++i) next[i] += c * qj[i];
      }
      double nrm = vec_norm(next);
      double drift = std::abs(nrm / basis.beta0 - 1.0);
      stats.max_norm_drift = std::max(stats.max_norm_drift, drift);
      if (drift > 1e-6)
        throw std::runtime_error("evolve: norm drift " + std::to_string(drift) +
                                 " exceeds tolerance; non-hermitian input?");
      if (cfg_.renormalize_each_step)
        for (auto& c : next) c /= nrm;
      psi = std::move(next);
      remaining -= dt;
      ++stats.steps;
    }
  }

 private:
  CsrMatrix csr_;
  PropagationConfig cfg_;
  double hbar_;
};

class ChebyshevStepper {
 public:
  ChebyshevStepper(const SparseOperator& h, const PropagationConfig& cfg, double hbar)
      : csr_(h), cfg_(cfg), hbar_(hbar) {
    // Gershgorin bounds, widened so the scaled spectrum stays inside [-1, 1]
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    std::vector<double> center(h.dim, 0.0), radius(h.dim, 0.0);
    for (const auto& e : h.entries) {
      if (e.row == e.col)
        center[e.row] = e.value.real();
      else
        radius[e.row] += std::abs(e.value);
    }
    for (long i = 0; i < h.dim; ++i) {
      lo = std::min(lo, center[i] - radius[i]);
      hi = std::max(hi, center[i] + radius[i]);
    }
    if (hi <= lo) hi = lo + 1.0;
    double pad = 0.05 * (hi - lo);
    center_ = 0.5 * (hi + lo);
    half_width_ = 0.5 * (hi - lo) + pad;
  }

  void advance(std::vector<cxd>& psi, double dt_total, EvolveStats& stats) {
    double remaining = dt_total;
    while (remaining > 1e-15 * std::max(1.0, dt_total)) {
      double dt = std::min(remaining, cfg_.step_dt);
      step(psi, dt, stats);
      remaining -= dt;
      ++stats.steps;
    }
  }

 private:
  void step(std::vector<cxd>& psi, double dt, EvolveStats& stats) {
    const long n = csr_.dim();
    const double nrm_in = vec_norm(psi);
    const double z = half_width_ * dt / hbar_;
    const cxd phase = std::exp(cxd(0.0, -center_ * dt / hbar_));

    std::vector<cxd> tk_prev(psi), tk(n), acc(n), hx(n);
    // T_0 term
    double c0 = std::cyl_bessel_j(0, z);
    for (long i = 0; i < n; ++i) acc[i] = c0 * tk_prev[i];
    // T_1 = H~ psi
    apply_scaled(tk_prev, tk, stats);
    cxd ik(0.0, -1.0), ipow = ik;
    int below_tail = 0;
    for (int k = 1; k < 16 * 1024; ++k) {
      double jk = std::cyl_bessel_j(k, z);
      cxd ck = 2.0 * ipow * jk;
      for (long i = 0; i < n; ++i) acc[i] += ck * tk[i];
      if (std::abs(2.0 * jk) < 0.1 * cfg_.target_error_per_step && double(k) > z)
        ++below_tail;
      else
        below_tail = 0;
      if (below_tail >= 3) break;
      // T_{k+1} = 2 H~ T_k - T_{k-1}
      apply_scaled(tk, hx, stats);
      for (long i = 0; i < n; ++i) {
        cxd next = 2.0 * hx[i] - tk_prev[i];
        tk_prev[i] = tk[i];
        tk[i] = next;
      }
      ipow *= ik;
    }
    for (long i = 0; i < n; ++i) psi[i] = phase * acc[i];
    double nrm = vec_norm(psi);
    double drift = std::abs(nrm / nrm_in - 1.0);
    stats.max_norm_drift = std::max(stats.max_norm_drift, drift);
    if (drift > 1e-6)
      throw std::runtime_error("evolve: Chebyshev norm drift exceeds tolerance");
    if (cfg_.renormalize_each_step)
      for (auto& c : psi) c /= nrm;
  }

  void apply_scaled(std::span<const cxd> x, std::vector<cxd>& y, EvolveStats& stats) {
    csr_.apply(x, y, cfg_.apply_threads);
    ++stats.matvecs;
    for (long i = 0; i < csr_.dim(); ++i) y[i] = (y[i] - center_ * x[i]) / half_width_;
  }

  CsrMatrix csr_;
  PropagationConfig cfg_;
  double hbar_;
  double center_ = 0.0;
  double half_width_ = 1.0;
};

}  // namespace

std::vector<StateVector> evolve(const SparseOperator& h, const StateVector& psi0,
                                const TimeGrid& grid, const PropagationConfig& cfg,
                                double hbar, EvolveStats* stats) {
  if (h.dim != psi0.space.total_dim())
    throw std::invalid_argument("evolve: H dim != state dim");
  if (hbar <= 0.0) throw std::invalid_argument("evolve: hbar must be positive");
  if (cfg.krylov_dim < 4) throw std::invalid_argument("evolve: krylov_dim < 4");
  if (cfg.step_dt <= 0.0) throw std::invalid_argument("evolve: step_dt must be positive");
  if (!h.hermitian_hint && !h.is_hermitian())
    throw std::invalid_argument("evolve: H failed the hermiticity check");

  if (h.is_diagonal()) return evolve_diagonal(h, psi0, grid, hbar);

  EvolveStats local;
  EvolveStats& st = stats ? *stats : local;

  std::vector<cxd> psi = psi0.amplitudes;
  std::vector<StateVector> out;
  out.reserve(grid.sample_times.size());

  auto advance_fn = [&](auto& stepper) {
    double cur_t = 0.0;
    for (double t : grid.sample_times) {
      if (t > cur_t) {
        stepper.advance(psi, t - cur_t, st);
        cur_t = t;
      }
      std::vector<cxd> amps = psi;
      double nrm = vec_norm(amps);
      for (auto& c : amps) c /= nrm;
      out.emplace_back(std::move(amps), psi0.space, psi0.norm_tolerance);
    }
  };

  if (cfg.method == PropMethod::krylov) {
    KrylovStepper stepper(h, cfg, hbar);
    advance_fn(stepper);
  } else {
    ChebyshevStepper stepper(h, cfg, hbar);
    advance_fn(stepper);
  }
  return out;
}

SparseOperator diagonal_average(const SparseOperator& v, const SparseOperator& h0,
                                const StateVector* initial, DegeneracyReport* report,
                                double gap_tol_rel, double weight_tol) {
  if (v.dim != h0.dim) throw std::invalid_argument("diagonal_average: dim mismatch");
  if (!h0.is_diagonal())
    throw std::invalid_argument("diagonal_average: H0 must be diagonal in the Fock basis");

  std::vector<double> energy(h0.dim, 0.0);
  double scale = 1.0;
  for (const auto& e : h0.entries) {
    energy[e.row] = e.value.real();
    scale = std::max(scale, std::abs(e.value.real()));
  }
  const double tol = gap_tol_rel * scale;

  std::vector<SparseOperator::Entry> kept;
  for (const auto& e : v.entries) {
    if (e.row != e.col && std::abs(energy[e.row] - energy[e.col]) > tol) continue;
    kept.push_back(e);
    if (e.row != e.col && report) {
      report->off_diagonal = true;
      if (e.row < e.col) {
        double w = initial ? std::norm(initial->amplitudes[e.row]) +
                                 std::norm(initial->amplitudes[e.col])
                           : 1.0;
        if (w > weight_tol) report->weighted_pairs.push_back({e.row, e.col, w});
      }
    }
  }
  return SparseOperator::from_entries(v.dim, std::move(kept), v.hermitian_hint);
}

std::vector<StateVector> echo_evolve(const ModelSpec& m, const StateVector& psi0,
                                     const TimeGrid& grid, const PropagationConfig& cfg,
                                     DegeneracyReport* report) {
  SparseOperator vbar = diagonal_average(m.v, m.h0, &psi0, report);
  SparseOperator heff = op_combine({{m.delta, &vbar}});
  heff.hermitian_hint = vbar.hermitian_hint;
  return evolve(heff, psi0, grid, cfg, m.hbar);
}

}  // namespace entsim
