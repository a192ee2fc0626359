#include "entsim/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "entsim/states.hpp"
#include "json.hpp"

namespace entsim {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::one_one: return "one_one";
    case ModelKind::two_two_case1: return "two_two_case1";
    case ModelKind::two_two_case2: return "two_two_case2";
  }
  return "unknown";
}

namespace {

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string fmt17(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int n_modes_of(ModelKind kind) { return kind == ModelKind::one_one ? 2 : 4; }

TimeGrid make_grid(const GridSpec& g, double delta) {
  const double td = delta > 0.0 ? 1.0 / delta : 1.0;
  const double t_max = g.t_max_over_td * td;
  if (g.log_spacing) {
    if (g.t_min_over_td <= 0.0)
      throw std::invalid_argument("grid: log spacing needs t_min_over_td > 0");
    return TimeGrid::log_spaced(g.t_min_over_td * td, t_max, g.samples);
  }
  return TimeGrid::linear(0.0, t_max, g.samples);
}

struct PredictionChain {
  Eigen::MatrixXd hess;
  DecayMatrix u;
  double hess_norm = 0.0;
  double validity_t_max = std::numeric_limits<double>::infinity();
  double richardson = 0.0;
};

PredictionChain prediction_chain(const ModelSpec& m, double j_star, double delta,
                                 int quad_points) {
  PredictionChain out;
  ClassicalCoupling coupling{m.classical_coupling, m.d_a_modes, m.d_b_modes};
  ClassicalFn vbar = averaged_coupling(coupling, quad_points);
  std::vector<double> js(m.d_a_modes + m.d_b_modes, j_star);
  out.hess = mixed_hessian(vbar, js, m.d_a_modes, m.d_b_modes, default_fd_step(js),
                           &out.richardson);
  PacketSpec packet = PacketSpec::coherent(j_star, m.d_a_modes, m.d_b_modes);
  out.u = decay_matrix(packet, out.hess);
  out.hess_norm = spectral_norm(out.hess);
  out.validity_t_max = validity_window(out.hess_norm, delta, m.hbar);
  return out;
}

}  // namespace

std::vector<int> default_mode_dims(ModelKind kind, double j_star, double hbar) {
  if (j_star <= 0.0 || hbar <= 0.0)
    throw std::invalid_argument("default_mode_dims: j_star and hbar must be positive");
  const double mean = j_star / hbar;
  int dim = static_cast<int>(std::ceil(mean + 8.0 * std::sqrt(mean))) + 4;
  dim = std::max(dim, 4);
  return std::vector<int>(n_modes_of(kind), dim);
}

ModelSpec build_model(const ExperimentConfig& cfg, double hbar, double delta,
                      const SpaceConfig& space) {
  switch (cfg.model) {
    case ModelKind::one_one: {
      OneOneParams p{cfg.gamma_a, cfg.gamma_b, cfg.delta_offset, hbar, delta};
      return build_1x1(p, space);
    }
    case ModelKind::two_two_case1:
    case ModelKind::two_two_case2: {
      TwoTwoParams p{cfg.gamma_a, cfg.gamma_b, cfg.delta_offset, hbar, delta,
                     cfg.model == ModelKind::two_two_case1 ? CouplingCase::case_i
                                                           : CouplingCase::case_ii};
      return build_2x2(p, space);
    }
  }
  throw std::invalid_argument("build_model: unknown model kind");
}

double closed_form_purity(ModelKind kind, double j_star, double delta_t) {
  const double x = 8.0 * j_star * delta_t;
  switch (kind) {
    case ModelKind::one_one:
      return 1.0 / std::sqrt(1.0 + x * x);
    case ModelKind::two_two_case1:
      return 1.0 / (1.0 + x * x);
    case ModelKind::two_two_case2: {
      const double y = 16.0 * j_star * delta_t;
      return 1.0 / std::sqrt(1.0 + y * y);
    }
  }
  throw std::invalid_argument("closed_form_purity: unknown model kind");
}

std::string record_label(ModelKind kind, double hbar, double delta) {
  return std::string(model_kind_name(kind)) + "_hbar" + fmt_g(hbar) + "_delta" +
         fmt_g(delta);
}

SlopeFit fit_loglog_slope(const PuritySeries& series, double delta, double value_lo,
                          double value_hi, double t_cap, double value_floor) {
  SlopeFit fit;
  if (delta <= 0.0) return fit;
  std::vector<double> xs, ys;
  for (size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i], v = series.values[i];
    if (t <= 0.0 || t > t_cap) continue;
    if (v <= value_lo || v >= value_hi || v < value_floor) continue;
    xs.push_back(std::log(delta * t));
    ys.push_back(std::log(v));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 4) return fit;
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.slope = sxy / sxx;
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    double r = ys[i] - my - fit.slope * (xs[i] - mx);
    ssr += r * r;
  }
  fit.std_error = n > 2 ? std::sqrt(ssr / double(n - 2) / sxx) : 0.0;
  fit.n_points = n;
  fit.available = true;
  return fit;
}

namespace {

ComparisonMetrics compute_metrics(const RunRecord& rec, double t_ave_hint) {
  ComparisonMetrics m = rec.metrics;  // keep validity/hess_norm already set
  const auto& sc = rec.semiclassical;

  if (rec.quantum) {
    const auto& q = *rec.quantum;
    double worst = std::numeric_limits<double>::quiet_NaN();
    for (size_t i = 0; i < q.times.size(); ++i) {
      const double t = q.times[i];
      if (t <= t_ave_hint || t > m.validity_t_max) continue;
      double rel = std::abs(q.values[i] - sc.values[i]) / sc.values[i];
      if (std::isnan(worst) || rel > worst) worst = rel;
    }
    m.max_rel_dev = worst;

    if (rec.echo) {
      double worst_echo = std::numeric_limits<double>::quiet_NaN();
      for (size_t i = 0; i < q.times.size(); ++i) {
        double rel = std::abs(rec.echo->values[i] - q.values[i]) / q.values[i];
        if (std::isnan(worst_echo) || rel > worst_echo) worst_echo = rel;
      }
      m.max_rel_dev_echo = worst_echo;
    }

    // plateau: trailing 20% window, only once the grid is past ~5 decay times
    m.plateau_available = false;
    if (rec.delta > 0.0 && q.times.size() >= 40) {
      size_t start = q.times.size() - q.times.size() / 5;
      if (q.times[start] > 5.0 / rec.delta) {
        try {
          m.plateau = plateau_estimate(q, 0.2);
          m.plateau_available = true;
        } catch (const std::exception&) {
        }
      }
    }

    double floor = m.plateau_available ? 1.5 * m.plateau.mean : 0.0;
    m.slope_quantum =
        fit_loglog_slope(q, rec.delta, 0.001, 0.1, m.validity_t_max, floor);
  }

  m.slope_semiclassical = fit_loglog_slope(sc, rec.delta, 0.001, 0.1);
  return m;
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg, double hbar, double delta) {
  const auto t_start = std::chrono::steady_clock::now();
  if (hbar <= 0.0) throw std::invalid_argument("run_experiment: hbar must be positive");
  if (delta < 0.0) throw std::invalid_argument("run_experiment: delta must be >= 0");

  RunRecord rec;
  rec.model = cfg.model;
  rec.hbar = hbar;
  rec.delta = delta;
  rec.j_star = cfg.j_star;
  rec.gamma_a = cfg.gamma_a;
  rec.gamma_b = cfg.gamma_b;
  rec.delta_offset = cfg.delta_offset;
  rec.t_ave_hint = cfg.t_ave_hint;
  rec.label = record_label(cfg.model, hbar, delta);

  // truncation
  std::vector<int> dims = cfg.truncation.automatic
                              ? default_mode_dims(cfg.model, cfg.j_star, hbar)
                              : cfg.truncation.explicit_dims;
  if (static_cast<int>(dims.size()) != n_modes_of(cfg.model))
    throw std::invalid_argument("run_experiment: mode_dims count does not match model");
  rec.mode_dims = dims;
  SpaceConfig space(dims);

  const double mean = cfg.j_star / hbar;
  for (int d : dims) {
    double tail = poisson_tail_above(mean, d - 5);
    if (tail > 1e-8) {
      rec.warnings.push_back("truncation margin thin: tail above level " +
                             std::to_string(d - 5) + " is " + fmt_g(tail));
      break;
    }
  }

  ModelSpec model = build_model(cfg, hbar, delta, space);
  TimeGrid grid = make_grid(cfg.grid, delta);

  // semiclassical prediction chain
  PredictionChain chain = prediction_chain(model, cfg.j_star, delta, cfg.quad_points);
  if (chain.richardson > 1e-6)
    rec.warnings.push_back("mixed Hessian not step-converged: Richardson change " +
                           fmt_g(chain.richardson));
  rec.decay_trace = chain.u.trace;
  rec.decay_rank = chain.u.rank;
  rec.metrics.validity_t_max = chain.validity_t_max;
  rec.metrics.hess_norm = chain.hess_norm;
  if (grid.sample_times.back() > chain.validity_t_max)
    rec.warnings.push_back("grid extends past the validity window t_max = " +
                           fmt_g(chain.validity_t_max));

  auto series_meta = [&](PuritySeries& s) {
    s.metadata["hbar"] = hbar;
    s.metadata["delta"] = delta;
    s.metadata["j_star"] = cfg.j_star;
  };

  rec.semiclassical.times = grid.sample_times;
  rec.semiclassical.provenance = Provenance::semiclassical;
  for (double t : grid.sample_times)
    rec.semiclassical.values.push_back(purity_prediction(chain.u, delta, t));
  series_meta(rec.semiclassical);

  rec.closed_form.times = grid.sample_times;
  rec.closed_form.provenance = Provenance::closed_form;
  for (double t : grid.sample_times)
    rec.closed_form.values.push_back(closed_form_purity(cfg.model, cfg.j_star, delta * t));
  series_meta(rec.closed_form);

  if (cfg.compute_quantum || cfg.compute_echo) {
    // initial product coherent state
    std::vector<StateVector> factors;
    for (int d : dims) factors.push_back(coherent_state({cfg.j_star, hbar}, d));
    StateVector psi0 = product_state(factors);
    Bipartition part = Bipartition::leading(space, model.d_a_modes);

    PropagationConfig prop = cfg.propagation;
    if (prop.apply_threads <= 0)
      prop.apply_threads =
          std::max(1u, std::thread::hardware_concurrency());
    rec.propagation = prop;

    if (cfg.compute_quantum) {
      SparseOperator h = total_h(model);
      auto states = evolve(h, psi0, grid, prop, hbar);
      rec.quantum =
          purity_series(states, grid.sample_times, part, Provenance::quantum_full);
      series_meta(*rec.quantum);
    }
    if (cfg.compute_echo) {
      DegeneracyReport report;
      auto states = echo_evolve(model, psi0, grid, prop, &report);
      rec.echo = purity_series(states, grid.sample_times, part, Provenance::quantum_echo);
      series_meta(*rec.echo);
      if (!report.weighted_pairs.empty()) {
        std::string msg = "averaged coupling: degenerate H0 pairs carry weight:";
        int listed = 0;
        for (const auto& p : report.weighted_pairs) {
          if (++listed > 5) {
            msg += " ...";
            break;
          }
          msg += " (" + std::to_string(p.i) + "," + std::to_string(p.j) + ")";
        }
        rec.warnings.push_back(msg);
      }
    }
  }

  rec.metrics = compute_metrics(rec, cfg.t_ave_hint);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rec;
}

SweepOutcome run_sweep(const ExperimentConfig& cfg) {
  if (cfg.hbar_list.empty() || cfg.delta_list.empty())
    throw std::invalid_argument("run_sweep: hbar_list and delta_list must be non-empty");

  struct Cell {
    double hbar, delta;
  };
  std::vector<Cell> cells;
  for (double h : cfg.hbar_list)
    for (double d : cfg.delta_list) cells.push_back({h, d});

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int n_workers =
      std::max(1, std::min<int>(cfg.max_parallel > 0 ? cfg.max_parallel : hw,
                                static_cast<int>(cells.size())));

  ExperimentConfig cell_cfg = cfg;
  if (cfg.propagation.apply_threads <= 0)
    cell_cfg.propagation.apply_threads =
        std::max(1, static_cast<int>(hw) / n_workers);

  std::vector<std::optional<RunRecord>> results(cells.size());
  std::vector<std::string> failures(cells.size());
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        results[i] = run_experiment(cell_cfg, cells[i].hbar, cells[i].delta);
      } catch (const std::exception& e) {
        failures[i] = "hbar=" + fmt_g(cells[i].hbar) + " delta=" +
                      fmt_g(cells[i].delta) + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  SweepOutcome out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (results[i])
      out.records.push_back(std::move(*results[i]));
    else
      out.failures.push_back(failures[i]);
  }
  return out;
}

AnalysisSummary analyze(const std::vector<RunRecord>& records) {
  AnalysisSummary summary;
  for (const auto& rec : records) {
    RunRecord tmp = rec;
    tmp.metrics = compute_metrics(tmp, rec.t_ave_hint);
    AnalysisRow row;
    row.label = rec.label;
    row.model = rec.model;
    row.hbar = rec.hbar;
    row.delta = rec.delta;
    row.slope_quantum = tmp.metrics.slope_quantum;
    row.slope_semiclassical = tmp.metrics.slope_semiclassical;
    row.max_rel_dev = tmp.metrics.max_rel_dev;
    row.plateau = tmp.metrics.plateau;
    row.plateau_available = tmp.metrics.plateau_available;
    row.validity_t_max = tmp.metrics.validity_t_max;
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

namespace {

std::string slope_text(const SlopeFit& f) {
  if (!f.available) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f+-%.3f(%d)", f.slope, f.std_error, f.n_points);
  return buf;
}

}  // namespace

std::string AnalysisSummary::to_text() const {
  std::ostringstream os;
  os << "label                                   slope_q              slope_sc             "
        "max_rel_dev  plateau\n";
  for (const auto& r : rows) {
    char line[256];
    std::string plateau = r.plateau_available
                              ? (fmt_g(r.plateau.mean) + "+-" + fmt_g(r.plateau.stddev))
                              : "n/a";
    std::string dev = std::isnan(r.max_rel_dev) ? "n/a" : fmt_g(r.max_rel_dev);
    std::snprintf(line, sizeof line, "%-39s %-20s %-20s %-12s %s\n", r.label.c_str(),
                  slope_text(r.slope_quantum).c_str(),
                  slope_text(r.slope_semiclassical).c_str(), dev.c_str(),
                  plateau.c_str());
    os << line;
  }
  return os.str();
}

std::string AnalysisSummary::to_csv() const {
  std::ostringstream os;
  os << "label,model,hbar,delta,slope_quantum,slope_quantum_err,slope_quantum_points,"
        "slope_semiclassical,slope_semiclassical_err,slope_semiclassical_points,"
        "max_rel_dev,plateau_mean,plateau_std,validity_t_max\n";
  auto opt = [](bool ok, double v) { return ok ? fmt17(v) : std::string(); };
  for (const auto& r : rows) {
    os << r.label << ',' << model_kind_name(r.model) << ',' << fmt17(r.hbar) << ','
       << fmt17(r.delta) << ',' << opt(r.slope_quantum.available, r.slope_quantum.slope)
       << ',' << opt(r.slope_quantum.available, r.slope_quantum.std_error) << ','
       << (r.slope_quantum.available ? std::to_string(r.slope_quantum.n_points) : "")
       << ',' << opt(r.slope_semiclassical.available, r.slope_semiclassical.slope) << ','
       << opt(r.slope_semiclassical.available, r.slope_semiclassical.std_error) << ','
       << (r.slope_semiclassical.available
               ? std::to_string(r.slope_semiclassical.n_points)
               : "")
       << ',' << (std::isnan(r.max_rel_dev) ? "" : fmt17(r.max_rel_dev)) << ','
       << opt(r.plateau_available, r.plateau.mean) << ','
       << opt(r.plateau_available, r.plateau.stddev) << ','
       << (std::isinf(r.validity_t_max) ? "" : fmt17(r.validity_t_max)) << '\n';
  }
  return os.str();
}

namespace {

void check_series(const RunRecord& rec, const PuritySeries& s) {
  if (s.times != rec.semiclassical.times)
    throw std::runtime_error("emit: purity channels disagree on the time grid");
  for (double v : s.values)
    if (std::isnan(v)) throw std::runtime_error("emit: NaN purity value");
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("emit: cannot open " + p.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("emit: write failed for " + p.string());
}

}  // namespace

void emit(const RunRecord& rec, const std::string& dir,
          std::span<const std::string> formats) {
  fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw std::runtime_error("emit: cannot create directory " + root.string());

  check_series(rec, rec.semiclassical);
  check_series(rec, rec.closed_form);
  if (rec.quantum) check_series(rec, *rec.quantum);
  if (rec.echo) check_series(rec, *rec.echo);
  for (double t : rec.semiclassical.times)
    if (std::isnan(t)) throw std::runtime_error("emit: NaN time value");

  const auto& times = rec.semiclassical.times;

  bool want_csv = false, want_gnuplot = false;
  for (const auto& f : formats) {
    if (f == "csv") want_csv = true;
    else if (f == "gnuplot") want_gnuplot = true;
    else throw std::runtime_error("emit: unknown format '" + f + "'");
  }

  if (want_csv) {
    std::ostringstream os;
    os << "t,delta_t,I_quantum,I_echo,I_semiclassical,I_closed_form\n";
    for (size_t i = 0; i < times.size(); ++i) {
      os << fmt17(times[i]) << ',' << fmt17(rec.delta * times[i]) << ','
         << (rec.quantum ? fmt17(rec.quantum->values[i]) : std::string()) << ','
         << (rec.echo ? fmt17(rec.echo->values[i]) : std::string()) << ','
         << fmt17(rec.semiclassical.values[i]) << ','
         << fmt17(rec.closed_form.values[i]) << '\n';
    }
    write_file(root / (rec.label + ".csv"), os.str());
  }

  if (want_gnuplot) {
    auto dump_channel = [&](const PuritySeries& s) {
      std::ostringstream os;
      os << "# " << rec.label << " channel=" << provenance_name(s.provenance)
         << " columns: delta_t I\n";
      for (size_t i = 0; i < times.size(); ++i)
        os << fmt17(rec.delta * times[i]) << ' ' << fmt17(s.values[i]) << '\n';
      write_file(root / (rec.label + "_" + provenance_name(s.provenance) + ".dat"),
                 os.str());
    };
    if (rec.quantum) dump_channel(*rec.quantum);
    if (rec.echo) dump_channel(*rec.echo);
    dump_channel(rec.semiclassical);
    dump_channel(rec.closed_form);
  }

  // metadata (wall-clock timing included, so this file is not byte-stable)
  json meta;
  meta["version"] = kVersion;
  meta["model"] = model_kind_name(rec.model);
  meta["hbar"] = rec.hbar;
  meta["delta"] = rec.delta;
  meta["j_star"] = rec.j_star;
  meta["gamma_a"] = rec.gamma_a;
  meta["gamma_b"] = rec.gamma_b;
  meta["offset"] = rec.delta_offset;
  meta["t_ave"] = rec.t_ave_hint;
  meta["mode_dims"] = rec.mode_dims;
  meta["decay_trace"] = rec.decay_trace;
  meta["decay_rank"] = rec.decay_rank;
  meta["hessian_norm"] = rec.metrics.hess_norm;
  if (std::isfinite(rec.metrics.validity_t_max))
    meta["validity_t_max"] = rec.metrics.validity_t_max;
  else
    meta["validity_t_max"] = nullptr;
  meta["wall_seconds"] = rec.wall_seconds;
  meta["warnings"] = rec.warnings;
  std::vector<std::string> channels;
  if (rec.quantum) channels.push_back(provenance_name(Provenance::quantum_full));
  if (rec.echo) channels.push_back(provenance_name(Provenance::quantum_echo));
  channels.push_back(provenance_name(Provenance::semiclassical));
  channels.push_back(provenance_name(Provenance::closed_form));
  meta["channels"] = channels;
  meta["propagation"] = {
      {"method", rec.propagation.method == PropMethod::krylov ? "krylov" : "chebyshev"},
      {"step_dt", rec.propagation.step_dt},
      {"krylov_dim", rec.propagation.krylov_dim},
      {"tolerance", rec.propagation.target_error_per_step},
      {"renormalize", rec.propagation.renormalize_each_step},
  };
  write_file(root / (rec.label + ".meta.json"), meta.dump(2) + "\n");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

RunRecord load_record(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("load_record: cannot open " + csv_path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("load_record: empty file " + csv_path);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "t,delta_t,I_quantum,I_echo,I_semiclassical,I_closed_form")
    throw std::runtime_error("load_record: unexpected header in " + csv_path);

  RunRecord rec;
  PuritySeries quantum, echo;
  bool any_quantum = false, any_echo = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6)
      throw std::runtime_error("load_record: malformed row in " + csv_path);
    double t = std::stod(f[0]);
    rec.semiclassical.times.push_back(t);
    rec.semiclassical.values.push_back(std::stod(f[4]));
    rec.closed_form.times.push_back(t);
    rec.closed_form.values.push_back(std::stod(f[5]));
    if (!f[2].empty()) {
      quantum.times.push_back(t);
      quantum.values.push_back(std::stod(f[2]));
      any_quantum = true;
    }
    if (!f[3].empty()) {
      echo.times.push_back(t);
      echo.values.push_back(std::stod(f[3]));
      any_echo = true;
    }
  }
  rec.semiclassical.provenance = Provenance::semiclassical;
  rec.closed_form.provenance = Provenance::closed_form;
  if (any_quantum) {
    quantum.provenance = Provenance::quantum_full;
    rec.quantum = std::move(quantum);
  }
  if (any_echo) {
    echo.provenance = Provenance::quantum_echo;
    rec.echo = std::move(echo);
  }

  fs::path meta_path = fs::path(csv_path);
  meta_path.replace_extension();
  meta_path += ".meta.json";
  rec.label = fs::path(csv_path).stem().string();
  if (fs::exists(meta_path)) {
    std::ifstream mf(meta_path);
    json meta = json::parse(mf, nullptr, true);
    std::string model = meta.value("model", "one_one");
    for (ModelKind k : {ModelKind::one_one, ModelKind::two_two_case1,
                        ModelKind::two_two_case2})
      if (model == model_kind_name(k)) rec.model = k;
    rec.hbar = meta.value("hbar", 0.0);
    rec.delta = meta.value("delta", 0.0);
    rec.j_star = meta.value("j_star", 0.0);
    rec.gamma_a = meta.value("gamma_a", 0.0);
    rec.gamma_b = meta.value("gamma_b", 0.0);
    rec.delta_offset = meta.value("offset", 0.0);
    rec.t_ave_hint = meta.value("t_ave", 10.0);
    rec.decay_trace = meta.value("decay_trace", 0.0);
    rec.decay_rank = meta.value("decay_rank", 0);
    rec.metrics.hess_norm = meta.value("hessian_norm", 0.0);
    if (meta.contains("validity_t_max") && !meta["validity_t_max"].is_null())
      rec.metrics.validity_t_max = meta["validity_t_max"].get<double>();
    if (meta.contains("mode_dims"))
      rec.mode_dims = meta["mode_dims"].get<std::vector<int>>();
  }
  return rec;
}

std::string resolve_output_dir(const ExperimentConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return ".";
}

}  // namespace entsim
