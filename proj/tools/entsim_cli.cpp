// Command-line front end: run / sweep / predict / analyze / mc-oracle.
// Exit codes: 0 success, 1 config error, 2 numerical failure,
// 3 partial sweep failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "entsim/config.hpp"
#include "entsim/states.hpp"

namespace fs = std::filesystem;
using namespace entsim;

namespace {

struct FlagSet {
  std::optional<std::string> config_path;
  // (section, key) -> raw value, applied on top of the config file
  std::vector<std::tuple<std::string, std::string, std::string>> overrides;
};

void add_common_flags(CLI::App* cmd, FlagSet& flags) {
  cmd->add_option("--config", flags.config_path, "config file (overrides defaults)");
  auto opt = [cmd, &flags](const std::string& name, const std::string& section,
                           const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        name,
        [&flags, section, key](const std::string& v) {
          flags.overrides.emplace_back(section, key, v);
        },
        help);
  };
  opt("--type", "model", "type", "one_one | two_two_case1 | two_two_case2");
  opt("--gamma-a", "model", "gamma_a", "anharmonicity, side A");
  opt("--gamma-b", "model", "gamma_b", "anharmonicity, side B");
  opt("--offset", "model", "offset", "action offset in H0");
  opt("--j-star", "model", "j_star", "packet action center");
  opt("--t-ave", "model", "t_ave", "classical averaging time (metrics only)");
  opt("--hbar", "model", "hbar_list", "hbar value(s), comma separated");
  opt("--delta", "model", "delta_list", "coupling strength(s), comma separated");
  opt("--quad-points", "model", "quad_points", "torus-average grid points per angle");
  opt("--mode-dims", "model", "mode_dims", "auto or explicit dims");
  opt("--t-max-over-td", "grid", "t_max_over_td", "grid end in units of 1/delta");
  opt("--t-min-over-td", "grid", "t_min_over_td", "grid start (log spacing)");
  opt("--samples", "grid", "samples", "number of sample times");
  opt("--spacing", "grid", "spacing", "linear | log");
  opt("--method", "propagation", "method", "krylov | chebyshev");
  opt("--step-dt", "propagation", "step_dt", "max internal step");
  opt("--krylov-dim", "propagation", "krylov_dim", "Krylov subspace size");
  opt("--tolerance", "propagation", "tolerance", "target error per step");
  opt("--renormalize", "propagation", "renormalize", "renormalize each step");
  opt("--apply-threads", "propagation", "apply_threads", "matvec threads, 0 = auto");
  opt("--echo", "propagation", "echo", "also evolve under the averaged coupling");
  opt("--output-dir", "output", "dir", "output directory");
  opt("--formats", "output", "formats", "csv[,gnuplot]");
  opt("--max-parallel", "output", "max_parallel", "sweep cells in flight, 0 = hardware");
}

ExperimentConfig resolve_config(const FlagSet& flags) {
  ExperimentConfig cfg;
  if (flags.config_path) cfg = parse_config_file(*flags.config_path, cfg);
  for (const auto& [section, key, value] : flags.overrides)
    apply_config_entry(cfg, section, key, value);
  return cfg;
}

void print_record_brief(const RunRecord& rec) {
  std::printf("%s: dims", rec.label.c_str());
  for (int d : rec.mode_dims) std::printf(" %d", d);
  std::printf(", tr(u)=%g rank=%d", rec.decay_trace, rec.decay_rank);
  if (std::isfinite(rec.metrics.validity_t_max))
    std::printf(", validity t<=%g", rec.metrics.validity_t_max);
  if (!std::isnan(rec.metrics.max_rel_dev))
    std::printf(", max|Iq-Isc|/Isc=%.3g", rec.metrics.max_rel_dev);
  std::printf(" (%.1fs)\n", rec.wall_seconds);
  for (const auto& w : rec.warnings) std::printf("  warning: %s\n", w.c_str());
}

int cmd_run(const FlagSet& flags, bool quantum) {
  ExperimentConfig cfg = resolve_config(flags);
  cfg.compute_quantum = quantum && cfg.compute_quantum;
  if (cfg.hbar_list.size() != 1 || cfg.delta_list.size() != 1)
    throw ConfigError("run/predict: exactly one hbar and one delta required "
                      "(use sweep for grids)");
  RunRecord rec = run_experiment(cfg, cfg.hbar_list[0], cfg.delta_list[0]);
  std::string dir = resolve_output_dir(cfg);
  emit(rec, dir, cfg.formats);
  print_record_brief(rec);
  std::printf("wrote %s/%s.csv\n", dir.c_str(), rec.label.c_str());
  return 0;
}

int cmd_sweep(const FlagSet& flags) {
  ExperimentConfig cfg = resolve_config(flags);
  SweepOutcome outcome = run_sweep(cfg);
  std::string dir = resolve_output_dir(cfg);
  for (const auto& rec : outcome.records) {
    emit(rec, dir, cfg.formats);
    print_record_brief(rec);
  }
  AnalysisSummary summary = analyze(outcome.records);
  std::ofstream out(fs::path(dir) / "summary.csv");
  out << summary.to_csv();
  std::printf("%s", summary.to_text().c_str());
  for (const auto& f : outcome.failures)
    std::fprintf(stderr, "cell failed: %s\n", f.c_str());
  if (outcome.records.empty() && !outcome.failures.empty()) return 2;
  if (!outcome.failures.empty()) return 3;
  return 0;
}

int cmd_analyze(const FlagSet& flags, const std::vector<std::string>& inputs) {
  ExperimentConfig cfg = resolve_config(flags);
  std::vector<std::string> paths;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        auto p = e.path();
        if (p.extension() == ".csv" && p.filename() != "summary.csv")
          paths.push_back(p.string());
      }
    } else {
      paths.push_back(in);
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw ConfigError("analyze: no input CSV files");
  std::vector<RunRecord> records;
  for (const auto& p : paths) records.push_back(load_record(p));
  AnalysisSummary summary = analyze(records);
  std::string dir = resolve_output_dir(cfg);
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / "summary.csv");
  out << summary.to_csv();
  std::printf("%s", summary.to_text().c_str());
  return 0;
}

int cmd_mc_oracle(const FlagSet& flags, const std::string& delta_t_list,
                  long n_samples, std::uint64_t seed) {
  ExperimentConfig cfg = resolve_config(flags);
  if (cfg.hbar_list.size() != 1 || cfg.delta_list.size() != 1)
    throw ConfigError("mc-oracle: exactly one hbar and one delta required");
  const double hbar = cfg.hbar_list[0], delta = cfg.delta_list[0];

  // model only supplies the classical coupling; no operators are built
  std::vector<int> dims(cfg.model == ModelKind::one_one ? 2 : 4, 4);
  ModelSpec model = build_model(cfg, hbar, delta, SpaceConfig(dims));
  ClassicalCoupling coupling{model.classical_coupling, model.d_a_modes,
                             model.d_b_modes};
  ClassicalFn vbar = averaged_coupling(coupling, cfg.quad_points);
  std::vector<double> js(model.d_a_modes + model.d_b_modes, cfg.j_star);
  Eigen::MatrixXd hess = mixed_hessian(vbar, js, model.d_a_modes, model.d_b_modes,
                                       default_fd_step(js));
  PacketSpec packet = PacketSpec::coherent(cfg.j_star, model.d_a_modes, model.d_b_modes);
  DecayMatrix u = decay_matrix(packet, hess);

  std::printf("# delta_t  mc_estimate  std_error  prediction  |diff|/stderr\n");
  std::stringstream ss(delta_t_list);
  std::string item;
  bool any = false;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    any = true;
    double dt_scaled = std::stod(item);
    double t = delta > 0.0 ? dt_scaled / delta : dt_scaled;
    McEstimate est = phase_space_purity_mc(vbar, packet, hbar, delta, t, n_samples, seed);
    double pred = purity_prediction(u, delta, t);
    double sigmas = est.std_error > 0.0 ? std::abs(est.value - pred) / est.std_error : 0.0;
    std::printf("%-9g %-12.8f %-10.2e %-11.8f %.2f\n", dt_scaled, est.value,
                est.std_error, pred, sigmas);
    if (est.std_error > 0.01)
      std::fprintf(stderr, "warning: variance blow-up at delta_t=%g (stderr %.3g)\n",
                   dt_scaled, est.std_error);
  }
  if (!any) throw ConfigError("mc-oracle: empty --delta-t list");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bipartite purity decay in integrable bosonic systems"};
  app.require_subcommand(1);

  FlagSet run_flags, sweep_flags, predict_flags, analyze_flags, mc_flags;

  CLI::App* run = app.add_subcommand("run", "single (hbar, delta) experiment");
  add_common_flags(run, run_flags);

  CLI::App* sweep = app.add_subcommand("sweep", "hbar x delta grid of experiments");
  add_common_flags(sweep, sweep_flags);

  CLI::App* predict =
      app.add_subcommand("predict", "semiclassical prediction only, no evolution");
  add_common_flags(predict, predict_flags);

  std::vector<std::string> analyze_inputs;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "post-process emitted CSV files");
  add_common_flags(analyze_cmd, analyze_flags);
  analyze_cmd->add_option("inputs", analyze_inputs, "CSV files or directories")
      ->required();

  std::string mc_delta_t = "0.5,1,2";
  long mc_samples = 1000000;
  std::uint64_t mc_seed = 12345;
  CLI::App* mc = app.add_subcommand("mc-oracle",
                                    "Monte-Carlo phase-space check of the prediction");
  add_common_flags(mc, mc_flags);
  mc->add_option("--delta-t", mc_delta_t, "scaled times, comma separated");
  mc->add_option("--n-samples", mc_samples, "Monte-Carlo sample count");
  mc->add_option("--seed", mc_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags, true);
    if (sweep->parsed()) return cmd_sweep(sweep_flags);
    if (predict->parsed()) return cmd_run(predict_flags, false);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_flags, analyze_inputs);
    if (mc->parsed()) return cmd_mc_oracle(mc_flags, mc_delta_t, mc_samples, mc_seed);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
