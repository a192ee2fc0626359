#pragma once

#include <limits>
#include <optional>
#include <string>

#include "entsim/entanglement.hpp"
#include "entsim/model.hpp"
#include "entsim/propagator.hpp"
#include "entsim/semiclassics.hpp"

namespace entsim {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputRootEnv = "ENTSIM_OUTPUT_ROOT";

enum class ModelKind { one_one, two_two_case1, two_two_case2 };

const char* model_kind_name(ModelKind k);

struct GridSpec {
  double t_max_over_td = 3.0;  // t_max = t_max_over_td / delta (scaled time)
  double t_min_over_td = 0.0;  // required > 0 for log spacing
  int samples = 61;
  bool log_spacing = false;
};

struct TruncationPolicy {
  bool automatic = true;
  std::vector<int> explicit_dims;
};

struct ExperimentConfig {
  ModelKind model = ModelKind::one_one;
  double gamma_a = 1.0;     // gamma_A (1+1) or gamma_1 (2+2)
  double gamma_b = 0.6456;  // gamma_B (1+1) or gamma_2 (2+2)
  double delta_offset = 1.2;
  double j_star = 0.1;
  double t_ave_hint = 10.0;  // classical averaging time, used only in metrics
  std::vector<double> hbar_list{0.01};
  std::vector<double> delta_list{0.04};
  int quad_points = 16;
  GridSpec grid;
  TruncationPolicy truncation;
  PropagationConfig propagation;  // apply_threads 0 = auto
  bool compute_echo = false;
  bool compute_quantum = true;
  std::string output_dir;  // empty: $ENTSIM_OUTPUT_ROOT or "."
  std::vector<std::string> formats{"csv"};
  int max_parallel = 0;  // sweep-cell parallelism, 0 = hardware
};

struct SlopeFit {
  bool available = false;
  double slope = 0.0;
  double std_error = 0.0;
  int n_points = 0;
};

/// Least-squares slope of log I vs log(delta*t) over samples with
/// value_lo < I < value_hi, t <= t_cap and I >= value_floor.
SlopeFit fit_loglog_slope(const PuritySeries& series, double delta,
                          double value_lo = 0.001, double value_hi = 0.1,
                          double t_cap = std::numeric_limits<double>::infinity(),
                          double value_floor = 0.0);

struct ComparisonMetrics {
  double validity_t_max = std::numeric_limits<double>::infinity();
  double hess_norm = 0.0;
  // quantum vs semiclassical, over t_ave < t <= validity_t_max
  double max_rel_dev = std::numeric_limits<double>::quiet_NaN();
  // echo vs quantum over the whole grid (when both present)
  double max_rel_dev_echo = std::numeric_limits<double>::quiet_NaN();
  SlopeFit slope_quantum;
  SlopeFit slope_semiclassical;
  PlateauStats plateau;
  bool plateau_available = false;
};

struct RunRecord {
  ModelKind model = ModelKind::one_one;
  double hbar = 0.0;
  double delta = 0.0;
  double j_star = 0.0;
  double gamma_a = 0.0;
  double gamma_b = 0.0;
  double delta_offset = 0.0;
  double t_ave_hint = 10.0;
  PropagationConfig propagation;
  std::vector<int> mode_dims;
  std::optional<PuritySeries> quantum;
  std::optional<PuritySeries> echo;
  PuritySeries semiclassical;
  PuritySeries closed_form;
  ComparisonMetrics metrics;
  double decay_trace = 0.0;  // tr u
  int decay_rank = 0;
  double wall_seconds = 0.0;
  std::string label;
  std::vector<std::string> warnings;
};

/// Default per-mode truncation: ceil(j*/hbar + 8 sqrt(j*/hbar)) + 4.
std::vector<int> default_mode_dims(ModelKind kind, double j_star, double hbar);

ModelSpec build_model(const ExperimentConfig& cfg, double hbar, double delta,
                      const SpaceConfig& space);

/// Closed-form purity curve at scaled time delta*t for the given model with
/// coherent packets at j_star.
double closed_form_purity(ModelKind kind, double j_star, double delta_t);

/// Single (hbar, delta) cell: quantum evolution, optional echo channel,
/// semiclassical prediction chain, closed form, and comparison metrics.
RunRecord run_experiment(const ExperimentConfig& cfg, double hbar, double delta);

struct SweepOutcome {
  std::vector<RunRecord> records;
  std::vector<std::string> failures;  // per-cell error descriptions
};

/// Cartesian product hbar_list x delta_list as isolated parallel tasks.
SweepOutcome run_sweep(const ExperimentConfig& cfg);

struct AnalysisRow {
  std::string label;
  ModelKind model = ModelKind::one_one;
  double hbar = 0.0;
  double delta = 0.0;
  SlopeFit slope_quantum;
  SlopeFit slope_semiclassical;
  double max_rel_dev = std::numeric_limits<double>::quiet_NaN();
  PlateauStats plateau;
  bool plateau_available = false;
  double validity_t_max = std::numeric_limits<double>::infinity();
};

struct AnalysisSummary {
  std::vector<AnalysisRow> rows;
  std::string to_text() const;
  std::string to_csv() const;
};

AnalysisSummary analyze(const std::vector<RunRecord>& records);

/// Write the record under dir: delimited data file plus metadata; formats
/// are "csv" and/or "gnuplot".
void emit(const RunRecord& record, const std::string& dir,
          std::span<const std::string> formats);

/// Reload a record from an emitted CSV (and its .meta.json neighbour).
RunRecord load_record(const std::string& csv_path);

std::string resolve_output_dir(const ExperimentConfig& cfg);
std::string record_label(ModelKind kind, double hbar, double delta);

}  // namespace entsim
