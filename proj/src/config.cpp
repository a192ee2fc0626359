#include "entsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace entsim {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + v);
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
  return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& section,
                        const std::string& key, const std::string& value) {
  auto fullkey = section + "." + key;
  if (section == "model") {
    if (key == "type") {
      if (value == "one_one")
        cfg.model = ModelKind::one_one;
      else if (value == "two_two_case1")
        cfg.model = ModelKind::two_two_case1;
      else if (value == "two_two_case2")
        cfg.model = ModelKind::two_two_case2;
      else
        throw ConfigError("config: unknown model type '" + value + "'");
    } else if (key == "gamma_a")
      cfg.gamma_a = parse_double(fullkey, value);
    else if (key == "gamma_b")
      cfg.gamma_b = parse_double(fullkey, value);
    else if (key == "offset")
      cfg.delta_offset = parse_double(fullkey, value);
    else if (key == "j_star")
      cfg.j_star = parse_double(fullkey, value);
    else if (key == "t_ave")
      cfg.t_ave_hint = parse_double(fullkey, value);
    else if (key == "hbar_list")
      cfg.hbar_list = parse_double_list(fullkey, value);
    else if (key == "delta_list")
      cfg.delta_list = parse_double_list(fullkey, value);
    else if (key == "quad_points")
      cfg.quad_points = parse_int(fullkey, value);
    else if (key == "mode_dims") {
      if (value == "auto") {
        cfg.truncation = TruncationPolicy{};
      } else {
        cfg.truncation.automatic = false;
        cfg.truncation.explicit_dims.clear();
        for (const auto& item : split_list(value))
          cfg.truncation.explicit_dims.push_back(parse_int(fullkey, item));
        if (cfg.truncation.explicit_dims.empty())
          throw ConfigError("config: empty mode_dims list");
      }
    } else
      throw ConfigError("config: unknown key '" + fullkey + "'");
  } else if (section == "grid") {
    if (key == "t_max_over_td")
      cfg.grid.t_max_over_td = parse_double(fullkey, value);
    else if (key == "t_min_over_td")
      cfg.grid.t_min_over_td = parse_double(fullkey, value);
    else if (key == "samples")
      cfg.grid.samples = parse_int(fullkey, value);
    else if (key == "spacing") {
      if (value == "linear")
        cfg.grid.log_spacing = false;
      else if (value == "log")
        cfg.grid.log_spacing = true;
      else
        throw ConfigError("config: spacing must be linear or log");
    } else
      throw ConfigError("config: unknown key '" + fullkey + "'");
  } else if (section == "propagation") {
    if (key == "method") {
      if (value == "krylov")
        cfg.propagation.method = PropMethod::krylov;
      else if (value == "chebyshev")
        cfg.propagation.method = PropMethod::chebyshev;
      else
        throw ConfigError("config: method must be krylov or chebyshev");
    } else if (key == "step_dt")
      cfg.propagation.step_dt = parse_double(fullkey, value);
    else if (key == "krylov_dim")
      cfg.propagation.krylov_dim = parse_int(fullkey, value);
    else if (key == "tolerance")
      cfg.propagation.target_error_per_step = parse_double(fullkey, value);
    else if (key == "renormalize")
      cfg.propagation.renormalize_each_step = parse_bool(fullkey, value);
    else if (key == "apply_threads")
      cfg.propagation.apply_threads = parse_int(fullkey, value);
    else if (key == "echo")
      cfg.compute_echo = parse_bool(fullkey, value);
    else if (key == "quantum")
      cfg.compute_quantum = parse_bool(fullkey, value);
    else
      throw ConfigError("config: unknown key '" + fullkey + "'");
  } else if (section == "output") {
    if (key == "dir")
      cfg.output_dir = value;
    else if (key == "formats") {
      cfg.formats = split_list(value);
      for (const auto& f : cfg.formats)
        if (f != "csv" && f != "gnuplot")
          throw ConfigError("config: unknown format '" + f + "'");
      if (cfg.formats.empty()) throw ConfigError("config: empty formats list");
    } else if (key == "max_parallel")
      cfg.max_parallel = parse_int(fullkey, value);
    else
      throw ConfigError("config: unknown key '" + fullkey + "'");
  } else {
    throw ConfigError("config: unknown section '" + section + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base) {
  ExperimentConfig cfg = std::move(base);
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("config: malformed section header at line " +
                          std::to_string(lineno));
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " +
                        std::to_string(lineno));
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (section.empty())
      throw ConfigError("config: key outside any [section] at line " +
                        std::to_string(lineno));
    if (key.empty()) throw ConfigError("config: empty key at line " + std::to_string(lineno));
    apply_config_entry(cfg, section, key, value);
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::string config_schema_text() {
  return R"([model]
type          = one_one | two_two_case1 | two_two_case2
gamma_a       = <real>        anharmonicity of side A (gamma_1 for 2+2)
gamma_b       = <real>        anharmonicity of side B (gamma_2 for 2+2)
offset        = <real>        action offset in H0
j_star        = <real>        packet action center
t_ave         = <real>        classical averaging time, metrics only
hbar_list     = <real>[,<real>...]
delta_list    = <real>[,<real>...]
quad_points   = <int>         angle-grid points for the torus average
mode_dims     = auto | <int>[,<int>...]

[grid]
t_max_over_td = <real>        t_max = value / delta
t_min_over_td = <real>        first sample (log spacing only)
samples       = <int>
spacing       = linear | log

[propagation]
method        = krylov | chebyshev
step_dt       = <real>        max internal step
krylov_dim    = <int>
tolerance     = <real>        target error per step
renormalize   = <bool>
apply_threads = <int>         0 = auto
echo          = <bool>        also evolve under the averaged coupling
quantum       = <bool>        full quantum channel (off: prediction only)

[output]
dir           = <path>        default $ENTSIM_OUTPUT_ROOT or .
formats       = csv[,gnuplot]
max_parallel  = <int>         sweep cells in flight, 0 = hardware
)";
}

}  // namespace entsim
