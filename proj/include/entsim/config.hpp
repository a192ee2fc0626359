#pragma once

#include <stdexcept>
#include <string>

#include "entsim/harness.hpp"

namespace entsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key-value config with [model] / [grid] / [propagation] / [output]
/// sections. Unknown sections or keys are rejected.
ExperimentConfig parse_config_text(const std::string& text,
                                   ExperimentConfig base = {});
ExperimentConfig parse_config_file(const std::string& path,
                                   ExperimentConfig base = {});

/// Apply one "section.key = value" setting; used by both the file parser
/// and CLI flag overrides.
void apply_config_entry(ExperimentConfig& cfg, const std::string& section,
                        const std::string& key, const std::string& value);

/// Schema description for --help and the README.
std::string config_schema_text();

}  // namespace entsim
