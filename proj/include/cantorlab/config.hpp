#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cantorlab/params.hpp"

namespace cantorlab {

// Plain key = value text, '#' starts a comment. Lists are comma separated.
// Explicit s/t/n override the generator; give all three or none.
struct ExperimentConfig {
  int d = 2;
  double alpha = 1.5;
  double beta = 1.5;
  int stages = 5;

  std::vector<int> n_schedule;  // empty: 8, 10, 12, ... per stage
  std::vector<int> s_override;
  std::vector<int> t_override;
  std::vector<int> n_override;

  double c_ratio = 4.0;
  std::uint64_t seed = 1;
  int retry_budget = 50;

  int r = 2;
  std::vector<double> p_list;  // defaults to {2, 4, 6}
  double grid_max_factor = 10.0;
  int grid_points_per_decade = 192;
  int samples = 10000;
  std::string out_dir = "out";
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Fixed key order and %.17g floats, so the hash is reproducible. Covers the
// experiment parameters only; out_dir is excluded on purpose.
std::string canonical_text(const ExperimentConfig& cfg);

// FNV-1a over the canonical text, 16 hex digits. Echoed into every artifact.
std::string config_hash(const ExperimentConfig& cfg);

ParamSequences make_sequences(const ExperimentConfig& cfg);

}  // namespace cantorlab
