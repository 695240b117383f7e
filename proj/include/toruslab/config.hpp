#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toruslab/convergence.hpp"
#include "toruslab/mesh.hpp"

namespace toruslab {

struct RunConfig {
  int grid = 32;
  MetricSpec metric;
  double eps = 1.0;  // perturbation scale of the single-metric stages
  FamilyParams params;
  std::vector<double> sweep_eps;
  std::string output_dir = "out";
};

/// Parses and validates a JSON config; errors name the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Throws ConfigError for out-of-range values.
void validate_config(const RunConfig& config);

/// A symmetric 3x3 matrix from a JSON file holding either nine numbers or three rows,
/// optionally under the key "gram".
Mat3 load_gram(const std::string& path);

}  // namespace toruslab
