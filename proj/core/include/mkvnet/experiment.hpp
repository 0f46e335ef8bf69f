#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mkvnet/problem.hpp"

namespace mkvnet {

/// Flat `key = value` configuration; `#` starts a comment, lists are
/// comma separated. Unknown keys are rejected.
struct ExperimentConfig {
  std::string problem = "linear";  // linear | relu | constant
  std::vector<std::size_t> dims = {1, 2};
  std::vector<double> epsilons = {0.5, 0.25};
  double delta = 0.5;
  std::uint64_t seed = 1;
  std::size_t seed_count = 5;
  std::string output = "results";

  double drift_a = 0.0;
  double drift_b = -0.5;
  double horizon = 1.0;

  // equivalence
  std::vector<unsigned> levels = {0, 1, 2};
  std::vector<std::uint64_t> samples = {1, 4};
  std::size_t probes = 20;
  double tolerance = 1e-8;

  // bounds
  std::size_t particles = 10000;
  unsigned euler_steps = 200;
  std::size_t partners = 64;
  std::size_t brownian_samples = 100000;
  std::vector<double> perturbations = {0.05, 0.1, 0.2};
  std::size_t mlp_error_seeds = 100;

  // convergence
  std::vector<std::size_t> convergence_dims = {1, 5};
  std::uint64_t convergence_samples = 1000;
  std::size_t convergence_seeds = 50;
  std::size_t convergence_probes = 8;
  unsigned convergence_max_level = 3;

  // scaling
  std::vector<std::size_t> scaling_dims = {1, 2, 3};
  double scaling_c = 1.0;
  unsigned scaling_r = 1;
  double scaling_horizon = 0.1;
  std::size_t quadrature_points = 1024;
  double max_params = 2e7;
  unsigned desk_levels = 2;
  std::uint64_t desk_samples = 8;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

enum class Suite { equivalence, bounds, convergence, scaling, all };

std::optional<Suite> parse_suite(const std::string& name);

/// Problem named by config.problem in dimension d with horizon T.
TestProblem make_problem(const ExperimentConfig& config, std::size_t d, double T);

/// Runs the selected suites, writes <suite>.csv files into `out_dir` and a
/// one-line verdict per check to `log`. Returns 0 iff every check passed.
int run_suite(const ExperimentConfig& config, Suite suite, std::uint64_t seed,
              const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace mkvnet
