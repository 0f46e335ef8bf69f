#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mkvnet/network.hpp"
#include "mkvnet/noise_tree.hpp"
#include "mkvnet/problem.hpp"

namespace mkvnet {

struct SynthesisReport {
  NeuralNetwork network;
  std::size_t depth = 0;
  std::size_t width_supnorm = 0;
  std::uint64_t param_count = 0;
  std::size_t predicted_depth = 0;
  std::uint64_t predicted_width_bound = 0;
};

/// Smallest integer c with 2c >= max{4d, |D(mu)|}.
std::uint64_t mlp_width_constant(const TestProblem& problem);
/// max{4d, |D(mu)|, |D(f)|}.
std::uint64_t mc_width_constant(const TestProblem& problem);

/// Network realizing x -> X_n^{theta,x}(t) for the noise fixed in `tree`.
///
/// Level n is the scaled sum of an affine-wrapped identity network carrying
/// x + W^theta + t mu(0,0) and, for every (l, k), the two networks
/// mu o Id o (Phi_l^theta, Phi_l^{theta'}) and mu o Id o (Phi_{l-1}^theta, Phi_{l-1}^{theta'})
/// with weights +-t/m^{n-l}. The identity networks pad every summand to the
/// common depth. Sub-networks are rebuilt for every node, never shared.
SynthesisReport synthesize_mlp_network(const TestProblem& problem, const NoiseTree& tree,
                                       const ThetaIndex& theta, unsigned n, unsigned m, double t);

/// Network realizing x -> (1/K) sum_{i=1}^K f(X_n^{(i),x}(T)).
SynthesisReport synthesize_mc_network(const TestProblem& problem, const NoiseTree& tree,
                                      std::uint64_t K, unsigned n, unsigned m);

/// Layer widths stored as long double so that predictions for networks far
/// too large to build stay representable.
using WidthProfile = std::vector<long double>;

WidthProfile predict_mlp_dims(std::size_t d, const DimVector& mu_dims, unsigned n, unsigned m);
WidthProfile predict_mc_dims(std::size_t d, const DimVector& mu_dims, const DimVector& f_dims,
                             unsigned n, unsigned m, long double K);
long double profile_param_count(const WidthProfile& widths);
long double profile_supnorm(const WidthProfile& widths);

/// i-th point (i >= 1) of the Halton sequence in [0,1]^d.
std::vector<double> halton_point(std::uint64_t i, std::size_t d);

/// sqrt of the mean of (R(net)(x) - reference(x))^2 over Halton points 1..count.
double l2_error(const NeuralNetwork& net, const std::function<double(std::span<const double>)>& reference,
                std::size_t d, std::size_t count);

struct PipelineOptions {
  std::size_t probe_points = 1024;
  /// Master seeds tried in order until the measured error drops below epsilon.
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  /// Networks whose predicted parameter count exceeds this are not built.
  long double max_params = 2.0e7L;
  /// Override the selected n = m and K, e.g. for desk-scale runs.
  std::optional<unsigned> fixed_levels;
  std::optional<std::uint64_t> fixed_samples;
  /// Reference E[f(X_T^x)]; defaults to the problem's closed form.
  std::function<double(std::span<const double>)> reference;
};

enum class PipelineStatus { ok, retries_exhausted, exceeds_budget };

const char* to_string(PipelineStatus s);

struct PipelineResult {
  PipelineStatus status = PipelineStatus::exceeds_budget;
  double small_epsilon = 0.0;
  unsigned selected_N = 0;
  unsigned levels = 0;
  long double samples = 0;
  long double predicted_params = 0;
  long double log_param_bound = 0;
  std::optional<SynthesisReport> report;
  double measured_error = 0.0;
  std::uint64_t seed = 0;
  std::size_t attempts = 0;
};

/// Selects (small epsilon, N), synthesizes Psi with n = m = N and K = N^N,
/// and measures its L2([0,1]^d) error, retrying over master seeds.
PipelineResult theorem_pipeline(const TestProblem& problem, double epsilon, double delta,
                                const PipelineOptions& options = {});

}  // namespace mkvnet
