#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mkvnet/noise_tree.hpp"
#include "mkvnet/problem.hpp"

namespace mkvnet {

struct MlpParams {
  unsigned n = 0;
  unsigned m = 1;
  std::uint64_t K = 1;
  double t = 0.0;

  /// Throws std::invalid_argument unless m >= 1, K >= 1 and 0 <= t <= T.
  void validate(double T) const;
};

/// Index k of the largest grid point k T / m^n that does not exceed t.
std::uint64_t grid_index(double t, unsigned m, unsigned n, double T);

/// floor(t m^n / T) T / m^n, clamped to [0, T]. Throws for t outside [0, T].
double floor_to_grid(double t, unsigned m, unsigned n, double T);

/// X_n^{theta,x}(t) for the fixed noise realization in `tree`.
///
/// X_0 = 0 and for n >= 1
///   X_n(t) = x + W^theta(floor_to_grid(t, m, n)) + t mu(0,0)
///          + sum_{l=1}^{n-1} sum_{k=1}^{m^{n-l}} t / m^{n-l}
///              [mu(X_l^theta(s), X_l^{theta'}(s)) - mu(X_{l-1}^theta(s), X_{l-1}^{theta'}(s))]
/// with theta' = (theta, n, k, l) and s = t^{theta'} t.
///
/// Throws std::domain_error if n exceeds the tree's grid levels or the tree
/// was built for a different m, T or d.
std::vector<double> mlp_estimate(const TestProblem& problem, const NoiseTree& tree,
                                 const ThetaIndex& theta, unsigned n, unsigned m, double t,
                                 std::span<const double> x);

/// (1/K) sum_{i=1}^K f(X_n^{(i),x}(T)).
double monte_carlo_payoff(const TestProblem& problem, const NoiseTree& tree, std::uint64_t K,
                          unsigned n, unsigned m, std::span<const double> x);

/// Checks that `tree` can serve level-n queries with branching m for `problem`.
void check_tree_compatible(const TestProblem& problem, const NoiseTree& tree, unsigned n,
                           unsigned m);

}  // namespace mkvnet
