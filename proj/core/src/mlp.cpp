#include "mkvnet/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mkvnet {

namespace {

std::uint64_t ipow(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

void MlpParams::validate(double T) const {
  if (m == 0) throw std::invalid_argument("MlpParams: m must be >= 1");
  if (K == 0) throw std::invalid_argument("MlpParams: K must be >= 1");
  if (!(t >= 0.0) || t > T) throw std::invalid_argument("MlpParams: t must lie in [0, T]");
}

std::uint64_t grid_index(double t, unsigned m, unsigned n, double T) {
  if (!(t >= 0.0) || t > T) {
    throw std::domain_error("floor_to_grid: t = " + std::to_string(t) + " outside [0, T]");
  }
  if (m == 0) throw std::invalid_argument("floor_to_grid: m must be >= 1");
  const std::uint64_t steps = ipow(m, n);
  const double k = std::floor(t / T * static_cast<double>(steps));
  return std::min(static_cast<std::uint64_t>(k), steps);
}

double floor_to_grid(double t, unsigned m, unsigned n, double T) {
  const std::uint64_t steps = ipow(m, n);
  const std::uint64_t k = grid_index(t, m, n, T);
  if (k == steps) return T;
  return static_cast<double>(k) * T / static_cast<double>(steps);
}

void check_tree_compatible(const TestProblem& problem, const NoiseTree& tree, unsigned n,
                           unsigned m) {
  if (tree.dim() != problem.d) throw std::domain_error("noise tree dimension differs from d");
  if (tree.horizon() != problem.T) throw std::domain_error("noise tree horizon differs from T");
  if (n == 0) return;
  if (n > tree.grid_levels()) {
    throw std::domain_error("level " + std::to_string(n) + " exceeds noise tree grid levels (" +
                            std::to_string(tree.grid_levels()) + ")");
  }
  if (m != tree.branching()) throw std::domain_error("noise tree built for a different m");
}

std::vector<double> mlp_estimate(const TestProblem& problem, const NoiseTree& tree,
                                 const ThetaIndex& theta, unsigned n, unsigned m, double t,
                                 std::span<const double> x) {
  check_tree_compatible(problem, tree, n, m);
  const std::size_t d = problem.d;
  if (x.size() != d) throw std::invalid_argument("mlp_estimate: x must have length d");
  if (n == 0) return std::vector<double>(d, 0.0);

  const double T = problem.T;
  const std::uint64_t k = grid_index(t, m, n, T);
  std::vector<double> out(d);
  tree.brownian_into(theta, k * ipow(m, tree.grid_levels() - n), out);
  const std::vector<double> mu0 = problem.mu_at_origin();
  for (std::size_t j = 0; j < d; ++j) out[j] += x[j] + t * mu0[j];

  for (unsigned l = 1; l < n; ++l) {
    const std::uint64_t reps = ipow(m, n - l);
    const double weight = t / static_cast<double>(reps);
    for (std::uint64_t kk = 1; kk <= reps; ++kk) {
      const ThetaIndex child = theta.child(n, static_cast<std::uint32_t>(kk), l);
      const double s = tree.uniform_time(child) * t;
      const auto hi = problem.mu(mlp_estimate(problem, tree, theta, l, m, s, x),
                                 mlp_estimate(problem, tree, child, l, m, s, x));
      const auto lo = problem.mu(mlp_estimate(problem, tree, theta, l - 1, m, s, x),
                                 mlp_estimate(problem, tree, child, l - 1, m, s, x));
      for (std::size_t j = 0; j < d; ++j) out[j] += weight * (hi[j] - lo[j]);
    }
  }
  return out;
}

double monte_carlo_payoff(const TestProblem& problem, const NoiseTree& tree, std::uint64_t K,
                          unsigned n, unsigned m, std::span<const double> x) {
  if (K == 0) throw std::invalid_argument("monte_carlo_payoff: K must be >= 1");
  double sum = 0.0;
  for (std::uint64_t i = 1; i <= K; ++i) {
    const ThetaIndex theta{static_cast<std::uint32_t>(i)};
    sum += problem.f(mlp_estimate(problem, tree, theta, n, m, problem.T, x));
  }
  return sum / static_cast<double>(K);
}

}  // namespace mkvnet
