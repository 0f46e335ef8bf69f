#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mkvnet/problem.hpp"

namespace mkvnet {

struct ParticleConfig {
  std::size_t particles = 10000;
  unsigned euler_steps = 200;
  std::uint64_t master_seed = 1;
  /// Each particle sees the mean of mu against this many fixed partners
  /// drawn from the other particles instead of all M - 1.
  std::size_t partners = 64;

  void validate() const;
};

/// Interacting particle system
///   X_i <- X_i + dt (1/J) sum_{j in P(i)} mu(X_i, X_j) + sqrt(dt) Z_i
/// started at X_i(0) = x. Noise and partner sets depend only on the seed, so
/// two systems with the same config share their randomness.
class ParticleSystem {
 public:
  ParticleSystem(const TestProblem& problem, const ParticleConfig& cfg, std::span<const double> x);

  void step();
  void run();
  unsigned steps_taken() const { return step_; }
  double time() const;

  std::size_t size() const { return cfg_.particles; }
  const ParticleConfig& config() const { return cfg_; }
  const TestProblem& problem() const { return *problem_; }
  std::span<const double> state(std::size_t i) const;
  const std::vector<double>& states() const { return x_; }

  /// (1/|S|) sum_{j in S} mu(y, X_j) over the first `count` particles.
  std::vector<double> mean_drift(std::span<const double> y, std::size_t count) const;

 private:
  void refresh_right_inputs();
  // Mean over partners of mu(y, X_j), given the y-part of the first-layer
  // pre-activation.
  void drift_from(std::span<const double> left, std::span<const std::uint32_t> partners,
                  std::span<double> out) const;

  const TestProblem* problem_;
  ParticleConfig cfg_;
  std::size_t d_;
  double dt_;
  unsigned step_ = 0;
  std::vector<double> x_;
  std::vector<std::uint32_t> partners_;
  std::size_t width1_;
  std::vector<double> right_;  // W_1 (0, X_j) for every particle, M x width1
};

struct BoundCheckResult {
  std::string name;
  double empirical = 0.0;
  /// One-sided 99% upper confidence limit for the estimated quantity.
  double upper = 0.0;
  double bound = 0.0;
  /// empirical <= bound
  bool satisfied = false;
  std::size_t samples = 0;

  bool confident() const { return upper <= bound; }
};

/// One-sided 99% normal quantile.
inline constexpr double kZ99 = 2.3263478740408408;

double particle_mean_payoff(const TestProblem& problem, const ParticleConfig& cfg,
                            std::span<const double> x);

/// (E |X(T)|^{pr})^{1/pr} against (|x| + T |mu(0,0)| + sqrt(T(d+2pr))) e^{cT}.
BoundCheckResult check_moment_bound(const TestProblem& problem, const ParticleConfig& cfg,
                                    std::span<const double> x, unsigned p);
/// Same, on a system that has already been run to T from x.
BoundCheckResult check_moment_bound(const ParticleSystem& finished, std::span<const double> x,
                                    unsigned p);

/// Coupled systems for base and perturbed problems on common noise.
/// First: |X^eps(T) - X^0(T)|_{L^p}; second: |f_eps(X^eps(T)) - f_0(X^0(T))|_{L^p}.
std::pair<BoundCheckResult, BoundCheckResult> check_perturbation_bounds(
    const TestProblem& base, const TestProblem& perturbed, double eps, const ParticleConfig& cfg,
    std::span<const double> x, unsigned p);
/// Same, reusing a finished run of the base problem; the perturbed system
/// gets the same config.
std::pair<BoundCheckResult, BoundCheckResult> check_perturbation_bounds(
    const ParticleSystem& base_finished, const TestProblem& perturbed, double eps,
    std::span<const double> x, unsigned p);

/// c e^{m/2} / m^{n/2} (|x| + c d^c) e^{3cTn}
double mlp_error_bound(const TestProblem& problem, unsigned n, unsigned m,
                       std::span<const double> x);

/// (E |W(t)|^{pr})^{1/pr} against sqrt(t(d + 2pr)).
BoundCheckResult check_brownian_moment(std::size_t d, unsigned p, unsigned r, double t,
                                       std::size_t samples, std::uint64_t seed);

/// RMS over `samples` noise trees of |X_n^{(1),x}(T) - Y(T)|, where Y is an
/// Euler path driven by the same W^{(1)} as the estimator, with the mean-field
/// drift taken from a particle system. Compared with mlp_error_bound.
BoundCheckResult check_mlp_error_domination(const TestProblem& problem, const ParticleConfig& cfg,
                                            unsigned n, unsigned m, std::span<const double> x,
                                            std::size_t samples, std::uint64_t tree_seed);

}  // namespace mkvnet
