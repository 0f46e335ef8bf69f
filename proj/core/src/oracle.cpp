#include "mkvnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "mkvnet/mlp.hpp"
#include "mkvnet/noise_tree.hpp"
#include "mkvnet/random.hpp"

namespace mkvnet {

namespace {

constexpr std::uint64_t kNoiseTag = 0x6E6F697365ull;
constexpr std::uint64_t kPartnerTag = 0x7061727473ull;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(std::span<const double> v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double s = 0.0;
    for (double x : v) s += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(s / static_cast<double>(v.size() - 1));
  }
  return m;
}

// Estimate (E Y)^{1/q} from samples of Y >= 0, with the upper limit taken on
// E Y before the root.
BoundCheckResult root_moment(std::string name, std::span<const double> samples, double q,
                             double bound) {
  const Moments m = moments(samples);
  BoundCheckResult r;
  r.name = std::move(name);
  r.empirical = std::pow(m.mean, 1.0 / q);
  r.upper = std::pow(m.mean + kZ99 * m.sd / std::sqrt(static_cast<double>(samples.size())),
                     1.0 / q);
  r.bound = bound;
  r.satisfied = r.empirical <= r.bound;
  r.samples = samples.size();
  return r;
}

}  // namespace

void ParticleConfig::validate() const {
  if (particles < 2) throw std::invalid_argument("ParticleConfig: need at least 2 particles");
  if (euler_steps < 1) throw std::invalid_argument("ParticleConfig: need at least 1 step");
  if (partners < 1) throw std::invalid_argument("ParticleConfig: need at least 1 partner");
}

ParticleSystem::ParticleSystem(const TestProblem& problem, const ParticleConfig& cfg,
                               std::span<const double> x)
    : problem_(&problem), cfg_(cfg), d_(problem.d), dt_(problem.T / cfg.euler_steps) {
  cfg_.validate();
  if (x.size() != d_) throw std::invalid_argument("ParticleSystem: x must have length d");
  const std::size_t M = cfg_.particles;
  x_.resize(M * d_);
  for (std::size_t i = 0; i < M; ++i) std::copy(x.begin(), x.end(), x_.begin() + i * d_);

  const std::size_t J = std::min(cfg_.partners, M - 1);
  cfg_.partners = J;
  const CounterStream rng(splitmix64(cfg_.master_seed), kPartnerTag);
  partners_.resize(M * J);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      auto idx = static_cast<std::size_t>(rng.uniform(i * J + j) * static_cast<double>(M - 1));
      idx = std::min(idx, M - 2);
      if (idx >= i) ++idx;
      partners_[i * J + j] = static_cast<std::uint32_t>(idx);
    }
  }
  width1_ = problem.mu_net.layers().front().weights.rows();
  refresh_right_inputs();
}

double ParticleSystem::time() const { return dt_ * step_; }

std::span<const double> ParticleSystem::state(std::size_t i) const {
  return std::span<const double>(x_).subspan(i * d_, d_);
}

void ParticleSystem::refresh_right_inputs() {
  const SparseMatrix& w1 = problem_->mu_net.layers().front().weights;
  const std::size_t M = cfg_.particles;
  right_.assign(M * width1_, 0.0);
  std::vector<double> in(2 * d_, 0.0);
  for (std::size_t j = 0; j < M; ++j) {
    std::copy_n(x_.begin() + j * d_, d_, in.begin() + d_);
    w1.multiply_add(in, std::span<double>(right_).subspan(j * width1_, width1_));
  }
}

void ParticleSystem::drift_from(std::span<const double> left,
                                std::span<const std::uint32_t> partners,
                                std::span<double> out) const {
  const auto& layers = problem_->mu_net.layers();
  const std::size_t last_hidden = layers.back().weights.cols();
  std::vector<double> acc(last_hidden, 0.0);
  std::vector<double> cur(width1_);
  std::vector<double> next;
  for (std::uint32_t j : partners) {
    const double* r = right_.data() + static_cast<std::size_t>(j) * width1_;
    cur.resize(width1_);
    // cur and next swap roles, so cur may hold a different width here.
    for (std::size_t k = 0; k < width1_; ++k) cur[k] = std::max(left[k] + r[k], 0.0);
    for (std::size_t l = 1; l + 1 < layers.size(); ++l) {
      next.assign(layers[l].bias.begin(), layers[l].bias.end());
      layers[l].weights.multiply_add(cur, next);
      for (double& v : next) v = std::max(v, 0.0);
      std::swap(cur, next);
    }
    for (std::size_t k = 0; k < last_hidden; ++k) acc[k] += cur[k];
  }
  for (double& v : acc) v /= static_cast<double>(partners.size());
  const Layer& last = layers.back();
  std::copy(last.bias.begin(), last.bias.end(), out.begin());
  last.weights.multiply_add(acc, out);
}

std::vector<double> ParticleSystem::mean_drift(std::span<const double> y,
                                               std::size_t count) const {
  count = std::min(count, cfg_.particles);
  const Layer& first = problem_->mu_net.layers().front();
  std::vector<double> in(2 * d_, 0.0);
  std::copy(y.begin(), y.end(), in.begin());
  std::vector<double> left = first.bias;
  first.weights.multiply_add(in, left);
  std::vector<std::uint32_t> all(count);
  std::iota(all.begin(), all.end(), 0u);
  std::vector<double> out(d_);
  drift_from(left, all, out);
  return out;
}

void ParticleSystem::step() {
  const std::size_t M = cfg_.particles;
  const std::size_t J = cfg_.partners;
  const Layer& first = problem_->mu_net.layers().front();
  std::vector<double> drift(M * d_);
  std::vector<double> in(2 * d_, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    std::copy_n(x_.begin() + i * d_, d_, in.begin());
    std::vector<double> left = first.bias;
    first.weights.multiply_add(in, left);
    drift_from(left, std::span<const std::uint32_t>(partners_).subspan(i * J, J),
               std::span<double>(drift).subspan(i * d_, d_));
  }
  const CounterStream rng(splitmix64(cfg_.master_seed), kNoiseTag);
  const std::uint64_t pairs = (d_ + 1) / 2;
  const double sq = std::sqrt(dt_);
  std::vector<double> z(d_);
  for (std::size_t i = 0; i < M; ++i) {
    rng.normals((static_cast<std::uint64_t>(step_) * M + i) * pairs, z);
    for (std::size_t k = 0; k < d_; ++k) {
      x_[i * d_ + k] += dt_ * drift[i * d_ + k] + sq * z[k];
    }
  }
  ++step_;
  refresh_right_inputs();
}

void ParticleSystem::run() {
  while (step_ < cfg_.euler_steps) step();
}

double particle_mean_payoff(const TestProblem& problem, const ParticleConfig& cfg,
                            std::span<const double> x) {
  ParticleSystem sys(problem, cfg, x);
  sys.run();
  double sum = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i) sum += problem.f(sys.state(i));
  return sum / static_cast<double>(sys.size());
}

BoundCheckResult check_moment_bound(const ParticleSystem& finished, std::span<const double> x,
                                    unsigned p) {
  const TestProblem& problem = finished.problem();
  const double q = static_cast<double>(p) * problem.r;
  std::vector<double> s(finished.size());
  for (std::size_t i = 0; i < finished.size(); ++i) s[i] = std::pow(norm(finished.state(i)), q);
  const double T = problem.T;
  const double bound =
      (norm(x) + T * norm(problem.mu_at_origin()) + std::sqrt(T * (problem.d + 2.0 * q))) *
      std::exp(problem.c * T);
  return root_moment("moment", s, q, bound);
}

BoundCheckResult check_moment_bound(const TestProblem& problem, const ParticleConfig& cfg,
                                    std::span<const double> x, unsigned p) {
  ParticleSystem sys(problem, cfg, x);
  sys.run();
  return check_moment_bound(sys, x, p);
}

std::pair<BoundCheckResult, BoundCheckResult> check_perturbation_bounds(
    const ParticleSystem& base_finished, const TestProblem& perturbed, double eps,
    std::span<const double> x, unsigned p) {
  const TestProblem& base = base_finished.problem();
  if (base.d != perturbed.d || base.T != perturbed.T) {
    throw std::invalid_argument("check_perturbation_bounds: problems differ in d or T");
  }
  const double b = std::max(1.0, perturbed.perturbation_scale);
  const double c = std::max(base.c, perturbed.c);
  const unsigned r = base.r;
  const double T = base.T;

  const ParticleSystem& s0 = base_finished;
  ParticleSystem s1(perturbed, s0.config(), x);
  s1.run();

  std::vector<double> dx(s0.size());
  std::vector<double> df(s0.size());
  std::vector<double> diff(base.d);
  for (std::size_t i = 0; i < s0.size(); ++i) {
    for (std::size_t k = 0; k < base.d; ++k) diff[k] = s1.state(i)[k] - s0.state(i)[k];
    dx[i] = std::pow(norm(diff), p);
    df[i] = std::pow(std::abs(perturbed.f(s1.state(i)) - base.f(s0.state(i))), p);
  }
  const double brown = std::sqrt(T * (base.d + 2.0 * p * r));
  const double mu0 = norm(base.mu_at_origin());
  const double mue = norm(perturbed.mu_at_origin());
  const double state_bound = T * b * eps * std::pow(1.0 + norm(x) + T * mu0 + brown, r) *
                             std::exp((r + 1.0) * c * T);
  const double payoff_bound = b * eps *
                              std::pow(1.0 + norm(x) + T * std::max(mue, mu0) + brown, r) *
                              std::exp((r + 2.0) * c * T);
  return {root_moment("perturbation_state", dx, p, state_bound),
          root_moment("perturbation_payoff", df, p, payoff_bound)};
}

std::pair<BoundCheckResult, BoundCheckResult> check_perturbation_bounds(
    const TestProblem& base, const TestProblem& perturbed, double eps, const ParticleConfig& cfg,
    std::span<const double> x, unsigned p) {
  if (base.d != perturbed.d || base.T != perturbed.T) {
    throw std::invalid_argument("check_perturbation_bounds: problems differ in d or T");
  }
  ParticleSystem s0(base, cfg, x);
  s0.run();
  return check_perturbation_bounds(s0, perturbed, eps, x, p);
}

double mlp_error_bound(const TestProblem& problem, unsigned n, unsigned m,
                       std::span<const double> x) {
  const double c = problem.c;
  const double d = static_cast<double>(problem.d);
  return c * std::exp(m / 2.0) / std::pow(static_cast<double>(m), n / 2.0) *
         (norm(x) + c * std::pow(d, c)) * std::exp(3.0 * c * problem.T * n);
}

BoundCheckResult check_brownian_moment(std::size_t d, unsigned p, unsigned r, double t,
                                       std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("check_brownian_moment: need >= 2 samples");
  const double q = static_cast<double>(p) * r;
  const CounterStream rng(splitmix64(seed), kNoiseTag);
  const std::uint64_t pairs = (d + 1) / 2;
  std::vector<double> z(d);
  std::vector<double> s(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    rng.normals(i * pairs, z);
    s[i] = std::pow(std::sqrt(t) * norm(z), q);
  }
  return root_moment("brownian_moment", s, q, std::sqrt(t * (d + 2.0 * q)));
}

BoundCheckResult check_mlp_error_domination(const TestProblem& problem, const ParticleConfig& cfg,
                                            unsigned n, unsigned m, std::span<const double> x,
                                            std::size_t samples, std::uint64_t tree_seed) {
  if (samples < 2) throw std::invalid_argument("check_mlp_error_domination: need >= 2 samples");
  // Finest grid with at least cfg.euler_steps steps, so the Euler path and the
  // estimator read the same Brownian values.
  unsigned levels = n;
  std::uint64_t steps = 1;
  for (unsigned i = 0; i < levels; ++i) steps *= m;
  while (m > 1 && steps < cfg.euler_steps) {
    ++levels;
    steps *= m;
  }
  ParticleConfig pc = cfg;
  pc.euler_steps = static_cast<unsigned>(steps);

  const ThetaIndex theta{1};
  const std::size_t d = problem.d;
  std::vector<std::unique_ptr<NoiseTree>> trees;
  std::vector<std::vector<double>> estimates;
  std::vector<std::vector<double>> paths;
  for (std::size_t s = 0; s < samples; ++s) {
    trees.push_back(std::make_unique<NoiseTree>(tree_seed + s, problem.T, d, levels, m));
    estimates.push_back(mlp_estimate(problem, *trees.back(), theta, n, m, problem.T, x));
    paths.emplace_back(x.begin(), x.end());
  }

  ParticleSystem sys(problem, pc, x);
  const double dt = problem.T / static_cast<double>(steps);
  std::vector<double> w0(d);
  std::vector<double> w1(d);
  for (std::uint64_t k = 0; k < steps; ++k) {
    for (std::size_t s = 0; s < samples; ++s) {
      const std::vector<double> drift = sys.mean_drift(paths[s], sys.size());
      trees[s]->brownian_into(theta, k, w0);
      trees[s]->brownian_into(theta, k + 1, w1);
      for (std::size_t j = 0; j < d; ++j) paths[s][j] += dt * drift[j] + (w1[j] - w0[j]);
    }
    sys.step();
  }

  std::vector<double> sq(samples);
  std::vector<double> diff(d);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < d; ++j) diff[j] = estimates[s][j] - paths[s][j];
    sq[s] = norm(diff) * norm(diff);
  }
  return root_moment("mlp_error", sq, 2.0, mlp_error_bound(problem, n, m, x));
}

}  // namespace mkvnet
