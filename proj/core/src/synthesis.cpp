#include "mkvnet/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mkvnet/calculus.hpp"
#include "mkvnet/mlp.hpp"
#include "mkvnet/params.hpp"

namespace mkvnet {

namespace {

std::uint64_t ipow(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t width_bound(std::uint64_t c, std::uint64_t K, unsigned m, unsigned n) {
  std::uint64_t b = saturating_mul(c, K);
  for (unsigned i = 0; i < n; ++i) b = saturating_mul(b, 5ull * m);
  return b;
}

// mu o Id_{2d} o (inner_a, inner_b), with the identity left out when it
// would have no hidden layer.
NeuralNetwork drift_term(const TestProblem& problem, const NeuralNetwork& inner_a,
                         const NeuralNetwork& inner_b, std::size_t id_length) {
  const NeuralNetwork pair[] = {inner_a, inner_b};
  NeuralNetwork inner = merge(pair);
  if (id_length >= 3) inner = compose(identity_network(2 * problem.d, id_length - 2), inner);
  return compose(problem.mu_net, inner);
}

NeuralNetwork build_level(const TestProblem& problem, const NoiseTree& tree,
                          const ThetaIndex& theta, unsigned n, unsigned m, double t) {
  const std::size_t d = problem.d;
  if (n == 0) return zero_network(DimVector({d, 1, d}));

  const std::size_t lmu = problem.mu_net.layer_count() + 1;
  const std::size_t length = n * (lmu - 1) + 3;

  std::vector<double> shift(d);
  tree.brownian_into(theta, grid_index(t, m, n, problem.T) * ipow(m, tree.grid_levels() - n),
                     shift);
  const std::vector<double> mu0 = problem.mu_at_origin();
  for (std::size_t j = 0; j < d; ++j) shift[j] += t * mu0[j];

  std::vector<NeuralNetwork> nets;
  std::vector<double> coeffs;
  nets.push_back(affine_wrap(identity_network(d, length - 2), 1.0, std::vector<double>(d, 0.0),
                             shift));
  coeffs.push_back(1.0);

  for (unsigned l = 1; l < n; ++l) {
    const std::uint64_t reps = ipow(m, n - l);
    const double weight = t / static_cast<double>(reps);
    const std::size_t id_hi = (n - l - 1) * (lmu - 1) + 1;
    const std::size_t id_lo = (n - l) * (lmu - 1) + 1;
    for (std::uint64_t k = 1; k <= reps; ++k) {
      const ThetaIndex child = theta.child(n, static_cast<std::uint32_t>(k), l);
      const double s = tree.uniform_time(child) * t;
      nets.push_back(drift_term(problem, build_level(problem, tree, theta, l, m, s),
                                build_level(problem, tree, child, l, m, s), id_hi));
      coeffs.push_back(weight);
      nets.push_back(drift_term(problem, build_level(problem, tree, theta, l - 1, m, s),
                                build_level(problem, tree, child, l - 1, m, s), id_lo));
      coeffs.push_back(-weight);
    }
  }
  return scaled_sum(nets, coeffs);
}

SynthesisReport make_report(NeuralNetwork net, std::size_t predicted_depth,
                            std::uint64_t predicted_width) {
  const DimVector shape = dims(net);
  SynthesisReport r{.network = std::move(net)};
  r.depth = shape.size();
  r.width_supnorm = dim_supnorm(shape);
  r.param_count = param_count(shape);
  r.predicted_depth = predicted_depth;
  r.predicted_width_bound = predicted_width;
  return r;
}

WidthProfile to_profile(const DimVector& v) {
  return WidthProfile(v.widths().begin(), v.widths().end());
}

WidthProfile compose_profile(const WidthProfile& a, const WidthProfile& b) {
  WidthProfile w(b.begin(), b.end() - 1);
  w.push_back(b.back() + a.front());
  w.insert(w.end(), a.begin() + 1, a.end());
  return w;
}

WidthProfile identity_profile(std::size_t d, std::size_t length) {
  WidthProfile w(length, 2.0L * d);
  w.front() = d;
  w.back() = d;
  return w;
}

std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::vector<std::uint64_t> p;
  for (std::uint64_t c = 2; p.size() < count; ++c) {
    bool prime = true;
    for (std::uint64_t q : p) {
      if (q * q > c) break;
      if (c % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) p.push_back(c);
  }
  return p;
}

}  // namespace

std::uint64_t mlp_width_constant(const TestProblem& problem) {
  const std::uint64_t need =
      std::max<std::uint64_t>(4 * problem.d, dim_supnorm(dims(problem.mu_net)));
  return (need + 1) / 2;
}

std::uint64_t mc_width_constant(const TestProblem& problem) {
  return std::max<std::uint64_t>({4 * problem.d, dim_supnorm(dims(problem.mu_net)),
                                  dim_supnorm(dims(problem.f_net))});
}

SynthesisReport synthesize_mlp_network(const TestProblem& problem, const NoiseTree& tree,
                                       const ThetaIndex& theta, unsigned n, unsigned m,
                                       double t) {
  check_tree_compatible(problem, tree, n, m);
  if (!(t >= 0.0) || t > problem.T) throw std::domain_error("synthesize: t outside [0, T]");
  const std::size_t lmu = problem.mu_net.layer_count() + 1;
  return make_report(build_level(problem, tree, theta, n, m, t), n * (lmu - 1) + 3,
                     width_bound(mlp_width_constant(problem), 1, m, n));
}

SynthesisReport synthesize_mc_network(const TestProblem& problem, const NoiseTree& tree,
                                      std::uint64_t K, unsigned n, unsigned m) {
  check_tree_compatible(problem, tree, n, m);
  if (K == 0) throw std::invalid_argument("synthesize_mc_network: K must be >= 1");
  std::vector<NeuralNetwork> nets;
  nets.reserve(K);
  for (std::uint64_t i = 1; i <= K; ++i) {
    const ThetaIndex theta{static_cast<std::uint32_t>(i)};
    nets.push_back(compose(problem.f_net, build_level(problem, tree, theta, n, m, problem.T)));
  }
  const std::vector<double> coeffs(K, 1.0 / static_cast<double>(K));
  const std::size_t lmu = problem.mu_net.layer_count() + 1;
  const std::size_t lf = problem.f_net.layer_count() + 1;
  return make_report(scaled_sum(nets, coeffs), lf + n * (lmu - 1) + 2,
                     width_bound(mc_width_constant(problem), K, m, n));
}

WidthProfile predict_mlp_dims(std::size_t d, const DimVector& mu_dims, unsigned n, unsigned m) {
  std::vector<WidthProfile> level;
  level.push_back({static_cast<long double>(d), 1.0L, static_cast<long double>(d)});
  const std::size_t lmu = mu_dims.size();
  const WidthProfile mu = to_profile(mu_dims);

  auto term = [&](const WidthProfile& inner, std::size_t id_length) {
    WidthProfile merged = inner;
    for (std::size_t i = 1; i < merged.size(); ++i) merged[i] *= 2.0L;
    if (id_length >= 3) merged = compose_profile(identity_profile(2 * d, id_length), merged);
    return compose_profile(mu, merged);
  };

  for (unsigned k = 1; k <= n; ++k) {
    WidthProfile s = identity_profile(d, k * (lmu - 1) + 3);
    for (unsigned l = 1; l < k; ++l) {
      const long double reps = std::pow(static_cast<long double>(m), k - l);
      const WidthProfile hi = term(level[l], (k - l - 1) * (lmu - 1) + 1);
      const WidthProfile lo = term(level[l - 1], (k - l) * (lmu - 1) + 1);
      for (std::size_t i = 1; i + 1 < s.size(); ++i) s[i] += reps * (hi[i] + lo[i]);
    }
    level.push_back(std::move(s));
  }
  return level[n];
}

WidthProfile predict_mc_dims(std::size_t d, const DimVector& mu_dims, const DimVector& f_dims,
                             unsigned n, unsigned m, long double K) {
  WidthProfile w = compose_profile(to_profile(f_dims), predict_mlp_dims(d, mu_dims, n, m));
  for (std::size_t i = 1; i + 1 < w.size(); ++i) w[i] *= K;
  return w;
}

long double profile_param_count(const WidthProfile& widths) {
  long double p = 0.0L;
  for (std::size_t i = 1; i < widths.size(); ++i) p += widths[i] * (widths[i - 1] + 1.0L);
  return p;
}

long double profile_supnorm(const WidthProfile& widths) {
  return *std::max_element(widths.begin(), widths.end());
}

std::vector<double> halton_point(std::uint64_t i, std::size_t d) {
  static const std::vector<std::uint64_t> cached = first_primes(64);
  const std::vector<std::uint64_t> primes = d <= cached.size() ? cached : first_primes(d);
  std::vector<double> x(d);
  for (std::size_t j = 0; j < d; ++j) {
    const std::uint64_t base = primes[j];
    double f = 1.0;
    double r = 0.0;
    for (std::uint64_t k = i; k > 0; k /= base) {
      f /= static_cast<double>(base);
      r += f * static_cast<double>(k % base);
    }
    x[j] = r;
  }
  return x;
}

double l2_error(const NeuralNetwork& net,
                const std::function<double(std::span<const double>)>& reference, std::size_t d,
                std::size_t count) {
  if (count == 0) throw std::invalid_argument("l2_error: need at least one point");
  double sum = 0.0;
  for (std::size_t i = 1; i <= count; ++i) {
    const std::vector<double> x = halton_point(i, d);
    const double e = realize(net, x)[0] - reference(x);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(count));
}

const char* to_string(PipelineStatus s) {
  switch (s) {
    case PipelineStatus::ok:
      return "ok";
    case PipelineStatus::retries_exhausted:
      return "retries_exhausted";
    case PipelineStatus::exceeds_budget:
      return "exceeds_budget";
  }
  return "unknown";
}

PipelineResult theorem_pipeline(const TestProblem& problem, double epsilon, double delta,
                                const PipelineOptions& options) {
  std::function<double(std::span<const double>)> reference = options.reference;
  if (!reference) {
    if (!problem.closed_form) {
      throw std::invalid_argument("theorem_pipeline: problem has no closed form and no reference");
    }
    const auto cf = *problem.closed_form;
    const double T = problem.T;
    reference = [cf, T](std::span<const double> x) { return cf(x, T); };
  }

  PipelineResult res;
  res.small_epsilon = select_epsilon(problem.d, epsilon, problem.c, problem.r, problem.T);
  res.selected_N = select_N(problem.d, epsilon, problem.c, problem.r, problem.T);
  res.levels = options.fixed_levels.value_or(res.selected_N);
  res.samples = options.fixed_samples
                    ? static_cast<long double>(*options.fixed_samples)
                    : std::pow(static_cast<long double>(res.selected_N), res.selected_N);
  const unsigned m = std::max(res.levels, 1u);
  res.predicted_params = profile_param_count(predict_mc_dims(
      problem.d, dims(problem.mu_net), dims(problem.f_net), res.levels, m, res.samples));
  res.log_param_bound = log_param_bound(problem.d, epsilon, delta, problem.c, problem.r,
                                        problem.T);
  res.measured_error = std::numeric_limits<double>::quiet_NaN();

  if (res.predicted_params > options.max_params) {
    res.status = PipelineStatus::exceeds_budget;
    return res;
  }
  const auto K = static_cast<std::uint64_t>(res.samples);
  res.status = PipelineStatus::retries_exhausted;
  for (std::uint64_t seed : options.seeds) {
    ++res.attempts;
    const NoiseTree tree(seed, problem.T, problem.d, res.levels, m);
    SynthesisReport report = synthesize_mc_network(problem, tree, K, res.levels, m);
    const double err = l2_error(report.network, reference, problem.d, options.probe_points);
    if (!res.report || err < res.measured_error) {
      res.report = std::move(report);
      res.measured_error = err;
      res.seed = seed;
    }
    if (err < epsilon) {
      res.status = PipelineStatus::ok;
      break;
    }
  }
  return res;
}

}  // namespace mkvnet
