#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mkvnet/oracle.hpp"

using namespace mkvnet;

namespace {

ParticleConfig small_config(std::uint64_t seed = 1) {
  ParticleConfig cfg;
  cfg.particles = 2000;
  cfg.euler_steps = 50;
  cfg.partners = 32;
  cfg.master_seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("config validation") {
    CHECK_NOTHROW(small_config().validate());
    auto cfg = small_config();
    cfg.particles = 1;
    CHECK_THROWS(cfg.validate());
    cfg = small_config();
    cfg.euler_steps = 0;
    CHECK_THROWS(cfg.validate());
    cfg = small_config();
    cfg.partners = 0;
    CHECK_THROWS(cfg.validate());
  }

  TEST_CASE("driftless particles keep their mean") {
    const auto p = constant_problem(2, 0.0, 1.0);
    const std::vector<double> x = {0.5, -1.0};
    ParticleSystem sys(p, small_config(), x);
    sys.run();
    CHECK(sys.time() == doctest::Approx(1.0));
    CHECK(sys.steps_taken() == 50);
    double m0 = 0, m1 = 0, v0 = 0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
      m0 += sys.state(i)[0];
      m1 += sys.state(i)[1];
      v0 += (sys.state(i)[0] - 0.5) * (sys.state(i)[0] - 0.5);
    }
    const double n = static_cast<double>(sys.size());
    CHECK(std::abs(m0 / n - 0.5) < 0.08);
    CHECK(std::abs(m1 / n + 1.0) < 0.08);
    CHECK(v0 / n == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("linear mean-field drift decays the mean") {
    const auto p = linear_problem(1, 0.0, -0.5, 1.0);
    const std::vector<double> x = {1.0};
    CHECK(particle_mean_payoff(p, small_config(), x) == doctest::Approx(std::exp(-0.5)).epsilon(0.08));
  }

  TEST_CASE("mean drift over the ensemble") {
    const auto p = linear_problem(1, 0.3, -0.5, 1.0);
    const std::vector<double> x = {2.0};
    ParticleSystem sys(p, small_config(), x);
    const std::vector<double> y = {1.0};
    // all particles sit at x before the first step
    CHECK(sys.mean_drift(y, sys.size())[0] == doctest::Approx(0.3 - 1.0));
  }

  TEST_CASE("runs are deterministic in the seed") {
    const auto p = relu_problem(2, 3, 1.0);
    const std::vector<double> x = {0.1, 0.2};
    const double a = particle_mean_payoff(p, small_config(4), x);
    CHECK(particle_mean_payoff(p, small_config(4), x) == a);
    CHECK(particle_mean_payoff(p, small_config(5), x) != a);
  }

  TEST_CASE("moment bound") {
    const auto p = linear_problem(1, 0.0, -0.5, 1.0);
    const std::vector<double> x = {0.0};
    const auto res = check_moment_bound(p, small_config(), x, 2);
    CHECK(res.bound == doctest::Approx(std::sqrt(5.0) * std::exp(1.0)));
    CHECK(res.satisfied);
    CHECK(res.confident());
    CHECK(res.upper >= res.empirical);
    CHECK(res.samples == 2000);
  }

  TEST_CASE("perturbation bounds") {
    const auto base = relu_problem(1, 2, 1.0);
    const std::vector<double> x = {0.0};
    const auto zero = check_perturbation_bounds(base, perturb(base, 0.0), 0.0, small_config(), x, 2);
    CHECK(zero.first.empirical == 0.0);
    CHECK(zero.second.empirical == 0.0);

    const auto a = check_perturbation_bounds(base, perturb(base, 0.05), 0.05, small_config(), x, 2);
    const auto b = check_perturbation_bounds(base, perturb(base, 0.1), 0.1, small_config(), x, 2);
    // c = 1 + 2 eps enters the exponential factors as well
    CHECK(b.first.bound == doctest::Approx(2.0 * a.first.bound * std::exp(2.0 * 0.1)));
    CHECK(b.second.bound == doctest::Approx(2.0 * a.second.bound * std::exp(3.0 * 0.1)));
    CHECK(b.first.empirical / a.first.empirical == doctest::Approx(2.0).epsilon(0.2));
    CHECK(a.first.satisfied);
    CHECK(a.second.satisfied);
    CHECK(b.first.confident());
    CHECK(b.second.confident());
    // b = 1, c = 1 + 2 * 0.1, r = 1, T = 1, p = 2, x = 0, mu(0,0) = mu0
    const double mu0 = std::abs(base.mu_at_origin()[0]);
    const double brown = std::sqrt(1.0 + 4.0);
    CHECK(b.first.bound == doctest::Approx(0.1 * (1.0 + mu0 + brown) * std::exp(2.0 * 1.2)));
    CHECK_THROWS_AS(perturb(base, 1.0), std::invalid_argument);
  }

  TEST_CASE("mlp error bound closed values") {
    const auto p = linear_problem(1, 0.0, -0.5, 1.0);
    const std::vector<double> zero = {0.0};
    CHECK(mlp_error_bound(p, 2, 2, zero) == doctest::Approx(std::exp(7.0) / 2.0));
    const std::vector<double> one = {1.0};
    CHECK(mlp_error_bound(p, 1, 1, one) == doctest::Approx(2.0 * std::exp(0.5) * std::exp(3.0)));
  }

  TEST_CASE("Brownian moments stay under the bound") {
    for (std::size_t d : {1u, 3u}) {
      for (unsigned p : {1u, 2u, 4u}) {
        for (double t : {0.25, 1.0}) {
          const auto res = check_brownian_moment(d, p, 1, t, 20000, 3);
          CHECK(res.bound == doctest::Approx(std::sqrt(t * (d + 2.0 * p))));
          CHECK(res.satisfied);
          CHECK(res.confident());
        }
      }
    }
    // E|W(1)|^2 = d exactly, so the empirical root sits near sqrt(d)
    CHECK(check_brownian_moment(3, 2, 1, 1.0, 50000, 9).empirical ==
          doctest::Approx(std::sqrt(3.0)).epsilon(0.02));
    CHECK_THROWS(check_brownian_moment(1, 1, 1, 1.0, 1, 1));
  }

  TEST_CASE("mlp error is dominated by its bound") {
    const auto p = linear_problem(1, 0.0, -0.5, 1.0);
    auto cfg = small_config();
    cfg.particles = 500;
    const std::vector<double> x = {0.5};
    const auto res = check_mlp_error_domination(p, cfg, 2, 2, x, 20, 3);
    CHECK(res.satisfied);
    CHECK(res.empirical > 0.0);
    CHECK(res.empirical < 1.0);
  }
}
