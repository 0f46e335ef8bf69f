#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mkvnet/calculus.hpp"
#include "mkvnet/mlp.hpp"
#include "mkvnet/synthesis.hpp"
#include "oracles.hpp"

using namespace mkvnet;

namespace {

void check_equivalence(const TestProblem& p, unsigned n, unsigned m, double t) {
  const NoiseTree tree(21, p.T, p.d, n, std::max(m, 1u));
  const ThetaIndex theta{3};
  const auto rep = synthesize_mlp_network(p, tree, theta, n, m, t);
  std::mt19937_64 rng(n * 10 + m);
  for (int i = 0; i < 8; ++i) {
    const auto x = oracle::random_vector(rng, p.d);
    CHECK(oracle::rel_gap(realize(rep.network, x), mlp_estimate(p, tree, theta, n, m, t, x)) <=
          1e-10);
  }
}

}  // namespace

TEST_SUITE("synthesis") {
  TEST_CASE("level zero is a zero network") {
    const auto p = linear_problem(2, 0.1, 0.2, 1.0);
    const NoiseTree tree(1, 1.0, 2, 1, 1);
    const auto rep = synthesize_mlp_network(p, tree, ThetaIndex{1}, 0, 1, 1.0);
    CHECK(dims(rep.network) == DimVector({2, 1, 2}));
    CHECK(realize(rep.network, std::vector<double>{3.0, -4.0}) == std::vector<double>{0.0, 0.0});
  }

  TEST_CASE("level one is affine in x") {
    const auto p = relu_problem(2, 5, 1.0);
    const NoiseTree tree(2, 1.0, 2, 1, 3);
    const auto rep = synthesize_mlp_network(p, tree, ThetaIndex{1}, 1, 3, 0.5);
    const auto at0 = realize(rep.network, std::vector<double>{0.0, 0.0});
    const auto at1 = realize(rep.network, std::vector<double>{1.0, -2.0});
    CHECK(at1[0] - at0[0] == doctest::Approx(1.0));
    CHECK(at1[1] - at0[1] == doctest::Approx(-2.0));
    check_equivalence(p, 1, 3, 0.5);
  }

  TEST_CASE("realization equals the recursion") {
    for (std::size_t d : {1u, 3u}) {
      const auto lin = linear_problem(d, 0.2, -0.3, 1.0);
      const auto rel = relu_problem(d, 17, 1.0);
      for (unsigned n = 1; n <= 3; ++n) {
        check_equivalence(lin, n, n, 1.0);
        check_equivalence(rel, n, n, 0.7);
      }
      check_equivalence(rel, 2, 3, 0.9);
    }
  }

  TEST_CASE("monte carlo network depth and equivalence") {
    const auto p = relu_problem(2, 4, 1.0);
    const std::size_t lmu = dims(p.mu_net).size();
    const std::size_t lf = dims(p.f_net).size();
    for (unsigned n : {0u, 1u, 2u}) {
      const unsigned m = std::max(n, 1u);
      const NoiseTree tree(9, 1.0, 2, n, m);
      for (std::uint64_t K : {1u, 2u, 5u}) {
        const auto rep = synthesize_mc_network(p, tree, K, n, m);
        CHECK(rep.depth == lf + n * (lmu - 1) + 2);
        CHECK(rep.depth == rep.predicted_depth);
        const std::vector<double> x = {0.25, 0.75};
        CHECK(realize(rep.network, x)[0] ==
              doctest::Approx(monte_carlo_payoff(p, tree, K, n, m, x)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("width and parameter bounds") {
    const auto p = relu_problem(2, 8, 1.0);
    for (unsigned n = 0; n <= 3; ++n) {
      const unsigned m = std::max(n, 1u);
      const NoiseTree tree(4, 1.0, 2, n, m);
      const auto mlp = synthesize_mlp_network(p, tree, ThetaIndex{1}, n, m, 1.0);
      CHECK(mlp.depth == mlp.predicted_depth);
      CHECK(mlp.width_supnorm <= mlp.predicted_width_bound);
      CHECK(mlp.param_count <= 2 * mlp.depth * mlp.width_supnorm * mlp.width_supnorm);
      const auto mc = synthesize_mc_network(p, tree, 3, n, m);
      CHECK(mc.width_supnorm <= mc.predicted_width_bound);
      CHECK(mc.param_count <= 2 * mc.depth * mc.width_supnorm * mc.width_supnorm);
    }
    CHECK(mlp_width_constant(p) == (std::max<std::size_t>(8, dim_supnorm(dims(p.mu_net))) + 1) / 2);
    CHECK(mc_width_constant(p) >= 8);
  }

  TEST_CASE("predicted widths match the built networks") {
    for (std::size_t d : {1u, 2u}) {
      const auto p = relu_problem(d, 12, 1.0);
      for (unsigned n = 0; n <= 3; ++n) {
        const unsigned m = std::max(n, 1u);
        const NoiseTree tree(6, 1.0, d, n, m);
        const auto mlp = synthesize_mlp_network(p, tree, ThetaIndex{1}, n, m, 1.0);
        const auto want = predict_mlp_dims(d, dims(p.mu_net), n, m);
        const DimVector shape = dims(mlp.network);
        const auto& got = shape.widths();
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(static_cast<long double>(got[i]) == want[i]);
        CHECK(profile_param_count(want) == static_cast<long double>(mlp.param_count));
        const auto mc = synthesize_mc_network(p, tree, 2, n, m);
        CHECK(profile_param_count(predict_mc_dims(d, dims(p.mu_net), dims(p.f_net), n, m, 2)) ==
              static_cast<long double>(mc.param_count));
        CHECK(profile_supnorm(predict_mc_dims(d, dims(p.mu_net), dims(p.f_net), n, m, 2)) ==
              static_cast<long double>(mc.width_supnorm));
      }
    }
  }

  TEST_CASE("halton points and l2 error") {
    CHECK(halton_point(1, 2) == std::vector<double>{0.5, 1.0 / 3.0});
    CHECK(halton_point(2, 2)[0] == 0.25);
    CHECK(halton_point(3, 3)[2] == doctest::Approx(0.6));
    const auto id = identity_network(1, 1);
    CHECK(l2_error(id, [](std::span<const double> x) { return x[0]; }, 1, 64) == 0.0);
    CHECK(l2_error(id, [](std::span<const double> x) { return x[0] + 0.5; }, 1, 64) ==
          doctest::Approx(0.5));
    CHECK_THROWS_AS(l2_error(id, [](std::span<const double>) { return 0.0; }, 1, 0),
                    std::invalid_argument);
  }

  TEST_CASE("pipeline on a constant payoff is exact") {
    const auto p = constant_problem(1, 0.75, 0.1);
    PipelineOptions opt;
    opt.fixed_levels = 2;
    opt.fixed_samples = 3;
    opt.probe_points = 32;
    const auto res = theorem_pipeline(p, 0.5, 0.5, opt);
    CHECK(res.status == PipelineStatus::ok);
    CHECK(res.measured_error == doctest::Approx(0.0));
    CHECK(res.attempts == 1);
    REQUIRE(res.report);
    CHECK(static_cast<long double>(res.report->param_count) == res.predicted_params);
  }

  TEST_CASE("pipeline budget and statuses") {
    const auto p = linear_problem(1, 0.0, -0.5, 0.1);
    const auto big = theorem_pipeline(p, 0.25, 0.5);
    CHECK(big.status == PipelineStatus::exceeds_budget);
    CHECK(std::isnan(big.measured_error));
    CHECK(big.samples == std::pow(static_cast<long double>(big.selected_N), big.selected_N));
    CHECK(std::string(to_string(big.status)) == "exceeds_budget");

    PipelineOptions opt;
    opt.fixed_levels = 1;
    opt.fixed_samples = 1;
    opt.seeds = {1, 2};
    const auto tight = theorem_pipeline(p, 1e-6, 0.5, opt);
    CHECK(tight.status == PipelineStatus::retries_exhausted);
    CHECK(tight.attempts == 2);
    CHECK(tight.measured_error > 1e-6);
    CHECK_THROWS_AS(theorem_pipeline(relu_problem(1, 1, 0.1), 0.5, 0.5, opt), std::invalid_argument);
  }
}
