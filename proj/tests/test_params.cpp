#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "mkvnet/params.hpp"

using namespace mkvnet;

TEST_SUITE("params") {
  TEST_CASE("small epsilon") {
    CHECK(select_epsilon(1, 0.5, 1.0, 1, 1.0) == doctest::Approx(0.5 / (2.0 * std::exp(3.0))));
    CHECK(select_epsilon(1, 0.5, 1.0, 1, 1.0) == doctest::Approx(0.012446).epsilon(1e-4));
    // d = 2, c = 1: c d^c = 2
    CHECK(select_epsilon(2, 0.5, 1.0, 1, 1.0) == doctest::Approx(0.5 / (2.0 * 4.0 * std::exp(3.0))));
    CHECK_THROWS_AS(select_epsilon(0, 0.5, 1.0, 1, 1.0), std::invalid_argument);
  }

  TEST_CASE("N selection agrees with a direct evaluation") {
    for (std::size_t d : {1u, 2u, 3u}) {
      for (double eps : {0.5, 0.25, 0.01}) {
        for (double T : {0.1, 1.0}) {
          const double c = 1.0;
          const unsigned r = 1;
          auto lhs = [&](unsigned n) {
            // long double keeps n^{n/2} finite up to n of a few thousand
            const long double cdc = c * std::pow(static_cast<long double>(d), c);
            const long double nn = n;
            return std::pow(2.0L, r) * std::pow(cdc, r + 1.0L) * 2.0L *
                   std::exp(nn / 2.0L + 3.0L * c * T * nn) / std::pow(nn, nn / 2.0L);
          };
          unsigned want = 2;
          while (lhs(want) > eps / 2.0) ++want;
          CHECK(select_N(d, eps, c, r, T) == want);
        }
      }
    }
    CHECK(select_N(1, 0.5, 1.0, 1, 0.1) == 10);
    CHECK(select_N(3, 0.25, 1.0, 1, 0.1) == 13);
  }

  TEST_CASE("N is monotone in epsilon and d") {
    unsigned prev = 0;
    for (double eps : {0.9, 0.5, 0.1, 0.01, 1e-4}) {
      const unsigned n = select_N(2, eps, 1.0, 1, 0.5);
      CHECK(n >= prev);
      prev = n;
    }
    CHECK(select_N(1, 0.1, 1.0, 1, 0.5) <= select_N(4, 0.1, 1.0, 1, 0.5));
    CHECK_THROWS_AS(select_N(1, 1e-300, 1.0, 1, 1.0, 5), std::runtime_error);
    CHECK_THROWS_AS(select_N(1, 0.0, 1.0, 1, 1.0), std::invalid_argument);
  }

  TEST_CASE("C_delta is at least its first term and ignores the cap") {
    const auto a = compute_C_delta(0.5, 1.0, 0.1);
    CHECK(a.log_value >= c_delta_log_term(2.0L, 0.5, 1.0, 0.1));
    CHECK(a.argmax > 1e16L);
    CHECK(a.argmax < 1e18L);
    const auto b = compute_C_delta(0.5, 1.0, 0.1, 1e100L);
    CHECK(b.log_value == a.log_value);
    CHECK(b.argmax == a.argmax);
    CHECK(c_delta_log_term(a.argmax * 1.01L, 0.5, 1.0, 0.1) <= a.log_value);
    CHECK(c_delta_log_term(a.argmax / 1.01L, 0.5, 1.0, 0.1) <= a.log_value);
    CHECK_THROWS_AS(compute_C_delta(0.5, 1.0, 0.1, 1e3L), std::runtime_error);
    CHECK_THROWS_AS(compute_C_delta(1.5, 1.0, 0.1), std::invalid_argument);
  }

  TEST_CASE("C_delta matches a brute-force scan where one is affordable") {
    const double delta = 0.99, c = 0.01, T = 0.01;
    long double best = -INFINITY;
    long double arg = 0;
    for (long double n = 2; n <= 2e7L; n += 1) {
      const long double v = c_delta_log_term(n, delta, c, T);
      if (v > best) {
        best = v;
        arg = n;
      }
    }
    REQUIRE(arg < 2e7L);
    const auto got = compute_C_delta(delta, c, T);
    CHECK(got.argmax == arg);
    CHECK(std::abs(got.log_value - best) <= 1e-9L * std::abs(best));
  }

  TEST_CASE("term by hand at n = 2") {
    // 5^4 * 2 * 2^8 * (2 e^{1/2 + 3cT})^{8+delta}
    const double c = 1.0, T = 0.1, delta = 0.5;
    const long double want = std::log(625.0L * 2.0L * 256.0L) +
                             8.5L * (std::log(2.0L) + 0.5L + 3.0L * c * T);
    CHECK(static_cast<double>(c_delta_log_term(2.0L, delta, c, T)) ==
          doctest::Approx(static_cast<double>(want)));
  }

  TEST_CASE("parameter bound") {
    const double lb = static_cast<double>(log_param_bound(1, 0.5, 0.5, 1.0, 1, 0.1));
    const double logC = static_cast<double>(compute_C_delta(0.5, 1.0, 0.1).log_value);
    const double e = 11.5;
    const double want = std::log(96.0) + e * (2.0 * std::log(2.0) + 0.3) + logC - e * std::log(0.5);
    CHECK(lb == doctest::Approx(want).epsilon(1e-12));
    CHECK(log_param_bound(1, 0.25, 0.5, 1.0, 1, 0.1) > log_param_bound(1, 0.5, 0.5, 1.0, 1, 0.1));
    CHECK(log_param_bound(2, 0.5, 0.5, 1.0, 1, 0.1) > log_param_bound(1, 0.5, 0.5, 1.0, 1, 0.1));
    CHECK(std::isinf(param_bound(1, 0.5, 0.5, 1.0, 1, 0.1)));
  }
}
