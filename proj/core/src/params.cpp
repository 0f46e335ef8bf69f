#include "mkvnet/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mkvnet {

namespace {

void check_common(std::size_t d, double c, double T) {
  if (d == 0) throw std::invalid_argument("d must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
}

// Derivative of c_delta_log_term in n.
long double c_delta_slope(long double n, double delta, double c, double T) {
  const long double a = 8.0L + delta;
  return 2.0L * std::log(5.0L) + 1.0L / n + 4.0L * std::log(n) + 4.0L +
         a * (0.5L + 3.0L * c * T - 0.5L * (std::log(n - 1.0L) + 1.0L));
}

}  // namespace

double select_epsilon(std::size_t d, double epsilon, double c, unsigned r, double T) {
  check_common(d, c, T);
  const double cdc = c * std::pow(static_cast<double>(d), c);
  return epsilon / (std::pow(2.0, r) * std::pow(cdc, r + 1.0) * std::exp((r + 2.0) * c * T));
}

double select_N_log_lhs(std::size_t d, unsigned n, double c, unsigned r, double T) {
  const double log_cdc = std::log(c) + c * std::log(static_cast<double>(d));
  const double nn = n;
  return r * std::log(2.0) + (r + 1.0) * log_cdc + std::log(2.0) + nn / 2.0 + 3.0 * c * T * nn -
         nn / 2.0 * std::log(nn);
}

unsigned select_N(std::size_t d, double epsilon, double c, unsigned r, double T, unsigned cap) {
  check_common(d, c, T);
  if (!(epsilon > 0.0)) throw std::invalid_argument("select_N: epsilon must be positive");
  const double target = std::log(epsilon / 2.0);
  for (unsigned n = 2; n <= cap; ++n) {
    if (select_N_log_lhs(d, n, c, r, T) <= target) return n;
  }
  throw std::runtime_error("select_N: no n <= " + std::to_string(cap) + " satisfies the test");
}

long double c_delta_log_term(long double n, double delta, double c, double T) {
  const long double a = 8.0L + delta;
  return 2.0L * n * std::log(5.0L) + std::log(n) + 4.0L * n * std::log(n) +
         a * (std::log(2.0L) + (n - 1.0L) * (0.5L + 3.0L * c * T) -
              (n - 1.0L) / 2.0L * std::log(n - 1.0L));
}

CDelta compute_C_delta(double delta, double c, double T, long double cap) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("compute_C_delta: delta must be in (0, 1)");
  }
  if (!(c > 0.0) || !(T > 0.0)) throw std::invalid_argument("compute_C_delta: c, T must be > 0");
  if (c_delta_slope(cap, delta, c, T) > 0.0L) {
    throw std::runtime_error("compute_C_delta: terms still increase at the scan cap");
  }
  long double a = 2.0L;
  long double b = 2.0L;
  if (c_delta_slope(2.0L, delta, c, T) > 0.0L) {
    // Bracket by doubling so the result does not depend on the cap.
    b = 4.0L;
    while (c_delta_slope(b, delta, c, T) > 0.0L) {
      a = b;
      b *= 2.0L;
    }
    long double lo = std::log(a);
    long double hi = std::log(b);
    for (int it = 0; it < 200; ++it) {
      const long double mid = 0.5L * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (c_delta_slope(std::exp(mid), delta, c, T) > 0.0L) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    a = std::max(a, std::floor(std::exp(lo)));
    b = std::min(b, std::ceil(std::exp(hi)));
    if (c_delta_slope(a, delta, c, T) <= 0.0L) a = std::max(2.0L, std::floor(a / 2.0L));
    while (b - a > 1.0L) {
      const long double mid = a + std::floor((b - a) / 2.0L);
      if (c_delta_slope(mid, delta, c, T) > 0.0L) {
        a = mid;
      } else {
        b = mid;
      }
    }
  }
  CDelta best{-std::numeric_limits<long double>::infinity(), 2.0L};
  for (long double n : {a, b}) {
    const long double v = c_delta_log_term(n, delta, c, T);
    if (v > best.log_value) best = {v, n};
  }
  return best;
}

long double log_param_bound(std::size_t d, double epsilon, double delta, double c, unsigned r,
                            double T) {
  check_common(d, c, T);
  if (!(epsilon > 0.0)) throw std::invalid_argument("param_bound: epsilon must be positive");
  const long double ld = std::log(static_cast<long double>(d));
  const long double e = 3.0L * c + 8.0L + delta;
  const long double inner = (r + 1.0L) * (std::log(2.0L * c) + c * ld) + (r + 2.0L) * c * T;
  return std::log(96.0L) + 3.0L * c * ld + e * inner + compute_C_delta(delta, c, T).log_value -
         e * std::log(static_cast<long double>(epsilon));
}

double param_bound(std::size_t d, double epsilon, double delta, double c, unsigned r, double T) {
  const long double lb = log_param_bound(d, epsilon, delta, c, r, T);
  if (lb > std::log(static_cast<long double>(std::numeric_limits<double>::max()))) {
    return std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(std::exp(lb));
}

}  // namespace mkvnet
