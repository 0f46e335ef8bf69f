#pragma once

#include <cstddef>
#include <cstdint>

namespace mkvnet {

/// epsilon / (2^r (c d^c)^{r+1} e^{(r+2) c T})
double select_epsilon(std::size_t d, double epsilon, double c, unsigned r, double T);

/// Left-hand side of the N selection test in log form:
/// log[2^r (c d^c)^{r+1} 2 e^{n/2 + 3cTn} / n^{n/2}].
double select_N_log_lhs(std::size_t d, unsigned n, double c, unsigned r, double T);

/// min{n >= 2 : 2^r (c d^c)^{r+1} 2 e^{n/2 + 3cTn} / n^{n/2} <= epsilon / 2},
/// by upward scan. Throws std::runtime_error if no n <= cap qualifies.
unsigned select_N(std::size_t d, double epsilon, double c, unsigned r, double T,
                  unsigned cap = 10000);

/// log of the n-th term 5^{2n} n n^{4n} (2 e^{(n-1)/2 + 3cT(n-1)} / (n-1)^{(n-1)/2})^{8+delta}.
long double c_delta_log_term(long double n, double delta, double c, double T);

struct CDelta {
  long double log_value;
  /// Integer n attaining the supremum.
  long double argmax;
};

/// log C_delta = sup_{n >= 2} c_delta_log_term(n).
///
/// The log term is strictly concave in n on [2, inf), so the supremum is at
/// the floor or ceiling of the root of its derivative, found by bisection in
/// log n. For desk-scale constants the root sits near 1e17, far beyond any
/// term-by-term scan. Throws std::runtime_error if the derivative is still
/// positive at `cap`.
CDelta compute_C_delta(double delta, double c, double T, long double cap = 1e300L);

/// log of 96 d^{3c} ((2 c d^c)^{r+1} e^{(r+2)cT})^{3c+8+delta} C_delta epsilon^{-(3c+8+delta)}.
long double log_param_bound(std::size_t d, double epsilon, double delta, double c, unsigned r,
                            double T);

/// exp(log_param_bound); +inf when it overflows a double.
double param_bound(std::size_t d, double epsilon, double delta, double c, unsigned r, double T);

}  // namespace mkvnet
