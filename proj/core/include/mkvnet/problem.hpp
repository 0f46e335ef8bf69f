#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mkvnet/network.hpp"

namespace mkvnet {

/// dX = E[mu(y, X_t)]|_{y = X_t} dt + dW,  X_0 = x, payoff E[f(X_T)].
///
/// mu_net maps R^{2d} -> R^d with input (y, x') where y is the particle and x'
/// an independent copy; f_net maps R^d -> R.
struct TestProblem {
  std::string id;
  std::size_t d = 1;
  double T = 1.0;
  double c = 1.0;
  unsigned r = 1;
  NeuralNetwork mu_net;
  NeuralNetwork f_net;
  std::optional<std::function<double(std::span<const double>, double)>> closed_form;
  /// Scale b of the drift perturbation when this problem was made by perturb().
  double perturbation_scale = 0.0;

  std::vector<double> mu(std::span<const double> y, std::span<const double> x) const;
  double f(std::span<const double> x) const;
  /// mu(0, 0)
  std::vector<double> mu_at_origin() const;
};

/// mu(x, y) = a x + b y,  f(x) = <w, x> + c0 (w defaults to e_1).
/// Lipschitz constant c = max(1, 2 max(|a|, |b|)); r = 1.
/// Closed form E[f(X_T)] = <w, x> e^{(a+b) T} + c0.
TestProblem linear_problem(std::size_t d, double a, double b, double T,
                           std::vector<double> w = {}, double c0 = 0.0);

/// mu = 0, f = value.
TestProblem constant_problem(std::size_t d, double value, double T);

/// Random ReLU drift with dims (2d, h, h, d), Lipschitz <= 1/2 in the joint
/// argument, and a random ReLU payoff with Lipschitz <= 1. c = 1, r = 1.
TestProblem relu_problem(std::size_t d, std::uint64_t seed, double T, std::size_t hidden = 0);

/// mu_eps = mu + eps s(x_1) e_1 and f_eps = f + eps s(x_1), where
/// s(u) = relu(u + 1) - relu(u - 1) - 1 is a clamp to [-1, 1]. The drift
/// moves by at most eps, so b = 1 works in the perturbation hypotheses.
TestProblem perturb(const TestProblem& base, double eps);

}  // namespace mkvnet
