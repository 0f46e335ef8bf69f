#include "mkvnet/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "mkvnet/calculus.hpp"
#include "mkvnet/random.hpp"

namespace mkvnet {

namespace {

double frobenius(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::sqrt(s);
}

// Random dense network with the given widths whose weight matrices have
// Frobenius norm (hence operator norm bound) `layer_lip` each.
NeuralNetwork random_net(const std::vector<std::size_t>& widths, double layer_lip,
                         double bias_scale, const CounterStream& rng, std::uint64_t& counter) {
  std::vector<Layer> layers;
  for (std::size_t n = 1; n < widths.size(); ++n) {
    std::vector<double> w(widths[n] * widths[n - 1]);
    rng.normals(counter, w);
    counter += w.size();
    const double norm = frobenius(w);
    for (double& v : w) v *= layer_lip / norm;
    std::vector<double> b(widths[n]);
    rng.normals(counter, b);
    counter += b.size();
    for (double& v : b) v *= bias_scale;
    layers.push_back({SparseMatrix::from_dense(widths[n], widths[n - 1], w), std::move(b)});
  }
  return NeuralNetwork(std::move(layers));
}

// x -> scale * s(x_{col}) e_1 as a depth-3 network R^in -> R^out.
NeuralNetwork clamp_net(std::size_t in, std::size_t out, double scale) {
  SparseMatrix::Builder w1(2, in);
  w1.add(0, 0, 1.0).add(1, 0, 1.0);
  SparseMatrix::Builder w2(out, 2);
  w2.add(0, 0, scale).add(0, 1, -scale);
  std::vector<double> b2(out, 0.0);
  b2[0] = -scale;
  std::vector<Layer> layers;
  layers.push_back({std::move(w1).finish(), {1.0, -1.0}});
  layers.push_back({std::move(w2).finish(), std::move(b2)});
  return NeuralNetwork(std::move(layers));
}

NeuralNetwork add_clamp(const NeuralNetwork& net, double eps) {
  NeuralNetwork bump = clamp_net(net.input_width(), net.output_width(), eps);
  bump = extend_depth(bump, net.layer_count() - bump.layer_count());
  const NeuralNetwork pair[] = {net, bump};
  const double coeffs[] = {1.0, 1.0};
  return scaled_sum(pair, coeffs);
}

}  // namespace

std::vector<double> TestProblem::mu(std::span<const double> y, std::span<const double> x) const {
  std::vector<double> in(y.begin(), y.end());
  in.insert(in.end(), x.begin(), x.end());
  return realize(mu_net, in);
}

double TestProblem::f(std::span<const double> x) const { return realize(f_net, x)[0]; }

std::vector<double> TestProblem::mu_at_origin() const {
  return realize(mu_net, std::vector<double>(2 * d, 0.0));
}

TestProblem linear_problem(std::size_t d, double a, double b, double T, std::vector<double> w,
                           double c0) {
  if (d == 0) throw std::invalid_argument("linear_problem: d must be positive");
  if (w.empty()) {
    w.assign(d, 0.0);
    w[0] = 1.0;
  }
  if (w.size() != d) throw std::invalid_argument("linear_problem: w must have length d");

  // L = [aI bI], realized as relu(Lz) - relu(-Lz).
  SparseMatrix::Builder l(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    l.add(i, i, a).add(i, d + i, b);
    l.add(d + i, i, -a).add(d + i, d + i, -b);
  }
  const SparseMatrix eye = SparseMatrix::identity(d);
  const SparseMatrix* join[] = {&eye, &eye};
  const double signs[] = {1.0, -1.0};
  std::vector<Layer> mu_layers;
  mu_layers.push_back({std::move(l).finish(), std::vector<double>(2 * d, 0.0)});
  mu_layers.push_back({hstack(join, signs), std::vector<double>(d, 0.0)});

  SparseMatrix::Builder f1(2, d);
  for (std::size_t j = 0; j < d; ++j) f1.add(0, j, w[j]).add(1, j, -w[j]);
  SparseMatrix::Builder f2(1, 2);
  f2.add(0, 0, 1.0).add(0, 1, -1.0);
  std::vector<Layer> f_layers;
  f_layers.push_back({std::move(f1).finish(), {0.0, 0.0}});
  f_layers.push_back({std::move(f2).finish(), {c0}});

  TestProblem p{.id = "linear",
                .d = d,
                .T = T,
                .c = std::max(1.0, 2.0 * std::max(std::abs(a), std::abs(b))),
                .r = 1,
                .mu_net = NeuralNetwork(std::move(mu_layers)),
                .f_net = NeuralNetwork(std::move(f_layers)),
                .closed_form = std::nullopt};
  double wnorm = 0.0;
  for (double v : w) wnorm += v * v;
  p.c = std::max(p.c, std::sqrt(wnorm));
  p.closed_form = [w, a, b, c0](std::span<const double> x, double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
    return s * std::exp((a + b) * t) + c0;
  };
  return p;
}

TestProblem constant_problem(std::size_t d, double value, double T) {
  if (d == 0) throw std::invalid_argument("constant_problem: d must be positive");
  std::vector<Layer> f_layers;
  f_layers.push_back({SparseMatrix(1, d), {0.0}});
  f_layers.push_back({SparseMatrix(1, 1), {value}});
  TestProblem p{.id = "constant",
                .d = d,
                .T = T,
                .c = 1.0,
                .r = 1,
                .mu_net = zero_network(DimVector({2 * d, 2 * d, d})),
                .f_net = NeuralNetwork(std::move(f_layers)),
                .closed_form = std::nullopt};
  p.closed_form = [value](std::span<const double>, double) { return value; };
  return p;
}

TestProblem relu_problem(std::size_t d, std::uint64_t seed, double T, std::size_t hidden) {
  if (d == 0) throw std::invalid_argument("relu_problem: d must be positive");
  if (hidden == 0) hidden = 2 * d + 2;
  const CounterStream rng(splitmix64(seed), 0x72656C75ull);
  std::uint64_t counter = 0;
  // Three layers with norm 0.5^(1/3) each: joint Lipschitz constant <= 1/2.
  NeuralNetwork mu = random_net({2 * d, hidden, hidden, d}, std::cbrt(0.5), 0.3, rng, counter);
  NeuralNetwork f = random_net({d, hidden, 1}, 1.0, 0.3, rng, counter);
  return TestProblem{.id = "relu",
                     .d = d,
                     .T = T,
                     .c = 1.0,
                     .r = 1,
                     .mu_net = std::move(mu),
                     .f_net = std::move(f),
                     .closed_form = std::nullopt};
}

TestProblem perturb(const TestProblem& base, double eps) {
  if (!(eps >= 0.0) || !(eps < 1.0)) throw std::invalid_argument("perturb: eps must be in [0, 1)");
  TestProblem p = base;
  p.id = base.id + "+eps";
  p.mu_net = add_clamp(base.mu_net, eps);
  p.f_net = add_clamp(base.f_net, eps);
  // The clamp adds at most eps to the Lipschitz constant in the first argument.
  p.c = base.c + 2.0 * eps;
  p.perturbation_scale = 1.0;
  p.closed_form = std::nullopt;
  return p;
}

}  // namespace mkvnet
