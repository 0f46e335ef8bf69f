#include "mkvnet/calculus.hpp"

#include <stdexcept>
#include <string>

namespace mkvnet {

namespace {

std::vector<const SparseMatrix*> weights_at(std::span<const NeuralNetwork> nets, std::size_t i) {
  std::vector<const SparseMatrix*> out;
  out.reserve(nets.size());
  for (const auto& n : nets) out.push_back(&n.layers()[i].weights);
  return out;
}

std::vector<double> concat_bias(std::span<const NeuralNetwork> nets, std::size_t i) {
  std::vector<double> out;
  for (const auto& n : nets) {
    const auto& b = n.layers()[i].bias;
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

void require_same_depth_and_input(std::span<const NeuralNetwork> nets, const char* what) {
  if (nets.empty()) throw std::invalid_argument(std::string(what) + ": empty network list");
  for (const auto& n : nets) {
    if (n.layer_count() != nets.front().layer_count()) {
      throw std::invalid_argument(std::string(what) + ": networks differ in depth");
    }
    if (n.input_width() != nets.front().input_width()) {
      throw std::invalid_argument(std::string(what) + ": networks differ in input width");
    }
  }
}

// Replaces the output layer (W, B) by the pair (relu-splice, [I | -I]):
// (W; -W), (B; -B) followed by [I | -I] with zero bias.
std::vector<Layer> split_output(const Layer& last) {
  const std::size_t q = last.weights.rows();
  const SparseMatrix neg = last.weights.scaled(-1.0);
  const SparseMatrix* stack[] = {&last.weights, &neg};
  std::vector<double> bias(last.bias);
  for (double b : last.bias) bias.push_back(-b);

  const SparseMatrix eye = SparseMatrix::identity(q);
  const SparseMatrix* pair[] = {&eye, &eye};
  const double signs[] = {1.0, -1.0};

  std::vector<Layer> out;
  out.push_back({vstack(stack), std::move(bias)});
  out.push_back({hstack(pair, signs), std::vector<double>(q, 0.0)});
  return out;
}

}  // namespace

DimVector dim_compose(const DimVector& alpha, const DimVector& beta) {
  std::vector<std::size_t> w(beta.widths().begin(), beta.widths().end() - 1);
  w.push_back(beta.back() + alpha.front());
  w.insert(w.end(), alpha.widths().begin() + 1, alpha.widths().end());
  return DimVector(std::move(w));
}

DimVector dim_sum(const DimVector& alpha, const DimVector& beta) {
  if (alpha.size() != beta.size() || alpha.front() != beta.front() ||
      alpha.back() != beta.back()) {
    throw std::invalid_argument("dim_sum: vectors need equal length and equal end points");
  }
  std::vector<std::size_t> w = alpha.widths();
  for (std::size_t i = 1; i + 1 < w.size(); ++i) w[i] += beta[i];
  return DimVector(std::move(w));
}

DimVector dim_merge(const DimVector& alpha, const DimVector& beta) {
  if (alpha.size() != beta.size() || alpha.front() != beta.front()) {
    throw std::invalid_argument("dim_merge: vectors need equal length and equal first entry");
  }
  std::vector<std::size_t> w = alpha.widths();
  for (std::size_t i = 1; i < w.size(); ++i) w[i] += beta[i];
  return DimVector(std::move(w));
}

DimVector identity_dims(std::size_t d, std::size_t length) {
  if (length < 3) throw std::invalid_argument("identity_dims: length must be >= 3");
  std::vector<std::size_t> w(length, 2 * d);
  w.front() = d;
  w.back() = d;
  return DimVector(std::move(w));
}

NeuralNetwork identity_network(std::size_t d, std::size_t hidden_layers) {
  if (d == 0) throw std::invalid_argument("identity_network: d must be positive");
  if (hidden_layers == 0) throw std::invalid_argument("identity_network: need >= 1 hidden layer");
  const SparseMatrix eye = SparseMatrix::identity(d);
  const SparseMatrix neg = SparseMatrix::identity(d, -1.0);
  const SparseMatrix* split[] = {&eye, &neg};
  const SparseMatrix* join[] = {&eye, &eye};
  const double signs[] = {1.0, -1.0};

  std::vector<Layer> layers;
  layers.push_back({vstack(split), std::vector<double>(2 * d, 0.0)});
  for (std::size_t h = 1; h < hidden_layers; ++h) {
    layers.push_back({SparseMatrix::identity(2 * d), std::vector<double>(2 * d, 0.0)});
  }
  layers.push_back({hstack(join, signs), std::vector<double>(d, 0.0)});
  return NeuralNetwork(std::move(layers));
}

NeuralNetwork zero_network(const DimVector& shape) {
  std::vector<Layer> layers;
  for (std::size_t n = 1; n < shape.size(); ++n) {
    layers.push_back({SparseMatrix(shape[n], shape[n - 1]), std::vector<double>(shape[n], 0.0)});
  }
  return NeuralNetwork(std::move(layers));
}

NeuralNetwork compose(const NeuralNetwork& f_net, const NeuralNetwork& g_net) {
  if (f_net.input_width() != g_net.output_width()) {
    throw std::invalid_argument("compose: input width of f (" +
                                std::to_string(f_net.input_width()) +
                                ") differs from output width of g (" +
                                std::to_string(g_net.output_width()) + ")");
  }
  const auto& g = g_net.layers();
  const auto& f = f_net.layers();

  std::vector<Layer> layers(g.begin(), g.end() - 1);
  {
    const SparseMatrix neg = g.back().weights.scaled(-1.0);
    const SparseMatrix* stack[] = {&g.back().weights, &neg};
    std::vector<double> bias(g.back().bias);
    for (double b : g.back().bias) bias.push_back(-b);
    layers.push_back({vstack(stack), std::move(bias)});
  }
  {
    const SparseMatrix* pair[] = {&f.front().weights, &f.front().weights};
    const double signs[] = {1.0, -1.0};
    layers.push_back({hstack(pair, signs), f.front().bias});
  }
  layers.insert(layers.end(), f.begin() + 1, f.end());
  return NeuralNetwork(std::move(layers));
}

NeuralNetwork scaled_sum(std::span<const NeuralNetwork> nets, std::span<const double> coeffs) {
  require_same_depth_and_input(nets, "scaled_sum");
  if (coeffs.size() != nets.size()) {
    throw std::invalid_argument("scaled_sum: one coefficient per network required");
  }
  const std::size_t q = nets.front().output_width();
  for (const auto& n : nets) {
    if (n.output_width() != q) throw std::invalid_argument("scaled_sum: output widths differ");
  }
  const std::size_t depth = nets.front().layer_count();

  std::vector<Layer> layers;
  layers.reserve(depth);
  layers.push_back({vstack(weights_at(nets, 0)), concat_bias(nets, 0)});
  for (std::size_t i = 1; i + 1 < depth; ++i) {
    layers.push_back({block_diag(weights_at(nets, i)), concat_bias(nets, i)});
  }
  std::vector<double> bias(q, 0.0);
  for (std::size_t j = 0; j < nets.size(); ++j) {
    const auto& b = nets[j].layers().back().bias;
    for (std::size_t r = 0; r < q; ++r) bias[r] += coeffs[j] * b[r];
  }
  layers.push_back({hstack(weights_at(nets, depth - 1), coeffs), std::move(bias)});
  return NeuralNetwork(std::move(layers));
}

NeuralNetwork merge(std::span<const NeuralNetwork> nets) {
  require_same_depth_and_input(nets, "merge");
  const std::size_t depth = nets.front().layer_count();
  std::vector<Layer> layers;
  layers.reserve(depth);
  layers.push_back({vstack(weights_at(nets, 0)), concat_bias(nets, 0)});
  for (std::size_t i = 1; i < depth; ++i) {
    layers.push_back({block_diag(weights_at(nets, i)), concat_bias(nets, i)});
  }
  return NeuralNetwork(std::move(layers));
}

NeuralNetwork affine_wrap(const NeuralNetwork& net, double lambda, std::span<const double> b,
                          std::span<const double> a) {
  if (b.size() != net.input_width()) throw std::invalid_argument("affine_wrap: shift b length");
  if (a.size() != net.output_width()) throw std::invalid_argument("affine_wrap: offset a length");
  std::vector<Layer> layers = net.layers();

  Layer& first = layers.front();
  first.weights.multiply_add(b, first.bias);

  Layer& last = layers.back();
  last.weights = last.weights.scaled(lambda);
  for (std::size_t r = 0; r < last.bias.size(); ++r) last.bias[r] = lambda * (last.bias[r] + a[r]);
  return NeuralNetwork(std::move(layers));
}

NeuralNetwork extend_depth(const NeuralNetwork& net, std::size_t extra_hidden) {
  if (extra_hidden == 0) return net;
  std::vector<Layer> layers = net.layers();
  const std::size_t q = net.output_width();
  auto split = split_output(layers.back());
  layers.pop_back();
  layers.push_back(std::move(split[0]));
  for (std::size_t k = 1; k < extra_hidden; ++k) {
    layers.push_back({SparseMatrix::identity(2 * q), std::vector<double>(2 * q, 0.0)});
  }
  layers.push_back(std::move(split[1]));
  return NeuralNetwork(std::move(layers));
}

}  // namespace mkvnet
