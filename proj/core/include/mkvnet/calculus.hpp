#pragma once

#include <span>
#include <vector>

#include "mkvnet/network.hpp"

namespace mkvnet {

// Dimension-vector algebra. Every network operation below produces a network
// whose dims are exactly the corresponding dimension-vector expression.

/// alpha (.) beta = (beta_0, ..., beta_last + alpha_0, alpha_1, ..., alpha_last):
/// dims of "alpha after beta".
DimVector dim_compose(const DimVector& alpha, const DimVector& beta);

/// alpha [+] beta = (alpha_0, alpha_1 + beta_1, ..., alpha_H + beta_H, beta_last).
/// Requires equal length and equal first and last entries.
DimVector dim_sum(const DimVector& alpha, const DimVector& beta);

/// alpha [.] beta = (alpha_0, alpha_1 + beta_1, ..., alpha_last + beta_last).
/// Requires equal length and equal first entries.
DimVector dim_merge(const DimVector& alpha, const DimVector& beta);

/// (d, 2d, ..., 2d, d) with `length` entries, length >= 3.
DimVector identity_dims(std::size_t d, std::size_t length);

/// ReLU network with `hidden_layers` hidden layers realizing Id on R^d,
/// using x = relu(x) - relu(-x).
NeuralNetwork identity_network(std::size_t d, std::size_t hidden_layers);

/// Network with all weights and biases zero and the given dims.
NeuralNetwork zero_network(const DimVector& shape);

/// Network realizing f_net o g_net with dims dims(f_net) (.) dims(g_net).
///
/// g's output layer is split into (relu(u), relu(-u)) and f's first weight is
/// replaced by [W | -W], which fuses the two boundary widths into 2 * d_2.
NeuralNetwork compose(const NeuralNetwork& f_net, const NeuralNetwork& g_net);

/// Network realizing sum_i coeffs[i] * net_i with dims [+]_i dims(net_i).
/// All nets need the same depth, input width and output width. Zero
/// coefficients keep their summand's widths.
NeuralNetwork scaled_sum(std::span<const NeuralNetwork> nets, std::span<const double> coeffs);

/// Network realizing x -> (f_1(x), ..., f_M(x)) with dims [.]_i dims(net_i).
NeuralNetwork merge(std::span<const NeuralNetwork> nets);

/// Network with unchanged dims realizing x -> lambda * (R(net)(x + b) + a).
NeuralNetwork affine_wrap(const NeuralNetwork& net, double lambda, std::span<const double> b,
                          std::span<const double> a);

/// Same realization with `extra_hidden` more hidden layers, appended on the
/// output side: the last layer is split into (relu(u), relu(-u)), carried
/// through identity layers and joined again. For extra_hidden >= 2 the dims
/// equal those of compose(identity_network(q, extra_hidden - 1), net).
NeuralNetwork extend_depth(const NeuralNetwork& net, std::size_t extra_hidden);

}  // namespace mkvnet
