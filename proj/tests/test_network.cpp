#include <doctest.h>

#include <random>
#include <stdexcept>
#include <sstream>

#include "mkvnet/calculus.hpp"
#include "mkvnet/network.hpp"
#include "oracles.hpp"

using namespace mkvnet;

namespace {

NeuralNetwork tiny(double w1, double b1, double w2, double b2) {
  std::vector<Layer> layers;
  layers.push_back({SparseMatrix::from_dense(1, 1, std::vector<double>{w1}), {b1}});
  layers.push_back({SparseMatrix::from_dense(1, 1, std::vector<double>{w2}), {b2}});
  return NeuralNetwork(std::move(layers));
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("relu is componentwise max with zero") {
    CHECK(relu(std::vector<double>{-1.0, 2.0, 0.0}) == std::vector<double>{0.0, 2.0, 0.0});
    CHECK(relu(std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
    CHECK(relu(std::vector<double>{3.5}) == std::vector<double>{3.5});
  }

  TEST_CASE("realize on small hand-built networks") {
    CHECK(realize(tiny(1, 0, 1, 0), std::vector<double>{-3.0})[0] == 0.0);
    CHECK(realize(tiny(2, 1, 3, 0), std::vector<double>{1.0})[0] == 9.0);
    const auto id = identity_network(2, 1);
    CHECK(realize(id, std::vector<double>{-1.5, 2.0}) == std::vector<double>{-1.5, 2.0});
  }

  TEST_CASE("realize rejects a wrong input length") {
    CHECK_THROWS_AS(realize(tiny(1, 0, 1, 0), std::vector<double>{1.0, 2.0}), std::invalid_argument);
  }

  TEST_CASE("realize agrees with a dense straight-line forward pass") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const auto net = oracle::random_network(rng, oracle::random_widths(rng, 4, 7));
      for (int i = 0; i < 10; ++i) {
        const auto x = oracle::random_vector(rng, net.input_width());
        CHECK(oracle::rel_gap(realize(net, x), oracle::naive_forward(net, x)) <= 1e-12);
      }
    }
  }

  TEST_CASE("param_count matches the layer formula") {
    CHECK(param_count(DimVector({2, 4, 4, 2})) == 42);
    CHECK(param_count(DimVector({1, 2, 1})) == 7);
    CHECK(param_count(DimVector({5, 10, 5})) == 115);
    CHECK(param_count(identity_network(3, 2)) == param_count(DimVector({3, 6, 6, 3})));
  }

  TEST_CASE("dims reads widths off the layer shapes") {
    std::vector<Layer> layers;
    layers.push_back({SparseMatrix(4, 2), std::vector<double>(4)});
    layers.push_back({SparseMatrix(2, 4), std::vector<double>(2)});
    const NeuralNetwork net(std::move(layers));
    CHECK(dims(net) == DimVector({2, 4, 2}));
    CHECK(dims(identity_network(3, 2)) == DimVector({3, 6, 6, 3}));
    CHECK(dims(net).size() == net.layer_count() + 1);
  }

  TEST_CASE("dim_supnorm") {
    CHECK(dim_supnorm(DimVector({2, 4, 3})) == 4);
    CHECK(dim_supnorm(DimVector({1, 1, 1})) == 1);
    CHECK(dim_supnorm(identity_dims(7, 5)) == 14);
  }

  TEST_CASE("parameter count is at most 2 * length * supnorm^2") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      const DimVector v(oracle::random_widths(rng, 3 + i % 5, 9));
      CHECK(param_count(v) <= 2 * v.size() * dim_supnorm(v) * dim_supnorm(v));
    }
  }

  TEST_CASE("construction validates shapes") {
    CHECK_THROWS_AS(DimVector({1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(DimVector({1, 0, 1}), std::invalid_argument);
    std::vector<Layer> one;
    one.push_back({SparseMatrix(1, 1), {0.0}});
    CHECK_THROWS_AS(NeuralNetwork{one}, std::invalid_argument);
    std::vector<Layer> bad;
    bad.push_back({SparseMatrix(2, 1), {0.0, 0.0}});
    bad.push_back({SparseMatrix(1, 3), {0.0}});
    CHECK_THROWS_AS(NeuralNetwork{bad}, std::invalid_argument);
    std::vector<Layer> bias;
    bias.push_back({SparseMatrix(2, 1), {0.0}});
    bias.push_back({SparseMatrix(1, 2), {0.0}});
    CHECK_THROWS_AS(NeuralNetwork{bias}, std::invalid_argument);
  }

  TEST_CASE("sparse matrix basics") {
    const std::vector<double> dense = {1, 0, 2, 0, 0, 3};
    const auto a = SparseMatrix::from_dense(2, 3, dense);
    CHECK(a.nnz() == 3);
    CHECK(a.at(0, 2) == 2.0);
    CHECK(a.at(1, 1) == 0.0);
    CHECK(a.to_dense() == dense);
    CHECK(a.multiply(std::vector<double>{1, 1, 1}) == std::vector<double>{3, 3});
    SparseMatrix::Builder b(2, 2);
    b.add(0, 0, 1.0).add(0, 0, 2.0).add(1, 1, -1.0).add(1, 1, 1.0);
    const auto s = std::move(b).finish();
    CHECK(s.at(0, 0) == 3.0);
    CHECK(s.at(1, 1) == 0.0);
  }

  TEST_CASE("text serialization round trips exactly") {
    std::mt19937_64 rng(5);
    const auto net = oracle::random_network(rng, {3, 5, 4, 2});
    std::stringstream ss;
    write_text(ss, net);
    const std::string first = ss.str();
    const auto back = read_text(ss);
    CHECK(back == net);
    std::stringstream again;
    write_text(again, back);
    CHECK(again.str() == first);
    CHECK(first.substr(0, first.find('\n')) == "3 5 4 2");
  }

  TEST_CASE("read_text rejects malformed input") {
    std::stringstream bad("2 3\n");
    CHECK_THROWS(read_text(bad));
    std::stringstream short_body("1 1 1\n1\n");
    CHECK_THROWS(read_text(short_body));
  }
}
