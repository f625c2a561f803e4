#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gnnerator/errors.hpp"
#include "gnnerator/network.hpp"
#include "helpers.hpp"

using namespace gnnerator;

namespace {

LayerSpec plain_layer(Aggregator agg, std::size_t dim, bool concat) {
  LayerSpec l;
  l.aggregator = agg;
  l.concat_self = concat;
  l.in_dim = dim;
  l.out_dim = dim;
  l.weights = Matrix((concat ? 2 : 1) * dim, dim);
  for (std::size_t i = 0; i < dim; ++i) l.weights(i, i) = 1.0f;  // identity on z
  return l;
}

// Naive reference written straight from the layer equations, in double.
Matrix naive_layer(const Graph& g, const Matrix& h, const LayerSpec& l) {
  const std::size_t N = g.num_nodes();
  Matrix src = h;
  if (l.pool_weights) {
    src = Matrix(N, l.pool_dim);
    for (std::size_t u = 0; u < N; ++u) {
      for (std::size_t j = 0; j < l.pool_dim; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < l.in_dim; ++k) s += double(h(u, k)) * (*l.pool_weights)(k, j);
        src(u, j) = static_cast<float>(std::max(s, 0.0));
      }
    }
  }
  const std::size_t D = src.cols();
  std::vector<std::vector<double>> z(N, std::vector<double>(D));
  for (std::size_t u = 0; u < N; ++u) {
    std::vector<std::size_t> members{u};
    for (const Edge& e : g.edges()) {
      if (e.dst == u) members.push_back(e.src);
    }
    for (std::size_t d = 0; d < D; ++d) {
      double acc = l.aggregator == Aggregator::MaxIncludeSelf ? -1e300 : 0.0;
      for (auto v : members) {
        acc = l.aggregator == Aggregator::MaxIncludeSelf ? std::max(acc, double(src(v, d)))
                                                         : acc + src(v, d);
      }
      if (l.aggregator == Aggregator::MeanIncludeSelf) acc /= double(members.size());
      z[u][d] = acc;
    }
  }
  Matrix out(N, l.out_dim);
  for (std::size_t u = 0; u < N; ++u) {
    for (std::size_t j = 0; j < l.out_dim; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < D; ++k) s += z[u][k] * l.weights(k, j);
      if (l.concat_self) {
        for (std::size_t k = 0; k < l.in_dim; ++k) s += double(h(u, k)) * l.weights(D + k, j);
      }
      if (l.activation == Activation::ReLU) s = std::max(s, 0.0);
      out(u, j) = static_cast<float>(s);
    }
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, double(std::fabs(a.values()[i] - b.values()[i])));
  return m;
}

}  // namespace

TEST_CASE("mean over neighbours and self") {
  const Graph g(3, {{1, 0}, {2, 0}});
  Matrix h(3, 1);
  h(0, 0) = 0.0f;
  h(1, 0) = 2.0f;
  h(2, 0) = 4.0f;
  const Matrix out = oracle_layer(g, h, plain_layer(Aggregator::MeanIncludeSelf, 1, false));
  CHECK(out(0, 0) == 2.0f);
}

TEST_CASE("elementwise max") {
  const Graph g(2, {{1, 0}});
  Matrix h(2, 2);
  h(0, 0) = 1.0f;
  h(0, 1) = -3.0f;
  h(1, 0) = 2.0f;
  h(1, 1) = 0.0f;
  const Matrix out = oracle_layer(g, h, plain_layer(Aggregator::MaxIncludeSelf, 2, false));
  CHECK(out(0, 0) == 2.0f);
  CHECK(out(0, 1) == 0.0f);
}

TEST_CASE("in-degree denominator") {
  const Graph g(3, {{1, 0}, {2, 0}});
  Matrix h(3, 1, 3.0f);
  const LayerSpec l = plain_layer(Aggregator::MeanIncludeSelf, 1, false);
  CHECK(oracle_layer(g, h, l, MeanDenominator::InDegree)(0, 0) == 4.5f);
  CHECK(oracle_layer(g, h, l, MeanDenominator::InDegree)(1, 0) == 3.0f);  // clamped to 1
  CHECK(mean_divisor(MeanDenominator::DegreePlusOne, 0) == 1.0f);
  CHECK(mean_divisor(MeanDenominator::InDegree, 0) == 1.0f);
}

TEST_CASE("builtin shapes") {
  const NetworkSpec sage = make_builtin(BuiltinNetwork::Graphsage, 1433, 16, 7, 1);
  REQUIRE(sage.layers.size() == 2);
  const LayerSpec& l0 = sage.layers[0];
  CHECK(l0.stage_order == StageOrder::GraphFirst);
  CHECK(l0.aggregator == Aggregator::MeanIncludeSelf);
  CHECK(l0.concat_self);
  CHECK(l0.weights.rows() == 2 * 1433);
  CHECK(l0.weights.cols() == 16);
  CHECK(l0.activation == Activation::ReLU);
  CHECK(sage.layers[1].activation == Activation::None);

  const NetworkSpec pool = make_builtin(BuiltinNetwork::GraphsagePool, 32, 16, 4, 1);
  CHECK(pool.layers[0].stage_order == StageOrder::DenseFirst);
  CHECK(pool.layers[0].aggregator == Aggregator::MaxIncludeSelf);
  REQUIRE(pool.layers[0].pool_weights);
  CHECK(pool.layers[0].pool_weights->rows() == 32);

  const NetworkSpec gcn = make_builtin(BuiltinNetwork::GCN, 32, 16, 4, 1);
  CHECK_FALSE(gcn.layers[0].concat_self);
  CHECK(gcn.layers[0].weights.rows() == 32);
}

TEST_CASE("weights are seeded and bounded") {
  const NetworkSpec a = make_builtin(BuiltinNetwork::GraphsagePool, 20, 16, 3, 42);
  const NetworkSpec b = make_builtin(BuiltinNetwork::GraphsagePool, 20, 16, 3, 42);
  const NetworkSpec c = make_builtin(BuiltinNetwork::GraphsagePool, 20, 16, 3, 43);
  CHECK(a.layers[0].weights == b.layers[0].weights);
  CHECK(*a.layers[1].pool_weights == *b.layers[1].pool_weights);
  CHECK_FALSE(a.layers[0].weights == c.layers[0].weights);
  for (const auto& l : a.layers) {
    for (float w : l.weights.values()) CHECK(std::fabs(w) <= 0.1f);
  }
}

TEST_CASE("name parsing") {
  CHECK(parse_builtin("GraphSAGE") == BuiltinNetwork::Graphsage);
  CHECK(parse_builtin("gcn") == BuiltinNetwork::GCN);
  CHECK_THROWS_AS(parse_builtin("gat"), ParameterError);
  CHECK_THROWS_AS(make_builtin(BuiltinNetwork::GCN, 0, 16, 4, 1), ParameterError);
}

TEST_CASE("oracle matches the naive reference on a random 50-node graph") {
  const Graph g = testing::random_graph(50, 200, 5);
  const Matrix h = testing::random_features(50, 12, 5);
  for (auto kind : {BuiltinNetwork::GCN, BuiltinNetwork::Graphsage, BuiltinNetwork::GraphsagePool}) {
    const NetworkSpec net = make_builtin(kind, 12, 16, 6, 9);
    CHECK(max_abs_diff(oracle_layer(g, h, net.layers[0]), naive_layer(g, h, net.layers[0])) <= 1e-6);
  }
}

TEST_CASE("network fold") {
  const Graph g = testing::cycle_graph(4);
  Matrix h(4, 2);
  for (std::size_t i = 0; i < 8; ++i) h.values()[i] = float(i);
  NetworkSpec empty;
  CHECK(oracle_network(g, h, empty) == h);

  NetworkSpec one = make_builtin(BuiltinNetwork::GCN, 2, 2, 2, 3);
  one.layers.pop_back();
  CHECK(oracle_network(g, h, one) == oracle_layer(g, h, one.layers[0]));
}

TEST_CASE("2-layer GCN on the 4-cycle, unrolled by hand at dim 2") {
  // Identity weights: each layer replaces h_u by (h_{u-1} + h_u) / 2.
  const Graph g = testing::cycle_graph(4);
  Matrix h(4, 2);
  const float init[4][2] = {{0, 8}, {2, 6}, {4, 4}, {8, 0}};
  for (int u = 0; u < 4; ++u) {
    h(u, 0) = init[u][0];
    h(u, 1) = init[u][1];
  }
  NetworkSpec net;
  net.layers = {plain_layer(Aggregator::MeanIncludeSelf, 2, false),
                plain_layer(Aggregator::MeanIncludeSelf, 2, false)};
  // step 1: u0 = (h3 + h0)/2 = (4, 4); u1 = (1, 7); u2 = (3, 5); u3 = (6, 2)
  // step 2: u0 = (5, 3); u1 = (2.5, 5.5); u2 = (2, 6); u3 = (4.5, 3.5)
  const Matrix out = oracle_network(g, h, net);
  const float expected[4][2] = {{5, 3}, {2.5f, 5.5f}, {2, 6}, {4.5f, 3.5f}};
  for (int u = 0; u < 4; ++u) {
    CHECK(out(u, 0) == expected[u][0]);
    CHECK(out(u, 1) == expected[u][1]);
  }
}

TEST_CASE("properties") {
  const Graph none(30, {});
  const Matrix h = testing::random_features(30, 5, 1);
  CHECK(oracle_layer(none, h, plain_layer(Aggregator::MeanIncludeSelf, 5, false)) == h);

  const Graph g = testing::random_graph(30, 120, 8);
  const Matrix mx = oracle_layer(g, h, plain_layer(Aggregator::MaxIncludeSelf, 5, false));
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(mx.values()[i] >= h.values()[i]);

  // Permuted edge order.
  std::vector<Edge> rev(g.edges().rbegin(), g.edges().rend());
  const Graph gr(30, rev);
  CHECK(oracle_layer(gr, h, plain_layer(Aggregator::MaxIncludeSelf, 5, false)) == mx);
  const Matrix mean = oracle_layer(g, h, plain_layer(Aggregator::MeanIncludeSelf, 5, false));
  CHECK(max_relative_error(oracle_layer(gr, h, plain_layer(Aggregator::MeanIncludeSelf, 5, false)), mean) <= 1e-5);
}

TEST_CASE("shape errors") {
  const Graph g = testing::cycle_graph(4);
  const NetworkSpec net = make_builtin(BuiltinNetwork::Graphsage, 3, 4, 2, 1);
  CHECK_THROWS_AS(oracle_layer(g, Matrix(4, 5), net.layers[0]), ShapeError);
  NetworkSpec bad = net;
  bad.layers[1].in_dim = 5;
  CHECK_THROWS_AS(bad.validate(), ShapeError);
  LayerSpec l = net.layers[0];
  l.weights = Matrix(3, 4);
  CHECK_THROWS_AS(l.validate(), ShapeError);
}

TEST_CASE("text round trip") {
  NetworkSpec net = make_builtin(BuiltinNetwork::GraphsagePool, 10, 8, 3, 77);
  net.mean_denominator = MeanDenominator::InDegree;
  const NetworkSpec back = network_from_text(network_to_text(net));
  CHECK(back.name == net.name);
  CHECK(back.seed == 77);
  CHECK(back.mean_denominator == MeanDenominator::InDegree);
  REQUIRE(back.layers.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.layers[i].weights == net.layers[i].weights);
    CHECK(*back.layers[i].pool_weights == *net.layers[i].pool_weights);
    CHECK(back.layers[i].stage_order == net.layers[i].stage_order);
  }
  CHECK_THROWS_AS(network_from_text("[network]\nname = x\n"), ConfigError);
  CHECK_THROWS_AS(network_from_text("[network]\nname = x\nlayers = 1\n[layer.0]\nstage_order = up\n"),
                  ParameterError);
}
