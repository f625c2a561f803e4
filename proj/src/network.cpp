#include "gnnerator/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gnnerator/errors.hpp"

namespace gnnerator {
namespace {

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-0.1f, 0.1f);
  Matrix m(rows, cols);
  for (float& v : m.values()) v = dist(rng);
  return m;
}

float activate(Activation act, float x) {
  return act == Activation::ReLU ? std::max(x, 0.0f) : x;
}

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& text, const std::pair<const char*, Enum> (&table)[N],
                const char* what) {
  for (const auto& [name, value] : table) {
    if (text == name) return value;
  }
  throw ParameterError(std::string("unknown ") + what + " '" + text + "'");
}

constexpr std::pair<const char*, StageOrder> kStageOrders[] = {
    {"graph_first", StageOrder::GraphFirst}, {"dense_first", StageOrder::DenseFirst}};
constexpr std::pair<const char*, Aggregator> kAggregators[] = {
    {"mean", Aggregator::MeanIncludeSelf}, {"max", Aggregator::MaxIncludeSelf}};
constexpr std::pair<const char*, Activation> kActivations[] = {{"none", Activation::None},
                                                               {"relu", Activation::ReLU}};
constexpr std::pair<const char*, MeanDenominator> kMeanRules[] = {
    {"degree_plus_one", MeanDenominator::DegreePlusOne}, {"in_degree", MeanDenominator::InDegree}};
constexpr std::pair<const char*, BuiltinNetwork> kBuiltins[] = {
    {"gcn", BuiltinNetwork::GCN},
    {"graphsage", BuiltinNetwork::Graphsage},
    {"graphsagepool", BuiltinNetwork::GraphsagePool}};

template <typename Enum, std::size_t N>
const char* enum_name(Enum value, const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

LayerSpec make_layer(StageOrder order, Aggregator agg, bool concat, Activation act,
                     std::size_t in_dim, std::size_t out_dim) {
  LayerSpec layer;
  layer.stage_order = order;
  layer.aggregator = agg;
  layer.concat_self = concat;
  layer.activation = act;
  layer.in_dim = in_dim;
  layer.out_dim = out_dim;
  layer.pool_dim = order == StageOrder::DenseFirst ? in_dim : 0;
  return layer;
}

}  // namespace

void LayerSpec::validate() const {
  if (in_dim == 0 || out_dim == 0) throw ShapeError("layer dims must be >= 1");
  if (stage_order == StageOrder::DenseFirst) {
    if (pool_dim == 0) throw ShapeError("dense-first layer needs pool_dim >= 1");
    if (!pool_weights) throw ShapeError("dense-first layer needs pool weights");
    require_shape(*pool_weights, in_dim, pool_dim, "pool weights");
    if (concat_self && pool_dim != in_dim) {
      throw ShapeError("concatenating self features requires pool_dim == in_dim");
    }
  } else if (pool_weights || pool_dim != 0) {
    throw ShapeError("pool weights are only valid on dense-first layers");
  }
  require_shape(weights, (concat_self ? 2 : 1) * aggregate_dim(), out_dim, "weights");
}

void NetworkSpec::validate() const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].validate();
    if (i > 0 && layers[i].in_dim != layers[i - 1].out_dim) {
      throw ShapeError("layer " + std::to_string(i) + " input dim " +
                       std::to_string(layers[i].in_dim) + " != previous output dim " +
                       std::to_string(layers[i - 1].out_dim));
    }
  }
}

void initialize_weights(NetworkSpec& net) {
  std::mt19937_64 rng(net.seed);
  for (LayerSpec& layer : net.layers) {
    if (layer.stage_order == StageOrder::DenseFirst) {
      layer.pool_weights = random_matrix(layer.in_dim, layer.pool_dim, rng);
    } else {
      layer.pool_weights.reset();
    }
    layer.weights =
        random_matrix((layer.concat_self ? 2 : 1) * layer.aggregate_dim(), layer.out_dim, rng);
  }
}

NetworkSpec make_builtin(BuiltinNetwork kind, std::size_t in_dim, std::size_t hidden_dim,
                         std::size_t out_dim, std::uint64_t seed) {
  if (in_dim == 0 || hidden_dim == 0 || out_dim == 0) {
    throw ParameterError("network dims must be >= 1");
  }
  NetworkSpec net;
  net.name = to_string(kind);
  net.seed = seed;
  const std::size_t dims[3] = {in_dim, hidden_dim, out_dim};
  for (std::size_t l = 0; l < 2; ++l) {
    const Activation act = l == 0 ? Activation::ReLU : Activation::None;
    switch (kind) {
      case BuiltinNetwork::GCN:
        net.layers.push_back(make_layer(StageOrder::GraphFirst, Aggregator::MeanIncludeSelf, false,
                                        act, dims[l], dims[l + 1]));
        break;
      case BuiltinNetwork::Graphsage:
        net.layers.push_back(make_layer(StageOrder::GraphFirst, Aggregator::MeanIncludeSelf, true,
                                        act, dims[l], dims[l + 1]));
        break;
      case BuiltinNetwork::GraphsagePool:
        net.layers.push_back(make_layer(StageOrder::DenseFirst, Aggregator::MaxIncludeSelf, true,
                                        act, dims[l], dims[l + 1]));
        break;
    }
  }
  initialize_weights(net);
  return net;
}

BuiltinNetwork parse_builtin(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return parse_enum(lower, kBuiltins, "network");
}

const char* to_string(BuiltinNetwork kind) { return enum_name(kind, kBuiltins); }
const char* to_string(StageOrder order) { return enum_name(order, kStageOrders); }
const char* to_string(Aggregator agg) { return enum_name(agg, kAggregators); }
const char* to_string(Activation act) { return enum_name(act, kActivations); }

std::string network_to_text(const NetworkSpec& net) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  tree.put("network.name", net.name);
  tree.put("network.seed", net.seed);
  tree.put("network.mean_denominator", enum_name(net.mean_denominator, kMeanRules));
  tree.put("network.layers", net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& layer = net.layers[i];
    pt::ptree section;
    section.put("stage_order", to_string(layer.stage_order));
    section.put("aggregator", to_string(layer.aggregator));
    section.put("concat_self", layer.concat_self);
    section.put("activation", to_string(layer.activation));
    section.put("in_dim", layer.in_dim);
    section.put("out_dim", layer.out_dim);
    section.put("pool_dim", layer.pool_dim);
    tree.add_child(pt::ptree::path_type("layer." + std::to_string(i), '/'), section);
  }
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

NetworkSpec network_from_text(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("network config: ") + e.what());
  }
  try {
    NetworkSpec net;
    net.name = tree.get<std::string>("network.name");
    net.seed = tree.get<std::uint64_t>("network.seed", 0);
    net.mean_denominator =
        parse_enum(tree.get<std::string>("network.mean_denominator", "degree_plus_one"),
                   kMeanRules, "mean denominator");
    const auto count = tree.get<std::size_t>("network.layers");
    for (std::size_t i = 0; i < count; ++i) {
      const auto& section = tree.get_child(pt::ptree::path_type("layer." + std::to_string(i), '/'));
      LayerSpec layer;
      layer.stage_order =
          parse_enum(section.get<std::string>("stage_order"), kStageOrders, "stage order");
      layer.aggregator = parse_enum(section.get<std::string>("aggregator"), kAggregators,
                                    "aggregator");
      layer.concat_self = section.get<bool>("concat_self");
      layer.activation =
          parse_enum(section.get<std::string>("activation"), kActivations, "activation");
      layer.in_dim = section.get<std::size_t>("in_dim");
      layer.out_dim = section.get<std::size_t>("out_dim");
      layer.pool_dim = section.get<std::size_t>("pool_dim", 0);
      net.layers.push_back(layer);
    }
    initialize_weights(net);
    net.validate();
    return net;
  } catch (const pt::ptree_error& e) {
    throw ConfigError(std::string("network config: ") + e.what());
  }
}

float mean_divisor(MeanDenominator rule, std::size_t deg) {
  if (rule == MeanDenominator::DegreePlusOne) return static_cast<float>(deg + 1);
  return static_cast<float>(std::max<std::size_t>(deg, 1));
}

FeatureMatrix oracle_layer(const Graph& g, const FeatureMatrix& h, const LayerSpec& layer,
                           MeanDenominator rule) {
  layer.validate();
  if (h.cols() != layer.in_dim) {
    throw ShapeError("features have dim " + std::to_string(h.cols()) + ", layer expects " +
                     std::to_string(layer.in_dim));
  }
  if (h.rows() != g.num_nodes()) throw ShapeError("feature rows != node count");
  const std::size_t N = g.num_nodes();

  // Pool extraction: z = relu(h * W_pool).
  FeatureMatrix pooled;
  const FeatureMatrix* source = &h;
  if (layer.stage_order == StageOrder::DenseFirst) {
    const Matrix& wp = *layer.pool_weights;
    pooled = FeatureMatrix(N, layer.pool_dim);
    for (std::size_t u = 0; u < N; ++u) {
      for (std::size_t j = 0; j < layer.pool_dim; ++j) {
        float acc = 0.0f;
        for (std::size_t k = 0; k < layer.in_dim; ++k) acc += h(u, k) * wp(k, j);
        pooled(u, j) = std::max(acc, 0.0f);
      }
    }
    source = &pooled;
  }

  const std::size_t D = layer.aggregate_dim();
  FeatureMatrix agg(N, D);
  std::vector<NodeId> nbrs;
  for (std::size_t u = 0; u < N; ++u) {
    auto in = g.in_neighbors(static_cast<NodeId>(u));
    nbrs.assign(in.begin(), in.end());
    std::sort(nbrs.begin(), nbrs.end());
    auto out = agg.row(u);
    if (layer.aggregator == Aggregator::MeanIncludeSelf) {
      std::fill(out.begin(), out.end(), 0.0f);
      for (NodeId v : nbrs) {
        for (std::size_t d = 0; d < D; ++d) out[d] += (*source)(v, d);
      }
      for (std::size_t d = 0; d < D; ++d) out[d] += (*source)(u, d);
      const float div = mean_divisor(rule, nbrs.size());
      for (std::size_t d = 0; d < D; ++d) out[d] /= div;
    } else {
      std::fill(out.begin(), out.end(), -std::numeric_limits<float>::infinity());
      for (NodeId v : nbrs) {
        for (std::size_t d = 0; d < D; ++d) out[d] = std::max(out[d], (*source)(v, d));
      }
      for (std::size_t d = 0; d < D; ++d) out[d] = std::max(out[d], (*source)(u, d));
    }
  }

  // h' = act([z ; h] * W), k ascending.
  const Matrix& w = layer.weights;
  FeatureMatrix result(N, layer.out_dim);
  for (std::size_t u = 0; u < N; ++u) {
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      float acc = 0.0f;
      for (std::size_t k = 0; k < D; ++k) acc += agg(u, k) * w(k, j);
      if (layer.concat_self) {
        for (std::size_t k = 0; k < layer.in_dim; ++k) acc += h(u, k) * w(D + k, j);
      }
      result(u, j) = activate(layer.activation, acc);
    }
  }
  return result;
}

FeatureMatrix oracle_network(const Graph& g, const FeatureMatrix& h, const NetworkSpec& net) {
  FeatureMatrix current = h;
  for (const LayerSpec& layer : net.layers) {
    current = oracle_layer(g, current, layer, net.mean_denominator);
  }
  return current;
}

}  // namespace gnnerator
