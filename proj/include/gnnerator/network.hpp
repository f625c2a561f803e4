#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gnnerator/graph.hpp"
#include "gnnerator/matrix.hpp"

namespace gnnerator {

/// GraphFirst: aggregate, then extract (GCN, Graphsage).
/// DenseFirst: pool-extract, aggregate, then extract (GraphsagePool).
enum class StageOrder { GraphFirst, DenseFirst };
enum class Aggregator { MeanIncludeSelf, MaxIncludeSelf };
enum class Activation { None, ReLU };

/// Mean divides by |N(u) ∪ {u}| by default. `InDegree` divides by |N(u)|
/// (clamped to 1 for isolated nodes).
enum class MeanDenominator { DegreePlusOne, InDegree };

enum class BuiltinNetwork { GCN, Graphsage, GraphsagePool };

struct LayerSpec {
  StageOrder stage_order = StageOrder::GraphFirst;
  Aggregator aggregator = Aggregator::MeanIncludeSelf;
  bool concat_self = false;
  Activation activation = Activation::None;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  /// Width of the pool extraction; nonzero only for DenseFirst layers.
  std::size_t pool_dim = 0;

  /// (concat_self ? 2 : 1) * aggregate_dim() rows, out_dim columns.
  Matrix weights;
  /// in_dim x pool_dim, present iff stage_order == DenseFirst.
  std::optional<Matrix> pool_weights;

  /// Width of the features that the aggregation stage reduces.
  std::size_t aggregate_dim() const {
    return stage_order == StageOrder::DenseFirst ? pool_dim : in_dim;
  }

  /// Throws ShapeError on inconsistent shapes.
  void validate() const;
};

struct NetworkSpec {
  std::string name;
  std::uint64_t seed = 0;
  MeanDenominator mean_denominator = MeanDenominator::DegreePlusOne;
  std::vector<LayerSpec> layers;

  void validate() const;
};

/// Two layers (one hidden layer of `hidden_dim`), ReLU on the hidden layer,
/// weights uniform in [-0.1, 0.1] from `seed`.
NetworkSpec make_builtin(BuiltinNetwork kind, std::size_t in_dim, std::size_t hidden_dim,
                         std::size_t out_dim, std::uint64_t seed);

BuiltinNetwork parse_builtin(const std::string& name);
const char* to_string(BuiltinNetwork kind);
const char* to_string(StageOrder order);
const char* to_string(Aggregator agg);
const char* to_string(Activation act);

/// Regenerates every layer's weights from net.seed in layer order (pool
/// weights before main weights). Shapes come from the layer dims.
void initialize_weights(NetworkSpec& net);

/// Structured key-value text: [network] name/seed/layers plus one
/// [layer.K] section per layer. Weights are not stored; they are
/// regenerated from the seed on load.
std::string network_to_text(const NetworkSpec& net);
NetworkSpec network_from_text(const std::string& text);

/// Denominator used to finalize a mean aggregation for a node of in-degree `deg`.
float mean_divisor(MeanDenominator rule, std::size_t deg);

/// Reference implementation of one layer. Neighbors are reduced in ascending
/// node-id order with the self term last.
FeatureMatrix oracle_layer(const Graph& g, const FeatureMatrix& h, const LayerSpec& layer,
                           MeanDenominator rule = MeanDenominator::DegreePlusOne);

FeatureMatrix oracle_network(const Graph& g, const FeatureMatrix& h, const NetworkSpec& net);

}  // namespace gnnerator
