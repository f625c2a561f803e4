#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gnnerator/dense_engine.hpp"
#include "gnnerator/graph.hpp"
#include "gnnerator/graph_engine.hpp"
#include "gnnerator/hardware_config.hpp"
#include "gnnerator/network.hpp"
#include "gnnerator/pipeline.hpp"
#include "gnnerator/shard.hpp"

namespace gnnerator {

enum class DataflowMode { Conventional, Blocked };
enum class OrderChoice { Source, Destination, Auto };

const char* to_string(DataflowMode mode);
const char* to_string(OrderChoice order);

struct DataflowConfig {
  DataflowMode mode = DataflowMode::Blocked;
  /// Feature block width B; ignored for Conventional (B = D). Layers whose
  /// aggregate dim is narrower than B run with B = D.
  std::size_t block_size = 64;
  OrderChoice order = OrderChoice::Auto;
  /// 0 picks the largest n that fits the double-buffered scratchpads.
  std::size_t nodes_per_block = 0;
  SweepPattern pattern = SweepPattern::Serpentine;

  /// Throws ParameterError.
  void validate(const NetworkSpec& net) const;
};

/// Completion flags the controller exchanges between the engines. Each
/// flag holds the cycle at which it was raised, or kNever.
struct ControllerState {
  std::size_t num_blocks = 0;
  std::size_t num_passes = 0;
  /// Dense Engine finished the pool extraction of (pass, block).
  std::vector<Cycle> sources_produced;
  /// Graph Engine finished and stored column (pass, block).
  std::vector<Cycle> column_complete;

  ControllerState(std::size_t blocks, std::size_t passes);
  std::size_t index(std::size_t pass, std::size_t block) const { return pass * num_blocks + block; }
};

enum class StallDecision { Proceed, Stall };

/// Dense-first: the Graph Engine may fetch a shard of `src_block` only once
/// the Dense Engine has produced that block's features for this pass.
StallDecision sync_dense_first(const ControllerState& state, std::size_t pass,
                               std::uint32_t src_block);

/// Graph-first: the Dense Engine may start extracting `dst_block` only once
/// the Graph Engine has completed that column of the shard grid.
StallDecision sync_graph_first(const ControllerState& state, std::size_t pass,
                               std::uint32_t dst_block);

/// Drives the pipelines and the DRAM model cycle by cycle until every
/// pipeline is done and DRAM has drained. Returns the final cycle. Throws
/// DeadlockError if all pipelines are waiting on each other.
Cycle simulate_engines(DramModel& dram, std::span<StagePipeline* const> pipelines);

struct LayerSummary {
  std::size_t index = 0;
  StageOrder stage_order = StageOrder::GraphFirst;
  std::size_t aggregate_dim = 0;
  std::size_t block_size = 0;
  std::size_t passes = 0;
  std::size_t nodes_per_block = 0;
  std::size_t grid_side = 0;
  TraversalOrder order = TraversalOrder::DestinationStationary;
  Cycle start_cycle = 0;
  Cycle cycles = 0;
  SweepCounts counts;
  EngineCounters graph;
  EngineCounters dense;
};

struct SimReport {
  Cycle total_cycles = 0;
  EngineCounters graph;
  EngineCounters dense;

  std::uint64_t dram_bytes_per_cycle = 0;
  Cycle dram_busy_cycles = 0;
  std::uint64_t dram_peak_bytes_per_cycle = 0;
  /// Bytes served by the DRAM model, split by stream.
  StreamBytes dram_bytes;
  /// Bytes the engines asked for; equals dram_bytes once drained.
  StreamBytes requested_bytes;

  SweepCounts counts;
  FeatureMatrix output;
  std::vector<LayerSummary> layers;
  std::vector<ShardTrace> shard_traces;
  std::vector<DenseJobTrace> dense_traces;
};

/// Largest n for which a shard's double-buffered feature working set fits,
/// shrunk further until every shard's edge slice fits half the edge
/// scratchpad. Throws CapacityError when no n works.
std::size_t auto_nodes_per_block(const Graph& g, const GraphEngineConfig& cfg,
                                 std::size_t block_dims);

/// Runs the network layer by layer under the dataflow: for each dimension
/// block, sweep the shard grid on the Graph Engine and extract features per
/// destination block on the Dense Engine, accumulating partial sums across
/// blocks. Layers are separated by a full barrier.
SimReport run(const Graph& g, const FeatureMatrix& h, const NetworkSpec& net,
              const HardwareConfig& hw, const DataflowConfig& df);

}  // namespace gnnerator
