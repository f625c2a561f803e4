#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gnnerator/dense_engine.hpp"
#include "gnnerator/graph.hpp"
#include "gnnerator/matrix.hpp"
#include "gnnerator/memory.hpp"
#include "gnnerator/network.hpp"
#include "gnnerator/pipeline.hpp"
#include "gnnerator/shard.hpp"

namespace gnnerator {

struct GraphEngineConfig {
  std::size_t num_gpes = 8;
  std::size_t simd_width = 32;
  std::uint64_t feature_scratch_bytes = 16 * kMiB;
  std::uint64_t edge_scratch_bytes = 8 * kMiB;
  /// Two 32-bit node ids.
  std::uint64_t edge_bytes = 8;
  /// Input feature arrays gathered per source node (I).
  std::size_t input_sets = 1;

  void validate() const;
};

struct DimRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const DimRange&, const DimRange&) = default;
};

/// Contiguous dimension blocks [k*B, (k+1)*B); the last one may be ragged.
std::vector<DimRange> dimension_blocks(std::size_t D, std::size_t B);

/// Everything the Graph Engine needs to process one shard for one block of
/// feature dimensions.
struct ShardJob {
  std::uint32_t src_block = 0;
  std::uint32_t dst_block = 0;
  std::span<const Edge> edges;
  DimRange dims;
  Aggregator aggregator = Aggregator::MeanIncludeSelf;
  /// Diagonal shard: fold every node of `self_nodes` into its own partial.
  bool inject_self = false;
  NodeRange self_nodes;
  /// Source nodes fetched for this shard (zero when already resident).
  std::size_t src_nodes_to_load = 0;
  /// Source nodes resident while this shard computes.
  std::size_t src_resident_nodes = 0;
  /// Destination partials resident while this shard computes (the whole block).
  std::size_t dst_nodes = 0;
  bool needs_partial_reload = false;
  bool writeback = false;
};

struct ShardFetchBytes {
  std::uint64_t edges = 0;
  std::uint64_t features = 0;
  std::uint64_t partials = 0;
  std::uint64_t total() const { return edges + features + partials; }
};

ShardFetchBytes shard_fetch_bytes(const GraphEngineConfig& cfg, const ShardJob& job);

/// Working-set bytes of the shard in one feature-scratchpad bank.
std::uint64_t shard_feature_footprint(const GraphEngineConfig& cfg, const ShardJob& job);

/// Throws CapacityError if the feature or edge working set exceeds half of
/// its scratchpad.
void check_shard_capacity(const GraphEngineConfig& cfg, const ShardJob& job);

/// Issues the edge and feature transfers together at dram.now() and ticks
/// the DRAM model until both land. Returns the elapsed cycles.
Cycle shard_fetch_cycles(const GraphEngineConfig& cfg, const ShardJob& job, DramModel& dram);

std::uint64_t shard_writeback_bytes(const GraphEngineConfig& cfg, const ShardJob& job);
Cycle shard_writeback_cycles(const GraphEngineConfig& cfg, const ShardJob& job, DramModel& dram);

/// Slowest GPE: every edge costs one fetch cycle plus ceil(B / simd) SIMD
/// cycles on GPE (dst mod num_gpes); each injected self term costs
/// ceil(B / simd) on GPE (node mod num_gpes).
Cycle shard_compute_cycles(const GraphEngineConfig& cfg, const ShardJob& job);

/// partials[v][d] = reduce(partials[v][d], features[u][d]) for every edge
/// (u, v) in edge order, d in job.dims, then the self terms. Returns
/// shard_compute_cycles. Throws ProtocolError if dims exceed either matrix.
Cycle shard_compute(const GraphEngineConfig& cfg, const ShardJob& job, const Matrix& features,
                    Matrix& partials);

/// Residency decisions for one cell of a sweep. Source and destination sets
/// stay on chip across consecutive active cells that use the same block.
struct ShardStep {
  ShardCoord coord;
  /// Has edges or sits on the diagonal (self terms).
  bool active = false;
  bool diagonal = false;
  std::size_t src_nodes_to_load = 0;
  std::size_t src_resident_nodes = 0;
  bool loads_sources = false;
  /// First touch of the destination block in this sweep.
  bool init_partials = false;
  bool partial_reload = false;
  bool writeback = false;
  /// Last touch of the destination block: finalize and publish.
  bool final = false;
  /// Step whose destination store must land before this reload, or -1.
  std::ptrdiff_t reload_after = -1;
};

std::vector<ShardStep> plan_shard_sweep(const ShardGrid& grid, std::span<const ShardCoord> order);

/// Shard-granularity feature traffic of one sweep. Source loads count I
/// shard-loads each.
struct SweepCounts {
  std::uint64_t src_set_loads = 0;
  std::uint64_t partial_reloads = 0;
  std::uint64_t partial_stores = 0;
  std::uint64_t reads() const { return src_set_loads + partial_reloads; }
  friend bool operator==(const SweepCounts&, const SweepCounts&) = default;
};

SweepCounts count_sweep(std::span<const ShardStep> plan, std::size_t input_sets);

struct ShardTrace {
  std::size_t layer = 0;
  std::size_t pass = 0;
  std::size_t step = 0;
  ShardCoord coord;
  bool active = false;
  std::size_t edges = 0;
  StepTiming timing;
  std::uint64_t edge_bytes = 0;
  std::uint64_t feature_bytes = 0;
  std::uint64_t partial_read_bytes = 0;
  std::uint64_t write_bytes = 0;
};

/// Timed Graph Engine for one layer: walks the planned sweep once per
/// dimension block and performs aggregation into `partials`.
class GraphEngine final : public StepSource {
 public:
  struct Layer {
    std::size_t index = 0;
    const Graph* graph = nullptr;
    const ShardGrid* grid = nullptr;
    std::vector<ShardStep> plan;
    std::vector<DimRange> passes;
    Aggregator aggregator = Aggregator::MeanIncludeSelf;
    MeanDenominator mean_rule = MeanDenominator::DegreePlusOne;
    /// Features being aggregated (h, or pool output for dense-first layers).
    const Matrix* source = nullptr;
    /// Aggregation buffer, num_nodes x aggregate dim.
    Matrix* partials = nullptr;
  };

  struct Hooks {
    /// Dense-first gating: may shard sources of `src_block` be fetched?
    std::function<bool(std::size_t pass, std::uint32_t src_block)> sources_ready;
    /// A destination block's aggregation for `pass` is final and stored.
    std::function<void(std::size_t pass, std::uint32_t dst_block, Cycle)> column_done;
  };

  GraphEngine(const GraphEngineConfig& cfg, Layer layer, Hooks hooks);

  Poll poll(Cycle now, PipelineStep& out) override;
  Cycle compute(const PipelineStep& step, Cycle now) override;
  void on_fetch_start(const PipelineStep& step, Cycle now) override;
  void on_retire(const PipelineStep& step, const StepTiming& timing) override;

  /// Event counts over all passes so far.
  const SweepCounts& counts() const { return counts_; }
  const std::vector<ShardTrace>& traces() const { return traces_; }

 private:
  ShardJob make_job(std::size_t pass, std::size_t step) const;

  GraphEngineConfig cfg_;
  Layer layer_;
  Hooks hooks_;
  std::vector<std::size_t> active_steps_;
  std::size_t next_ = 0;  ///< index into pass-major (pass, active step) sequence
  std::vector<bool> retired_;
  SweepCounts counts_;
  std::vector<ShardTrace> traces_;
};

}  // namespace gnnerator
