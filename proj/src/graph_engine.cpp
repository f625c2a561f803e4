#include "gnnerator/graph_engine.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "gnnerator/errors.hpp"

namespace gnnerator {
namespace {

constexpr std::uint64_t kFloat = sizeof(float);

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

void GraphEngineConfig::validate() const {
  if (num_gpes < 1) throw ConfigError("graph.num_gpes must be >= 1");
  if (simd_width < 1) throw ConfigError("graph.simd_width must be >= 1");
  if (feature_scratch_bytes < 2) throw ConfigError("graph.feature_scratch_bytes must be >= 2");
  if (edge_scratch_bytes < 2) throw ConfigError("graph.edge_scratch_bytes must be >= 2");
  if (edge_bytes < 1) throw ConfigError("graph.edge_bytes must be >= 1");
  if (input_sets < 1) throw ConfigError("graph.input_sets must be >= 1");
}

std::vector<DimRange> dimension_blocks(std::size_t D, std::size_t B) {
  if (B == 0) throw ParameterError("block size must be >= 1");
  std::vector<DimRange> blocks;
  for (std::size_t lo = 0; lo < D; lo += B) blocks.push_back({lo, std::min(D, lo + B)});
  return blocks;
}

ShardFetchBytes shard_fetch_bytes(const GraphEngineConfig& cfg, const ShardJob& job) {
  const std::uint64_t row = job.dims.size() * kFloat;
  ShardFetchBytes b;
  b.edges = job.edges.size() * cfg.edge_bytes;
  b.features = cfg.input_sets * job.src_nodes_to_load * row;
  b.partials = job.needs_partial_reload ? job.dst_nodes * row : 0;
  return b;
}

std::uint64_t shard_feature_footprint(const GraphEngineConfig& cfg, const ShardJob& job) {
  return (cfg.input_sets * job.src_resident_nodes + job.dst_nodes) * job.dims.size() * kFloat;
}

void check_shard_capacity(const GraphEngineConfig& cfg, const ShardJob& job) {
  const std::uint64_t features = shard_feature_footprint(cfg, job);
  if (features > cfg.feature_scratch_bytes / 2) {
    throw CapacityError("shard (" + std::to_string(job.src_block) + ", " +
                        std::to_string(job.dst_block) + ") needs " + std::to_string(features) +
                        " feature bytes, bank holds " +
                        std::to_string(cfg.feature_scratch_bytes / 2) +
                        "; reduce nodes per block or block size");
  }
  const std::uint64_t edges = job.edges.size() * cfg.edge_bytes;
  if (edges > cfg.edge_scratch_bytes / 2) {
    throw CapacityError("shard (" + std::to_string(job.src_block) + ", " +
                        std::to_string(job.dst_block) + ") needs " + std::to_string(edges) +
                        " edge bytes, bank holds " + std::to_string(cfg.edge_scratch_bytes / 2) +
                        "; reduce nodes per block");
  }
}

namespace {

Cycle drain(DramModel& dram, std::vector<TxnId> ids) {
  const Cycle start = dram.now();
  while (!ids.empty()) {
    for (TxnId done : dram.tick()) std::erase(ids, done);
  }
  return dram.now() - start;
}

}  // namespace

Cycle shard_fetch_cycles(const GraphEngineConfig& cfg, const ShardJob& job, DramModel& dram) {
  check_shard_capacity(cfg, job);
  const ShardFetchBytes b = shard_fetch_bytes(cfg, job);
  std::vector<TxnId> ids;
  if (b.edges) ids.push_back(dram.request(Requestor::GraphEdgeFetch, b.edges, false, Stream::Edges));
  if (b.features) {
    ids.push_back(dram.request(Requestor::GraphFeatureFetch, b.features, false, Stream::Features));
  }
  if (b.partials) {
    ids.push_back(dram.request(Requestor::GraphFeatureFetch, b.partials, false, Stream::Partials));
  }
  return drain(dram, std::move(ids));
}

std::uint64_t shard_writeback_bytes(const GraphEngineConfig&, const ShardJob& job) {
  return job.writeback ? job.dst_nodes * job.dims.size() * kFloat : 0;
}

Cycle shard_writeback_cycles(const GraphEngineConfig& cfg, const ShardJob& job, DramModel& dram) {
  const std::uint64_t bytes = shard_writeback_bytes(cfg, job);
  if (bytes == 0) return 0;
  return drain(dram, {dram.request(Requestor::GraphWriteback, bytes, true, Stream::Partials)});
}

Cycle shard_compute_cycles(const GraphEngineConfig& cfg, const ShardJob& job) {
  const Cycle simd = ceil_div(job.dims.size(), cfg.simd_width);
  std::vector<Cycle> load(cfg.num_gpes, 0);
  for (const Edge& e : job.edges) load[e.dst % cfg.num_gpes] += simd + 1;
  if (job.inject_self) {
    for (NodeId u = job.self_nodes.begin; u < job.self_nodes.end; ++u) {
      load[u % cfg.num_gpes] += simd;
    }
  }
  return *std::max_element(load.begin(), load.end());
}

Cycle shard_compute(const GraphEngineConfig& cfg, const ShardJob& job, const Matrix& features,
                    Matrix& partials) {
  if (job.dims.end > features.cols() || job.dims.end > partials.cols()) {
    throw ProtocolError("dims [" + std::to_string(job.dims.begin) + ", " +
                        std::to_string(job.dims.end) + ") outside the resident block");
  }
  const bool is_max = job.aggregator == Aggregator::MaxIncludeSelf;
  auto reduce = [&](NodeId dst, NodeId src) {
    for (std::size_t d = job.dims.begin; d < job.dims.end; ++d) {
      float& acc = partials(dst, d);
      const float x = features(src, d);
      acc = is_max ? std::max(acc, x) : acc + x;
    }
  };
  for (const Edge& e : job.edges) reduce(e.dst, e.src);
  if (job.inject_self) {
    for (NodeId u = job.self_nodes.begin; u < job.self_nodes.end; ++u) reduce(u, u);
  }
  return shard_compute_cycles(cfg, job);
}

std::vector<ShardStep> plan_shard_sweep(const ShardGrid& grid, std::span<const ShardCoord> order) {
  std::vector<ShardStep> plan(order.size());
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < order.size(); ++i) {
    ShardStep& s = plan[i];
    s.coord = order[i];
    s.diagonal = s.coord.src_block == s.coord.dst_block;
    s.active = !s.coord.empty || s.diagonal;
    if (s.active) active.push_back(i);
  }

  // Source runs: one load of the union of needed sources at the run start.
  std::vector<char> needed(grid.num_nodes(), 0);
  for (std::size_t a = 0; a < active.size();) {
    std::size_t b = a;
    const auto block = plan[active[a]].coord.src_block;
    while (b < active.size() && plan[active[b]].coord.src_block == block) ++b;
    std::size_t count = 0;
    std::vector<NodeId> touched;
    auto mark = [&](NodeId u) {
      if (!needed[u]) {
        needed[u] = 1;
        touched.push_back(u);
        ++count;
      }
    };
    for (std::size_t k = a; k < b; ++k) {
      const ShardStep& s = plan[active[k]];
      for (const Edge& e : grid.shard_edges(s.coord.src_block, s.coord.dst_block)) mark(e.src);
      if (s.diagonal) {
        const NodeRange r = grid.block_nodes(block);
        for (NodeId u = r.begin; u < r.end; ++u) mark(u);
      }
    }
    for (NodeId u : touched) needed[u] = 0;
    for (std::size_t k = a; k < b; ++k) plan[active[k]].src_resident_nodes = count;
    plan[active[a]].src_nodes_to_load = count;
    plan[active[a]].loads_sources = count > 0;
    a = b;
  }

  // Destination runs: first touch initializes on chip, later runs reload
  // the stored partials, every run ends by storing the block.
  std::vector<std::ptrdiff_t> last_store(grid.num_blocks(), -1);
  std::vector<std::size_t> last_run_end(grid.num_blocks(), 0);
  for (std::size_t a = 0; a < active.size();) {
    std::size_t b = a;
    const auto block = plan[active[a]].coord.dst_block;
    while (b < active.size() && plan[active[b]].coord.dst_block == block) ++b;
    ShardStep& first = plan[active[a]];
    if (last_store[block] < 0) {
      first.init_partials = true;
    } else {
      first.partial_reload = true;
      first.reload_after = last_store[block];
    }
    const std::size_t end = active[b - 1];
    plan[end].writeback = true;
    last_store[block] = static_cast<std::ptrdiff_t>(end);
    last_run_end[block] = end;
    a = b;
  }
  for (std::size_t blk = 0; blk < grid.num_blocks(); ++blk) {
    if (last_store[blk] >= 0) plan[last_run_end[blk]].final = true;
  }
  return plan;
}

SweepCounts count_sweep(std::span<const ShardStep> plan, std::size_t input_sets) {
  SweepCounts c;
  for (const ShardStep& s : plan) {
    if (s.loads_sources) c.src_set_loads += input_sets;
    if (s.partial_reload) ++c.partial_reloads;
    if (s.writeback) ++c.partial_stores;
  }
  return c;
}

GraphEngine::GraphEngine(const GraphEngineConfig& cfg, Layer layer, Hooks hooks)
    : cfg_(cfg), layer_(std::move(layer)), hooks_(std::move(hooks)) {
  for (std::size_t i = 0; i < layer_.plan.size(); ++i) {
    if (layer_.plan[i].active) active_steps_.push_back(i);
  }
  const std::size_t total = active_steps_.size() * layer_.passes.size();
  retired_.assign(total, false);
  traces_.resize(total);
}

ShardJob GraphEngine::make_job(std::size_t pass, std::size_t step) const {
  const ShardStep& s = layer_.plan[step];
  ShardJob job;
  job.src_block = s.coord.src_block;
  job.dst_block = s.coord.dst_block;
  job.edges = layer_.grid->shard_edges(job.src_block, job.dst_block);
  job.dims = layer_.passes[pass];
  job.aggregator = layer_.aggregator;
  job.inject_self = s.diagonal;
  job.self_nodes = layer_.grid->block_nodes(job.dst_block);
  job.src_nodes_to_load = s.src_nodes_to_load;
  job.src_resident_nodes = s.src_resident_nodes;
  job.dst_nodes = layer_.grid->block_nodes(job.dst_block).size();
  job.needs_partial_reload = s.partial_reload;
  job.writeback = s.writeback;
  return job;
}

StepSource::Poll GraphEngine::poll(Cycle, PipelineStep& out) {
  if (next_ == retired_.size()) return Poll::Exhausted;
  const std::size_t per_pass = active_steps_.size();
  const std::size_t pass = next_ / per_pass;
  const std::size_t k = active_steps_[next_ % per_pass];
  const ShardStep& s = layer_.plan[k];
  if (hooks_.sources_ready && !hooks_.sources_ready(pass, s.coord.src_block)) return Poll::Blocked;
  if (s.partial_reload) {
    // The store being reloaded belongs to the same pass.
    auto pos = std::find(active_steps_.begin(), active_steps_.end(),
                         static_cast<std::size_t>(s.reload_after));
    const std::size_t tag = pass * per_pass + static_cast<std::size_t>(pos - active_steps_.begin());
    if (pos == active_steps_.end() || !retired_[tag]) {
      throw ProtocolError("partial reload of block " + std::to_string(s.coord.dst_block) +
                          " before its store landed");
    }
  }

  const ShardJob job = make_job(pass, k);
  check_shard_capacity(cfg_, job);
  const ShardFetchBytes fetch = shard_fetch_bytes(cfg_, job);
  const std::uint64_t store = shard_writeback_bytes(cfg_, job);

  out = PipelineStep{};
  out.tag = next_;
  out.reads.push_back({Requestor::GraphEdgeFetch, Stream::Edges, fetch.edges});
  out.reads.push_back({Requestor::GraphFeatureFetch, Stream::Features, fetch.features});
  out.reads.push_back({Requestor::GraphFeatureFetch, Stream::Partials, fetch.partials});
  if (store) {
    out.writes.push_back(
        {Requestor::GraphWriteback, s.final ? Stream::Features : Stream::Partials, store});
  }
  out.fill_bytes = shard_feature_footprint(cfg_, job);

  ShardTrace& t = traces_[next_];
  t.layer = layer_.index;
  t.pass = pass;
  t.step = k;
  t.coord = s.coord;
  t.active = true;
  t.edges = job.edges.size();
  t.edge_bytes = fetch.edges;
  t.feature_bytes = fetch.features;
  t.partial_read_bytes = fetch.partials;
  t.write_bytes = store;

  if (s.loads_sources) counts_.src_set_loads += cfg_.input_sets;
  if (s.partial_reload) ++counts_.partial_reloads;
  if (s.writeback) ++counts_.partial_stores;
  ++next_;
  return Poll::Ready;
}

Cycle GraphEngine::compute(const PipelineStep& step, Cycle) {
  const std::size_t per_pass = active_steps_.size();
  const std::size_t pass = step.tag / per_pass;
  const std::size_t k = active_steps_[step.tag % per_pass];
  const ShardStep& s = layer_.plan[k];
  const ShardJob job = make_job(pass, k);
  Matrix& partials = *layer_.partials;

  if (s.init_partials) {
    const float init = layer_.aggregator == Aggregator::MaxIncludeSelf
                           ? -std::numeric_limits<float>::infinity()
                           : 0.0f;
    for (NodeId v = job.self_nodes.begin; v < job.self_nodes.end; ++v) {
      for (std::size_t d = job.dims.begin; d < job.dims.end; ++d) partials(v, d) = init;
    }
  }
  const Cycle cycles = shard_compute(cfg_, job, *layer_.source, partials);
  if (s.final && layer_.aggregator == Aggregator::MeanIncludeSelf) {
    for (NodeId v = job.self_nodes.begin; v < job.self_nodes.end; ++v) {
      const float div = mean_divisor(layer_.mean_rule, layer_.graph->in_degree(v));
      for (std::size_t d = job.dims.begin; d < job.dims.end; ++d) partials(v, d) /= div;
    }
  }
  return cycles;
}

void GraphEngine::on_fetch_start(const PipelineStep&, Cycle) {}

void GraphEngine::on_retire(const PipelineStep& step, const StepTiming& timing) {
  retired_[step.tag] = true;
  traces_[step.tag].timing = timing;
  const std::size_t per_pass = active_steps_.size();
  const std::size_t pass = step.tag / per_pass;
  const ShardStep& s = layer_.plan[active_steps_[step.tag % per_pass]];
  if (s.final && hooks_.column_done) hooks_.column_done(pass, s.coord.dst_block, timing.retired);
}

}  // namespace gnnerator
