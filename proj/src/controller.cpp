#include "gnnerator/controller.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "gnnerator/costmodel.hpp"
#include "gnnerator/errors.hpp"

namespace gnnerator {

const char* to_string(DataflowMode mode) {
  return mode == DataflowMode::Conventional ? "conventional" : "blocked";
}

const char* to_string(OrderChoice order) {
  switch (order) {
    case OrderChoice::Source: return "src";
    case OrderChoice::Destination: return "dst";
    case OrderChoice::Auto: return "auto";
  }
  return "?";
}

void DataflowConfig::validate(const NetworkSpec& net) const {
  if (mode == DataflowMode::Conventional) return;
  if (block_size < 1) throw ParameterError("block size must be >= 1");
  std::size_t widest = 0;
  for (const LayerSpec& layer : net.layers) widest = std::max(widest, layer.aggregate_dim());
  if (!net.layers.empty() && block_size > widest) {
    throw ParameterError("block size " + std::to_string(block_size) +
                         " exceeds the widest aggregated dim " + std::to_string(widest));
  }
}

ControllerState::ControllerState(std::size_t blocks, std::size_t passes)
    : num_blocks(blocks),
      num_passes(passes),
      sources_produced(blocks * passes, kNever),
      column_complete(blocks * passes, kNever) {}

namespace {

void check_flag_index(const ControllerState& state, std::size_t pass, std::uint32_t block) {
  if (pass >= state.num_passes || block >= state.num_blocks) {
    throw RangeError("flag (" + std::to_string(pass) + ", " + std::to_string(block) +
                     ") out of range");
  }
}

}  // namespace

StallDecision sync_dense_first(const ControllerState& state, std::size_t pass,
                               std::uint32_t src_block) {
  check_flag_index(state, pass, src_block);
  return state.sources_produced[state.index(pass, src_block)] == kNever ? StallDecision::Stall
                                                                        : StallDecision::Proceed;
}

StallDecision sync_graph_first(const ControllerState& state, std::size_t pass,
                               std::uint32_t dst_block) {
  check_flag_index(state, pass, dst_block);
  return state.column_complete[state.index(pass, dst_block)] == kNever ? StallDecision::Stall
                                                                       : StallDecision::Proceed;
}

Cycle simulate_engines(DramModel& dram, std::span<StagePipeline* const> pipelines) {
  for (;;) {
    const Cycle now = dram.now();
    for (bool changed = true; changed;) {
      changed = false;
      for (StagePipeline* p : pipelines) changed |= p->advance(now);
    }
    const bool all_done =
        std::all_of(pipelines.begin(), pipelines.end(), [](auto* p) { return p->done(); });
    if (all_done && dram.idle()) return now;

    if (dram.idle()) {
      std::optional<Cycle> next;
      for (StagePipeline* p : pipelines) {
        if (auto end = p->next_compute_end(now)) next = next ? std::min(*next, *end) : *end;
      }
      if (!next) {
        std::ostringstream msg;
        msg << "deadlock at cycle " << now << ": no transfers or compute pending;";
        for (std::size_t i = 0; i < pipelines.size(); ++i) {
          msg << " engine " << i << (pipelines[i]->done() ? " done" : " waiting")
              << (pipelines[i]->in_flight() ? " (steps in flight)" : "");
        }
        throw DeadlockError(msg.str());
      }
      for (StagePipeline* p : pipelines) p->account(now, *next - now);
      dram.skip_idle(*next - now);
      continue;
    }

    for (StagePipeline* p : pipelines) p->account(now, 1);
    for (TxnId id : dram.tick()) {
      for (StagePipeline* p : pipelines) p->on_complete(id);
    }
  }
}

std::size_t auto_nodes_per_block(const Graph& g, const GraphEngineConfig& cfg,
                                 std::size_t block_dims) {
  cfg.validate();
  std::size_t n = nodes_per_block_for(cfg.feature_scratch_bytes / 2, block_dims, cfg.input_sets);
  if (n == 0) {
    throw CapacityError("a single node of width " + std::to_string(block_dims) +
                        " does not fit the feature scratchpad bank");
  }
  n = std::min<std::size_t>(n, std::max<std::size_t>(g.num_nodes(), 1));
  const std::uint64_t edge_limit = cfg.edge_scratch_bytes / 2 / cfg.edge_bytes;
  for (;;) {
    const ShardGrid grid(g, n);
    if (grid.max_shard_size() <= edge_limit) return n;
    if (n == 1) {
      throw CapacityError("edge scratchpad bank cannot hold a single-node shard");
    }
    n -= std::max<std::size_t>(1, n / 16);
  }
}

namespace {

Matrix columns(const Matrix& m, NodeRange rows, DimRange cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows.begin + r, cols.begin + c);
  }
  return out;
}

void add(EngineCounters& into, const EngineCounters& c) {
  into.busy += c.busy;
  into.stall += c.stall;
  into.dependency_stall += c.dependency_stall;
  into.idle += c.idle;
}

void add(SweepCounts& into, const SweepCounts& c) {
  into.src_set_loads += c.src_set_loads;
  into.partial_reloads += c.partial_reloads;
  into.partial_stores += c.partial_stores;
}

struct LayerRun {
  const Graph& g;
  const LayerSpec& layer;
  MeanDenominator mean_rule;
  const HardwareConfig& hw;
  const DataflowConfig& df;
  DramModel& dram;
  SimReport& report;
  std::size_t index;

  Matrix simulate(const Matrix& h) {
    const std::size_t N = g.num_nodes();
    const std::size_t D = layer.aggregate_dim();
    const std::size_t B = df.mode == DataflowMode::Conventional ? D : std::min(df.block_size, D);
    const std::vector<DimRange> passes = dimension_blocks(D, B);
    const std::size_t P = passes.size();

    const std::size_t n =
        df.nodes_per_block ? df.nodes_per_block : auto_nodes_per_block(g, hw.graph, B);
    const ShardGrid grid(g, n);
    const std::size_t S = grid.num_blocks();
    TraversalOrder order = TraversalOrder::DestinationStationary;
    if (df.order == OrderChoice::Source) order = TraversalOrder::SourceStationary;
    if (df.order == OrderChoice::Auto) order = best_order(CostInputs{S, hw.graph.input_sets, 1, 1});
    const auto sweep = traversal(grid, order, df.pattern);

    GraphEngine::Layer gl;
    gl.index = index;
    gl.graph = &g;
    gl.grid = &grid;
    gl.plan = plan_shard_sweep(grid, sweep);
    gl.passes = passes;
    gl.aggregator = layer.aggregator;
    gl.mean_rule = mean_rule;

    Matrix pooled;
    if (layer.stage_order == StageOrder::DenseFirst) pooled = Matrix(N, D);
    Matrix partials(N, D);
    Matrix out(N, layer.out_dim);
    gl.source = layer.stage_order == StageOrder::DenseFirst ? &pooled : &h;
    gl.partials = &partials;

    // Reject infeasible shards before any cycle is simulated.
    for (const ShardStep& s : gl.plan) {
      if (!s.active) continue;
      ShardJob job;
      job.src_block = s.coord.src_block;
      job.dst_block = s.coord.dst_block;
      job.edges = grid.shard_edges(s.coord.src_block, s.coord.dst_block);
      job.dims = passes.front();
      job.src_resident_nodes = s.src_resident_nodes;
      job.dst_nodes = grid.block_nodes(s.coord.dst_block).size();
      check_shard_capacity(hw.graph, job);
    }

    ControllerState state(S, P);
    std::vector<bool> final_done(S * P, false);
    const std::size_t concat = layer.concat_self ? 2 : 1;

    std::vector<DenseTask> tasks;
    for (std::size_t p = 0; p < P; ++p) {
      if (layer.stage_order == StageOrder::DenseFirst) {
        for (std::uint32_t s = 0; s < S; ++s) {
          DenseTask t;
          t.kind = DenseTaskKind::PoolExtract;
          t.layer = index;
          t.pass = p;
          t.block = s;
          t.job = MatmulJob{grid.block_nodes(s).size(), layer.in_dim, passes[p].size(), false};
          t.activation = Activation::ReLU;
          t.output_stream = Stream::Features;
          tasks.push_back(t);
        }
      }
      for (std::uint32_t d = 0; d < S; ++d) {
        DenseTask t;
        t.kind = DenseTaskKind::FeatureExtract;
        t.layer = index;
        t.pass = p;
        t.block = d;
        t.job = MatmulJob{grid.block_nodes(d).size(), passes[p].size() * concat, layer.out_dim,
                          p > 0};
        t.activation = p + 1 == P ? layer.activation : Activation::None;
        t.output_stream = p + 1 == P ? Stream::Features : Stream::Partials;
        tasks.push_back(t);
      }
    }

    DenseEngine::Hooks dense_hooks;
    dense_hooks.ready = [&](const DenseTask& t) {
      if (t.kind == DenseTaskKind::PoolExtract) return true;
      if (sync_graph_first(state, t.pass, t.block) == StallDecision::Stall) return false;
      return t.pass == 0 || final_done[state.index(t.pass - 1, t.block)];
    };
    dense_hooks.execute = [&](const DenseTask& t) {
      const NodeRange rows = grid.block_nodes(t.block);
      const DimRange dims = passes[t.pass];
      if (t.kind == DenseTaskKind::PoolExtract) {
        const Matrix in = columns(h, rows, {0, layer.in_dim});
        const Matrix w = columns(*layer.pool_weights, {0, static_cast<NodeId>(layer.in_dim)}, dims);
        const DenseResult r = dense_execute(hw.dense, t.job, in, w, nullptr, t.activation);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          for (std::size_t c = 0; c < dims.size(); ++c) pooled(rows.begin + i, dims.begin + c) = r.output(i, c);
        }
        return;
      }
      Matrix in(rows.size(), t.job.K);
      Matrix w(t.job.K, layer.out_dim);
      for (std::size_t c = 0; c < dims.size(); ++c) {
        for (std::size_t i = 0; i < rows.size(); ++i) in(i, c) = partials(rows.begin + i, dims.begin + c);
        for (std::size_t j = 0; j < layer.out_dim; ++j) w(c, j) = layer.weights(dims.begin + c, j);
      }
      if (layer.concat_self) {
        const std::size_t off = dims.size();
        for (std::size_t c = 0; c < dims.size(); ++c) {
          for (std::size_t i = 0; i < rows.size(); ++i) in(i, off + c) = h(rows.begin + i, dims.begin + c);
          for (std::size_t j = 0; j < layer.out_dim; ++j) {
            w(off + c, j) = layer.weights(D + dims.begin + c, j);
          }
        }
      }
      Matrix prior;
      if (t.job.accumulate) prior = columns(out, rows, {0, layer.out_dim});
      const DenseResult r =
          dense_execute(hw.dense, t.job, in, w, t.job.accumulate ? &prior : nullptr, t.activation);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < layer.out_dim; ++j) out(rows.begin + i, j) = r.output(i, j);
      }
    };
    dense_hooks.finished = [&](const DenseTask& t, Cycle at) {
      if (t.kind == DenseTaskKind::PoolExtract) {
        state.sources_produced[state.index(t.pass, t.block)] = at;
      } else {
        final_done[state.index(t.pass, t.block)] = true;
      }
    };

    GraphEngine::Hooks graph_hooks;
    if (layer.stage_order == StageOrder::DenseFirst) {
      graph_hooks.sources_ready = [&](std::size_t pass, std::uint32_t block) {
        return sync_dense_first(state, pass, block) == StallDecision::Proceed;
      };
    }
    graph_hooks.column_done = [&](std::size_t pass, std::uint32_t block, Cycle at) {
      state.column_complete[state.index(pass, block)] = at;
    };

    GraphEngine graph_engine(hw.graph, gl, graph_hooks);
    DenseEngine dense_engine(hw.dense, tasks, dense_hooks);
    Scratchpad feature_scratch(hw.graph.feature_scratch_bytes);
    Scratchpad dense_buffers(hw.dense.input_buffer_bytes + hw.dense.weight_buffer_bytes +
                             hw.dense.output_buffer_bytes);
    StagePipeline graph_pipe(dram, feature_scratch, graph_engine);
    StagePipeline dense_pipe(dram, dense_buffers, dense_engine);

    const Cycle start = dram.now();
    StagePipeline* pipes[] = {&graph_pipe, &dense_pipe};
    const Cycle end = simulate_engines(dram, pipes);

    LayerSummary summary;
    summary.index = index;
    summary.stage_order = layer.stage_order;
    summary.aggregate_dim = D;
    summary.block_size = B;
    summary.passes = P;
    summary.nodes_per_block = n;
    summary.grid_side = S;
    summary.order = order;
    summary.start_cycle = start;
    summary.cycles = end - start;
    summary.counts = graph_engine.counts();
    summary.graph = graph_pipe.counters();
    summary.dense = dense_pipe.counters();
    report.layers.push_back(summary);
    add(report.graph, summary.graph);
    add(report.dense, summary.dense);
    add(report.counts, summary.counts);
    report.shard_traces.insert(report.shard_traces.end(), graph_engine.traces().begin(),
                               graph_engine.traces().end());
    report.dense_traces.insert(report.dense_traces.end(), dense_engine.traces().begin(),
                               dense_engine.traces().end());
    return out;
  }
};

}  // namespace

SimReport run(const Graph& g, const FeatureMatrix& h, const NetworkSpec& net,
              const HardwareConfig& hw, const DataflowConfig& df) {
  hw.validate();
  net.validate();
  df.validate(net);
  if (h.rows() != g.num_nodes()) {
    throw ShapeError("feature rows " + std::to_string(h.rows()) + " != node count " +
                     std::to_string(g.num_nodes()));
  }
  if (!net.layers.empty() && h.cols() != net.layers.front().in_dim) {
    throw ShapeError("feature dim " + std::to_string(h.cols()) + " != network input dim " +
                     std::to_string(net.layers.front().in_dim));
  }

  SimReport report;
  report.dram_bytes_per_cycle = hw.dram.bytes_per_cycle;
  DramModel dram(hw.dram.bytes_per_cycle, hw.dram.latency_cycles);
  Matrix current = h;
  if (g.num_nodes() > 0) {
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      LayerRun layer{g, net.layers[l], net.mean_denominator, hw, df, dram, report, l};
      current = layer.simulate(current);
    }
  } else if (!net.layers.empty()) {
    current = Matrix(0, net.layers.back().out_dim);
  }
  report.output = std::move(current);
  report.total_cycles = dram.now();
  report.dram_busy_cycles = dram.busy_cycles();
  report.dram_peak_bytes_per_cycle = dram.peak_bytes_per_cycle();
  report.dram_bytes = dram.served();
  report.requested_bytes = dram.issued();
  return report;
}

}  // namespace gnnerator
