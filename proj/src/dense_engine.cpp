#include "gnnerator/dense_engine.hpp"

#include <algorithm>
#include <string>

#include "gnnerator/errors.hpp"

namespace gnnerator {
namespace {

constexpr std::uint64_t kFloat = sizeof(float);

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

constexpr std::uint64_t kTileBits = 32;
constexpr std::uint64_t kTileMask = (std::uint64_t{1} << kTileBits) - 1;

}  // namespace

void DenseConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("dense.rows and dense.cols must be >= 1");
  if (arrays < 1) throw ConfigError("dense.arrays must be >= 1");
  if (input_buffer_bytes == 0 || weight_buffer_bytes == 0 || output_buffer_bytes == 0) {
    throw ConfigError("dense buffer capacities must be > 0");
  }
  if (macs_per_pe_per_cycle < 1) throw ConfigError("dense.macs_per_pe_per_cycle must be >= 1");
  if (output_port_bytes < 1) throw ConfigError("dense.output_port_bytes must be >= 1");
}

void MatmulJob::validate() const {
  if (M < 1 || K < 1 || N < 1) {
    throw ShapeError("matmul dims must be >= 1 (M=" + std::to_string(M) + ", K=" +
                     std::to_string(K) + ", N=" + std::to_string(N) + ")");
  }
}

Cycle dense_cycles(const DenseConfig& cfg, const MatmulJob& job) {
  job.validate();
  const std::uint64_t R = cfg.rows;
  const std::uint64_t C = cfg.cols;
  const std::uint64_t m = ceil_div(ceil_div(job.M, cfg.arrays), cfg.macs_per_pe_per_cycle);
  Cycle cycles = ceil_div(job.K, R) * ceil_div(job.N, C) * (R + m + R + C - 2);
  if (job.accumulate) cycles += ceil_div(job.M * job.N * kFloat, cfg.output_port_bytes);
  return cycles;
}

Cycle activation_drain_cycles(const DenseConfig& cfg, const MatmulJob& job, Activation act) {
  return act == Activation::None ? 0 : ceil_div(job.N, cfg.cols);
}

DenseResult dense_execute(const DenseConfig& cfg, const MatmulJob& job, const Matrix& inputs,
                          const Matrix& weights, const Matrix* partial, Activation act) {
  job.validate();
  auto shape = [](const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
  };
  if (inputs.rows() != job.M || inputs.cols() != job.K) {
    throw ShapeError("inputs are " + shape(inputs) + ", job expects " + std::to_string(job.M) +
                     "x" + std::to_string(job.K));
  }
  if (weights.rows() != job.K || weights.cols() != job.N) {
    throw ShapeError("weights are " + shape(weights) + ", job expects " + std::to_string(job.K) +
                     "x" + std::to_string(job.N));
  }
  if (job.accumulate != (partial != nullptr)) {
    throw ShapeError("partial sums must be supplied exactly when accumulating");
  }
  if (partial && (partial->rows() != job.M || partial->cols() != job.N)) {
    throw ShapeError("partial sums are " + shape(*partial) + ", job expects " +
                     std::to_string(job.M) + "x" + std::to_string(job.N));
  }

  DenseResult result{Matrix(job.M, job.N), 0};
  for (std::size_t i = 0; i < job.M; ++i) {
    for (std::size_t j = 0; j < job.N; ++j) {
      float acc = 0.0f;
      for (std::size_t k = 0; k < job.K; ++k) acc += inputs(i, k) * weights(k, j);
      if (partial) acc += (*partial)(i, j);
      result.output(i, j) = act == Activation::ReLU ? std::max(acc, 0.0f) : acc;
    }
  }
  result.cycles = dense_cycles(cfg, job) + activation_drain_cycles(cfg, job, act);
  return result;
}

std::uint64_t dense_weight_traffic(const DenseConfig&, const MatmulJob& job) {
  job.validate();
  return job.K * job.N * kFloat;
}

std::vector<DenseTile> tile_matmul(const DenseConfig& cfg, const MatmulJob& job) {
  job.validate();
  const std::uint64_t row_bytes = job.K * kFloat;
  const std::uint64_t max_cols = cfg.weight_buffer_bytes / 2 / row_bytes;
  if (max_cols == 0) {
    throw CapacityError("one weight column of K=" + std::to_string(job.K) +
                        " does not fit half the weight buffer");
  }
  const std::size_t cols = std::min<std::uint64_t>(job.N, max_cols);
  const std::uint64_t max_rows = std::min(cfg.input_buffer_bytes / 2 / row_bytes,
                                          cfg.output_buffer_bytes / 2 / (cols * kFloat));
  if (max_rows == 0) {
    throw CapacityError("one input row of K=" + std::to_string(job.K) +
                        " does not fit half the input/output buffers");
  }
  const std::size_t rows = std::min<std::uint64_t>(job.M, max_rows);

  std::vector<DenseTile> tiles;
  for (std::size_t c = 0; c < job.N; c += cols) {
    for (std::size_t r = 0; r < job.M; r += rows) {
      tiles.push_back({r, std::min(rows, job.M - r), c, std::min(cols, job.N - c), r == 0});
    }
  }
  return tiles;
}

const char* to_string(DenseTaskKind kind) {
  return kind == DenseTaskKind::PoolExtract ? "pool" : "extract";
}

DenseEngine::DenseEngine(const DenseConfig& cfg, std::vector<DenseTask> tasks, Hooks hooks)
    : cfg_(cfg), tasks_(std::move(tasks)), hooks_(std::move(hooks)), current_(tasks_.size()) {
  started_.assign(tasks_.size(), false);
  tiles_retired_.assign(tasks_.size(), 0);
  tiles_.resize(tasks_.size());
  traces_.resize(tasks_.size());
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    traces_[i].task = tasks_[i];
    tiles_[i] = tile_matmul(cfg_, tasks_[i].job);
    traces_[i].tiles = tiles_[i].size();
  }
}

std::size_t DenseEngine::remaining_tasks() const { return tasks_.size() - finished_count_; }

StepSource::Poll DenseEngine::poll(Cycle, PipelineStep& out) {
  if (current_ == tasks_.size()) {
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      if (started_[i]) continue;
      if (hooks_.ready && !hooks_.ready(tasks_[i])) continue;
      current_ = i;
      next_tile_ = 0;
      started_[i] = true;
      ++started_count_;
      break;
    }
    if (current_ == tasks_.size()) {
      return started_count_ == tasks_.size() ? Poll::Exhausted : Poll::Blocked;
    }
  }

  const DenseTask& task = tasks_[current_];
  const DenseTile& tile = tiles_[current_][next_tile_];
  const std::uint64_t in_bytes = tile.rows * task.job.K * kFloat;
  const std::uint64_t w_bytes = tile.loads_weights ? task.job.K * tile.cols * kFloat : 0;
  const std::uint64_t out_bytes = tile.rows * tile.cols * kFloat;
  const std::uint64_t partial_bytes = task.job.accumulate ? out_bytes : 0;

  out = PipelineStep{};
  out.tag = (static_cast<std::uint64_t>(current_) << kTileBits) | next_tile_;
  out.reads.push_back({Requestor::DenseInput, Stream::Features, in_bytes});
  out.reads.push_back({Requestor::DenseWeight, Stream::Weights, w_bytes});
  out.reads.push_back({Requestor::DenseOutput, Stream::Partials, partial_bytes});
  out.writes.push_back({Requestor::DenseOutput, task.output_stream, out_bytes});
  out.fill_bytes = in_bytes + task.job.K * tile.cols * kFloat + out_bytes;

  DenseJobTrace& t = traces_[current_];
  t.input_bytes += in_bytes;
  t.weight_bytes += w_bytes;
  t.partial_bytes += partial_bytes;
  t.output_bytes += out_bytes;

  if (++next_tile_ == tiles_[current_].size()) current_ = tasks_.size();
  return Poll::Ready;
}

Cycle DenseEngine::compute(const PipelineStep& step, Cycle) {
  const std::size_t task_index = step.tag >> kTileBits;
  const std::size_t tile_index = step.tag & kTileMask;
  const DenseTask& task = tasks_[task_index];
  const DenseTile& tile = tiles_[task_index][tile_index];
  if (tile_index == 0 && hooks_.execute) hooks_.execute(task);
  const MatmulJob piece{tile.rows, task.job.K, tile.cols, task.job.accumulate};
  const Cycle cycles = dense_cycles(cfg_, piece) + activation_drain_cycles(cfg_, piece, task.activation);
  traces_[task_index].compute_cycles += cycles;
  return cycles;
}

void DenseEngine::on_fetch_start(const PipelineStep& step, Cycle now) {
  DenseJobTrace& t = traces_[step.tag >> kTileBits];
  if ((step.tag & kTileMask) == 0) t.start = now;
}

void DenseEngine::on_retire(const PipelineStep& step, const StepTiming& timing) {
  const std::size_t task_index = step.tag >> kTileBits;
  if (++tiles_retired_[task_index] < tiles_[task_index].size()) return;
  traces_[task_index].done = timing.retired;
  ++finished_count_;
  if (hooks_.finished) hooks_.finished(tasks_[task_index], timing.retired);
}

}  // namespace gnnerator
