#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "gnnerator/matrix.hpp"
#include "gnnerator/memory.hpp"
#include "gnnerator/network.hpp"
#include "gnnerator/pipeline.hpp"

namespace gnnerator {

inline constexpr std::uint64_t kMiB = 1024 * 1024;

struct DenseConfig {
  std::size_t rows = 64;  ///< R, systolic array height (maps K)
  std::size_t cols = 64;  ///< C, systolic array width (maps N)
  /// Identical arrays sharing the work; each takes ceil(M / arrays) rows.
  std::size_t arrays = 1;
  std::uint64_t input_buffer_bytes = 2 * kMiB;
  std::uint64_t weight_buffer_bytes = 2 * kMiB;
  std::uint64_t output_buffer_bytes = 2 * kMiB;
  std::size_t macs_per_pe_per_cycle = 1;
  /// Output-buffer port width used when reloading partial sums.
  std::uint64_t output_port_bytes = 256;

  void validate() const;
};

struct MatmulJob {
  std::size_t M = 1;  ///< node rows
  std::size_t K = 1;  ///< input dim
  std::size_t N = 1;  ///< output dim
  bool accumulate = false;

  void validate() const;
};

/// Weight-stationary timing: per R x C weight tile, R cycles to load the
/// weights plus M + R + C - 2 cycles to stream and drain, over
/// ceil(K/R) * ceil(N/C) tiles. Accumulation adds the partial-sum reload
/// through the output port.
Cycle dense_cycles(const DenseConfig& cfg, const MatmulJob& job);

/// One column vector per cycle through the activation unit; zero for None.
Cycle activation_drain_cycles(const DenseConfig& cfg, const MatmulJob& job, Activation act);

struct DenseResult {
  Matrix output;
  Cycle cycles = 0;
};

/// output = act(inputs * weights + partial), k ascending per output element.
/// `partial` is required iff job.accumulate. Throws ShapeError.
DenseResult dense_execute(const DenseConfig& cfg, const MatmulJob& job, const Matrix& inputs,
                          const Matrix& weights, const Matrix* partial, Activation act);

/// K*N*4 bytes: weights are loaded once per job and reused across its rows.
std::uint64_t dense_weight_traffic(const DenseConfig& cfg, const MatmulJob& job);

/// A piece of a job sized to the double-buffered input/weight/output halves.
struct DenseTile {
  std::size_t row_begin = 0;
  std::size_t rows = 0;
  std::size_t col_begin = 0;
  std::size_t cols = 0;
  bool loads_weights = false;
};

/// Column chunks outer, row chunks inner; weights of a column chunk are
/// loaded by its first row chunk. Throws CapacityError if a single row or
/// column cannot fit.
std::vector<DenseTile> tile_matmul(const DenseConfig& cfg, const MatmulJob& job);

enum class DenseTaskKind { PoolExtract, FeatureExtract };

const char* to_string(DenseTaskKind kind);

/// A matmul the controller wants run on the Dense Engine.
struct DenseTask {
  DenseTaskKind kind = DenseTaskKind::FeatureExtract;
  std::size_t layer = 0;
  std::size_t pass = 0;
  std::uint32_t block = 0;
  MatmulJob job;
  Activation activation = Activation::None;
  Stream output_stream = Stream::Features;
};

struct DenseJobTrace {
  DenseTask task;
  std::size_t tiles = 0;
  Cycle start = kNever;  ///< first tile fetch issued
  Cycle done = kNever;   ///< last tile retired
  Cycle compute_cycles = 0;
  std::uint64_t input_bytes = 0;
  std::uint64_t weight_bytes = 0;
  std::uint64_t partial_bytes = 0;
  std::uint64_t output_bytes = 0;
};

/// Timed Dense Engine. Runs tasks one at a time, always picking the first
/// ready task in the given priority order, and pipelines their tiles.
class DenseEngine final : public StepSource {
 public:
  struct Hooks {
    /// Producer conditions (e.g. column completion) for a task.
    std::function<bool(const DenseTask&)> ready;
    /// Functional work; called once when the task's first tile computes.
    std::function<void(const DenseTask&)> execute;
    std::function<void(const DenseTask&, Cycle)> finished;
  };

  DenseEngine(const DenseConfig& cfg, std::vector<DenseTask> tasks, Hooks hooks);

  Poll poll(Cycle now, PipelineStep& out) override;
  Cycle compute(const PipelineStep& step, Cycle now) override;
  void on_fetch_start(const PipelineStep& step, Cycle now) override;
  void on_retire(const PipelineStep& step, const StepTiming& timing) override;

  bool has_current_task() const { return current_ < tasks_.size(); }
  const std::vector<DenseJobTrace>& traces() const { return traces_; }
  std::size_t remaining_tasks() const;

 private:
  DenseConfig cfg_;
  std::vector<DenseTask> tasks_;
  Hooks hooks_;
  std::vector<bool> started_;
  std::vector<DenseJobTrace> traces_;
  std::vector<std::size_t> tiles_retired_;
  std::vector<std::vector<DenseTile>> tiles_;
  std::size_t current_;
  std::size_t next_tile_ = 0;
  std::size_t started_count_ = 0;
  std::size_t finished_count_ = 0;
};

}  // namespace gnnerator
