#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "gnnerator/memory.hpp"

namespace gnnerator {

struct Transfer {
  Requestor who = Requestor::Other;
  Stream stream = Stream::Features;
  std::uint64_t bytes = 0;
};

/// One unit of work flowing through fetch -> compute -> writeback.
struct PipelineStep {
  std::uint64_t tag = 0;
  std::vector<Transfer> reads;
  std::vector<Transfer> writes;
  /// Working-set bytes the step occupies in its scratchpad bank.
  std::uint64_t fill_bytes = 0;
};

inline constexpr Cycle kNever = ~Cycle{0};

struct StepTiming {
  Cycle fetch_start = kNever;
  Cycle fetch_done = kNever;
  Cycle compute_start = kNever;
  Cycle compute_done = kNever;
  Cycle retired = kNever;
  Cycle compute_cycles = 0;
};

/// Supplies steps to a StagePipeline and performs their functional work.
class StepSource {
 public:
  enum class Poll { Ready, Blocked, Exhausted };

  virtual ~StepSource() = default;

  /// Offers the next step at cycle `now`, or reports why none is available.
  virtual Poll poll(Cycle now, PipelineStep& out) = 0;
  /// Runs the step's functional work and returns its compute latency.
  virtual Cycle compute(const PipelineStep& step, Cycle now) = 0;
  virtual void on_fetch_start(const PipelineStep&, Cycle) {}
  virtual void on_retire(const PipelineStep&, const StepTiming&) {}
};

struct EngineCounters {
  Cycle busy = 0;
  Cycle stall = 0;
  /// Subset of `stall` spent waiting on the other engine.
  Cycle dependency_stall = 0;
  Cycle idle = 0;
  friend bool operator==(const EngineCounters&, const EngineCounters&) = default;
};

/// Double-buffered three-stage pipeline. At most two steps are in flight:
/// step k may start fetching into a bank only after step k-2 has retired
/// (compute done and writeback drained), so the fetch target is never the
/// bank compute reads from.
class StagePipeline {
 public:
  StagePipeline(DramModel& dram, Scratchpad& scratchpad, StepSource& source);

  /// Moves every stage as far as possible at cycle `now`.
  /// Returns true if anything changed.
  bool advance(Cycle now);

  /// Routes a DRAM completion; ignores ids this pipeline did not issue.
  void on_complete(TxnId id);

  bool computing(Cycle now) const;
  bool done() const { return exhausted_ && slots_.empty(); }
  bool in_flight() const { return !slots_.empty(); }
  std::optional<Cycle> next_compute_end(Cycle now) const;

  /// Attributes `cycles` cycles starting at `now` to busy/stall/idle.
  void account(Cycle now, Cycle cycles);
  const EngineCounters& counters() const { return counters_; }

  /// Cycle at which the most recent compute stage ended.
  Cycle last_compute_end() const { return last_compute_end_; }

 private:
  enum class Phase { Fetching, Fetched, Computing, Writing, Retired };
  struct Slot {
    PipelineStep step;
    StepTiming timing;
    Phase phase = Phase::Fetching;
    std::vector<TxnId> outstanding;
  };

  bool issue(Slot& slot, const std::vector<Transfer>& transfers, bool is_write);

  DramModel& dram_;
  Scratchpad& scratchpad_;
  StepSource& source_;
  std::deque<Slot> slots_;
  bool exhausted_ = false;
  bool blocked_ = false;
  EngineCounters counters_;
  Cycle last_compute_end_ = 0;
};

}  // namespace gnnerator
