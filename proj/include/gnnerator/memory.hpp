#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

namespace gnnerator {

using TxnId = std::uint64_t;
using Cycle = std::uint64_t;

enum class Requestor : std::uint8_t {
  GraphEdgeFetch = 0,
  GraphFeatureFetch,
  GraphWriteback,
  DenseInput,
  DenseWeight,
  DenseOutput,
  Other,
};
inline constexpr std::size_t kNumRequestors = 7;

/// Traffic classes reported separately in SimReport.
enum class Stream : std::uint8_t { Edges = 0, Features, Weights, Partials };
inline constexpr std::size_t kNumStreams = 4;

const char* to_string(Requestor r);
const char* to_string(Stream s);

struct StreamBytes {
  std::array<std::uint64_t, kNumStreams> read{};
  std::array<std::uint64_t, kNumStreams> write{};

  std::uint64_t total_read() const;
  std::uint64_t total_write() const;
  friend bool operator==(const StreamBytes&, const StreamBytes&) = default;
};

/// Flat-bandwidth shared DRAM. Requests are served strictly FIFO by arrival;
/// requests arriving in the same cycle are ordered by requestor id. Each
/// transaction completes `latency` cycles after its last byte is served.
class DramModel {
 public:
  DramModel(std::uint64_t bytes_per_cycle, Cycle latency = 0);

  /// Enqueues at the current cycle. Throws ParameterError on zero bytes.
  TxnId request(Requestor who, std::uint64_t bytes, bool is_write,
                Stream stream = Stream::Features);

  /// Serves up to bytes_per_cycle from the queue head(s), advances now() by
  /// one and returns transactions whose completion cycle is the new now().
  std::vector<TxnId> tick();

  /// Skips `cycles` cycles; only legal while nothing is queued or pending.
  void skip_idle(Cycle cycles);

  Cycle now() const { return now_; }
  bool idle() const { return arrivals_.empty() && queue_.empty() && completing_.empty(); }
  std::size_t outstanding() const { return arrivals_.size() + queue_.size() + completing_.size(); }

  std::uint64_t bytes_per_cycle() const { return bandwidth_; }
  Cycle latency() const { return latency_; }

  std::uint64_t read_bytes() const { return served_.total_read(); }
  std::uint64_t write_bytes() const { return served_.total_write(); }
  const StreamBytes& served() const { return served_; }
  /// Bytes handed to request(), whether served yet or not.
  const StreamBytes& issued() const { return issued_; }

  Cycle busy_cycles() const { return busy_cycles_; }
  std::uint64_t peak_bytes_per_cycle() const { return peak_served_; }
  /// Cycles during which the requestor had unserved bytes queued and got none.
  Cycle stall_cycles(Requestor who) const { return stalls_[static_cast<std::size_t>(who)]; }

 private:
  struct Pending {
    TxnId id;
    Requestor who;
    std::uint64_t remaining;
    bool is_write;
    Stream stream;
  };
  struct Completing {
    TxnId id;
    Cycle ready;
  };

  std::uint64_t bandwidth_;
  Cycle latency_;
  Cycle now_ = 0;
  TxnId next_id_ = 0;
  std::vector<Pending> arrivals_;
  std::deque<Pending> queue_;
  std::deque<Completing> completing_;
  StreamBytes served_;
  StreamBytes issued_;
  Cycle busy_cycles_ = 0;
  std::uint64_t peak_served_ = 0;
  std::array<Cycle, kNumRequestors> stalls_{};
};

/// Double-buffered on-chip buffer. Fetch fills the shadow bank while
/// compute reads the active bank; swap_banks hands the filled shadow over.
class Scratchpad {
 public:
  explicit Scratchpad(std::uint64_t capacity_bytes);

  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t bank_capacity() const { return capacity_ / 2; }

  /// Starts filling the shadow bank with `bytes`. Throws CapacityError when
  /// bytes exceed half the capacity, ProtocolError if a fill is in progress.
  void begin_fill(std::uint64_t bytes);
  void complete_fill();

  /// Throws ProtocolError unless the shadow fill is complete.
  void swap_banks();

  bool filling() const { return state_ == ShadowState::Filling; }
  bool shadow_ready() const { return state_ == ShadowState::Filled; }
  std::size_t active_bank() const { return active_; }
  std::size_t shadow_bank() const { return 1 - active_; }
  std::uint64_t occupancy(std::size_t bank) const { return occupancy_[bank]; }

 private:
  enum class ShadowState { Empty, Filling, Filled };

  std::uint64_t capacity_;
  std::size_t active_ = 0;
  std::array<std::uint64_t, 2> occupancy_{};
  ShadowState state_ = ShadowState::Empty;
};

}  // namespace gnnerator
