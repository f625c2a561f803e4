#include "gnnerator/memory.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gnnerator/errors.hpp"

namespace gnnerator {

const char* to_string(Requestor r) {
  switch (r) {
    case Requestor::GraphEdgeFetch: return "graph_edge_fetch";
    case Requestor::GraphFeatureFetch: return "graph_feature_fetch";
    case Requestor::GraphWriteback: return "graph_writeback";
    case Requestor::DenseInput: return "dense_input";
    case Requestor::DenseWeight: return "dense_weight";
    case Requestor::DenseOutput: return "dense_output";
    case Requestor::Other: return "other";
  }
  return "?";
}

const char* to_string(Stream s) {
  switch (s) {
    case Stream::Edges: return "edges";
    case Stream::Features: return "features";
    case Stream::Weights: return "weights";
    case Stream::Partials: return "partials";
  }
  return "?";
}

std::uint64_t StreamBytes::total_read() const {
  return std::accumulate(read.begin(), read.end(), std::uint64_t{0});
}

std::uint64_t StreamBytes::total_write() const {
  return std::accumulate(write.begin(), write.end(), std::uint64_t{0});
}

DramModel::DramModel(std::uint64_t bytes_per_cycle, Cycle latency)
    : bandwidth_(bytes_per_cycle), latency_(latency) {
  if (bandwidth_ == 0) throw ParameterError("DRAM bandwidth must be >= 1 byte per cycle");
}

TxnId DramModel::request(Requestor who, std::uint64_t bytes, bool is_write, Stream stream) {
  if (bytes == 0) throw ParameterError("zero-byte DRAM request");
  const TxnId id = next_id_++;
  arrivals_.push_back(Pending{id, who, bytes, is_write, stream});
  auto& bucket = is_write ? issued_.write : issued_.read;
  bucket[static_cast<std::size_t>(stream)] += bytes;
  return id;
}

std::vector<TxnId> DramModel::tick() {
  if (!arrivals_.empty()) {
    std::stable_sort(arrivals_.begin(), arrivals_.end(),
                     [](const Pending& a, const Pending& b) { return a.who < b.who; });
    queue_.insert(queue_.end(), arrivals_.begin(), arrivals_.end());
    arrivals_.clear();
  }

  std::array<bool, kNumRequestors> waiting{};
  std::array<bool, kNumRequestors> got{};
  for (const Pending& p : queue_) waiting[static_cast<std::size_t>(p.who)] = true;

  std::uint64_t budget = bandwidth_;
  std::uint64_t served = 0;
  const Cycle end_of_cycle = now_ + 1;
  while (budget > 0 && !queue_.empty()) {
    Pending& head = queue_.front();
    const std::uint64_t take = std::min(budget, head.remaining);
    head.remaining -= take;
    budget -= take;
    served += take;
    got[static_cast<std::size_t>(head.who)] = true;
    auto& bucket = head.is_write ? served_.write : served_.read;
    bucket[static_cast<std::size_t>(head.stream)] += take;
    if (head.remaining == 0) {
      completing_.push_back(Completing{head.id, end_of_cycle + latency_});
      queue_.pop_front();
    }
  }
  if (served > bandwidth_) throw ProtocolError("DRAM served more than its bandwidth");
  if (served > 0) ++busy_cycles_;
  peak_served_ = std::max(peak_served_, served);
  for (std::size_t r = 0; r < kNumRequestors; ++r) {
    if (waiting[r] && !got[r]) ++stalls_[r];
  }

  now_ = end_of_cycle;
  std::vector<TxnId> done;
  // Completion times are nondecreasing in FIFO order, so the front is next.
  while (!completing_.empty() && completing_.front().ready <= now_) {
    done.push_back(completing_.front().id);
    completing_.pop_front();
  }
  return done;
}

void DramModel::skip_idle(Cycle cycles) {
  if (!idle()) throw ProtocolError("skip_idle with DRAM traffic outstanding");
  now_ += cycles;
}

Scratchpad::Scratchpad(std::uint64_t capacity_bytes) : capacity_(capacity_bytes) {
  if (capacity_ < 2) throw ParameterError("scratchpad capacity must be >= 2 bytes");
}

void Scratchpad::begin_fill(std::uint64_t bytes) {
  if (bytes > bank_capacity()) {
    throw CapacityError("fill of " + std::to_string(bytes) + " bytes exceeds bank capacity " +
                        std::to_string(bank_capacity()));
  }
  if (state_ != ShadowState::Empty) {
    throw ProtocolError("shadow bank is already filling or holds an unconsumed fill");
  }
  occupancy_[shadow_bank()] = bytes;
  state_ = ShadowState::Filling;
}

void Scratchpad::complete_fill() {
  if (state_ != ShadowState::Filling) throw ProtocolError("complete_fill without a fill");
  state_ = ShadowState::Filled;
}

void Scratchpad::swap_banks() {
  if (state_ != ShadowState::Filled) throw ProtocolError("swap before shadow fill completed");
  active_ = shadow_bank();
  occupancy_[shadow_bank()] = 0;
  state_ = ShadowState::Empty;
}

}  // namespace gnnerator
