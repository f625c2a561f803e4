#pragma once

#include <cstdint>

#include "gnnerator/dense_engine.hpp"
#include "gnnerator/graph_engine.hpp"

namespace gnnerator {

struct DramConfig {
  /// 256 GB/s at the assumed 1 GHz clock.
  std::uint64_t bytes_per_cycle = 256;
  Cycle latency_cycles = 100;
  /// Only used to convert cycles to time in reports.
  double clock_ghz = 1.0;

  void validate() const;
};

/// Defaults: one 64x64 array with 2/2/2 MiB buffers (6 MiB dense),
/// 8 GPEs x 32 lanes with 16 MiB feature + 8 MiB edge scratchpads
/// (24 MiB graph), 256 B/cycle DRAM.
struct HardwareConfig {
  DenseConfig dense;
  GraphEngineConfig graph;
  DramConfig dram;

  void validate() const;
};

}  // namespace gnnerator
