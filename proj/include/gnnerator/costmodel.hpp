#pragma once

#include <cstddef>
#include <cstdint>

#include "gnnerator/shard.hpp"

namespace gnnerator {

// Off-chip cost of sweeping a shard grid, counted in shard-sized transfers.
// Multiply by nodes-per-block * resident dims * 4 to get bytes.

struct CostInputs {
  std::uint64_t S = 1;  ///< shard-grid side
  std::uint64_t I = 1;  ///< input feature sets loaded per source block
  double read_cost_weight = 1.0;
  double write_cost_weight = 1.0;

  /// Throws ParameterError.
  void validate() const;
};

struct CostEstimate {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  double weighted_total = 0.0;
  friend bool operator==(const CostEstimate&, const CostEstimate&) = default;
};

/// Serpentine sweep costs:
///   source-stationary:      reads S*I + (S-1)*S - S + 1, writes S^2 - S + 1
///   destination-stationary: reads (S^2 - S + 1)*I,       writes S
CostEstimate cost(TraversalOrder order, const CostInputs& in);

/// Cheapest order by weighted total; ties go to destination-stationary.
TraversalOrder best_order(const CostInputs& in);

/// On-chip budget that bounds how many nodes a shard may hold.
struct GridSizing {
  std::uint64_t num_nodes = 0;
  /// Bytes one shard step may occupy (one scratchpad bank).
  std::uint64_t resident_bytes = 0;
};

/// Largest n such that I source sets plus one destination set of n nodes
/// at `block_dims` float32 dims fit in `resident_bytes`. Zero if nothing fits.
std::uint64_t nodes_per_block_for(std::uint64_t resident_bytes, std::uint64_t block_dims,
                                  std::uint64_t I);

/// ceil(num_nodes / n) with n from nodes_per_block_for. Throws CapacityError
/// when not even one node fits.
std::uint64_t grid_side_for(const GridSizing& sizing, std::uint64_t block_dims, std::uint64_t I);

/// Dimension-blocked cost: ceil(D/B) passes, each sweeping the grid whose
/// side is derived from the capacity at width B (in.S is ignored).
/// Throws ParameterError unless 1 <= B <= D.
CostEstimate blocked_cost(TraversalOrder order, const CostInputs& in, std::uint64_t D,
                          std::uint64_t B, const GridSizing& sizing);

}  // namespace gnnerator
