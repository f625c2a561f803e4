#include "gnnerator/costmodel.hpp"

#include <algorithm>
#include <string>

#include "gnnerator/errors.hpp"

namespace gnnerator {

void CostInputs::validate() const {
  if (S < 1) throw ParameterError("S must be >= 1");
  if (I < 1) throw ParameterError("I must be >= 1");
  if (!(read_cost_weight > 0.0) || !(write_cost_weight > 0.0)) {
    throw ParameterError("cost weights must be > 0");
  }
}

CostEstimate cost(TraversalOrder order, const CostInputs& in) {
  in.validate();
  const std::uint64_t S = in.S;
  const std::uint64_t I = in.I;
  CostEstimate e;
  if (order == TraversalOrder::SourceStationary) {
    e.reads = S * I + (S - 1) * S - S + 1;
    e.writes = S * S - S + 1;
  } else {
    e.reads = (S * S - S + 1) * I;
    e.writes = S;
  }
  e.weighted_total = static_cast<double>(e.reads) * in.read_cost_weight +
                     static_cast<double>(e.writes) * in.write_cost_weight;
  return e;
}

TraversalOrder best_order(const CostInputs& in) {
  const double src = cost(TraversalOrder::SourceStationary, in).weighted_total;
  const double dst = cost(TraversalOrder::DestinationStationary, in).weighted_total;
  return src < dst ? TraversalOrder::SourceStationary : TraversalOrder::DestinationStationary;
}

std::uint64_t nodes_per_block_for(std::uint64_t resident_bytes, std::uint64_t block_dims,
                                  std::uint64_t I) {
  if (block_dims == 0) throw ParameterError("block dims must be >= 1");
  if (I == 0) throw ParameterError("I must be >= 1");
  return resident_bytes / ((I + 1) * block_dims * sizeof(float));
}

std::uint64_t grid_side_for(const GridSizing& sizing, std::uint64_t block_dims, std::uint64_t I) {
  const std::uint64_t n = nodes_per_block_for(sizing.resident_bytes, block_dims, I);
  if (n == 0) {
    throw CapacityError("not even one node of width " + std::to_string(block_dims) + " fits in " +
                        std::to_string(sizing.resident_bytes) + " bytes");
  }
  return std::max<std::uint64_t>(1, (sizing.num_nodes + n - 1) / n);
}

CostEstimate blocked_cost(TraversalOrder order, const CostInputs& in, std::uint64_t D,
                          std::uint64_t B, const GridSizing& sizing) {
  if (B == 0 || B > D) {
    throw ParameterError("block size " + std::to_string(B) + " must be in [1, " +
                         std::to_string(D) + "]");
  }
  CostInputs per_pass = in;
  per_pass.S = grid_side_for(sizing, B, in.I);
  const CostEstimate one = cost(order, per_pass);
  const std::uint64_t passes = (D + B - 1) / B;
  CostEstimate e;
  e.reads = one.reads * passes;
  e.writes = one.writes * passes;
  e.weighted_total = static_cast<double>(e.reads) * in.read_cost_weight +
                     static_cast<double>(e.writes) * in.write_cost_weight;
  return e;
}

}  // namespace gnnerator
