#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gnnerator/graph.hpp"

namespace gnnerator {

enum class TraversalOrder { SourceStationary, DestinationStationary };

/// Ascending: every row/column is swept low-to-high.
/// Serpentine: alternate rows/columns reverse direction so the streaming
/// block at the end of one sweep is also the first block of the next.
enum class SweepPattern { Ascending, Serpentine };

struct NodeRange {
  NodeId begin = 0;
  NodeId end = 0;
  std::size_t size() const { return end - begin; }
  bool contains(NodeId v) const { return v >= begin && v < end; }
};

struct ShardCoord {
  std::uint32_t src_block = 0;
  std::uint32_t dst_block = 0;
  bool empty = true;
  friend bool operator==(const ShardCoord&, const ShardCoord&) = default;
};

/// 2D partition of a graph's edges. Block b holds nodes [b*n, (b+1)*n);
/// shard (s, d) holds every edge whose source is in block s and destination
/// in block d, in original relative order.
class ShardGrid {
 public:
  ShardGrid() = default;
  ShardGrid(const Graph& g, std::size_t nodes_per_block);

  std::size_t nodes_per_block() const { return n_; }
  std::size_t num_blocks() const { return num_blocks_; }
  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }

  NodeRange block_nodes(std::size_t block) const;
  std::uint32_t block_of(NodeId v) const { return static_cast<std::uint32_t>(v / n_); }

  std::span<const Edge> shard_edges(std::size_t src_block, std::size_t dst_block) const;
  /// Original edge-list indices, parallel to shard_edges().
  std::span<const std::uint32_t> shard_edge_ids(std::size_t src_block,
                                                std::size_t dst_block) const;
  std::size_t shard_size(std::size_t src_block, std::size_t dst_block) const;
  std::size_t max_shard_size() const;

  /// All edge ids in cell order (row-major over (src_block, dst_block)).
  std::span<const std::uint32_t> all_edge_ids() const { return ids_; }

  /// One line per source block, one count per destination block.
  std::string occupancy_dump() const;

 private:
  std::size_t cell(std::size_t s, std::size_t d) const { return s * num_blocks_ + d; }

  std::size_t n_ = 1;
  std::size_t num_blocks_ = 0;
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> ids_;
};

/// Throws ParameterError when n == 0.
ShardGrid build_shard_grid(const Graph& g, std::size_t nodes_per_block);

/// Visit order over all S*S cells, empty ones included and flagged.
/// DestinationStationary walks columns (outer dst, inner src);
/// SourceStationary walks rows (outer src, inner dst).
std::vector<ShardCoord> traversal(const ShardGrid& grid, TraversalOrder order,
                                  SweepPattern pattern = SweepPattern::Ascending);

const char* to_string(TraversalOrder order);
const char* to_string(SweepPattern pattern);

}  // namespace gnnerator
