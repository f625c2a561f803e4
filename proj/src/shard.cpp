#include "gnnerator/shard.hpp"

#include <algorithm>
#include <sstream>

#include "gnnerator/errors.hpp"

namespace gnnerator {

ShardGrid::ShardGrid(const Graph& g, std::size_t nodes_per_block)
    : n_(nodes_per_block), num_nodes_(g.num_nodes()) {
  if (n_ == 0) throw ParameterError("nodes per block must be >= 1");
  num_blocks_ = std::max<std::size_t>(1, (num_nodes_ + n_ - 1) / n_);
  const std::size_t cells = num_blocks_ * num_blocks_;

  // Stable counting sort of edges by cell.
  offsets_.assign(cells + 1, 0);
  auto edges = g.edges();
  for (const Edge& e : edges) ++offsets_[cell(e.src / n_, e.dst / n_) + 1];
  for (std::size_t c = 0; c < cells; ++c) offsets_[c + 1] += offsets_[c];
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  edges_.resize(edges.size());
  ids_.resize(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    std::size_t slot = cursor[cell(e.src / n_, e.dst / n_)]++;
    edges_[slot] = e;
    ids_[slot] = static_cast<std::uint32_t>(i);
  }
}

NodeRange ShardGrid::block_nodes(std::size_t block) const {
  if (block >= num_blocks_) throw RangeError("block " + std::to_string(block) + " out of range");
  std::size_t begin = std::min(block * n_, num_nodes_);
  std::size_t end = std::min(begin + n_, num_nodes_);
  return {static_cast<NodeId>(begin), static_cast<NodeId>(end)};
}

std::span<const Edge> ShardGrid::shard_edges(std::size_t src_block, std::size_t dst_block) const {
  if (src_block >= num_blocks_ || dst_block >= num_blocks_) throw RangeError("shard out of range");
  std::size_t c = cell(src_block, dst_block);
  return {edges_.data() + offsets_[c], offsets_[c + 1] - offsets_[c]};
}

std::span<const std::uint32_t> ShardGrid::shard_edge_ids(std::size_t src_block,
                                                         std::size_t dst_block) const {
  if (src_block >= num_blocks_ || dst_block >= num_blocks_) throw RangeError("shard out of range");
  std::size_t c = cell(src_block, dst_block);
  return {ids_.data() + offsets_[c], offsets_[c + 1] - offsets_[c]};
}

std::size_t ShardGrid::shard_size(std::size_t src_block, std::size_t dst_block) const {
  return shard_edges(src_block, dst_block).size();
}

std::size_t ShardGrid::max_shard_size() const {
  std::size_t best = 0;
  for (std::size_t c = 0; c + 1 < offsets_.size(); ++c) {
    best = std::max(best, offsets_[c + 1] - offsets_[c]);
  }
  return best;
}

std::string ShardGrid::occupancy_dump() const {
  std::ostringstream out;
  for (std::size_t s = 0; s < num_blocks_; ++s) {
    for (std::size_t d = 0; d < num_blocks_; ++d) {
      if (d) out << ' ';
      out << shard_size(s, d);
    }
    out << '\n';
  }
  return out.str();
}

ShardGrid build_shard_grid(const Graph& g, std::size_t nodes_per_block) {
  return ShardGrid(g, nodes_per_block);
}

std::vector<ShardCoord> traversal(const ShardGrid& grid, TraversalOrder order,
                                  SweepPattern pattern) {
  const std::size_t S = grid.num_blocks();
  std::vector<ShardCoord> seq;
  seq.reserve(S * S);
  for (std::size_t outer = 0; outer < S; ++outer) {
    const bool reverse = pattern == SweepPattern::Serpentine && (outer % 2 == 1);
    for (std::size_t k = 0; k < S; ++k) {
      const std::size_t inner = reverse ? S - 1 - k : k;
      ShardCoord c;
      if (order == TraversalOrder::DestinationStationary) {
        c.src_block = static_cast<std::uint32_t>(inner);
        c.dst_block = static_cast<std::uint32_t>(outer);
      } else {
        c.src_block = static_cast<std::uint32_t>(outer);
        c.dst_block = static_cast<std::uint32_t>(inner);
      }
      c.empty = grid.shard_size(c.src_block, c.dst_block) == 0;
      seq.push_back(c);
    }
  }
  return seq;
}

const char* to_string(TraversalOrder order) {
  return order == TraversalOrder::SourceStationary ? "src" : "dst";
}

const char* to_string(SweepPattern pattern) {
  return pattern == SweepPattern::Ascending ? "ascending" : "serpentine";
}

}  // namespace gnnerator
