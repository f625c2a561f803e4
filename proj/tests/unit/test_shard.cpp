#include <doctest.h>

#include <algorithm>
#include <set>

#include "gnnerator/errors.hpp"
#include "gnnerator/shard.hpp"
#include "helpers.hpp"

using namespace gnnerator;

namespace {

std::vector<Edge> edges_of(const ShardGrid& grid, std::size_t s, std::size_t d) {
  auto span = grid.shard_edges(s, d);
  return {span.begin(), span.end()};
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> coords(const std::vector<ShardCoord>& seq) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& c : seq) out.emplace_back(c.src_block, c.dst_block);
  return out;
}

}  // namespace

TEST_CASE("hand partition of the 4-cycle at n=2") {
  const Graph g = testing::cycle_graph(4);
  const ShardGrid grid = build_shard_grid(g, 2);
  CHECK(grid.num_blocks() == 2);
  CHECK(edges_of(grid, 0, 0) == std::vector<Edge>{{0, 1}});
  CHECK(edges_of(grid, 0, 1) == std::vector<Edge>{{1, 2}});
  CHECK(edges_of(grid, 1, 1) == std::vector<Edge>{{2, 3}});
  CHECK(edges_of(grid, 1, 0) == std::vector<Edge>{{3, 0}});
  CHECK(grid.occupancy_dump() == "1 1\n1 1\n");
}

TEST_CASE("n >= num_nodes gives one shard") {
  const Graph g = testing::random_graph(30, 90, 4);
  const ShardGrid grid = build_shard_grid(g, 31);
  CHECK(grid.num_blocks() == 1);
  CHECK(edges_of(grid, 0, 0) == std::vector<Edge>(g.edges().begin(), g.edges().end()));
}

TEST_CASE("n == 0 is rejected") {
  CHECK_THROWS_AS(build_shard_grid(testing::cycle_graph(4), 0), ParameterError);
}

TEST_CASE("partition property on random graphs") {
  const Graph g = testing::random_graph(40, 200, 9);
  for (std::size_t n = 1; n <= g.num_nodes() + 1; ++n) {
    const ShardGrid grid(g, n);
    CHECK(grid.num_blocks() == (g.num_nodes() + n - 1) / n);
    std::multiset<std::pair<NodeId, NodeId>> flat;
    for (std::size_t s = 0; s < grid.num_blocks(); ++s) {
      for (std::size_t d = 0; d < grid.num_blocks(); ++d) {
        std::set<NodeId> srcs, dsts;
        auto es = grid.shard_edges(s, d);
        auto ids = grid.shard_edge_ids(s, d);
        for (std::size_t i = 0; i < es.size(); ++i) {
          const Edge& e = es[i];
          CHECK(e.src / n == s);
          CHECK(e.dst / n == d);
          CHECK(g.edges()[ids[i]] == e);
          if (i > 0) CHECK(ids[i - 1] < ids[i]);  // relative order kept
          srcs.insert(e.src);
          dsts.insert(e.dst);
          flat.insert({e.src, e.dst});
        }
        CHECK(srcs.size() <= n);
        CHECK(dsts.size() <= n);
      }
    }
    std::multiset<std::pair<NodeId, NodeId>> original;
    for (const Edge& e : g.edges()) original.insert({e.src, e.dst});
    CHECK(flat == original);
    CHECK(grid.all_edge_ids().size() == g.num_edges());
  }
}

TEST_CASE("traversal orders") {
  const Graph g(4, {});
  const ShardGrid grid(g, 2);
  using P = std::pair<std::uint32_t, std::uint32_t>;
  CHECK(coords(traversal(grid, TraversalOrder::DestinationStationary)) ==
        std::vector<P>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  CHECK(coords(traversal(grid, TraversalOrder::SourceStationary)) ==
        std::vector<P>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(coords(traversal(grid, TraversalOrder::DestinationStationary, SweepPattern::Serpentine)) ==
        std::vector<P>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(coords(traversal(grid, TraversalOrder::SourceStationary, SweepPattern::Serpentine)) ==
        std::vector<P>{{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  for (const auto& c : traversal(grid, TraversalOrder::SourceStationary)) CHECK(c.empty);

  const ShardGrid single(g, 8);
  for (auto order : {TraversalOrder::SourceStationary, TraversalOrder::DestinationStationary}) {
    CHECK(coords(traversal(single, order)) == std::vector<P>{{0, 0}});
  }
}

TEST_CASE("traversal visits every cell once") {
  const Graph g = testing::random_graph(50, 150, 2);
  for (std::size_t n : {1, 3, 7, 50}) {
    const ShardGrid grid(g, n);
    for (auto order : {TraversalOrder::SourceStationary, TraversalOrder::DestinationStationary}) {
      for (auto pattern : {SweepPattern::Ascending, SweepPattern::Serpentine}) {
        const auto seq = traversal(grid, order, pattern);
        CHECK(seq.size() == grid.num_blocks() * grid.num_blocks());
        auto cells = coords(seq);
        std::sort(cells.begin(), cells.end());
        CHECK(std::adjacent_find(cells.begin(), cells.end()) == cells.end());
        for (const auto& c : seq) CHECK(c.empty == (grid.shard_size(c.src_block, c.dst_block) == 0));
      }
    }
  }
}

TEST_CASE("block ranges") {
  const Graph g(5, {});
  const ShardGrid grid(g, 2);
  CHECK(grid.num_blocks() == 3);
  CHECK(grid.block_nodes(2).begin == 4);
  CHECK(grid.block_nodes(2).size() == 1);
  CHECK(grid.block_of(3) == 1);
  CHECK_THROWS_AS(grid.block_nodes(3), RangeError);
  CHECK_THROWS_AS(grid.shard_edges(0, 3), RangeError);
}
