#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gnnerator/matrix.hpp"

namespace gnnerator {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable directed graph. Edge order is the load order; in_neighbors(v)
/// lists sources in that same order.
class Graph {
 public:
  Graph() = default;

  /// Throws RangeError for out-of-range ids and ValidationError for
  /// duplicate edges.
  Graph(std::size_t num_nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const NodeId> in_neighbors(NodeId v) const;
  std::size_t in_degree(NodeId v) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
};

std::size_t in_degree(const Graph& g, NodeId v);

/// "src dst" per line, whitespace separated. Blank lines are skipped.
Graph parse_edge_list(std::istream& in, std::size_t num_nodes);
Graph load_graph(const std::filesystem::path& edge_file, std::size_t num_nodes);
void write_graph(const Graph& g, const std::filesystem::path& edge_file);

/// Raw row-major little-endian float32 blob, exactly num_nodes * dim * 4 bytes.
FeatureMatrix decode_features(std::span<const std::byte> bytes, std::size_t num_nodes,
                              std::size_t dim);
FeatureMatrix load_features(const std::filesystem::path& feature_file, std::size_t num_nodes,
                            std::size_t dim);
void write_features(const FeatureMatrix& h, const std::filesystem::path& feature_file);

struct DatasetMeta {
  std::string name;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t feature_dim = 0;
  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// Published sizes of the citation datasets (edge counts are directed,
/// i.e. both directions of every undirected edge).
std::span<const DatasetMeta> known_datasets();
std::optional<DatasetMeta> find_known_dataset(const std::string& name);

DatasetMeta describe(const std::string& name, const Graph& g, const FeatureMatrix& h);

/// Throws ValidationError naming the first mismatching count.
void check_dataset(const DatasetMeta& expected, const Graph& g, const FeatureMatrix& h);

enum class SelfLoopPolicy { Keep, Drop };

struct PrepareOptions {
  bool symmetrize = false;
  SelfLoopPolicy self_loops = SelfLoopPolicy::Drop;
};

/// Dataset preparation: optionally add reverse edges, drop self loops and
/// remove duplicates. Output edges are sorted by (src, dst).
Graph prepare_graph(std::span<const Edge> raw, std::size_t num_nodes, const PrepareOptions& opts);

/// Reads an edge list without rejecting duplicates or self loops, for
/// feeding prepare_graph.
std::vector<Edge> read_raw_edges(const std::filesystem::path& edge_file, std::size_t num_nodes);

struct GeneratorOptions {
  std::size_t num_nodes = 100;
  std::size_t num_edges = 400;
  std::size_t feature_dim = 16;
  std::uint64_t seed = 1;
  bool symmetric = false;
};

/// G(n, m) Erdős–Rényi graph without self loops, edges sorted by (src, dst),
/// plus uniform [-1, 1) features. With `symmetric`, num_edges counts
/// undirected pairs and both directions are emitted.
std::pair<Graph, FeatureMatrix> generate_erdos_renyi(const GeneratorOptions& opts);

}  // namespace gnnerator
