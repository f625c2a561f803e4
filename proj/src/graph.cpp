#include "gnnerator/graph.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "gnnerator/errors.hpp"

namespace gnnerator {
namespace {

std::uint64_t edge_key(const Edge& e) {
  return (static_cast<std::uint64_t>(e.src) << 32) | e.dst;
}

void check_in_range(const Edge& e, std::size_t num_nodes, std::size_t line) {
  if (e.src >= num_nodes || e.dst >= num_nodes) {
    std::string msg = "edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                      ") references a node >= num_nodes " + std::to_string(num_nodes);
    if (line != 0) msg += " (line " + std::to_string(line) + ")";
    throw RangeError(msg);
  }
}

// Parses "src dst" from one line. Returns false for blank lines.
bool parse_edge_line(std::string_view line, std::size_t line_no, Edge& out) {
  std::array<std::uint64_t, 2> ids{};
  std::size_t found = 0;
  std::size_t pos = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_space(line[end])) ++end;
    if (found == 2) throw ParseError("expected two node ids, found more", line_no);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, value);
    if (ec != std::errc{} || ptr != line.data() + end) {
      throw ParseError("not a non-negative integer: '" + std::string(line.substr(pos, end - pos)) +
                           "'",
                       line_no);
    }
    if (value > 0xffffffffULL) throw ParseError("node id exceeds 32 bits", line_no);
    ids[found++] = value;
    pos = end;
  }
  if (found == 0) return false;
  if (found != 2) throw ParseError("expected two node ids", line_no);
  out = Edge{static_cast<NodeId>(ids[0]), static_cast<NodeId>(ids[1])};
  return true;
}

template <typename Fn>
void for_each_edge_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Edge e;
    if (parse_edge_line(line, line_no, e)) fn(e, line_no);
  }
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

}  // namespace

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    check_in_range(e, num_nodes_, 0);
    if (!seen.insert(edge_key(e)).second) {
      throw ValidationError("duplicate edge (" + std::to_string(e.src) + ", " +
                            std::to_string(e.dst) + ") at index " + std::to_string(i));
    }
  }
  in_offsets_.assign(num_nodes_ + 1, 0);
  for (const Edge& e : edges_) ++in_offsets_[e.dst + 1];
  for (std::size_t v = 0; v < num_nodes_; ++v) in_offsets_[v + 1] += in_offsets_[v];
  in_sources_.resize(edges_.size());
  std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (const Edge& e : edges_) in_sources_[cursor[e.dst]++] = e.src;
}

std::span<const NodeId> Graph::in_neighbors(NodeId v) const {
  if (v >= num_nodes_) throw RangeError("node " + std::to_string(v) + " out of range");
  return {in_sources_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
}

std::size_t Graph::in_degree(NodeId v) const { return in_neighbors(v).size(); }

std::size_t in_degree(const Graph& g, NodeId v) { return g.in_degree(v); }

Graph parse_edge_list(std::istream& in, std::size_t num_nodes) {
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  for_each_edge_line(in, [&](const Edge& e, std::size_t line_no) {
    check_in_range(e, num_nodes, line_no);
    if (!seen.insert(edge_key(e)).second) {
      throw ValidationError("duplicate edge (" + std::to_string(e.src) + ", " +
                            std::to_string(e.dst) + ") at line " + std::to_string(line_no));
    }
    edges.push_back(e);
  });
  return Graph(num_nodes, std::move(edges));
}

Graph load_graph(const std::filesystem::path& edge_file, std::size_t num_nodes) {
  auto in = open_input(edge_file, std::ios::in);
  return parse_edge_list(in, num_nodes);
}

void write_graph(const Graph& g, const std::filesystem::path& edge_file) {
  std::ofstream out(edge_file);
  if (!out) throw FormatError("cannot write " + edge_file.string());
  for (const Edge& e : g.edges()) out << e.src << ' ' << e.dst << '\n';
  if (!out) throw FormatError("write failed: " + edge_file.string());
}

std::vector<Edge> read_raw_edges(const std::filesystem::path& edge_file, std::size_t num_nodes) {
  auto in = open_input(edge_file, std::ios::in);
  std::vector<Edge> edges;
  for_each_edge_line(in, [&](const Edge& e, std::size_t line_no) {
    check_in_range(e, num_nodes, line_no);
    edges.push_back(e);
  });
  return edges;
}

FeatureMatrix decode_features(std::span<const std::byte> bytes, std::size_t num_nodes,
                              std::size_t dim) {
  const std::size_t expected = num_nodes * dim * sizeof(float);
  if (bytes.size() != expected) {
    throw FormatError("feature blob is " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(expected) + " (" + std::to_string(num_nodes) + " x " +
                      std::to_string(dim) + " float32)");
  }
  std::vector<float> values(num_nodes * dim);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) {
      bits = (bits << 8) | std::to_integer<std::uint32_t>(bytes[i * 4 + b]);
    }
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    if (!std::isfinite(v)) {
      throw ValidationError("non-finite feature at index " + std::to_string(i) + " (node " +
                            std::to_string(i / std::max<std::size_t>(dim, 1)) + ", dim " +
                            std::to_string(i % std::max<std::size_t>(dim, 1)) + ")");
    }
    values[i] = v;
  }
  return FeatureMatrix(num_nodes, dim, std::move(values));
}

FeatureMatrix load_features(const std::filesystem::path& feature_file, std::size_t num_nodes,
                            std::size_t dim) {
  auto in = open_input(feature_file, std::ios::in | std::ios::binary);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_features(std::as_bytes(std::span<const char>(raw)), num_nodes, dim);
}

void write_features(const FeatureMatrix& h, const std::filesystem::path& feature_file) {
  std::ofstream out(feature_file, std::ios::binary);
  if (!out) throw FormatError("cannot write " + feature_file.string());
  std::vector<char> buf(h.size() * 4);
  auto values = h.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &values[i], sizeof(bits));
    for (int b = 0; b < 4; ++b) buf[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("write failed: " + feature_file.string());
}

std::span<const DatasetMeta> known_datasets() {
  static const std::array<DatasetMeta, 3> table = {{
      {"cora", 2708, 10556, 1433},
      {"citeseer", 3327, 9104, 3703},
      {"pubmed", 19717, 88648, 500},
  }};
  return table;
}

std::optional<DatasetMeta> find_known_dataset(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& meta : known_datasets()) {
    if (meta.name == lower) return meta;
  }
  return std::nullopt;
}

DatasetMeta describe(const std::string& name, const Graph& g, const FeatureMatrix& h) {
  return DatasetMeta{name, g.num_nodes(), g.num_edges(), h.cols()};
}

void check_dataset(const DatasetMeta& expected, const Graph& g, const FeatureMatrix& h) {
  auto mismatch = [&](const char* what, std::size_t want, std::size_t got) {
    throw ValidationError(expected.name + ": " + what + " is " + std::to_string(got) +
                          ", expected " + std::to_string(want));
  };
  if (g.num_nodes() != expected.num_nodes) mismatch("node count", expected.num_nodes, g.num_nodes());
  if (g.num_edges() != expected.num_edges) mismatch("edge count", expected.num_edges, g.num_edges());
  if (h.rows() != expected.num_nodes) mismatch("feature rows", expected.num_nodes, h.rows());
  if (h.cols() != expected.feature_dim) mismatch("feature dim", expected.feature_dim, h.cols());
}

Graph prepare_graph(std::span<const Edge> raw, std::size_t num_nodes, const PrepareOptions& opts) {
  std::vector<Edge> edges;
  edges.reserve(raw.size() * (opts.symmetrize ? 2 : 1));
  for (const Edge& e : raw) {
    check_in_range(e, num_nodes, 0);
    if (e.src == e.dst && opts.self_loops == SelfLoopPolicy::Drop) continue;
    edges.push_back(e);
    if (opts.symmetrize && e.src != e.dst) edges.push_back(Edge{e.dst, e.src});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph(num_nodes, std::move(edges));
}

std::pair<Graph, FeatureMatrix> generate_erdos_renyi(const GeneratorOptions& opts) {
  const std::uint64_t n = opts.num_nodes;
  const std::uint64_t possible = n < 2 ? 0 : (opts.symmetric ? n * (n - 1) / 2 : n * (n - 1));
  if (opts.num_edges > possible) {
    throw ParameterError("cannot place " + std::to_string(opts.num_edges) + " edges on " +
                         std::to_string(n) + " nodes");
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<NodeId> pick(0, n == 0 ? 0 : static_cast<NodeId>(n - 1));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(opts.num_edges * 2);
  std::vector<Edge> edges;
  edges.reserve(opts.num_edges * (opts.symmetric ? 2 : 1));
  while (seen.size() < opts.num_edges) {
    Edge e{pick(rng), pick(rng)};
    if (e.src == e.dst) continue;
    if (opts.symmetric && e.src > e.dst) std::swap(e.src, e.dst);
    if (!seen.insert(edge_key(e)).second) continue;
    edges.push_back(e);
    if (opts.symmetric) edges.push_back(Edge{e.dst, e.src});
  }
  std::sort(edges.begin(), edges.end());

  std::uniform_real_distribution<float> value(-1.0f, 1.0f);
  FeatureMatrix h(n, opts.feature_dim);
  for (float& v : h.values()) v = value(rng);
  return {Graph(n, std::move(edges)), std::move(h)};
}

}  // namespace gnnerator
