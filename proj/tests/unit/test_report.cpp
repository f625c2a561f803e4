#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gnnerator/controller.hpp"
#include "gnnerator/report.hpp"
#include "helpers.hpp"

using namespace gnnerator;

namespace {

SimReport sample() {
  const Graph g = testing::random_graph(20, 70, 1);
  const Matrix h = testing::random_features(20, 6, 2);
  DataflowConfig df;
  df.block_size = 4;
  df.nodes_per_block = 6;
  return run(g, h, make_builtin(BuiltinNetwork::GraphsagePool, 6, 4, 3, 1), HardwareConfig{}, df);
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::size_t count_fields(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

void check_rectangular(const std::string& csv) {
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  while (std::getline(in, line)) CHECK(count_fields(line) == count_fields(header));
}

}  // namespace

TEST_CASE("summary lists totals and the output fingerprint") {
  const SimReport r = sample();
  const std::string s = summary_text(r);
  CHECK(s.find("total_cycles = " + std::to_string(r.total_cycles) + "\n") != std::string::npos);
  std::ostringstream hash;
  hash << std::hex;
  hash.width(16);
  hash.fill('0');
  hash << content_hash(r.output);
  CHECK(s.find("output.hash = " + hash.str()) != std::string::npos);
  CHECK(s.find("dram.read.features = ") != std::string::npos);
  CHECK(s.find("graph.busy_cycles = " + std::to_string(r.graph.busy)) != std::string::npos);
}

TEST_CASE("csv tables have one row per record") {
  const SimReport r = sample();
  CHECK(count_lines(layers_csv(r)) == r.layers.size() + 1);
  CHECK(count_lines(shard_trace_csv(r)) == r.shard_traces.size() + 1);
  CHECK(count_lines(dense_trace_csv(r)) == r.dense_traces.size() + 1);
  check_rectangular(layers_csv(r));
  check_rectangular(shard_trace_csv(r));
  check_rectangular(dense_trace_csv(r));
}

TEST_CASE("write_report creates every file") {
  testing::TempDir dir;
  const SimReport r = sample();
  write_report(r, dir / "nested" / "out");
  for (const char* f : {"summary.txt", "layers.csv", "shards.csv", "dense_jobs.csv"}) {
    std::ifstream in(dir / "nested" / "out" / f);
    CHECK(in.good());
  }
  std::ifstream in(dir / "nested" / "out" / "summary.txt");
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == summary_text(r));
}
