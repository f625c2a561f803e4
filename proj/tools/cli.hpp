#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gnnerator/controller.hpp"
#include "gnnerator/network.hpp"

namespace gnnerator::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2, kCapacityError = 3 };

struct DatasetOptions {
  std::string name;  ///< optional known-dataset label checked after load
  std::filesystem::path graph;
  std::filesystem::path features;
  std::size_t num_nodes = 0;
  std::size_t feature_dim = 0;
  std::size_t synthetic_nodes = 0;
  std::size_t synthetic_edges = 0;
  bool symmetric = false;
};

struct NetworkOptions {
  std::string name = "graphsage";
  std::size_t hidden_dim = 16;
  std::size_t out_dim = 16;
  std::uint64_t seed = 1;
  MeanDenominator mean_denominator = MeanDenominator::DegreePlusOne;
};

struct RunConfig {
  HardwareConfig hw;
  DataflowConfig df;
  NetworkOptions network;
  DatasetOptions dataset;
  /// Unset block sizes fall back to min(default, widest aggregated dim).
  bool block_size_set = false;
};

/// Applies the block-size fallback above.
DataflowConfig effective_dataflow(const RunConfig& cfg, const DataflowConfig& df,
                                  const NetworkSpec& net);

/// Applies one "section.key = value" setting. Throws ConfigError for
/// unknown keys and malformed values.
void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value);

/// Reads an INI file with [dram], [dense], [graph], [dataflow], [network]
/// and [dataset] sections on top of `base`.
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
RunConfig parse_run_config(const std::string& text, RunConfig base = {});

/// Inclusive ranges and lists: "4", "1,2,8", "1:8" (every integer).
std::vector<std::uint64_t> parse_range(const std::string& text);

struct Workload {
  Graph graph;
  FeatureMatrix features;
};

/// Loads or generates the dataset. Feature dim defaults to 16 for
/// synthetic graphs.
Workload load_workload(const DatasetOptions& ds, std::uint64_t seed);
NetworkSpec build_network(const NetworkOptions& opts, std::size_t in_dim);

struct SweepRow {
  std::string dataflow;
  std::string hardware;
  SimReport report;
  double speedup = 1.0;
};

struct Experiment {
  RunConfig base;
  struct DataflowVariant {
    std::string name;
    DataflowConfig df;
    bool block_size_set = false;
  };
  std::vector<DataflowVariant> dataflows;
  std::vector<std::pair<std::string, HardwareConfig>> hardware;
  std::string baseline;
  std::filesystem::path output;
};

Experiment parse_experiment(const std::string& text, const std::filesystem::path& base_dir = {});
std::vector<SweepRow> run_experiment(const Experiment& ex, const Workload& w,
                                     const NetworkSpec& net);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// CSV of analytical shard-cost rows for every (order, S, I) and, when `num_nodes`,
/// `resident_bytes`, `feature_dim` and `block_sizes` are set, dimension-
/// blocked rows for every (order, I, B).
struct CostTableOptions {
  std::vector<std::uint64_t> S;
  std::vector<std::uint64_t> I{1};
  double read_weight = 1.0;
  double write_weight = 1.0;
  std::uint64_t num_nodes = 0;
  std::uint64_t resident_bytes = 0;
  std::uint64_t feature_dim = 0;
  std::vector<std::uint64_t> block_sizes;
};
std::string cost_table_csv(const CostTableOptions& opts);

/// Entry point; never throws. Returns an ExitCode.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gnnerator::cli
