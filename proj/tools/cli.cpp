#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gnnerator/costmodel.hpp"
#include "gnnerator/errors.hpp"
#include "gnnerator/report.hpp"

namespace gnnerator::cli {
namespace pt = boost::property_tree;

namespace {

std::uint64_t to_uint(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

double to_double(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  double v = 0;
  in >> v;
  if (!in || !in.eof()) throw ConfigError(what + ": expected a number, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(what + ": expected true/false, got '" + text + "'");
}

DataflowMode parse_mode(const std::string& s) {
  if (s == "conventional") return DataflowMode::Conventional;
  if (s == "blocked") return DataflowMode::Blocked;
  throw ConfigError("dataflow mode must be conventional or blocked, got '" + s + "'");
}

OrderChoice parse_order(const std::string& s) {
  if (s == "src") return OrderChoice::Source;
  if (s == "dst") return OrderChoice::Destination;
  if (s == "auto") return OrderChoice::Auto;
  throw ConfigError("order must be src, dst or auto, got '" + s + "'");
}

SweepPattern parse_pattern(const std::string& s) {
  if (s == "serpentine") return SweepPattern::Serpentine;
  if (s == "ascending") return SweepPattern::Ascending;
  throw ConfigError("pattern must be serpentine or ascending, got '" + s + "'");
}

pt::ptree read_ini_text(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value) {
  const std::string what = section + "." + key;
  auto u = [&] { return to_uint(value, what); };
  if (section == "dram") {
    if (key == "bytes_per_cycle") return void(cfg.hw.dram.bytes_per_cycle = u());
    if (key == "latency_cycles") return void(cfg.hw.dram.latency_cycles = u());
    if (key == "clock_ghz") return void(cfg.hw.dram.clock_ghz = to_double(value, what));
  } else if (section == "dense") {
    if (key == "rows") return void(cfg.hw.dense.rows = u());
    if (key == "cols") return void(cfg.hw.dense.cols = u());
    if (key == "arrays") return void(cfg.hw.dense.arrays = u());
    if (key == "input_buffer_bytes") return void(cfg.hw.dense.input_buffer_bytes = u());
    if (key == "weight_buffer_bytes") return void(cfg.hw.dense.weight_buffer_bytes = u());
    if (key == "output_buffer_bytes") return void(cfg.hw.dense.output_buffer_bytes = u());
    if (key == "macs_per_pe_per_cycle") return void(cfg.hw.dense.macs_per_pe_per_cycle = u());
    if (key == "output_port_bytes") return void(cfg.hw.dense.output_port_bytes = u());
  } else if (section == "graph") {
    if (key == "num_gpes") return void(cfg.hw.graph.num_gpes = u());
    if (key == "simd_width") return void(cfg.hw.graph.simd_width = u());
    if (key == "feature_scratch_bytes") return void(cfg.hw.graph.feature_scratch_bytes = u());
    if (key == "edge_scratch_bytes") return void(cfg.hw.graph.edge_scratch_bytes = u());
    if (key == "edge_bytes") return void(cfg.hw.graph.edge_bytes = u());
    if (key == "input_sets") return void(cfg.hw.graph.input_sets = u());
  } else if (section == "dataflow") {
    if (key == "mode") return void(cfg.df.mode = parse_mode(value));
    if (key == "block_size") {
      cfg.block_size_set = true;
      return void(cfg.df.block_size = u());
    }
    if (key == "order") return void(cfg.df.order = parse_order(value));
    if (key == "nodes_per_block") return void(cfg.df.nodes_per_block = u());
    if (key == "pattern") return void(cfg.df.pattern = parse_pattern(value));
  } else if (section == "network") {
    if (key == "name") return void(cfg.network.name = value);
    if (key == "hidden_dim") return void(cfg.network.hidden_dim = u());
    if (key == "out_dim") return void(cfg.network.out_dim = u());
    if (key == "seed") return void(cfg.network.seed = u());
    if (key == "mean_denominator") {
      auto& rule = cfg.network.mean_denominator;
      if (value == "degree_plus_one") return void(rule = MeanDenominator::DegreePlusOne);
      if (value == "in_degree") return void(rule = MeanDenominator::InDegree);
      throw ConfigError(what + ": expected degree_plus_one or in_degree");
    }
  } else if (section == "dataset") {
    if (key == "name") return void(cfg.dataset.name = value);
    if (key == "graph") return void(cfg.dataset.graph = value);
    if (key == "features") return void(cfg.dataset.features = value);
    if (key == "num_nodes") return void(cfg.dataset.num_nodes = u());
    if (key == "feature_dim") return void(cfg.dataset.feature_dim = u());
    if (key == "synthetic_nodes") return void(cfg.dataset.synthetic_nodes = u());
    if (key == "synthetic_edges") return void(cfg.dataset.synthetic_edges = u());
    if (key == "symmetric") return void(cfg.dataset.symmetric = to_bool(value, what));
  } else {
    throw ConfigError("unknown config section [" + section + "]");
  }
  throw ConfigError("unknown config key " + what);
}

RunConfig parse_run_config(const std::string& text, RunConfig base) {
  const pt::ptree tree = read_ini_text(text, "config");
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("setting '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) apply_setting(base, section, key, value.data());
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  RunConfig cfg = parse_run_config(read_text(path), std::move(base));
  // Dataset paths are relative to the config file.
  const auto dir = path.parent_path();
  if (!cfg.dataset.graph.empty() && cfg.dataset.graph.is_relative()) {
    cfg.dataset.graph = dir / cfg.dataset.graph;
  }
  if (!cfg.dataset.features.empty() && cfg.dataset.features.is_relative()) {
    cfg.dataset.features = dir / cfg.dataset.features;
  }
  return cfg;
}

DataflowConfig effective_dataflow(const RunConfig& cfg, const DataflowConfig& df,
                                  const NetworkSpec& net) {
  DataflowConfig out = df;
  if (cfg.block_size_set) return out;
  std::size_t widest = 0;
  for (const LayerSpec& layer : net.layers) widest = std::max(widest, layer.aggregate_dim());
  if (widest > 0) out.block_size = std::min(out.block_size, widest);
  return out;
}

std::vector<std::uint64_t> parse_range(const std::string& text) {
  std::vector<std::uint64_t> values;
  std::stringstream parts(text);
  std::string part;
  while (std::getline(parts, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      values.push_back(to_uint(part, "range"));
      continue;
    }
    const std::uint64_t lo = to_uint(part.substr(0, colon), "range");
    const std::uint64_t hi = to_uint(part.substr(colon + 1), "range");
    if (lo > hi) throw ConfigError("range " + part + " is empty");
    for (std::uint64_t v = lo; v <= hi; ++v) values.push_back(v);
  }
  if (values.empty()) throw ConfigError("empty range '" + text + "'");
  return values;
}

Workload load_workload(const DatasetOptions& ds, std::uint64_t seed) {
  if (!ds.graph.empty()) {
    if (ds.num_nodes == 0) throw ConfigError("--num-nodes is required with --graph");
    if (ds.features.empty() || ds.feature_dim == 0) {
      throw ConfigError("--features and --feature-dim are required with --graph");
    }
    if (!std::filesystem::exists(ds.graph)) throw FormatError("missing graph file " + ds.graph.string());
    if (!std::filesystem::exists(ds.features)) {
      throw FormatError("missing feature file " + ds.features.string());
    }
    Workload w{load_graph(ds.graph, ds.num_nodes),
               load_features(ds.features, ds.num_nodes, ds.feature_dim)};
    if (!ds.name.empty()) {
      auto meta = find_known_dataset(ds.name);
      if (!meta) throw ConfigError("unknown dataset name '" + ds.name + "'");
      check_dataset(*meta, w.graph, w.features);
    }
    return w;
  }
  if (ds.synthetic_nodes == 0) {
    throw ConfigError("no dataset: give --graph/--features or --synthetic-nodes");
  }
  GeneratorOptions gen;
  gen.num_nodes = ds.synthetic_nodes;
  gen.num_edges = ds.synthetic_edges ? ds.synthetic_edges : 4 * ds.synthetic_nodes;
  gen.feature_dim = ds.feature_dim ? ds.feature_dim : 16;
  gen.seed = seed;
  gen.symmetric = ds.symmetric;
  auto [g, h] = generate_erdos_renyi(gen);
  return Workload{std::move(g), std::move(h)};
}

NetworkSpec build_network(const NetworkOptions& opts, std::size_t in_dim) {
  NetworkSpec net;
  try {
    net = make_builtin(parse_builtin(opts.name), in_dim, opts.hidden_dim, opts.out_dim, opts.seed);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  net.mean_denominator = opts.mean_denominator;
  return net;
}

Experiment parse_experiment(const std::string& text, const std::filesystem::path& base_dir) {
  const pt::ptree tree = read_ini_text(text, "experiment");
  Experiment ex;
  auto fix = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base_dir / p;
  };
  // The INI reader drops sections without keys, but "[hardware.base]" alone
  // is a meaningful variant, so walk the headers ourselves.
  std::vector<std::string> sections;
  {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      const auto open = line.find_first_not_of(" \t");
      const auto close = line.find_last_not_of(" \t\r");
      if (open == std::string::npos || line[open] != '[' || line[close] != ']') continue;
      sections.push_back(line.substr(open + 1, close - open - 1));
    }
  }
  bool have_experiment = false;
  for (const std::string& section : sections) {
    const pt::ptree body = tree.get_child(pt::ptree::path_type(section, '/'), pt::ptree{});
    if (section == "experiment") {
      have_experiment = true;
      for (const auto& [key, value] : body) {
        const std::string& v = value.data();
        if (key == "config") {
          std::filesystem::path p = v;
          fix(p);
          ex.base = load_run_config(p, ex.base);
        } else if (key == "baseline") {
          ex.baseline = v;
        } else if (key == "output") {
          ex.output = v;
          fix(ex.output);
        } else if (key == "network") {
          apply_setting(ex.base, "network", "name", v);
        } else if (key == "hidden_dim" || key == "out_dim" || key == "seed") {
          apply_setting(ex.base, "network", key, v);
        } else if (key == "graph" || key == "features" || key == "num_nodes" ||
                   key == "feature_dim" || key == "synthetic_nodes" ||
                   key == "synthetic_edges" || key == "symmetric" || key == "name") {
          apply_setting(ex.base, "dataset", key, v);
          if (key == "graph") fix(ex.base.dataset.graph);
          if (key == "features") fix(ex.base.dataset.features);
        } else {
          throw ConfigError("unknown key experiment." + key);
        }
      }
    } else if (section.rfind("dataflow.", 0) == 0) {
      RunConfig variant = ex.base;
      for (const auto& [key, value] : body) apply_setting(variant, "dataflow", key, value.data());
      ex.dataflows.push_back({section.substr(9), variant.df, variant.block_size_set});
    } else if (section.rfind("hardware.", 0) == 0) {
      RunConfig variant = ex.base;
      for (const auto& [key, value] : body) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
          throw ConfigError("hardware override '" + key + "' must be section.key");
        }
        const std::string sec = key.substr(0, dot);
        if (sec != "dram" && sec != "dense" && sec != "graph") {
          throw ConfigError("hardware override '" + key + "' must target dram, dense or graph");
        }
        apply_setting(variant, sec, key.substr(dot + 1), value.data());
      }
      ex.hardware.emplace_back(section.substr(9), variant.hw);
    } else {
      throw ConfigError("unknown experiment section [" + section + "]");
    }
  }
  if (!have_experiment) throw ConfigError("experiment file has no [experiment] section");
  if (ex.dataflows.empty()) throw ValidationError("experiment lists no [dataflow.*] variants");
  if (ex.hardware.empty()) throw ValidationError("experiment lists no [hardware.*] variants");
  if (ex.baseline.empty()) ex.baseline = ex.hardware.front().first;
  const bool known = std::any_of(ex.hardware.begin(), ex.hardware.end(),
                                 [&](const auto& hw) { return hw.first == ex.baseline; });
  if (!known) throw ConfigError("baseline '" + ex.baseline + "' is not a hardware variant");
  return ex;
}

std::vector<SweepRow> run_experiment(const Experiment& ex, const Workload& w,
                                     const NetworkSpec& net) {
  for (const auto& [name, hw] : ex.hardware) hw.validate();
  std::vector<DataflowConfig> dfs;
  for (const auto& v : ex.dataflows) {
    RunConfig cfg;
    cfg.block_size_set = v.block_size_set;
    dfs.push_back(effective_dataflow(cfg, v.df, net));
    dfs.back().validate(net);
  }

  std::vector<std::future<SimReport>> pending;
  for (const DataflowConfig& df : dfs) {
    for (const auto& [hw_name, hw] : ex.hardware) {
      pending.push_back(std::async(std::launch::async, [&w, &net, hw = hw, df = df] {
        return run(w.graph, w.features, net, hw, df);
      }));
    }
  }
  std::vector<SweepRow> rows;
  std::size_t k = 0;
  for (const auto& v : ex.dataflows) {
    for (const auto& [hw_name, hw] : ex.hardware) {
      rows.push_back(SweepRow{v.name, hw_name, pending[k++].get(), 1.0});
    }
  }
  for (SweepRow& row : rows) {
    auto base = std::find_if(rows.begin(), rows.end(), [&](const SweepRow& r) {
      return r.dataflow == row.dataflow && r.hardware == ex.baseline;
    });
    row.speedup = row.report.total_cycles == 0
                      ? 1.0
                      : static_cast<double>(base->report.total_cycles) /
                            static_cast<double>(row.report.total_cycles);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "dataflow,hardware,total_cycles,speedup,graph_busy,graph_stall,dense_busy,dense_stall,"
         "dram_read_bytes,dram_write_bytes,feature_bytes,output_hash\n";
  for (const SweepRow& r : rows) {
    const StreamBytes& b = r.report.dram_bytes;
    const auto f = static_cast<std::size_t>(Stream::Features);
    const auto p = static_cast<std::size_t>(Stream::Partials);
    out << r.dataflow << ',' << r.hardware << ',' << r.report.total_cycles << ','
        << std::fixed << std::setprecision(4) << r.speedup << ',' << r.report.graph.busy << ','
        << r.report.graph.stall << ',' << r.report.dense.busy << ',' << r.report.dense.stall
        << ',' << b.total_read() << ',' << b.total_write() << ','
        << b.read[f] + b.write[f] + b.read[p] + b.write[p] << ',' << std::hex << std::setw(16)
        << std::setfill('0') << content_hash(r.report.output) << std::dec << std::setfill(' ')
        << '\n';
  }
  return out.str();
}

std::string cost_table_csv(const CostTableOptions& opts) {
  std::ostringstream out;
  out << "order,S,I,D,B,reads,writes,weighted_total\n";
  const TraversalOrder orders[] = {TraversalOrder::SourceStationary,
                                   TraversalOrder::DestinationStationary};
  for (auto order : orders) {
    for (auto S : opts.S) {
      for (auto I : opts.I) {
        const CostEstimate e = cost(order, CostInputs{S, I, opts.read_weight, opts.write_weight});
        out << to_string(order) << ',' << S << ',' << I << ",,," << e.reads << ',' << e.writes
            << ',' << e.weighted_total << '\n';
      }
    }
  }
  if (opts.block_sizes.empty()) return out.str();
  const GridSizing sizing{opts.num_nodes, opts.resident_bytes};
  for (auto order : orders) {
    for (auto I : opts.I) {
      for (auto B : opts.block_sizes) {
        const CostInputs in{1, I, opts.read_weight, opts.write_weight};
        const CostEstimate e = blocked_cost(order, in, opts.feature_dim, B, sizing);
        out << to_string(order) << ',' << grid_side_for(sizing, B, I) << ',' << I << ','
            << opts.feature_dim << ',' << B << ',' << e.reads << ',' << e.writes << ','
            << e.weighted_total << '\n';
      }
    }
  }
  return out.str();
}

namespace {

struct RunFlags {
  std::string config;
  std::string graph, features, network, dataflow, order, pattern, out;
  std::optional<std::size_t> num_nodes, feature_dim, block_size, nodes_per_block, hidden_dim,
      out_dim, synthetic_nodes, synthetic_edges;
  std::optional<std::uint64_t> seed;
};

void add_run_flags(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("--config", f.config, "INI config file");
  cmd.add_option("--graph", f.graph, "edge-list file");
  cmd.add_option("--features", f.features, "float32 feature blob");
  cmd.add_option("--num-nodes", f.num_nodes, "node count of --graph");
  cmd.add_option("--feature-dim", f.feature_dim, "feature dimension");
  cmd.add_option("--synthetic-nodes", f.synthetic_nodes, "generate a random graph instead");
  cmd.add_option("--synthetic-edges", f.synthetic_edges, "edges of the generated graph");
  cmd.add_option("--network", f.network, "gcn | graphsage | graphsagepool");
  cmd.add_option("--hidden-dim", f.hidden_dim, "hidden layer width");
  cmd.add_option("--out-dim", f.out_dim, "output width");
  cmd.add_option("--dataflow", f.dataflow, "conventional | blocked");
  cmd.add_option("--block-size", f.block_size, "feature block width B");
  cmd.add_option("--order", f.order, "src | dst | auto");
  cmd.add_option("--pattern", f.pattern, "serpentine | ascending");
  cmd.add_option("--nodes-per-block", f.nodes_per_block, "n (0 = largest that fits)");
  cmd.add_option("--seed", f.seed, "network and generator seed");
}

RunConfig resolve_run_config(const RunFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = load_run_config(f.config);
  auto set = [&](const char* sec, const char* key, const std::string& v) {
    if (!v.empty()) apply_setting(cfg, sec, key, v);
  };
  auto set_num = [&](const char* sec, const char* key, const auto& v) {
    if (v) apply_setting(cfg, sec, key, std::to_string(*v));
  };
  set("dataset", "graph", f.graph);
  set("dataset", "features", f.features);
  set_num("dataset", "num_nodes", f.num_nodes);
  set_num("dataset", "feature_dim", f.feature_dim);
  set_num("dataset", "synthetic_nodes", f.synthetic_nodes);
  set_num("dataset", "synthetic_edges", f.synthetic_edges);
  set("network", "name", f.network);
  set_num("network", "hidden_dim", f.hidden_dim);
  set_num("network", "out_dim", f.out_dim);
  set_num("network", "seed", f.seed);
  set("dataflow", "mode", f.dataflow);
  set_num("dataflow", "block_size", f.block_size);
  set("dataflow", "order", f.order);
  set("dataflow", "pattern", f.pattern);
  set_num("dataflow", "nodes_per_block", f.nodes_per_block);
  return cfg;
}

int classify(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  if (dynamic_cast<const CapacityError*>(&e)) return kCapacityError;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ShapeError*>(&e)) {
    return kUsageError;
  }
  return kRuntimeError;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-level simulator of a heterogeneous GNN accelerator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "simulate one configuration and write a report");
  add_run_flags(*run_cmd, run_flags);
  run_cmd->add_option("--out", run_flags.out, "report directory")->required();

  std::string experiment_path, sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every dataflow x hardware variant");
  sweep_cmd->add_option("experiment", experiment_path, "experiment INI")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV path (overrides experiment output)");

  CostTableOptions cost_opts;
  std::string s_range = "1:8", i_range = "1", b_range;
  auto* cost_cmd = app.add_subcommand("costtable", "evaluate the analytical shard cost model");
  cost_cmd->add_option("--s", s_range, "grid sides, e.g. 1:8 or 1,2,4");
  cost_cmd->add_option("--i", i_range, "input sets");
  cost_cmd->add_option("--read-weight", cost_opts.read_weight);
  cost_cmd->add_option("--write-weight", cost_opts.write_weight);
  cost_cmd->add_option("--num-nodes", cost_opts.num_nodes, "for blocked rows");
  cost_cmd->add_option("--resident-bytes", cost_opts.resident_bytes, "for blocked rows");
  cost_cmd->add_option("--feature-dim", cost_opts.feature_dim, "for blocked rows");
  cost_cmd->add_option("--block-sizes", b_range, "for blocked rows");

  GeneratorOptions gen;
  std::string gen_graph, gen_features;
  auto* gen_cmd = app.add_subcommand("generate", "write a random graph and features");
  gen_cmd->add_option("--num-nodes", gen.num_nodes);
  gen_cmd->add_option("--num-edges", gen.num_edges);
  gen_cmd->add_option("--feature-dim", gen.feature_dim);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_flag("--symmetric", gen.symmetric, "store both directions of every edge");
  gen_cmd->add_option("--graph", gen_graph)->required();
  gen_cmd->add_option("--features", gen_features)->required();

  std::string prep_in, prep_out;
  std::size_t prep_nodes = 0;
  bool prep_symmetrize = false, prep_keep_loops = false;
  auto* prep_cmd = app.add_subcommand("prepare", "symmetrize / deduplicate a raw edge list");
  prep_cmd->add_option("--input", prep_in)->required();
  prep_cmd->add_option("--num-nodes", prep_nodes)->required();
  prep_cmd->add_option("--output", prep_out)->required();
  prep_cmd->add_flag("--symmetrize", prep_symmetrize);
  prep_cmd->add_flag("--keep-self-loops", prep_keep_loops);

  std::string shard_graph;
  std::size_t shard_nodes = 0, shard_n = 0;
  auto* shards_cmd = app.add_subcommand("shards", "print shard-grid occupancy");
  shards_cmd->add_option("--graph", shard_graph)->required();
  shards_cmd->add_option("--num-nodes", shard_nodes)->required();
  shards_cmd->add_option("--nodes-per-block", shard_n)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*run_cmd) {
      const RunConfig cfg = resolve_run_config(run_flags);
      cfg.hw.validate();
      const Workload w = load_workload(cfg.dataset, cfg.network.seed);
      const NetworkSpec net = build_network(cfg.network, w.features.cols());
      const DataflowConfig df = effective_dataflow(cfg, cfg.df, net);
      df.validate(net);
      const SimReport report = run(w.graph, w.features, net, cfg.hw, df);
      write_report(report, run_flags.out);
      out << summary_text(report);
    } else if (*sweep_cmd) {
      const std::filesystem::path path = experiment_path;
      Experiment ex = parse_experiment(read_text(path), path.parent_path());
      if (!sweep_out.empty()) ex.output = sweep_out;
      const Workload w = load_workload(ex.base.dataset, ex.base.network.seed);
      const NetworkSpec net = build_network(ex.base.network, w.features.cols());
      const std::string table = sweep_csv(run_experiment(ex, w, net));
      if (!ex.output.empty()) {
        if (ex.output.has_parent_path()) std::filesystem::create_directories(ex.output.parent_path());
        std::ofstream file(ex.output);
        if (!(file << table)) throw FormatError("cannot write " + ex.output.string());
      }
      out << table;
    } else if (*cost_cmd) {
      cost_opts.S = parse_range(s_range);
      cost_opts.I = parse_range(i_range);
      if (!b_range.empty()) {
        if (!cost_opts.num_nodes || !cost_opts.resident_bytes || !cost_opts.feature_dim) {
          throw ConfigError("--block-sizes needs --num-nodes, --resident-bytes and --feature-dim");
        }
        cost_opts.block_sizes = parse_range(b_range);
      }
      out << cost_table_csv(cost_opts);
    } else if (*gen_cmd) {
      auto [g, h] = generate_erdos_renyi(gen);
      write_graph(g, gen_graph);
      write_features(h, gen_features);
      out << "nodes = " << g.num_nodes() << "\nedges = " << g.num_edges()
          << "\nfeature_dim = " << h.cols() << '\n';
    } else if (*prep_cmd) {
      PrepareOptions opts;
      opts.symmetrize = prep_symmetrize;
      opts.self_loops = prep_keep_loops ? SelfLoopPolicy::Keep : SelfLoopPolicy::Drop;
      const Graph g = prepare_graph(read_raw_edges(prep_in, prep_nodes), prep_nodes, opts);
      write_graph(g, prep_out);
      out << "nodes = " << g.num_nodes() << "\nedges = " << g.num_edges() << '\n';
    } else if (*shards_cmd) {
      const Graph g = load_graph(shard_graph, shard_nodes);
      out << build_shard_grid(g, shard_n).occupancy_dump();
    }
  } catch (const std::exception& e) {
    return classify(e, err);
  }
  return kOk;
}

}  // namespace gnnerator::cli
