#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "gnnerator/errors.hpp"
#include "helpers.hpp"

using namespace gnnerator;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "gnnerator");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string value_of(const std::string& summary, const std::string& key) {
  std::istringstream in(summary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  }
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("run writes a report and prints the summary") {
  testing::TempDir dir;
  const Result r = invoke({"run", "--synthetic-nodes", "60", "--synthetic-edges", "240",
                           "--feature-dim", "12", "--hidden-dim", "8", "--out",
                           (dir / "rep").string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out == slurp(dir / "rep" / "summary.txt"));
  CHECK(std::filesystem::exists(dir / "rep" / "shards.csv"));
  CHECK_FALSE(value_of(r.out, "total_cycles").empty());
}

TEST_CASE("conventional and blocked dataflows agree functionally") {
  testing::TempDir dir;
  std::vector<std::string> common{"--synthetic-nodes", "80", "--synthetic-edges", "300",
                                  "--feature-dim", "24", "--hidden-dim", "24",
                                  "--network", "gcn", "--nodes-per-block", "16"};
  auto with = [&](std::vector<std::string> extra, const std::string& out) {
    std::vector<std::string> args{"run"};
    args.insert(args.end(), common.begin(), common.end());
    args.insert(args.end(), extra.begin(), extra.end());
    args.push_back("--out");
    args.push_back((dir / out).string());
    return invoke(args);
  };
  const Result conv = with({"--dataflow", "conventional"}, "a");
  const Result blk = with({"--dataflow", "blocked", "--block-size", "24"}, "b");
  const Result narrow = with({"--dataflow", "blocked", "--block-size", "8"}, "c");
  REQUIRE(conv.code == 0);
  REQUIRE(blk.code == 0);
  REQUIRE(narrow.code == 0);
  CHECK(value_of(conv.out, "output.hash") == value_of(blk.out, "output.hash"));
  CHECK(value_of(conv.out, "total_cycles") == value_of(blk.out, "total_cycles"));
  CHECK(value_of(conv.out, "output.rows") == value_of(narrow.out, "output.rows"));
}

TEST_CASE("exit codes") {
  testing::TempDir dir;
  SUBCASE("usage errors") {
    CHECK(invoke({}).code == cli::kUsageError);
    CHECK(invoke({"run"}).code == cli::kUsageError);
    CHECK(invoke({"frobnicate"}).code == cli::kUsageError);
    const Result bad = invoke({"run", "--synthetic-nodes", "30", "--block-size", "99", "--out",
                               (dir / "x").string()});
    CHECK(bad.code == cli::kUsageError);
    CHECK(bad.err.find("block size") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "x"));
  }
  SUBCASE("capacity") {
    const std::string cfg = (dir / "tiny.ini").string();
    testing::write_text(cfg, "[graph]\nfeature_scratch_bytes = 16\n");
    const Result r = invoke({"run", "--config", cfg, "--synthetic-nodes", "30", "--out",
                             (dir / "y").string()});
    CHECK(r.code == cli::kCapacityError);
    CHECK_FALSE(std::filesystem::exists(dir / "y"));
  }
  SUBCASE("runtime") {
    const Result r = invoke({"run", "--graph", (dir / "missing.txt").string(), "--num-nodes",
                             "4", "--features", (dir / "missing.bin").string(), "--feature-dim", "2",
                             "--out", (dir / "z").string()});
    CHECK(r.code == cli::kRuntimeError);
    CHECK_FALSE(std::filesystem::exists(dir / "z"));
  }
  SUBCASE("unknown config key") {
    const std::string cfg = (dir / "bad.ini").string();
    testing::write_text(cfg, "[graph]\nwarp_drive = 1\n");
    CHECK(invoke({"run", "--config", cfg, "--synthetic-nodes", "10", "--out",
                  (dir / "w").string()})
              .code == cli::kUsageError);
  }
}

TEST_CASE("config parsing") {
  const cli::RunConfig c = cli::parse_run_config(
      "[dram]\nbytes_per_cycle = 128\n[dense]\narrays = 2\n[dataflow]\nmode = conventional\n"
      "order = src\n[network]\nname = gcn\nhidden_dim = 32\n");
  CHECK(c.hw.dram.bytes_per_cycle == 128);
  CHECK(c.hw.dense.arrays == 2);
  CHECK(c.df.mode == DataflowMode::Conventional);
  CHECK(c.df.order == OrderChoice::Source);
  CHECK(c.network.hidden_dim == 32);
  CHECK_FALSE(c.block_size_set);
  CHECK_THROWS_AS(cli::parse_run_config("[dram]\nbytes_per_cycle = fast\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_run_config("[nowhere]\nx = 1\n"), ConfigError);
}

TEST_CASE("block size fallback only applies when unset") {
  cli::RunConfig cfg;
  const NetworkSpec net = make_builtin(BuiltinNetwork::GCN, 16, 16, 4, 1);
  CHECK(cli::effective_dataflow(cfg, cfg.df, net).block_size == 16);
  cfg.block_size_set = true;
  cfg.df.block_size = 64;
  CHECK(cli::effective_dataflow(cfg, cfg.df, net).block_size == 64);
}

TEST_CASE("ranges") {
  CHECK(cli::parse_range("4") == std::vector<std::uint64_t>{4});
  CHECK(cli::parse_range("1,2,8") == std::vector<std::uint64_t>{1, 2, 8});
  CHECK(cli::parse_range("2:5") == std::vector<std::uint64_t>{2, 3, 4, 5});
  CHECK_THROWS_AS(cli::parse_range("5:2"), ConfigError);
  CHECK_THROWS_AS(cli::parse_range("x"), ConfigError);
}

TEST_CASE("sweep rows equal individual runs") {
  testing::TempDir dir;
  const std::string ini = (dir / "exp.ini").string();
  testing::write_text(ini,
                      "[experiment]\nsynthetic_nodes = 50\nsynthetic_edges = 200\nfeature_dim = 8\n"
                      "network = graphsage\nhidden_dim = 8\nbaseline = base\noutput = sweep.csv\n"
                      "[dataflow.conv]\nmode = conventional\n"
                      "[dataflow.b4]\nmode = blocked\nblock_size = 4\n"
                      "[hardware.base]\n"
                      "[hardware.fast]\ndram.bytes_per_cycle = 512\n");
  const Result sweep = invoke({"sweep", ini});
  INFO(sweep.err);
  REQUIRE(sweep.code == 0);
  CHECK(sweep.out == slurp(dir / "sweep.csv"));
  std::istringstream rows(sweep.out);
  std::string line;
  std::getline(rows, line);
  std::size_t n = 0;
  while (std::getline(rows, line)) {
    ++n;
    std::istringstream fields(line);
    std::string df, hw, cycles, speedup;
    std::getline(fields, df, ',');
    std::getline(fields, hw, ',');
    std::getline(fields, cycles, ',');
    std::getline(fields, speedup, ',');
    if (hw == "base") CHECK(speedup == "1.0000");
    std::vector<std::string> args{"run", "--synthetic-nodes", "50", "--synthetic-edges", "200",
                                  "--feature-dim", "8", "--network", "graphsage",
                                  "--hidden-dim", "8", "--out", (dir / (df + hw)).string()};
    if (df == "conv") {
      args.insert(args.end(), {"--dataflow", "conventional"});
    } else {
      args.insert(args.end(), {"--block-size", "4"});
    }
    std::string cfg;
    if (hw == "fast") {
      cfg = (dir / "fast.ini").string();
      testing::write_text(cfg, "[dram]\nbytes_per_cycle = 512\n");
      args.insert(args.end(), {"--config", cfg});
    }
    const Result single = invoke(args);
    REQUIRE(single.code == 0);
    CHECK(value_of(single.out, "total_cycles") == cycles);
  }
  CHECK(n == 4);
}

TEST_CASE("experiments without variants are rejected") {
  testing::TempDir dir;
  const std::string ini = (dir / "exp.ini").string();
  testing::write_text(ini, "[experiment]\nsynthetic_nodes = 10\n[hardware.base]\n");
  const Result r = invoke({"sweep", ini});
  CHECK(r.code == cli::kUsageError);
  CHECK_THROWS_AS(cli::parse_experiment("[experiment]\n[dataflow.a]\n[hardware.b]\nx.y = 1\n"),
                  ConfigError);
}

TEST_CASE("costtable evaluates both orders") {
  const Result r = invoke({"costtable", "--s", "4", "--i", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\nsrc,4,1,,,13,13,") != std::string::npos);
  CHECK(r.out.find("\ndst,4,1,,,13,4,") != std::string::npos);
  const Result blocked = invoke({"costtable", "--s", "2", "--num-nodes", "1000",
                                 "--resident-bytes", "65536", "--feature-dim", "512",
                                 "--block-sizes", "64"});
  REQUIRE(blocked.code == 0);
  CHECK(blocked.out.find("\ndst,8,1,512,64,") != std::string::npos);
  CHECK(invoke({"costtable", "--block-sizes", "8"}).code == cli::kUsageError);
}

TEST_CASE("generate, prepare and shards") {
  testing::TempDir dir;
  const Result gen = invoke({"generate", "--num-nodes", "20", "--num-edges", "50",
                             "--feature-dim", "3", "--graph", (dir / "g.txt").string(),
                             "--features", (dir / "h.bin").string()});
  REQUIRE(gen.code == 0);
  CHECK(std::filesystem::file_size(dir / "h.bin") == 20 * 3 * 4);
  CHECK(load_graph(dir / "g.txt", 20).num_edges() == 50);

  testing::write_text(dir / "raw.txt", "0 1\n1 0\n2 2\n0 1\n");
  const Result prep = invoke({"prepare", "--input", (dir / "raw.txt").string(), "--num-nodes",
                              "3", "--output", (dir / "p.txt").string(), "--symmetrize"});
  REQUIRE(prep.code == 0);
  CHECK(load_graph(dir / "p.txt", 3).num_edges() == 2);

  const Result sh = invoke({"shards", "--graph", (dir / "p.txt").string(), "--num-nodes", "3",
                            "--nodes-per-block", "2"});
  REQUIRE(sh.code == 0);
  CHECK_FALSE(sh.out.empty());

  const Result run = invoke({"run", "--graph", (dir / "g.txt").string(), "--features",
                             (dir / "h.bin").string(), "--num-nodes", "20", "--feature-dim", "3",
                             "--out", (dir / "r").string()});
  CHECK(run.code == 0);
}
