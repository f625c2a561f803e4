#include "gnnerator/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "gnnerator/errors.hpp"

namespace gnnerator {
namespace {

void counters(std::ostream& out, const char* engine, const EngineCounters& c) {
  out << engine << ".busy_cycles = " << c.busy << '\n'
      << engine << ".stall_cycles = " << c.stall << '\n'
      << engine << ".dependency_stall_cycles = " << c.dependency_stall << '\n'
      << engine << ".idle_cycles = " << c.idle << '\n';
}

void streams(std::ostream& out, const char* prefix, const StreamBytes& b) {
  for (std::size_t s = 0; s < kNumStreams; ++s) {
    const char* name = to_string(static_cast<Stream>(s));
    out << prefix << ".read." << name << " = " << b.read[s] << '\n';
    out << prefix << ".write." << name << " = " << b.write[s] << '\n';
  }
  out << prefix << ".read.total = " << b.total_read() << '\n';
  out << prefix << ".write.total = " << b.total_write() << '\n';
}

std::string cycle_field(Cycle c) { return c == kNever ? "" : std::to_string(c); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed: " + path.string());
}

}  // namespace

std::string summary_text(const SimReport& r) {
  std::ostringstream out;
  out << "total_cycles = " << r.total_cycles << '\n';
  counters(out, "graph", r.graph);
  counters(out, "dense", r.dense);
  out << "dram.bytes_per_cycle = " << r.dram_bytes_per_cycle << '\n'
      << "dram.busy_cycles = " << r.dram_busy_cycles << '\n'
      << "dram.peak_bytes_per_cycle = " << r.dram_peak_bytes_per_cycle << '\n';
  streams(out, "dram", r.dram_bytes);
  streams(out, "requested", r.requested_bytes);
  out << "shard.src_set_loads = " << r.counts.src_set_loads << '\n'
      << "shard.partial_reloads = " << r.counts.partial_reloads << '\n'
      << "shard.partial_stores = " << r.counts.partial_stores << '\n'
      << "output.rows = " << r.output.rows() << '\n'
      << "output.cols = " << r.output.cols() << '\n'
      << "output.hash = " << std::hex << std::setw(16) << std::setfill('0')
      << content_hash(r.output) << std::dec << '\n';
  return out.str();
}

std::string layers_csv(const SimReport& r) {
  std::ostringstream out;
  out << "layer,stage_order,aggregate_dim,block_size,passes,nodes_per_block,grid_side,order,"
         "start_cycle,cycles,src_set_loads,partial_reloads,partial_stores,graph_busy,"
         "graph_stall,graph_dependency_stall,graph_idle,dense_busy,dense_stall,"
         "dense_dependency_stall,dense_idle\n";
  for (const LayerSummary& l : r.layers) {
    out << l.index << ',' << to_string(l.stage_order) << ',' << l.aggregate_dim << ','
        << l.block_size << ',' << l.passes << ',' << l.nodes_per_block << ',' << l.grid_side
        << ',' << to_string(l.order) << ',' << l.start_cycle << ',' << l.cycles << ','
        << l.counts.src_set_loads << ',' << l.counts.partial_reloads << ','
        << l.counts.partial_stores << ',' << l.graph.busy << ',' << l.graph.stall << ','
        << l.graph.dependency_stall << ',' << l.graph.idle << ',' << l.dense.busy << ','
        << l.dense.stall << ',' << l.dense.dependency_stall << ',' << l.dense.idle << '\n';
  }
  return out.str();
}

std::string shard_trace_csv(const SimReport& r) {
  std::ostringstream out;
  out << "layer,pass,step,src_block,dst_block,edges,fetch_start,fetch_done,compute_start,"
         "compute_done,retired,compute_cycles,edge_bytes,feature_bytes,partial_read_bytes,"
         "write_bytes\n";
  for (const ShardTrace& t : r.shard_traces) {
    out << t.layer << ',' << t.pass << ',' << t.step << ',' << t.coord.src_block << ','
        << t.coord.dst_block << ',' << t.edges << ',' << cycle_field(t.timing.fetch_start) << ','
        << cycle_field(t.timing.fetch_done) << ',' << cycle_field(t.timing.compute_start) << ','
        << cycle_field(t.timing.compute_done) << ',' << cycle_field(t.timing.retired) << ','
        << t.timing.compute_cycles << ',' << t.edge_bytes << ',' << t.feature_bytes << ','
        << t.partial_read_bytes << ',' << t.write_bytes << '\n';
  }
  return out.str();
}

std::string dense_trace_csv(const SimReport& r) {
  std::ostringstream out;
  out << "layer,kind,pass,block,M,K,N,accumulate,tiles,start,done,compute_cycles,input_bytes,"
         "weight_bytes,partial_bytes,output_bytes\n";
  for (const DenseJobTrace& t : r.dense_traces) {
    out << t.task.layer << ',' << to_string(t.task.kind) << ',' << t.task.pass << ','
        << t.task.block << ',' << t.task.job.M << ',' << t.task.job.K << ',' << t.task.job.N
        << ',' << (t.task.job.accumulate ? 1 : 0) << ',' << t.tiles << ','
        << cycle_field(t.start) << ',' << cycle_field(t.done) << ',' << t.compute_cycles << ','
        << t.input_bytes << ',' << t.weight_bytes << ',' << t.partial_bytes << ','
        << t.output_bytes << '\n';
  }
  return out.str();
}

void write_report(const SimReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "summary.txt", summary_text(report));
  write_file(dir / "layers.csv", layers_csv(report));
  write_file(dir / "shards.csv", shard_trace_csv(report));
  write_file(dir / "dense_jobs.csv", dense_trace_csv(report));
}

}  // namespace gnnerator
