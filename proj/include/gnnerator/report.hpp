#pragma once

#include <filesystem>
#include <string>

#include "gnnerator/controller.hpp"

namespace gnnerator {

/// "key = value" lines; a pure function of the report.
std::string summary_text(const SimReport& report);
std::string layers_csv(const SimReport& report);
std::string shard_trace_csv(const SimReport& report);
std::string dense_trace_csv(const SimReport& report);

/// Writes summary.txt, layers.csv, shards.csv and dense_jobs.csv into `dir`
/// (created if missing).
void write_report(const SimReport& report, const std::filesystem::path& dir);

}  // namespace gnnerator
