#pragma once

// Output plumbing for the command-line tool: atomic file writes, run
// manifests, range-flag parsing, and the CSV/JSON report writers.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "regimes/framework.hpp"
#include "regimes/term_dataset.hpp"

namespace regimes::cli {

using json = nlohmann::ordered_json;

// Writes content to path via a temp file + rename so readers never observe a
// partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// FNV-1a 64-bit over the file bytes, hex encoded; stable input fingerprints
// for the manifest.
std::string hash_file(const std::filesystem::path& path);

// Range flag syntax: "lo:hi[:x]" with x = integer step for k ranges and
// x = log-spaced count for alpha ranges; bare values and comma lists also
// accepted.
std::vector<int> parse_int_range(const std::string& spec);
std::vector<double> parse_log_range(const std::string& spec, int default_count = 20);

struct ManifestInfo {
  std::string command;                  // e.g. "fit"
  std::vector<std::string> argv;        // full command line
  std::uint64_t seed = 0;
  json config;                          // flag snapshot
  std::vector<std::string> input_paths; // hashed into the manifest
};

// Writes <dir>/manifest.json. Every output directory carries exactly one.
void write_manifest(const std::filesystem::path& dir, const ManifestInfo& info);

// fit outputs -------------------------------------------------------------

// Grid CSV: corner cell "k", first row the alpha values ("-" for selectors
// without alpha), first column the k values, empty cells for failed points.
std::string grid_csv(const SweepResult& result, bool has_alpha);

// Per-observation labels + masks (+ coords when present) for spatial maps.
std::string labels_csv(const TermDataset& ds, const std::vector<int>& labels,
                       const HypothesisArray& masks, const ScoreReport& report);

json summary_json(const SweepResult& result, const TermDataset& ds);

// score outputs -----------------------------------------------------------

std::string score_report_csv(const TermDataset& ds, const HypothesisArray& masks,
                             const ScoreReport& report);

// bench outputs -----------------------------------------------------------

std::string timing_csv(const std::vector<BenchRow>& rows, const std::string& clusterer,
                       const std::string& selector);

std::string format_double(double v);  // %.17g

}  // namespace regimes::cli
