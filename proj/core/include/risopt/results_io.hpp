#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "risopt/experiment.hpp"

namespace risopt {

// Version string embedded in sidecars, e.g. "v0.1.0-g1a2b3c4".
std::string_view version_string();

std::string spec_to_json(const ExperimentSpec& spec);

// Fields absent from the document keep their value in `defaults`. Throws
// ConfigError on malformed input.
ExperimentSpec spec_from_json(std::string_view text, const ExperimentSpec& defaults);

ExperimentSpec load_spec_file(const std::filesystem::path& path, const ExperimentSpec& defaults);

struct EmittedFiles {
  std::filesystem::path summary_csv;
  std::filesystem::path snapshots_csv;
  std::filesystem::path sidecar_json;
};

// Writes <dir>/<stem>.csv (scheme, sweep_value, mean_rate_bps_hz, stderr,
// n_snapshots), <dir>/<stem>_snapshots.csv (one row per snapshot) and
// <dir>/<stem>.json (spec, seed, version). Output is byte-deterministic.
EmittedFiles emit_results(const ExperimentResult& result, const std::filesystem::path& dir,
                          std::string_view stem = "results");

std::string summary_csv(const ExperimentResult& result);
std::string snapshots_csv(const ExperimentResult& result);
std::string sidecar_json(const ExperimentResult& result);

std::string ssca_trace_csv(const std::vector<SscaTraceRow>& trace);
std::string smm_trace_csv(const std::vector<SmmTraceRow>& trace);

// Throws IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal form that round-trips the double.
std::string format_double(double value);

}  // namespace risopt
