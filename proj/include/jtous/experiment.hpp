// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "jtous/harness.hpp"

namespace jtous {

enum class EmitKind { sweep_csv, distribution_csv, summary_table, per_run_log };

/// Parsed experiment configuration file.
struct ExperimentFile {
    int version = 1;
    ScenarioConfig scenario;
    GaConfig ga;
    JammerSpec jammer;
    std::filesystem::path output_dir;
    std::set<EmitKind> emit;
};

/// Raised on malformed configuration input; carries the offending field so
/// the CLI can point at it.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

ExperimentFile parse_experiment(const std::filesystem::path& path);
ExperimentFile parse_experiment_text(const std::string& text);
std::string serialize_experiment(const ExperimentFile& experiment);

struct WrittenArtifacts {
    std::vector<std::filesystem::path> files;
    MetricsReport report;
};

/// Runs the configured experiment and writes the requested artifacts.
/// The JTOUS_OUTPUT_DIR environment variable overrides the configured
/// output directory. CSV bytes depend only on the configuration; the
/// summary (the only artifact with a timestamp) is written last.
WrittenArtifacts run_experiment(const std::filesystem::path& config_path);

void write_sweep_csv(std::ostream& out, const MetricsReport& report);
void write_distribution_csv(std::ostream& out, const MetricsReport& report);
void write_summary(std::ostream& out, const MetricsReport& report, bool with_timestamp);

/// Single-instance inspection: prints the per-user latency decomposition,
/// deadline flags and the aggregate metrics for one schedule/instance pair.
/// Returns nonzero when the schedule violates the scheduling constraints.
int evaluate_single(const std::filesystem::path& schedule_path,
                    const std::filesystem::path& instance_path, bool as_json,
                    std::ostream& out, std::ostream& err);

}  // namespace jtous
