// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jtous/jammer.hpp"
#include "jtous/metrics.hpp"
#include "jtous/model.hpp"
#include "jtous/solvers.hpp"

namespace jtous {

enum class SolverId { ga, ga_nj, sjf, sdf };

std::string solver_name(SolverId id);
std::optional<SolverId> solver_from_name(const std::string& name);

enum class WeightScheme { uniform_one, two_priority };

/// What the jamming-aware solvers are told about the jammer at each
/// replicate. `perfect` hands them the realized on/off pattern as a 0/1
/// probability matrix (an idealized estimator of the jammer's schedule);
/// `marginal` hands them only the per-slot marginal probabilities.
enum class ForecastFidelity { perfect, marginal };

struct ScenarioConfig {
    std::array<double, 2> processing_time_range_ms{2.0, 10.0};
    std::array<double, 2> deadline_range_ms{5.0, 50.0};
    int active_users = 10;
    int slots_per_frame = 30;
    double frame_duration_ms = 10.0;
    double server_speed_cps = 1e9;
    int n_sim = 300;
    double lambda = 0.5;

    WeightScheme weight_scheme = WeightScheme::uniform_one;
    double weight_low = 0.1;
    double weight_high = 0.9;
    double p_high = 0.5;

    std::vector<double> sweep;
    std::vector<SolverId> solvers;
    std::uint64_t rng_seed = 1;

    ForecastFidelity forecast = ForecastFidelity::perfect;
    LatencyAveraging latency_averaging = LatencyAveraging::completed_only;
    double activity_probability = 1.0;  // < 1 enables Bernoulli user activity
    int deadline_bins = 5;
    int processing_bins = 5;
    int threads = 0;   // 0 = hardware concurrency
    bool keep_runs = false;  // retain per-replicate rows in the report

    FrameConfig frame_config(int users) const {
        return FrameConfig{slots_per_frame, frame_duration_ms, users, server_speed_cps, lambda};
    }
};

/// Aggregates for one (solver, sweep point) cell. Latency is averaged over
/// qualifying tasks pooled across replicates and is absent when none
/// qualified anywhere.
struct SweepCell {
    double mean_drop_ratio = 0.0;
    std::optional<double> mean_latency_ms;
    double nominal_expected_drop = 0.0;
    int n_sim = 0;
    std::uint64_t seed = 0;
};

struct BinStat {
    double low = 0.0;
    double high = 0.0;
    long long count = 0;
    long long dropped = 0;

    double drop_fraction() const { return static_cast<double>(dropped) / count; }
};

/// Unweighted drop counts binned by task property, one set of bins per axis.
struct DropDistribution {
    std::vector<BinStat> by_weight;
    std::vector<BinStat> by_deadline;
    std::vector<BinStat> by_processing;
};

/// One replicate's outcome for one solver, kept only when requested.
struct RunRecord {
    std::size_t solver_index = 0;
    std::size_t point_index = 0;
    int replicate = 0;
    std::uint64_t seed = 0;
    double drop_ratio = 0.0;
    std::optional<double> mean_latency_ms;
    double nominal_expected_drop = 0.0;
};

struct MetricsReport {
    std::vector<double> sweep;
    std::vector<SolverId> solvers;
    std::vector<std::vector<SweepCell>> cells;          // [solver][sweep point]
    std::vector<DropDistribution> distributions;        // [solver], pooled over sweep
    std::vector<RunRecord> runs;                        // empty unless keep_runs
    std::uint64_t master_seed = 0;
    std::uint64_t config_hash = 0;
};

/// Draws one frame's tasks: processing times and deadlines uniform over the
/// configured ranges, weights per scheme, independent across users and
/// frames. Deterministic given the frame seed.
std::vector<Task> generate_frame(const ScenarioConfig& scenario, std::uint64_t frame_seed);

/// Runs the full experiment grid: for every sweep point and replicate,
/// realize the jammer, solve with each requested solver, evaluate realized
/// metrics, and aggregate. All solvers at a given (point, replicate) consume
/// identical task lists and jam realizations; re-running with the same
/// configuration reproduces the report exactly, regardless of thread count.
MetricsReport run_sweep(const ScenarioConfig& scenario, const GaConfig& ga,
                        const JammerSpec& jammer);
MetricsReport run_sweep(const ScenarioConfig& scenario, const GaConfig& ga);

/// Bins with no tasks are dropped from reports; this strips them.
std::vector<BinStat> nonempty_bins(const std::vector<BinStat>& bins);

std::uint64_t scenario_hash(const ScenarioConfig& scenario, const GaConfig& ga,
                            const JammerSpec& jammer);

}  // namespace jtous
