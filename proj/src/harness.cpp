// SPDX-License-Identifier: Apache-2.0
#include "jtous/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "jtous/rng.hpp"

namespace jtous {

namespace {

// Seed stream tags. Frames are shared across sweep points so that curves are
// paired; jam patterns and solver seeds vary per point but not per solver.
enum : std::uint64_t { kFrameStream = 1, kJamStream = 2, kSolverStream = 3 };

struct RepOutcome {
    // Indexed by solver position in scenario.solvers.
    std::vector<double> drop_ratio;
    std::vector<double> nominal_drop;
    std::vector<double> latency_sum;
    std::vector<long long> latency_count;
    // Unweighted per-task drop flags for the distribution bins.
    std::vector<std::vector<std::uint8_t>> dropped;  // [solver][task]
    std::vector<Task> tasks;
    std::string error;
    std::uint64_t failing_seed = 0;
};

int bin_index(double value, double low, double high, int bins) {
    if (bins <= 1) return 0;
    const double width = (high - low) / bins;
    int idx = static_cast<int>((value - low) / width);
    return std::clamp(idx, 0, bins - 1);
}

void check_scenario(const ScenarioConfig& scenario) {
    if (scenario.n_sim < 1) throw std::invalid_argument("n_sim must be >= 1");
    if (scenario.active_users < 1) throw std::invalid_argument("active_users must be >= 1");
    if (scenario.sweep.empty()) throw std::invalid_argument("sweep has no points");
    if (scenario.solvers.empty()) throw std::invalid_argument("no solvers requested");
    for (double p : scenario.sweep) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("sweep values must lie in [0, 1]");
        }
    }
    if (!(scenario.processing_time_range_ms[0] <= scenario.processing_time_range_ms[1]) ||
        !(scenario.deadline_range_ms[0] <= scenario.deadline_range_ms[1])) {
        throw std::invalid_argument("task property ranges must be ordered");
    }
    if (!(scenario.lambda >= 0.0 && scenario.lambda <= 1.0)) {
        throw std::invalid_argument("lambda must lie in [0, 1]");
    }
}

SolverResult dispatch_solver(SolverId id, std::span<const Task> tasks,
                             const JammingProfile& forecast, const FrameConfig& config,
                             const GaConfig& ga) {
    switch (id) {
        case SolverId::ga: return solve_ga(tasks, forecast, config, ga);
        case SolverId::ga_nj: return solve_ga_nj(tasks, forecast, config, ga);
        case SolverId::sjf: return solve_sjf(tasks, config);
        case SolverId::sdf: return solve_sdf(tasks, config);
    }
    throw std::logic_error("unknown solver id");
}

// One (sweep point, replicate) cell: realize the jammer once, then run every
// solver against identical inputs.
RepOutcome run_replicate(const ScenarioConfig& scenario, const GaConfig& ga,
                         const JammerSpec& jammer, double level, std::size_t point,
                         int rep) {
    RepOutcome out;
    const std::size_t n_solvers = scenario.solvers.size();
    out.drop_ratio.assign(n_solvers, 0.0);
    out.nominal_drop.assign(n_solvers, 0.0);
    out.latency_sum.assign(n_solvers, 0.0);
    out.latency_count.assign(n_solvers, 0);
    out.dropped.assign(n_solvers, {});

    const std::uint64_t frame_seed = mix_seed(scenario.rng_seed, kFrameStream, rep);
    const std::uint64_t jam_seed = mix_seed(scenario.rng_seed, kJamStream, point, rep);
    const std::uint64_t solver_seed = mix_seed(scenario.rng_seed, kSolverStream, point, rep);
    out.failing_seed = solver_seed;

    try {
        out.tasks = generate_frame(scenario, frame_seed);
        const int users = static_cast<int>(out.tasks.size());
        const FrameConfig config = scenario.frame_config(users);

        const JammerSpec leveled = jammer_at_level(jammer, level);
        JammingProfile marginals = build_profile(leveled, config);
        const std::vector<std::uint8_t> pattern = realize(leveled, config, jam_seed);

        // The profile handed to jamming-aware solvers. Under a perfect
        // forecast the realized pattern doubles as a 0/1 probability matrix.
        JammingProfile forecast = marginals;
        if (scenario.forecast == ForecastFidelity::perfect) {
            forecast.probabilities.assign(pattern.begin(), pattern.end());
        }
        forecast.realization = pattern;

        GaConfig rep_ga = ga;
        rep_ga.rng_seed = solver_seed;

        for (std::size_t s = 0; s < n_solvers; ++s) {
            const SolverResult result =
                dispatch_solver(scenario.solvers[s], out.tasks, forecast, config, rep_ga);
            const RealizedMetrics realized = realized_metrics(
                result.schedule, out.tasks, forecast, config, scenario.latency_averaging);

            const QueueView queue = derive_queue(result.schedule, config);
            const LatencyBreakdown nominal =
                latency_breakdown(result.schedule, queue, out.tasks, config);
            const DropMetrics expected =
                expected_drop_ratio(queue, out.tasks, forecast, nominal.deadline_miss);

            out.drop_ratio[s] = realized.weighted_drop_ratio;
            out.nominal_drop[s] = expected.expected_drop_ratio;
            for (int i = 0; i < users; ++i) {
                const DropCause cause = realized.cause[i];
                const bool qualifies =
                    cause == DropCause::none ||
                    (scenario.latency_averaging == LatencyAveraging::all_enqueued &&
                     cause == DropCause::deadline);
                if (qualifies) {
                    out.latency_sum[s] += realized.latency_ms[i];
                    ++out.latency_count[s];
                }
            }
            out.dropped[s].assign(users, 0);
            for (int i = 0; i < users; ++i) {
                out.dropped[s][i] = realized.cause[i] != DropCause::none ? 1 : 0;
            }
        }
    } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "replicate " << rep << " at sweep point " << level << " failed (seed "
            << out.failing_seed << "): " << e.what();
        out.error = msg.str();
    }
    return out;
}

}  // namespace

std::string solver_name(SolverId id) {
    switch (id) {
        case SolverId::ga: return "ga";
        case SolverId::ga_nj: return "ga_nj";
        case SolverId::sjf: return "sjf";
        case SolverId::sdf: return "sdf";
    }
    return "unknown";
}

std::optional<SolverId> solver_from_name(const std::string& name) {
    if (name == "ga") return SolverId::ga;
    if (name == "ga_nj") return SolverId::ga_nj;
    if (name == "sjf") return SolverId::sjf;
    if (name == "sdf") return SolverId::sdf;
    return std::nullopt;
}

std::vector<Task> generate_frame(const ScenarioConfig& scenario, std::uint64_t frame_seed) {
    std::mt19937_64 rng(splitmix64(frame_seed));
    std::uniform_real_distribution<double> tp(scenario.processing_time_range_ms[0],
                                              scenario.processing_time_range_ms[1]);
    std::uniform_real_distribution<double> td(scenario.deadline_range_ms[0],
                                              scenario.deadline_range_ms[1]);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int users = scenario.active_users;
    if (scenario.activity_probability < 1.0) {
        int active = 0;
        for (int i = 0; i < scenario.active_users; ++i) {
            if (unit(rng) < scenario.activity_probability) ++active;
        }
        users = std::max(1, active);
    }

    std::vector<Task> tasks(users);
    for (int i = 0; i < users; ++i) {
        Task& task = tasks[i];
        task.id = i + 1;
        task.processing_time_ms = tp(rng);
        task.deadline_ms = td(rng);
        switch (scenario.weight_scheme) {
            case WeightScheme::uniform_one:
                task.weight = 1.0;
                break;
            case WeightScheme::two_priority:
                task.weight = unit(rng) < scenario.p_high ? scenario.weight_high
                                                          : scenario.weight_low;
                break;
        }
        task.cycles = task.processing_time_ms * 1e-3 * scenario.server_speed_cps;
    }
    return tasks;
}

MetricsReport run_sweep(const ScenarioConfig& scenario, const GaConfig& ga,
                        const JammerSpec& jammer) {
    check_scenario(scenario);

    MetricsReport report;
    report.sweep = scenario.sweep;
    report.solvers = scenario.solvers;
    report.master_seed = scenario.rng_seed;
    report.config_hash = scenario_hash(scenario, ga, jammer);

    const std::size_t n_solvers = scenario.solvers.size();
    const std::size_t n_points = scenario.sweep.size();
    report.cells.assign(n_solvers, std::vector<SweepCell>(n_points));

    report.distributions.assign(n_solvers, {});
    const auto make_bins = [](double low, double high, int count) {
        std::vector<BinStat> bins(count);
        const double width = (high - low) / count;
        for (int b = 0; b < count; ++b) {
            bins[b].low = low + b * width;
            bins[b].high = (b + 1 == count) ? high : low + (b + 1) * width;
        }
        return bins;
    };
    std::vector<double> weight_classes;
    if (scenario.weight_scheme == WeightScheme::two_priority) {
        weight_classes = {scenario.weight_low, scenario.weight_high};
        std::sort(weight_classes.begin(), weight_classes.end());
    } else {
        weight_classes = {1.0};
    }
    for (auto& dist : report.distributions) {
        for (double w : weight_classes) dist.by_weight.push_back(BinStat{w, w, 0, 0});
        dist.by_deadline = make_bins(scenario.deadline_range_ms[0],
                                     scenario.deadline_range_ms[1], scenario.deadline_bins);
        dist.by_processing =
            make_bins(scenario.processing_time_range_ms[0],
                      scenario.processing_time_range_ms[1], scenario.processing_bins);
    }

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int threads =
        scenario.threads > 0 ? scenario.threads : std::max(1, hw);

    for (std::size_t point = 0; point < n_points; ++point) {
        const double level = scenario.sweep[point];
        std::vector<RepOutcome> outcomes(scenario.n_sim);

        if (threads <= 1) {
            for (int rep = 0; rep < scenario.n_sim; ++rep) {
                outcomes[rep] = run_replicate(scenario, ga, jammer, level, point, rep);
            }
        } else {
            std::atomic<int> next{0};
            auto worker = [&]() {
                while (true) {
                    const int rep = next.fetch_add(1);
                    if (rep >= scenario.n_sim) break;
                    outcomes[rep] = run_replicate(scenario, ga, jammer, level, point, rep);
                }
            };
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        // Deterministic ordered reduction: replicate index order, so thread
        // scheduling can never change the aggregate bytes.
        for (int rep = 0; rep < scenario.n_sim; ++rep) {
            const RepOutcome& outcome = outcomes[rep];
            if (!outcome.error.empty()) throw std::runtime_error(outcome.error);
            for (std::size_t s = 0; s < n_solvers; ++s) {
                SweepCell& cell = report.cells[s][point];
                cell.mean_drop_ratio += outcome.drop_ratio[s];
                cell.nominal_expected_drop += outcome.nominal_drop[s];
                cell.n_sim += 1;
                if (scenario.keep_runs) {
                    RunRecord run;
                    run.solver_index = s;
                    run.point_index = point;
                    run.replicate = rep;
                    run.seed = outcome.failing_seed;
                    run.drop_ratio = outcome.drop_ratio[s];
                    if (outcome.latency_count[s] > 0) {
                        run.mean_latency_ms = outcome.latency_sum[s] / outcome.latency_count[s];
                    }
                    run.nominal_expected_drop = outcome.nominal_drop[s];
                    report.runs.push_back(run);
                }

                DropDistribution& dist = report.distributions[s];
                for (std::size_t i = 0; i < outcome.tasks.size(); ++i) {
                    const Task& task = outcome.tasks[i];
                    const bool dropped = outcome.dropped[s][i] != 0;
                    for (BinStat& bin : dist.by_weight) {
                        if (task.weight == bin.low) {
                            ++bin.count;
                            if (dropped) ++bin.dropped;
                        }
                    }
                    BinStat& db = dist.by_deadline[bin_index(
                        task.deadline_ms, scenario.deadline_range_ms[0],
                        scenario.deadline_range_ms[1], scenario.deadline_bins)];
                    ++db.count;
                    if (dropped) ++db.dropped;
                    BinStat& pb = dist.by_processing[bin_index(
                        task.processing_time_ms, scenario.processing_time_range_ms[0],
                        scenario.processing_time_range_ms[1], scenario.processing_bins)];
                    ++pb.count;
                    if (dropped) ++pb.dropped;
                }
            }
        }

        for (std::size_t s = 0; s < n_solvers; ++s) {
            SweepCell& cell = report.cells[s][point];
            cell.mean_drop_ratio /= cell.n_sim;
            cell.nominal_expected_drop /= cell.n_sim;
            cell.seed = mix_seed(scenario.rng_seed, kSolverStream, point, 0);
            double latency_sum = 0.0;
            long long latency_count = 0;
            for (int rep = 0; rep < scenario.n_sim; ++rep) {
                latency_sum += outcomes[rep].latency_sum[s];
                latency_count += outcomes[rep].latency_count[s];
            }
            if (latency_count > 0) cell.mean_latency_ms = latency_sum / latency_count;
        }
    }
    return report;
}

MetricsReport run_sweep(const ScenarioConfig& scenario, const GaConfig& ga) {
    return run_sweep(scenario, ga, JammerSpec{});
}

std::vector<BinStat> nonempty_bins(const std::vector<BinStat>& bins) {
    std::vector<BinStat> out;
    for (const BinStat& bin : bins) {
        if (bin.count > 0) out.push_back(bin);
    }
    return out;
}

std::uint64_t scenario_hash(const ScenarioConfig& scenario, const GaConfig& ga,
                            const JammerSpec& jammer) {
    // FNV-1a over a canonical text rendering; collision resistance is not a
    // goal, change detection is.
    std::ostringstream text;
    text.precision(17);
    text << scenario.processing_time_range_ms[0] << ',' << scenario.processing_time_range_ms[1]
         << ',' << scenario.deadline_range_ms[0] << ',' << scenario.deadline_range_ms[1] << ','
         << scenario.active_users << ',' << scenario.slots_per_frame << ','
         << scenario.frame_duration_ms << ',' << scenario.server_speed_cps << ','
         << scenario.n_sim << ',' << scenario.lambda << ','
         << static_cast<int>(scenario.weight_scheme) << ',' << scenario.weight_low << ','
         << scenario.weight_high << ',' << scenario.p_high << ',' << scenario.rng_seed << ','
         << static_cast<int>(scenario.forecast) << ','
         << static_cast<int>(scenario.latency_averaging) << ','
         << scenario.activity_probability << ',' << scenario.deadline_bins << ','
         << scenario.processing_bins << ';';
    for (double p : scenario.sweep) text << p << ',';
    text << ';';
    for (SolverId s : scenario.solvers) text << solver_name(s) << ',';
    text << ';' << ga.population_size << ',' << ga.max_generations << ','
         << ga.crossover_fraction << ',' << ga.function_tolerance << ','
         << ga.constraint_tolerance << ',' << ga.max_stall_generations << ','
         << ga.elite_fraction << ',' << ga.tournament_size << ',' << ga.mutation_probability
         << ';' << static_cast<int>(jammer.mode) << ',' << jammer.jam_probability;
    if (jammer.markov) {
        text << ',' << jammer.markov->p_on_to_off << ',' << jammer.markov->p_off_to_on;
    }
    for (double p : jammer.per_user_probabilities) text << ',' << p;

    std::uint64_t hash = 1469598103934665603ULL;
    for (char c : text.str()) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    return hash;
}

}  // namespace jtous
