// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "jtous/experiment.hpp"
#include "jtous/harness.hpp"
#include "jtous/jammer.hpp"
#include "jtous/metrics.hpp"
#include "jtous/model.hpp"
#include "jtous/solvers.hpp"

namespace py = pybind11;
using namespace jtous;

PYBIND11_MODULE(_core, m) {
    m.doc() = "jammed-uplink task offloading and user scheduling simulator";

    py::class_<Task>(m, "Task")
        .def(py::init<>())
        .def(py::init([](int id, double processing_time_ms, double deadline_ms, double weight,
                         std::optional<double> cycles) {
                 Task t;
                 t.id = id;
                 t.processing_time_ms = processing_time_ms;
                 t.deadline_ms = deadline_ms;
                 t.weight = weight;
                 t.cycles = cycles;
                 return t;
             }),
             py::arg("id"), py::arg("processing_time_ms"), py::arg("deadline_ms"),
             py::arg("weight") = 1.0, py::arg("cycles") = std::nullopt)
        .def_readwrite("id", &Task::id)
        .def_readwrite("cycles", &Task::cycles)
        .def_readwrite("processing_time_ms", &Task::processing_time_ms)
        .def_readwrite("deadline_ms", &Task::deadline_ms)
        .def_readwrite("weight", &Task::weight);

    py::class_<FrameConfig>(m, "FrameConfig")
        .def(py::init<>())
        .def(py::init([](int slots_per_frame, double frame_duration_ms, int active_users,
                         double server_speed_cps, double latency_weight) {
                 return FrameConfig{slots_per_frame, frame_duration_ms, active_users,
                                    server_speed_cps, latency_weight};
             }),
             py::arg("slots_per_frame"), py::arg("frame_duration_ms"), py::arg("active_users"),
             py::arg("server_speed_cps") = 1e9, py::arg("latency_weight") = 0.5)
        .def_readwrite("slots_per_frame", &FrameConfig::slots_per_frame)
        .def_readwrite("frame_duration_ms", &FrameConfig::frame_duration_ms)
        .def_readwrite("active_users", &FrameConfig::active_users)
        .def_readwrite("server_speed_cps", &FrameConfig::server_speed_cps)
        .def_readwrite("latency_weight", &FrameConfig::latency_weight)
        .def("slot_duration_ms", &FrameConfig::slot_duration_ms);

    py::class_<Schedule>(m, "Schedule")
        .def(py::init<>())
        .def(py::init([](std::vector<int> assignment) {
                 Schedule s;
                 s.assignment = std::move(assignment);
                 return s;
             }),
             py::arg("assignment"))
        .def_readwrite("assignment", &Schedule::assignment)
        .def("slots", &Schedule::slots);

    py::class_<QueueView>(m, "QueueView")
        .def_readonly("slot_of", &QueueView::slot_of)
        .def_readonly("queue_position", &QueueView::queue_position)
        .def_readonly("queue_length", &QueueView::queue_length);

    py::class_<JammingProfile>(m, "JammingProfile")
        .def(py::init<>())
        .def_static("uniform", &JammingProfile::uniform, py::arg("users"), py::arg("slots"),
                    py::arg("p"))
        .def_readwrite("users", &JammingProfile::users)
        .def_readwrite("slots", &JammingProfile::slots)
        .def_readwrite("probabilities", &JammingProfile::probabilities)
        .def_readwrite("realization", &JammingProfile::realization)
        .def("prob", &JammingProfile::prob, py::arg("user"), py::arg("slot"))
        .def("has_realization", &JammingProfile::has_realization);

    py::class_<ValidationResult>(m, "ValidationResult")
        .def_readonly("violations", &ValidationResult::violations)
        .def("ok", &ValidationResult::ok);

    m.def("validate_schedule", &validate_schedule, py::arg("schedule"), py::arg("config"));
    m.def("derive_queue", &derive_queue, py::arg("schedule"), py::arg("config"));
    m.def(
        "validate_tasks",
        [](const std::vector<Task>& tasks, const FrameConfig& config) {
            return validate_tasks(tasks, config);
        },
        py::arg("tasks"), py::arg("config"));

    py::class_<LatencyBreakdown>(m, "LatencyBreakdown")
        .def_readonly("comm_ms", &LatencyBreakdown::comm_ms)
        .def_readonly("queue_ms", &LatencyBreakdown::queue_ms)
        .def_readonly("total_ms", &LatencyBreakdown::total_ms)
        .def_property_readonly("deadline_miss",
                               [](const LatencyBreakdown& b) {
                                   std::vector<bool> flags(b.deadline_miss.begin(),
                                                           b.deadline_miss.end());
                                   return flags;
                               })
        .def_readonly("normalized_weighted", &LatencyBreakdown::normalized_weighted);

    py::class_<DropMetrics>(m, "DropMetrics")
        .def_readonly("expected_dropped_weight", &DropMetrics::expected_dropped_weight)
        .def_readonly("expected_drop_ratio", &DropMetrics::expected_drop_ratio);

    py::enum_<LatencyAveraging>(m, "LatencyAveraging")
        .value("completed_only", LatencyAveraging::completed_only)
        .value("all_enqueued", LatencyAveraging::all_enqueued);

    py::enum_<DropCause>(m, "DropCause")
        .value("none", DropCause::none)
        .value("unassigned", DropCause::unassigned)
        .value("jammed", DropCause::jammed)
        .value("deadline", DropCause::deadline);

    py::class_<RealizedMetrics>(m, "RealizedMetrics")
        .def_readonly("cause", &RealizedMetrics::cause)
        .def_readonly("queue_position", &RealizedMetrics::queue_position)
        .def_readonly("latency_ms", &RealizedMetrics::latency_ms)
        .def_readonly("weighted_drop_ratio", &RealizedMetrics::weighted_drop_ratio)
        .def_readonly("mean_latency_ms", &RealizedMetrics::mean_latency_ms)
        .def_readonly("completed", &RealizedMetrics::completed)
        .def_readonly("dropped", &RealizedMetrics::dropped);

    m.def(
        "latency_breakdown",
        [](const Schedule& schedule, const QueueView& queue, const std::vector<Task>& tasks,
           const FrameConfig& config) {
            return latency_breakdown(schedule, queue, tasks, config);
        },
        py::arg("schedule"), py::arg("queue"), py::arg("tasks"), py::arg("config"));
    m.def(
        "expected_drop_ratio",
        [](const QueueView& queue, const std::vector<Task>& tasks,
           const JammingProfile& jamming, const std::vector<bool>& deadline_miss) {
            std::vector<char> flags(deadline_miss.begin(), deadline_miss.end());
            return expected_drop_ratio(queue, tasks, jamming, flags);
        },
        py::arg("queue"), py::arg("tasks"), py::arg("jamming"), py::arg("deadline_miss"));
    m.def(
        "jto_us_objective",
        [](const Schedule& schedule, const std::vector<Task>& tasks,
           const JammingProfile& jamming, const FrameConfig& config) {
            return jto_us_objective(schedule, tasks, jamming, config);
        },
        py::arg("schedule"), py::arg("tasks"), py::arg("jamming"), py::arg("config"));
    m.def(
        "realized_metrics",
        [](const Schedule& schedule, const std::vector<Task>& tasks,
           const JammingProfile& jamming, const FrameConfig& config,
           LatencyAveraging averaging) {
            return realized_metrics(schedule, tasks, jamming, config, averaging);
        },
        py::arg("schedule"), py::arg("tasks"), py::arg("jamming"), py::arg("config"),
        py::arg("averaging") = LatencyAveraging::completed_only);

    py::enum_<JammerMode>(m, "JammerMode")
        .value("uniform_iid", JammerMode::uniform_iid)
        .value("per_user_iid", JammerMode::per_user_iid)
        .value("two_state_markov", JammerMode::two_state_markov);

    py::class_<MarkovParams>(m, "MarkovParams")
        .def(py::init([](double p_on_to_off, double p_off_to_on) {
                 return MarkovParams{p_on_to_off, p_off_to_on};
             }),
             py::arg("p_on_to_off"), py::arg("p_off_to_on"))
        .def_readwrite("p_on_to_off", &MarkovParams::p_on_to_off)
        .def_readwrite("p_off_to_on", &MarkovParams::p_off_to_on)
        .def("stationary_on", &MarkovParams::stationary_on);

    py::class_<JammerSpec>(m, "JammerSpec")
        .def(py::init<>())
        .def_readwrite("mode", &JammerSpec::mode)
        .def_readwrite("jam_probability", &JammerSpec::jam_probability)
        .def_readwrite("per_user_probabilities", &JammerSpec::per_user_probabilities)
        .def_readwrite("markov", &JammerSpec::markov)
        .def_readwrite("rng_seed", &JammerSpec::rng_seed);

    m.def("build_profile", &build_profile, py::arg("spec"), py::arg("config"));
    m.def(
        "realize",
        [](const JammerSpec& spec, const FrameConfig& config, std::uint64_t seed) {
            return realize(spec, config, seed);
        },
        py::arg("spec"), py::arg("config"), py::arg("seed"));
    m.def(
        "realize_profile",
        [](const JammingProfile& profile, std::uint64_t seed) { return realize(profile, seed); },
        py::arg("profile"), py::arg("seed"));
    m.def("jammer_at_level", &jammer_at_level, py::arg("spec"), py::arg("level"));

    py::class_<GaConfig>(m, "GaConfig")
        .def(py::init<>())
        .def_readwrite("population_size", &GaConfig::population_size)
        .def_readwrite("max_generations", &GaConfig::max_generations)
        .def_readwrite("crossover_fraction", &GaConfig::crossover_fraction)
        .def_readwrite("function_tolerance", &GaConfig::function_tolerance)
        .def_readwrite("constraint_tolerance", &GaConfig::constraint_tolerance)
        .def_readwrite("max_stall_generations", &GaConfig::max_stall_generations)
        .def_readwrite("rng_seed", &GaConfig::rng_seed)
        .def_readwrite("elite_fraction", &GaConfig::elite_fraction)
        .def_readwrite("tournament_size", &GaConfig::tournament_size)
        .def_readwrite("mutation_probability", &GaConfig::mutation_probability);

    py::enum_<ConvergedReason>(m, "ConvergedReason")
        .value("max_generations", ConvergedReason::max_generations)
        .value("stall", ConvergedReason::stall)
        .value("tolerance", ConvergedReason::tolerance)
        .value("direct", ConvergedReason::direct);

    py::class_<SolverResult>(m, "SolverResult")
        .def_readonly("schedule", &SolverResult::schedule)
        .def_readonly("objective_value", &SolverResult::objective_value)
        .def_readonly("generations_run", &SolverResult::generations_run)
        .def_readonly("evaluations", &SolverResult::evaluations)
        .def_readonly("converged_reason", &SolverResult::converged_reason);

    m.def(
        "solve_ga",
        [](const std::vector<Task>& tasks, const JammingProfile& jamming,
           const FrameConfig& config, const GaConfig& ga) {
            return solve_ga(tasks, jamming, config, ga);
        },
        py::arg("tasks"), py::arg("jamming"), py::arg("config"), py::arg("ga"));
    m.def(
        "solve_ga_nj",
        [](const std::vector<Task>& tasks, const JammingProfile& jamming,
           const FrameConfig& config, const GaConfig& ga) {
            return solve_ga_nj(tasks, jamming, config, ga);
        },
        py::arg("tasks"), py::arg("jamming"), py::arg("config"), py::arg("ga"));
    m.def(
        "solve_sjf",
        [](const std::vector<Task>& tasks, const FrameConfig& config) {
            return solve_sjf(tasks, config);
        },
        py::arg("tasks"), py::arg("config"));
    m.def(
        "solve_sdf",
        [](const std::vector<Task>& tasks, const FrameConfig& config) {
            return solve_sdf(tasks, config);
        },
        py::arg("tasks"), py::arg("config"));
    m.def(
        "brute_force_oracle",
        [](const std::vector<Task>& tasks, const JammingProfile& jamming,
           const FrameConfig& config) {
            return brute_force_oracle(tasks, jamming, config);
        },
        py::arg("tasks"), py::arg("jamming"), py::arg("config"));

    py::enum_<SolverId>(m, "SolverId")
        .value("ga", SolverId::ga)
        .value("ga_nj", SolverId::ga_nj)
        .value("sjf", SolverId::sjf)
        .value("sdf", SolverId::sdf);

    py::enum_<WeightScheme>(m, "WeightScheme")
        .value("uniform_one", WeightScheme::uniform_one)
        .value("two_priority", WeightScheme::two_priority);

    py::enum_<ForecastFidelity>(m, "ForecastFidelity")
        .value("perfect", ForecastFidelity::perfect)
        .value("marginal", ForecastFidelity::marginal);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("processing_time_range_ms", &ScenarioConfig::processing_time_range_ms)
        .def_readwrite("deadline_range_ms", &ScenarioConfig::deadline_range_ms)
        .def_readwrite("active_users", &ScenarioConfig::active_users)
        .def_readwrite("slots_per_frame", &ScenarioConfig::slots_per_frame)
        .def_readwrite("frame_duration_ms", &ScenarioConfig::frame_duration_ms)
        .def_readwrite("server_speed_cps", &ScenarioConfig::server_speed_cps)
        .def_readwrite("n_sim", &ScenarioConfig::n_sim)
        .def_readwrite("lambda_weight", &ScenarioConfig::lambda)
        .def_readwrite("weight_scheme", &ScenarioConfig::weight_scheme)
        .def_readwrite("weight_low", &ScenarioConfig::weight_low)
        .def_readwrite("weight_high", &ScenarioConfig::weight_high)
        .def_readwrite("p_high", &ScenarioConfig::p_high)
        .def_readwrite("sweep", &ScenarioConfig::sweep)
        .def_readwrite("solvers", &ScenarioConfig::solvers)
        .def_readwrite("rng_seed", &ScenarioConfig::rng_seed)
        .def_readwrite("forecast", &ScenarioConfig::forecast)
        .def_readwrite("latency_averaging", &ScenarioConfig::latency_averaging)
        .def_readwrite("activity_probability", &ScenarioConfig::activity_probability)
        .def_readwrite("deadline_bins", &ScenarioConfig::deadline_bins)
        .def_readwrite("processing_bins", &ScenarioConfig::processing_bins)
        .def_readwrite("threads", &ScenarioConfig::threads)
        .def_readwrite("keep_runs", &ScenarioConfig::keep_runs);

    py::class_<SweepCell>(m, "SweepCell")
        .def_readonly("mean_drop_ratio", &SweepCell::mean_drop_ratio)
        .def_readonly("mean_latency_ms", &SweepCell::mean_latency_ms)
        .def_readonly("nominal_expected_drop", &SweepCell::nominal_expected_drop)
        .def_readonly("n_sim", &SweepCell::n_sim)
        .def_readonly("seed", &SweepCell::seed);

    py::class_<BinStat>(m, "BinStat")
        .def_readonly("low", &BinStat::low)
        .def_readonly("high", &BinStat::high)
        .def_readonly("count", &BinStat::count)
        .def_readonly("dropped", &BinStat::dropped)
        .def("drop_fraction", &BinStat::drop_fraction);

    py::class_<DropDistribution>(m, "DropDistribution")
        .def_readonly("by_weight", &DropDistribution::by_weight)
        .def_readonly("by_deadline", &DropDistribution::by_deadline)
        .def_readonly("by_processing", &DropDistribution::by_processing);

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("solver_index", &RunRecord::solver_index)
        .def_readonly("point_index", &RunRecord::point_index)
        .def_readonly("replicate", &RunRecord::replicate)
        .def_readonly("seed", &RunRecord::seed)
        .def_readonly("drop_ratio", &RunRecord::drop_ratio)
        .def_readonly("mean_latency_ms", &RunRecord::mean_latency_ms)
        .def_readonly("nominal_expected_drop", &RunRecord::nominal_expected_drop);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("sweep", &MetricsReport::sweep)
        .def_readonly("solvers", &MetricsReport::solvers)
        .def_readonly("cells", &MetricsReport::cells)
        .def_readonly("distributions", &MetricsReport::distributions)
        .def_readonly("runs", &MetricsReport::runs)
        .def_readonly("master_seed", &MetricsReport::master_seed)
        .def_readonly("config_hash", &MetricsReport::config_hash);

    m.def("generate_frame", &generate_frame, py::arg("scenario"), py::arg("frame_seed"));
    m.def(
        "run_sweep",
        [](const ScenarioConfig& scenario, const GaConfig& ga, const JammerSpec& jammer) {
            return run_sweep(scenario, ga, jammer);
        },
        py::arg("scenario"), py::arg("ga"), py::arg("jammer") = JammerSpec{},
        py::call_guard<py::gil_scoped_release>());
    m.def("solver_name", &solver_name, py::arg("id"));

    m.def(
        "run_experiment",
        [](const std::filesystem::path& config_path) {
            const WrittenArtifacts artifacts = run_experiment(config_path);
            return artifacts.files;
        },
        py::arg("config_path"), py::call_guard<py::gil_scoped_release>());
}
