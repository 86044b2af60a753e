// SPDX-License-Identifier: Apache-2.0
#include "jtous/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace jtous {

namespace {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int line_of_offset(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": parse error at line " +
                          std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
    }
}

const json& require(const json& node, const char* field, const std::string& context) {
    auto it = node.find(field);
    if (it == node.end()) {
        throw ConfigError("missing field '" + context + field + "'");
    }
    return *it;
}

template <typename T>
T get_field(const json& node, const char* field, const std::string& context) {
    try {
        return require(node, field, context).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + context + field + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json& node, const char* field, T fallback) {
    auto it = node.find(field);
    if (it == node.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("field '") + field + "' has the wrong type");
    }
}

ScenarioConfig parse_scenario(const json& node) {
    ScenarioConfig s;
    const std::string ctx = "scenario.";
    s.active_users = get_field<int>(node, "active_users", ctx);
    s.slots_per_frame = get_field<int>(node, "slots_per_frame", ctx);
    s.frame_duration_ms = get_field<double>(node, "frame_duration_ms", ctx);
    const auto tp = get_field<std::vector<double>>(node, "processing_time_range_ms", ctx);
    const auto td = get_field<std::vector<double>>(node, "deadline_range_ms", ctx);
    if (tp.size() != 2 || td.size() != 2) {
        throw ConfigError("task property ranges must be [min, max] pairs");
    }
    s.processing_time_range_ms = {tp[0], tp[1]};
    s.deadline_range_ms = {td[0], td[1]};
    s.n_sim = get_field<int>(node, "n_sim", ctx);
    s.lambda = get_field<double>(node, "lambda", ctx);
    s.rng_seed = get_field<std::uint64_t>(node, "rng_seed", ctx);
    s.server_speed_cps = get_or<double>(node, "server_speed_cps", s.server_speed_cps);

    const json& scheme = require(node, "weight_scheme", ctx);
    const std::string kind = get_field<std::string>(scheme, "kind", ctx + "weight_scheme.");
    if (kind == "uniform_one") {
        s.weight_scheme = WeightScheme::uniform_one;
    } else if (kind == "two_priority") {
        s.weight_scheme = WeightScheme::two_priority;
        s.weight_low = get_field<double>(scheme, "w_low", ctx + "weight_scheme.");
        s.weight_high = get_field<double>(scheme, "w_high", ctx + "weight_scheme.");
        s.p_high = get_field<double>(scheme, "p_high", ctx + "weight_scheme.");
    } else {
        throw ConfigError("unknown weight scheme '" + kind + "'");
    }

    s.sweep = get_field<std::vector<double>>(node, "sweep", ctx);
    for (const std::string& name : get_field<std::vector<std::string>>(node, "solvers", ctx)) {
        const auto id = solver_from_name(name);
        if (!id) throw ConfigError("unknown solver '" + name + "'");
        s.solvers.push_back(*id);
    }

    const std::string forecast = get_or<std::string>(node, "forecast", "perfect");
    if (forecast == "perfect") {
        s.forecast = ForecastFidelity::perfect;
    } else if (forecast == "marginal") {
        s.forecast = ForecastFidelity::marginal;
    } else {
        throw ConfigError("forecast must be 'perfect' or 'marginal'");
    }
    const std::string averaging =
        get_or<std::string>(node, "latency_averaging", "completed_only");
    if (averaging == "completed_only") {
        s.latency_averaging = LatencyAveraging::completed_only;
    } else if (averaging == "all_enqueued") {
        s.latency_averaging = LatencyAveraging::all_enqueued;
    } else {
        throw ConfigError("latency_averaging must be 'completed_only' or 'all_enqueued'");
    }
    s.activity_probability = get_or<double>(node, "activity_probability", 1.0);
    s.deadline_bins = get_or<int>(node, "deadline_bins", 5);
    s.processing_bins = get_or<int>(node, "processing_bins", 5);
    s.threads = get_or<int>(node, "threads", 0);
    return s;
}

GaConfig parse_ga(const json& node) {
    GaConfig ga;
    ga.population_size = get_or<int>(node, "population_size", ga.population_size);
    ga.max_generations = get_or<int>(node, "max_generations", ga.max_generations);
    ga.crossover_fraction = get_or<double>(node, "crossover_fraction", ga.crossover_fraction);
    ga.function_tolerance = get_or<double>(node, "function_tolerance", ga.function_tolerance);
    ga.constraint_tolerance =
        get_or<double>(node, "constraint_tolerance", ga.constraint_tolerance);
    ga.max_stall_generations =
        get_or<int>(node, "max_stall_generations", ga.max_stall_generations);
    ga.rng_seed = get_or<std::uint64_t>(node, "rng_seed", ga.rng_seed);
    ga.elite_fraction = get_or<double>(node, "elite_fraction", ga.elite_fraction);
    ga.tournament_size = get_or<int>(node, "tournament_size", ga.tournament_size);
    ga.mutation_probability =
        get_or<double>(node, "mutation_probability", ga.mutation_probability);
    return ga;
}

JammerSpec parse_jammer(const json& node) {
    JammerSpec spec;
    const std::string mode = get_field<std::string>(node, "mode", "jammer.");
    if (mode == "uniform_iid") {
        spec.mode = JammerMode::uniform_iid;
        spec.jam_probability = get_or<double>(node, "jam_probability", 0.0);
    } else if (mode == "per_user_iid") {
        spec.mode = JammerMode::per_user_iid;
        spec.per_user_probabilities =
            get_field<std::vector<double>>(node, "per_user_probabilities", "jammer.");
    } else if (mode == "two_state_markov") {
        spec.mode = JammerMode::two_state_markov;
        MarkovParams markov;
        markov.p_on_to_off = get_field<double>(node, "p_on_to_off", "jammer.");
        markov.p_off_to_on = get_field<double>(node, "p_off_to_on", "jammer.");
        spec.markov = markov;
    } else {
        throw ConfigError("unknown jammer mode '" + mode + "'");
    }
    spec.rng_seed = get_or<std::uint64_t>(node, "rng_seed", 0);
    return spec;
}

EmitKind emit_from_name(const std::string& name) {
    if (name == "sweep_csv") return EmitKind::sweep_csv;
    if (name == "distribution_csv") return EmitKind::distribution_csv;
    if (name == "summary_table") return EmitKind::summary_table;
    if (name == "per_run_log") return EmitKind::per_run_log;
    throw ConfigError("unknown emit kind '" + name + "'");
}

std::string emit_name(EmitKind kind) {
    switch (kind) {
        case EmitKind::sweep_csv: return "sweep_csv";
        case EmitKind::distribution_csv: return "distribution_csv";
        case EmitKind::summary_table: return "summary_table";
        case EmitKind::per_run_log: return "per_run_log";
    }
    return "unknown";
}

const char* axis_name(int axis) {
    switch (axis) {
        case 0: return "weight";
        case 1: return "deadline";
        default: return "processing_time";
    }
}

}  // namespace

ExperimentFile parse_experiment_text(const std::string& text) {
    const json root = parse_json(text, "experiment config");
    ExperimentFile experiment;
    experiment.version = get_field<int>(root, "version", "");
    if (experiment.version != 1) {
        throw ConfigError("unsupported config version " + std::to_string(experiment.version));
    }
    experiment.scenario = parse_scenario(require(root, "scenario", ""));
    experiment.ga = parse_ga(get_or<json>(root, "ga", json::object()));
    experiment.jammer = parse_jammer(get_or<json>(
        root, "jammer", json{{"mode", "uniform_iid"}, {"jam_probability", 0.0}}));
    experiment.output_dir = get_field<std::string>(root, "output_dir", "");
    for (const std::string& name :
         get_or<std::vector<std::string>>(root, "emit",
                                          {"sweep_csv", "distribution_csv", "summary_table"})) {
        experiment.emit.insert(emit_from_name(name));
    }
    return experiment;
}

ExperimentFile parse_experiment(const std::filesystem::path& path) {
    return parse_experiment_text(read_file(path));
}

std::string serialize_experiment(const ExperimentFile& experiment) {
    const ScenarioConfig& s = experiment.scenario;
    json scheme;
    if (s.weight_scheme == WeightScheme::uniform_one) {
        scheme = json{{"kind", "uniform_one"}};
    } else {
        scheme = json{{"kind", "two_priority"},
                      {"w_low", s.weight_low},
                      {"w_high", s.weight_high},
                      {"p_high", s.p_high}};
    }
    std::vector<std::string> solver_names;
    for (SolverId id : s.solvers) solver_names.push_back(solver_name(id));
    std::vector<std::string> emit_names;
    for (EmitKind kind : experiment.emit) emit_names.push_back(emit_name(kind));

    json jammer;
    switch (experiment.jammer.mode) {
        case JammerMode::uniform_iid:
            jammer = json{{"mode", "uniform_iid"},
                          {"jam_probability", experiment.jammer.jam_probability}};
            break;
        case JammerMode::per_user_iid:
            jammer = json{{"mode", "per_user_iid"},
                          {"per_user_probabilities", experiment.jammer.per_user_probabilities}};
            break;
        case JammerMode::two_state_markov:
            jammer = json{{"mode", "two_state_markov"},
                          {"p_on_to_off", experiment.jammer.markov->p_on_to_off},
                          {"p_off_to_on", experiment.jammer.markov->p_off_to_on}};
            break;
    }
    jammer["rng_seed"] = experiment.jammer.rng_seed;

    const json root = {
        {"version", experiment.version},
        {"scenario",
         {{"active_users", s.active_users},
          {"slots_per_frame", s.slots_per_frame},
          {"frame_duration_ms", s.frame_duration_ms},
          {"processing_time_range_ms", s.processing_time_range_ms},
          {"deadline_range_ms", s.deadline_range_ms},
          {"n_sim", s.n_sim},
          {"lambda", s.lambda},
          {"server_speed_cps", s.server_speed_cps},
          {"weight_scheme", scheme},
          {"sweep", s.sweep},
          {"solvers", solver_names},
          {"rng_seed", s.rng_seed},
          {"forecast", s.forecast == ForecastFidelity::perfect ? "perfect" : "marginal"},
          {"latency_averaging", s.latency_averaging == LatencyAveraging::completed_only
                                    ? "completed_only"
                                    : "all_enqueued"},
          {"activity_probability", s.activity_probability},
          {"deadline_bins", s.deadline_bins},
          {"processing_bins", s.processing_bins},
          {"threads", s.threads}}},
        {"ga",
         {{"population_size", experiment.ga.population_size},
          {"max_generations", experiment.ga.max_generations},
          {"crossover_fraction", experiment.ga.crossover_fraction},
          {"function_tolerance", experiment.ga.function_tolerance},
          {"constraint_tolerance", experiment.ga.constraint_tolerance},
          {"max_stall_generations", experiment.ga.max_stall_generations},
          {"rng_seed", experiment.ga.rng_seed},
          {"elite_fraction", experiment.ga.elite_fraction},
          {"tournament_size", experiment.ga.tournament_size},
          {"mutation_probability", experiment.ga.mutation_probability}}},
        {"jammer", jammer},
        {"output_dir", experiment.output_dir.string()},
        {"emit", emit_names},
    };
    return root.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, const MetricsReport& report) {
    out << "solver,jam_prob,mean_drop_ratio,mean_latency_ms,nominal_expected_drop,n_sim,seed\n";
    for (std::size_t s = 0; s < report.solvers.size(); ++s) {
        for (std::size_t p = 0; p < report.sweep.size(); ++p) {
            const SweepCell& cell = report.cells[s][p];
            out << solver_name(report.solvers[s]) << ',' << format_double(report.sweep[p])
                << ',' << format_double(cell.mean_drop_ratio) << ',';
            if (cell.mean_latency_ms) out << format_double(*cell.mean_latency_ms);
            out << ',' << format_double(cell.nominal_expected_drop) << ',' << cell.n_sim << ','
                << cell.seed << '\n';
        }
    }
}

void write_distribution_csv(std::ostream& out, const MetricsReport& report) {
    out << "solver,axis,bin_low,bin_high,drop_fraction,count\n";
    for (std::size_t s = 0; s < report.solvers.size(); ++s) {
        const DropDistribution& dist = report.distributions[s];
        const std::vector<BinStat>* axes[3] = {&dist.by_weight, &dist.by_deadline,
                                               &dist.by_processing};
        for (int axis = 0; axis < 3; ++axis) {
            for (const BinStat& bin : nonempty_bins(*axes[axis])) {
                out << solver_name(report.solvers[s]) << ',' << axis_name(axis) << ','
                    << format_double(bin.low) << ',' << format_double(bin.high) << ','
                    << format_double(bin.drop_fraction()) << ',' << bin.count << '\n';
            }
        }
    }
}

static void write_run_log_csv(std::ostream& out, const MetricsReport& report) {
    out << "solver,jam_prob,replicate,seed,drop_ratio,mean_latency_ms,nominal_expected_drop\n";
    for (const RunRecord& run : report.runs) {
        out << solver_name(report.solvers[run.solver_index]) << ','
            << format_double(report.sweep[run.point_index]) << ',' << run.replicate << ','
            << run.seed << ',' << format_double(run.drop_ratio) << ',';
        if (run.mean_latency_ms) out << format_double(*run.mean_latency_ms);
        out << ',' << format_double(run.nominal_expected_drop) << '\n';
    }
}

void write_summary(std::ostream& out, const MetricsReport& report, bool with_timestamp) {
    const auto cell = [](double value) {
        char buffer[32];
        std::snprintf(buffer, sizeof(buffer), "%.4f", value);
        return std::string(buffer);
    };
    out << "experiment summary\n";
    out << "  config hash: " << std::hex << report.config_hash << std::dec << "\n";
    out << "  master seed: " << report.master_seed << "\n";
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        out << "  finished:    " << std::put_time(std::gmtime(&now), "%F %T UTC") << "\n";
    }
    out << "\n  mean realized drop ratio\n";
    out << "  " << std::setw(8) << "jam_prob";
    for (SolverId id : report.solvers) out << std::setw(12) << solver_name(id);
    out << '\n';
    for (std::size_t p = 0; p < report.sweep.size(); ++p) {
        out << "  " << std::setw(8) << format_double(report.sweep[p]);
        for (std::size_t s = 0; s < report.solvers.size(); ++s) {
            out << std::setw(12) << cell(report.cells[s][p].mean_drop_ratio);
        }
        out << '\n';
    }
    out << "\n  mean realized latency (ms; '-' when no task qualified)\n";
    out << "  " << std::setw(8) << "jam_prob";
    for (SolverId id : report.solvers) out << std::setw(12) << solver_name(id);
    out << '\n';
    for (std::size_t p = 0; p < report.sweep.size(); ++p) {
        out << "  " << std::setw(8) << format_double(report.sweep[p]);
        for (std::size_t s = 0; s < report.solvers.size(); ++s) {
            const auto& latency = report.cells[s][p].mean_latency_ms;
            out << std::setw(12) << (latency ? cell(*latency) : "-");
        }
        out << '\n';
    }
}

WrittenArtifacts run_experiment(const std::filesystem::path& config_path) {
    ExperimentFile experiment = parse_experiment(config_path);
    if (const char* override_dir = std::getenv("JTOUS_OUTPUT_DIR")) {
        experiment.output_dir = override_dir;
    }
    experiment.scenario.keep_runs = experiment.emit.count(EmitKind::per_run_log) > 0;

    std::filesystem::create_directories(experiment.output_dir);

    WrittenArtifacts artifacts;
    artifacts.report = run_sweep(experiment.scenario, experiment.ga, experiment.jammer);

    const auto write_to = [&](const char* name, auto writer) {
        const std::filesystem::path path = experiment.output_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        writer(out);
        artifacts.files.push_back(path);
    };
    if (experiment.emit.count(EmitKind::sweep_csv)) {
        write_to("sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, artifacts.report); });
    }
    if (experiment.emit.count(EmitKind::distribution_csv)) {
        write_to("distributions.csv",
                 [&](std::ostream& out) { write_distribution_csv(out, artifacts.report); });
    }
    if (experiment.emit.count(EmitKind::per_run_log)) {
        write_to("runs.csv",
                 [&](std::ostream& out) { write_run_log_csv(out, artifacts.report); });
    }
    if (experiment.emit.count(EmitKind::summary_table)) {
        write_to("summary.txt",
                 [&](std::ostream& out) { write_summary(out, artifacts.report, true); });
    }
    return artifacts;
}

namespace {

FrameConfig parse_frame(const json& node) {
    FrameConfig config;
    config.slots_per_frame = get_field<int>(node, "slots_per_frame", "frame.");
    config.frame_duration_ms = get_field<double>(node, "frame_duration_ms", "frame.");
    config.active_users = get_field<int>(node, "active_users", "frame.");
    config.server_speed_cps = get_or<double>(node, "server_speed_cps", 1e9);
    config.latency_weight = get_field<double>(node, "latency_weight", "frame.");
    return config;
}

std::vector<Task> parse_tasks(const json& node, const FrameConfig& config) {
    std::vector<Task> tasks;
    for (const json& entry : node) {
        Task task;
        task.id = get_field<int>(entry, "id", "tasks[].");
        task.processing_time_ms = get_field<double>(entry, "processing_time_ms", "tasks[].");
        task.deadline_ms = get_field<double>(entry, "deadline_ms", "tasks[].");
        task.weight = get_or<double>(entry, "weight", 1.0);
        if (entry.contains("cycles")) task.cycles = entry["cycles"].get<double>();
        tasks.push_back(task);
    }
    const ValidationResult check = validate_tasks(tasks, config);
    if (!check.ok()) throw ConfigError("invalid tasks: " + check.violations.front());
    return tasks;
}

JammingProfile parse_profile(const json& node, const FrameConfig& config) {
    JammingProfile profile;
    profile.users = config.active_users;
    profile.slots = config.slots_per_frame;
    const auto rows = get_field<std::vector<std::vector<double>>>(node, "probabilities",
                                                                  "jamming.");
    for (const auto& row : rows) {
        profile.probabilities.insert(profile.probabilities.end(), row.begin(), row.end());
    }
    if (node.contains("realization")) {
        const auto real = node["realization"].get<std::vector<std::vector<bool>>>();
        std::vector<std::uint8_t> flat;
        for (const auto& row : real) {
            for (bool cell : row) flat.push_back(cell ? 1 : 0);
        }
        profile.realization = std::move(flat);
    }
    profile.check_shape();
    return profile;
}

}  // namespace

int evaluate_single(const std::filesystem::path& schedule_path,
                    const std::filesystem::path& instance_path, bool as_json,
                    std::ostream& out, std::ostream& err) {
    const json instance_root = parse_json(read_file(instance_path), "instance file");
    const json schedule_root = parse_json(read_file(schedule_path), "schedule file");

    const FrameConfig config = parse_frame(require(instance_root, "frame", ""));
    const std::vector<Task> tasks = parse_tasks(require(instance_root, "tasks", ""), config);
    const JammingProfile jamming =
        parse_profile(require(instance_root, "jamming", ""), config);

    Schedule schedule;
    schedule.assignment = get_field<std::vector<int>>(schedule_root, "assignment", "");

    const ValidationResult validity = validate_schedule(schedule, config);
    if (!validity.ok()) {
        for (const std::string& violation : validity.violations) {
            err << "constraint violated: " << violation << '\n';
        }
        return 1;
    }

    const QueueView queue = derive_queue(schedule, config);
    const LatencyBreakdown latency = latency_breakdown(schedule, queue, tasks, config);
    const DropMetrics drops =
        expected_drop_ratio(queue, tasks, jamming, latency.deadline_miss);
    const double objective = jto_us_objective(schedule, tasks, jamming, config);

    if (as_json) {
        json users = json::array();
        for (int i = 0; i < config.active_users; ++i) {
            users.push_back({{"id", i + 1},
                             {"slot", queue.slot_of[i]},
                             {"queue_position", queue.queue_position[i]},
                             {"comm_latency_ms", latency.comm_ms[i]},
                             {"queue_wait_ms", latency.queue_ms[i]},
                             {"total_latency_ms", latency.total_ms[i]},
                             {"deadline_miss", latency.deadline_miss[i] != 0}});
        }
        const json doc = {{"users", users},
                          {"normalized_weighted_latency", latency.normalized_weighted},
                          {"expected_drop_ratio", drops.expected_drop_ratio},
                          {"expected_dropped_weight", drops.expected_dropped_weight},
                          {"objective", objective},
                          {"queue_length", queue.queue_length}};
        out << doc.dump(2) << '\n';
    } else {
        out << "user  slot  pos  comm_ms  wait_ms  total_ms  miss\n";
        for (int i = 0; i < config.active_users; ++i) {
            char line[128];
            std::snprintf(line, sizeof(line), "%4d  %4d  %3d  %7.3f  %7.3f  %8.3f  %4d\n",
                          i + 1, queue.slot_of[i], queue.queue_position[i],
                          latency.comm_ms[i], latency.queue_ms[i], latency.total_ms[i],
                          static_cast<int>(latency.deadline_miss[i]));
            out << line;
        }
        out << "normalized weighted latency: " << format_double(latency.normalized_weighted)
            << '\n';
        out << "expected drop ratio:         " << format_double(drops.expected_drop_ratio)
            << '\n';
        out << "objective:                   " << format_double(objective) << '\n';
    }
    return 0;
}

}  // namespace jtous
