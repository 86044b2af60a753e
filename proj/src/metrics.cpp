// SPDX-License-Identifier: Apache-2.0
#include "jtous/metrics.hpp"

#include <stdexcept>

namespace jtous {

namespace {

double latency_normalizer(std::span<const Task> tasks, const FrameConfig& config) {
    double total_processing = 0.0;
    for (const Task& task : tasks) total_processing += task.processing_time_ms;
    return config.active_users * config.slots_per_frame * config.slot_duration_ms() +
           total_processing;
}

void check_task_count(std::span<const Task> tasks, const FrameConfig& config) {
    if (static_cast<int>(tasks.size()) != config.active_users) {
        throw std::invalid_argument("task list length does not match active user count");
    }
}

}  // namespace

LatencyBreakdown latency_breakdown(const Schedule& schedule, const QueueView& queue,
                                   std::span<const Task> tasks, const FrameConfig& config) {
    check_task_count(tasks, config);
    if (schedule.slots() != config.slots_per_frame) {
        throw std::invalid_argument("schedule/config slot count mismatch");
    }
    if (queue.slot_of.size() != tasks.size()) {
        throw std::invalid_argument("queue view does not match task list");
    }

    const int n = config.active_users;
    const double ts = config.slot_duration_ms();
    LatencyBreakdown out;
    out.comm_ms.assign(n, 0.0);
    out.queue_ms.assign(n, 0.0);
    out.total_ms.assign(n, 0.0);
    out.deadline_miss.assign(n, 0);

    // Walk slots in order; the running sum of processing times of already
    // enqueued tasks is exactly the queue wait of the next one.
    double wait = 0.0;
    double weighted_latency = 0.0;
    for (int j = 1; j <= config.slots_per_frame; ++j) {
        const int user = schedule.assignment[j - 1];
        if (user == kEmptySlot) continue;
        const Task& task = tasks[user - 1];
        const double comm = j * ts;
        const double total = comm + wait;
        out.comm_ms[user - 1] = comm;
        out.queue_ms[user - 1] = wait;
        out.total_ms[user - 1] = total;
        const bool miss = total + task.processing_time_ms > task.deadline_ms;
        out.deadline_miss[user - 1] = miss ? 1 : 0;
        if (!miss) weighted_latency += task.weight * total;
        wait += task.processing_time_ms;
    }

    out.normalized_weighted = weighted_latency / latency_normalizer(tasks, config);
    return out;
}

DropMetrics expected_drop_ratio(const QueueView& queue, std::span<const Task> tasks,
                                const JammingProfile& jamming,
                                std::span<const char> deadline_miss) {
    if (queue.slot_of.size() != tasks.size() || deadline_miss.size() != tasks.size()) {
        throw std::invalid_argument("queue/tasks/deadline flag sizes disagree");
    }
    if (jamming.users != static_cast<int>(tasks.size())) {
        throw std::invalid_argument("jamming profile does not match the task list");
    }
    double total_weight = 0.0;
    double survivor_weight = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        total_weight += tasks[i].weight;
        const int slot = queue.slot_of[i];
        if (slot == 0 || deadline_miss[i]) continue;
        survivor_weight +=
            tasks[i].weight * (1.0 - jamming.prob(static_cast<int>(i) + 1, slot));
    }
    if (total_weight <= 0.0) {
        throw std::domain_error("task weights sum to zero; drop ratio undefined");
    }
    DropMetrics out;
    out.expected_dropped_weight = total_weight - survivor_weight;
    out.expected_drop_ratio = out.expected_dropped_weight / total_weight;
    return out;
}

double evaluate_objective(std::span<const int> assignment, std::span<const Task> tasks,
                          const JammingProfile& jamming, const FrameConfig& config) {
    const double ts = config.slot_duration_ms();
    const double lambda = config.latency_weight;
    const int slots = config.slots_per_frame;

    double total_weight = 0.0;
    for (const Task& task : tasks) total_weight += task.weight;
    if (total_weight <= 0.0) {
        throw std::domain_error("task weights sum to zero; drop ratio undefined");
    }

    double wait = 0.0;
    double weighted_latency = 0.0;
    double survivor_weight = 0.0;
    for (int j = 1; j <= slots; ++j) {
        const int user = assignment[j - 1];
        if (user == kEmptySlot) continue;
        const Task& task = tasks[user - 1];
        const double total = j * ts + wait;
        if (!(total + task.processing_time_ms > task.deadline_ms)) {
            weighted_latency += task.weight * total;
            survivor_weight += task.weight * (1.0 - jamming.prob(user, j));
        }
        wait += task.processing_time_ms;
    }

    const double drop = (total_weight - survivor_weight) / total_weight;
    const double latency = weighted_latency / latency_normalizer(tasks, config);
    return lambda * drop + (1.0 - lambda) * latency;
}

double jto_us_objective(const Schedule& schedule, std::span<const Task> tasks,
                        const JammingProfile& jamming, const FrameConfig& config) {
    check_task_count(tasks, config);
    if (schedule.slots() != config.slots_per_frame) {
        throw std::invalid_argument("schedule/config slot count mismatch");
    }
    if (jamming.users != config.active_users || jamming.slots != config.slots_per_frame) {
        throw std::invalid_argument("jamming profile dimensions do not match frame config");
    }
    const double lambda = config.latency_weight;
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("latency weight must lie in [0, 1]");
    }
    return evaluate_objective(schedule.assignment, tasks, jamming, config);
}

RealizedMetrics realized_metrics(const Schedule& schedule, std::span<const Task> tasks,
                                 const JammingProfile& jamming, const FrameConfig& config,
                                 LatencyAveraging averaging) {
    check_task_count(tasks, config);
    if (!jamming.has_realization()) {
        throw std::invalid_argument("realized_metrics needs a jamming realization");
    }
    jamming.check_shape();

    const int n = config.active_users;
    const double ts = config.slot_duration_ms();
    RealizedMetrics out;
    out.cause.assign(n, DropCause::unassigned);
    out.queue_position.assign(n, 0);
    out.latency_ms.assign(n, 0.0);

    // Jam-dropped tasks never reach the server, so survivors close ranks:
    // their queue positions and waits are computed over unjammed tasks only.
    double wait = 0.0;
    int position = 0;
    double latency_sum = 0.0;
    int latency_count = 0;
    for (int j = 1; j <= config.slots_per_frame; ++j) {
        const int user = schedule.assignment[j - 1];
        if (user == kEmptySlot) continue;
        if (jamming.jammed(user, j)) {
            out.cause[user - 1] = DropCause::jammed;
            continue;
        }
        const Task& task = tasks[user - 1];
        const double total = j * ts + wait;
        out.queue_position[user - 1] = ++position;
        out.latency_ms[user - 1] = total;
        wait += task.processing_time_ms;
        const bool miss = total + task.processing_time_ms > task.deadline_ms;
        out.cause[user - 1] = miss ? DropCause::deadline : DropCause::none;
        if (averaging == LatencyAveraging::all_enqueued || !miss) {
            latency_sum += total;
            ++latency_count;
        }
        if (!miss) ++out.completed;
    }

    double total_weight = 0.0;
    double dropped_weight = 0.0;
    for (int i = 0; i < n; ++i) {
        total_weight += tasks[i].weight;
        if (out.cause[i] != DropCause::none) {
            dropped_weight += tasks[i].weight;
            ++out.dropped;
        }
    }
    if (total_weight <= 0.0) {
        throw std::domain_error("task weights sum to zero; drop ratio undefined");
    }
    out.weighted_drop_ratio = dropped_weight / total_weight;
    if (latency_count > 0) out.mean_latency_ms = latency_sum / latency_count;
    return out;
}

}  // namespace jtous
