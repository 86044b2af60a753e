// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "jtous/model.hpp"

namespace jtous {

/// Per-user latency decomposition plus the frame's normalized weighted
/// latency. Communication latency is the transmit slot's end offset, queue
/// wait is the processing time of all earlier-queued tasks.
struct LatencyBreakdown {
    std::vector<double> comm_ms;        // L_{i,c}
    std::vector<double> queue_ms;       // L_{i,q}
    std::vector<double> total_ms;       // L_i
    std::vector<char> deadline_miss;    // d_i, 1 when L_i + t_p exceeds t_d strictly
    double normalized_weighted = 0.0;   // drop-aware, in [0, 1] for sane instances
};

struct DropMetrics {
    double expected_dropped_weight = 0.0;  // E[N_D]
    double expected_drop_ratio = 0.0;      // E[D] = E[N_D] / sum of weights
};

enum class LatencyAveraging { completed_only, all_enqueued };

enum class DropCause : std::uint8_t { none, unassigned, jammed, deadline };

/// Outcome of one realized frame: which tasks survived, compacted queue
/// positions, realized latencies and the weighted drop ratio. Mean latency is
/// absent when no task qualifies under the averaging mode.
struct RealizedMetrics {
    std::vector<DropCause> cause;
    std::vector<int> queue_position;    // after jam-dropped tasks vacate
    std::vector<double> latency_ms;     // comm + compacted wait, survivors only
    double weighted_drop_ratio = 0.0;
    std::optional<double> mean_latency_ms;
    int completed = 0;
    int dropped = 0;
};

LatencyBreakdown latency_breakdown(const Schedule& schedule, const QueueView& queue,
                                   std::span<const Task> tasks, const FrameConfig& config);

/// Expected weighted dropped-task count and ratio. `deadline_miss` carries
/// the nominal (jamming-free) d_i flags from latency_breakdown; survival of
/// an assigned on-time task is weighted by 1 - P at its slot.
DropMetrics expected_drop_ratio(const QueueView& queue, std::span<const Task> tasks,
                                const JammingProfile& jamming,
                                std::span<const char> deadline_miss);

/// The scalar scheduling objective: lambda * E[D] + (1 - lambda) * normalized
/// latency. Self-contained; recomputes both sub-metrics.
double jto_us_objective(const Schedule& schedule, std::span<const Task> tasks,
                        const JammingProfile& jamming, const FrameConfig& config);

/// Fast path used by solvers: same computation as jto_us_objective on a raw
/// assignment vector, no intermediate structures.
double evaluate_objective(std::span<const int> assignment, std::span<const Task> tasks,
                          const JammingProfile& jamming, const FrameConfig& config);

/// Monte Carlo counterpart of the expected metrics. A task transmitted in a
/// jammed slot is dropped and vacates its queue position; survivors are
/// re-ranked by slot order and deadline flags recomputed on the compacted
/// queue. Deadline-missing survivors stay in the queue (they consume server
/// time) but count as dropped and never as completed.
RealizedMetrics realized_metrics(const Schedule& schedule, std::span<const Task> tasks,
                                 const JammingProfile& jamming, const FrameConfig& config,
                                 LatencyAveraging averaging = LatencyAveraging::completed_only);

}  // namespace jtous
