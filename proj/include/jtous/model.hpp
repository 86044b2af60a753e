// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jtous {

/// Sentinel for an unoccupied mini-slot in a schedule's assignment vector.
inline constexpr int kEmptySlot = 0;

/// One user's offload job. Users (and therefore tasks) carry 1-based ids;
/// `cycles` is the raw cycle count, redundant with `processing_time_ms`
/// given the server speed and kept optional.
struct Task {
    int id = 0;
    std::optional<double> cycles;
    double processing_time_ms = 0.0;
    double deadline_ms = 0.0;
    double weight = 1.0;
};

/// Frame/mini-slot timing and capacity. The formulation is frame-local, so
/// no cross-frame state lives here.
struct FrameConfig {
    int slots_per_frame = 1;       // S
    double frame_duration_ms = 1;  // T_f
    int active_users = 1;          // N_a
    double server_speed_cps = 1e9; // C, cycles per second
    double latency_weight = 0.5;   // lambda, drop-vs-latency trade-off

    double slot_duration_ms() const { return frame_duration_ms / slots_per_frame; }
};

/// The decision variable: a slot -> user map of length S. Entry j holds the
/// 1-based id of the user transmitting in mini-slot j+1, or kEmptySlot.
/// Storing the assignment this way makes "at most one user per slot" hold by
/// construction.
struct Schedule {
    std::vector<int> assignment;

    int slots() const { return static_cast<int>(assignment.size()); }
};

/// Queue structure derived from a schedule: per-user assigned slot J (0 =
/// unassigned), per-user server queue position K (0 = not enqueued), and the
/// queue length N_q. Positions over enqueued users are exactly 1..N_q ordered
/// by slot index.
struct QueueView {
    std::vector<int> slot_of;
    std::vector<int> queue_position;
    int queue_length = 0;
};

/// Per-user, per-slot jamming probabilities, optionally with a realized
/// on/off pattern of identical shape. Row-major, users x slots.
struct JammingProfile {
    int users = 0;
    int slots = 0;
    std::vector<double> probabilities;
    std::optional<std::vector<std::uint8_t>> realization;

    static JammingProfile uniform(int users, int slots, double p);

    double prob(int user, int slot) const {  // 1-based indices
        return probabilities[static_cast<std::size_t>(user - 1) * slots + (slot - 1)];
    }
    bool jammed(int user, int slot) const {
        return (*realization)[static_cast<std::size_t>(user - 1) * slots + (slot - 1)] != 0;
    }
    bool has_realization() const { return realization.has_value(); }
    void check_shape() const;  // throws std::invalid_argument on bad dimensions
};

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks the scheduling constraints: ids in range, per-user uniqueness, at
/// most one user per slot and total assignments bounded by the active-user
/// count. Dimension mismatch between schedule and config is a structural
/// error (throws), not a constraint violation.
ValidationResult validate_schedule(const Schedule& schedule, const FrameConfig& config);

/// Derives slot_of, queue_position and queue_length for a valid schedule.
/// The queue position of an enqueued user is the number of assigned slots at
/// or before its own slot; unassigned users get 0.
QueueView derive_queue(const Schedule& schedule, const FrameConfig& config);

/// Task-list sanity: positive times, weights in (0, 1], ids matching 1..N_a,
/// and cycles/processing-time consistency against the server speed when
/// cycles is present (relative tolerance 1e-9).
ValidationResult validate_tasks(std::span<const Task> tasks, const FrameConfig& config);

}  // namespace jtous
