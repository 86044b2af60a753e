// SPDX-License-Identifier: Apache-2.0
#include "jtous/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace jtous {

JammingProfile JammingProfile::uniform(int users, int slots, double p) {
    JammingProfile profile;
    profile.users = users;
    profile.slots = slots;
    profile.probabilities.assign(static_cast<std::size_t>(users) * slots, p);
    return profile;
}

void JammingProfile::check_shape() const {
    const std::size_t expected = static_cast<std::size_t>(users) * slots;
    if (users < 0 || slots < 0 || probabilities.size() != expected) {
        throw std::invalid_argument("jamming profile dimensions do not match probability matrix");
    }
    if (realization && realization->size() != expected) {
        throw std::invalid_argument("jamming realization dimensions do not match profile");
    }
    for (double p : probabilities) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("jamming probability outside [0, 1]");
        }
    }
}

ValidationResult validate_schedule(const Schedule& schedule, const FrameConfig& config) {
    if (schedule.slots() != config.slots_per_frame) {
        std::ostringstream msg;
        msg << "schedule has " << schedule.slots() << " slots, frame config expects "
            << config.slots_per_frame;
        throw std::invalid_argument(msg.str());
    }

    ValidationResult result;
    std::vector<int> first_slot_of(static_cast<std::size_t>(config.active_users) + 1, 0);
    int assigned = 0;
    for (int j = 1; j <= config.slots_per_frame; ++j) {
        const int user = schedule.assignment[j - 1];
        if (user == kEmptySlot) continue;
        if (user < 1 || user > config.active_users) {
            std::ostringstream msg;
            msg << "user id out of range: slot " << j << " holds user " << user;
            result.violations.push_back(msg.str());
            continue;
        }
        ++assigned;
        if (first_slot_of[user] != 0) {
            std::ostringstream msg;
            msg << "per-user uniqueness: user " << user << " assigned to slots "
                << first_slot_of[user] << " and " << j;
            result.violations.push_back(msg.str());
        } else {
            first_slot_of[user] = j;
        }
    }
    if (assigned > config.active_users) {
        std::ostringstream msg;
        msg << "total assignments " << assigned << " exceed active users " << config.active_users;
        result.violations.push_back(msg.str());
    }
    return result;
}

QueueView derive_queue(const Schedule& schedule, const FrameConfig& config) {
    if (schedule.slots() != config.slots_per_frame) {
        throw std::invalid_argument("schedule/config slot count mismatch");
    }
    QueueView queue;
    queue.slot_of.assign(config.active_users, 0);
    queue.queue_position.assign(config.active_users, 0);
    // One pass in slot order: a user's queue position is the running count of
    // assigned slots up to and including its own.
    for (int j = 1; j <= config.slots_per_frame; ++j) {
        const int user = schedule.assignment[j - 1];
        if (user == kEmptySlot) continue;
        ++queue.queue_length;
        queue.slot_of[user - 1] = j;
        queue.queue_position[user - 1] = queue.queue_length;
    }
    return queue;
}

ValidationResult validate_tasks(std::span<const Task> tasks, const FrameConfig& config) {
    ValidationResult result;
    if (static_cast<int>(tasks.size()) != config.active_users) {
        std::ostringstream msg;
        msg << "task list has " << tasks.size() << " entries, expected " << config.active_users;
        throw std::invalid_argument(msg.str());
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& task = tasks[i];
        std::ostringstream where;
        where << "task " << (i + 1) << ": ";
        if (task.id != static_cast<int>(i) + 1) {
            result.violations.push_back(where.str() + "id does not match position");
        }
        if (!(task.processing_time_ms > 0.0)) {
            result.violations.push_back(where.str() + "processing time must be positive");
        }
        if (!(task.deadline_ms > 0.0)) {
            result.violations.push_back(where.str() + "deadline must be positive");
        }
        if (!(task.weight > 0.0 && task.weight <= 1.0)) {
            result.violations.push_back(where.str() + "weight must lie in (0, 1]");
        }
        if (task.cycles) {
            const double implied_ms = *task.cycles / config.server_speed_cps * 1e3;
            const double scale = std::max(std::abs(implied_ms), std::abs(task.processing_time_ms));
            if (std::abs(implied_ms - task.processing_time_ms) > 1e-9 * scale) {
                result.violations.push_back(where.str() +
                                            "cycles and processing time disagree for the "
                                            "configured server speed");
            }
        }
    }
    return result;
}

}  // namespace jtous
