// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

#include "jtous/metrics.hpp"
#include "jtous/model.hpp"

namespace jtous {

/// Genetic-algorithm knobs. Defaults follow the reference configuration:
/// population 400, 500 generations, crossover fraction 0.5, function
/// tolerance 1e-10, constraint tolerance 1e-6, 50 stall generations.
/// constraint_tolerance is accepted for configuration parity but inert:
/// feasibility holds by construction of the encoding and repair pass.
struct GaConfig {
    int population_size = 400;
    int max_generations = 500;
    double crossover_fraction = 0.5;
    double function_tolerance = 1e-10;
    double constraint_tolerance = 1e-6;
    int max_stall_generations = 50;
    std::uint64_t rng_seed = 0;
    double elite_fraction = 0.05;
    int tournament_size = 2;
    double mutation_probability = 0.0;  // 0 = auto, one expected reset per chromosome (1/S)
};

enum class ConvergedReason { max_generations, stall, tolerance, direct };

struct SolverResult {
    Schedule schedule;
    double objective_value = 0.0;
    int generations_run = 0;
    long long evaluations = 0;
    ConvergedReason converged_reason = ConvergedReason::direct;
};

/// Minimizes the scheduling objective over assignment vectors with a genetic
/// algorithm: tournament selection, slot-level uniform crossover, per-gene
/// reset mutation, elitism, and a repair pass that keeps the earliest
/// occurrence of a duplicated user. Deterministic given the seed.
SolverResult solve_ga(std::span<const Task> tasks, const JammingProfile& jamming,
                      const FrameConfig& config, const GaConfig& ga);

/// Jamming-blind variant: optimizes as if no slot were ever jammed, then
/// reports its objective against the true profile for comparability.
SolverResult solve_ga_nj(std::span<const Task> tasks, const JammingProfile& jamming,
                         const FrameConfig& config, const GaConfig& ga);

/// Shortest-job-first baseline: users sorted ascending by processing time
/// (ties by id) into slots 1..N_a. Ignores jamming.
SolverResult solve_sjf(std::span<const Task> tasks, const FrameConfig& config);

/// Shortest-deadline-first baseline: as SJF but sorted by deadline.
SolverResult solve_sdf(std::span<const Task> tasks, const FrameConfig& config);

/// Exhaustive search over all valid assignment vectors. Guarded to
/// (N_a + 1)^S <= 10^7 candidates; intended for tests and tiny instances.
SolverResult brute_force_oracle(std::span<const Task> tasks, const JammingProfile& jamming,
                                const FrameConfig& config);

}  // namespace jtous
