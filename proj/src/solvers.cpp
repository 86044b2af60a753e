// SPDX-License-Identifier: Apache-2.0
#include "jtous/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "jtous/rng.hpp"

namespace jtous {

namespace {

void check_instance(std::span<const Task> tasks, const JammingProfile& jamming,
                    const FrameConfig& config) {
    if (config.active_users < 1 || tasks.empty()) {
        throw std::invalid_argument("instance has no active users");
    }
    if (static_cast<int>(tasks.size()) != config.active_users) {
        throw std::invalid_argument("task list length does not match active user count");
    }
    if (jamming.users != config.active_users || jamming.slots != config.slots_per_frame) {
        throw std::invalid_argument("jamming profile dimensions do not match frame config");
    }
}

// Keeps the earliest occurrence of a duplicated user, empties later ones.
void repair(std::span<int> genes, std::vector<std::uint8_t>& seen) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int& g : genes) {
        if (g == kEmptySlot) continue;
        if (seen[g]) {
            g = kEmptySlot;
        } else {
            seen[g] = 1;
        }
    }
}

SolverResult heuristic_by_key(std::span<const Task> tasks, const FrameConfig& config,
                              double (*key)(const Task&)) {
    if (config.active_users > config.slots_per_frame) {
        throw std::invalid_argument("infeasible instance: more active users than mini-slots");
    }
    if (static_cast<int>(tasks.size()) != config.active_users) {
        throw std::invalid_argument("task list length does not match active user count");
    }
    std::vector<int> order(tasks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (key(tasks[a]) != key(tasks[b])) return key(tasks[a]) < key(tasks[b]);
        return tasks[a].id < tasks[b].id;
    });

    SolverResult result;
    result.schedule.assignment.assign(config.slots_per_frame, kEmptySlot);
    for (std::size_t k = 0; k < order.size(); ++k) {
        result.schedule.assignment[k] = tasks[order[k]].id;
    }
    result.converged_reason = ConvergedReason::direct;
    // Baselines are jamming-oblivious; their reported objective assumes a
    // clear channel. The harness re-scores against the true profile.
    const JammingProfile clear =
        JammingProfile::uniform(config.active_users, config.slots_per_frame, 0.0);
    result.objective_value = jto_us_objective(result.schedule, tasks, clear, config);
    result.evaluations = 1;
    return result;
}

}  // namespace

SolverResult solve_ga(std::span<const Task> tasks, const JammingProfile& jamming,
                      const FrameConfig& config, const GaConfig& ga) {
    check_instance(tasks, jamming, config);
    if (ga.population_size < 2) throw std::invalid_argument("population size must be >= 2");
    if (!(ga.function_tolerance > 0.0) || !(ga.constraint_tolerance > 0.0)) {
        throw std::invalid_argument("tolerances must be positive");
    }
    if (!(ga.crossover_fraction >= 0.0 && ga.crossover_fraction <= 1.0)) {
        throw std::invalid_argument("crossover fraction must lie in [0, 1]");
    }

    const int slots = config.slots_per_frame;
    const int users = config.active_users;
    const int pop = ga.population_size;
    const double mutation_p =
        ga.mutation_probability > 0.0 ? ga.mutation_probability : 1.0 / slots;
    const int elites = std::max(1, static_cast<int>(std::lround(ga.elite_fraction * pop)));
    const int children = pop - elites;
    const int crossover_children =
        static_cast<int>(std::lround(ga.crossover_fraction * children));

    std::mt19937_64 rng(splitmix64(ga.rng_seed));
    std::uniform_int_distribution<int> gene_dist(0, users);  // 0 = empty slot
    std::uniform_int_distribution<int> pick_dist(0, pop - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::vector<int>> population(pop, std::vector<int>(slots));
    std::vector<std::vector<int>> offspring(pop, std::vector<int>(slots));
    std::vector<double> fitness(pop);
    std::vector<int> rank(pop);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(users) + 1);

    auto evaluate = [&](std::span<const int> genes) {
        return evaluate_objective(genes, tasks, jamming, config);
    };
    auto tournament = [&]() {
        int best = pick_dist(rng);
        for (int t = 1; t < ga.tournament_size; ++t) {
            const int challenger = pick_dist(rng);
            if (fitness[challenger] < fitness[best]) best = challenger;
        }
        return best;
    };

    SolverResult result;
    for (auto& genes : population) {
        for (int& g : genes) g = gene_dist(rng);
        repair(genes, seen);
    }
    for (int p = 0; p < pop; ++p) fitness[p] = evaluate(population[p]);
    result.evaluations = pop;

    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(), [&](int a, int b) { return fitness[a] < fitness[b]; });
    double best_fitness = fitness[rank[0]];
    std::vector<int> best_genes = population[rank[0]];

    int stall = 0;
    result.converged_reason = ConvergedReason::max_generations;
    for (int gen = 1; gen <= ga.max_generations; ++gen) {
        result.generations_run = gen;

        // Elites survive unchanged; the rest of the generation is split into
        // crossover children and mutation children.
        for (int e = 0; e < elites; ++e) offspring[e] = population[rank[e]];
        for (int c = 0; c < children; ++c) {
            std::vector<int>& child = offspring[elites + c];
            if (c < crossover_children) {
                const std::vector<int>& a = population[tournament()];
                const std::vector<int>& b = population[tournament()];
                for (int j = 0; j < slots; ++j) {
                    child[j] = (unit(rng) < 0.5) ? a[j] : b[j];
                }
            } else {
                child = population[tournament()];
                for (int& g : child) {
                    if (unit(rng) < mutation_p) g = gene_dist(rng);
                }
            }
            repair(child, seen);
        }

        population.swap(offspring);
        for (int p = 0; p < pop; ++p) fitness[p] = evaluate(population[p]);
        result.evaluations += pop;

        std::iota(rank.begin(), rank.end(), 0);
        std::sort(rank.begin(), rank.end(),
                  [&](int a, int b) { return fitness[a] < fitness[b]; });
        const double gen_best = fitness[rank[0]];
        if (gen_best < best_fitness - ga.function_tolerance) {
            best_fitness = gen_best;
            best_genes = population[rank[0]];
            stall = 0;
        } else {
            if (gen_best < best_fitness) {
                best_fitness = gen_best;
                best_genes = population[rank[0]];
            }
            ++stall;
        }

        if (best_fitness <= ga.function_tolerance) {
            result.converged_reason = ConvergedReason::tolerance;
            break;
        }
        if (stall >= ga.max_stall_generations) {
            result.converged_reason = ConvergedReason::stall;
            break;
        }
    }

    result.schedule.assignment = std::move(best_genes);
    result.objective_value = jto_us_objective(result.schedule, tasks, jamming, config);
    return result;
}

SolverResult solve_ga_nj(std::span<const Task> tasks, const JammingProfile& jamming,
                         const FrameConfig& config, const GaConfig& ga) {
    check_instance(tasks, jamming, config);
    const JammingProfile blind =
        JammingProfile::uniform(config.active_users, config.slots_per_frame, 0.0);
    SolverResult result = solve_ga(tasks, blind, config, ga);
    // Optimized against a clear channel, scored against the real one.
    result.objective_value = jto_us_objective(result.schedule, tasks, jamming, config);
    return result;
}

SolverResult solve_sjf(std::span<const Task> tasks, const FrameConfig& config) {
    return heuristic_by_key(tasks, config,
                            [](const Task& t) { return t.processing_time_ms; });
}

SolverResult solve_sdf(std::span<const Task> tasks, const FrameConfig& config) {
    return heuristic_by_key(tasks, config, [](const Task& t) { return t.deadline_ms; });
}

SolverResult brute_force_oracle(std::span<const Task> tasks, const JammingProfile& jamming,
                                const FrameConfig& config) {
    check_instance(tasks, jamming, config);
    const int slots = config.slots_per_frame;
    const int users = config.active_users;

    double candidates = 1.0;
    for (int j = 0; j < slots; ++j) candidates *= users + 1;
    if (candidates > 1e7) {
        throw std::invalid_argument("instance too large for exhaustive enumeration");
    }

    std::vector<int> genes(slots, kEmptySlot);
    std::vector<int> best = genes;
    double best_value = evaluate_objective(genes, tasks, jamming, config);
    long long evaluations = 1;

    // Odometer enumeration, slot 1 fastest. Candidates with a duplicated
    // user are skipped; earlier candidates win ties.
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(users) + 1);
    auto has_duplicates = [&](const std::vector<int>& g) {
        std::fill(seen.begin(), seen.end(), 0);
        for (int v : g) {
            if (v == kEmptySlot) continue;
            if (seen[v]) return true;
            seen[v] = 1;
        }
        return false;
    };

    while (true) {
        int j = 0;
        while (j < slots && genes[j] == users) genes[j++] = kEmptySlot;
        if (j == slots) break;
        ++genes[j];
        if (has_duplicates(genes)) continue;
        const double value = evaluate_objective(genes, tasks, jamming, config);
        ++evaluations;
        if (value < best_value) {
            best_value = value;
            best = genes;
        }
    }

    SolverResult result;
    result.schedule.assignment = best;
    result.objective_value = best_value;
    result.evaluations = evaluations;
    result.converged_reason = ConvergedReason::direct;
    return result;
}

}  // namespace jtous
