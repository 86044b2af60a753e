// SPDX-License-Identifier: Apache-2.0
#include "jtous/jammer.hpp"

#include <random>
#include <stdexcept>

#include "jtous/rng.hpp"

namespace jtous {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

void check_markov(const std::optional<MarkovParams>& markov) {
    if (!markov) {
        throw std::invalid_argument("two_state_markov mode needs transition probabilities");
    }
    check_probability(markov->p_on_to_off, "p_on_to_off");
    check_probability(markov->p_off_to_on, "p_off_to_on");
    if (markov->p_on_to_off + markov->p_off_to_on <= 0.0) {
        throw std::invalid_argument("markov chain has no stationary distribution");
    }
}

}  // namespace

JammingProfile build_profile(const JammerSpec& spec, const FrameConfig& config) {
    const int users = config.active_users;
    const int slots = config.slots_per_frame;
    switch (spec.mode) {
        case JammerMode::uniform_iid:
            check_probability(spec.jam_probability, "jam probability");
            return JammingProfile::uniform(users, slots, spec.jam_probability);
        case JammerMode::per_user_iid: {
            if (static_cast<int>(spec.per_user_probabilities.size()) != users) {
                throw std::invalid_argument("per_user_iid needs one probability per active user");
            }
            JammingProfile profile = JammingProfile::uniform(users, slots, 0.0);
            for (int i = 0; i < users; ++i) {
                check_probability(spec.per_user_probabilities[i], "per-user jam probability");
                for (int j = 0; j < slots; ++j) {
                    profile.probabilities[static_cast<std::size_t>(i) * slots + j] =
                        spec.per_user_probabilities[i];
                }
            }
            return profile;
        }
        case JammerMode::two_state_markov: {
            check_markov(spec.markov);
            return JammingProfile::uniform(users, slots, spec.markov->stationary_on());
        }
    }
    throw std::logic_error("unknown jammer mode");
}

std::vector<std::uint8_t> realize(const JammingProfile& profile, std::uint64_t seed) {
    profile.check_shape();
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::uint8_t> pattern(profile.probabilities.size(), 0);
    for (std::size_t c = 0; c < pattern.size(); ++c) {
        const double p = profile.probabilities[c];
        // Draw even for degenerate cells so the stream layout stays fixed.
        const double u = unit(rng);
        pattern[c] = (p >= 1.0) ? 1 : (u < p ? 1 : 0);
    }
    return pattern;
}

std::vector<std::uint8_t> realize(const JammerSpec& spec, const FrameConfig& config,
                                  std::uint64_t seed) {
    if (spec.mode != JammerMode::two_state_markov) {
        return realize(build_profile(spec, config), seed);
    }
    check_markov(spec.markov);
    const MarkovParams& markov = *spec.markov;
    const double pi_on = markov.stationary_on();
    const int users = config.active_users;
    const int slots = config.slots_per_frame;

    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::uint8_t> pattern(static_cast<std::size_t>(users) * slots, 0);
    for (int i = 0; i < users; ++i) {
        bool on = unit(rng) < pi_on;
        for (int j = 0; j < slots; ++j) {
            pattern[static_cast<std::size_t>(i) * slots + j] = on ? 1 : 0;
            const double u = unit(rng);
            on = on ? (u >= markov.p_on_to_off) : (u < markov.p_off_to_on);
        }
    }
    return pattern;
}

JammerSpec jammer_at_level(const JammerSpec& spec, double level) {
    check_probability(level, "jam level");
    JammerSpec out = spec;
    switch (spec.mode) {
        case JammerMode::uniform_iid:
            out.jam_probability = level;
            break;
        case JammerMode::per_user_iid:
            out.per_user_probabilities.assign(
                spec.per_user_probabilities.empty() ? 0 : spec.per_user_probabilities.size(),
                level);
            break;
        case JammerMode::two_state_markov: {
            check_markov(spec.markov);
            const double rate = spec.markov->p_on_to_off + spec.markov->p_off_to_on;
            out.markov = MarkovParams{(1.0 - level) * rate, level * rate};
            break;
        }
    }
    return out;
}

}  // namespace jtous
