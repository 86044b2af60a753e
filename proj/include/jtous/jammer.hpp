// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "jtous/model.hpp"

namespace jtous {

enum class JammerMode { uniform_iid, per_user_iid, two_state_markov };

/// Two-state on/off chain parameters. The stationary on-probability is what
/// the scheduler sees as the per-slot marginal.
struct MarkovParams {
    double p_on_to_off = 0.0;
    double p_off_to_on = 0.0;

    double stationary_on() const { return p_off_to_on / (p_on_to_off + p_off_to_on); }
};

struct JammerSpec {
    JammerMode mode = JammerMode::uniform_iid;
    double jam_probability = 0.0;                  // uniform_iid
    std::vector<double> per_user_probabilities;    // per_user_iid
    std::optional<MarkovParams> markov;            // two_state_markov
    std::uint64_t rng_seed = 0;
};

/// Probability matrix for the given spec: constant fill, per-user rows, or
/// the Markov chain's stationary marginal in every slot.
JammingProfile build_profile(const JammerSpec& spec, const FrameConfig& config);

/// Samples an on/off pattern. IID modes draw each cell independently with its
/// probability; the Markov mode samples one chain trajectory per user row,
/// started from the stationary distribution. Deterministic given the seed.
std::vector<std::uint8_t> realize(const JammerSpec& spec, const FrameConfig& config,
                                  std::uint64_t seed);
std::vector<std::uint8_t> realize(const JammingProfile& profile, std::uint64_t seed);

/// Re-levels a spec so its marginal jam probability equals `level` (sweep
/// support). IID modes take the level directly; the Markov mode keeps its
/// mixing rate (sum of transition probabilities) and retargets the
/// stationary distribution.
JammerSpec jammer_at_level(const JammerSpec& spec, double level);

}  // namespace jtous
