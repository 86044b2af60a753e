// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace jtous {

// splitmix64 finalizer. Used to derive independent substream seeds from a
// master seed plus stream tags, so parallel and serial runs draw identical
// streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = splitmix64(seed ^ 0x5bd1e9955bd1e995ULL);
    h = splitmix64(h ^ splitmix64(a));
    h = splitmix64(h ^ splitmix64(b));
    h = splitmix64(h ^ splitmix64(c));
    return h;
}

}  // namespace jtous
