/* Copyright (c) 2026 The musegest authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <cstdint>
#include <string_view>

namespace musegest {

/// SplitMix64 pseudorandom generator (Steele, Lea & Flood 2014).
///
/// Every sampled artifact in the project flows through this generator so that
/// a (seed, input) pair reproduces byte-identical results on any platform.
/// The state transition and output mix use the published constants
/// 0x9E3779B97F4A7C15, 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB; no
/// standard-library distribution is involved anywhere, since those are not
/// portable across implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 significant bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be > 0. Uses plain modulo
    /// reduction; the bias is below 2^-53 for every n used here and the
    /// result is identical on every conforming platform.
    std::uint64_t next_below(std::uint64_t n) {
        return next() % n;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit hash (offset 0xcbf29ce484222325, prime 0x100000001b3).
/// Stable across platforms; used to derive seeds from stimulus identifiers.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Mixes two seeds into one; used to give each degree of freedom its own
/// stream independent of declaration order.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 m(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
    return m.next();
}

}  // namespace musegest
