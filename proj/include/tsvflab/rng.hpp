// Copyright 2026 The tsvflab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Self-contained deterministic RNG. Trial seeds are derived from a master
 * seed with a counter hash, so results are bit-identical for any worker
 * count and any execution order. std::random distributions are avoided on
 * purpose: their output is implementation-defined and would break the
 * byte-identical rerun contract.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tsvflab {

/// One round of the splitmix64 output function.
inline std::uint64_t splitmix64_next(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stateless hash of (master_seed, counter) used to seed per-trial streams.
inline std::uint64_t counter_hash(std::uint64_t master_seed,
                                  std::uint64_t counter) {
    std::uint64_t s = master_seed ^ (counter * 0xD1B54A32D192ED03ULL);
    std::uint64_t h = splitmix64_next(s);
    return h ^ splitmix64_next(s);
}

/// xoshiro256++ stream with Box-Muller gaussians.
class TrialRng {
  public:
    explicit TrialRng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto &word : state_) {
            word = splitmix64_next(s);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal deviate.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    double gaussian(double mean, double stddev) {
        return mean + stddev * gaussian();
    }

  private:
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace tsvflab
