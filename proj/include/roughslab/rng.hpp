// Copyright 2026 The roughslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>

namespace roughslab {

/// Counter-based generator keyed by (seed, stream).
///
/// Word `i` of stream `s` is `mix(key(seed) + (s << 32) + i)` where `mix` is the
/// SplitMix64 finalizer, a bijection on 64-bit words. For streams and counters
/// below 2^32 the inputs are pairwise distinct, so distinct (stream, counter)
/// pairs never produce the same pre-image and streams cannot overlap.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint32_t stream)
        : base_(mix(seed ^ 0x9E3779B97F4A7C15ULL) + (static_cast<std::uint64_t>(stream) << 32)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(base_ + counter_++); }

    /// Uniform in the open interval (0, 1).
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the inverse CDF, so draws are reproducible across
    /// standard libraries.
    double normal();

    std::uint32_t counter() const { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t base_;
    std::uint32_t counter_ = 0;
};

/// Quantile function of N(0,1); p must lie in (0, 1).
double normal_quantile(double p);

/// CDF of N(0,1).
double normal_cdf(double x);

}  // namespace roughslab
