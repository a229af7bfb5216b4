// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "fameeq/numerics.hpp"

namespace fameeq {

using Rng = std::mt19937_64;

/// Stream purposes. Each (master seed, trial, tag) triple owns an
/// independent generator so that trials can run in any order.
enum class StreamTag : std::uint64_t {
    Channel = 1,
    PowerControl = 2,
    InfoBits = 3,
    Noise = 4,
    Instance = 5,
    Symbols = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for hash(master_seed, trial, tag).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial, StreamTag tag);

Rng make_stream(std::uint64_t master_seed, std::uint64_t trial, StreamTag tag);

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
cplx complex_gaussian(Rng& rng, double variance = 1.0);

}  // namespace fameeq
