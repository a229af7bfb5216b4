// SPDX-License-Identifier: Apache-2.0
#include "fameeq/random.hpp"

#include <cmath>

namespace fameeq {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial, StreamTag tag)
{
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    return h;
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t trial, StreamTag tag)
{
    return Rng(derive_seed(master_seed, trial, tag));
}

cplx complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace fameeq
