// SPDX-License-Identifier: Apache-2.0
#include "fameeq/fec.hpp"

#include <bit>
#include <limits>

#include "fameeq/errors.hpp"

namespace fameeq {

CodecSpec CodecSpec::rate_half()
{
    CodecSpec s;
    s.puncture = {{{1}, {1}}};
    return s;
}

void CodecSpec::validate() const
{
    if (constraint_length < 2 || constraint_length > 16)
        throw ConfigError("codec: constraint length must be in 2..16");
    if (puncture[0].empty() || puncture[0].size() != puncture[1].size())
        throw ConfigError("codec: puncture rows must be nonempty and equal length");
    for (std::size_t i = 0; i < period(); ++i)
        if (!puncture[0][i] && !puncture[1][i])
            throw ConfigError("codec: puncture pattern drops a whole input step");
    const unsigned limit = 1U << constraint_length;
    for (auto g : generators)
        if (g == 0 || g >= limit) throw ConfigError("codec: generator out of range");
}

std::size_t coded_length(const CodecSpec& spec, std::size_t info_bits)
{
    const std::size_t steps = info_bits + static_cast<std::size_t>(spec.tail_bits());
    std::size_t n = 0;
    for (std::size_t i = 0; i < steps; ++i)
        n += spec.puncture[0][i % spec.period()] + spec.puncture[1][i % spec.period()];
    return n;
}

std::size_t max_info_bits(const CodecSpec& spec, std::size_t capacity)
{
    std::size_t info = 0;
    while (coded_length(spec, info + 1) <= capacity) ++info;
    return info;
}

std::vector<std::uint8_t> encode(const CodecSpec& spec, std::span<const std::uint8_t> info)
{
    spec.validate();
    const int K = spec.constraint_length;
    const std::size_t steps = info.size() + static_cast<std::size_t>(spec.tail_bits());
    std::vector<std::uint8_t> out;
    out.reserve(coded_length(spec, info.size()));
    unsigned reg = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        const unsigned bit = i < info.size() ? (info[i] & 1U) : 0U;
        reg = (reg >> 1) | (bit << (K - 1));
        for (int j = 0; j < 2; ++j)
            if (spec.puncture[j][i % spec.period()])
                out.push_back(static_cast<std::uint8_t>(std::popcount(reg & spec.generators[j]) & 1));
    }
    return out;
}

std::vector<std::uint8_t> viterbi_soft(const CodecSpec& spec, std::span<const double> llrs,
                                       std::size_t info_bits)
{
    spec.validate();
    if (llrs.size() != coded_length(spec, info_bits))
        throw LengthMismatch("viterbi_soft: LLR count does not match the coded length");

    const int K = spec.constraint_length;
    const std::size_t states = std::size_t{1} << (K - 1);
    const unsigned mask = static_cast<unsigned>(states - 1);
    const std::size_t steps = info_bits + static_cast<std::size_t>(spec.tail_bits());

    // Output bits of every full register value, both generators.
    std::vector<std::array<std::uint8_t, 2>> out_bits(states * 2);
    for (unsigned reg = 0; reg < states * 2; ++reg)
        for (int j = 0; j < 2; ++j)
            out_bits[reg][j] = static_cast<std::uint8_t>(std::popcount(reg & spec.generators[j]) & 1);

    constexpr double kUnreached = -std::numeric_limits<double>::infinity();
    std::vector<double> metric(states, kUnreached), next(states);
    metric[0] = 0.0;
    // decision[i * states + ns] = lsb of the predecessor register.
    std::vector<std::uint8_t> decision(steps * states);

    std::size_t pos = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        double half_llr[2] = {0.0, 0.0};
        for (int j = 0; j < 2; ++j)
            if (spec.puncture[j][i % spec.period()]) half_llr[j] = 0.5 * llrs[pos++];
        const bool tail = i >= info_bits;
        for (unsigned ns = 0; ns < states; ++ns) {
            const unsigned input = ns >> (K - 2);
            if (tail && input) {
                next[ns] = kUnreached;
                continue;
            }
            double best = kUnreached;
            std::uint8_t choice = 0;
            for (unsigned lsb = 0; lsb < 2; ++lsb) {
                const unsigned reg = (ns << 1) | lsb;
                const double m0 = metric[reg & mask];
                if (m0 == kUnreached) continue;
                const auto& ob = out_bits[reg];
                const double m = m0 + (ob[0] ? half_llr[0] : -half_llr[0]) +
                                 (ob[1] ? half_llr[1] : -half_llr[1]);
                if (m > best) {
                    best = m;
                    choice = static_cast<std::uint8_t>(lsb);
                }
            }
            next[ns] = best;
            decision[i * states + ns] = choice;
        }
        metric.swap(next);
    }

    std::vector<std::uint8_t> bits(steps);
    unsigned ns = 0;
    for (std::size_t i = steps; i-- > 0;) {
        bits[i] = static_cast<std::uint8_t>(ns >> (K - 2));
        ns = ((ns << 1) | decision[i * states + ns]) & mask;
    }
    bits.resize(info_bits);
    return bits;
}

}  // namespace fameeq
