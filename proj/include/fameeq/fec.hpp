// SPDX-License-Identifier: Apache-2.0
//
// Punctured convolutional code with soft-input Viterbi decoding.
//
// Shift register convention: the current input bit sits at register bit
// K-1 and each generator's MSB taps the current input, so the impulse
// response of a generator reads its octal digits MSB first. Codes are
// terminated with K-1 zero tail bits and punctured per input step:
// pattern[j][i % period] keeps output j of input step i.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fameeq {

struct CodecSpec {
    int constraint_length = 7;
    std::array<unsigned, 2> generators{0133, 0171};
    std::array<std::vector<std::uint8_t>, 2> puncture{{{1, 1, 0}, {1, 0, 1}}};

    /// K=7 (133,171) with the 3/4 pattern [1 1 0; 1 0 1].
    static CodecSpec rate_three_quarters() { return {}; }
    /// Unpunctured mother code.
    static CodecSpec rate_half();

    int tail_bits() const { return constraint_length - 1; }
    std::size_t period() const { return puncture[0].size(); }
    void validate() const;
};

/// Coded length after termination and puncturing.
std::size_t coded_length(const CodecSpec& spec, std::size_t info_bits);

/// Largest info length whose coded length fits in `capacity` bits (0 if none).
std::size_t max_info_bits(const CodecSpec& spec, std::size_t capacity);

std::vector<std::uint8_t> encode(const CodecSpec& spec, std::span<const std::uint8_t> info);

/// Maximum-likelihood info bits for a terminated trellis. `llrs` has one
/// entry per transmitted (unpunctured) bit, positive meaning bit 1; the
/// branch metric is sum(+-llr/2) and punctured positions count as zero.
/// Throws LengthMismatch if llrs.size() != coded_length(spec, info_bits).
std::vector<std::uint8_t> viterbi_soft(const CodecSpec& spec, std::span<const double> llrs,
                                       std::size_t info_bits);

}  // namespace fameeq
