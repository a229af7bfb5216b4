// SPDX-License-Identifier: Apache-2.0
//
// Plain-text fixture formats.
//
// Channel dump:
//     fameeq-channel 1
//     <B> <U> <W>
//     then W blocks of B lines, each line holding U interleaved
//     "re im" pairs printed with 17 significant digits.
//
// Finite-alphabet equalizer:
//     fameeq-fae 1
//     <B> <U> <b>
//     per user either
//         user <u> degenerate
//     or
//         user <u> ok
//         re <B odd integers>
//         im <B odd integers>
//         beta <re> <im>
//         nu_sq <value>
#pragma once

#include <iosfwd>

#include "fameeq/channel.hpp"
#include "fameeq/equalize.hpp"

namespace fameeq {

void write_channel(std::ostream& os, const ChannelRealization& ch);
/// Throws ConfigError with the offending line number.
ChannelRealization read_channel(std::istream& is);

void write_equalizer(std::ostream& os, const FiniteAlphabetEqualizer& eq);
/// Restores x, bits, beta and nu_sq; bias_factor and objective are left at 0.
FiniteAlphabetEqualizer read_equalizer(std::istream& is);

}  // namespace fameeq
