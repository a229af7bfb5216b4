// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "fameeq/simkit.hpp"

namespace fameeq {

inline constexpr const char* kBerCsvHeader =
    "snr_db,equalizer,bits,ber,fer,bit_errors,bits_counted,frames";

/// One row per SNR point per equalizer, equalizer-major. Deterministic
/// given the report counts (no timing data).
void write_ber_csv(std::ostream& os, const BerReport& rep);

/// Full config echo, seed, SNR convention, per-point counts, wall time.
void write_ber_json(std::ostream& os, const BerReport& rep);

std::string config_to_json(const SimConfig& cfg);

}  // namespace fameeq
