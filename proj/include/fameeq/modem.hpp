// SPDX-License-Identifier: Apache-2.0
//
// Constellations, Gray mapping and soft demapping.
//
// Labels are stored implicitly: point i carries the Q-bit label whose
// integer value is i, bit q = (i >> (Q-1-q)) & 1 (first bit is the MSB).
//
// 16-QAM label table (first two bits select the in-phase level, last two
// the quadrature level, same per-axis Gray code on both axes):
//
//     bits  level        bits  level
//     00    -3           11    +1
//     01    -1           10    +3
//
// so point label b0 b1 b2 b3 = (L(b0 b1) + j L(b2 b3)) * sqrt(Es/10).
// Bits 0 and 2 are the axis sign bits (1 => positive).
//
// LLR sign convention: positive means bit 1 is more likely.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fameeq/numerics.hpp"

namespace fameeq {

class Constellation {
public:
    Constellation(std::string name, std::vector<cplx> points, int bits_per_symbol);

    const std::string& name() const { return name_; }
    int bits_per_symbol() const { return bits_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<cplx>& points() const { return points_; }
    const cplx& point(std::size_t label) const { return points_[label]; }
    double average_energy() const;

    int label_bit(std::size_t label, int q) const { return static_cast<int>((label >> (bits_ - 1 - q)) & 1U); }

    /// Labels whose q-th bit equals `value`, in increasing label order.
    const std::vector<std::size_t>& subset(int q, int value) const { return subsets_[q][value]; }

private:
    std::string name_;
    std::vector<cplx> points_;
    int bits_;
    std::vector<std::array<std::vector<std::size_t>, 2>> subsets_;
};

Constellation make_qam16(double es);
Constellation make_qpsk(double es);
/// "qam16" or "qpsk".
Constellation make_constellation(const std::string& name, double es);

using Bits = std::vector<std::uint8_t>;

/// Consecutive Q-bit groups (MSB first) to labeled points.
CVector map_bits(const Constellation& c, std::span<const std::uint8_t> bits);

/// Nearest-point decisions, Q bits per symbol.
Bits hard_demap(const Constellation& c, std::span<const cplx> symbols);

enum class DemapMode { Exact, MaxLog };

struct DemapOptions {
    DemapMode mode = DemapMode::Exact;
    double llr_clamp = 80.0;
};

/// Lambda_q = log sum_{s in S_q^1} exp(-|s_hat-s|^2/nu_sq)
///          - log sum_{s in S_q^0} exp(-|s_hat-s|^2/nu_sq),
/// evaluated with a max-shifted log-sum-exp and clamped to +-llr_clamp.
std::vector<double> soft_demap(const Constellation& c, cplx s_hat, double nu_sq,
                               const DemapOptions& opts = {});

/// Appends Q LLRs to `out`.
void soft_demap_into(const Constellation& c, cplx s_hat, double nu_sq,
                     const DemapOptions& opts, std::vector<double>& out);

}  // namespace fameeq
