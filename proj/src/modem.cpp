// SPDX-License-Identifier: Apache-2.0
#include "fameeq/modem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fameeq/errors.hpp"

namespace fameeq {

Constellation::Constellation(std::string name, std::vector<cplx> points, int bits_per_symbol)
    : name_(std::move(name)), points_(std::move(points)), bits_(bits_per_symbol)
{
    if (bits_ < 1 || points_.size() != (std::size_t{1} << bits_))
        throw LengthMismatch("constellation size must be 2^Q");
    subsets_.resize(bits_);
    for (std::size_t i = 0; i < points_.size(); ++i)
        for (int q = 0; q < bits_; ++q) subsets_[q][label_bit(i, q)].push_back(i);
}

double Constellation::average_energy() const
{
    double acc = 0.0;
    for (const auto& p : points_) acc += std::norm(p);
    return acc / static_cast<double>(points_.size());
}

Constellation make_qam16(double es)
{
    // Per-axis Gray code indexed by the two-bit label value.
    constexpr std::array<double, 4> level{-3.0, -1.0, 3.0, 1.0};
    const double scale = std::sqrt(es / 10.0);
    std::vector<cplx> pts(16);
    for (std::size_t i = 0; i < 16; ++i)
        pts[i] = cplx(level[i >> 2] * scale, level[i & 3] * scale);
    return Constellation("qam16", std::move(pts), 4);
}

Constellation make_qpsk(double es)
{
    const double a = std::sqrt(es / 2.0);
    std::vector<cplx> pts{{-a, -a}, {-a, a}, {a, -a}, {a, a}};
    return Constellation("qpsk", std::move(pts), 2);
}

Constellation make_constellation(const std::string& name, double es)
{
    if (name == "qam16") return make_qam16(es);
    if (name == "qpsk") return make_qpsk(es);
    throw ConfigError("unknown modulation '" + name + "'");
}

CVector map_bits(const Constellation& c, std::span<const std::uint8_t> bits)
{
    const auto Q = static_cast<std::size_t>(c.bits_per_symbol());
    if (bits.size() % Q != 0) throw LengthMismatch("map_bits: bit count not divisible by Q");
    CVector out(bits.size() / Q);
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::size_t label = 0;
        for (std::size_t q = 0; q < Q; ++q) label = (label << 1) | (bits[k * Q + q] & 1U);
        out[k] = c.point(label);
    }
    return out;
}

Bits hard_demap(const Constellation& c, std::span<const cplx> symbols)
{
    const int Q = c.bits_per_symbol();
    Bits out;
    out.reserve(symbols.size() * static_cast<std::size_t>(Q));
    for (const auto& s : symbols) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double d = std::norm(s - c.point(i));
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        for (int q = 0; q < Q; ++q) out.push_back(static_cast<std::uint8_t>(c.label_bit(best, q)));
    }
    return out;
}

void soft_demap_into(const Constellation& c, cplx s_hat, double nu_sq,
                     const DemapOptions& opts, std::vector<double>& out)
{
    if (!(nu_sq > 0.0)) throw NonpositiveVariance("soft_demap: nu_sq must be > 0");
    // Metrics -|s_hat - s|^2 / nu_sq per point; at most 16 points here.
    std::array<double, 64> metric{};
    const std::size_t M = c.size();
    std::vector<double> heap;
    double* m = metric.data();
    if (M > metric.size()) {
        heap.resize(M);
        m = heap.data();
    }
    for (std::size_t i = 0; i < M; ++i) m[i] = -std::norm(s_hat - c.point(i)) / nu_sq;

    auto reduce = [&](const std::vector<std::size_t>& set) {
        double mx = -std::numeric_limits<double>::infinity();
        for (auto i : set) mx = std::max(mx, m[i]);
        if (opts.mode == DemapMode::MaxLog) return mx;
        double acc = 0.0;
        for (auto i : set) acc += std::exp(m[i] - mx);
        return mx + std::log(acc);
    };

    for (int q = 0; q < c.bits_per_symbol(); ++q) {
        const double llr = reduce(c.subset(q, 1)) - reduce(c.subset(q, 0));
        out.push_back(std::clamp(llr, -opts.llr_clamp, opts.llr_clamp));
    }
}

std::vector<double> soft_demap(const Constellation& c, cplx s_hat, double nu_sq,
                               const DemapOptions& opts)
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(c.bits_per_symbol()));
    soft_demap_into(c, s_hat, nu_sq, opts, out);
    return out;
}

}  // namespace fameeq
