// SPDX-License-Identifier: Apache-2.0
#include "fameeq/channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "fameeq/errors.hpp"

namespace fameeq {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

double ChannelRealization::average_user_power(std::size_t u) const
{
    double acc = 0.0;
    for (const auto& H : per_subcarrier)
        for (std::size_t b = 0; b < H.rows(); ++b) acc += std::norm(H(b, u));
    return per_subcarrier.empty() ? 0.0 : acc / static_cast<double>(per_subcarrier.size());
}

void GeometricChannelParams::validate() const
{
    if (num_clusters < 1) throw ConfigError("geometric channel: num_clusters must be >= 1");
    if (!(antenna_spacing > 0.0)) throw ConfigError("geometric channel: antenna spacing must be > 0");
    if (angle_spread_deg < 0.0 || user_angle_range_deg < 0.0 || max_delay_fraction < 0.0)
        throw ConfigError("geometric channel: angles and delays must be non-negative");
    if (los && !(los_k_factor >= 10.0))
        throw ConfigError("geometric channel: LoS k-factor must be >= 10");
}

ChannelRealization rayleigh_iid(std::size_t B, std::size_t U, std::size_t W, Rng& rng)
{
    ChannelRealization ch;
    ch.antennas = B;
    ch.users = U;
    ch.per_subcarrier.reserve(W);
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    for (std::size_t w = 0; w < W; ++w) {
        CMatrix H(B, U);
        for (auto& v : H.data()) {
            const double re = n(rng);
            const double im = n(rng);
            v = {re, im};
        }
        ch.per_subcarrier.push_back(std::move(H));
    }
    return ch;
}

CVector array_response(std::size_t B, double spacing, double theta)
{
    CVector a(B);
    const double k = 2.0 * kPi * spacing * std::sin(theta);
    for (std::size_t b = 0; b < B; ++b) a[b] = std::polar(1.0, k * static_cast<double>(b));
    return a;
}

std::vector<double> cluster_powers(const GeometricChannelParams& p)
{
    std::vector<double> pw(p.num_clusters);
    for (std::size_t c = 0; c < pw.size(); ++c)
        pw[c] = std::pow(10.0, -p.cluster_power_decay_db * static_cast<double>(c) / 10.0);
    if (p.los && pw.size() > 1) {
        const double rest = std::accumulate(pw.begin() + 1, pw.end(), 0.0);
        pw[0] = p.los_k_factor * rest;
    }
    const double total = std::accumulate(pw.begin(), pw.end(), 0.0);
    for (auto& v : pw) v /= total;
    return pw;
}

ChannelRealization geometric(std::size_t B, std::size_t U, std::size_t W,
                             const GeometricChannelParams& params, Rng& rng)
{
    params.validate();
    ChannelRealization ch;
    ch.antennas = B;
    ch.users = U;
    ch.per_subcarrier.assign(W, CMatrix(B, U));

    const auto powers = cluster_powers(params);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (std::size_t u = 0; u < U; ++u) {
        const double direction =
            deg2rad(params.user_angle_range_deg * (2.0 * unit(rng) - 1.0));
        for (std::size_t c = 0; c < powers.size(); ++c) {
            const bool direct = params.los && c == 0;
            const double theta =
                direct ? direction : direction + deg2rad(params.angle_spread_deg) * gauss(rng);
            const double phase = 2.0 * kPi * unit(rng);
            const double delay = direct ? 0.0 : params.max_delay_fraction * unit(rng);
            const CVector a = array_response(B, params.antenna_spacing, theta);
            const double amp = std::sqrt(powers[c]);
            for (std::size_t w = 0; w < W; ++w) {
                const cplx g = std::polar(amp, phase - 2.0 * kPi * delay * static_cast<double>(w));
                auto& H = ch.per_subcarrier[w];
                for (std::size_t b = 0; b < B; ++b) H(b, u) += g * a[b];
            }
        }
        // Mean over subcarriers of ||h_u||^2 is B exactly.
        const double scale = std::sqrt(static_cast<double>(B) / ch.average_user_power(u));
        for (auto& H : ch.per_subcarrier)
            for (std::size_t b = 0; b < B; ++b) H(b, u) *= scale;
    }
    return ch;
}

ChannelRealization apply_power_control(ChannelRealization ch, double range_db, Rng& rng)
{
    if (range_db < 0.0) throw ConfigError("power control range must be >= 0 dB");
    std::uniform_real_distribution<double> spread(-range_db, range_db);
    const double B = static_cast<double>(ch.antennas);
    for (std::size_t u = 0; u < ch.users; ++u) {
        const double gain_db = range_db > 0.0 ? spread(rng) : 0.0;
        const double target = B * std::pow(10.0, gain_db / 10.0);
        const double current = ch.average_user_power(u);
        if (current <= 0.0) continue;
        const double scale = std::sqrt(target / current);
        for (auto& H : ch.per_subcarrier)
            for (std::size_t b = 0; b < H.rows(); ++b) H(b, u) *= scale;
    }
    return ch;
}

CVector transmit(const CMatrix& H, std::span<const cplx> s, const LinkNoise& noise, Rng& rng)
{
    CVector y = times(H, s);
    std::normal_distribution<double> n(0.0, std::sqrt(noise.no / 2.0));
    for (auto& v : y) {
        const double re = n(rng);
        const double im = n(rng);
        v += cplx(re, im);
    }
    return y;
}

}  // namespace fameeq
