// SPDX-License-Identifier: Apache-2.0
//
// Channel realizations for the OFDM uplink: one B x U matrix per subcarrier.
//
// Two generators are provided. `rayleigh_iid` draws every entry from
// CN(0, 1). `geometric` is a cluster-based plane-wave model for a uniform
// linear array; it stands in for a full mmWave ray-tracing/stochastic
// generator and only reproduces the qualitative LoS / non-LoS distinction
// (a dominant direct path versus a few comparable scattered paths).
#pragma once

#include <cstddef>
#include <vector>

#include "fameeq/numerics.hpp"
#include "fameeq/random.hpp"

namespace fameeq {

struct ChannelRealization {
    std::size_t antennas = 0;     // B
    std::size_t users = 0;        // U
    std::vector<CMatrix> per_subcarrier;  // W matrices, each B x U

    std::size_t subcarriers() const { return per_subcarrier.size(); }

    /// Mean over subcarriers of ||h_{u,w}||^2.
    double average_user_power(std::size_t u) const;
};

struct GeometricChannelParams {
    double antenna_spacing = 0.5;        // in wavelengths
    std::size_t num_clusters = 4;
    bool los = false;
    double cluster_power_decay_db = 3.0;  // per cluster index
    double angle_spread_deg = 25.0;       // std-dev of cluster angle around the user direction
    double user_angle_range_deg = 60.0;   // user directions ~ U[-range, range]
    /// Path delays ~ U[0, max] in units of the OFDM symbol duration
    /// (delay times subcarrier spacing). Phase advance per subcarrier is
    /// 2*pi*delay.
    double max_delay_fraction = 0.02;
    /// LoS only: power of the direct cluster relative to all others combined.
    double los_k_factor = 10.0;

    void validate() const;
};

struct LinkNoise {
    double es = 1.0;  // per-symbol transmit energy
    double no = 1.0;  // complex noise variance per receive antenna

    double rho() const { return no / es; }
};

ChannelRealization rayleigh_iid(std::size_t B, std::size_t U, std::size_t W, Rng& rng);

ChannelRealization geometric(std::size_t B, std::size_t U, std::size_t W,
                             const GeometricChannelParams& params, Rng& rng);

/// a(theta)_b = exp(j 2 pi spacing b sin(theta)), theta in radians.
CVector array_response(std::size_t B, double spacing, double theta);

/// Normalized (sum = 1) cluster powers. With `los` and more than one
/// cluster, cluster 0 carries exactly k_factor times the rest combined.
std::vector<double> cluster_powers(const GeometricChannelParams& params);

/// Rescales each user's columns (across all subcarriers) so its average
/// receive power becomes B * g_u, g_u uniform in dB over [-range, +range].
ChannelRealization apply_power_control(ChannelRealization ch, double range_db, Rng& rng);

/// y = H s + n, n ~ CN(0, No I).
CVector transmit(const CMatrix& H, std::span<const cplx> s, const LinkNoise& noise, Rng& rng);

}  // namespace fameeq
