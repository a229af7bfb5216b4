// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo link-level harness for the coded OFDM uplink:
//
//   info bits -> encode -> map -> y_w = H_w s_w + n_w -> equalize (unbiased)
//   -> NPI variance -> LLRs -> soft Viterbi
//
// SNR axis: per-receive-antenna SNR with unit average channel gain,
// No = U * Es / 10^(snr_db / 10).
//
// Every random draw comes from a stream derived from
// (master_seed, trial, purpose), so a trial's outcome does not depend on
// which worker runs it or in which order. Within one trial the channel,
// info bits and (unit-variance) noise are shared by all equalizers and SNR
// points.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fameeq/channel.hpp"
#include "fameeq/equalize.hpp"
#include "fameeq/fec.hpp"
#include "fameeq/modem.hpp"

namespace fameeq {

enum class EqualizerKind { LmmseInf, FlMmse, FameFbs };

struct EqualizerSpec {
    EqualizerKind kind = EqualizerKind::LmmseInf;
    int bits = 0;  // ignored for LmmseInf
    FbsSchedule fbs;

    /// "LMMSE_INF", "FLMMSE" or "FAME_FBS".
    std::string name() const;
    /// "inf" for LmmseInf, otherwise the bit count.
    std::string bits_label() const;
};

std::string to_string(EqualizerKind k);
/// Throws ConfigError on unknown names.
EqualizerKind parse_equalizer_kind(const std::string& s);

enum class ChannelModel { Rayleigh, GeoLos, GeoNlos };

std::string to_string(ChannelModel m);
ChannelModel parse_channel_model(const std::string& s);

struct ChannelSpec {
    ChannelModel model = ChannelModel::Rayleigh;
    GeometricChannelParams geometric;
    /// Absent: no power control (users keep their raw average gains).
    std::optional<double> power_control_db;
};

struct StopRule {
    std::size_t min_bit_errors = 500;
    std::size_t max_frames = 200;
};

struct SimConfig {
    std::size_t antennas = 256;      // B
    std::size_t users = 16;          // U
    std::size_t subcarriers = 300;   // W
    std::size_t ofdm_symbols = 1;    // channel uses per subcarrier per frame
    std::string modulation = "qam16";
    double es = 1.0;
    ChannelSpec channel;
    std::vector<EqualizerSpec> equalizers;
    std::vector<double> snr_db;
    StopRule stop;
    std::uint64_t master_seed = 1;
    DemapOptions demap;
    CodecSpec codec;
    unsigned threads = 0;  // 0: hardware concurrency, capped by FAMEEQ_THREADS

    /// Throws ConfigError.
    void validate() const;
    /// Info bits carried by one user's codeword in one frame.
    std::size_t info_bits_per_user() const;
    std::size_t coded_capacity_per_user() const;
};

/// No = U * Es / 10^(snr_db / 10).
double snr_to_no(double snr_db, double es, std::size_t users);

/// Generates the (power-controlled) channel for one trial.
ChannelRealization make_channel(const SimConfig& cfg, std::uint64_t trial);

struct UserOutcome {
    std::vector<std::uint8_t> decoded;  // empty when degenerate
    bool degenerate = false;
};

struct FrameResult {
    std::uint64_t trial = 0;
    std::vector<std::vector<std::uint8_t>> info;  // per user
    /// Indexed by point = equalizer * snr_count + snr; empty when inactive.
    std::vector<std::optional<std::vector<UserOutcome>>> points;
};

/// Runs one frame for every active (equalizer, SNR) point. An empty
/// `active` mask means all points.
FrameResult run_frame(const SimConfig& cfg, std::uint64_t trial,
                      const std::vector<bool>& active = {});

struct PointStats {
    std::size_t frames = 0;
    std::size_t bit_errors = 0;
    std::size_t bits_counted = 0;
    std::size_t frame_errors = 0;  // user codewords with at least one error
    std::size_t codewords = 0;
    std::size_t degenerate_users = 0;

    double ber() const;
    double fer() const;
    void add(const std::vector<std::uint8_t>& info, const UserOutcome& out);
};

struct BerRow {
    double snr_db = 0.0;
    std::string equalizer;
    std::string bits;
    PointStats stats;
};

struct BerReport {
    SimConfig config;
    std::vector<BerRow> rows;  // equalizer-major, SNR-minor
    double wall_seconds = 0.0;
    unsigned threads_used = 1;
};

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// FAMEEQ_THREADS environment variable, at least 1.
unsigned resolve_threads(unsigned requested);

/// Runs frames per point until the stop rule holds. Trials are processed in
/// batches of `threads`; per-point accumulation and stopping follow trial
/// order, so the report is identical for any worker count.
BerReport sweep(const SimConfig& cfg, unsigned threads);

/// Two-sided 95% Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

/// Empirical E|x^H y / x^H h_u - s_u|^2 over `draws` draws of 16-QAM
/// symbols (energy es) and CN(0, no I) noise.
double monte_carlo_npi_mse(const CMatrix& H, std::span<const cplx> x, std::size_t u, double es,
                           double no, std::size_t draws, Rng& rng);

}  // namespace fameeq
