// SPDX-License-Identifier: Apache-2.0
#include "fameeq/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "fameeq/errors.hpp"
#include "fameeq/random.hpp"

namespace fameeq {

namespace {

// Floor on the NPI variance handed to the demapper; only reached in the
// noiseless limit where the LLR clamp dominates anyway.
constexpr double kMinVarianceRatio = 1e-12;

struct SimRow {
    CVector x;
    cplx gain;  // x^H h_u
    double nu_sq = 0.0;
};

std::optional<SimRow> finish_row(const CMatrix& H, std::size_t u, CVector x, double rho, double es)
{
    const RowStats st = row_stats(H, u, x);
    if (st.degenerate()) return std::nullopt;
    SimRow r;
    r.gain = std::conj(st.gain);
    r.nu_sq = std::max(npi_variance(es, std::min(st.bias_factor(rho), 1.0)), es * kMinVarianceRatio);
    r.x = std::move(x);
    return r;
}

}  // namespace

std::string to_string(EqualizerKind k)
{
    switch (k) {
    case EqualizerKind::LmmseInf: return "LMMSE_INF";
    case EqualizerKind::FlMmse: return "FLMMSE";
    case EqualizerKind::FameFbs: return "FAME_FBS";
    }
    return "?";
}

EqualizerKind parse_equalizer_kind(const std::string& s)
{
    if (s == "LMMSE_INF") return EqualizerKind::LmmseInf;
    if (s == "FLMMSE") return EqualizerKind::FlMmse;
    if (s == "FAME_FBS") return EqualizerKind::FameFbs;
    throw ConfigError("unknown equalizer '" + s + "' (expected LMMSE_INF, FLMMSE or FAME_FBS)");
}

std::string EqualizerSpec::name() const { return to_string(kind); }

std::string EqualizerSpec::bits_label() const
{
    return kind == EqualizerKind::LmmseInf ? "inf" : std::to_string(bits);
}

std::string to_string(ChannelModel m)
{
    switch (m) {
    case ChannelModel::Rayleigh: return "RAYLEIGH";
    case ChannelModel::GeoLos: return "GEO_LOS";
    case ChannelModel::GeoNlos: return "GEO_NLOS";
    }
    return "?";
}

ChannelModel parse_channel_model(const std::string& s)
{
    if (s == "RAYLEIGH") return ChannelModel::Rayleigh;
    if (s == "GEO_LOS") return ChannelModel::GeoLos;
    if (s == "GEO_NLOS") return ChannelModel::GeoNlos;
    throw ConfigError("unknown channel model '" + s + "' (expected RAYLEIGH, GEO_LOS or GEO_NLOS)");
}

void SimConfig::validate() const
{
    if (antennas < 1 || users < 1 || subcarriers < 1 || ofdm_symbols < 1)
        throw ConfigError("B, U, W and ofdm_symbols must all be >= 1");
    if (!(es > 0.0)) throw ConfigError("Es must be > 0");
    if (snr_db.empty()) throw ConfigError("snr_db list must not be empty");
    if (equalizers.empty()) throw ConfigError("at least one equalizer is required");
    for (const auto& e : equalizers) {
        if (e.kind != EqualizerKind::LmmseInf && (e.bits < 1 || e.bits > 8))
            throw ConfigError(e.name() + ": bits must be in 1..8");
        if (e.kind == EqualizerKind::FameFbs) e.fbs.validate();
    }
    if (stop.max_frames < 1) throw ConfigError("stop.max_frames must be >= 1");
    if (channel.power_control_db && *channel.power_control_db < 0.0)
        throw ConfigError("power_control_db must be >= 0");
    if (channel.model != ChannelModel::Rayleigh) {
        auto p = channel.geometric;
        p.los = channel.model == ChannelModel::GeoLos;
        p.validate();
    }
    codec.validate();
    make_constellation(modulation, es);
    if (info_bits_per_user() < 1)
        throw ConfigError("frame too short: W * ofdm_symbols * Q cannot carry one info bit");
}

std::size_t SimConfig::coded_capacity_per_user() const
{
    return subcarriers * ofdm_symbols *
           static_cast<std::size_t>(make_constellation(modulation, es).bits_per_symbol());
}

std::size_t SimConfig::info_bits_per_user() const
{
    return max_info_bits(codec, coded_capacity_per_user());
}

double snr_to_no(double snr_db, double es, std::size_t users)
{
    return static_cast<double>(users) * es / std::pow(10.0, snr_db / 10.0);
}

ChannelRealization make_channel(const SimConfig& cfg, std::uint64_t trial)
{
    Rng rng = make_stream(cfg.master_seed, trial, StreamTag::Channel);
    ChannelRealization ch;
    if (cfg.channel.model == ChannelModel::Rayleigh) {
        ch = rayleigh_iid(cfg.antennas, cfg.users, cfg.subcarriers, rng);
    } else {
        auto p = cfg.channel.geometric;
        p.los = cfg.channel.model == ChannelModel::GeoLos;
        ch = geometric(cfg.antennas, cfg.users, cfg.subcarriers, p, rng);
    }
    if (cfg.channel.power_control_db) {
        Rng pc = make_stream(cfg.master_seed, trial, StreamTag::PowerControl);
        ch = apply_power_control(std::move(ch), *cfg.channel.power_control_db, pc);
    }
    return ch;
}

FrameResult run_frame(const SimConfig& cfg, std::uint64_t trial, const std::vector<bool>& active_in)
{
    const std::size_t B = cfg.antennas, U = cfg.users, W = cfg.subcarriers;
    const std::size_t S = cfg.ofdm_symbols;
    const std::size_t N = W * S;  // channel uses per user
    const std::size_t n_eq = cfg.equalizers.size(), n_snr = cfg.snr_db.size();
    const std::size_t n_points = n_eq * n_snr;
    const Constellation cons = make_constellation(cfg.modulation, cfg.es);
    const auto Q = static_cast<std::size_t>(cons.bits_per_symbol());
    const std::size_t capacity = N * Q;
    const std::size_t info_len = cfg.info_bits_per_user();
    const std::size_t coded_len = coded_length(cfg.codec, info_len);

    std::vector<bool> active = active_in.empty() ? std::vector<bool>(n_points, true) : active_in;
    if (active.size() != n_points) throw LengthMismatch("run_frame: active mask size mismatch");

    FrameResult result;
    result.trial = trial;
    result.points.resize(n_points);

    const ChannelRealization ch = make_channel(cfg, trial);

    // Info bits, codewords and symbols; fill bits past the codeword are random.
    Rng bit_rng = make_stream(cfg.master_seed, trial, StreamTag::InfoBits);
    std::bernoulli_distribution coin(0.5);
    result.info.resize(U);
    std::vector<CVector> symbols(U);
    for (std::size_t u = 0; u < U; ++u) {
        auto& info = result.info[u];
        info.resize(info_len);
        for (auto& b : info) b = static_cast<std::uint8_t>(coin(bit_rng));
        auto coded = encode(cfg.codec, info);
        coded.reserve(capacity);
        while (coded.size() < capacity) coded.push_back(static_cast<std::uint8_t>(coin(bit_rng)));
        symbols[u] = map_bits(cons, coded);
    }

    // Noise-free receive vectors and unit-variance noise, shared by all points.
    Rng noise_rng = make_stream(cfg.master_seed, trial, StreamTag::Noise);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<CVector> clean(N), noise(N);
    CVector s(U);
    for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t u = 0; u < U; ++u) s[u] = symbols[u][k];
        clean[k] = times(ch.per_subcarrier[k % W], s);
        noise[k].resize(B);
        for (auto& v : noise[k]) {
            const double re = gauss(noise_rng);
            const double im = gauss(noise_rng);
            v = {re, im};
        }
    }

    auto point = [&](std::size_t i, std::size_t j) { return i * n_snr + j; };
    std::vector<std::vector<std::vector<double>>> llr(n_points);
    std::vector<std::vector<bool>> degenerate(n_points);
    for (std::size_t p = 0; p < n_points; ++p) {
        if (!active[p]) continue;
        llr[p].assign(U, std::vector<double>(capacity, 0.0));
        degenerate[p].assign(U, false);
    }

    std::vector<double> tmp;
    std::vector<CVector> y(S, CVector(B));
    for (std::size_t w = 0; w < W; ++w) {
        const CMatrix& H = ch.per_subcarrier[w];
        const CMatrix G = gram(H);
        // lambda_max(H^H H) per power-iteration count, computed on demand.
        std::map<int, double> lambda_cache;
        auto lambda_for = [&](const FbsSchedule& f) {
            if (!f.tau.empty()) return 0.0;
            auto it = lambda_cache.find(f.power_iters);
            if (it == lambda_cache.end())
                it = lambda_cache.emplace(f.power_iters, largest_eigenvalue_estimate(G, f.power_iters)).first;
            return it->second;
        };

        // MRC-initialized FBS iterates do not depend on rho; compute them once
        // per subcarrier and only redo the candidate selection per SNR.
        std::vector<std::vector<std::vector<FbsCandidate>>> mrc_candidates(n_eq);
        for (std::size_t i = 0; i < n_eq; ++i) {
            const auto& e = cfg.equalizers[i];
            if (e.kind != EqualizerKind::FameFbs || e.fbs.init != FbsInit::Mrc) continue;
            bool any = false;
            for (std::size_t j = 0; j < n_snr; ++j) any = any || active[point(i, j)];
            if (!any) continue;
            mrc_candidates[i].resize(U);
            const double lam = lambda_for(e.fbs);
            for (std::size_t u = 0; u < U; ++u)
                mrc_candidates[i][u] = fbs_candidates(
                    H, u, e.bits, e.fbs, fbs_initial_iterate(H, u, e.bits, FbsInit::Mrc, nullptr),
                    lam);
        }

        for (std::size_t j = 0; j < n_snr; ++j) {
            bool any = false;
            for (std::size_t i = 0; i < n_eq; ++i) any = any || active[point(i, j)];
            if (!any) continue;

            const double no = snr_to_no(cfg.snr_db[j], cfg.es, U);
            const double sigma = std::sqrt(no);
            const double rho = no / cfg.es;
            for (std::size_t m = 0; m < S; ++m) {
                const std::size_t k = w + m * W;
                for (std::size_t b = 0; b < B; ++b) y[m][b] = clean[k][b] + sigma * noise[k][b];
            }

            std::optional<LmmseEqualizer> lm;
            auto get_lm = [&]() -> const LmmseEqualizer& {
                if (!lm) lm = lmmse(H, G, rho);
                return *lm;
            };

            for (std::size_t i = 0; i < n_eq; ++i) {
                const std::size_t p = point(i, j);
                if (!active[p]) continue;
                const auto& e = cfg.equalizers[i];

                std::vector<std::optional<SimRow>> rows(U);
                switch (e.kind) {
                case EqualizerKind::LmmseInf:
                    for (std::size_t u = 0; u < U; ++u)
                        rows[u] = finish_row(H, u, get_lm().row(u), rho, cfg.es);
                    break;
                case EqualizerKind::FlMmse:
                    for (std::size_t u = 0; u < U; ++u) {
                        CVector x = get_lm().row(u);
                        if (norm_sq(x) == 0.0) continue;
                        rows[u] = finish_row(H, u, quantize_row(x, e.bits), rho, cfg.es);
                    }
                    break;
                case EqualizerKind::FameFbs:
                    for (std::size_t u = 0; u < U; ++u) {
                        std::vector<FbsCandidate> own;
                        const std::vector<FbsCandidate>* cands = nullptr;
                        if (e.fbs.init == FbsInit::Mrc) {
                            cands = &mrc_candidates[i][u];
                        } else {
                            CVector w_u = get_lm().row(u);
                            if (norm_sq(w_u) == 0.0) continue;
                            const CVector fl = quantize_row(w_u, e.bits);
                            own = fbs_candidates(
                                H, u, e.bits, e.fbs,
                                fbs_initial_iterate(H, u, e.bits, FbsInit::FlMmse, &fl),
                                lambda_for(e.fbs));
                            cands = &own;
                        }
                        const auto best = select_best(*cands, rho);
                        if (!best) continue;
                        rows[u] = finish_row(H, u, (*cands)[*best].x, rho, cfg.es);
                    }
                    break;
                }

                for (std::size_t u = 0; u < U; ++u) {
                    if (!rows[u]) {
                        degenerate[p][u] = true;
                        continue;
                    }
                    const SimRow& r = *rows[u];
                    for (std::size_t m = 0; m < S; ++m) {
                        const std::size_t k = w + m * W;
                        const cplx s_hat = dot(r.x, y[m]) / r.gain;
                        tmp.clear();
                        soft_demap_into(cons, s_hat, r.nu_sq, cfg.demap, tmp);
                        std::copy(tmp.begin(), tmp.end(), llr[p][u].begin() + static_cast<std::ptrdiff_t>(k * Q));
                    }
                }
            }
        }
    }

    for (std::size_t p = 0; p < n_points; ++p) {
        if (!active[p]) continue;
        std::vector<UserOutcome> outs(U);
        for (std::size_t u = 0; u < U; ++u) {
            if (degenerate[p][u]) {
                outs[u].degenerate = true;
                continue;
            }
            outs[u].decoded = viterbi_soft(
                cfg.codec, std::span<const double>(llr[p][u].data(), coded_len), info_len);
        }
        result.points[p] = std::move(outs);
    }
    return result;
}

double PointStats::ber() const
{
    return bits_counted ? static_cast<double>(bit_errors) / static_cast<double>(bits_counted) : 0.0;
}

double PointStats::fer() const
{
    return codewords ? static_cast<double>(frame_errors) / static_cast<double>(codewords) : 0.0;
}

void PointStats::add(const std::vector<std::uint8_t>& info, const UserOutcome& out)
{
    ++codewords;
    bits_counted += info.size();
    if (out.degenerate) {
        // Counted pessimistically: every info bit of the user-frame is wrong.
        ++degenerate_users;
        bit_errors += info.size();
        ++frame_errors;
        return;
    }
    std::size_t errs = 0;
    for (std::size_t i = 0; i < info.size(); ++i) errs += info[i] != out.decoded[i];
    bit_errors += errs;
    frame_errors += errs > 0;
}

unsigned resolve_threads(unsigned requested)
{
    unsigned n = requested ? requested : std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FAMEEQ_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return std::max(1U, n);
}

BerReport sweep(const SimConfig& cfg, unsigned threads)
{
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    threads = std::max(1U, threads);
    const std::size_t n_eq = cfg.equalizers.size(), n_snr = cfg.snr_db.size();
    const std::size_t n_points = n_eq * n_snr;
    const std::size_t U = cfg.users;

    std::vector<PointStats> stats(n_points);
    std::vector<bool> done(n_points, false);
    auto finished = [&](const PointStats& st) {
        return st.frames >= cfg.stop.max_frames ||
               (st.frames >= 1 && st.bit_errors >= cfg.stop.min_bit_errors);
    };

    std::uint64_t next_trial = 0;
    while (std::find(done.begin(), done.end(), false) != done.end()) {
        const std::vector<bool> active = [&] {
            std::vector<bool> a(n_points);
            for (std::size_t p = 0; p < n_points; ++p) a[p] = !done[p];
            return a;
        }();

        std::vector<FrameResult> batch(threads);
        std::atomic<std::size_t> cursor{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t k; (k = cursor.fetch_add(1)) < batch.size();) {
                try {
                    batch[k] = run_frame(cfg, next_trial + k, active);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        }
        if (failure) std::rethrow_exception(failure);

        for (const auto& fr : batch) {
            for (std::size_t p = 0; p < n_points; ++p) {
                if (!active[p] || done[p]) continue;
                auto& st = stats[p];
                ++st.frames;
                for (std::size_t u = 0; u < U; ++u) st.add(fr.info[u], (*fr.points[p])[u]);
                if (finished(st)) done[p] = true;
            }
        }
        next_trial += threads;
    }

    BerReport rep;
    rep.config = cfg;
    rep.threads_used = threads;
    for (std::size_t i = 0; i < n_eq; ++i)
        for (std::size_t j = 0; j < n_snr; ++j)
            rep.rows.push_back({cfg.snr_db[j], cfg.equalizers[i].name(),
                                cfg.equalizers[i].bits_label(), stats[i * n_snr + j]});
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z)
{
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

double monte_carlo_npi_mse(const CMatrix& H, std::span<const cplx> x, std::size_t u, double es,
                           double no, std::size_t draws, Rng& rng)
{
    const Constellation cons = make_qam16(es);
    const std::size_t B = H.rows(), U = H.cols();
    std::uniform_int_distribution<std::size_t> pick(0, cons.size() - 1);
    std::normal_distribution<double> gauss(0.0, std::sqrt(no / 2.0));
    CVector s(U), y;
    double acc = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        for (auto& v : s) v = cons.point(pick(rng));
        y = times(H, s);
        for (std::size_t b = 0; b < B; ++b) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            y[b] += cplx(re, im);
        }
        acc += std::norm(equalize_unbiased(H, x, u, y) - s[u]);
    }
    return acc / static_cast<double>(draws);
}

}  // namespace fameeq
