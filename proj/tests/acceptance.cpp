// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "eigen_bridge.hpp"
#include "fameeq/config.hpp"
#include "fameeq/equalize.hpp"
#include "fameeq/fec.hpp"
#include "fameeq/simkit.hpp"
#include "oracles.hpp"

using namespace fameeq;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

CVector column(const CMatrix& H, std::size_t u)
{
    CVector h(H.rows());
    for (std::size_t b = 0; b < H.rows(); ++b) h[b] = H(b, u);
    return h;
}

cplx inner(const CVector& a, const CVector& b)
{
    cplx acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

// 1. Every L-MMSE row equals the per-user ridge solution.
Outcome lmmse_rows_match_ridge()
{
    const auto t0 = Clock::now();
    std::mt19937_64 g(101);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t U = 1 + g() % 16;
        const std::size_t B = U + g() % (65 - U);
        const double rho = std::pow(10.0, -2.0 + 3.0 * std::uniform_real_distribution<double>(0, 1)(g));
        const CMatrix H = oracle::random_matrix(B, U, g);
        const Eigen::MatrixXcd E = oracle::to_eigen(H);
        const Eigen::MatrixXcd A = rho * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(B)) +
                                   E * E.adjoint();
        const auto solver = A.ldlt();
        const auto eq = lmmse(H, rho);
        for (std::size_t u = 0; u < U; ++u) {
            const Eigen::VectorXcd w = solver.solve(E.col(static_cast<Eigen::Index>(u)));
            const CVector row = eq.row(u);
            double num = 0.0, den = 0.0;
            for (std::size_t b = 0; b < B; ++b) {
                num += std::norm(row[b] - w(static_cast<Eigen::Index>(b)));
                den += std::norm(w(static_cast<Eigen::Index>(b)));
            }
            worst = std::max(worst, std::sqrt(num / den));
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && t < 10.0, "max_rel=" + fmt("%.3e", worst) + " time=" + fmt("%.2fs", t)};
}

// 2. Closed-form NPI variance against Monte-Carlo MSE and the expanded form.
Outcome npi_variance_law()
{
    const auto t0 = Clock::now();
    std::mt19937_64 g(202);
    std::normal_distribution<double> n01(0.0, 1.0);
    const double levels[4] = {-3, -1, 1, 3};
    double worst_mc = 0.0, worst_alg = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t B = 8 + g() % 25, U = 2 + g() % 4;
        const double es = 1.0;
        const double no = std::pow(10.0, -1.0 + 2.0 * std::uniform_real_distribution<double>(0, 1)(g));
        const double rho = no / es;
        const CMatrix H = oracle::random_matrix(B, U, g);
        const std::size_t u = g() % U;
        // Alternate between quantized L-MMSE rows and arbitrary directions.
        CVector x = (k % 2 == 0) ? quantize_row(lmmse(H, rho).row(u), 1 + k % 3) : oracle::random_vector(B, g);
        const auto st = row_stats(H, u, x);
        const double nu = npi_variance(es, st.bias_factor(rho));

        const cplx gain = inner(x, column(H, u));
        double hx = 0.0;
        for (std::size_t i = 0; i < U; ++i) hx += std::norm(inner(column(H, i), x));
        const double expanded = (es * (hx - std::norm(gain)) + no * inner(x, x).real()) / std::norm(gain);
        worst_alg = std::max(worst_alg, oracle::rel_diff(nu, expanded));

        const double a = std::sqrt(es / 10.0), sn = std::sqrt(no / 2.0);
        double mse = 0.0;
        const int draws = 100000;
        CVector s(U), y(B);
        for (int d = 0; d < draws; ++d) {
            for (auto& v : s) v = {a * levels[g() & 3U], a * levels[g() & 3U]};
            for (std::size_t b = 0; b < B; ++b) {
                cplx acc{};
                for (std::size_t i = 0; i < U; ++i) acc += H(b, i) * s[i];
                const double re = n01(g), im = n01(g);
                y[b] = acc + cplx(sn * re, sn * im);
            }
            mse += std::norm(inner(x, y) / gain - s[u]);
        }
        mse /= draws;
        worst_mc = std::max(worst_mc, std::abs(mse - nu) / nu);
    }
    const double t = seconds_since(t0);
    return {worst_mc <= 0.03 && worst_alg <= 1e-12 && t < 60.0,
            "max_mc_rel=" + fmt("%.4f", worst_mc) + " max_alg_rel=" + fmt("%.3e", worst_alg) +
                " time=" + fmt("%.1fs", t)};
}

// 3. Scaling a row by any nonzero complex factor changes neither the
// unbiased estimate nor the objective.
Outcome scale_invariance()
{
    std::mt19937_64 g(303);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_est = 0.0, worst_obj = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t U = 1 + g() % 8, B = U + g() % 24;
        const CMatrix H = oracle::random_matrix(B, U, g);
        const std::size_t u = g() % U;
        const CVector x = oracle::random_vector(B, g);
        const CVector y = oracle::random_vector(B, g);
        const cplx alpha = std::polar(std::pow(10.0, -3.0 + 6.0 * unit(g)), 2.0 * M_PI * unit(g));
        CVector ax(x);
        for (auto& v : ax) v *= alpha;
        const double rho = std::pow(10.0, -2.0 + 3.0 * unit(g));
        worst_est = std::max(worst_est, oracle::rel_diff(equalize_unbiased(H, ax, u, y), equalize_unbiased(H, x, u, y)));
        worst_obj = std::max(worst_obj, oracle::rel_diff(fame_objective(H, rho, u, ax), fame_objective(H, rho, u, x)));
    }
    return {worst_est <= 1e-12 && worst_obj <= 1e-12,
            "max_estimate_rel=" + fmt("%.3e", worst_est) + " max_objective_rel=" + fmt("%.3e", worst_obj)};
}

// 4. The exhaustive optimum dominates both heuristics; FBS never loses to
// its own quantized initializer.
Outcome bruteforce_dominance()
{
    const auto t0 = Clock::now();
    std::mt19937_64 g(404);
    const FbsSchedule sched;
    int checked = 0, violations = 0;
    for (int k = 0; k < 50; ++k) {
        const CMatrix H = oracle::random_matrix(4, 2, g);
        const double rho = snr_to_no(10.0, 1.0, 2);
        const auto fl = flmmse(H, rho, 1);
        for (std::size_t u = 0; u < 2; ++u) {
            const double opt = fame_bruteforce(H, rho, u, 1).objective;
            const auto fbs = fame_fbs(H, rho, u, 1, sched);
            const CVector q0 = quantize_row(fbs_initial_iterate(H, u, 1, sched.init, nullptr), 1, 1.0);
            const double init_obj = fame_objective(H, rho, u, q0);
            const double tol = 1e-12;
            if (fl.ok(u) && opt > fl.rows[u]->objective * (1 + tol)) ++violations;
            if (opt > fbs.objective * (1 + tol)) ++violations;
            if (fbs.objective > init_obj * (1 + tol)) ++violations;
            ++checked;
        }
    }
    const double t = seconds_since(t0);
    return {violations == 0 && t < 60.0, "rows=" + std::to_string(checked) + " violations=" +
                                             std::to_string(violations) + " time=" + fmt("%.2fs", t)};
}

const BerRow* find_row(const BerReport& rep, const std::string& eq, double snr)
{
    for (const auto& r : rep.rows)
        if (r.equalizer == eq && r.snr_db == snr) return &r;
    return nullptr;
}

// SNR at which BER first crosses `target`, interpolating log10(BER)
// linearly in dB between the bracketing points.
std::optional<double> crossing(const BerReport& rep, const std::string& eq, double target)
{
    const auto& snrs = rep.config.snr_db;
    for (std::size_t i = 0; i + 1 < snrs.size(); ++i) {
        const double b0 = find_row(rep, eq, snrs[i])->stats.ber();
        const double b1 = find_row(rep, eq, snrs[i + 1])->stats.ber();
        if (b0 >= target && b1 < target) {
            if (b1 <= 0.0) return std::nullopt;  // no usable slope
            const double f = (std::log10(b0) - std::log10(target)) / (std::log10(b0) - std::log10(b1));
            return snrs[i] + f * (snrs[i + 1] - snrs[i]);
        }
    }
    return std::nullopt;
}

std::string config_path(const std::string& name) { return std::string(FAMEEQ_CONFIG_DIR) + "/" + name; }

// 5. 3-bit FL-MMSE and FAME-FBS within 2 dB of L-MMSE at coded BER 1e-3.
Outcome rayleigh_gap()
{
    const auto fc = load_config(config_path("rayleigh_3bit.yaml"));
    const SimConfig& cfg = fc.sim;
    const auto rep = sweep(cfg, resolve_threads(cfg.threads));
    const auto ref = crossing(rep, "LMMSE_INF", 1e-3);
    std::string detail;
    bool pass = ref.has_value();
    detail += "LMMSE_INF@1e-3=" + (ref ? fmt("%.2fdB", *ref) : std::string("n/a"));
    for (const std::string eq : {"FLMMSE", "FAME_FBS"}) {
        const auto c = crossing(rep, eq, 1e-3);
        const bool ok = ref && c && (*c - *ref) <= 2.0;
        pass = pass && ok;
        detail += " " + eq + "_gap=" + (ref && c ? fmt("%.2fdB", *c - *ref) : std::string("n/a"));
    }
    detail += " time=" + fmt("%.0fs", rep.wall_seconds);
    return {pass, detail};
}

// 6. On the geometric non-LoS channel, 1-bit FAME-FBS is never
// significantly worse than 1-bit FL-MMSE.
Outcome nlos_ordering()
{
    const auto fc = load_config(config_path("geo_nlos_1bit.yaml"));
    const SimConfig& cfg = fc.sim;
    const auto rep = sweep(cfg, resolve_threads(cfg.threads));
    bool pass = true;
    int gated = 0, point_wins = 0;
    std::string detail;
    for (const double snr : cfg.snr_db) {
        const auto& fl = find_row(rep, "FLMMSE", snr)->stats;
        const auto& fb = find_row(rep, "FAME_FBS", snr)->stats;
        if (fl.bit_errors <= 50 || fb.bit_errors <= 50) continue;
        ++gated;
        const auto ci_fl = wilson_interval(fl.bit_errors, fl.bits_counted);
        const auto ci_fb = wilson_interval(fb.bit_errors, fb.bits_counted);
        if (ci_fb.first > ci_fl.second) pass = false;
        point_wins += fb.ber() <= fl.ber();
        detail += fmt(" %gdB:", snr) + fmt("fl=%.2e/", fl.ber()) + fmt("fbs=%.2e", fb.ber());
    }
    if (gated == 0) pass = false;
    return {pass, "gated_points=" + std::to_string(gated) + " fbs_lower=" + std::to_string(point_wins) + detail +
                      " time=" + fmt("%.0fs", rep.wall_seconds)};
}

// 7. Convolutional code round trips and hard-decision equivalence.
Outcome fec_sanity()
{
    const auto spec = CodecSpec::rate_three_quarters();
    std::mt19937_64 g(707);
    int roundtrip_fail = 0, hard_fail = 0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<std::uint8_t> info(894);
        for (auto& b : info) b = static_cast<std::uint8_t>(g() & 1U);
        const auto coded = encode(spec, info);
        std::vector<double> llr(coded.size());
        for (std::size_t i = 0; i < coded.size(); ++i) llr[i] = coded[i] ? 20.0 : -20.0;
        roundtrip_fail += viterbi_soft(spec, llr, info.size()) != info;
    }
    std::bernoulli_distribution flip(0.05);
    for (int k = 0; k < 100; ++k) {
        std::vector<std::uint8_t> info(300);
        for (auto& b : info) b = static_cast<std::uint8_t>(g() & 1U);
        auto rx = encode(spec, info);
        for (auto& v : rx) v = static_cast<std::uint8_t>(v ^ flip(g));
        std::vector<double> llr(rx.size());
        for (std::size_t i = 0; i < rx.size(); ++i) llr[i] = rx[i] ? 1.0 : -1.0;
        const auto hard = oracle::hard_viterbi(spec.constraint_length, spec.generators[0], spec.generators[1],
                                               spec.puncture[0], spec.puncture[1], rx, info.size());
        hard_fail += viterbi_soft(spec, llr, info.size()) != hard;
    }
    return {roundtrip_fail == 0 && hard_fail == 0,
            "roundtrip_failures=" + std::to_string(roundtrip_fail) + "/1000 hard_mismatches=" +
                std::to_string(hard_fail) + "/100"};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 8. ber-sweep output is byte-identical across runs and thread counts.
Outcome determinism()
{
    const fs::path dir = fs::temp_directory_path() / "fameeq_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "det.yaml";
    std::ofstream(cfg) << "seed: 4242\n"
                          "system: {antennas: 32, users: 4, subcarriers: 48}\n"
                          "channel: {model: GEO_NLOS, power_control_db: 3}\n"
                          "equalizers:\n"
                          "  - {kind: LMMSE_INF}\n"
                          "  - {kind: FLMMSE, bits: 2}\n"
                          "  - {kind: FAME_FBS, bits: 2, fbs: {t_max: 4}}\n"
                          "snr_db: [-2, 2, 6]\n"
                          "stop: {min_bit_errors: 150, max_frames: 12}\n";
    ::unsetenv("FAMEEQ_THREADS");
    auto run_once = [&](const std::string& tag, const std::string& threads) {
        std::ostringstream out, err;
        const int code = cli::run({"ber-sweep", "--config", cfg.string(), "--out", (dir / tag).string(),
                                   "--threads", threads},
                                  out, err);
        return code == 0 ? slurp(dir / tag / "ber.csv") : std::string("exit " + std::to_string(code));
    };
    const std::string a = run_once("serial_a", "1");
    const std::string b = run_once("serial_b", "1");
    const std::string c = run_once("parallel", "4");
    const bool pass = !a.empty() && a.rfind("snr_db,", 0) == 0 && a == b && a == c;
    return {pass, std::string("serial_repeat=") + (a == b ? "identical" : "DIFFERENT") +
                      " serial_vs_4_threads=" + (a == c ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv)
{
    // Optional argument: comma-free list of criterion numbers to run, e.g. "1237".
    const std::string only = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"lmmse rows match the ridge oracle", lmmse_rows_match_ridge},
        {"npi variance matches Monte-Carlo MSE", npi_variance_law},
        {"scale invariance of estimate and objective", scale_invariance},
        {"exhaustive optimum dominates FL-MMSE and FAME-FBS", bruteforce_dominance},
        {"3-bit equalizers within 2 dB of L-MMSE on Rayleigh", rayleigh_gap},
        {"FAME-FBS not worse than FL-MMSE on 1-bit non-LoS", nlos_ordering},
        {"convolutional code sanity", fec_sanity},
        {"deterministic ber-sweep output", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const char id = static_cast<char>('1' + i);
        if (!only.empty() && only.find(id) == std::string::npos) continue;
        Outcome o{false, ""};
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s criterion %c: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
