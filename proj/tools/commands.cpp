// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fameeq/config.hpp"
#include "fameeq/errors.hpp"
#include "fameeq/random.hpp"
#include "fameeq/report.hpp"
#include "fameeq/serialize.hpp"

namespace fameeq::cli {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string snr;
    std::vector<std::string> equalizers;
    std::optional<std::size_t> frames;
    std::optional<unsigned> threads;
};

std::string num(double v, const char* spec = "%.6e")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<double> parse_list(const std::string& s, const char* what)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
    return out;
}

FileConfig load_optional(const CommonFlags& f)
{
    FileConfig fc = f.config.empty() ? FileConfig{} : load_config(f.config);
    if (f.seed) {
        fc.sim.master_seed = *f.seed;
        fc.mse_check.seed = *f.seed;
        fc.oracle_gap.seed = *f.seed;
    }
    return fc;
}

void ensure_dir(const std::string& dir)
{
    if (!dir.empty()) fs::create_directories(dir);
}

std::string join(const std::string& dir, const std::string& file)
{
    return dir.empty() ? file : (fs::path(dir) / file).string();
}

int ber_sweep(const CommonFlags& f, std::ostream& out)
{
    if (f.config.empty()) throw ConfigError("ber-sweep requires --config <path>");
    FileConfig fc = load_optional(f);
    SimConfig& cfg = fc.sim;
    if (!f.snr.empty()) cfg.snr_db = parse_list(f.snr, "--snr");
    if (!f.equalizers.empty()) {
        cfg.equalizers.clear();
        for (const auto& e : f.equalizers) cfg.equalizers.push_back(parse_equalizer_flag(e));
    }
    if (f.frames) cfg.stop.max_frames = *f.frames;
    if (f.threads) cfg.threads = *f.threads;
    cfg.validate();

    const unsigned threads = resolve_threads(cfg.threads);
    const BerReport rep = sweep(cfg, threads);

    const std::string dir = f.out.empty() ? "." : f.out;
    ensure_dir(dir);
    {
        std::ofstream csv(join(dir, "ber.csv"), std::ios::binary);
        write_ber_csv(csv, rep);
        if (!csv) throw Error("cannot write " + join(dir, "ber.csv"));
    }
    {
        std::ofstream js(join(dir, "ber.json"), std::ios::binary);
        write_ber_json(js, rep);
        if (!js) throw Error("cannot write " + join(dir, "ber.json"));
    }
    write_ber_csv(out, rep);
    out << "wrote " << join(dir, "ber.csv") << " and " << join(dir, "ber.json") << " ("
        << num(rep.wall_seconds, "%.1f") << " s, " << threads << " thread(s))\n";
    return kExitOk;
}

int mse_check(const CommonFlags& f, std::ostream& out)
{
    const FileConfig fc = load_optional(f);
    const MseCheckConfig& mc = fc.mse_check;
    const double es = 1.0;

    std::ostringstream csv;
    csv << kMseCheckHeader << '\n';
    double worst = 0.0;

    auto record = [&](std::size_t i, const std::string& kind, const std::string& bits,
                      double analytic, double mse) {
        // Relative deviation; the floor keeps the noiseless single-user case finite.
        const double dev = std::abs(mse - analytic) / std::max(analytic, 1e-12 * es);
        worst = std::max(worst, dev);
        csv << i << ',' << kind << ',' << bits << ',' << num(analytic) << ',' << num(mse) << ','
            << num(dev) << '\n';
    };

    for (std::size_t i = 0; i < mc.instances; ++i) {
        Rng rng = make_stream(mc.seed, i, StreamTag::Instance);
        const ChannelRealization ch = rayleigh_iid(mc.antennas, mc.users, 1, rng);
        const CMatrix& H = ch.per_subcarrier[0];
        const double no = snr_to_no(mc.snr_db, es, mc.users);
        const double rho = no / es;
        const std::size_t u = i % mc.users;
        const LmmseEqualizer lm = lmmse(H, rho);

        // Cycle through the infinite-precision row and each quantized width.
        const std::size_t variant = i % (mc.bits.size() + 1);
        CVector x;
        std::string kind, bits;
        if (variant == 0) {
            x = lm.row(u);
            kind = "LMMSE_INF";
            bits = "inf";
        } else {
            const int b = mc.bits[variant - 1];
            x = quantize_row(lm.row(u), b);
            kind = "FLMMSE";
            bits = std::to_string(b);
        }
        const double analytic = npi_variance(es, row_stats(H, u, x).bias_factor(rho));
        Rng draws = make_stream(mc.seed, i, StreamTag::Noise);
        const double mse = monte_carlo_npi_mse(H, x, u, es, no, mc.draws, draws);
        record(i, kind, bits, analytic, mse);
    }

    {
        // Single user, vanishing noise: no interference and no noise, so the
        // variance must collapse to zero.
        const std::size_t i = mc.instances;
        Rng rng = make_stream(mc.seed, i, StreamTag::Instance);
        const CMatrix H = rayleigh_iid(mc.antennas, 1, 1, rng).per_subcarrier[0];
        const double no = 1e-30;
        const CVector x = H.col(0);
        const double analytic = npi_variance(es, std::min(row_stats(H, 0, x).bias_factor(no / es), 1.0));
        Rng draws = make_stream(mc.seed, i, StreamTag::Noise);
        const double mse = monte_carlo_npi_mse(H, x, 0, es, no, mc.draws, draws);
        record(i, "MRC_SINGLE_USER", "inf", analytic, mse);
    }

    out << csv.str();
    if (!f.out.empty()) {
        ensure_dir(f.out);
        std::ofstream(join(f.out, "mse_check.csv"), std::ios::binary) << csv.str();
    }
    const bool pass = worst <= mc.tolerance;
    out << (pass ? "PASS" : "FAIL") << " max_rel_dev=" << num(worst, "%.4f")
        << " tolerance=" << num(mc.tolerance, "%.4f") << '\n';
    return pass ? kExitOk : kExitFailure;
}

double quantile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int oracle_gap(const CommonFlags& f, std::ostream& out)
{
    const FileConfig fc = load_optional(f);
    const OracleGapConfig& og = fc.oracle_gap;
    if (2 * og.antennas * static_cast<std::size_t>(og.bits) > 24)
        throw BudgetExceeded("oracle-gap: B=" + std::to_string(og.antennas) + ", b=" +
                             std::to_string(og.bits) + " exceeds the 2^24 enumeration budget");

    const double es = 1.0;
    const double rho = snr_to_no(og.snr_db, es, og.users) / es;
    std::ostringstream csv;
    csv << kOracleGapHeader << '\n';
    std::vector<double> fl_ratios, fbs_ratios;
    std::size_t fbs_wins = 0, rows = 0;
    bool violated = false;
    constexpr double inf = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < og.instances; ++i) {
        Rng rng = make_stream(og.seed, i, StreamTag::Instance);
        const CMatrix H = rayleigh_iid(og.antennas, og.users, 1, rng).per_subcarrier[0];
        const FiniteAlphabetEqualizer fl = flmmse(H, rho, og.bits, es);
        for (std::size_t u = 0; u < og.users; ++u) {
            const double opt = fame_bruteforce(H, rho, u, og.bits, es).objective;
            const double flo = fl.ok(u) ? fl.rows[u]->objective : inf;
            double fbo = inf;
            try {
                fbo = fame_fbs(H, rho, u, og.bits, og.fbs, es).objective;
            } catch (const DegenerateDirection&) {
            }
            const double flr = flo / opt, fbr = fbo / opt;
            // Relative slack for rounding between scale-equivalent rows.
            if (flr < 1.0 - 1e-12 || fbr < 1.0 - 1e-12) violated = true;
            fl_ratios.push_back(flr);
            fbs_ratios.push_back(fbr);
            fbs_wins += fbr <= flr;
            ++rows;
            csv << i << ',' << u << ',' << num(opt, "%.12e") << ',' << num(flo, "%.12e") << ','
                << num(fbo, "%.12e") << ',' << num(flr, "%.12e") << ',' << num(fbr, "%.12e") << '\n';
        }
    }

    const std::string dir = f.out.empty() ? "." : f.out;
    ensure_dir(dir);
    std::ofstream(join(dir, "oracle_gap.csv"), std::ios::binary) << csv.str();

    out << "oracle-gap: " << rows << " rows (B=" << og.antennas << ", U=" << og.users
        << ", b=" << og.bits << ") -> " << join(dir, "oracle_gap.csv") << '\n';
    for (const auto& [name, v] : {std::pair{"flmmse_ratio", fl_ratios}, std::pair{"fbs_ratio", fbs_ratios}}) {
        out << name << ": min=" << num(quantile(v, 0.0), "%.4f") << " median=" << num(quantile(v, 0.5), "%.4f")
            << " p90=" << num(quantile(v, 0.9), "%.4f") << " max=" << num(quantile(v, 1.0), "%.4f") << '\n';
    }
    out << "fbs <= flmmse in " << fbs_wins << " of " << rows << " rows\n";
    if (violated) {
        out << "FAIL: a heuristic beat the exhaustive optimum\n";
        return kExitFailure;
    }
    return kExitOk;
}

struct DemoFlags {
    std::string re;
    std::string im;
    int bits = 1;
    std::optional<double> w_max;
    std::string fixture_out;
    std::size_t antennas = 8;
    std::size_t users = 2;
    double snr_db = 10.0;
};

int quantize_demo(const CommonFlags& f, const DemoFlags& d, std::ostream& out)
{
    if (d.bits < 1 || d.bits > 8) throw ConfigError("--bits must be in 1..8");

    if (!d.fixture_out.empty()) {
        const std::uint64_t seed = f.seed.value_or(1);
        Rng rng = make_stream(seed, 0, StreamTag::Instance);
        const ChannelRealization ch = rayleigh_iid(d.antennas, d.users, 1, rng);
        const double rho = snr_to_no(d.snr_db, 1.0, d.users);
        const FiniteAlphabetEqualizer eq = flmmse(ch.per_subcarrier[0], rho, d.bits);
        {
            std::ofstream chf(d.fixture_out + ".channel.txt", std::ios::binary);
            write_channel(chf, ch);
        }
        {
            std::ofstream fae(d.fixture_out + ".fae.txt", std::ios::binary);
            write_equalizer(fae, eq);
        }
        out << "wrote " << d.fixture_out << ".channel.txt and " << d.fixture_out << ".fae.txt\n";
        return kExitOk;
    }

    if (d.re.empty()) throw ConfigError("quantize-demo needs --re <list> (and optionally --im)");
    const auto re = parse_list(d.re, "--re");
    const auto im = d.im.empty() ? std::vector<double>(re.size(), 0.0) : parse_list(d.im, "--im");
    if (im.size() != re.size()) throw ConfigError("--re and --im must have the same length");
    CVector w(re.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = {re[i], im[i]};

    double w_max = 0.0;
    for (const auto& v : w) w_max = std::max({w_max, std::abs(v.real()), std::abs(v.imag())});
    if (d.w_max) w_max = *d.w_max;
    const CVector q = quantize_row(w, d.bits, d.w_max);
    const long levels = 1L << d.bits;
    const double width = 2.0 * w_max / static_cast<double>(levels);

    out << "bits=" << d.bits << " w_max=" << num(w_max, "%.6g") << " bins=" << levels
        << " width=" << num(width, "%.6g") << " scale=" << num(static_cast<double>(levels) / w_max, "%.6g")
        << '\n';
    out << "bin,lower,upper,centroid,integer\n";
    for (long k = 0; k < levels; ++k) {
        const double lo = -w_max + static_cast<double>(k) * width;
        out << k << ',' << num(lo, "%.6g") << ',' << num(lo + width, "%.6g") << ','
            << num(lo + width / 2.0, "%.6g") << ',' << (2 * k + 1 - levels) << '\n';
    }
    out << "index,re,im,re_int,im_int\n";
    for (std::size_t i = 0; i < w.size(); ++i)
        out << i << ',' << num(w[i].real(), "%.6g") << ',' << num(w[i].imag(), "%.6g") << ','
            << std::lround(q[i].real()) << ',' << std::lround(q[i].imag()) << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"fameeq: soft-output finite-alphabet equalization for massive MU-MIMO"};
    app.require_subcommand(1);
    CommonFlags flags;
    DemoFlags demo;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "YAML configuration file");
        sub->add_option("--seed", flags.seed, "Master seed (overrides the config)");
        sub->add_option("--out", flags.out, "Output directory");
        sub->add_option("--threads", flags.threads, "Worker threads (capped by FAMEEQ_THREADS)");
    };

    auto* ber = app.add_subcommand("ber-sweep", "Coded BER versus SNR for each configured equalizer");
    add_common(ber);
    ber->add_option("--snr", flags.snr, "Comma-separated SNR points in dB");
    ber->add_option("--equalizer", flags.equalizers, "NAME[,bits]; repeatable, replaces the config list");
    ber->add_option("--frames", flags.frames, "Maximum frames per SNR point");

    auto* mse = app.add_subcommand("mse-check", "Analytic NPI variance versus Monte-Carlo MSE");
    add_common(mse);

    auto* gap = app.add_subcommand("oracle-gap", "Exhaustive FAME optimum versus FL-MMSE and FAME-FBS");
    add_common(gap);

    auto* qd = app.add_subcommand("quantize-demo", "Show uniform-bin row quantization or write fixtures");
    qd->add_option("--seed", flags.seed, "Seed for --fixture-out");
    qd->add_option("--re", demo.re, "Comma-separated real parts");
    qd->add_option("--im", demo.im, "Comma-separated imaginary parts");
    qd->add_option("--bits", demo.bits, "Bits per real dimension");
    qd->add_option("--wmax", demo.w_max, "Override the quantization range");
    qd->add_option("--fixture-out", demo.fixture_out,
                   "Write <prefix>.channel.txt and <prefix>.fae.txt for a seeded Rayleigh instance");
    qd->add_option("--antennas", demo.antennas, "Fixture B");
    qd->add_option("--users", demo.users, "Fixture U");
    qd->add_option("--snr", demo.snr_db, "Fixture SNR in dB");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (ber->parsed()) return ber_sweep(flags, out);
        if (mse->parsed()) return mse_check(flags, out);
        if (gap->parsed()) return oracle_gap(flags, out);
        if (qd->parsed()) return quantize_demo(flags, demo, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitConfig;
}

}  // namespace fameeq::cli
