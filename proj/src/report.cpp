// SPDX-License-Identifier: Apache-2.0
#include "fameeq/report.hpp"

#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace fameeq {

namespace {

using nlohmann::ordered_json;

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

ordered_json fbs_json(const FbsSchedule& f)
{
    ordered_json j;
    j["t_max"] = f.t_max;
    j["init"] = f.init == FbsInit::Mrc ? "MRC" : "FLMMSE";
    j["tau"] = f.tau.empty() ? ordered_json("auto") : ordered_json(f.tau);
    j["eta"] = f.eta.empty() ? ordered_json("auto") : ordered_json(f.eta);
    j["gamma"] = f.gamma;
    j["power_iters"] = f.power_iters;
    return j;
}

ordered_json config_json(const SimConfig& c)
{
    ordered_json j;
    j["seed"] = c.master_seed;
    j["system"] = {{"antennas", c.antennas},      {"users", c.users},
                   {"subcarriers", c.subcarriers}, {"ofdm_symbols", c.ofdm_symbols},
                   {"modulation", c.modulation},   {"es", c.es}};
    const auto& g = c.channel.geometric;
    j["channel"] = {
        {"model", to_string(c.channel.model)},
        {"power_control_db",
         c.channel.power_control_db ? ordered_json(*c.channel.power_control_db) : ordered_json(nullptr)},
        {"geometric",
         {{"antenna_spacing", g.antenna_spacing},
          {"num_clusters", g.num_clusters},
          {"cluster_power_decay_db", g.cluster_power_decay_db},
          {"angle_spread_deg", g.angle_spread_deg},
          {"user_angle_range_deg", g.user_angle_range_deg},
          {"max_delay_fraction", g.max_delay_fraction},
          {"los_k_factor", g.los_k_factor}}}};
    ordered_json eqs = ordered_json::array();
    for (const auto& e : c.equalizers) {
        ordered_json ej;
        ej["kind"] = e.name();
        if (e.kind != EqualizerKind::LmmseInf) ej["bits"] = e.bits;
        if (e.kind == EqualizerKind::FameFbs) ej["fbs"] = fbs_json(e.fbs);
        eqs.push_back(ej);
    }
    j["equalizers"] = eqs;
    j["snr_db"] = c.snr_db;
    j["stop"] = {{"min_bit_errors", c.stop.min_bit_errors}, {"max_frames", c.stop.max_frames}};
    j["demapper"] = {{"mode", c.demap.mode == DemapMode::Exact ? "exact" : "maxlog"},
                     {"llr_clamp", c.demap.llr_clamp}};
    char g0[16], g1[16];
    std::snprintf(g0, sizeof g0, "%o", c.codec.generators[0]);
    std::snprintf(g1, sizeof g1, "%o", c.codec.generators[1]);
    j["codec"] = {{"constraint_length", c.codec.constraint_length},
                  {"generators", {g0, g1}},
                  {"puncture", c.codec.puncture}};
    j["threads"] = c.threads;
    return j;
}

}  // namespace

void write_ber_csv(std::ostream& os, const BerReport& rep)
{
    os << kBerCsvHeader << '\n';
    for (const auto& r : rep.rows) {
        os << fmt("%g", r.snr_db) << ',' << r.equalizer << ',' << r.bits << ','
           << fmt("%.6e", r.stats.ber()) << ',' << fmt("%.6e", r.stats.fer()) << ','
           << r.stats.bit_errors << ',' << r.stats.bits_counted << ',' << r.stats.frames << '\n';
    }
}

std::string config_to_json(const SimConfig& cfg)
{
    return config_json(cfg).dump(2);
}

void write_ber_json(std::ostream& os, const BerReport& rep)
{
    ordered_json j;
    j["seed"] = rep.config.master_seed;
    j["snr_convention"] = "No = U * Es / 10^(snr_db/10), per-receive-antenna SNR, unit average channel gain";
    j["config"] = config_json(rep.config);
    j["info_bits_per_user_frame"] = rep.config.info_bits_per_user();
    ordered_json rows = ordered_json::array();
    for (const auto& r : rep.rows) {
        const auto [lo, hi] = wilson_interval(r.stats.bit_errors, r.stats.bits_counted);
        rows.push_back({{"snr_db", r.snr_db},
                        {"equalizer", r.equalizer},
                        {"bits", r.bits},
                        {"ber", r.stats.ber()},
                        {"ber_ci95", {lo, hi}},
                        {"fer", r.stats.fer()},
                        {"bit_errors", r.stats.bit_errors},
                        {"bits_counted", r.stats.bits_counted},
                        {"frame_errors", r.stats.frame_errors},
                        {"codewords", r.stats.codewords},
                        {"degenerate_users", r.stats.degenerate_users},
                        {"frames", r.stats.frames}});
    }
    j["results"] = rows;
    j["threads"] = rep.threads_used;
    j["wall_seconds"] = rep.wall_seconds;
    os << j.dump(2) << '\n';
}

}  // namespace fameeq
