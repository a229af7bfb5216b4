// SPDX-License-Identifier: Apache-2.0
#include "fameeq/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "fameeq/errors.hpp"

namespace fameeq {

namespace {

class Parser {
public:
    explicit Parser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const
    {
        const int line = node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
        throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg, line);
    }

    void keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const char* where) const
    {
        if (!map.IsMap()) fail(map, std::string(where) + " must be a mapping");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : map) {
            const auto k = kv.first.as<std::string>();
            if (!ok.count(k)) fail(kv.first, "unknown key '" + k + "' in " + where);
        }
    }

    template <class T>
    T get(const YAML::Node& node, const char* what) const
    {
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, std::string("invalid value for ") + what);
        }
    }

    std::size_t count(const YAML::Node& node, const char* what) const
    {
        const long v = get<long>(node, what);
        if (v < 0) fail(node, std::string(what) + " must be non-negative");
        return static_cast<std::size_t>(v);
    }

    std::vector<double> doubles(const YAML::Node& node, const char* what) const
    {
        if (node.IsScalar()) {
            if (node.Scalar() == "auto") return {};
            return {get<double>(node, what)};
        }
        if (!node.IsSequence()) fail(node, std::string(what) + " must be 'auto', a number or a list");
        std::vector<double> out;
        for (const auto& v : node) out.push_back(get<double>(v, what));
        return out;
    }

    FbsSchedule fbs(const YAML::Node& n) const
    {
        FbsSchedule f;
        keys(n, {"t_max", "init", "tau", "eta", "gamma", "power_iters"}, "fbs");
        if (n["t_max"]) f.t_max = get<int>(n["t_max"], "t_max");
        if (n["init"]) {
            const auto s = get<std::string>(n["init"], "init");
            if (s == "MRC")
                f.init = FbsInit::Mrc;
            else if (s == "FLMMSE")
                f.init = FbsInit::FlMmse;
            else
                fail(n["init"], "init must be MRC or FLMMSE");
        }
        if (n["tau"]) f.tau = doubles(n["tau"], "tau");
        if (n["eta"]) f.eta = doubles(n["eta"], "eta");
        if (n["gamma"]) {
            f.gamma = doubles(n["gamma"], "gamma");
            if (f.gamma.empty()) fail(n["gamma"], "gamma has no automatic value");
        }
        if (n["power_iters"]) f.power_iters = get<int>(n["power_iters"], "power_iters");
        try {
            f.validate();
        } catch (const ConfigError& e) {
            fail(n, e.what());
        }
        return f;
    }

    EqualizerSpec equalizer(const YAML::Node& n) const
    {
        keys(n, {"kind", "bits", "fbs"}, "equalizer");
        if (!n["kind"]) fail(n, "equalizer needs a 'kind'");
        EqualizerSpec e;
        try {
            e.kind = parse_equalizer_kind(get<std::string>(n["kind"], "kind"));
        } catch (const ConfigError& err) {
            fail(n["kind"], err.what());
        }
        if (e.kind != EqualizerKind::LmmseInf) {
            if (!n["bits"]) fail(n, e.name() + " needs 'bits'");
            e.bits = get<int>(n["bits"], "bits");
            if (e.bits < 1 || e.bits > 8) fail(n["bits"], "bits must be in 1..8");
        }
        if (n["fbs"]) {
            if (e.kind != EqualizerKind::FameFbs) fail(n["fbs"], "'fbs' only applies to FAME_FBS");
            e.fbs = fbs(n["fbs"]);
        }
        return e;
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
};

}  // namespace

EqualizerSpec parse_equalizer_flag(const std::string& flag)
{
    const auto comma = flag.find(',');
    EqualizerSpec e;
    e.kind = parse_equalizer_kind(flag.substr(0, comma));
    if (e.kind != EqualizerKind::LmmseInf) {
        if (comma == std::string::npos)
            throw ConfigError("--equalizer " + flag + ": expected NAME,bits");
        try {
            e.bits = std::stoi(flag.substr(comma + 1));
        } catch (const std::exception&) {
            throw ConfigError("--equalizer " + flag + ": bits is not an integer");
        }
        if (e.bits < 1 || e.bits > 8) throw ConfigError("--equalizer " + flag + ": bits must be in 1..8");
    }
    return e;
}

FileConfig parse_config(const std::string& text, const std::string& source)
{
    Parser P(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        const int line = e.mark.line + 1;
        throw ConfigError(source + ":" + std::to_string(line) + ": " + e.msg, line);
    }

    FileConfig fc;
    if (root.IsNull()) return fc;
    P.keys(root, {"seed", "threads", "system", "channel", "equalizers", "snr_db", "stop", "demapper",
                  "codec", "mse_check", "oracle_gap"},
           "top level");

    SimConfig& c = fc.sim;
    if (root["seed"]) {
        c.master_seed = P.get<std::uint64_t>(root["seed"], "seed");
        fc.mse_check.seed = c.master_seed;
        fc.oracle_gap.seed = c.master_seed;
    }
    if (root["threads"]) c.threads = P.get<unsigned>(root["threads"], "threads");

    if (const auto s = root["system"]) {
        P.keys(s, {"antennas", "users", "subcarriers", "ofdm_symbols", "modulation", "es"}, "system");
        if (s["antennas"]) c.antennas = P.count(s["antennas"], "antennas");
        if (s["users"]) c.users = P.count(s["users"], "users");
        if (s["subcarriers"]) c.subcarriers = P.count(s["subcarriers"], "subcarriers");
        if (s["ofdm_symbols"]) c.ofdm_symbols = P.count(s["ofdm_symbols"], "ofdm_symbols");
        if (s["modulation"]) {
            c.modulation = P.get<std::string>(s["modulation"], "modulation");
            if (c.modulation != "qam16" && c.modulation != "qpsk")
                P.fail(s["modulation"], "modulation must be qam16 or qpsk");
        }
        if (s["es"]) c.es = P.get<double>(s["es"], "es");
    }

    if (const auto ch = root["channel"]) {
        P.keys(ch, {"model", "power_control_db", "geometric"}, "channel");
        if (ch["model"]) {
            try {
                c.channel.model = parse_channel_model(P.get<std::string>(ch["model"], "model"));
            } catch (const ConfigError& e) {
                P.fail(ch["model"], e.what());
            }
        }
        if (ch["power_control_db"] && !ch["power_control_db"].IsNull())
            c.channel.power_control_db = P.get<double>(ch["power_control_db"], "power_control_db");
        if (const auto g = ch["geometric"]) {
            P.keys(g, {"antenna_spacing", "num_clusters", "cluster_power_decay_db", "angle_spread_deg",
                       "user_angle_range_deg", "max_delay_fraction", "los_k_factor"},
                   "geometric");
            auto& p = c.channel.geometric;
            if (g["antenna_spacing"]) p.antenna_spacing = P.get<double>(g["antenna_spacing"], "antenna_spacing");
            if (g["num_clusters"]) p.num_clusters = P.count(g["num_clusters"], "num_clusters");
            if (g["cluster_power_decay_db"])
                p.cluster_power_decay_db = P.get<double>(g["cluster_power_decay_db"], "cluster_power_decay_db");
            if (g["angle_spread_deg"]) p.angle_spread_deg = P.get<double>(g["angle_spread_deg"], "angle_spread_deg");
            if (g["user_angle_range_deg"])
                p.user_angle_range_deg = P.get<double>(g["user_angle_range_deg"], "user_angle_range_deg");
            if (g["max_delay_fraction"])
                p.max_delay_fraction = P.get<double>(g["max_delay_fraction"], "max_delay_fraction");
            if (g["los_k_factor"]) p.los_k_factor = P.get<double>(g["los_k_factor"], "los_k_factor");
        }
    }

    if (const auto eqs = root["equalizers"]) {
        fc.has_sim = true;
        if (!eqs.IsSequence()) P.fail(eqs, "equalizers must be a list");
        for (const auto& e : eqs) c.equalizers.push_back(P.equalizer(e));
    }
    if (const auto snr = root["snr_db"]) {
        fc.has_sim = true;
        c.snr_db = P.doubles(snr, "snr_db");
        if (c.snr_db.empty()) P.fail(snr, "snr_db must list at least one value");
    }
    if (const auto st = root["stop"]) {
        P.keys(st, {"min_bit_errors", "max_frames"}, "stop");
        if (st["min_bit_errors"]) c.stop.min_bit_errors = P.count(st["min_bit_errors"], "min_bit_errors");
        if (st["max_frames"]) c.stop.max_frames = P.count(st["max_frames"], "max_frames");
    }
    if (const auto d = root["demapper"]) {
        P.keys(d, {"mode", "llr_clamp"}, "demapper");
        if (d["mode"]) {
            const auto m = P.get<std::string>(d["mode"], "mode");
            if (m == "exact")
                c.demap.mode = DemapMode::Exact;
            else if (m == "maxlog")
                c.demap.mode = DemapMode::MaxLog;
            else
                P.fail(d["mode"], "demapper mode must be exact or maxlog");
        }
        if (d["llr_clamp"]) c.demap.llr_clamp = P.get<double>(d["llr_clamp"], "llr_clamp");
    }
    if (const auto cd = root["codec"]) {
        P.keys(cd, {"constraint_length", "generators", "puncture"}, "codec");
        if (cd["constraint_length"]) c.codec.constraint_length = P.get<int>(cd["constraint_length"], "constraint_length");
        if (const auto g = cd["generators"]) {
            if (!g.IsSequence() || g.size() != 2) P.fail(g, "generators must list two octal strings");
            for (std::size_t j = 0; j < 2; ++j) {
                const auto txt = P.get<std::string>(g[j], "generator");
                try {
                    std::size_t used = 0;
                    c.codec.generators[j] = static_cast<unsigned>(std::stoul(txt, &used, 8));
                    if (used != txt.size()) throw std::invalid_argument(txt);
                } catch (const std::exception&) {
                    P.fail(g[j], "generator '" + txt + "' is not octal");
                }
            }
        }
        if (const auto pn = cd["puncture"]) {
            if (!pn.IsSequence() || pn.size() != 2) P.fail(pn, "puncture must hold two rows");
            for (std::size_t j = 0; j < 2; ++j) {
                c.codec.puncture[j].clear();
                for (const auto& v : pn[j]) c.codec.puncture[j].push_back(P.get<int>(v, "puncture") ? 1 : 0);
            }
        }
        try {
            c.codec.validate();
        } catch (const ConfigError& e) {
            P.fail(cd, e.what());
        }
    }

    if (const auto m = root["mse_check"]) {
        P.keys(m, {"instances", "antennas", "users", "draws", "snr_db", "bits", "tolerance"}, "mse_check");
        auto& mc = fc.mse_check;
        if (m["instances"]) mc.instances = P.count(m["instances"], "instances");
        if (m["antennas"]) mc.antennas = P.count(m["antennas"], "antennas");
        if (m["users"]) mc.users = P.count(m["users"], "users");
        if (m["draws"]) mc.draws = P.count(m["draws"], "draws");
        if (m["snr_db"]) mc.snr_db = P.get<double>(m["snr_db"], "snr_db");
        if (m["tolerance"]) mc.tolerance = P.get<double>(m["tolerance"], "tolerance");
        if (m["bits"]) {
            mc.bits.clear();
            for (const auto& b : m["bits"]) mc.bits.push_back(P.get<int>(b, "bits"));
        }
        if (mc.instances < 1 || mc.antennas < 1 || mc.users < 1 || mc.draws < 1 || mc.bits.empty())
            P.fail(m, "mse_check counts must be >= 1 and bits nonempty");
    }
    if (const auto o = root["oracle_gap"]) {
        P.keys(o, {"instances", "antennas", "users", "bits", "snr_db", "fbs"}, "oracle_gap");
        auto& og = fc.oracle_gap;
        if (o["instances"]) og.instances = P.count(o["instances"], "instances");
        if (o["antennas"]) og.antennas = P.count(o["antennas"], "antennas");
        if (o["users"]) og.users = P.count(o["users"], "users");
        if (o["bits"]) og.bits = P.get<int>(o["bits"], "bits");
        if (o["snr_db"]) og.snr_db = P.get<double>(o["snr_db"], "snr_db");
        if (o["fbs"]) og.fbs = P.fbs(o["fbs"]);
        if (og.instances < 1 || og.antennas < 1 || og.users < 1 || og.bits < 1 || og.bits > 8)
            P.fail(o, "oracle_gap counts must be >= 1 and bits in 1..8");
    }

    return fc;
}

FileConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace fameeq
