// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "commands.hpp"

namespace fs = std::filesystem;
using fameeq::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(FAMEEQ_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("fameeq_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::size_t count_lines(const std::string& s)
{
    std::size_t n = 0;
    for (const char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("missing config is a configuration error naming the path")
{
    const auto r = invoke({"ber-sweep", "--config", "/nonexistent/path.yaml"});
    CHECK(r.code == fameeq::cli::kExitConfig);
    CHECK(r.err.find("/nonexistent/path.yaml") != std::string::npos);
}

TEST_CASE("bad config reports the line")
{
    const fs::path dir = scratch("badcfg");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.yaml") << "seed: 1\nsystem:\n  antenas: 4\n";
    const auto r = invoke({"ber-sweep", "--config", (dir / "bad.yaml").string()});
    CHECK(r.code == fameeq::cli::kExitConfig);
    CHECK(r.err.find("bad.yaml:3") != std::string::npos);
    CHECK(invoke({"no-such-command"}).code == fameeq::cli::kExitConfig);
}

TEST_CASE("smoke sweep writes one row per point and equalizer")
{
    const fs::path a = scratch("smoke_a"), b = scratch("smoke_b");
    const auto ra = invoke({"ber-sweep", "--config", config("smoke.yaml"), "--out", a.string()});
    REQUIRE(ra.code == 0);
    const std::string csv = slurp(a / "ber.csv");
    CHECK(csv.rfind("snr_db,equalizer,bits,ber,fer,bit_errors,bits_counted,frames\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 2 * 3);

    const auto js = nlohmann::json::parse(slurp(a / "ber.json"));
    CHECK(js.at("seed") == 7);
    CHECK(js.at("results").size() == 6);
    CHECK(js.at("config").at("system").at("antennas") == 8);

    REQUIRE(invoke({"ber-sweep", "--config", config("smoke.yaml"), "--out", b.string()}).code == 0);
    CHECK(slurp(b / "ber.csv") == csv);
}

TEST_CASE("flag overrides")
{
    const fs::path a = scratch("override");
    const auto r = invoke({"ber-sweep", "--config", config("smoke.yaml"), "--out", a.string(), "--snr", "3,4,5",
                           "--equalizer", "FLMMSE,1", "--frames", "1", "--seed", "99", "--threads", "2"});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(a / "ber.csv");
    CHECK(count_lines(csv) == 4);
    CHECK(csv.find("\n3,FLMMSE,1,") != std::string::npos);
    CHECK(csv.find(",1\n") != std::string::npos);
    CHECK(nlohmann::json::parse(slurp(a / "ber.json")).at("seed") == 99);

    CHECK(invoke({"ber-sweep", "--config", config("smoke.yaml"), "--equalizer", "FLMMSE"}).code ==
          fameeq::cli::kExitConfig);
}

TEST_CASE("mse-check passes on the default instances and is deterministic")
{
    const auto a = invoke({"mse-check", "--config", config("mse_check.yaml")});
    CHECK(a.code == 0);
    CHECK(a.out.find("PASS") != std::string::npos);
    CHECK(a.out.find("MRC_SINGLE_USER") != std::string::npos);
    CHECK(a.out.rfind("instance,kind,bits,analytic_nu_sq,mc_mse,rel_dev\n", 0) == 0);
    CHECK(invoke({"mse-check", "--config", config("mse_check.yaml")}).out == a.out);
}

TEST_CASE("oracle-gap never beats the exhaustive optimum and is reproducible")
{
    const fs::path a = scratch("gap_a"), b = scratch("gap_b");
    const auto r = invoke({"oracle-gap", "--config", config("oracle_gap.yaml"), "--out", a.string()});
    CHECK(r.code == 0);
    REQUIRE(invoke({"oracle-gap", "--config", config("oracle_gap.yaml"), "--out", b.string()}).code == 0);
    const std::string csv = slurp(a / "oracle_gap.csv");
    CHECK(csv == slurp(b / "oracle_gap.csv"));
    CHECK(count_lines(csv) == 1 + 50 * 2);

    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        const auto last = line.rfind(','), prev = line.rfind(',', last - 1);
        CHECK(std::stod(line.substr(last + 1)) >= 1.0 - 1e-12);
        CHECK(std::stod(line.substr(prev + 1, last - prev - 1)) >= 1.0 - 1e-12);
    }

    const fs::path dir = scratch("gap_budget");
    fs::create_directories(dir);
    std::ofstream(dir / "big.yaml") << "oracle_gap:\n  antennas: 13\n";
    CHECK(invoke({"oracle-gap", "--config", (dir / "big.yaml").string(), "--out", dir.string()}).code ==
          fameeq::cli::kExitConfig);
}

TEST_CASE("quantize-demo")
{
    const auto r = invoke({"quantize-demo", "--re", "0.9,-0.5,0.1,-1.0", "--bits", "1"});
    CHECK(r.code == 0);
    CHECK(!r.out.empty());
    CHECK(invoke({"quantize-demo", "--re", "0.1", "--bits", "9"}).code == fameeq::cli::kExitConfig);

    const fs::path dir = scratch("fixture");
    fs::create_directories(dir);
    const std::string prefix = (dir / "fx").string();
    REQUIRE(invoke({"quantize-demo", "--fixture-out", prefix, "--antennas", "8", "--users", "3", "--bits", "3",
                    "--snr", "10", "--seed", "7"})
                .code == 0);
    CHECK(slurp(prefix + ".fae.txt") == slurp(std::string(FAMEEQ_FIXTURE_DIR) + "/flmmse_b3.fae.txt"));
}
