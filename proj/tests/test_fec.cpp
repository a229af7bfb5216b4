// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <random>

#include "fameeq/errors.hpp"
#include "fameeq/fec.hpp"
#include "oracles.hpp"

using namespace fameeq;

namespace {

using Bits = std::vector<std::uint8_t>;

Bits random_bits(std::size_t n, std::mt19937_64& g)
{
    Bits b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(g() & 1U);
    return b;
}

std::vector<double> perfect_llrs(const Bits& coded, double mag)
{
    std::vector<double> l(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i) l[i] = coded[i] ? mag : -mag;
    return l;
}

double path_metric(const Bits& coded, const std::vector<double>& llrs)
{
    double m = 0.0;
    for (std::size_t i = 0; i < coded.size(); ++i) m += coded[i] ? llrs[i] / 2 : -llrs[i] / 2;
    return m;
}

}  // namespace

TEST_CASE("coded length")
{
    const auto spec = CodecSpec::rate_three_quarters();
    for (std::size_t n = 1; n < 200; ++n) {
        CHECK(coded_length(spec, n) == ((n + 6) * 4 + 2) / 3);
        CHECK(encode(spec, Bits(n, 0)).size() == coded_length(spec, n));
    }
    CHECK(max_info_bits(spec, 2400) == 1794);
    CHECK(coded_length(spec, 1794) <= 2400);
    CHECK(coded_length(spec, 1795) > 2400);
    CHECK(max_info_bits(spec, 9) == 0);
    CHECK(coded_length(CodecSpec::rate_half(), 10) == 32);
}

TEST_CASE("encoder structure")
{
    const auto spec = CodecSpec::rate_three_quarters();
    for (const auto v : encode(spec, Bits(30, 0))) CHECK(v == 0);

    CHECK(encode(spec, Bits{1}) == Bits{1, 1, 0, 1, 1, 1, 0, 0, 1, 1});
    CHECK(encode(CodecSpec::rate_half(), Bits{1}) ==
          Bits{1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1, 1});

    std::mt19937_64 g(1);
    for (int k = 0; k < 50; ++k) {
        const Bits a = random_bits(40, g), b = random_bits(40, g);
        Bits x(40);
        for (std::size_t i = 0; i < 40; ++i) x[i] = a[i] ^ b[i];
        const Bits ea = encode(spec, a), eb = encode(spec, b), ex = encode(spec, x);
        for (std::size_t i = 0; i < ex.size(); ++i) CHECK(ex[i] == (ea[i] ^ eb[i]));
    }
}

TEST_CASE("noiseless decoding")
{
    const auto spec = CodecSpec::rate_three_quarters();
    std::mt19937_64 g(2);
    for (int k = 0; k < 1000; ++k) {
        const Bits info = random_bits(1 + g() % 300, g);
        CHECK(viterbi_soft(spec, perfect_llrs(encode(spec, info), 20.0), info.size()) == info);
    }
}

TEST_CASE("decoder is total and corrects a single strong error")
{
    const auto spec = CodecSpec::rate_three_quarters();
    const std::vector<double> zeros(coded_length(spec, 50), 0.0);
    const Bits d = viterbi_soft(spec, zeros, 50);
    CHECK(d.size() == 50);

    std::mt19937_64 g(3);
    for (int k = 0; k < 200; ++k) {
        const Bits info = random_bits(120, g);
        auto l = perfect_llrs(encode(spec, info), 20.0);
        l[g() % l.size()] *= -1.0;
        CHECK(viterbi_soft(spec, l, info.size()) == info);
    }
    CHECK_THROWS_AS(viterbi_soft(spec, zeros, 49), LengthMismatch);
}

TEST_CASE("hard-decision equivalence with a Hamming-metric decoder")
{
    const auto spec = CodecSpec::rate_three_quarters();
    std::mt19937_64 g(4);
    std::bernoulli_distribution flip(0.06);
    for (int k = 0; k < 100; ++k) {
        const Bits info = random_bits(200, g);
        Bits rx = encode(spec, info);
        for (auto& v : rx) v = static_cast<std::uint8_t>(v ^ flip(g));
        const Bits hard = oracle::hard_viterbi(7, 0133, 0171, spec.puncture[0], spec.puncture[1], rx, info.size());
        CHECK(viterbi_soft(spec, perfect_llrs(rx, 1.0), info.size()) == hard);
    }
}

TEST_CASE("decision is at least as likely as its single-bit neighbours")
{
    const auto spec = CodecSpec::rate_three_quarters();
    std::mt19937_64 g(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const Bits info = random_bits(60, g);
        std::vector<double> l = perfect_llrs(encode(spec, info), 1.0);
        for (auto& v : l) v += 1.2 * n(g);
        const Bits d = viterbi_soft(spec, l, info.size());
        const double best = path_metric(encode(spec, d), l);
        for (std::size_t i = 0; i < d.size(); ++i) {
            Bits nb = d;
            nb[i] ^= 1U;
            CHECK(path_metric(encode(spec, nb), l) <= best + 1e-9);
        }
    }
}

TEST_CASE("codec validation")
{
    CodecSpec s;
    s.puncture = {{{1, 0, 1}, {1, 1, 0}}};
    CHECK_NOTHROW(s.validate());
    s.puncture = {{{1, 0, 0}, {0, 0, 1}}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.puncture = {{{0, 1}, {0, 1}}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CodecSpec k;
    k.constraint_length = 1;
    CHECK_THROWS_AS(k.validate(), ConfigError);
}
