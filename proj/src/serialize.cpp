// SPDX-License-Identifier: Apache-2.0
#include "fameeq/serialize.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fameeq/errors.hpp"

namespace fameeq {

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    std::istringstream next(const char* what)
    {
        std::string line;
        ++line_;
        if (!std::getline(is_, line)) fail(std::string("unexpected end of input, expected ") + what);
        return std::istringstream(line);
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError("line " + std::to_string(line_) + ": " + msg, line_);
    }

    int line() const { return line_; }

private:
    std::istream& is_;
    int line_ = 0;
};

void expect_header(LineReader& in, const std::string& magic)
{
    auto ss = in.next("header");
    std::string tag;
    int version = 0;
    if (!(ss >> tag >> version) || tag != magic || version != 1)
        throw ConfigError("line 1: expected '" + magic + " 1'", 1);
}

}  // namespace

void write_channel(std::ostream& os, const ChannelRealization& ch)
{
    os << "fameeq-channel 1\n" << ch.antennas << ' ' << ch.users << ' ' << ch.subcarriers() << '\n';
    os << std::setprecision(17);
    for (const auto& H : ch.per_subcarrier) {
        for (std::size_t b = 0; b < H.rows(); ++b) {
            for (std::size_t u = 0; u < H.cols(); ++u) {
                if (u) os << ' ';
                os << H(b, u).real() << ' ' << H(b, u).imag();
            }
            os << '\n';
        }
    }
}

ChannelRealization read_channel(std::istream& is)
{
    LineReader in(is);
    expect_header(in, "fameeq-channel");
    std::size_t B = 0, U = 0, W = 0;
    if (!(in.next("dimensions") >> B >> U >> W) || B == 0 || U == 0 || W == 0)
        in.fail("expected positive dimensions 'B U W'");
    ChannelRealization ch;
    ch.antennas = B;
    ch.users = U;
    for (std::size_t w = 0; w < W; ++w) {
        CMatrix H(B, U);
        for (std::size_t b = 0; b < B; ++b) {
            auto ss = in.next("channel row");
            for (std::size_t u = 0; u < U; ++u) {
                double re = 0, im = 0;
                if (!(ss >> re >> im)) in.fail("expected " + std::to_string(2 * U) + " values");
                if (!std::isfinite(re) || !std::isfinite(im)) in.fail("non-finite channel entry");
                H(b, u) = {re, im};
            }
        }
        ch.per_subcarrier.push_back(std::move(H));
    }
    return ch;
}

void write_equalizer(std::ostream& os, const FiniteAlphabetEqualizer& eq)
{
    os << "fameeq-fae 1\n" << eq.antennas << ' ' << eq.users() << ' ' << eq.bits << '\n';
    os << std::setprecision(17);
    for (std::size_t u = 0; u < eq.users(); ++u) {
        if (!eq.ok(u)) {
            os << "user " << u << " degenerate\n";
            continue;
        }
        const auto& row = *eq.rows[u];
        os << "user " << u << " ok\nre";
        for (const auto& v : row.x) os << ' ' << std::lround(v.real());
        os << "\nim";
        for (const auto& v : row.x) os << ' ' << std::lround(v.imag());
        os << "\nbeta " << row.beta.real() << ' ' << row.beta.imag() << "\nnu_sq " << row.nu_sq
           << '\n';
    }
}

FiniteAlphabetEqualizer read_equalizer(std::istream& is)
{
    LineReader in(is);
    expect_header(in, "fameeq-fae");
    std::size_t B = 0, U = 0;
    int bits = 0;
    if (!(in.next("dimensions") >> B >> U >> bits) || B == 0 || U == 0 || bits < 1 || bits > 8)
        in.fail("expected 'B U b' with b in 1..8");
    const long limit = (1L << bits) - 1;

    FiniteAlphabetEqualizer eq;
    eq.antennas = B;
    eq.bits = bits;
    eq.rows.resize(U);
    for (std::size_t u = 0; u < U; ++u) {
        auto head = in.next("user record");
        std::string tag, status;
        std::size_t idx = 0;
        if (!(head >> tag >> idx >> status) || tag != "user" || idx != u)
            in.fail("expected 'user " + std::to_string(u) + " <ok|degenerate>'");
        if (status == "degenerate") continue;
        if (status != "ok") in.fail("unknown user status '" + status + "'");

        FiniteAlphabetRow row;
        row.bits = bits;
        row.x.resize(B);
        for (int part = 0; part < 2; ++part) {
            auto ss = in.next("integer row");
            std::string label;
            ss >> label;
            if (label != (part == 0 ? "re" : "im")) in.fail(part == 0 ? "expected 're'" : "expected 'im'");
            for (std::size_t b = 0; b < B; ++b) {
                long v = 0;
                if (!(ss >> v)) in.fail("expected " + std::to_string(B) + " integers");
                if (v % 2 == 0 || v > limit || v < -limit) in.fail("entry outside the alphabet");
                if (part == 0)
                    row.x[b].real(static_cast<double>(v));
                else
                    row.x[b].imag(static_cast<double>(v));
            }
        }
        auto bs = in.next("beta");
        std::string label;
        double re = 0, im = 0;
        if (!(bs >> label >> re >> im) || label != "beta") in.fail("expected 'beta <re> <im>'");
        row.beta = {re, im};
        auto ns = in.next("nu_sq");
        if (!(ns >> label >> row.nu_sq) || label != "nu_sq") in.fail("expected 'nu_sq <value>'");
        eq.rows[u] = std::move(row);
    }
    return eq;
}

}  // namespace fameeq
