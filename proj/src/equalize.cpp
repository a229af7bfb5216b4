// SPDX-License-Identifier: Apache-2.0
#include "fameeq/equalize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fameeq/errors.hpp"

namespace fameeq {

namespace {

constexpr double kDegeneracy = 1e-18;

double prox(double v, double eta)
{
    const double mag = std::min(eta * std::abs(v), 1.0);
    return v >= 0.0 ? mag : -mag;
}

DegenerateDirection degenerate_error(std::size_t u)
{
    return DegenerateDirection("row cannot equalize user " + std::to_string(u) +
                               ": |h_u^H x|^2 below degeneracy threshold");
}

void check_user(const CMatrix& H, std::size_t u, std::size_t len)
{
    if (u >= H.cols()) throw LengthMismatch("user index out of range");
    if (len != H.rows()) throw LengthMismatch("row length does not match antenna count");
}

}  // namespace

CVector LmmseEqualizer::row(std::size_t u) const
{
    const auto r = wh.row(u);
    CVector w(r.size());
    for (std::size_t b = 0; b < r.size(); ++b) w[b] = std::conj(r[b]);
    return w;
}

LmmseEqualizer lmmse(const CMatrix& H, const CMatrix& gram_matrix, double rho)
{
    if (!(rho > 0.0)) throw NotPositiveDefinite("lmmse: rho must be > 0");
    CMatrix A = gram_matrix;
    for (std::size_t i = 0; i < A.rows(); ++i) A(i, i) += rho;
    return {HpdFactor(A).solve(H.adjoint()), rho};
}

LmmseEqualizer lmmse(const CMatrix& H, double rho)
{
    return lmmse(H, gram(H), rho);
}

bool RowStats::degenerate() const
{
    return !(std::norm(gain) >= kDegeneracy * row_energy * user_energy) || std::norm(gain) == 0.0;
}

double RowStats::objective(double rho) const
{
    return (interference_energy + rho * row_energy) / std::norm(gain);
}

cplx RowStats::beta(double rho) const
{
    return std::conj(gain) / (interference_energy + rho * row_energy);
}

double RowStats::bias_factor(double rho) const
{
    return std::norm(gain) / (interference_energy + rho * row_energy);
}

RowStats row_stats(const CMatrix& H, std::size_t u, std::span<const cplx> x)
{
    check_user(H, u, x.size());
    const CVector hx = adjoint_times(H, x);
    RowStats s;
    s.interference_energy = norm_sq(hx);
    s.row_energy = norm_sq(x);
    s.gain = hx[u];
    for (std::size_t b = 0; b < H.rows(); ++b) s.user_energy += std::norm(H(b, u));
    return s;
}

double fame_objective(const CMatrix& H, double rho, std::size_t u, std::span<const cplx> x)
{
    const RowStats s = row_stats(H, u, x);
    if (s.degenerate()) throw degenerate_error(u);
    return s.objective(rho);
}

cplx beta_of(const CMatrix& H, double rho, std::size_t u, std::span<const cplx> x)
{
    const RowStats s = row_stats(H, u, x);
    if (s.degenerate()) throw degenerate_error(u);
    return s.beta(rho);
}

double npi_variance(double es, double bias_factor)
{
    if (!(bias_factor > 0.0) || bias_factor > 1.0 + 1e-12)
        throw InvalidBias("bias factor " + std::to_string(bias_factor) + " outside (0, 1]");
    if (bias_factor >= 1.0) return 0.0;
    return es * (1.0 / bias_factor - 1.0);
}

cplx equalize_unbiased(const CMatrix& H, std::span<const cplx> x, std::size_t u,
                       std::span<const cplx> y)
{
    check_user(H, u, x.size());
    double user_energy = 0.0;
    cplx gain{};  // x^H h_u
    for (std::size_t b = 0; b < H.rows(); ++b) {
        user_energy += std::norm(H(b, u));
        gain += std::conj(x[b]) * H(b, u);
    }
    if (!(std::norm(gain) >= kDegeneracy * norm_sq(x) * user_energy) || std::norm(gain) == 0.0)
        throw degenerate_error(u);
    return dot(x, y) / gain;
}

cplx equalize_biased(std::span<const cplx> w, std::span<const cplx> y)
{
    return dot(w, y);
}

CVector quantize_row(std::span<const cplx> w, int bits, std::optional<double> w_max_override)
{
    if (bits < 1 || bits > 8) throw ConfigError("quantize_row: bits must be in 1..8");
    double w_max = 0.0;
    if (w_max_override) {
        w_max = *w_max_override;
        if (!(w_max > 0.0)) throw ZeroVector("quantize_row: w_max override must be > 0");
    } else {
        for (const auto& v : w) w_max = std::max({w_max, std::abs(v.real()), std::abs(v.imag())});
        if (w_max == 0.0) throw ZeroVector("quantize_row: cannot quantize the zero vector");
    }
    const long levels = 1L << bits;
    const double scale = static_cast<double>(levels) / (2.0 * w_max);
    auto q = [&](double v) {
        long k = static_cast<long>(std::floor((v + w_max) * scale));
        k = std::clamp(k, 0L, levels - 1);
        return static_cast<double>(2 * k + 1 - levels);
    };
    CVector out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = cplx(q(w[i].real()), q(w[i].imag()));
    return out;
}

FiniteAlphabetRow make_row(const CMatrix& H, double rho, std::size_t u, CVector x, int bits,
                           double es)
{
    const RowStats s = row_stats(H, u, x);
    if (s.degenerate()) throw degenerate_error(u);
    FiniteAlphabetRow row;
    row.x = std::move(x);
    row.bits = bits;
    row.beta = s.beta(rho);
    row.bias_factor = s.bias_factor(rho);
    row.nu_sq = npi_variance(es, row.bias_factor);
    row.objective = s.objective(rho);
    return row;
}

FiniteAlphabetEqualizer flmmse(const CMatrix& H, const LmmseEqualizer& lm, int bits, double es)
{
    FiniteAlphabetEqualizer eq;
    eq.antennas = H.rows();
    eq.bits = bits;
    eq.rows.resize(H.cols());
    for (std::size_t u = 0; u < H.cols(); ++u) {
        try {
            eq.rows[u] = make_row(H, lm.rho, u, quantize_row(lm.row(u), bits), bits, es);
        } catch (const DegenerateDirection&) {
            eq.rows[u].reset();
        } catch (const ZeroVector&) {
            eq.rows[u].reset();
        }
    }
    return eq;
}

FiniteAlphabetEqualizer flmmse(const CMatrix& H, double rho, int bits, double es)
{
    return flmmse(H, lmmse(H, rho), bits, es);
}

void FbsSchedule::validate() const
{
    if (t_max < 1) throw ConfigError("FBS: t_max must be >= 1");
    auto check = [&](const std::vector<double>& v, const char* name, bool allow_empty) {
        if (v.empty() && allow_empty) return;
        if (v.size() != 1 && v.size() < static_cast<std::size_t>(t_max))
            throw ConfigError(std::string("FBS: ") + name + " must have 1 or >= t_max entries");
    };
    check(tau, "tau", true);
    check(eta, "eta", true);
    check(gamma, "gamma", false);
    if (power_iters < 1) throw ConfigError("FBS: power_iters must be >= 1");
}

namespace {
double pick(const std::vector<double>& v, int t)
{
    return v.size() == 1 ? v[0] : v[static_cast<std::size_t>(t)];
}
}  // namespace

double FbsSchedule::tau_at(int t, double lambda_max) const
{
    return tau.empty() ? 1.0 / lambda_max : pick(tau, t);
}

double FbsSchedule::eta_at(int t, int bits) const
{
    if (!eta.empty()) return pick(eta, t);
    if (t_max == 1) return 1.0;
    return std::pow(2.0, static_cast<double>(bits) * t / static_cast<double>(t_max - 1));
}

double FbsSchedule::gamma_at(int t) const
{
    return pick(gamma, t);
}

CVector fbs_initial_iterate(const CMatrix& H, std::size_t u, int bits, FbsInit init,
                            const CVector* flmmse_row)
{
    if (init == FbsInit::Mrc) return H.col(u);
    if (!flmmse_row) throw LengthMismatch("FL-MMSE initialization needs the FL-MMSE row");
    const double s = 1.0 / static_cast<double>(1L << bits);
    CVector x(flmmse_row->size());
    for (std::size_t b = 0; b < x.size(); ++b) x[b] = (*flmmse_row)[b] * s;
    return x;
}

std::vector<FbsCandidate> fbs_candidates(const CMatrix& H, std::size_t u, int bits,
                                         const FbsSchedule& sched, CVector x, double lambda_max)
{
    sched.validate();
    check_user(H, u, x.size());
    const std::size_t B = H.rows();
    std::vector<FbsCandidate> out;
    out.reserve(static_cast<std::size_t>(sched.t_max) + 1);
    auto push = [&](const CVector& iterate) {
        CVector q = quantize_row(iterate, bits, 1.0);
        RowStats st = row_stats(H, u, q);
        out.push_back({std::move(q), st});
    };
    push(x);

    CVector hx(H.cols());
    for (int t = 0; t < sched.t_max; ++t) {
        const double tau = sched.tau_at(t, lambda_max);
        const double gamma = sched.gamma_at(t);
        const double eta = sched.eta_at(t, bits);
        // z = (I - tau H (I - gamma e_u e_u^H) H^H) x without forming B x B.
        adjoint_times(H, x, hx);
        hx[u] *= (1.0 - gamma);
        const CVector g = times(H, hx);
        for (std::size_t b = 0; b < B; ++b) {
            const cplx z = x[b] - tau * g[b];
            x[b] = cplx(prox(z.real(), eta), prox(z.imag(), eta));
        }
        push(x);
    }
    return out;
}

std::optional<std::size_t> select_best(std::span<const FbsCandidate> candidates, double rho)
{
    std::optional<std::size_t> best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& st = candidates[i].stats;
        if (st.degenerate()) continue;
        const double obj = st.objective(rho);
        if (obj < best_obj) {
            best_obj = obj;
            best = i;
        }
    }
    return best;
}

FiniteAlphabetRow fame_fbs(const CMatrix& H, double rho, std::size_t u, int bits,
                           const FbsSchedule& sched, double es, const FbsWarmStart& warm)
{
    sched.validate();
    if (u >= H.cols()) throw LengthMismatch("user index out of range");

    double lambda_max = 0.0;
    if (sched.tau.empty())
        lambda_max = warm.lambda_max ? *warm.lambda_max
                                     : spectral_norm_sq_estimate(H, sched.power_iters);

    CVector fl;
    const CVector* fl_ptr = warm.flmmse_row;
    if (sched.init == FbsInit::FlMmse && !fl_ptr) {
        fl = quantize_row(lmmse(H, rho).row(u), bits);
        fl_ptr = &fl;
    }

    auto candidates =
        fbs_candidates(H, u, bits, sched, fbs_initial_iterate(H, u, bits, sched.init, fl_ptr),
                       lambda_max);
    const auto best = select_best(candidates, rho);
    if (!best) throw degenerate_error(u);
    return make_row(H, rho, u, std::move(candidates[*best].x), bits, es);
}

FiniteAlphabetEqualizer fame_fbs_all(const CMatrix& H, double rho, int bits,
                                     const FbsSchedule& sched, double es)
{
    sched.validate();
    FiniteAlphabetEqualizer eq;
    eq.antennas = H.rows();
    eq.bits = bits;
    eq.rows.resize(H.cols());

    const CMatrix G = gram(H);
    FbsWarmStart warm;
    if (sched.tau.empty()) warm.lambda_max = largest_eigenvalue_estimate(G, sched.power_iters);
    std::optional<LmmseEqualizer> lm;
    if (sched.init == FbsInit::FlMmse) lm = lmmse(H, G, rho);

    for (std::size_t u = 0; u < H.cols(); ++u) {
        CVector fl;
        if (lm) {
            try {
                fl = quantize_row(lm->row(u), bits);
            } catch (const ZeroVector&) {
                continue;
            }
            warm.flmmse_row = &fl;
        }
        try {
            eq.rows[u] = fame_fbs(H, rho, u, bits, sched, es, warm);
        } catch (const DegenerateDirection&) {
            eq.rows[u].reset();
        }
        warm.flmmse_row = nullptr;
    }
    return eq;
}

FiniteAlphabetRow fame_bruteforce(const CMatrix& H, double rho, std::size_t u, int bits,
                                  double es)
{
    if (bits < 1 || bits > 8) throw ConfigError("fame_bruteforce: bits must be in 1..8");
    const std::size_t B = H.rows();
    const std::size_t parts = 2 * B;
    if (parts * static_cast<std::size_t>(bits) > 24)
        throw BudgetExceeded("fame_bruteforce: (2^b)^(2B) exceeds the 2^24 enumeration budget");
    if (u >= H.cols()) throw LengthMismatch("user index out of range");

    const int levels = 1 << bits;
    auto level = [&](int digit) { return static_cast<double>(2 * digit + 1 - levels); };
    // Part 0 (Re x_0) restricted to positive levels.
    std::vector<int> digit(parts, 0);
    digit[0] = levels / 2;

    CVector x(B);
    CVector best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (;;) {
        for (std::size_t b = 0; b < B; ++b) x[b] = cplx(level(digit[2 * b]), level(digit[2 * b + 1]));
        const RowStats st = row_stats(H, u, x);
        if (!st.degenerate()) {
            const double obj = st.objective(rho);
            if (obj < best_obj) {
                best_obj = obj;
                best = x;
            }
        }
        // Odometer, last part fastest so candidates run in lexicographic order.
        std::size_t k = parts;
        while (k-- > 0) {
            if (++digit[k] < levels) break;
            digit[k] = (k == 0) ? levels / 2 : 0;
            if (k == 0) {
                k = parts;  // wrapped
                break;
            }
        }
        if (k == parts) break;
    }
    if (best.empty()) throw degenerate_error(u);
    return make_row(H, rho, u, std::move(best), bits, es);
}

}  // namespace fameeq
