// SPDX-License-Identifier: Apache-2.0
//
// Spatial equalizers for one subcarrier.
//
// Conventions: every equalizer row is stored as a B-vector x with the
// estimate formed as x^H y. For the L-MMSE matrix W^H the stored row for
// user u is w_u (the conjugate of row u of W^H).
//
// Finite-alphabet rows hold odd integers in {+-1, +-3, ..., +-(2^b - 1)}
// for each real and imaginary part. A row x together with the scaling
// factor
//
//     beta_u(x) = x^H h_u / (||H^H x||^2 + rho ||x||^2)
//
// forms the equalizer row beta_u^* x^H. The bias factor
// beta_u(x) h_u^H x = |h_u^H x|^2 / (||H^H x||^2 + rho ||x||^2) is real and
// lies in (0, 1); the post-equalization noise-plus-interference variance of
// the unbiased estimate x^H y / x^H h_u is Es (1/bias - 1).
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fameeq/numerics.hpp"

namespace fameeq {

struct LmmseEqualizer {
    CMatrix wh;  // U x B, (rho I + H^H H)^{-1} H^H
    double rho = 0.0;

    /// w_u, i.e. conj of row u of W^H.
    CVector row(std::size_t u) const;
};

LmmseEqualizer lmmse(const CMatrix& H, double rho);
/// Reuses a precomputed Gram matrix H^H H.
LmmseEqualizer lmmse(const CMatrix& H, const CMatrix& gram_matrix, double rho);

/// Quadratic statistics of a candidate row that every closed form needs.
struct RowStats {
    double interference_energy = 0.0;  // ||H^H x||^2
    double row_energy = 0.0;           // ||x||^2
    cplx gain;                         // h_u^H x
    double user_energy = 0.0;          // ||h_u||^2

    /// |h_u^H x|^2 < 1e-18 ||x||^2 ||h_u||^2
    bool degenerate() const;
    double objective(double rho) const;
    cplx beta(double rho) const;
    double bias_factor(double rho) const;
};

RowStats row_stats(const CMatrix& H, std::size_t u, std::span<const cplx> x);

/// (||H^H x||^2 + rho ||x||^2) / |h_u^H x|^2. Throws DegenerateDirection.
double fame_objective(const CMatrix& H, double rho, std::size_t u, std::span<const cplx> x);

/// x^H h_u / (||H^H x||^2 + rho ||x||^2). Throws DegenerateDirection.
cplx beta_of(const CMatrix& H, double rho, std::size_t u, std::span<const cplx> x);

/// Es (1/bias_factor - 1). Throws InvalidBias outside (0, 1 + 1e-12].
double npi_variance(double es, double bias_factor);

/// x^H y / x^H h_u. Throws DegenerateDirection.
cplx equalize_unbiased(const CMatrix& H, std::span<const cplx> x, std::size_t u,
                       std::span<const cplx> y);

/// w^H y
cplx equalize_biased(std::span<const cplx> w, std::span<const cplx> y);

/// Uniform-bin quantization of the real and imaginary parts of w over
/// [-w_max, w_max] with 2^bits bins, returned as scaled centroids
/// (odd integers). w_max defaults to the largest |Re| or |Im| entry.
/// Values on a bin edge go to the upper bin; values beyond +-w_max go to the
/// outermost bins.
CVector quantize_row(std::span<const cplx> w, int bits,
                     std::optional<double> w_max_override = std::nullopt);

struct FiniteAlphabetRow {
    CVector x;  // odd-integer parts
    int bits = 0;
    cplx beta;
    double nu_sq = 0.0;
    double bias_factor = 0.0;
    double objective = 0.0;
};

/// Attaches beta, bias factor, NPI variance and objective to a row.
/// Throws DegenerateDirection.
FiniteAlphabetRow make_row(const CMatrix& H, double rho, std::size_t u, CVector x, int bits,
                           double es = 1.0);

struct FiniteAlphabetEqualizer {
    std::size_t antennas = 0;
    int bits = 0;
    /// Empty entries mark users whose row was degenerate.
    std::vector<std::optional<FiniteAlphabetRow>> rows;

    std::size_t users() const { return rows.size(); }
    bool ok(std::size_t u) const { return rows[u].has_value(); }
};

FiniteAlphabetEqualizer flmmse(const CMatrix& H, double rho, int bits, double es = 1.0);
FiniteAlphabetEqualizer flmmse(const CMatrix& H, const LmmseEqualizer& lm, int bits,
                               double es = 1.0);

enum class FbsInit { Mrc, FlMmse };

/// Per-iteration parameters for forward-backward splitting. Lists may hold
/// a single value (broadcast) or at least t_max values. An empty `tau`
/// selects 1 / lambda_max(H^H H) from `power_iters` power iterations; an
/// empty `eta` selects eta_t = 2^(b t/(t_max-1)) (1 when t_max == 1).
struct FbsSchedule {
    int t_max = 5;
    std::vector<double> tau;
    std::vector<double> eta;
    std::vector<double> gamma{2.0};
    FbsInit init = FbsInit::Mrc;
    int power_iters = 30;

    void validate() const;
    double tau_at(int t, double lambda_max) const;
    double eta_at(int t, int bits) const;
    double gamma_at(int t) const;
};

/// Optional precomputed inputs for fame_fbs; absent values are computed.
struct FbsWarmStart {
    std::optional<double> lambda_max;
    /// FL-MMSE row for user u (odd-integer parts), used when init == FlMmse.
    const CVector* flmmse_row = nullptr;
};

/// One quantized FBS iterate (quantization with w_max = 1).
struct FbsCandidate {
    CVector x;
    RowStats stats;
};

/// Initial iterate: h_u for MRC, or the FL-MMSE row's centroids with
/// w_max = 1 (odd integers divided by 2^b).
CVector fbs_initial_iterate(const CMatrix& H, std::size_t u, int bits, FbsInit init,
                            const CVector* flmmse_row);

/// Runs t_max iterations from `x0` and returns t_max + 1 quantized
/// candidates: the initializer's quantization first, then one per
/// iteration. The iteration does not depend on rho.
std::vector<FbsCandidate> fbs_candidates(const CMatrix& H, std::size_t u, int bits,
                                         const FbsSchedule& sched, CVector x0,
                                         double lambda_max);

/// Index of the first candidate with the smallest objective, skipping
/// degenerate ones; nullopt if all are degenerate.
std::optional<std::size_t> select_best(std::span<const FbsCandidate> candidates, double rho);

/// FAME via forward-backward splitting with best-so-far tracking over the
/// quantized iterates (the initializer's quantization included). Throws
/// DegenerateDirection if no quantized iterate can equalize user u.
FiniteAlphabetRow fame_fbs(const CMatrix& H, double rho, std::size_t u, int bits,
                           const FbsSchedule& sched, double es = 1.0,
                           const FbsWarmStart& warm = {});

FiniteAlphabetEqualizer fame_fbs_all(const CMatrix& H, double rho, int bits,
                                     const FbsSchedule& sched, double es = 1.0);

/// Exhaustive FAME solution. Enumerates every x in A_b^B with the first
/// real part fixed positive (x and -x are equivalent). Requires
/// 2 B bits <= 24; throws BudgetExceeded otherwise.
FiniteAlphabetRow fame_bruteforce(const CMatrix& H, double rho, std::size_t u, int bits,
                                  double es = 1.0);

}  // namespace fameeq
