// SPDX-License-Identifier: Apache-2.0
#include "fameeq/numerics.hpp"

#include <cmath>
#include <string>

#include "fameeq/errors.hpp"

namespace fameeq {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (data_.size() != rows_ * cols_)
        throw LengthMismatch("CMatrix: entry count does not match rows*cols");
}

CMatrix CMatrix::identity(std::size_t n)
{
    CMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

CVector CMatrix::col(std::size_t c) const
{
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

CMatrix CMatrix::adjoint() const
{
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size()) throw LengthMismatch("dot: size mismatch");
    cplx acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double norm_sq(std::span<const cplx> a)
{
    double acc = 0.0;
    for (const auto& v : a) acc += std::norm(v);
    return acc;
}

CVector times(const CMatrix& H, std::span<const cplx> v)
{
    if (v.size() != H.cols()) throw LengthMismatch("times: size mismatch");
    CVector out(H.rows());
    for (std::size_t r = 0; r < H.rows(); ++r) {
        const auto row = H.row(r);
        cplx acc{};
        for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

void adjoint_times(const CMatrix& H, std::span<const cplx> x, std::span<cplx> out)
{
    if (x.size() != H.rows() || out.size() != H.cols())
        throw LengthMismatch("adjoint_times: size mismatch");
    std::fill(out.begin(), out.end(), cplx{});
    for (std::size_t r = 0; r < H.rows(); ++r) {
        const auto row = H.row(r);
        const cplx xr = x[r];
        for (std::size_t c = 0; c < row.size(); ++c) out[c] += std::conj(row[c]) * xr;
    }
}

CVector adjoint_times(const CMatrix& H, std::span<const cplx> x)
{
    CVector out(H.cols());
    adjoint_times(H, x, out);
    return out;
}

CMatrix multiply(const CMatrix& A, const CMatrix& B)
{
    if (A.cols() != B.rows()) throw LengthMismatch("multiply: inner dimension mismatch");
    CMatrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        auto out = C.row(i);
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const cplx a = A(i, k);
            const auto brow = B.row(k);
            for (std::size_t j = 0; j < B.cols(); ++j) out[j] += a * brow[j];
        }
    }
    return C;
}

CMatrix gram(const CMatrix& H)
{
    const std::size_t n = H.cols();
    CMatrix G(n, n);
    for (std::size_t b = 0; b < H.rows(); ++b) {
        const auto row = H.row(b);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx ci = std::conj(row[i]);
            for (std::size_t j = i; j < n; ++j) G(i, j) += ci * row[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        G(i, i) = cplx(G(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) G(j, i) = std::conj(G(i, j));
    }
    return G;
}

HpdFactor::HpdFactor(const CMatrix& A) : lower_(A.rows(), A.cols())
{
    if (A.rows() != A.cols()) throw LengthMismatch("HpdFactor: matrix is not square");
    const std::size_t n = A.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = A(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(lower_(j, k));
        if (!(d > 0.0))
            throw NotPositiveDefinite("Cholesky pivot " + std::to_string(j) +
                                      " is not positive");
        const double ljj = std::sqrt(d);
        lower_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = A(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower_(i, k) * std::conj(lower_(j, k));
            lower_(i, j) = s / ljj;
        }
    }
}

CMatrix HpdFactor::solve(const CMatrix& B) const
{
    const std::size_t n = size();
    if (B.rows() != n) throw LengthMismatch("HpdFactor::solve: row mismatch");
    const std::size_t k = B.cols();
    CMatrix X = B;
    // L Z = B, row-oriented so the inner loops run over contiguous rows.
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = X.row(i);
        for (std::size_t m = 0; m < i; ++m) {
            const cplx l = lower_(i, m);
            const auto xm = X.row(m);
            for (std::size_t c = 0; c < k; ++c) xi[c] -= l * xm[c];
        }
        const double inv = 1.0 / lower_(i, i).real();
        for (auto& v : xi) v *= inv;
    }
    // L^H X = Z
    for (std::size_t ii = n; ii-- > 0;) {
        auto xi = X.row(ii);
        for (std::size_t m = ii + 1; m < n; ++m) {
            const cplx l = std::conj(lower_(m, ii));
            const auto xm = X.row(m);
            for (std::size_t c = 0; c < k; ++c) xi[c] -= l * xm[c];
        }
        const double inv = 1.0 / lower_(ii, ii).real();
        for (auto& v : xi) v *= inv;
    }
    return X;
}

CVector HpdFactor::solve(std::span<const cplx> b) const
{
    CMatrix B(b.size(), 1, CVector(b.begin(), b.end()));
    const CMatrix X = solve(B);
    return CVector(X.data().begin(), X.data().end());
}

CMatrix hpd_solve(const CMatrix& A, const CMatrix& B)
{
    return HpdFactor(A).solve(B);
}

double largest_eigenvalue_estimate(const CMatrix& G, int iters)
{
    const std::size_t n = G.rows();
    if (n == 0) return 0.0;
    CVector v(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    for (int it = 0; it < std::max(iters, 1); ++it) {
        CVector w = times(G, v);
        const double nrm = std::sqrt(norm_sq(w));
        if (nrm == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nrm;
    }
    return dot(v, times(G, v)).real();
}

double spectral_norm_sq_estimate(const CMatrix& H, int iters)
{
    return largest_eigenvalue_estimate(gram(H), iters);
}

double frobenius_norm(const CMatrix& A)
{
    return std::sqrt(norm_sq(A.data()));
}

}  // namespace fameeq
