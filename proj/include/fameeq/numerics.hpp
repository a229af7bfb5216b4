// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra used by the equalizers: Gram matrices,
// Hermitian positive-definite solves and a power-iteration spectral norm.
// Sized for B <= 1024 antennas and U <= 64 users.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fameeq {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Row-major dense complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

    static CMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    CVector col(std::size_t c) const;

    std::span<const cplx> data() const { return data_; }
    std::span<cplx> data() { return data_; }

    CMatrix adjoint() const;

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// a^H b
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double norm_sq(std::span<const cplx> a);

/// H v
CVector times(const CMatrix& H, std::span<const cplx> v);
/// H^H x
CVector adjoint_times(const CMatrix& H, std::span<const cplx> x);
/// In-place variant; `out` must have H.cols() entries.
void adjoint_times(const CMatrix& H, std::span<const cplx> x, std::span<cplx> out);

CMatrix multiply(const CMatrix& A, const CMatrix& B);

/// H^H H, assembled from the upper triangle so that (j,i) == conj((i,j))
/// bit-for-bit.
CMatrix gram(const CMatrix& H);

/// Cholesky factor A = L L^H of a Hermitian positive-definite matrix.
class HpdFactor {
public:
    /// Throws NotPositiveDefinite if a pivot is <= 0.
    explicit HpdFactor(const CMatrix& A);

    /// Solves A X = B for X.
    CMatrix solve(const CMatrix& B) const;
    CVector solve(std::span<const cplx> b) const;

    std::size_t size() const { return lower_.rows(); }

private:
    CMatrix lower_;
};

/// X with A X = B; A Hermitian positive definite.
CMatrix hpd_solve(const CMatrix& A, const CMatrix& B);

/// Largest eigenvalue of H^H H by power iteration on the Gram matrix,
/// starting from the all-ones vector.
double spectral_norm_sq_estimate(const CMatrix& H, int iters);
/// Same, for an already assembled Gram matrix.
double largest_eigenvalue_estimate(const CMatrix& gram_matrix, int iters);

double frobenius_norm(const CMatrix& A);

}  // namespace fameeq
