#pragma once

// Dense complex matrix primitives and the semidefinite LDL* (innovations)
// factorization used by every other part of the library.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "gaussdfe/errors.hpp"

namespace gaussdfe {

using cplx = std::complex<double>;

/// Row-major dense complex matrix. Entries are always finite.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    static CMatrix column(std::span<const cplx> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    bool is_square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const cplx> data() const { return data_; }
    std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    /// Sub-matrix picking the listed rows and columns, in the listed order.
    CMatrix select(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;

    double max_abs() const;
    bool all_finite() const;

    CMatrix& operator+=(const CMatrix& other);
    CMatrix& operator-=(const CMatrix& other);
    CMatrix& operator*=(cplx s);

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);

/// Complex matrix product. Throws DimensionMismatch when a.cols != b.rows.
CMatrix matmul(const CMatrix& a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);

CMatrix conj_transpose(const CMatrix& a);

/// out = a * x for a column vector x; no allocation.
void matvec(const CMatrix& a, std::span<const cplx> x, std::span<cplx> out);

/// Largest entrywise modulus of a - b.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// Square Hermitian positive-semidefinite matrix of inner products.
///
/// Construction symmetrizes the input as (M + M*)/2 and zeroes the
/// imaginary part of the diagonal. Input whose asymmetry exceeds 1e-9
/// relative to its largest entry is rejected with NotHermitian, and a
/// diagonal entry below -zero_tolerance() with NotPositiveSemidefinite.
/// Full semidefiniteness is established by ldl_semidefinite.
///
/// The reference scale lets a Gram derived from a larger one (an error or
/// Schur-complement Gram) keep the zero threshold of its parent, so that
/// round-off left over from an exact cancellation is still read as zero.
class HermitianGram {
public:
    HermitianGram() = default;
    explicit HermitianGram(const CMatrix& m, double reference_scale = 1.0);

    static HermitianGram identity(std::size_t n);
    static HermitianGram diagonal(std::span<const double> variances);

    std::size_t dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

    double max_diagonal() const;
    double reference_scale() const { return reference_scale_; }
    /// 1 + max diagonal; the scale used by identity tolerances.
    double scale() const { return 1.0 + max_diagonal(); }

    /// dim * 2^-52 * max(max diagonal, reference scale, 1).
    double zero_tolerance() const;

    /// Principal submatrix in the given index order.
    HermitianGram principal(std::span<const std::size_t> idx) const;

private:
    CMatrix m_;
    double reference_scale_ = 1.0;
};

/// Innovations form of a Gram matrix: G = L diag(d2) L*, L monic lower
/// triangular. Zero pivots mark variables that depend linearly on the
/// ones before them; their columns of L below the diagonal are zero.
struct InnovationsForm {
    CMatrix L;
    std::vector<double> d2;
    std::size_t rank = 0;
};

/// Semidefinite LDL* without pivoting. Variable order is preserved.
/// Pivots within zero_tolerance() of 0 are set to exactly 0; a pivot below
/// -zero_tolerance() raises NotPositiveSemidefinite.
InnovationsForm ldl_semidefinite(const HermitianGram& g);

/// Forward substitution for l * x = b with l monic lower triangular.
CMatrix solve_unit_lower(const CMatrix& l, const CMatrix& b);

/// Back substitution for l* x = b with l monic lower triangular.
CMatrix solve_unit_lower_adjoint(const CMatrix& l, const CMatrix& b);

/// Product of the pivots (the determinant of the factored Gram).
double det_from_pivots(const InnovationsForm& f);

/// Solves g x = b through the innovations form. Throws SingularGram when
/// g is rank deficient.
CMatrix solve_psd(const HermitianGram& g, const CMatrix& b);

/// L diag(d2) L*.
CMatrix reconstruct(const InnovationsForm& f);

} // namespace gaussdfe
