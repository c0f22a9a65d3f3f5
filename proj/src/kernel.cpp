#include "gaussdfe/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

namespace gaussdfe {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon(); // 2^-52
constexpr double kHermitianRelTol = 1e-9;

std::string shape(const CMatrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

} // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatch("CMatrix: entry count does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
    }
    if (!all_finite()) {
        throw InvalidArgument("CMatrix: non-finite entry");
    }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DimensionMismatch("CMatrix: ragged initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
    if (!all_finite()) {
        throw InvalidArgument("CMatrix: non-finite entry");
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::column(std::span<const cplx> values) {
    return CMatrix(values.size(), 1, std::vector<cplx>(values.begin(), values.end()));
}

CMatrix CMatrix::select(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const {
    CMatrix out(row_idx.size(), col_idx.size());
    for (std::size_t i = 0; i < row_idx.size(); ++i) {
        if (row_idx[i] >= rows_) {
            throw DimensionMismatch("CMatrix::select: row index out of range");
        }
        for (std::size_t j = 0; j < col_idx.size(); ++j) {
            if (col_idx[j] >= cols_) {
                throw DimensionMismatch("CMatrix::select: column index out of range");
            }
            out(i, j) = (*this)(row_idx[i], col_idx[j]);
        }
    }
    return out;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

bool CMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionMismatch("CMatrix +: " + shape(*this) + " vs " + shape(other));
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += other.data_[k];
    }
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionMismatch("CMatrix -: " + shape(*this) + " vs " + shape(other));
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= other.data_[k];
    }
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& v : data_) {
        v *= s;
    }
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionMismatch("matmul: " + shape(a) + " * " + shape(b));
    }
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) { return matmul(a, b); }

CMatrix conj_transpose(const CMatrix& a) {
    CMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = std::conj(a(i, j));
        }
    }
    return out;
}

void matvec(const CMatrix& a, std::span<const cplx> x, std::span<cplx> out) {
    if (a.cols() != x.size() || a.rows() != out.size()) {
        throw DimensionMismatch("matvec: " + shape(a) + " times length-" + std::to_string(x.size()) + " vector");
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx s{};
        const auto r = a.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) {
            s += r[k] * x[k];
        }
        out[i] = s;
    }
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("max_abs_diff: " + shape(a) + " vs " + shape(b));
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    }
    return m;
}

// ---------------------------------------------------------------------------
// HermitianGram

HermitianGram::HermitianGram(const CMatrix& m, double reference_scale)
    : m_(m.rows(), m.cols()), reference_scale_(reference_scale) {
    if (!m.is_square()) {
        throw DimensionMismatch("HermitianGram: matrix is " + shape(m) + ", not square");
    }
    if (!m.all_finite()) {
        throw InvalidArgument("HermitianGram: non-finite entry");
    }
    if (!(reference_scale >= 0.0) || !std::isfinite(reference_scale)) {
        throw InvalidArgument("HermitianGram: reference scale must be finite and >= 0");
    }
    const std::size_t n = m.rows();
    const double bound = kHermitianRelTol * std::max(1.0, m.max_abs());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const cplx a = m(i, j);
            const cplx b = std::conj(m(j, i));
            if (std::abs(a - b) > bound) {
                throw NotHermitian("HermitianGram: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") differs from the conjugate of its transpose");
            }
            const cplx avg = 0.5 * (a + b);
            if (i == j) {
                m_(i, i) = avg.real();
            } else {
                m_(i, j) = avg;
                m_(j, i) = std::conj(avg);
            }
        }
    }
    const double tol = zero_tolerance();
    for (std::size_t i = 0; i < n; ++i) {
        if (m_(i, i).real() < -tol) {
            throw NotPositiveSemidefinite("HermitianGram: negative variance on diagonal entry " +
                                          std::to_string(i));
        }
    }
}

HermitianGram HermitianGram::identity(std::size_t n) { return HermitianGram(CMatrix::identity(n)); }

HermitianGram HermitianGram::diagonal(std::span<const double> variances) {
    CMatrix m(variances.size(), variances.size());
    for (std::size_t i = 0; i < variances.size(); ++i) {
        m(i, i) = variances[i];
    }
    return HermitianGram(m);
}

double HermitianGram::max_diagonal() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        m = std::max(m, m_(i, i).real());
    }
    return m;
}

double HermitianGram::zero_tolerance() const {
    const double s = std::max({max_diagonal(), reference_scale_, 1.0});
    return static_cast<double>(dim()) * kEps * s;
}

HermitianGram HermitianGram::principal(std::span<const std::size_t> idx) const {
    return HermitianGram(m_.select(idx, idx), reference_scale_);
}

// ---------------------------------------------------------------------------
// Factorization and solves

InnovationsForm ldl_semidefinite(const HermitianGram& g) {
    const std::size_t n = g.dim();
    const double tol = g.zero_tolerance();
    InnovationsForm f{CMatrix::identity(n), std::vector<double>(n, 0.0), 0};
    CMatrix& L = f.L;

    for (std::size_t j = 0; j < n; ++j) {
        double d = g(j, j).real();
        for (std::size_t k = 0; k < j; ++k) {
            d -= std::norm(L(j, k)) * f.d2[k];
        }
        if (d < -tol) {
            throw NotPositiveSemidefinite("ldl_semidefinite: pivot " + std::to_string(j) + " is " +
                                          format_sci(d) + " (below -" + format_sci(tol) + ")");
        }
        if (d <= tol) {
            // Variable j lies in the span of its predecessors.
            f.d2[j] = 0.0;
            continue;
        }
        f.d2[j] = d;
        ++f.rank;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= L(i, k) * std::conj(L(j, k)) * f.d2[k];
            }
            L(i, j) = s / d;
        }
    }
    return f;
}

CMatrix solve_unit_lower(const CMatrix& l, const CMatrix& b) {
    if (!l.is_square() || l.rows() != b.rows()) {
        throw DimensionMismatch("solve_unit_lower: " + shape(l) + " vs rhs " + shape(b));
    }
    const std::size_t n = l.rows();
    CMatrix x = b;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) {
                s -= l(i, k) * x(k, c);
            }
            x(i, c) = s;
        }
    }
    return x;
}

CMatrix solve_unit_lower_adjoint(const CMatrix& l, const CMatrix& b) {
    if (!l.is_square() || l.rows() != b.rows()) {
        throw DimensionMismatch("solve_unit_lower_adjoint: " + shape(l) + " vs rhs " + shape(b));
    }
    const std::size_t n = l.rows();
    CMatrix x = b;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t ii = n; ii-- > 0;) {
            cplx s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) {
                s -= std::conj(l(k, ii)) * x(k, c);
            }
            x(ii, c) = s;
        }
    }
    return x;
}

double det_from_pivots(const InnovationsForm& f) {
    double p = 1.0;
    for (double d : f.d2) {
        p *= d;
    }
    return p;
}

CMatrix solve_psd(const HermitianGram& g, const CMatrix& b) {
    if (g.dim() != b.rows()) {
        throw DimensionMismatch("solve_psd: gram is " + std::to_string(g.dim()) + "-dimensional, rhs " + shape(b));
    }
    const InnovationsForm f = ldl_semidefinite(g);
    if (f.rank < g.dim()) {
        throw SingularGram("solve_psd: gram has rank " + std::to_string(f.rank) + " < " + std::to_string(g.dim()));
    }
    CMatrix x = solve_unit_lower(f.L, b);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (auto& v : x.row(i)) {
            v /= f.d2[i];
        }
    }
    return solve_unit_lower_adjoint(f.L, x);
}

CMatrix reconstruct(const InnovationsForm& f) {
    CMatrix ld = f.L;
    for (std::size_t i = 0; i < ld.rows(); ++i) {
        for (std::size_t j = 0; j < ld.cols(); ++j) {
            ld(i, j) *= f.d2[j];
        }
    }
    return matmul(ld, conj_transpose(f.L));
}

} // namespace gaussdfe
