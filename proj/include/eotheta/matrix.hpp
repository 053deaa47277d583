// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eotheta/field.hpp"

namespace eotheta {

/// Dense matrix over a commutative coefficient type T (a field element or a
/// truncated-ring element). T must provide +, -, *, unary -, ==, is_zero().
/// Division-based algorithms (rref, rank, kernel, inverse) additionally need
/// T::inverse() and are only ever instantiated for field coefficients.
template <class T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(size_t rows, size_t cols, const T& zero)
        : rows_(rows), cols_(cols), zero_(zero), a_(rows * cols, zero) {}

    static Matrix identity(size_t n, const T& zero, const T& one) {
        Matrix m(n, n, zero);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = one;
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    const T& zero_elem() const { return zero_; }

    T& at(size_t i, size_t j) {
        if (i >= rows_ || j >= cols_) throw std::out_of_range("matrix index");
        return a_[i * cols_ + j];
    }
    const T& at(size_t i, size_t j) const {
        if (i >= rows_ || j >= cols_) throw std::out_of_range("matrix index");
        return a_[i * cols_ + j];
    }
    T& operator()(size_t i, size_t j) { return at(i, j); }
    const T& operator()(size_t i, size_t j) const { return at(i, j); }

    bool operator==(const Matrix& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_ && a_ == rhs.a_;
    }
    bool operator!=(const Matrix& rhs) const { return !(*this == rhs); }

    Matrix operator+(const Matrix& rhs) const {
        require_same_shape(rhs);
        Matrix r(*this);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = r.a_[i] + rhs.a_[i];
        return r;
    }
    Matrix operator-(const Matrix& rhs) const {
        require_same_shape(rhs);
        Matrix r(*this);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = r.a_[i] - rhs.a_[i];
        return r;
    }
    Matrix operator*(const Matrix& rhs) const {
        if (cols_ != rhs.rows_) throw std::invalid_argument("matrix dimension mismatch");
        Matrix r(rows_, rhs.cols_, zero_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t l = 0; l < cols_; ++l) {
                const T& x = at(i, l);
                if (x.is_zero()) continue;
                for (size_t j = 0; j < rhs.cols_; ++j)
                    r.at(i, j) = r.at(i, j) + x * rhs.at(l, j);
            }
        return r;
    }
    Matrix scaled(const T& c) const {
        Matrix r(*this);
        for (auto& v : r.a_) v = v * c;
        return r;
    }

    std::vector<T> apply(const std::vector<T>& v) const {
        if (v.size() != cols_) throw std::invalid_argument("matrix/vector dimension mismatch");
        std::vector<T> r(rows_, zero_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r[i] = r[i] + at(i, j) * v[j];
        return r;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_, zero_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    Matrix map(const std::function<T(const T&)>& f) const {
        Matrix r(*this);
        for (auto& v : r.a_) v = f(v);
        return r;
    }

    Matrix submatrix(size_t i0, size_t j0, size_t nr, size_t nc) const {
        Matrix r(nr, nc, zero_);
        for (size_t i = 0; i < nr; ++i)
            for (size_t j = 0; j < nc; ++j) r.at(i, j) = at(i0 + i, j0 + j);
        return r;
    }

    static Matrix vstack(const Matrix& a, const Matrix& b) {
        if (a.rows_ == 0) return b;
        if (b.rows_ == 0) return a;
        if (a.cols_ != b.cols_) throw std::invalid_argument("vstack width mismatch");
        Matrix r(a.rows_ + b.rows_, a.cols_, a.zero_);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
        for (size_t i = 0; i < b.rows_; ++i)
            for (size_t j = 0; j < b.cols_; ++j) r.at(a.rows_ + i, j) = b.at(i, j);
        return r;
    }
    static Matrix hstack(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_) throw std::invalid_argument("hstack height mismatch");
        Matrix r(a.rows_, a.cols_ + b.cols_, a.zero_);
        for (size_t i = 0; i < a.rows_; ++i) {
            for (size_t j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
            for (size_t j = 0; j < b.cols_; ++j) r.at(i, a.cols_ + j) = b.at(i, j);
        }
        return r;
    }

    /// Determinant by Laplace expansion over column subsets; division-free,
    /// so it is valid over rings where Gaussian elimination is not.
    T det() const {
        if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
        if (rows_ == 0) throw std::invalid_argument("determinant of empty matrix");
        return det_expand(0, (1u << cols_) - 1);
    }

    /// Cofactor-transpose adjugate: adj(M) * M = M * adj(M) = det(M) * I.
    /// Division-free by construction; defined for singular M too. The 1x1
    /// case returns (1) (empty-minor convention).
    Matrix adjugate() const {
        if (rows_ != cols_) throw std::invalid_argument("adjugate of non-square matrix");
        size_t n = rows_;
        if (n == 0) throw std::invalid_argument("adjugate of empty matrix");
        Matrix adj(n, n, zero_);
        if (n == 1) {
            // the (empty) minor determinant is 1 = det of the 0x0 matrix
            adj.at(0, 0) = one_from_context();
            return adj;
        }
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Matrix minor(n - 1, n - 1, zero_);
                for (size_t r = 0, rr = 0; r < n; ++r) {
                    if (r == i) continue;
                    for (size_t c = 0, cc = 0; c < n; ++c) {
                        if (c == j) continue;
                        minor.at(rr, cc) = at(r, c);
                        ++cc;
                    }
                    ++rr;
                }
                T cof = minor.det();
                if ((i + j) % 2 == 1) cof = -cof;
                adj.at(j, i) = cof;  // transpose of cofactor matrix
            }
        return adj;
    }

    // --- algorithms requiring division (field coefficients) ---

    /// In-place reduced row echelon form; returns pivot column indices.
    std::vector<size_t> rref() {
        std::vector<size_t> pivots;
        size_t row = 0;
        for (size_t col = 0; col < cols_ && row < rows_; ++col) {
            size_t sel = row;
            while (sel < rows_ && at(sel, col).is_zero()) ++sel;
            if (sel == rows_) continue;
            swap_rows(sel, row);
            T inv = at(row, col).inverse();
            for (size_t j = col; j < cols_; ++j) at(row, j) = at(row, j) * inv;
            for (size_t i = 0; i < rows_; ++i) {
                if (i == row || at(i, col).is_zero()) continue;
                T f = at(i, col);
                for (size_t j = col; j < cols_; ++j) at(i, j) = at(i, j) - f * at(row, j);
            }
            pivots.push_back(col);
            ++row;
        }
        return pivots;
    }

    size_t rank() const {
        Matrix m(*this);
        return m.rref().size();
    }

    /// Basis of the right kernel, one vector per row.
    Matrix kernel_basis() const {
        Matrix m(*this);
        std::vector<size_t> pivots = m.rref();
        std::vector<bool> is_pivot(cols_, false);
        for (size_t c : pivots) is_pivot[c] = true;
        size_t dim = cols_ - pivots.size();
        Matrix ker(dim, cols_, zero_);
        size_t kr = 0;
        for (size_t free_col = 0; free_col < cols_; ++free_col) {
            if (is_pivot[free_col]) continue;
            ker.at(kr, free_col) = one_from_context();
            for (size_t pr = 0; pr < pivots.size(); ++pr)
                ker.at(kr, pivots[pr]) = -m.at(pr, free_col);
            ++kr;
        }
        return ker;
    }

    /// Row space in canonical (RREF, zero rows dropped) form.
    Matrix row_space() const {
        Matrix m(*this);
        std::vector<size_t> pivots = m.rref();
        return m.submatrix(0, 0, pivots.size(), cols_);
    }

    Matrix inverse() const {
        if (rows_ != cols_) throw std::invalid_argument("inverse of non-square matrix");
        Matrix aug = hstack(*this, identity(rows_, zero_, one_from_context()));
        std::vector<size_t> pivots = aug.rref();
        if (pivots.size() != rows_) throw std::invalid_argument("matrix is singular");
        return aug.submatrix(0, cols_, rows_, cols_);
    }

    bool is_invertible() const { return rows_ == cols_ && rank() == rows_; }

private:
    void require_same_shape(const Matrix& rhs) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw std::invalid_argument("matrix shape mismatch");
    }
    void swap_rows(size_t i, size_t j) {
        if (i == j) return;
        for (size_t c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
    }
    T one_from_context() const;

    // det of the square block formed by rows [row..] and the columns in mask,
    // expanding along the first row; memoless recursion is fine at this scale.
    T det_expand(size_t row, unsigned mask) const {
        if (mask == 0) return one_from_context();
        T acc = zero_;
        int sign = 1;  // flips per *set* column, i.e. per position in the minor
        for (size_t j = 0; j < cols_; ++j) {
            if (!(mask & (1u << j))) continue;
            const T& x = at(row, j);
            if (!x.is_zero()) {
                T term = x * det_expand(row + 1, mask & ~(1u << j));
                acc = (sign > 0) ? acc + term : acc - term;
            }
            sign = -sign;
        }
        return acc;
    }

    size_t rows_, cols_;
    T zero_;
    std::vector<T> a_;
};

// one_from_context: how to produce a multiplicative identity of the right
// coefficient type. Specialized per coefficient type below / in ring headers.
template <>
inline Fq Matrix<Fq>::one_from_context() const {
    return zero_.field().one();
}

using FqMatrix = Matrix<Fq>;

inline FqMatrix fq_matrix(const ExtField& F, size_t rows, size_t cols) {
    return FqMatrix(rows, cols, F.zero());
}
inline FqMatrix fq_identity(const ExtField& F, size_t n) {
    return FqMatrix::identity(n, F.zero(), F.one());
}
/// Entrywise x -> x^{p^a}.
inline FqMatrix frobenius(const FqMatrix& m, int64_t a) {
    return m.map([a](const Fq& x) { return x.frobenius(a); });
}

// --- subspaces of F_q^n, represented by canonical row-space matrices ---

/// Canonical representative (RREF rows) of the span of the rows of m.
inline FqMatrix subspace(const FqMatrix& m) { return m.row_space(); }

inline FqMatrix subspace_zero(const ExtField& F, size_t ambient) {
    return fq_matrix(F, 0, ambient);
}
inline FqMatrix subspace_full(const ExtField& F, size_t ambient) {
    return fq_identity(F, ambient);
}

inline FqMatrix subspace_sum(const FqMatrix& a, const FqMatrix& b) {
    return FqMatrix::vstack(a, b).row_space();
}

/// dim(A cap B) = dim A + dim B - dim(A + B); basis via kernel of [A^T | -B^T].
inline FqMatrix subspace_intersect(const FqMatrix& a, const FqMatrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("ambient dimension mismatch");
    if (a.rows() == 0 || b.rows() == 0) return subspace_zero(a.zero_elem().field(), a.cols());
    // Solve x^T a = y^T b: kernel of the stacked transpose.
    FqMatrix stacked = FqMatrix::vstack(a, b.map([](const Fq& x) { return -x; }));
    FqMatrix ker = stacked.transpose().kernel_basis();  // rows: (x | y)
    FqMatrix basis(ker.rows(), a.cols(), a.zero_elem());
    for (size_t r = 0; r < ker.rows(); ++r)
        for (size_t j = 0; j < a.cols(); ++j) {
            Fq acc = a.zero_elem();
            for (size_t i = 0; i < a.rows(); ++i) acc = acc + ker.at(r, i) * a.at(i, j);
            basis.at(r, j) = acc;
        }
    return basis.row_space();
}

inline bool subspace_leq(const FqMatrix& a, const FqMatrix& b) {
    if (a.rows() == 0) return true;
    return FqMatrix::vstack(a, b).rank() == b.rank();
}
inline bool subspace_eq(const FqMatrix& a, const FqMatrix& b) {
    return a.row_space() == b.row_space();
}

/// Image of the subspace spanned by the rows of s under the linear map m
/// (columns act on coordinates): span of { m v : v in rows(s) }.
inline FqMatrix subspace_image(const FqMatrix& m, const FqMatrix& s) {
    if (m.cols() != s.cols()) throw std::invalid_argument("map/subspace dimension mismatch");
    return (s * m.transpose()).row_space();
}

/// Preimage { x : m x in rows(s) }.
inline FqMatrix subspace_preimage(const FqMatrix& m, const FqMatrix& s) {
    if (m.rows() != s.cols()) throw std::invalid_argument("map/subspace dimension mismatch");
    // x in preimage iff m x = s^T y for some y: kernel of [m | -s^T], x-part.
    FqMatrix st = s.transpose().map([](const Fq& x) { return -x; });
    FqMatrix aug = (s.rows() == 0) ? m : FqMatrix::hstack(m, st);
    FqMatrix ker = aug.kernel_basis();
    return ker.submatrix(0, 0, ker.rows(), m.cols()).row_space();
}

/// Entrywise Frobenius twist of a subspace: span{ v^{(p^a)} }.
inline FqMatrix subspace_frobenius(const FqMatrix& s, int64_t a) {
    return frobenius(s, a).row_space();
}

inline std::string to_string(const FqMatrix& m) {
    std::string s = "[";
    for (size_t i = 0; i < m.rows(); ++i) {
        s += (i ? "; " : "");
        for (size_t j = 0; j < m.cols(); ++j) s += (j ? " " : "") + m.at(i, j).str();
    }
    return s + "]";
}

}  // namespace eotheta
