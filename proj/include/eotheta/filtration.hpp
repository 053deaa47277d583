// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "eotheta/field.hpp"
#include "eotheta/matrix.hpp"
#include "eotheta/multilinear.hpp"

namespace eotheta {

/// A finite, separated, exhaustive, descending filtration of an explicit
/// vector space: steps[0] = ambient down to steps.back() = 0, each step a
/// canonical row-space basis matrix. Graded pieces are the successive
/// dimension drops.
struct FilteredModule {
    size_t ambient_dim = 0;
    std::vector<FqMatrix> steps;

    const ExtField& field() const { return steps.at(0).zero_elem().field(); }
    size_t length() const { return steps.size() - 1; }  // index of the zero step

    std::vector<size_t> graded_dims() const {
        std::vector<size_t> g;
        for (size_t i = 0; i + 1 < steps.size(); ++i)
            g.push_back(steps[i].rows() - steps[i + 1].rows());
        return g;
    }

    void validate() const {
        if (steps.size() < 2) throw std::invalid_argument("filtration needs at least two steps");
        if (steps.front().rows() != ambient_dim)
            throw std::invalid_argument("filtration must start at the ambient space");
        if (steps.back().rows() != 0)
            throw std::invalid_argument("filtration must end at zero");
        for (const auto& s : steps)
            if (s.cols() != ambient_dim)
                throw std::invalid_argument("filtration step has wrong ambient dimension");
        for (size_t i = 0; i + 1 < steps.size(); ++i)
            if (!subspace_leq(steps[i + 1], steps[i]))
                throw std::invalid_argument("filtration steps are not descending");
    }
};

/// Build a filtration from subspace matrices (ambient and zero are added).
inline FilteredModule make_filtration(const ExtField& F, size_t ambient_dim,
                                      const std::vector<FqMatrix>& inner_steps) {
    FilteredModule fm;
    fm.ambient_dim = ambient_dim;
    fm.steps.push_back(subspace_full(F, ambient_dim));
    for (const auto& s : inner_steps) fm.steps.push_back(s.row_space());
    fm.steps.push_back(subspace_zero(F, ambient_dim));
    fm.validate();
    return fm;
}

/// The one-step (trivial) filtration: ambient then zero.
inline FilteredModule trivial_filtration(const ExtField& F, size_t ambient_dim) {
    return make_filtration(F, ambient_dim, {});
}

namespace detail {
inline std::vector<Fq> matrix_row(const FqMatrix& m, size_t r) {
    std::vector<Fq> v;
    v.reserve(m.cols());
    for (size_t j = 0; j < m.cols(); ++j) v.push_back(m.at(r, j));
    return v;
}
}  // namespace detail

/// Tensor product filtration F^k(A (x) B) = sum_{i+j=k} F^i(A) (x) F^j(B),
/// on the Kronecker basis a_i (x) b_j |-> index i*dim(B)+j. The graded
/// decomposition gr^k = (+)_{i+j=k} gr^i (x) gr^j is verified on dimensions.
inline FilteredModule tensor_filtration(const FilteredModule& A, const FilteredModule& B) {
    if (!A.field().same(B.field()))
        throw std::invalid_argument("tensor_filtration: coefficient field mismatch");
    const ExtField& F = A.field();
    const size_t dim = A.ambient_dim * B.ambient_dim;
    const size_t sA = A.steps.size() - 1, sB = B.steps.size() - 1;
    std::vector<FqMatrix> inner;
    for (size_t k = 1; k + 1 <= sA + sB - 1; ++k) {
        // spanning set: Kronecker products of basis rows with i + j = k
        FqMatrix span = fq_matrix(F, 0, dim);
        std::vector<FqMatrix> rows;
        for (size_t i = 0; i <= std::min(k, sA); ++i) {
            size_t j = k - i;
            if (j > sB) continue;
            const FqMatrix& FA = A.steps[i];
            const FqMatrix& FB = B.steps[j];
            FqMatrix block = fq_matrix(F, FA.rows() * FB.rows(), dim);
            for (size_t a = 0; a < FA.rows(); ++a)
                for (size_t b = 0; b < FB.rows(); ++b)
                    for (size_t x = 0; x < A.ambient_dim; ++x)
                        for (size_t y = 0; y < B.ambient_dim; ++y)
                            block.at(a * FB.rows() + b, x * B.ambient_dim + y) =
                                FA.at(a, x) * FB.at(b, y);
            span = FqMatrix::vstack(span, block);
        }
        inner.push_back(span.row_space());
    }
    FilteredModule out = make_filtration(F, dim, inner);
    // graded decomposition (dimension form)
    auto gA = A.graded_dims(), gB = B.graded_dims(), gO = out.graded_dims();
    for (size_t k = 0; k < gO.size(); ++k) {
        size_t expect = 0;
        for (size_t i = 0; i <= k && i < gA.size(); ++i)
            if (k - i < gB.size()) expect += gA[i] * gB[k - i];
        if (gO[k] != expect)
            throw std::logic_error("tensor filtration graded decomposition failed");
    }
    return out;
}

/// Dual filtration F^i(A^dual) = Ann(F^{r-i+1}(A)); graded pieces reverse.
inline FilteredModule dual_filtration(const FilteredModule& A) {
    const ExtField& F = A.field();
    const size_t s = A.steps.size() - 1;  // F^s = 0
    std::vector<FqMatrix> inner;
    for (size_t i = 1; i < s; ++i) {
        // F^i(dual) = (A / F^{s-i})^dual = annihilator of F^{s-i}
        const FqMatrix& sub = A.steps[s - i];
        inner.push_back(sub.rows() == 0 ? subspace_full(F, A.ambient_dim)
                                        : sub.kernel_basis().row_space());
    }
    FilteredModule out = make_filtration(F, A.ambient_dim, inner);
    auto gA = A.graded_dims(), gO = out.graded_dims();
    for (size_t i = 0; i < gO.size(); ++i)
        if (gO[i] != gA[gA.size() - 1 - i])
            throw std::logic_error("dual filtration graded reversal failed");
    return out;
}

/// Koszul filtration K^i(wedge^j F) = im(wedge^i F' (x) wedge^{j-i} F) of the
/// j-th exterior power induced by a subspace F' of F, on the Plucker basis.
/// Graded pieces match wedge^i F' (x) wedge^{j-i}(F/F') in dimension.
inline FilteredModule koszul_filtration(const FqMatrix& sub, size_t ambient_dim, int j) {
    const ExtField& F = sub.zero_elem().field();
    if (sub.cols() != ambient_dim) throw std::invalid_argument("subspace/ambient mismatch");
    if (j < 0 || static_cast<size_t>(j) > ambient_dim)
        throw std::invalid_argument("exterior power out of range");
    FqMatrix fp = sub.row_space();
    const int dsub = static_cast<int>(fp.rows());
    const int n = static_cast<int>(ambient_dim);
    auto basis = wedge_basis(n, j);
    const size_t dim = basis.size();

    std::vector<FqMatrix> inner;
    for (int i = 1; i <= j; ++i) {
        // spanning set: wedge of i rows of F' with j-i standard basis vectors
        std::vector<std::vector<Fq>> rows;
        for (const auto& pick : wedge_basis(dsub, i)) {
            for (const auto& rest : wedge_basis(n, j - i)) {
                std::vector<std::vector<Fq>> vs;
                for (int a : pick) vs.push_back(detail::matrix_row(fp, a));
                for (int t : rest) {
                    std::vector<Fq> e(n, F.zero());
                    e[t] = F.one();
                    vs.push_back(e);
                }
                rows.push_back(wedge_coords(vs, n, F));
            }
        }
        FqMatrix span = fq_matrix(F, rows.size(), dim);
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < dim; ++c) span.at(r, c) = rows[r][c];
        inner.push_back(span.row_space());
    }
    FilteredModule out = make_filtration(F, dim, inner);
    auto g = out.graded_dims();
    for (int i = 0; i <= j; ++i) {
        size_t expect = static_cast<size_t>(wedge_dim(dsub, i)) *
                        static_cast<size_t>(wedge_dim(n - dsub, j - i));
        if (g[i] != expect) throw std::logic_error("Koszul graded dimensions failed");
    }
    return out;
}

/// Symmetric-power filtration: F^k(Sym^j A) is spanned by the products of
/// basis vectors with exponent pattern in Lambda(k), i.e. e_i factors from
/// F^i(A) with sum e_i = j, sum i e_i = k. Endpoints: F^0 = Sym^j(ambient),
/// F^{j r} = Sym^j(F^r).
inline FilteredModule sym_filtration(const FilteredModule& A, int j) {
    if (j < 0) throw std::invalid_argument("negative symmetric power");
    const ExtField& F = A.field();
    const int n = static_cast<int>(A.ambient_dim);
    const int r = static_cast<int>(A.steps.size()) - 2;  // last index before zero
    auto basis = sym_basis(n, j);
    const size_t dim = basis.size();

    std::vector<FqMatrix> inner;
    for (int k = 1; k <= j * r; ++k) {
        std::vector<std::vector<Fq>> rows;
        for (const auto& lam : lambda_set(r, j, k)) {
            // all products of e_i choices (with repetition) from each step's basis
            std::vector<std::vector<std::vector<Fq>>> slot_choices;  // per i, list of tuples
            std::vector<std::vector<std::vector<int>>> picks(r + 1);
            bool empty = false;
            for (int i = 0; i <= r; ++i) {
                picks[i] = sym_basis(static_cast<int>(A.steps[i].rows()), lam[i]);
                if (picks[i].empty()) empty = true;
            }
            if (empty) continue;
            // iterate the product of pick lists
            std::vector<size_t> idx(r + 1, 0);
            for (;;) {
                std::vector<std::vector<Fq>> vs;
                for (int i = 0; i <= r; ++i)
                    for (int a : picks[i][idx[i]]) vs.push_back(detail::matrix_row(A.steps[i], a));
                rows.push_back(sym_coords(vs, n, F));
                int pos = r;
                while (pos >= 0 && ++idx[pos] == picks[pos].size()) idx[pos--] = 0;
                if (pos < 0) break;
            }
        }
        FqMatrix span = fq_matrix(F, rows.size(), dim);
        for (size_t a = 0; a < rows.size(); ++a)
            for (size_t c = 0; c < dim; ++c) span.at(a, c) = rows[a][c];
        inner.push_back(span.row_space());
    }
    FilteredModule out = make_filtration(F, dim, inner);
    // graded dimensions against the Lambda(k) decomposition of the source's
    // graded pieces
    auto gA = A.graded_dims();
    auto gO = out.graded_dims();
    for (int k = 0; k <= j * r; ++k) {
        size_t expect = 0;
        for (const auto& lam : lambda_set(r, j, k)) {
            size_t term = 1;
            for (int i = 0; i <= r; ++i)
                term *= static_cast<size_t>(sym_dim(static_cast<int64_t>(gA[i]), lam[i]));
            expect += term;
        }
        if (gO[k] != expect)
            throw std::logic_error("symmetric filtration graded decomposition failed");
    }
    return out;
}

}  // namespace eotheta
