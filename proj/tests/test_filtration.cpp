// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "eotheta/filtration.hpp"

using namespace eotheta;

namespace {

FqMatrix random_subspace(const ExtField& F, size_t dim_hint, size_t ambient,
                         std::mt19937_64& rng) {
    std::uniform_int_distribution<int64_t> dist(0, F.q() - 1);
    FqMatrix m = fq_matrix(F, dim_hint, ambient);
    for (size_t i = 0; i < dim_hint; ++i)
        for (size_t j = 0; j < ambient; ++j) m.at(i, j) = F.element(dist(rng));
    return m.row_space();
}

/// random descending chain inside F_q^ambient with the given inner depth
FilteredModule random_filtration(const ExtField& F, size_t ambient, size_t depth,
                                 std::mt19937_64& rng) {
    std::vector<FqMatrix> inner;
    FqMatrix cur = subspace_full(F, ambient);
    for (size_t d = 0; d < depth; ++d) {
        // intersect with a random subspace to shrink (may keep the dimension)
        FqMatrix s = random_subspace(F, ambient - 1, ambient, rng);
        cur = subspace_intersect(cur, s);
        inner.push_back(cur);
    }
    return make_filtration(F, ambient, inner);
}

size_t total_graded(const FilteredModule& fm) {
    auto g = fm.graded_dims();
    return std::accumulate(g.begin(), g.end(), size_t{0});
}

// wedge multiplication on Plucker coordinates: (S, T) -> sign * (S u T)
std::vector<Fq> wedge_mult(const std::vector<Fq>& a, const std::vector<Fq>& b, int n, int ja,
                           int jb, const ExtField& F) {
    auto ba = wedge_basis(n, ja), bb = wedge_basis(n, jb), bo = wedge_basis(n, ja + jb);
    std::map<std::vector<int>, size_t> idx;
    for (size_t i = 0; i < bo.size(); ++i) idx[bo[i]] = i;
    std::vector<Fq> out(bo.size(), F.zero());
    for (size_t i = 0; i < ba.size(); ++i)
        for (size_t j = 0; j < bb.size(); ++j) {
            if (a[i].is_zero() || b[j].is_zero()) continue;
            std::vector<int> cat = ba[i];
            cat.insert(cat.end(), bb[j].begin(), bb[j].end());
            // sign and collision check by insertion sort
            int inversions = 0;
            bool repeat = false;
            std::vector<int> sorted;
            for (int v : cat) {
                size_t pos = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
                if (pos < sorted.size() && sorted[pos] == v) {
                    repeat = true;
                    break;
                }
                inversions += static_cast<int>(sorted.size() - pos);
                sorted.insert(sorted.begin() + pos, v);
            }
            if (repeat) continue;
            Fq term = a[i] * b[j];
            if (inversions % 2) term = -term;
            out[idx[sorted]] = out[idx[sorted]] + term;
        }
    return out;
}

}  // namespace

TEST_CASE("tensor filtration") {
    const ExtField& F3 = ExtField::get(3, 1);
    SECTION("trivial tensor trivial is trivial") {
        FilteredModule A = trivial_filtration(F3, 2);
        FilteredModule B = trivial_filtration(F3, 3);
        FilteredModule T = tensor_filtration(A, B);
        CHECK(T.ambient_dim == 6);
        CHECK(T.graded_dims() == std::vector<size_t>{6});
    }
    SECTION("graded decomposition on random two-step filtrations") {
        std::mt19937_64 rng(31);
        for (int t = 0; t < 15; ++t) {
            FilteredModule A = random_filtration(F3, 3, 1, rng);
            FilteredModule B = random_filtration(F3, 4, 1, rng);
            FilteredModule T = tensor_filtration(A, B);  // verifies internally
            CHECK(total_graded(T) == 12);
            auto gA = A.graded_dims(), gB = B.graded_dims(), gT = T.graded_dims();
            for (size_t k = 0; k < gT.size(); ++k) {
                size_t expect = 0;
                for (size_t i = 0; i <= k && i < gA.size(); ++i)
                    if (k - i < gB.size()) expect += gA[i] * gB[k - i];
                CHECK(gT[k] == expect);
            }
        }
    }
    SECTION("threefold iteration matches the multi-index formula") {
        std::mt19937_64 rng(32);
        const ExtField& F2 = ExtField::get(2, 1);
        FilteredModule A = random_filtration(F2, 2, 1, rng);
        FilteredModule B = random_filtration(F2, 2, 1, rng);
        FilteredModule C = random_filtration(F2, 2, 2, rng);
        FilteredModule T = tensor_filtration(tensor_filtration(A, B), C);
        auto gA = A.graded_dims(), gB = B.graded_dims(), gC = C.graded_dims();
        auto gT = T.graded_dims();
        for (size_t k = 0; k < gT.size(); ++k) {
            size_t expect = 0;  // direct enumeration of |j| = k
            for (size_t i = 0; i < gA.size(); ++i)
                for (size_t j = 0; j < gB.size(); ++j)
                    for (size_t l = 0; l < gC.size(); ++l)
                        if (i + j + l == k) expect += gA[i] * gB[j] * gC[l];
            CHECK(gT[k] == expect);
        }
        // associativity of the graded dimensions
        FilteredModule T2 = tensor_filtration(A, tensor_filtration(B, C));
        CHECK(T.graded_dims() == T2.graded_dims());
    }
}

TEST_CASE("dual filtration") {
    const ExtField& F5 = ExtField::get(5, 1);
    SECTION("trivial goes to trivial") {
        FilteredModule T = dual_filtration(trivial_filtration(F5, 3));
        CHECK(T.graded_dims() == std::vector<size_t>{3});
    }
    SECTION("two-step 4 > 2 > 0: graded dims (2,2) reversed") {
        std::mt19937_64 rng(33);
        FqMatrix s = random_subspace(F5, 2, 4, rng);
        REQUIRE(s.rows() == 2);
        FilteredModule A = make_filtration(F5, 4, {s});
        FilteredModule D = dual_filtration(A);
        CHECK(D.graded_dims() == std::vector<size_t>{2, 2});
    }
    SECTION("asymmetric graded dims reverse") {
        const ExtField& F2 = ExtField::get(2, 1);
        FqMatrix s = fq_matrix(F2, 1, 4);
        s.at(0, 2) = F2.one();
        FilteredModule A = make_filtration(F2, 4, {s});
        CHECK(A.graded_dims() == std::vector<size_t>{3, 1});
        CHECK(dual_filtration(A).graded_dims() == std::vector<size_t>{1, 3});
    }
    SECTION("double dual restores the graded dims") {
        std::mt19937_64 rng(34);
        for (int t = 0; t < 10; ++t) {
            FilteredModule A = random_filtration(F5, 4, 2, rng);
            CHECK(dual_filtration(dual_filtration(A)).graded_dims() == A.graded_dims());
        }
    }
}

TEST_CASE("Koszul filtration") {
    const ExtField& F3 = ExtField::get(3, 1);
    SECTION("det decomposes as det F' tensor det F/F'") {
        std::mt19937_64 rng(35);
        FqMatrix sub = random_subspace(F3, 2, 4, rng);
        REQUIRE(sub.rows() == 2);
        FilteredModule K = koszul_filtration(sub, 4, 4);
        // wedge^4 of a 4-space is a line concentrated in degree rk(F') = 2
        CHECK(K.ambient_dim == 1);
        CHECK(K.graded_dims() == std::vector<size_t>{0, 0, 1, 0, 0});
    }
    SECTION("zero subspace gives the trivial filtration") {
        FilteredModule K = koszul_filtration(subspace_zero(F3, 4), 4, 2);
        auto g = K.graded_dims();
        CHECK(g[0] == 6);
        for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] == 0);
    }
    SECTION("dim F = 4, dim F' = 2, j = 2: graded dims (1,4,1) pattern") {
        std::mt19937_64 rng(36);
        FqMatrix sub = random_subspace(F3, 2, 4, rng);
        REQUIRE(sub.rows() == 2);
        FilteredModule K = koszul_filtration(sub, 4, 2);
        CHECK(K.graded_dims() == std::vector<size_t>{1, 4, 1});
    }
    SECTION("binomial convolution formula across the small grid") {
        std::mt19937_64 rng(37);
        const ExtField& F2 = ExtField::get(2, 1);
        for (int n = 1; n <= 5; ++n)
            for (int dsub = 0; dsub <= n; ++dsub)
                for (int j = 0; j <= n; ++j) {
                    FqMatrix sub = random_subspace(F2, dsub, n, rng);
                    FilteredModule K = koszul_filtration(sub, n, j);  // verifies internally
                    auto g = K.graded_dims();
                    for (int i = 0; i <= j; ++i)
                        CHECK(g[i] == static_cast<size_t>(wedge_dim(sub.rows(), i) *
                                                          wedge_dim(n - sub.rows(), j - i)));
                }
    }
    SECTION("product compatibility K^i wedge K^i' inside K^{i+i'}") {
        std::mt19937_64 rng(38);
        const int n = 4;
        FqMatrix sub = random_subspace(F3, 2, n, rng);
        FilteredModule K1 = koszul_filtration(sub, n, 1);
        FilteredModule K2 = koszul_filtration(sub, n, 2);
        FilteredModule K3 = koszul_filtration(sub, n, 3);
        for (int i = 0; i <= 1; ++i)
            for (int i2 = 0; i2 <= 2; ++i2) {
                int target = std::min(i + i2, 3 + 1);
                const FqMatrix& A = K1.steps[std::min<size_t>(i, K1.steps.size() - 1)];
                const FqMatrix& B = K2.steps[std::min<size_t>(i2, K2.steps.size() - 1)];
                for (size_t a = 0; a < A.rows(); ++a)
                    for (size_t b = 0; b < B.rows(); ++b) {
                        std::vector<Fq> va, vb;
                        for (size_t c = 0; c < A.cols(); ++c) va.push_back(A.at(a, c));
                        for (size_t c = 0; c < B.cols(); ++c) vb.push_back(B.at(b, c));
                        std::vector<Fq> prod = wedge_mult(va, vb, n, 1, 2, F3);
                        FqMatrix pm = fq_matrix(F3, 1, prod.size());
                        for (size_t c = 0; c < prod.size(); ++c) pm.at(0, c) = prod[c];
                        CHECK(subspace_leq(pm.row_space(),
                                           K3.steps[std::min<size_t>(target, K3.steps.size() - 1)]));
                    }
            }
    }
}

TEST_CASE("symmetric power filtration") {
    const ExtField& F3 = ExtField::get(3, 1);
    SECTION("j = 1 recovers the original filtration") {
        std::mt19937_64 rng(39);
        FilteredModule A = random_filtration(F3, 4, 2, rng);
        FilteredModule S = sym_filtration(A, 1);
        CHECK(S.graded_dims() == A.graded_dims());
        for (size_t i = 0; i < A.steps.size(); ++i) CHECK(subspace_eq(S.steps[i], A.steps[i]));
    }
    SECTION("one-step 2 > 1 > 0 with j = 2 gives graded dims (1,1,1)") {
        FqMatrix s = fq_matrix(F3, 1, 2);
        s.at(0, 0) = F3.one();
        FilteredModule A = make_filtration(F3, 2, {s});
        FilteredModule S = sym_filtration(A, 2);
        CHECK(S.graded_dims() == std::vector<size_t>{1, 1, 1});
    }
    SECTION("endpoint F^{jr} = Sym^j(F^r)") {
        std::mt19937_64 rng(40);
        FilteredModule A = random_filtration(F3, 3, 1, rng);
        int j = 3;
        FilteredModule S = sym_filtration(A, j);
        size_t r = A.steps.size() - 2;
        size_t last = S.steps[j * r].rows();
        CHECK(last == static_cast<size_t>(sym_dim(A.steps[r].rows(), j)));
    }
    SECTION("graded dims match the brute-force Lambda(k) enumeration") {
        std::mt19937_64 rng(41);
        const ExtField& F2 = ExtField::get(2, 1);
        for (size_t ambient = 1; ambient <= 4; ++ambient)
            for (int j = 0; j <= 4 && j + ambient <= 7; ++j) {
                FilteredModule A = random_filtration(F2, ambient, 2, rng);
                FilteredModule S = sym_filtration(A, j);  // verifies internally
                auto gA = A.graded_dims();
                auto gS = S.graded_dims();
                int r = static_cast<int>(A.steps.size()) - 2;
                for (int k = 0; k < static_cast<int>(gS.size()); ++k) {
                    size_t expect = 0;
                    for (const auto& lam : lambda_set(r, j, k)) {
                        size_t term = 1;
                        for (int i = 0; i <= r; ++i)
                            term *= static_cast<size_t>(sym_dim(gA[i], lam[i]));
                        expect += term;
                    }
                    CHECK(gS[k] == expect);
                }
            }
    }
}

TEST_CASE("every constructed filtration is conservative: sum of graded dims") {
    std::mt19937_64 rng(42);
    const ExtField& F3 = ExtField::get(3, 1);
    for (int t = 0; t < 5; ++t) {
        FilteredModule A = random_filtration(F3, 3, 2, rng);
        FilteredModule B = random_filtration(F3, 2, 1, rng);
        CHECK(total_graded(A) == 3);
        CHECK(total_graded(tensor_filtration(A, B)) == 6);
        CHECK(total_graded(dual_filtration(A)) == 3);
        CHECK(total_graded(sym_filtration(B, 2)) == 3);
        FqMatrix sub = random_subspace(F3, 2, 3, rng);
        CHECK(total_graded(koszul_filtration(sub, 3, 2)) == 3);
    }
}
