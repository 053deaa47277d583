// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "eotheta/field.hpp"
#include "eotheta/matrix.hpp"

namespace eotheta {

namespace detail {
inline __int128 binom128(int64_t n, int64_t k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    __int128 r = 1;
    for (int64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i);
        r = r / i;  // exact: r is always a binomial prefix
    }
    return r;
}
inline int64_t to64(__int128 v) {
    if (v > INT64_MAX || v < 0) throw std::overflow_error("dimension exceeds 64 bits");
    return static_cast<int64_t>(v);
}
}  // namespace detail

/// dim Sym^d of an N-dimensional space (polynomial model), d >= 0.
inline int64_t sym_dim(int64_t N, int64_t d) {
    if (d < 0) throw std::invalid_argument("negative symmetric power");
    if (N == 0) return d == 0 ? 1 : 0;
    return detail::to64(detail::binom128(N + d - 1, d));
}
inline int64_t wedge_dim(int64_t N, int64_t j) { return detail::to64(detail::binom128(N, j)); }

/// All sorted j-subsets of {0..n-1} in lexicographic order: the monomial
/// basis of the j-th exterior power.
inline std::vector<std::vector<int>> wedge_basis(int n, int j) {
    std::vector<std::vector<int>> out;
    if (j < 0 || j > n) return out;
    std::vector<int> cur(j);
    for (int i = 0; i < j; ++i) cur[i] = i;
    for (;;) {
        out.push_back(cur);
        int i = j - 1;
        while (i >= 0 && cur[i] == n - j + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int t = i + 1; t < j; ++t) cur[t] = cur[t - 1] + 1;
    }
    if (j == 0) out = {{}};
    return out;
}

/// All sorted multisets of size e over {0..n-1} in lexicographic order: the
/// monomial basis of the e-th symmetric power (polynomial model).
inline std::vector<std::vector<int>> sym_basis(int n, int e) {
    std::vector<std::vector<int>> out;
    if (e < 0 || (n == 0 && e > 0)) return out;
    if (e == 0) return {{}};
    std::vector<int> cur(e, 0);
    for (;;) {
        out.push_back(cur);
        int i = e - 1;
        while (i >= 0 && cur[i] == n - 1) --i;
        if (i < 0) break;
        ++cur[i];
        for (int t = i + 1; t < e; ++t) cur[t] = cur[i];
    }
    return out;
}

/// Exponent tuples (e_0, ..., e_r) with sum e_i = j and sum i*e_i = k: the
/// monomial set indexing the graded pieces of the symmetric-power filtration.
inline std::vector<std::vector<int>> lambda_set(int r, int j, int k) {
    std::vector<std::vector<int>> out;
    if (r < 0 || j < 0 || k < 0) return out;
    std::vector<int> cur(r + 1, 0);
    std::function<void(int, int, int)> rec = [&](int i, int remaining, int weight) {
        if (weight < 0) return;
        if (i == r) {  // the last slot takes whatever is left
            if (r * remaining == weight) {
                cur[r] = remaining;
                out.push_back(cur);
            }
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            if (i * e > weight) break;
            cur[i] = e;
            rec(i + 1, remaining - e, weight - i * e);
        }
    };
    rec(0, j, k);
    return out;
}

/// Plucker coordinates of v_1 ^ ... ^ v_j in the wedge_basis(n, j) ordering:
/// the j x j minors of the stacked matrix.
inline std::vector<Fq> wedge_coords(const std::vector<std::vector<Fq>>& vs, int n,
                                    const ExtField& F) {
    const int j = static_cast<int>(vs.size());
    auto basis = wedge_basis(n, j);
    std::vector<Fq> out;
    out.reserve(basis.size());
    if (j == 0) {
        out.push_back(F.one());
        return out;
    }
    FqMatrix m = fq_matrix(F, j, n);
    for (int a = 0; a < j; ++a) {
        if (static_cast<int>(vs[a].size()) != n)
            throw std::invalid_argument("wedge_coords: vector length mismatch");
        for (int b = 0; b < n; ++b) m.at(a, b) = vs[a][b];
    }
    for (const auto& S : basis) {
        FqMatrix sub = fq_matrix(F, j, j);
        for (int a = 0; a < j; ++a)
            for (int b = 0; b < j; ++b) sub.at(a, b) = m.at(a, S[b]);
        out.push_back(sub.det());
    }
    return out;
}

/// Coordinates of the product v_1 * ... * v_e in the sym_basis(n, e)
/// monomial ordering (plain polynomial multiplication, no divided powers).
inline std::vector<Fq> sym_coords(const std::vector<std::vector<Fq>>& vs, int n,
                                  const ExtField& F) {
    const int e = static_cast<int>(vs.size());
    // multiply linear forms one by one, keyed by sorted index multisets
    std::map<std::vector<int>, Fq> acc;
    acc[{}] = F.one();
    for (int a = 0; a < e; ++a) {
        if (static_cast<int>(vs[a].size()) != n)
            throw std::invalid_argument("sym_coords: vector length mismatch");
        std::map<std::vector<int>, Fq> next;
        for (const auto& [mono, c] : acc) {
            if (c.is_zero()) continue;
            for (int t = 0; t < n; ++t) {
                if (vs[a][t].is_zero()) continue;
                std::vector<int> m2 = mono;
                m2.insert(std::lower_bound(m2.begin(), m2.end(), t), t);
                auto it = next.find(m2);
                if (it == next.end()) next.emplace(m2, c * vs[a][t]);
                else it->second = it->second + c * vs[a][t];
            }
        }
        acc = std::move(next);
    }
    auto basis = sym_basis(n, e);
    std::vector<Fq> out;
    out.reserve(basis.size());
    for (const auto& mono : basis) {
        auto it = acc.find(mono);
        out.push_back(it == acc.end() ? F.zero() : it->second);
    }
    return out;
}

}  // namespace eotheta
