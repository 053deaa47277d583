// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "eotheta/field.hpp"
#include "eotheta/matrix.hpp"
#include "eotheta/multilinear.hpp"

namespace eotheta {

/// A shuffle permutation in one-line notation: w(1..n-1) appears in order,
/// i.e. w^{-1}(1) < w^{-1}(2) < ... < w^{-1}(n-1). Exactly n of these exist
/// for S_n and they index the strata; shuffle(n, r) has length n - r.
struct Shuffle {
    int n = 0;
    std::vector<int> word;  // one-line notation, 1-based values, word[i] = w(i+1)

    bool is_valid() const {
        if (static_cast<int>(word.size()) != n || n < 1) return false;
        std::vector<int> inv(n + 1, 0);
        std::vector<bool> seen(n + 1, false);
        for (int i = 0; i < n; ++i) {
            if (word[i] < 1 || word[i] > n || seen[word[i]]) return false;
            seen[word[i]] = true;
            inv[word[i]] = i + 1;
        }
        for (int v = 1; v <= n - 2; ++v)
            if (inv[v] >= inv[v + 1]) return false;
        return true;
    }

    std::vector<int> inverse_word() const {
        std::vector<int> inv(n);
        for (int i = 0; i < n; ++i) inv[word[i] - 1] = i + 1;
        return inv;
    }

    bool operator==(const Shuffle& rhs) const { return n == rhs.n && word == rhs.word; }

    std::string one_line() const {
        std::string s = "[";
        for (int i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(word[i]);
        return s + "]";
    }
};

/// w_r in one-line notation: [1, ..., r-1, n, r, ..., n-1].
inline Shuffle shuffle(int n, int r) {
    if (n < 2 || r < 1 || r > n) throw std::invalid_argument("shuffle index out of range");
    Shuffle w;
    w.n = n;
    w.word.reserve(n);
    for (int i = 1; i <= r - 1; ++i) w.word.push_back(i);
    w.word.push_back(n);
    for (int i = r; i <= n - 1; ++i) w.word.push_back(i);
    return w;
}

/// All n shuffles in the stratification order w_1 >= w_2 >= ... >= w_n = id.
inline std::vector<Shuffle> shuffles(int n) {
    if (n < 2) throw std::invalid_argument("need n >= 2");
    std::vector<Shuffle> out;
    out.reserve(n);
    for (int r = 1; r <= n; ++r) out.push_back(shuffle(n, r));
    return out;
}

/// l(w) = sum_{i=1}^{n-1} (w^{-1}(i) - i); equals n - r on shuffle(n, r).
inline int length(const Shuffle& w) {
    if (!w.is_valid()) throw std::invalid_argument("not a shuffle");
    std::vector<int> inv = w.inverse_word();
    int l = 0;
    for (int i = 1; i <= w.n - 1; ++i) l += inv[i - 1] - i;
    return l;
}

/// Number of inversions of an arbitrary permutation word; the length of a
/// shuffle coincides with this (cross-check oracle).
inline int inversion_count(const std::vector<int>& word) {
    int inv = 0;
    for (size_t i = 0; i < word.size(); ++i)
        for (size_t j = i + 1; j < word.size(); ++j)
            if (word[i] > word[j]) ++inv;
    return inv;
}

// --- automorphic weights ---

/// Automorphic weight (k, w): a dominant integer vector k of length n-1 for
/// the general linear factor, plus an integer exponent w of the determinant
/// line. Operator application additionally requires k.back() >= 0.
struct AutomorphicWeight {
    std::vector<int64_t> k;
    int64_t w = 0;

    bool dominant() const {
        for (size_t i = 0; i + 1 < k.size(); ++i)
            if (k[i] < k[i + 1]) return false;
        return true;
    }
};

inline bool is_dominant(const std::vector<int64_t>& k) {
    for (size_t i = 0; i + 1 < k.size(); ++i)
        if (k[i] < k[i + 1]) return false;
    return true;
}

/// The weight shift of the theta operator on stratum r: a length-(n-1)
/// vector (p+1, p, ..., p, 1, ..., 1) with exactly r-1 trailing ones.
inline std::vector<int64_t> delta_shift(int r, int64_t p, int n) {
    if (r < 1 || r > n - 1) throw std::invalid_argument("delta_shift: r out of range");
    std::vector<int64_t> d(n - 1, p);
    d[0] = p + 1;
    for (int i = 0; i < r - 1; ++i) d[n - 2 - i] = 1;
    return d;
}

/// lambda coordinates (k_1-k_2, ..., k_{n-2}-k_{n-1}, k_{n-1}); a bijection
/// from dominant weights onto Z_{>=0}^{n-2} x Z.
inline std::vector<int64_t> lambda_coords(const std::vector<int64_t>& k) {
    if (!is_dominant(k)) throw std::invalid_argument("weight is not dominant");
    std::vector<int64_t> lam(k.size());
    for (size_t i = 0; i + 1 < k.size(); ++i) lam[i] = k[i] - k[i + 1];
    if (!k.empty()) lam.back() = k.back();
    return lam;
}

inline std::vector<int64_t> lambda_inverse(const std::vector<int64_t>& lam) {
    std::vector<int64_t> k(lam.size());
    if (lam.empty()) return k;
    k.back() = lam.back();
    for (size_t i = lam.size() - 1; i-- > 0;) {
        if (lam[i] < 0) throw std::invalid_argument("lambda coordinate out of range");
        k[i] = lam[i] + k[i + 1];
    }
    return k;
}

/// Graded weight of the partial Hasse invariant A_r: (det of the rank-(n-r)
/// multiplicative quotient)^{p-1}, i.e. p-1 in the first n-r entries.
inline std::vector<int64_t> hasse_weight(int r, int64_t p, int n) {
    if (r < 1 || r > n - 1) throw std::invalid_argument("hasse_weight: r out of range");
    std::vector<int64_t> h(n - 1, 0);
    for (int i = 0; i < n - r; ++i) h[i] = p - 1;
    return h;
}

// --- dimensions of the two weight-module constructions ---

/// Dimension of the concrete tensor construction
/// Sym^{k_1-k_2}(st) x Sym^{k_2-k_3}(wedge^2 st) x ... x Sym^{k_m}(wedge^m st)
/// on an m-dimensional standard space. A negative top entry k_m contributes
/// through the dual convention Sym^{-j} = (Sym^j)^dual, which does not change
/// the dimension (the top wedge is a line, so the factor is 1 either way).
inline int64_t s_construction_dim(const std::vector<int64_t>& k, int m) {
    if (static_cast<int>(k.size()) != m) throw std::invalid_argument("weight length != m");
    if (!is_dominant(k)) throw std::invalid_argument("weight is not dominant");
    __int128 dim = 1;
    for (int j = 1; j <= m; ++j) {
        int64_t e = (j < m) ? k[j - 1] - k[j] : k[m - 1];
        if (e < 0) e = -e;  // dual convention, top factor only
        dim *= detail::binom128(wedge_dim(m, j) + e - 1, e);
    }
    return detail::to64(dim);
}

/// The classical product formula prod_{i<j} (k_i - k_j + j - i)/(j - i),
/// kept as an independent cross-check of s_construction_dim. The two agree
/// for fundamental and two-row weights but differ in general (e.g. (2,1,0)
/// on a 3-space gives 9 against 8); see dimension_report.
inline int64_t weyl_product_dim(const std::vector<int64_t>& k, int m) {
    if (static_cast<int>(k.size()) != m) throw std::invalid_argument("weight length != m");
    if (!is_dominant(k)) throw std::invalid_argument("weight is not dominant");
    __int128 num = 1, den = 1;
    for (int i = 1; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j) {
            num *= (k[i - 1] - k[j - 1] + j - i);
            den *= (j - i);
        }
    if (den == 0 || num % den != 0) throw std::logic_error("Weyl product is not integral");
    return detail::to64(num / den);
}

/// Both dimension computations side by side, with a mismatch flag. The
/// mismatch is expected for some weights and is reported, never asserted
/// away.
struct DimensionReport {
    int64_t s_construction = 0;
    int64_t weyl_product = 0;
    bool mismatch = false;
};

inline DimensionReport dimension_report(const std::vector<int64_t>& k, int m) {
    DimensionReport rep;
    rep.s_construction = s_construction_dim(k, m);
    rep.weyl_product = weyl_product_dim(k, m);
    rep.mismatch = rep.s_construction != rep.weyl_product;
    return rep;
}

// --- characteristic-p reducibility witness ---

/// The explicit embedding of the p-twisted standard representation of the
/// 2x2 general linear group into Sym^p(st) over F_p, e_i |-> e_i^p.
/// Returns the (p+1) x 2 matrix of the map in the monomial basis
/// x^p, x^{p-1}y, ..., y^p, after verifying injectivity and equivariance
/// under a generating set of the group.
struct ReducibilityWitness {
    FqMatrix embedding;     // (p+1) x 2 over F_p
    size_t image_dim = 0;   // always 2
    size_t ambient_dim = 0; // p + 1
};

inline ReducibilityWitness symp_reducibility_witness(int64_t p) {
    const ExtField& Fp = ExtField::get(p, 1);
    const size_t dim = static_cast<size_t>(p) + 1;  // monomials x^{p-a} y^a
    // action of g on Sym^p by substitution: monomial x^{p-a} y^a -> (g11 x + g21 y)^{p-a} (g12 x + g22 y)^a
    auto sym_action = [&](const FqMatrix& g) {
        FqMatrix S = fq_matrix(Fp, dim, dim);
        for (size_t a = 0; a < dim; ++a) {
            // expand the product of two binomial powers
            std::vector<Fq> poly(dim, Fp.zero());  // coefficient of x^{p-t} y^t
            for (size_t i = 0; i <= static_cast<size_t>(p) - a; ++i)
                for (size_t j = 0; j <= a; ++j) {
                    // choose i factors of g21 y from the first power, j of g22 y from the second
                    Fq c = Fp.from_int(static_cast<int64_t>(detail::binom128(p - a, i) % p)) *
                           Fp.from_int(static_cast<int64_t>(detail::binom128(a, j) % p));
                    c = c * g.at(0, 0).pow(static_cast<int64_t>(p - a - i)) *
                        g.at(1, 0).pow(static_cast<int64_t>(i)) *
                        g.at(0, 1).pow(static_cast<int64_t>(a - j)) *
                        g.at(1, 1).pow(static_cast<int64_t>(j));
                    poly[i + j] = poly[i + j] + c;
                }
            for (size_t t = 0; t < dim; ++t) S.at(t, a) = poly[t];
        }
        return S;
    };

    FqMatrix emb = fq_matrix(Fp, dim, 2);
    emb.at(0, 0) = Fp.one();        // e_1 -> x^p
    emb.at(dim - 1, 1) = Fp.one();  // e_2 -> y^p
    if (emb.transpose().rank() != 2) throw std::logic_error("embedding not injective");

    // generating set of the group over F_p: elementary transvections and,
    // for p > 2, a diagonal torus generator
    std::vector<FqMatrix> gens;
    FqMatrix e12 = fq_identity(Fp, 2);
    e12.at(0, 1) = Fp.one();
    FqMatrix e21 = fq_identity(Fp, 2);
    e21.at(1, 0) = Fp.one();
    gens.push_back(e12);
    gens.push_back(e21);
    if (p > 2) {
        FqMatrix d = fq_identity(Fp, 2);
        d.at(0, 0) = Fp.gen();
        gens.push_back(d);
    }
    for (const FqMatrix& g : gens) {
        // the source is the p-twist: g acts through entrywise p-th powers,
        // which is the identity twist over F_p
        FqMatrix lhs = sym_action(g) * emb;
        FqMatrix rhs = emb * frobenius(g, 1);
        if (lhs != rhs) throw std::logic_error("embedding is not equivariant");
    }

    ReducibilityWitness w;
    w.embedding = emb;
    w.image_dim = 2;
    w.ambient_dim = dim;
    return w;
}

}  // namespace eotheta
