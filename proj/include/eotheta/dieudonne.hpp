// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "eotheta/field.hpp"
#include "eotheta/matrix.hpp"
#include "eotheta/semilinear.hpp"
#include "eotheta/weylcomb.hpp"

namespace eotheta {

/// Thrown when an exhaustive operation is asked to run outside its
/// enumeration budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dieudonne module of a level-1 truncated p-divisible group with CM action
/// of signature (n-1, 1): a free module D = D_sigma + D_sigmabar of rank 2n
/// with basis e_1..e_n (sigma block, coordinates 0..n-1) and f_1..f_n
/// (sigmabar block, coordinates n..2n-1).
///
/// Storage conventions:
///  - F is the sigma-semilinear Frobenius endomorphism of D, stored as a
///    twist-1 SemilinearMap: F(x) = M_F x^{(p)}.
///  - V is the Verschiebung, stored through its linearization as a map
///    D -> D^{(p)}: the coordinates of V(x) in the p-twisted basis are
///    M_V x. Composing V-powers therefore twists accumulated factors on the
///    left: V^m has matrix M^{(p^{m-1})} ... M^{(p)} M.
///  - pairing is the Gram matrix: <x, y> = x^T P y.
struct DieudonneModule {
    int n = 0;
    SemilinearMap F;
    SemilinearMap V;   // twist 1, interpreted D -> D^{(p)}
    FqMatrix pairing;

    const ExtField& field() const { return F.field(); }
    size_t dim() const { return 2 * static_cast<size_t>(n); }

    FqMatrix sigma_block() const {  // subspace D_sigma
        FqMatrix s = fq_matrix(field(), n, dim());
        for (int i = 0; i < n; ++i) s.at(i, i) = field().one();
        return s;
    }
    FqMatrix sigmabar_block() const {
        FqMatrix s = fq_matrix(field(), n, dim());
        for (int i = 0; i < n; ++i) s.at(i, n + i) = field().one();
        return s;
    }

    // D-side kernels and images; ker F and im V need the inverse twist
    // because of the respective storage conventions.
    FqMatrix ker_F() const { return subspace_frobenius(F.matrix().kernel_basis(), -1); }
    FqMatrix im_F() const { return F.matrix().transpose().row_space(); }
    FqMatrix ker_V() const { return V.matrix().kernel_basis().row_space(); }
    FqMatrix im_V() const { return subspace_frobenius(V.matrix().transpose().row_space(), -1); }
};

/// The standard module on stratum r: Frobenius and Verschiebung given by the
/// displayed tables, pairing <e_i, f_j> = delta_ij (alternating).
inline DieudonneModule standard_module(int n, int r, const ExtField& field) {
    if (n < 2) throw std::invalid_argument("standard_module: need n >= 2");
    if (r < 1 || r > n) throw std::invalid_argument("standard_module: r out of range");
    const size_t N = 2 * static_cast<size_t>(n);
    FqMatrix Fm = fq_matrix(field, N, N);
    FqMatrix Vm = fq_matrix(field, N, N);
    Fq one = field.one();
    auto e = [&](int i) { return static_cast<size_t>(i - 1); };          // e_i
    auto f = [&](int i) { return static_cast<size_t>(n + i - 1); };     // f_i

    // F(e_r) = e_1, F(e_i) = 0 otherwise
    Fm.at(e(1), e(r)) = one;
    // F(f_i) = f_{i+1} for i < r, F(f_r) = 0, F(f_i) = f_i for i > r
    for (int i = 1; i <= r - 1; ++i) Fm.at(f(i + 1), f(i)) = one;
    for (int i = r + 1; i <= n; ++i) Fm.at(f(i), f(i)) = one;

    // V(e_1) = 0, V(e_i) = e_{i-1} for 2 <= i <= r, V(e_i) = e_i for i > r
    for (int i = 2; i <= r; ++i) Vm.at(e(i - 1), e(i)) = one;
    for (int i = r + 1; i <= n; ++i) Vm.at(e(i), e(i)) = one;
    // V(f_1) = f_r, V(f_i) = 0 otherwise
    Vm.at(f(r), f(1)) = one;

    FqMatrix P = fq_matrix(field, N, N);
    for (int i = 1; i <= n; ++i) {
        P.at(e(i), f(i)) = one;
        P.at(f(i), e(i)) = -one;
    }

    DieudonneModule D{n, SemilinearMap(1, Fm), SemilinearMap(1, Vm), P};
    return D;
}

// --- structural verification ---

struct Bt1Report {
    bool pass = true;
    std::string first_violation;

    void fail(const std::string& what) {
        if (pass) first_violation = what;
        pass = false;
    }
};

/// Checks ker F = im V, ker V = im F, CM block structure of F, V and the
/// pairing, and perfection of the pairing.
inline Bt1Report verify_bt1(const DieudonneModule& D) {
    Bt1Report rep;
    const size_t n = D.n, N = D.dim();
    auto block_zero = [&](const FqMatrix& m, size_t r0, size_t c0) {
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (!m.at(r0 + i, c0 + j).is_zero()) return false;
        return true;
    };
    if (!block_zero(D.F.matrix(), n, 0) || !block_zero(D.F.matrix(), 0, n))
        rep.fail("F does not preserve the CM blocks");
    if (!block_zero(D.V.matrix(), n, 0) || !block_zero(D.V.matrix(), 0, n))
        rep.fail("V does not preserve the CM blocks");
    if (!block_zero(D.pairing, 0, 0) || !block_zero(D.pairing, n, n))
        rep.fail("pairing does not pair sigma against sigmabar");
    if (D.pairing.rank() != N) rep.fail("pairing is not perfect");
    if (!subspace_eq(D.ker_F(), D.im_V())) rep.fail("ker F != im V");
    if (!subspace_eq(D.ker_V(), D.im_F())) rep.fail("ker V != im F");
    return rep;
}

// --- p-ranks and classification ---

/// Total and sigmabar-component p-rank: the stable rank of Frobenius,
/// computed as the F_q-rank of F^{2n} through the prime-field linearization
/// (the F_p-rank is k times the F_q-rank).
inline std::pair<int, int> p_rank(const DieudonneModule& D) {
    Bt1Report rep = verify_bt1(D);
    if (!rep.pass)
        throw std::invalid_argument("p_rank: not a BT1 module: " + rep.first_violation);
    const int k = D.field().k();
    SemilinearMap Fpow = D.F.power(2 * D.n);
    size_t total_fp = Fpow.linearize().rank();
    FqMatrix bar = Fpow.matrix().submatrix(D.n, D.n, D.n, D.n);
    size_t bar_fp = SemilinearMap(Fpow.twist(), bar).linearize().rank();
    if (total_fp % k || bar_fp % k) throw std::logic_error("stable rank not an F_q-multiple");
    return {static_cast<int>(total_fp / k), static_cast<int>(bar_fp / k)};
}

struct EoClass {
    int r = 0;
    Shuffle w;
    int length = 0;
    int prank_total = 0;
    int prank_sigmabar = 0;
};

/// Stratum index from the sigmabar p-rank (valid in signature (n-1,1),
/// where the stratification coincides with the p-rank stratification).
inline EoClass eo_class(const DieudonneModule& D) {
    // signature check: ker F must have CM dimensions (n-1, 1)
    FqMatrix kerF = D.ker_F();
    size_t dim_sigma = subspace_intersect(kerF, D.sigma_block()).rows();
    size_t dim_sigmabar = subspace_intersect(kerF, D.sigmabar_block()).rows();
    if (dim_sigma != static_cast<size_t>(D.n - 1) || dim_sigmabar != 1)
        throw std::invalid_argument("eo_class: module does not have signature (n-1,1)");
    auto [total, sigmabar] = p_rank(D);
    EoClass c;
    c.r = D.n - sigmabar;
    c.w = shuffle(D.n, c.r);
    c.length = D.n - c.r;
    c.prank_total = total;
    c.prank_sigmabar = sigmabar;
    return c;
}

// --- canonical filtration ---

struct FlagStep {
    FqMatrix basis;    // canonical row-space form
    int dim_sigma = 0;
    int dim_sigmabar = 0;
};

struct Flag {
    std::vector<FlagStep> steps;  // ascending dimension, 0 up to D
};

/// Smallest flag containing 0 and D closed under M -> F(M) and
/// M -> V^{-1}(M^{(p)}), by fixpoint iteration over the (finite) subspace
/// lattice. Steps are tagged with the CM dimensions of each subspace.
inline Flag canonical_filtration(const DieudonneModule& D) {
    Bt1Report rep = verify_bt1(D);
    if (!rep.pass)
        throw std::invalid_argument("canonical_filtration: not a BT1 module: " +
                                    rep.first_violation);
    const ExtField& K = D.field();
    const size_t N = D.dim();
    std::vector<FqMatrix> members = {subspace_zero(K, N), subspace_full(K, N)};
    auto known = [&](const FqMatrix& s) {
        for (const auto& m : members)
            if (m == s) return true;
        return false;
    };
    auto f_image = [&](const FqMatrix& s) {
        return subspace_image(D.F.matrix(), subspace_frobenius(s, 1));
    };
    auto v_preimage = [&](const FqMatrix& s) {
        return subspace_preimage(D.V.matrix(), subspace_frobenius(s, 1));
    };
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<FqMatrix> next;
        for (const auto& s : members) {
            FqMatrix a = f_image(s);
            FqMatrix b = v_preimage(s);
            if (!known(a)) next.push_back(a);
            if (!known(b) && !(b == a)) next.push_back(b);
        }
        for (const auto& s : next) {
            if (!known(s)) {
                members.push_back(s);
                grew = true;
            }
        }
        if (members.size() > 2 * N + 2)
            throw std::invalid_argument("canonical filtration closure exceeds 2n steps");
    }
    std::sort(members.begin(), members.end(),
              [](const FqMatrix& a, const FqMatrix& b) { return a.rows() < b.rows(); });
    Flag flag;
    for (size_t i = 0; i < members.size(); ++i) {
        if (i > 0 && !subspace_leq(members[i - 1], members[i]))
            throw std::invalid_argument("canonical closure is not totally ordered");
        FlagStep step;
        step.basis = members[i];
        step.dim_sigma = static_cast<int>(subspace_intersect(members[i], D.sigma_block()).rows());
        step.dim_sigmabar =
            static_cast<int>(subspace_intersect(members[i], D.sigmabar_block()).rows());
        flag.steps.push_back(std::move(step));
    }
    return flag;
}

// --- equivariant base change ---

/// Transport of the module structure along the equivariant change of basis
/// diag(g_sigma, g_sigmabar). With x' = g x: the semilinear F picks up the
/// twist on the right, the twisted-codomain V on the left, and the pairing
/// transforms contravariantly.
inline DieudonneModule conjugate(const DieudonneModule& D, const FqMatrix& g_sigma,
                                 const FqMatrix& g_sigmabar) {
    const ExtField& K = D.field();
    const size_t n = D.n;
    if (g_sigma.rows() != n || g_sigma.cols() != n || g_sigmabar.rows() != n ||
        g_sigmabar.cols() != n)
        throw std::invalid_argument("conjugate: block size mismatch");
    FqMatrix g = fq_matrix(K, 2 * n, 2 * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            g.at(i, j) = g_sigma.at(i, j);
            g.at(n + i, n + j) = g_sigmabar.at(i, j);
        }
    FqMatrix gi = g.inverse();
    FqMatrix Fm = g * D.F.matrix() * frobenius(g, 1).inverse();
    FqMatrix Vm = frobenius(g, 1) * D.V.matrix() * gi;
    FqMatrix P = gi.transpose() * D.pairing * gi;
    return DieudonneModule{D.n, SemilinearMap(1, Fm), SemilinearMap(1, Vm), P};
}

inline FqMatrix random_invertible_matrix(const ExtField& K, size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int64_t> dist(0, K.q() - 1);
    for (;;) {
        FqMatrix g = fq_matrix(K, n, n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) g.at(i, j) = K.element(dist(rng));
        if (g.is_invertible()) return g;
    }
}

inline DieudonneModule random_conjugate(const DieudonneModule& D, std::mt19937_64& rng) {
    FqMatrix gs = random_invertible_matrix(D.field(), D.n, rng);
    FqMatrix gb = random_invertible_matrix(D.field(), D.n, rng);
    return conjugate(D, gs, gb);
}

// --- brute-force isomorphism testing at desk scale ---

/// Exhaustive isomorphism test. An isomorphism is a pair of invertible
/// blocks (g_sigma, g_sigmabar) commuting with F and V and carrying one
/// pairing to the other. The pairing condition determines g_sigmabar from
/// g_sigma (both pairings being perfect and block-anti-diagonal), so the
/// enumeration runs over g_sigma alone; this searches exactly the pairs
/// that could possibly satisfy all three conditions.
inline bool brute_force_isomorphic(const DieudonneModule& D1, const DieudonneModule& D2) {
    if (D1.n != D2.n) throw std::invalid_argument("isomorphic: size mismatch");
    if (!D1.field().same(D2.field())) throw std::invalid_argument("isomorphic: field mismatch");
    const ExtField& K = D1.field();
    if (K.q() > 3 || D1.n > 3)
        throw BudgetError("brute_force_isomorphic: beyond the enumeration budget (need q <= 3, n <= 3)");
    for (const auto* D : {&D1, &D2}) {
        Bt1Report rep = verify_bt1(*D);
        if (!rep.pass)
            throw std::invalid_argument("isomorphic: not a BT1 module: " + rep.first_violation);
    }
    const size_t n = D1.n;
    FqMatrix B1 = D1.pairing.submatrix(0, n, n, n);
    FqMatrix B2 = D2.pairing.submatrix(0, n, n, n);
    FqMatrix B2i = B2.inverse();

    const int64_t q = K.q();
    int64_t total = 1;
    for (size_t i = 0; i < n * n; ++i) total *= q;
    std::vector<Fq> elems;
    for (int64_t i = 0; i < q; ++i) elems.push_back(K.element(i));

    for (int64_t code = 0; code < total; ++code) {
        FqMatrix gs = fq_matrix(K, n, n);
        int64_t c = code;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                gs.at(i, j) = elems[c % q];
                c /= q;
            }
        if (!gs.is_invertible()) continue;
        // pairing compatibility (sigma x sigmabar block): gs^T B2 gb = B1
        FqMatrix gb = B2i * gs.inverse().transpose() * B1;
        if (!gb.is_invertible()) continue;
        FqMatrix g = fq_matrix(K, 2 * n, 2 * n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                g.at(i, j) = gs.at(i, j);
                g.at(n + i, n + j) = gb.at(i, j);
            }
        // full pairing compatibility, then F and V commutation
        if (!(g.transpose() * D2.pairing * g == D1.pairing)) continue;
        if (!(g * D1.F.matrix() == D2.F.matrix() * frobenius(g, 1))) continue;
        if (!(frobenius(g, 1) * D1.V.matrix() == D2.V.matrix() * g)) continue;
        return true;
    }
    return false;
}

// --- rank bookkeeping for the torsion line ---

/// Ranks of im(F) cap D_sigma and im(V) cap D_sigma. The two short exact
/// sequences behind the torsion statement force these to be 1 and n-1 on
/// every module of signature (n-1, 1).
inline std::pair<int, int> delta_torsion_ranks(const DieudonneModule& D) {
    FqMatrix sigma = D.sigma_block();
    int f_rank = static_cast<int>(subspace_intersect(D.im_F(), sigma).rows());
    int v_rank = static_cast<int>(subspace_intersect(D.im_V(), sigma).rows());
    return {f_rank, v_rank};
}

}  // namespace eotheta
