// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <vector>

#include "eotheta/field.hpp"
#include "eotheta/matrix.hpp"

namespace eotheta {

/// A sigma^a-semilinear map between free F_{p^k}-modules: v |-> M * v^{(p^a)},
/// where v^{(p^a)} raises every coordinate to the p^a-th power. Twist 0
/// recovers ordinary linear maps.
class SemilinearMap {
public:
    SemilinearMap(int twist, FqMatrix matrix) : twist_(twist), m_(std::move(matrix)) {
        if (twist < 0) throw std::invalid_argument("semilinear twist must be >= 0");
    }

    static SemilinearMap identity(const ExtField& F, size_t n) {
        return SemilinearMap(0, fq_identity(F, n));
    }
    static SemilinearMap zero(const ExtField& F, size_t rows, size_t cols, int twist = 0) {
        return SemilinearMap(twist, fq_matrix(F, rows, cols));
    }

    int twist() const { return twist_; }
    const FqMatrix& matrix() const { return m_; }
    size_t domain_dim() const { return m_.cols(); }
    size_t codomain_dim() const { return m_.rows(); }
    const ExtField& field() const { return m_.zero_elem().field(); }

    std::vector<Fq> apply(const std::vector<Fq>& v) const {
        std::vector<Fq> tw(v);
        for (auto& x : tw) x = x.frobenius(twist_);
        return m_.apply(tw);
    }

    bool operator==(const SemilinearMap& rhs) const {
        return twist_ == rhs.twist_ && m_ == rhs.m_;
    }

    /// (phi . psi)(v) = phi(psi(v)); twists add and psi's matrix picks up
    /// phi's Frobenius twist entrywise.
    friend SemilinearMap compose(const SemilinearMap& phi, const SemilinearMap& psi) {
        if (psi.codomain_dim() != phi.domain_dim())
            throw std::invalid_argument("semilinear composition dimension mismatch");
        return SemilinearMap(phi.twist_ + psi.twist_, phi.m_ * frobenius(psi.m_, phi.twist_));
    }

    SemilinearMap power(int e) const {
        if (domain_dim() != codomain_dim())
            throw std::invalid_argument("power of non-endomorphism");
        if (e < 0) throw std::invalid_argument("negative semilinear power");
        SemilinearMap acc = identity(field(), domain_dim());
        for (int i = 0; i < e; ++i) acc = compose(*this, acc);
        return acc;
    }

    /// The (codomain*k) x (domain*k) matrix over F_p representing the map as
    /// an F_p-linear map in the power basis 1, x, ..., x^{k-1} of F_{p^k}.
    FqMatrix linearize() const {
        const ExtField& F = field();
        const ExtField& Fp = ExtField::get(F.p(), 1);
        const int k = F.k();
        FqMatrix lin = fq_matrix(Fp, codomain_dim() * k, domain_dim() * k);
        for (size_t j = 0; j < domain_dim(); ++j) {
            for (int b = 0; b < k; ++b) {
                // image of the basis vector (x^b at coordinate j)
                std::vector<int64_t> unit(k, 0);
                unit[b] = 1;
                Fq xb = F.from_coeffs(unit).frobenius(twist_);
                for (size_t i = 0; i < codomain_dim(); ++i) {
                    Fq img = m_.at(i, j) * xb;
                    for (int a = 0; a < k; ++a)
                        lin.at(i * k + a, j * k + b) = Fp.from_int(img.coeffs()[a]);
                }
            }
        }
        return lin;
    }

    /// Rank as an F_p-linear map is k times the F_q-rank; the latter equals
    /// the rank of the stored matrix because v |-> v^(p^a) is bijective.
    size_t rank() const { return linearize().rank() / field().k(); }

    /// Kernel as an F_q-subspace of the domain (it is one: phi(cv) = c^{p^a} phi(v)).
    /// Equals the inverse Frobenius twist of the linear kernel of the matrix.
    FqMatrix kernel() const { return subspace_frobenius(m_.kernel_basis(), -twist_); }

    /// Image as an F_q-subspace of the codomain: the column space of the matrix.
    FqMatrix image() const { return m_.transpose().row_space(); }

private:
    int twist_;
    FqMatrix m_;
};

}  // namespace eotheta
