// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "eotheta/semilinear.hpp"

using namespace eotheta;

namespace {

SemilinearMap random_semilinear(const ExtField& F, size_t r, size_t c, int twist,
                                std::mt19937_64& rng) {
    std::uniform_int_distribution<int64_t> dist(0, F.q() - 1);
    FqMatrix m = fq_matrix(F, r, c);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) m.at(i, j) = F.element(dist(rng));
    return SemilinearMap(twist, m);
}

}  // namespace

TEST_CASE("composition of twist-0 maps is the matrix product") {
    const ExtField& F5 = ExtField::get(5, 1);
    std::mt19937_64 rng(1);
    SemilinearMap a = random_semilinear(F5, 3, 3, 0, rng);
    SemilinearMap b = random_semilinear(F5, 3, 3, 0, rng);
    SemilinearMap c = compose(a, b);
    CHECK(c.twist() == 0);
    CHECK(c.matrix() == a.matrix() * b.matrix());
}

TEST_CASE("composition law for twisted maps") {
    const ExtField& F9 = ExtField::get(3, 2);
    std::mt19937_64 rng(2);
    SemilinearMap phi = random_semilinear(F9, 3, 3, 1, rng);
    SECTION("phi composed with itself: twist 2, matrix A A^{(p)}") {
        SemilinearMap c = compose(phi, phi);
        CHECK(c.twist() == 2);
        CHECK(c.matrix() == phi.matrix() * frobenius(phi.matrix(), 1));
    }
    SECTION("identity is neutral") {
        SemilinearMap id = SemilinearMap::identity(F9, 3);
        CHECK(compose(id, phi) == phi);
        CHECK(compose(phi, id) == phi);
    }
    SECTION("composition agrees with pointwise application") {
        SemilinearMap psi = random_semilinear(F9, 3, 3, 1, rng);
        SemilinearMap c = compose(phi, psi);
        std::uniform_int_distribution<int64_t> dist(0, F9.q() - 1);
        for (int t = 0; t < 20; ++t) {
            std::vector<Fq> v = {F9.element(dist(rng)), F9.element(dist(rng)),
                                 F9.element(dist(rng))};
            CHECK(c.apply(v) == phi.apply(psi.apply(v)));
        }
    }
    SECTION("associativity and twist addition") {
        SemilinearMap psi = random_semilinear(F9, 3, 3, 2, rng);
        SemilinearMap rho = random_semilinear(F9, 3, 3, 1, rng);
        CHECK(compose(compose(phi, psi), rho) == compose(phi, compose(psi, rho)));
        CHECK(compose(phi, psi).twist() == 3);
    }
}

TEST_CASE("linearize") {
    SECTION("zero map") {
        const ExtField& F4 = ExtField::get(2, 2);
        SemilinearMap z = SemilinearMap::zero(F4, 2, 3, 1);
        CHECK(z.linearize().rank() == 0);
        CHECK(z.rank() == 0);
    }
    SECTION("identity with twist 1 over F_p is the identity matrix") {
        const ExtField& F3 = ExtField::get(3, 1);
        SemilinearMap id1 = SemilinearMap(1, fq_identity(F3, 2));
        CHECK(id1.linearize() == fq_identity(ExtField::get(3, 1), 2));
    }
    SECTION("field Frobenius of F_4 as a 2x2 F_2-matrix") {
        // oracle: evaluate x -> x^2 on the basis {1, g}, g^2 = g + 1
        const ExtField& F4 = ExtField::get(2, 2);
        SemilinearMap frob = SemilinearMap(1, fq_identity(F4, 1));
        FqMatrix lin = frob.linearize();
        REQUIRE(lin.rows() == 2);
        REQUIRE(lin.cols() == 2);
        const ExtField& F2 = ExtField::get(2, 1);
        // columns: image of 1 = 1 -> (1,0); image of g = g^2 = 1 + g -> (1,1)
        CHECK(lin.at(0, 0) == F2.one());
        CHECK(lin.at(1, 0) == F2.zero());
        CHECK(lin.at(0, 1) == F2.one());
        CHECK(lin.at(1, 1) == F2.one());
        CHECK(lin.rank() == 2);
    }
    SECTION("linearize respects application coordinatewise") {
        const ExtField& F9 = ExtField::get(3, 2);
        std::mt19937_64 rng(3);
        SemilinearMap phi = random_semilinear(F9, 2, 2, 1, rng);
        FqMatrix lin = phi.linearize();
        const ExtField& F3 = ExtField::get(3, 1);
        std::uniform_int_distribution<int64_t> dist(0, 8);
        for (int t = 0; t < 20; ++t) {
            std::vector<Fq> v = {F9.element(dist(rng)), F9.element(dist(rng))};
            std::vector<Fq> img = phi.apply(v);
            // flatten v into F_p coordinates and push through lin
            std::vector<Fq> flat;
            for (const Fq& x : v)
                for (int64_t c : x.coeffs()) flat.push_back(F3.from_int(c));
            std::vector<Fq> out = lin.apply(flat);
            std::vector<Fq> expect;
            for (const Fq& x : img)
                for (int64_t c : x.coeffs()) expect.push_back(F3.from_int(c));
            CHECK(out == expect);
        }
    }
}

TEST_CASE("rank of a composition is bounded by both factors") {
    std::mt19937_64 rng(4);
    for (const ExtField* F : {&ExtField::get(2, 2), &ExtField::get(5, 1)}) {
        for (int t = 0; t < 15; ++t) {
            SemilinearMap phi = random_semilinear(*F, 3, 3, 1, rng);
            SemilinearMap psi = random_semilinear(*F, 3, 3, 1, rng);
            size_t r = compose(phi, psi).rank();
            CHECK(r <= phi.rank());
            CHECK(r <= psi.rank());
        }
    }
}

TEST_CASE("kernel and image are F_q-subspaces matching the linearization") {
    std::mt19937_64 rng(6);
    const ExtField& F4 = ExtField::get(2, 2);
    for (int t = 0; t < 10; ++t) {
        SemilinearMap phi = random_semilinear(F4, 3, 3, 1, rng);
        FqMatrix ker = phi.kernel();
        // every kernel basis vector maps to zero
        for (size_t r = 0; r < ker.rows(); ++r) {
            std::vector<Fq> v(3, F4.zero());
            for (size_t j = 0; j < 3; ++j) v[j] = ker.at(r, j);
            for (const Fq& y : phi.apply(v)) CHECK(y.is_zero());
        }
        // F_p-dimension of the kernel is k times the F_q-dimension
        size_t fp_ker_dim = phi.linearize().kernel_basis().rows();
        CHECK(fp_ker_dim == static_cast<size_t>(F4.k()) * ker.rows());
        // rank-nullity over F_q
        CHECK(phi.rank() + ker.rows() == 3);
        CHECK(phi.image().rows() == phi.rank());
    }
}
