// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "eotheta/trunc_ring.hpp"

using namespace eotheta;

namespace {

RingElem random_elem(const TruncRing& R, int deg, std::mt19937_64& rng) {
    std::uniform_int_distribution<int64_t> cdist(0, R.field().q() - 1);
    std::uniform_int_distribution<int> edist(0, deg);
    RingElem f = R.zero();
    for (int t = 0; t < 6; ++t) {
        std::vector<int> e(R.nvars(), 0);
        int budget = edist(rng);
        for (int i = 0; i < R.nvars() && budget > 0; ++i) {
            std::uniform_int_distribution<int> d(0, budget);
            e[i] = d(rng);
            budget -= e[i];
        }
        f.add_term(e, R.field().element(cdist(rng)));
    }
    return f;
}

}  // namespace

TEST_CASE("ring arithmetic and truncation") {
    const ExtField& F3 = ExtField::get(3, 1);
    const TruncRing& R = TruncRing::get(F3, 2, 3);
    RingElem t1 = R.var(0), t2 = R.var(1);
    SECTION("basic identities") {
        CHECK((t1 + t2) * (t1 - t2) == t1 * t1 - t2 * t2);
        CHECK((t1 * t2).degree() == 2);
        CHECK(R.one() * t1 == t1);
        CHECK((t1 - t1).is_zero());
    }
    SECTION("terms beyond the cutoff vanish") {
        RingElem t1sq = t1 * t1;
        CHECK((t1sq * t1sq).is_zero());          // degree 4 > 3
        CHECK(!(t1sq * t1).is_zero());           // degree 3 kept
        CHECK((t1 * t1 * t1 * t2).is_zero());
    }
    SECTION("commutativity and associativity on random elements") {
        std::mt19937_64 rng(50);
        for (int t = 0; t < 20; ++t) {
            RingElem a = random_elem(R, 2, rng), b = random_elem(R, 2, rng),
                     c = random_elem(R, 2, rng);
            CHECK(a * b == b * a);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
        }
    }
}

TEST_CASE("units invert by geometric series") {
    const ExtField& F5 = ExtField::get(5, 1);
    const TruncRing& R = TruncRing::get(F5, 2, 4);
    std::mt19937_64 rng(51);
    for (int t = 0; t < 20; ++t) {
        RingElem u = random_elem(R, 3, rng) * R.var(0) + R.constant(F5.from_int(1 + t % 4));
        REQUIRE(u.is_unit());
        CHECK(u * u.inverse() == R.one());
    }
    CHECK_THROWS_AS(R.var(0).inverse(), std::invalid_argument);
}

TEST_CASE("exterior differential") {
    const ExtField& F3 = ExtField::get(3, 1);
    const TruncRing& R = TruncRing::get(F3, 2, 4);
    RingElem t1 = R.var(0), t2 = R.var(1);
    SECTION("constants die") {
        CHECK(exterior_d(R.constant(F3.from_int(2))).is_zero());
    }
    SECTION("Leibniz rule d(fg) = f dg + g df") {
        std::mt19937_64 rng(52);
        for (int t = 0; t < 25; ++t) {
            RingElem f = random_elem(R, 2, rng), g = random_elem(R, 2, rng);
            // degrees <= 2 each: the product and its differential are exact
            OneForm lhs = exterior_d(f * g);
            OneForm rhs = exterior_d(g) * f + exterior_d(f) * g;
            CHECK(lhs == rhs);
        }
    }
    SECTION("p-th powers have zero differential") {
        std::mt19937_64 rng(53);
        const TruncRing& R9 = TruncRing::get(ExtField::get(3, 1), 2, 9);
        for (int t = 0; t < 10; ++t) {
            RingElem f = random_elem(R9, 3, rng);
            CHECK(exterior_d(f.pow(3)).is_zero());
        }
        CHECK(exterior_d(t1.pow(3)).is_zero());
    }
    SECTION("d composed with d is zero") {
        std::mt19937_64 rng(54);
        for (int t = 0; t < 20; ++t) {
            RingElem f = random_elem(R, 3, rng);
            CHECK(exterior_d(exterior_d(f), R).is_zero());
        }
    }
}

TEST_CASE("two-forms") {
    const ExtField& F5 = ExtField::get(5, 1);
    const TruncRing& R = TruncRing::get(F5, 3, 3);
    std::mt19937_64 rng(55);
    SECTION("wedge is alternating") {
        for (int t = 0; t < 10; ++t) {
            OneForm w = OneForm::zero(R);
            for (int i = 0; i < 3; ++i) w.c[i] = random_elem(R, 2, rng);
            CHECK(wedge(w, w, R).is_zero());
        }
    }
    SECTION("d(f dg) = df wedge dg") {
        for (int t = 0; t < 10; ++t) {
            RingElem f = random_elem(R, 1, rng), g = random_elem(R, 1, rng);
            TwoForm lhs = exterior_d(exterior_d(g) * f, R);
            TwoForm rhs = wedge(exterior_d(f), exterior_d(g), R);
            CHECK(lhs.c == rhs.c);
        }
    }
}

TEST_CASE("ring matrices: adjugate identity holds division-free") {
    const ExtField& F3 = ExtField::get(3, 1);
    const TruncRing& R = TruncRing::get(F3, 2, 3);
    std::mt19937_64 rng(56);
    for (int t = 0; t < 10; ++t) {
        RingMatrix m = ring_matrix(R, 3, 3);
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j) m.at(i, j) = random_elem(R, 1, rng);
        RingMatrix adj = m.adjugate();
        RingElem d = m.det();
        RingMatrix dI = ring_identity(R, 3).scaled(d);
        CHECK(m * adj == dI);
        CHECK(adj * m == dI);
    }
}

TEST_CASE("lifting between cutoffs") {
    const ExtField& F2 = ExtField::get(2, 1);
    const TruncRing& R3 = TruncRing::get(F2, 2, 3);
    const TruncRing& R5 = TruncRing::get(F2, 2, 5);
    RingElem f = R3.var(0) * R3.var(1) + R3.one();
    RingElem g = f.lift_to(R5);
    CHECK(g.ring().cutoff() == 5);
    CHECK(g.lift_to(R3) == f);
}
