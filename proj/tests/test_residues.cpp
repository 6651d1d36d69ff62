#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <numeric>

#include "primerace/errors.hpp"
#include "primerace/residues.hpp"

using namespace primerace;

TEST_CASE("modulus decomposition for small k") {
    Modulus m4(4);
    CHECK(m4.phi() == 2);
    REQUIRE(m4.factors().size() == 1);
    CHECK(m4.factors()[0].order == 2);
    CHECK(m4.factors()[0].generator == 3);

    Modulus m5(5);
    CHECK(m5.phi() == 4);
    REQUIRE(m5.factors().size() == 1);
    CHECK(m5.factors()[0].order == 4);

    Modulus m8(8);
    CHECK(m8.phi() == 4);
    REQUIRE(m8.factors().size() == 2);
    CHECK(m8.factors()[0].order == 2);
    CHECK(m8.factors()[1].order == 2);

    CHECK_THROWS_AS(Modulus(2), InvalidArgumentError);
    CHECK_THROWS_AS(Modulus(0), InvalidArgumentError);
}

TEST_CASE("generator orders multiply to phi") {
    for (std::uint64_t k : {3u, 4u, 8u, 9u, 12u, 16u, 24u, 45u, 56u, 105u, 200u}) {
        Modulus m(k);
        std::uint64_t prod = 1;
        for (const auto& f : m.factors()) {
            prod *= f.order;
            CHECK(std::gcd(f.generator, k) == 1);
        }
        CHECK(prod == m.phi());
        CHECK(m.reduced_residues().size() == m.phi());
    }
}

TEST_CASE("characters mod 4") {
    CharacterTable t(4);
    REQUIRE(t.size() == 2);
    CHECK(t.all()[0].is_principal());
    const Character& chi = t.all()[1];
    CHECK_FALSE(chi.is_principal());
    CHECK(chi.is_real());
    CHECK(chi.value(3).is_minus_one());
    CHECK(chi.value(1).is_one());
    CHECK(chi.label() == "4:1");
    CHECK(t.all()[0].label() == "4:0");
}

TEST_CASE("characters mod 5 include the paper's chi_1") {
    CharacterTable t(5);
    REQUIRE(t.size() == 4);
    const std::complex<double> I(0, 1);
    bool found = false;
    for (const auto& chi : t.all()) {
        if (std::abs(chi.cvalue(2) - I) < 1e-15 &&
            std::abs(chi.cvalue(3) + I) < 1e-15 &&
            std::abs(chi.cvalue(4) + 1.0) < 1e-15 &&
            std::abs(chi.cvalue(1) - 1.0) < 1e-15) {
            found = true;
            CHECK(chi.label() == "5:1");
        }
    }
    CHECK(found);
}

TEST_CASE("characters mod 12 are all real") {
    CharacterTable t(12);
    REQUIRE(t.size() == 4);
    for (const auto& chi : t.all()) CHECK(chi.is_real());
}

TEST_CASE("square root counts") {
    Modulus m4(4);
    auto n4 = square_root_counts(m4);
    CHECK(n4.at(1) == 2);
    CHECK(n4.at(3) == 0);

    Modulus m5(5);
    auto n5 = square_root_counts(m5);
    CHECK(n5.at(1) == 2);
    CHECK(n5.at(4) == 2);
    CHECK(n5.at(2) == 0);
    CHECK(n5.at(3) == 0);

    Modulus m24(24);
    auto n24 = square_root_counts(m24);
    CHECK(n24.at(1) == 8);
    for (auto l : m24.reduced_residues())
        if (l != 1) CHECK(n24.at(l) == 0);
}

TEST_CASE("orthogonality defect tiny for k=4,5,60") {
    for (std::uint64_t k : {4u, 5u, 60u}) {
        Modulus m(k);
        CHECK(character_orthogonality_defect(m) <= 1e-12 * double(m.phi()));
    }
}

TEST_CASE("structural sweep k <= 200") {
    for (std::uint64_t k = 3; k <= 200; ++k) {
        Modulus m(k);
        CharacterTable t(k);
        REQUIRE(t.size() == m.phi());
        CHECK(t.all()[0].is_principal());

        // pairwise distinct value vectors: indices differ => some value differs
        // (spot pairs only; full distinctness is implied by orthogonality)
        CHECK(character_orthogonality_defect(m) <= 1e-12 * double(m.phi()));

        // N_k(l) against the direct double loop
        auto nk = square_root_counts(m);
        std::uint64_t total = 0;
        for (auto l : m.reduced_residues()) {
            std::uint32_t brute = 0;
            for (std::uint64_t u = 1; u <= k; ++u)
                if (std::gcd(u, k) == 1 && (u * u) % k == l) ++brute;
            CHECK(nk.at(l) == brute);
            total += brute;
        }
        CHECK(total == m.phi());
    }
}

TEST_CASE("multiplicativity is exact in the turn representation") {
    for (std::uint64_t k : {5u, 8u, 12u, 21u, 40u, 200u}) {
        CharacterTable t(k);
        const auto& m = t.modulus();
        for (const auto& chi : t.all()) {
            for (auto a : m.reduced_residues()) {
                for (auto b : m.reduced_residues()) {
                    const auto ab = (std::uint64_t{a} * b) % k;
                    CHECK(chi.value(ab) == chi.value(a) + chi.value(b));
                }
            }
        }
    }
}

TEST_CASE("conjugate character has negated exponent vector") {
    CharacterTable t(15);
    for (const auto& chi : t.all()) {
        const auto conj = chi.conjugate();
        for (auto l : t.modulus().reduced_residues()) {
            CHECK(conj.value(l) == chi.value(l).conjugated());
        }
    }
}

TEST_CASE("conductors: principal has 1, mod-4 nonprincipal has 4") {
    CharacterTable t4(4);
    CHECK(t4.all()[0].conductor() == 1);
    CHECK(t4.all()[1].conductor() == 4);

    // mod 8: the character induced by the mod-4 one has conductor 4
    CharacterTable t8(8);
    int with_conductor_4 = 0;
    for (const auto& chi : t8.all())
        if (chi.conductor() == 4) ++with_conductor_4;
    CHECK(with_conductor_4 == 1);
}

TEST_CASE("by_label round trip") {
    CharacterTable t(8);
    for (const auto& chi : t.all()) CHECK(&t.by_label(chi.label()) == &chi);
    CHECK_THROWS_AS(t.by_label("8:9"), DataError);
}
