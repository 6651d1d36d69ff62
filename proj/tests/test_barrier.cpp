#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "primerace/barrier.hpp"
#include "primerace/errors.hpp"

using namespace primerace;

namespace {

double wrap_phase(double t, double log_x) {
    return std::fmod(t * log_x, 2.0 * std::numbers::pi);
}

const PairMainTerm& find_pair(const std::vector<PairMainTerm>& terms,
                              std::uint32_t l1, std::uint32_t l2) {
    for (const auto& t : terms)
        if (t.l1 == l1 && t.l2 == l2) return t;
    throw std::runtime_error("pair missing");
}

}  // namespace

TEST_CASE("k5 main terms reproduce the worked example") {
    const double sigma = 0.75, t = 1e6;
    auto spec = builtin_k5(sigma, t);
    CharacterTable table(5);

    for (double x : {1e10, 3.7e14, 1e25}) {
        const double lx = std::log(x);
        auto terms = dominant_deltas(lx, spec, table);
        REQUIRE(terms.size() == 6);
        const double phase = wrap_phase(t, lx);
        const double c = std::cos(phase), s = std::sin(phase);
        // pi(1)-pi(4) = scale * Re(x^{it} i); pi(4)-pi(2) = scale * Re(x^{it}(-1/2-i/2));
        // pi(2)-pi(3) = scale * Re(x^{it})
        CHECK(find_pair(terms, 1, 4).main_ratio == doctest::Approx(-s).epsilon(1e-9));
        CHECK(find_pair(terms, 4, 2).main_ratio ==
              doctest::Approx(-0.5 * c + 0.5 * s).epsilon(1e-9));
        CHECK(find_pair(terms, 2, 3).main_ratio == doctest::Approx(c).epsilon(1e-9));
    }
    CHECK_THROWS_AS(dominant_deltas(std::log(5.0), spec, table), InvalidArgumentError);
}

TEST_CASE("main terms are linear in multiplicities") {
    auto spec1 = builtin_k5(0.8, 1e5);
    auto spec2 = spec1;
    spec2.zeros["5:1"][0].multiplicity = 2;
    CharacterTable table(5);
    const double lx = std::log(1e12);
    auto t1 = dominant_deltas(lx, spec1, table);
    auto t2 = dominant_deltas(lx, spec2, table);
    for (std::size_t i = 0; i < t1.size(); ++i)
        CHECK(t2[i].main_ratio == doctest::Approx(2.0 * t1[i].main_ratio).epsilon(1e-15));
}

TEST_CASE("pair main terms telescope around cycles") {
    BarrierSpec spec;
    spec.k = 5;
    spec.residues = {1, 2, 3, 4};
    spec.zeros["5:1"] = {{{0.8, 3.0e4}, 1}};
    spec.zeros["5:2"] = {{{0.7, 5.5e4}, 2}};
    spec.beta1 = 0.55;
    spec.beta2 = 0.7;
    spec.beta3 = 0.8;
    CharacterTable table(5);
    auto terms = dominant_deltas(std::log(1e11), spec, table);
    const double m12 = find_pair(terms, 1, 2).main_ratio;
    const double m23 = find_pair(terms, 2, 3).main_ratio;
    const double m13 = find_pair(terms, 1, 3).main_ratio;
    CHECK(m12 + m23 - m13 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("phase inequality certified at 1e-4") {
    auto res = k5_phase_inequality(1e-4);
    CHECK(res.certified);
    CHECK(res.grid_max <= -std::sqrt(0.1) + res.slack);
    CHECK(res.grid_max >= -std::sqrt(0.1) - 1e-4);  // the bound is attained
    // the max sits where tan(theta) = 1/3
    CHECK(res.worst_theta == doctest::Approx(std::atan(1.0 / 3.0)).epsilon(1e-2));
    CHECK_THROWS_AS(k5_phase_inequality(0.01), InvalidArgumentError);
}

TEST_CASE("builtin k5 excludes the paper ordering") {
    auto spec = builtin_k5(0.75, 1e6);
    CharacterTable table(5);
    auto v = verify_exclusion(spec, table, {1, 4, 2, 3}, 1e10, 1e30, 1000);
    CHECK(v.passed);
    CHECK_FALSE(v.inconclusive);
    CHECK(v.margin > 0.0);
    // the phase bound guarantees margin >= sqrt(0.1) - C/t on every sample
    CHECK(v.margin >= std::sqrt(0.1) - 10.0 / 1e6 - 1e-9);
    CHECK(v.x_threshold == doctest::Approx(1e10).epsilon(1e-9));
    CHECK(v.decile_margins.size() == 10);
    for (double m : v.decile_margins) CHECK(m > 0.0);
}

TEST_CASE("reversed ordering is excluded by the same symmetry") {
    // theta -> theta + pi flips all three phase branches, so for every x some
    // adjacent difference of the reversed chain is forced negative as well
    auto spec = builtin_k5(0.75, 1e6);
    CharacterTable table(5);
    auto v = verify_exclusion(spec, table, {3, 2, 4, 1}, 1e10, 1e30, 1000);
    CHECK(v.passed);
}

TEST_CASE("not every ordering is excluded by the k5 barrier") {
    auto spec = builtin_k5(0.75, 1e6);
    CharacterTable table(5);
    // (1,2,4,3): the three main-term directions span only a half plane, so
    // phases exist where no required difference is forced negative
    auto v = verify_exclusion(spec, table, {1, 2, 4, 3}, 1e10, 1e30, 1000);
    CHECK_FALSE(v.passed);
}

TEST_CASE("empty spec is inconclusive") {
    BarrierSpec spec;
    spec.k = 5;
    spec.residues = {1, 2, 3, 4};
    CharacterTable table(5);
    auto v = verify_exclusion(spec, table, {1, 4, 2, 3}, 1e10, 1e20, 100);
    CHECK_FALSE(v.passed);
    CHECK(v.inconclusive);
}

TEST_CASE("small t drowns the main term: inconclusive") {
    auto spec = builtin_k5(0.75, 5.0);
    CharacterTable table(5);
    auto v = verify_exclusion(spec, table, {1, 4, 2, 3}, 1e10, 1e20, 200);
    CHECK(v.inconclusive);
}

TEST_CASE("spec validation") {
    CharacterTable table(5);
    auto bad = builtin_k5(0.75, 1e6);
    bad.zeros["5:1"][0].rho = {0.4, 1e6};  // real part below 1/2
    CHECK_THROWS_AS(bad.validate(table), DataError);

    auto bad2 = builtin_k5(0.75, 1e6);
    bad2.zeros["5:0"] = {{{0.75, 1e6}, 1}};  // principal character
    CHECK_THROWS_AS(bad2.validate(table), DataError);

    auto bad3 = builtin_k5(0.75, 1e6);
    bad3.beta1 = 0.8;  // beta1 must stay below beta2
    CHECK_THROWS_AS(bad3.validate(table), DataError);
}

TEST_CASE("barrier file round trip") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "primerace_barrier";
    fs::create_directories(dir);
    const std::string path = (dir / "spec.txt").string();
    {
        std::ofstream out(path);
        out << "#barrier\n#modulus 5\n#race 1,4,2,3\n#beta1 0.5\n";
        out << "#constants 10 10\n";
        out << "5:1 0.75 1000000 1\n";
    }
    auto spec = load_barrier(path);
    CHECK(spec.k == 5);
    CHECK(spec.residues == std::vector<std::uint32_t>{1, 4, 2, 3});
    CHECK(spec.beta2 == 0.75);
    CHECK(spec.beta3 == 0.75);
    CharacterTable table(5);
    spec.validate(table);
    auto v = verify_exclusion(spec, table, {1, 4, 2, 3}, 1e10, 1e30, 500);
    CHECK(v.passed);

    std::ofstream(path) << "#modulus 5\n5:1 0.75 1e6 1\n";
    CHECK_THROWS_AS(load_barrier(path), DataError);  // missing #barrier
    fs::remove_all(dir);
}

TEST_CASE("census: excluded orderings never occur, independent phases wander") {
    CharacterTable table(5);
    auto spec = builtin_k5(0.75, 1e6);
    auto census = orderings_census(spec, table, 1e10, 1e30, 2000);
    CHECK(census.find({1, 4, 2, 3}) == census.end());
    CHECK(census.find({3, 2, 4, 1}) == census.end());

    // zeros with rationally independent ordinates spread over many orderings
    BarrierSpec indep;
    indep.k = 5;
    indep.residues = {1, 2, 3, 4};
    indep.zeros["5:1"] = {{{0.75, 1.0e5}, 1}};
    indep.zeros["5:2"] = {{{0.75, std::sqrt(2.0) * 1.0e5}, 1}};
    indep.zeros["5:3"] = {{{0.75, std::sqrt(3.0) * 1.0e5}, 1}};
    indep.beta1 = 0.5;
    indep.beta2 = 0.75;
    indep.beta3 = 0.75;
    auto c2 = orderings_census(indep, table, 1e10, 1e30, 2000);
    CHECK(c2.size() >= 4);

    auto single = orderings_census(spec, table, 1e10, 1e30, 1);
    std::uint64_t total = 0;
    for (const auto& [perm, count] : single) total += count;
    CHECK(total == 1);
}
