#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <utility>

#include "gallab/energy.hpp"
#include "gallab/integer_set.hpp"
#include "oracles.hpp"

using namespace gallab;

TEST_CASE("rep_function enumerates positive differences") {
    const RepFunction single = rep_function(IntegerSet::from_sorted({5}));
    CHECK(single.counts().empty());
    CHECK(single.set_size() == 1);

    const RepFunction r124 = rep_function(IntegerSet::from_sorted({1, 2, 4}));
    CHECK(r124.counts() == std::vector<std::pair<u64, u64>>{{1, 1}, {2, 1}, {3, 1}});

    const RepFunction r123 = rep_function(gen_interval(3));
    CHECK(r123.counts() == std::vector<std::pair<u64, u64>>{{1, 2}, {2, 1}});
    CHECK(r123.at(1) == 2);
    CHECK(r123.at(7) == 0);
}

TEST_CASE("rep_function totals and key range") {
    for (u64 seed : {21, 22, 23, 24}) {
        const IntegerSet set = gen_random_subset(500, 20, seed);
        const RepFunction rep = rep_function(set);
        u64 total = 0;
        for (const auto& [n, r] : rep.counts()) total += r;
        CHECK(total == rep.total());
        CHECK(rep.total() == 20 * 19 / 2);
        CHECK(rep.max_difference() == set.max() - set.min());
    }
}

TEST_CASE("additive energy on frozen examples") {
    CHECK(additive_energy(IntegerSet::from_sorted({5})) == 1);
    CHECK(additive_energy(gen_interval(3)) == 19);
    CHECK(additive_energy(IntegerSet::from_sorted({1, 2, 4})) == 15);
}

TEST_CASE("additive energy equals the quadruple count") {
    for (u64 seed = 1; seed <= 20; ++seed) {
        Xoshiro256pp rng(seed);
        const std::size_t n = 2 + uniform_below(rng, 11);  // up to 12
        const auto values = oracle::random_set_values(rng, 200, n);
        const IntegerSet set = IntegerSet::from_values(std::vector<u64>(values));
        CHECK(additive_energy(set) == oracle::additive_energy_quadruples(values));
    }
}

TEST_CASE("multiplicative energy of r on frozen examples") {
    CHECK(mult_energy_of_r(gen_interval(2)) == u128{1});
    // brute-force value; the quadruple oracle and the ratio identity agree on 33
    CHECK(mult_energy_of_r(gen_interval(3)) == u128{33});
    CHECK(mult_energy_of_r(gen_interval(16)) == u128{4813452});
    CHECK_THROWS_AS(mult_energy_of_r(IntegerSet::from_sorted({5})), std::invalid_argument);
}

TEST_CASE("multiplicative energy equals the quadruple enumeration") {
    for (u64 seed = 1; seed <= 12; ++seed) {
        Xoshiro256pp rng(child_seed(100, seed));
        const std::size_t n = 2 + uniform_below(rng, 9);  // up to 10
        const auto values = oracle::random_set_values(rng, 300, n);
        const IntegerSet set = IntegerSet::from_values(std::vector<u64>(values));
        CHECK(mult_energy_of_r(set) == oracle::mult_energy_quadruples(values));
    }
}

TEST_CASE("ratio decomposition on frozen examples") {
    const auto single = ratio_energy_decomposition(gen_interval(2));
    REQUIRE(single.size() == 1);
    CHECK(single.at(RatioKey{1, 1}) == 1);

    const auto dec = ratio_energy_decomposition(gen_interval(3));
    REQUIRE(dec.size() == 3);
    CHECK(dec.at(RatioKey{1, 1}) == 5);
    CHECK(dec.at(RatioKey{1, 2}) == 2);
    CHECK(dec.at(RatioKey{2, 1}) == 2);
}

TEST_CASE("ratio decomposition row sums square to the multiplicative energy") {
    for (u64 seed : {31, 32, 33, 34, 35}) {
        Xoshiro256pp rng(seed);
        const std::size_t n = 3 + uniform_below(rng, 8);
        const auto values = oracle::random_set_values(rng, 400, n);
        const IntegerSet set = IntegerSet::from_values(std::vector<u64>(values));
        const auto dec = ratio_energy_decomposition(set);
        u128 sum_squares = 0;
        u128 sum = 0;
        for (const auto& [z, s] : dec) {
            sum_squares += u128{s} * s;
            sum += s;
        }
        CHECK(sum_squares == mult_energy_of_r(set));
        const u128 mass = u128{set.size()} * (set.size() - 1) / 2;
        CHECK(sum == mass * mass);
    }
}

TEST_CASE("ratio-restricted energy") {
    const IntegerSet a = gen_interval(3);
    const std::vector<RatioKey> diagonal{RatioKey{1, 1}};
    CHECK(ratio_restricted_energy(a, diagonal) == 5);

    CHECK(ratio_restricted_energy(a, std::vector<RatioKey>{}) == 0);

    // repeated entries count once
    const std::vector<RatioKey> repeated{RatioKey{1, 1}, RatioKey{1, 1}};
    CHECK(ratio_restricted_energy(a, repeated) == 5);

    for (u64 seed : {41, 42, 43}) {
        const IntegerSet set = gen_random_subset(200, 10, seed);
        const auto dec = ratio_energy_decomposition(set);
        std::vector<RatioKey> all;
        for (const auto& [z, s] : dec) all.push_back(z);
        const u64 mass = set.size() * (set.size() - 1) / 2;
        CHECK(ratio_restricted_energy(set, all) == mass * mass);

        // restriction to part of the ratios matches the decomposition rows
        std::vector<RatioKey> some(all.begin(), all.begin() + all.size() / 2);
        u64 expected = 0;
        for (const RatioKey& z : some) expected += dec.at(z);
        CHECK(ratio_restricted_energy(set, some) == expected);
    }
}

TEST_CASE("RatioKey canonicalization and ordering") {
    CHECK(RatioKey::reduce(4, 6) == RatioKey{2, 3});
    CHECK(RatioKey::reduce(7, 7) == RatioKey{1, 1});
    CHECK(RatioKey::reduce(3, 1) == RatioKey{3, 1});
    CHECK_THROWS_AS(RatioKey::reduce(0, 5), std::invalid_argument);
    CHECK(RatioKey{1, 2} < RatioKey{2, 3});
    CHECK_FALSE(RatioKey{2, 4} < RatioKey{1, 2});  // equal values compare equal
}

TEST_CASE("incidence counting on lines a + b*z = y") {
    const IntegerSet a12 = IntegerSet::from_sorted({1, 2});
    CHECK(incidence_count(a12, Rational::of(3, 1), Rational::of(1, 1)) == 2);
    CHECK(incidence_count(a12, Rational::of(4, 1), Rational::of(1, 1)) == 1);
    CHECK(incidence_count(a12, Rational::of(100, 1), Rational::of(1, 1)) == 0);

    // half-integer slope: a + b/2 = 2 has the solution (1,2) in {1,2}^2
    CHECK(incidence_count(a12, Rational::of(2, 1), Rational::of(1, 2)) == 1);
}

TEST_CASE("incidence counts over all intercepts cover every pair once") {
    const IntegerSet set = gen_random_subset(60, 12, 5);
    for (const Rational z : {Rational::of(1, 1), Rational::of(2, 3), Rational::of(-1, 2)}) {
        // enumerate the exact rational intercepts y = a + b*z
        std::set<std::pair<i64, i64>> ys;
        for (u64 a : set.values()) {
            for (u64 b : set.values()) {
                const i64 num = static_cast<i64>(a) * z.den + static_cast<i64>(b) * z.num;
                const Rational y = Rational::of(num, z.den);
                ys.insert({y.num, y.den});
            }
        }
        u64 total = 0;
        for (const auto& [num, den] : ys) {
            total += incidence_count(set, Rational{num, den}, z);
        }
        CHECK(total == set.size() * set.size());
    }
}

TEST_CASE("Rational normalization") {
    const Rational r = Rational::of(-4, -6);
    CHECK(r.num == 2);
    CHECK(r.den == 3);
    const Rational s = Rational::of(3, -9);
    CHECK(s.num == -1);
    CHECK(s.den == 3);
    CHECK_THROWS_AS(Rational::of(1, 0), std::invalid_argument);
}

TEST_CASE("checked 128-bit arithmetic refuses to wrap") {
    const u128 big = ~u128{0};
    CHECK_THROWS_AS(checked_add(big, 1), std::overflow_error);
    CHECK_THROWS_AS(checked_mul(big, 2), std::overflow_error);
    CHECK(checked_mul(u128{1} << 62, 2) == u128{1} << 63);
    CHECK_THROWS_AS(checked_add_u64(UINT64_MAX, 1), std::overflow_error);
}
