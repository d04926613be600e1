#include <random>

#include "doctest.h"
#include "coarse/generators.hpp"
#include "coarse/prime_arith.hpp"

using namespace coarse;

namespace {

FactorFunction ff(const char* s) { return FactorFunction::parse(s); }

// naive factorization by every integer divisor
std::map<std::uint64_t, std::uint64_t> naive_factor(std::uint64_t n) {
    std::map<std::uint64_t, std::uint64_t> out;
    for (std::uint64_t d = 2; n > 1; ++d)
        while (n % d == 0) {
            ++out[d];
            n /= d;
        }
    return out;
}

FactorFunction random_ff(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> k(0, 5), dflt(0, 9);
    std::map<std::uint64_t, ExtNat> ex;
    for (std::uint64_t p : {2, 3, 5, 7, 11}) {
        int v = k(rng);
        if (v == 5) ex[p] = ExtNat::inf();
        else if (v > 0) ex[p] = ExtNat(static_cast<std::uint64_t>(v));
    }
    int d = dflt(rng);
    ExtNat de = d < 7 ? ExtNat(0) : d < 9 ? ExtNat(1) : ExtNat::inf();
    return FactorFunction(ex, de);
}

// sum over the listed primes plus the default behaviour for the rest
bool almost_equal_oracle(const FactorFunction& f, const FactorFunction& g) {
    if (f.default_value() != g.default_value()) return false;
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13})
        if (f(p).is_inf() != g(p).is_inf()) return false;
    return true;
}

}  // namespace

TEST_CASE("extended naturals") {
    CHECK(ExtNat(3) < ExtNat::inf());
    CHECK(abs_diff(ExtNat::inf(), ExtNat::inf()) == ExtNat(0));
    CHECK(abs_diff(ExtNat::inf(), ExtNat(4)) == ExtNat::inf());
    CHECK(abs_diff(ExtNat(4), ExtNat::inf()) == ExtNat::inf());
    CHECK(abs_diff(ExtNat(2), ExtNat(7)) == ExtNat(5));
    CHECK(ExtNat::inf() + ExtNat(5) == ExtNat::inf());
    CHECK(ExtNat(0) * ExtNat::inf() == ExtNat(0));
    CHECK_THROWS(ExtNat(ExtNat::kInf - 1) + ExtNat(5));
    CHECK(ExtNat::parse("inf").is_inf());
    CHECK(ExtNat::parse("17") == ExtNat(17));
}

TEST_CASE("sieve") {
    PrimeSieve s(100);
    CHECK(s.primes().size() == 25);
    CHECK(s.is_prime(97));
    CHECK_FALSE(s.is_prime(91));
    CHECK_THROWS(s.is_prime(101));
}

TEST_CASE("phi_of_nat examples") {
    CHECK(phi_of_nat(12) == ff("2:2,3:1"));
    CHECK(phi_of_nat(1).is_zero());
    CHECK(phi_of_nat(360) == ff("2:3,3:2,5:1"));
    CHECK_THROWS(phi_of_nat(0));
    CHECK(phi_of_nat(360).supernatural_value() == 360);
}

TEST_CASE("phi_of_nat agrees with naive factorization") {
    for (std::uint64_t n = 1; n <= 20000; ++n) {
        std::map<std::uint64_t, ExtNat> ex;
        for (auto [p, k] : naive_factor(n)) ex[p] = ExtNat(k);
        REQUIRE(phi_of_nat(n) == FactorFunction(ex, ExtNat(0)));
    }
}

TEST_CASE("phi_of_nat is multiplicative") {
    // exhaustive on a small square, sampled across the full range
    for (std::uint64_t a = 1; a <= 300; ++a)
        for (std::uint64_t b = 1; b <= 300; ++b)
            REQUIRE(phi_of_nat(a * b) == ff_add(phi_of_nat(a), phi_of_nat(b)));
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> d(1, 10000);
    for (int i = 0; i < 200000; ++i) {
        auto a = d(rng), b = d(rng);
        REQUIRE(phi_of_nat(a * b) == ff_add(phi_of_nat(a), phi_of_nat(b)));
    }
}

TEST_CASE("add and sub examples") {
    CHECK(ff_add(ff("2:1"), ff("2:2,3:1")) == ff("2:3,3:1"));
    CHECK(ff_add(ff("2:inf"), ff("2:5")) == ff("2:inf"));
    CHECK(ff_add(ff("5:2,default:1"), FactorFunction()) == ff("5:2,default:1"));
    CHECK(ff_sub(ff("2:3"), ff("2:2")) == ff("2:1"));
    CHECK(ff_sub(ff("2:inf"), ff("2:inf")).is_zero());
    CHECK(ff_sub(ff("2:inf,7:3"), ff("2:inf,7:3")).is_zero());
    CHECK(ff_sub(ff("2:inf"), ff("2:4")) == ff("2:inf"));
    CHECK_THROWS_WITH_AS(ff_sub(ff("2:1"), ff("3:1")), doctest::Contains("3"), FactorError);
}

TEST_CASE("order and equality examples") {
    CHECK(ff_le(ff("2:1"), ff("2:inf")));
    CHECK_FALSE(ff_le(ff("3:1"), ff("2:5")));
    CHECK(ff_le(ff("2:5,default:1"), ff("2:5,default:1")));
    CHECK(ff_equal(ff("2:inf"), ff("2:inf")));
    CHECK_FALSE(ff_equal(ff("2:1"), ff("2:1,3:1")));
    CHECK(ff_equal(ff("default:1"), ff("default:1")));
    CHECK(ff_almost_equal(ff("2:inf,3:1"), ff("2:inf,3:5")));
    CHECK_FALSE(ff_almost_equal(ff("2:inf"), ff("2:3")));
    CHECK_FALSE(ff_almost_equal(ff("default:1"), FactorFunction()));
}

TEST_CASE("text form round trip") {
    CHECK(ff("2:inf,3:1").render() == "2:inf,3:1");
    CHECK(ff("default:1,2:3")(2) == ExtNat(3));
    CHECK(ff("default:1,2:3")(7) == ExtNat(1));
    CHECK(ff("{2:2, 3:1}") == ff("2:2,3:1"));
    CHECK(ff("default:1,2:1") == ff("default:1"));
    CHECK(FactorFunction().render() == "default:0");
    CHECK_THROWS(ff("4:1"));
    CHECK_THROWS(ff("2:x"));
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        auto f = random_ff(rng);
        REQUIRE(FactorFunction::parse(f.render()) == f);
    }
}

TEST_CASE("almost-equality properties") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 3000; ++i) {
        auto f = random_ff(rng), g = random_ff(rng), h = random_ff(rng);
        REQUIRE(ff_almost_equal(f, f));
        REQUIRE(ff_almost_equal(f, g) == ff_almost_equal(g, f));
        if (ff_almost_equal(f, g) && ff_almost_equal(g, h)) REQUIRE(ff_almost_equal(f, h));
        if (ff_equal(f, g)) REQUIRE(ff_almost_equal(f, g));
        REQUIRE(ff_almost_equal(f, g) == almost_equal_oracle(f, g));
    }
}

TEST_CASE("add then sub round trip") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 3000; ++i) {
        auto f = random_ff(rng);
        auto g = random_factor_function(rng, 13, 4);
        REQUIRE(ff_sub(ff_add(f, g), g) == f);
        REQUIRE(ff_le(g, ff_add(f, g)));
    }
}

TEST_CASE("normalization is idempotent") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        auto f = random_ff(rng);
        FactorFunction again(f.explicit_part(), f.default_value());
        REQUIRE(again == f);
        for (auto& [p, v] : f.explicit_part()) REQUIRE(v != f.default_value());
    }
}
