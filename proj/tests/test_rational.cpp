#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "l1lab/errors.hpp"
#include "l1lab/rational.hpp"

using namespace l1lab;

TEST_CASE("parse_rational accepts decimals and fractions") {
    CHECK(parse_rational("0.85") == Rational(17, 20));
    CHECK(parse_rational("0.6") == Rational(3, 5));
    CHECK(parse_rational("-0.05") == Rational(-1, 20));
    CHECK(parse_rational("3/5") == Rational(3, 5));
    CHECK(parse_rational("-7/20") == Rational(-7, 20));
    CHECK(parse_rational("2") == Rational(2));
    CHECK(parse_rational("0") == Rational(0));
    CHECK(parse_rational(".5") == Rational(1, 2));
    CHECK(parse_rational(" 1/3 ") == Rational(1, 3));
}

TEST_CASE("parse_rational rejects junk") {
    CHECK_THROWS_AS(parse_rational(""), ParseError);
    CHECK_THROWS_AS(parse_rational("abc"), ParseError);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("1e3"), ParseError);
    CHECK_THROWS_AS(parse_rational("1.2.3"), ParseError);
    CHECK_THROWS_AS(parse_rational("-"), ParseError);
    CHECK_THROWS_AS(parse_rational("1/ 2"), ParseError);
}

TEST_CASE("format_rational renders terminating decimals, else p/q") {
    CHECK(format_rational(Rational(3, 5)) == "0.6");
    CHECK(format_rational(Rational(17, 20)) == "0.85");
    CHECK(format_rational(Rational(1, 20)) == "0.05");
    CHECK(format_rational(Rational(0)) == "0");
    CHECK(format_rational(Rational(2)) == "2");
    CHECK(format_rational(Rational(-1, 4)) == "-0.25");
    CHECK(format_rational(Rational(11, 10)) == "1.1");
    CHECK(format_rational(Rational(1, 3)) == "1/3");
    CHECK(format_rational(Rational(-4, 3)) == "-4/3");
    CHECK(format_rational(Rational(1, 6)) == "1/6");
}

TEST_CASE("parse/format round-trips on random rationals") {
    SplitMix64 gen(13);
    for (int i = 0; i < 500; ++i) {
        const std::int64_t num = static_cast<std::int64_t>(gen.next() % 20001) - 10000;
        const std::int64_t den = static_cast<std::int64_t>(gen.next() % 999) + 1;
        const Rational r(num, den);
        CHECK(parse_rational(format_rational(r)) == r);
    }
}

TEST_CASE("rational_floor and mod_one") {
    CHECK(rational_floor(Rational(7, 2)) == 3);
    CHECK(rational_floor(Rational(-7, 2)) == -4);
    CHECK(rational_floor(Rational(4)) == 4);
    CHECK(rational_floor(Rational(-4)) == -4);
    CHECK(mod_one(Rational(8, 5)) == Rational(3, 5));
    CHECK(mod_one(Rational(1)) == Rational(0));
    CHECK(mod_one(Rational(-1, 4)) == Rational(3, 4));
    CHECK(mod_one(Rational(0)) == Rational(0));
}

TEST_CASE("round_half_even matches banker's rounding on the 0.1 grid") {
    const Rational step(1, 10);
    // Ties: 0.85 has even neighbour 0.8, 0.95 has even neighbour 1.0.
    CHECK(round_half_even(parse_rational("0.85"), step) == parse_rational("0.8"));
    CHECK(round_half_even(parse_rational("0.95"), step) == parse_rational("1.0"));
    CHECK(round_half_even(parse_rational("0.55"), step) == parse_rational("0.6"));
    CHECK(round_half_even(parse_rational("0.25"), step) == parse_rational("0.2"));
    // Non-ties round to nearest.
    CHECK(round_half_even(parse_rational("0.54"), step) == parse_rational("0.5"));
    CHECK(round_half_even(parse_rational("0.56"), step) == parse_rational("0.6"));
    CHECK(round_half_even(parse_rational("0.04"), step) == Rational(0));
    // Exact grid points stay put.
    CHECK(round_half_even(parse_rational("0.7"), step) == parse_rational("0.7"));
    // Negative values follow the same rule.
    CHECK(round_half_even(parse_rational("-0.25"), step) == parse_rational("-0.2"));
    CHECK(round_half_even(parse_rational("-0.15"), step) == parse_rational("-0.2"));
}

TEST_CASE("round_half_even error never exceeds step/2") {
    SplitMix64 gen(99);
    const Rational step(1, 10);
    for (int i = 0; i < 1000; ++i) {
        const Rational x(static_cast<std::int64_t>(gen.next() % 4001) - 2000, 997);
        const Rational rounded = round_half_even(x, step);
        CHECK(abs(rounded - x) * 2 <= step);
        // Idempotence: grid values are fixed.
        CHECK(round_half_even(rounded, step) == rounded);
    }
    CHECK_THROWS_AS(round_half_even(Rational(1), Rational(0)), DomainError);
}

TEST_CASE("derive_seed and SplitMix64 are deterministic") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 0) != derive_seed(43, 0));
    SplitMix64 a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("mix_rational distinguishes values and order") {
    const std::uint64_t base = 5;
    CHECK(mix_rational(base, Rational(1, 2)) == mix_rational(base, Rational(2, 4)));
    CHECK(mix_rational(base, Rational(1, 2)) != mix_rational(base, Rational(1, 3)));
    const std::uint64_t ab = mix_rational(mix_rational(base, Rational(1)), Rational(2));
    const std::uint64_t ba = mix_rational(mix_rational(base, Rational(2)), Rational(1));
    CHECK(ab != ba);
}
