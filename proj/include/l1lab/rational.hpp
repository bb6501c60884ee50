#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace l1lab {

/// Arbitrary-precision signed integer.
using Int = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator. Every value in the library is one of these;
/// there is no binary floating point anywhere in the computation path.
using Rational = boost::multiprecision::cpp_rational;

/// Parse "p/q" (fraction) or a plain decimal such as "0.85" or "-2".
/// Decimal strings parse to the exact rational they denote (0.85 -> 17/20).
/// Throws ParseError on anything else.
Rational parse_rational(std::string_view text);

/// Render exactly: a terminating decimal when the reduced denominator is of
/// the form 2^a * 5^b ("0.65", "2", "-0.05"), otherwise "p/q" ("1/3").
std::string format_rational(const Rational& value);

/// Floor of a rational as an integer (rounds toward negative infinity).
Int rational_floor(const Rational& value);

/// value reduced mod 1 into [0, 1).
Rational mod_one(const Rational& value);

/// Nearest multiple of `step` (> 0), ties resolved to the even multiple.
/// round_half_even(0.85, 0.1) == 0.8 and round_half_even(0.95, 0.1) == 1.0.
Rational round_half_even(const Rational& value, const Rational& step);

/// SplitMix64: tiny deterministic PRNG used everywhere randomness is needed,
/// so that every run is reproducible from explicit 64-bit seeds.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, bound]; bound must be < 2^32 for negligible bias concerns
    /// to matter at the sample counts used here.
    std::uint64_t next_below(std::uint64_t bound_inclusive) {
        return next() % (bound_inclusive + 1);
    }

private:
    std::uint64_t state_;
};

/// Stable seed derivation for trial i / row i / stage i of a run with base seed s.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Order- and value-sensitive 64-bit digest of a rational, for deterministic
/// per-point randomness (independent of std::hash and platform).
std::uint64_t mix_rational(std::uint64_t h, const Rational& value);

} // namespace l1lab
