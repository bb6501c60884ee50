#include "l1lab/rational.hpp"
#include "l1lab/errors.hpp"

#include <cctype>
#include <sstream>

namespace l1lab {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Rational parse_decimal(std::string_view body, bool negative, std::string_view original) {
    const auto dot = body.find('.');
    std::string whole;
    std::string frac;
    if (dot == std::string_view::npos) {
        whole = std::string(body);
    } else {
        whole = std::string(body.substr(0, dot));
        frac = std::string(body.substr(dot + 1));
    }
    if (whole.empty() && frac.empty()) {
        throw ParseError("not a rational: '" + std::string(original) + "'");
    }
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) {
        throw ParseError("not a rational: '" + std::string(original) + "'");
    }
    Int numerator = whole.empty() ? Int(0) : Int(whole);
    Int denominator = 1;
    for (char c : frac) {
        numerator = numerator * 10 + (c - '0');
        denominator *= 10;
    }
    if (negative) numerator = -numerator;
    return Rational(numerator, denominator);
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) throw ParseError("empty rational literal");

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) throw ParseError("not a rational: '" + std::string(text) + "'");

    const auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        std::string num(s.substr(0, slash));
        std::string den(s.substr(slash + 1));
        if (!all_digits(num) || !all_digits(den)) {
            throw ParseError("not a rational: '" + std::string(text) + "'");
        }
        Int d(den);
        if (d == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
        Int n(num);
        if (negative) n = -n;
        return Rational(n, d);
    }
    return parse_decimal(s, negative, text);
}

std::string format_rational(const Rational& value) {
    Int num = numerator(value);
    Int den = denominator(value); // > 0, lowest terms

    // Strip factors of 2 and 5; if nothing is left the decimal terminates.
    Int rest = den;
    unsigned twos = 0;
    unsigned fives = 0;
    while (rest % 2 == 0) { rest /= 2; ++twos; }
    while (rest % 5 == 0) { rest /= 5; ++fives; }

    if (rest != 1) {
        std::ostringstream out;
        out << num << "/" << den;
        return out.str();
    }

    const unsigned places = std::max(twos, fives);
    Int scale = 1;
    for (unsigned i = 0; i < places; ++i) scale *= 10;
    Int scaled = num * scale / den; // exact by construction

    const bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string digits = scaled.str();
    if (digits.size() <= places) {
        digits.insert(0, places - digits.size() + 1, '0');
    }
    std::string result = digits;
    if (places > 0) {
        result.insert(result.size() - places, ".");
    }
    if (negative) result.insert(0, "-");
    return result;
}

Int rational_floor(const Rational& value) {
    Int num = numerator(value);
    Int den = denominator(value);
    Int q = num / den;
    if (num < 0 && q * den != num) --q;
    return q;
}

Rational mod_one(const Rational& value) {
    return value - Rational(rational_floor(value));
}

Rational round_half_even(const Rational& value, const Rational& step) {
    if (step <= 0) throw DomainError("round_half_even: step must be positive");
    const Rational quotient = value / step;
    const Int low = rational_floor(quotient);
    const Rational frac = quotient - Rational(low);
    const Rational half(1, 2);

    Int chosen;
    if (frac > half) {
        chosen = low + 1;
    } else if (frac < half) {
        chosen = low;
    } else {
        chosen = (low % 2 == 0) ? low : low + 1;
    }
    return Rational(chosen) * step;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    SplitMix64 gen(base + 0x9E3779B97F4A7C15ULL * (index + 1));
    return gen.next();
}

std::uint64_t mix_rational(std::uint64_t h, const Rational& value) {
    // FNV-1a over the canonical "p/q" rendering keeps the digest portable.
    std::ostringstream text;
    text << numerator(value) << '/' << denominator(value);
    for (char c : text.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace l1lab
