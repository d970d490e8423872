// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "linktheory/error.hpp"

namespace lks {

// Exact rational scalar. GMP keeps values canonical (lowest terms, positive
// denominator) as long as every entry point canonicalizes, so the helpers
// below are the only constructors used across the library.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) fail(ErrorKind::SizeMismatch, "rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_negative(const Rational& q) { return sgn(q) < 0; }

// Renders "p" for integers and "p/q" otherwise; this is the wire format used
// by the DSL serializer and the CLI's JSON output.
inline std::string to_string(const Rational& q) {
    return q.get_str();
}

// Parses an optionally signed "p" or "p/q" integer-pair literal. Returns
// nullopt on malformed text or zero denominator; callers attach positions.
inline std::optional<Rational> parse_rational(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::size_t slash = text.find('/');
    std::string num = text.substr(0, slash == std::string::npos ? text.size() : slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    auto is_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    if (!is_int(num) || !is_int(den)) return std::nullopt;
    mpz_class n(num), d(den);
    if (d == 0) return std::nullopt;
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline Rational sum(const std::vector<Rational>& xs) {
    Rational acc = 0;
    for (const auto& x : xs) acc += x;
    return acc;
}

}  // namespace lks
