#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace pvass {

// Exact arbitrary-precision rational. All analysis arithmetic in this
// project is exact; doubles appear only in simulation summaries.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Parses "a/b" or "a" with optional sign. Throws std::invalid_argument on
// malformed input or zero denominator.
Rational parse_rational(const std::string& text);

// Canonical form "num/den" with den >= 1, e.g. "-3/2", "0/1", "1/1".
std::string rational_to_string(const Rational& value);

double rational_to_double(const Rational& value);

// floor(value), exact.
long long rational_floor(const Rational& value);

// ceil(value), exact.
long long rational_ceil(const Rational& value);

// Least common multiple of the denominators, as an integer rational.
Rational common_denominator(const std::vector<Rational>& values);

}  // namespace pvass
