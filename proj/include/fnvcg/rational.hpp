// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace fnvcg {

using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "3", "-3/20", "0.15", "1e-3" and "+2.5E2". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// "N/D", or "N" when the denominator is 1.
std::string to_fraction_string(const Rational& r);

// Decimal rendering rounded half away from zero to `digits` places.
std::string to_decimal_string(const Rational& r, int digits = 12);

double to_double(const Rational& r);

Rational make_rational(long num, long den = 1);
Rational make_rational(const Integer& num, const Integer& den);

// Rational 2^e for signed e.
Rational pow2(int e);

Rational rational_pow(const Rational& base, unsigned exp);

Integer binomial(unsigned n, unsigned k);

Integer factorial(unsigned n);

// Largest multiple of 1/den that is <= r.
Rational floor_to_denominator(const Rational& r, const Integer& den);

inline int sign(const Rational& r) { return sgn(r); }

}  // namespace fnvcg
