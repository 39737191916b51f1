// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fnvcg/rational.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fnvcg {

enum class Var : std::uint8_t { q = 0, x, y, t, v1, v2, w1 };
inline constexpr std::size_t kNumVars = 7;
inline constexpr std::array<Var, kNumVars> kAllVars = {Var::q, Var::x, Var::y, Var::t,
                                                        Var::v1, Var::v2, Var::w1};

std::string_view var_name(Var v);
std::optional<Var> parse_var(std::string_view name);
inline std::size_t var_index(Var v) { return static_cast<std::size_t>(v); }

// Exponent vector packed 9 bits per variable; the integer order is the canonical term order.
class Monomial {
 public:
  static constexpr unsigned kBits = 9;
  static constexpr unsigned kMaxExponent = (1u << kBits) - 1;

  constexpr Monomial() = default;
  static Monomial of(Var v, unsigned e = 1);

  unsigned exponent(Var v) const {
    return static_cast<unsigned>((key_ >> (kBits * var_index(v))) & kMaxExponent);
  }
  Monomial with(Var v, unsigned e) const;
  unsigned total_degree() const;
  bool is_constant() const { return key_ == 0; }
  std::uint64_t key() const { return key_; }

  friend Monomial operator*(Monomial a, Monomial b);
  friend bool operator==(Monomial a, Monomial b) { return a.key_ == b.key_; }
  friend bool operator<(Monomial a, Monomial b) { return a.key_ < b.key_; }

 private:
  explicit constexpr Monomial(std::uint64_t key) : key_(key) {}
  std::uint64_t key_ = 0;
};

// Partial assignment of rationals to variables.
class Valuation {
 public:
  Valuation() = default;
  Valuation(std::initializer_list<std::pair<Var, Rational>> init);
  Valuation& set(Var v, Rational value);
  bool has(Var v) const { return present_[var_index(v)]; }
  const Rational& get(Var v) const;

 private:
  std::array<Rational, kNumVars> values_{};
  std::array<bool, kNumVars> present_{};
};

class RatPoly {
 public:
  using Term = std::pair<Monomial, Rational>;

  RatPoly() = default;
  RatPoly(const Rational& c);  // NOLINT: constants convert implicitly
  RatPoly(long c) : RatPoly(Rational(c)) {}  // NOLINT
  static RatPoly variable(Var v);
  static RatPoly term(const Rational& c, Monomial m);
  // Builds from arbitrary (possibly repeated, possibly zero) terms.
  static RatPoly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  Rational coefficient(Monomial m) const;
  unsigned degree(Var v) const;
  unsigned total_degree() const;
  bool uses(Var v) const { return degree(v) > 0; }
  std::vector<Var> variables() const;

  RatPoly& operator+=(const RatPoly& o);
  RatPoly& operator-=(const RatPoly& o);
  RatPoly& operator*=(const RatPoly& o);
  RatPoly& operator*=(const Rational& c);
  friend RatPoly operator+(RatPoly a, const RatPoly& b) { return a += b; }
  friend RatPoly operator-(RatPoly a, const RatPoly& b) { return a -= b; }
  friend RatPoly operator*(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(RatPoly a, const Rational& c) { return a *= c; }
  friend RatPoly operator*(const Rational& c, RatPoly a) { return a *= c; }
  RatPoly operator-() const;
  friend bool operator==(const RatPoly& a, const RatPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const RatPoly& a, const RatPoly& b) { return !(a == b); }

  RatPoly pow(unsigned e) const;

  // Every variable used by the polynomial must be set.
  Rational evaluate(const Valuation& at) const;
  // Substitutes the variables that are set; others remain symbolic.
  RatPoly partial_evaluate(const Valuation& at) const;
  double evaluate_double(const std::array<double, kNumVars>& at) const;

  RatPoly substitute(Var v, const RatPoly& replacement) const;
  RatPoly derivative(Var v) const;
  // Antiderivative with zero constant of integration.
  RatPoly antiderivative(Var v) const;
  // Coefficients c_i with p = sum_i c_i v^i, c_i free of v.
  std::vector<RatPoly> coefficients_in(Var v) const;
  // Dense coefficients of a polynomial in v alone. Throws if another variable appears.
  std::vector<Rational> univariate_coefficients(Var v) const;
  static RatPoly from_univariate(Var v, const std::vector<Rational>& coeffs);

  // Canonical text "c * q^a x^b + ..." with c rendered as "N/D".
  std::string to_string() const;
  static RatPoly parse(std::string_view text);

 private:
  void normalize();
  std::vector<Term> terms_;  // strictly increasing monomials, nonzero coefficients
};

RatPoly integrate_definite(const RatPoly& p, Var v, const RatPoly& lower, const RatPoly& upper);

// Univariate root isolation.
struct RootInterval {
  Rational lower;
  Rational upper;
  bool exact() const { return lower == upper; }
  Rational width() const { return upper - lower; }
};

std::vector<RootInterval> isolate_real_roots(const RatPoly& p, const Rational& lo,
                                             const Rational& hi);
// Shrinks an isolating interval of p to width <= max_width; snaps to the simplest
// rational inside when it is an exact root.
RootInterval refine_root(const RatPoly& p, RootInterval root, const Rational& max_width);

// Simplest rational (smallest denominator) in the closed interval [lo, hi].
Rational simplest_rational_between(const Rational& lo, const Rational& hi);

// Positivity certification.
struct Interval {
  Rational lower;
  Rational upper;
};

class Box {
 public:
  Box() = default;
  Box& set(Var v, Rational lower, Rational upper);
  bool has(Var v) const;
  const Interval& get(Var v) const;
  const std::vector<std::pair<Var, Interval>>& dims() const { return dims_; }

 private:
  std::vector<std::pair<Var, Interval>> dims_;
};

struct Certified {};
struct Counterexample {
  std::vector<std::pair<Var, Rational>> point;
  Rational value;
};
struct Inconclusive {
  int depth_reached = 0;
};
using PositivityVerdict = std::variant<Certified, Counterexample, Inconclusive>;

std::string verdict_name(const PositivityVerdict& v);

struct CertifyOptions {
  int max_depth = 12;
  int hunt_steps = 32;   // pre-pass grid resolution per variable, 0 disables
  long max_leaves = 2'000'000;
};

PositivityVerdict certify_nonnegative(const RatPoly& p, const Box& box,
                                      const CertifyOptions& opts = {});
PositivityVerdict certify_nonnegative(const RatPoly& p, const Box& box, int max_depth);

// Nonnegativity of p(u0, u1, q) over a convex polygon in (u0, u1) times an
// interval of q: fan triangulation, Bernstein form on triangle x interval,
// bisection of the longest edge or of the interval.
using Point2 = std::array<Rational, 2>;
PositivityVerdict certify_nonnegative_on_prism(const RatPoly& p, Var u0, Var u1,
                                               const std::vector<Point2>& polygon, Var q,
                                               const Interval& q_range, const CertifyOptions& opts = {});

// Dense univariate helpers; index i holds the coefficient of v^i.
using Dense = std::vector<Rational>;
Dense taylor_shift(const Dense& p, const Rational& a, const Rational& h);  // p(a + h*u)
// Bernstein coefficients of degree deg (>= degree of p) on [lo, hi].
Dense bernstein_coefficients(const Dense& power, const Rational& lo, const Rational& hi,
                             std::size_t deg);
Rational evaluate_dense(const Dense& p, const Rational& at);

}  // namespace fnvcg
