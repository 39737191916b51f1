// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/expectation.hpp"
#include "fnvcg/polynomial.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fnvcg;

namespace {

RatPoly var(Var v) { return RatPoly::variable(v); }

RatPoly random_poly(std::mt19937_64& rng, std::vector<Var> vars, unsigned max_deg) {
  std::vector<RatPoly::Term> terms;
  const int count = 1 + static_cast<int>(rng() % 8);
  for (int i = 0; i < count; ++i) {
    Monomial m;
    unsigned budget = max_deg;
    for (Var v : vars) {
      unsigned e = static_cast<unsigned>(rng() % (budget + 1));
      m = m.with(v, e);
      budget -= e;
    }
    terms.emplace_back(m, make_rational(static_cast<long>(rng() % 21) - 10, 1 + static_cast<long>(rng() % 7)));
  }
  return RatPoly::from_terms(std::move(terms));
}

// Sturm count of distinct real roots in (lo, hi], independent of the
// Descartes isolation used by the library.
int sturm_count(const RatPoly& p, const Rational& lo, const Rational& hi) {
  using D = std::vector<Rational>;
  auto trim = [](D a) {
    while (!a.empty() && sgn(a.back()) == 0) a.pop_back();
    return a;
  };
  auto rem = [&](D a, const D& b) {
    a = trim(a);
    while (a.size() >= b.size() && !a.empty()) {
      Rational f = a.back() / b.back();
      std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
      a = trim(a);
    }
    return a;
  };
  D p0 = trim(p.univariate_coefficients(Var::q));
  D p1;
  for (std::size_t i = 1; i < p0.size(); ++i) p1.push_back(p0[i] * static_cast<long>(i));
  std::vector<D> seq{p0};
  if (!trim(p1).empty()) seq.push_back(trim(p1));
  while (seq.size() >= 2) {
    D r = rem(seq[seq.size() - 2], seq.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    seq.push_back(r);
  }
  auto variations = [&](const Rational& at) {
    int count = 0, last = 0;
    for (const auto& s : seq) {
      Rational v = 0;
      for (std::size_t i = s.size(); i-- > 0;) v = v * at + s[i];
      int sg = sgn(v);
      if (sg == 0) continue;
      if (last != 0 && sg != last) ++count;
      last = sg;
    }
    return count;
  };
  return variations(lo) - variations(hi);
}

}  // namespace

TEST_CASE("canonical text form round-trips") {
  RatPoly p = RatPoly::parse("-1/3 * q^2 + 7/6 * q^1 - 1/2");
  CHECK(p.to_string() == "-1/3 * q^2 + 7/6 * q^1 - 1/2");
  CHECK(RatPoly::parse(p.to_string()) == p);
  RatPoly r = var(Var::x) * var(Var::y) * Rational(3) - var(Var::t).pow(2) + RatPoly(make_rational(1, 5));
  CHECK(RatPoly::parse(r.to_string()) == r);
  CHECK(RatPoly().to_string() == "0");
}

TEST_CASE("ring laws hold exactly on random polynomials") {
  std::mt19937_64 rng(1);
  const std::vector<Var> vars{Var::x, Var::y, Var::q};
  for (int i = 0; i < 200; ++i) {
    RatPoly p = random_poly(rng, vars, 6), r = random_poly(rng, vars, 6), s = random_poly(rng, vars, 6);
    CHECK((p + r) * s == p * s + r * s);
    CHECK(p * r == r * p);
    CHECK((p - p).is_zero());
    CHECK(p.pow(2) == p * p);
  }
}

TEST_CASE("integrate_definite examples") {
  RatPoly x = var(Var::x), y = var(Var::y), v1 = var(Var::v1);
  CHECK(integrate_definite(v1, Var::v1, 0, x) == x * x * make_rational(1, 2));
  CHECK(integrate_definite(RatPoly(1), Var::w1, (y + v1) * make_rational(1, 2), (x + v1) * make_rational(1, 2)) ==
        (x - y) * make_rational(1, 2));
  CHECK(integrate_definite(var(Var::v2) * Rational(2), Var::v2, 0, 1) == RatPoly(1));
  CHECK_THROWS_AS(integrate_definite(v1, Var::v1, 0, v1), std::invalid_argument);
}

TEST_CASE("integration inverts differentiation") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    RatPoly p = random_poly(rng, {Var::v1, Var::x, Var::y}, 5);
    RatPoly upper = var(Var::x);
    RatPoly integral = integrate_definite(p, Var::v1, 0, upper);
    // d/dx of the integral up to x is p with v1 replaced by x, plus the part
    // from x appearing in p itself; with p free of x this is exact.
    RatPoly q = p.substitute(Var::x, var(Var::y));
    RatPoly iq = integrate_definite(q, Var::v1, 0, upper);
    CHECK(iq.derivative(Var::x) == q.substitute(Var::v1, upper));
    CHECK(integral.substitute(Var::x, RatPoly(0)).is_zero());
  }
}

TEST_CASE("root isolation examples") {
  RatPoly q = var(Var::q);
  auto roots = isolate_real_roots(q * q * Rational(2) - q * Rational(7) + RatPoly(3), 0, 1);
  REQUIRE(roots.size() == 1);
  auto r = refine_root(q * q * Rational(2) - q * Rational(7) + RatPoly(3), roots[0], Rational("1/1000000000000"));
  CHECK(r.exact());
  CHECK(r.lower == make_rational(1, 2));

  RatPoly p = q * q - q * Rational(6) + RatPoly(make_rational(1, 2));
  roots = isolate_real_roots(p, 0, 1);
  REQUIRE(roots.size() == 1);
  r = refine_root(p, roots[0], Rational("1/1000000000000"));
  CHECK(r.width() <= Rational("1/1000000000000"));
  // (6 - sqrt(34)) / 2
  CHECK(to_double(r.lower) == doctest::Approx(0.0845241).epsilon(1e-6));
  CHECK(r.lower * r.lower - 6 * r.lower + make_rational(1, 2) >= 0);
  CHECK(r.upper * r.upper - 6 * r.upper + make_rational(1, 2) <= 0);

  roots = isolate_real_roots(q, 0, 1);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].exact());
  CHECK(roots[0].lower == 0);
  CHECK_THROWS(isolate_real_roots(RatPoly(), 0, 1));
}

TEST_CASE("root isolation agrees with Sturm counts") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const unsigned deg = 1 + static_cast<unsigned>(rng() % 12);
    std::vector<Rational> c(deg + 1);
    for (auto& x : c) x = make_rational(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 9));
    if (sgn(c.back()) == 0) c.back() = 1;
    // Plant a few roots inside [0,1] sometimes.
    RatPoly p = RatPoly::from_univariate(Var::q, c);
    if (i % 3 == 0) p *= (var(Var::q) - RatPoly(make_rational(1, 3))) * (var(Var::q) - RatPoly(make_rational(5, 7)));
    auto roots = isolate_real_roots(p, 0, 1);
    // Sturm counts (0, 1]; add the root at 0 separately.
    int expected = sturm_count(p, 0, 1) + (sgn(p.evaluate(Valuation{{Var::q, 0}})) == 0 ? 1 : 0);
    CHECK(static_cast<int>(roots.size()) == expected);
    for (const auto& r : roots) {
      if (r.exact()) {
        CHECK(sgn(p.evaluate(Valuation{{Var::q, r.lower}})) == 0);
      } else {
        // Exactly one root in the open interval.
        int at_upper = sgn(p.evaluate(Valuation{{Var::q, r.upper}})) == 0 ? 1 : 0;
        CHECK(sturm_count(p, r.lower, r.upper) - at_upper == 1);
      }
      auto fine = refine_root(p, r, Rational("1/1000000000000"));
      CHECK(fine.width() <= Rational("1/1000000000000"));
      CHECK(fine.lower >= r.lower);
      CHECK(fine.upper <= r.upper);
    }
  }
}

TEST_CASE("simplest rational between") {
  CHECK(simplest_rational_between(make_rational(3, 10), make_rational(4, 10)) == make_rational(1, 3));
  CHECK(simplest_rational_between(make_rational(1, 2), make_rational(1, 2)) == make_rational(1, 2));
  CHECK(simplest_rational_between(make_rational(9, 10), make_rational(11, 10)) == 1);
}

TEST_CASE("certify_nonnegative examples") {
  RatPoly x = var(Var::x), y = var(Var::y);
  Box box;
  box.set(Var::x, 0, 1).set(Var::y, 0, 1);
  CHECK(std::holds_alternative<Certified>(certify_nonnegative((x - y) * (x - y), box, 12)));
  CHECK(std::holds_alternative<Certified>(
      certify_nonnegative((x * Rational(3) - y * y + RatPoly(make_rational(1, 2))).pow(2), box, 12)));
  // Not a square, zero on the diagonal only from above: stays undecided or certified, never refuted.
  CHECK_FALSE(std::holds_alternative<Counterexample>(certify_nonnegative((x - y).pow(2) * x, box, 6)));

  Box bx;
  bx.set(Var::x, 0, 1);
  auto v = certify_nonnegative(x - RatPoly(make_rational(1, 2)), bx, 12);
  REQUIRE(std::holds_alternative<Counterexample>(v));
  const auto& ce = std::get<Counterexample>(v);
  CHECK(ce.value < 0);
  CHECK((x - RatPoly(make_rational(1, 2))).evaluate(Valuation{{Var::x, ce.point[0].second}}) == ce.value);
  CHECK(verdict_name(v) == "Counterexample");

  // A small positive minimum off the dyadic grid forces subdivision.
  RatPoly touch = (x - RatPoly(make_rational(1, 3))).pow(2) * Rational(4) + y * make_rational(1, 100) +
                  RatPoly(make_rational(1, 1000));
  CHECK(std::holds_alternative<Certified>(certify_nonnegative(touch, box, 12)));
  // Depth 0 with a polynomial that needs subdivision is Inconclusive.
  CertifyOptions shallow;
  shallow.max_depth = 0;
  shallow.hunt_steps = 0;
  CHECK(std::holds_alternative<Inconclusive>(certify_nonnegative(touch, box, shallow)));
}

TEST_CASE("certification is sound on random polynomials") {
  std::mt19937_64 rng(4);
  int certified = 0;
  for (int i = 0; i < 40; ++i) {
    RatPoly p = random_poly(rng, {Var::x, Var::y}, 4);
    // Shift up so that a fair share is nonnegative.
    p += RatPoly(make_rational(static_cast<long>(rng() % 30), 1));
    Box box;
    box.set(Var::x, 0, 1).set(Var::y, make_rational(-1, 2), 1);
    auto v = certify_nonnegative(p, box, 10);
    if (auto* ce = std::get_if<Counterexample>(&v)) {
      Valuation at;
      for (const auto& [var, val] : ce->point) at.set(var, val);
      CHECK(p.evaluate(at) == ce->value);
      CHECK(ce->value < 0);
      continue;
    }
    if (!std::holds_alternative<Certified>(v)) continue;
    ++certified;
    for (int j = 0; j < 250; ++j) {
      Rational a = make_rational(static_cast<long>(rng() % 1001), 1000);
      Rational b = make_rational(static_cast<long>(rng() % 1501) - 500, 1000);
      CHECK(p.evaluate(Valuation{{Var::x, a}, {Var::y, b}}) >= 0);
    }
  }
  CHECK(certified > 5);
}

TEST_CASE("uniform split-attack polynomial is nonnegative exactly above 1/2") {
  RatPoly p = expected_diff_poly_q(split_attack(3), make_beta(1, 1)).q_poly;
  Box box;
  box.set(Var::q, make_rational(1, 2), 1);
  CHECK(std::holds_alternative<Certified>(certify_nonnegative(p, box, 12)));
  Box below;
  below.set(Var::q, 0, make_rational(49, 100));
  CHECK(std::holds_alternative<Counterexample>(certify_nonnegative(p, below, 12)));
}

TEST_CASE("prism certification over triangles") {
  RatPoly x = var(Var::x), y = var(Var::y), q = var(Var::q);
  std::vector<Point2> tri{{0, 0}, {1, 0}, {1, 1}};
  // x - y >= 0 on the triangle y <= x; zero along the diagonal.
  CHECK(std::holds_alternative<Certified>(
      certify_nonnegative_on_prism((x - y) * q, Var::x, Var::y, tri, Var::q, {0, 1})));
  auto v = certify_nonnegative_on_prism(y - x * make_rational(1, 2), Var::x, Var::y, tri, Var::q, {0, 1});
  REQUIRE(std::holds_alternative<Counterexample>(v));
  CHECK(std::get<Counterexample>(v).value < 0);
  // Interior minimum at (2/3, 1/3), q free: value 1/100 > 0.
  RatPoly bowl = (x - RatPoly(make_rational(2, 3))).pow(2) + (y - RatPoly(make_rational(1, 3))).pow(2) +
                 RatPoly(make_rational(1, 100)) * q;
  CHECK(std::holds_alternative<Certified>(
      certify_nonnegative_on_prism(bowl, Var::x, Var::y, tri, Var::q, {make_rational(1, 2), 1})));
  std::vector<Point2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(std::holds_alternative<Counterexample>(
      certify_nonnegative_on_prism(x - y, Var::x, Var::y, square, Var::q, {0, 1})));
}

TEST_CASE("refinement ignores a neighbouring root on the interval endpoint") {
  // Bisection of [0,1] lands on the root 1/2, leaving (0,1/2) to isolate 1/4.
  RatPoly p = RatPoly::parse("1 * q^2 - 3/4 * q + 1/8");
  auto roots = isolate_real_roots(p, 0, 1);
  REQUIRE(roots.size() == 2);
  std::vector<Rational> refined;
  for (auto r : roots) {
    auto t = refine_root(p, r, Rational("1/1000000"));
    CHECK(t.exact());
    refined.push_back(t.lower);
  }
  CHECK(refined[0] == Rational("1/4"));
  CHECK(refined[1] == Rational("1/2"));
  // Irrational root next to a rational one: (q - 1/2)(q^2 - 1/8).
  RatPoly s = RatPoly::parse("1 * q^3 - 1/2 * q^2 - 1/8 * q + 1/16");
  for (auto r : isolate_real_roots(s, 0, 1)) {
    auto t = refine_root(s, r, Rational("1/1000000000"));
    if (!t.exact()) CHECK(std::abs(to_double(t.lower) - std::sqrt(0.125)) < 1e-9);
  }
  CHECK_THROWS(refine_root(p, RootInterval{Rational("3/5"), Rational("4/5")}, Rational("1/100")));
}
