// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/thresholds.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace fnvcg;

namespace {

Rational r(const char* s) { return parse_rational(s); }
Rational at_q(const RatPoly& p, const Rational& q) { return p.evaluate(Valuation{{Var::q, q}}); }

const ValueDistribution kExample6 = make_discrete({{1, r("1/2")}, {r("1/10"), r("1/2")}});

void check_contains(const RootInterval& iv, double value, double tol) {
  CHECK(to_double(iv.lower) <= value + tol);
  CHECK(to_double(iv.upper) >= value - tol);
  CHECK(iv.width() <= r("1/1000000000000"));
}

void check_certificate_signs(const ThresholdCertificate& c) {
  const Rational step = r("1/1000");
  CHECK(at_q(c.q_poly, 1) >= 0);
  if (c.q_star.upper + step <= 1) CHECK(at_q(c.q_poly, c.q_star.upper + step) >= 0);
  if (c.q_star.lower > 0 && c.q_star.lower - step >= 0) CHECK(at_q(c.q_poly, c.q_star.lower - step) < 0);
}

}  // namespace

TEST_CASE("largest sign change") {
  // (q - 1/2)(q - 1/4): negative on (1/4, 1/2), positive above.
  RatPoly p = RatPoly::parse("1 * q^2 - 3/4 * q + 1/8");
  auto qb = largest_sign_change(p);
  CHECK(qb.value.exact());
  CHECK(qb.value.lower == r("1/2"));
  CHECK(qb.roots.size() == 2);
  // Double root at 1/2: nonnegative everywhere.
  CHECK(largest_sign_change(RatPoly::parse("1 * q^2 - 1 * q + 1/4")).value.upper == 0);
  CHECK(largest_sign_change(RatPoly(0)).value.upper == 0);
  CHECK(largest_sign_change(RatPoly(1)).value.upper == 0);
  // Negative at 1 cannot happen for real thresholds, but the answer is then 1.
  CHECK(largest_sign_change(RatPoly::parse("1 * q - 2")).value.lower == 1);
}

TEST_CASE("fixed-attack thresholds") {
  auto u = qstar_fixed_attack(split_attack(3), BetaDist{});
  CHECK(u.q_star.exact());
  CHECK(u.q_star.lower == r("1/2"));
  check_certificate_signs(u);

  auto e6 = qstar_fixed_attack(split_attack(3), kExample6);
  check_contains(e6.q_star, (6 - std::sqrt(34.0)) / 2, 1e-9);
  check_certificate_signs(e6);

  auto e6b = qstar_fixed_attack(make_attack(1, 1, 1, r("1/5"), 3), kExample6);
  check_contains(e6b.q_star, (5 - std::sqrt(15.0)) / 5, 1e-9);
  check_certificate_signs(e6b);

  auto b21 = qstar_fixed_attack(split_attack(3), BetaDist{2, 1});
  CHECK(std::abs(to_double(b21.q_star.lower) - 0.4525) <= 5e-4);
  check_certificate_signs(b21);

  // Truthful play against itself: the difference is identically zero.
  auto zero = qstar_fixed_attack(make_attack(1, 1, 1, 1, 3), make_discrete({{0, 1}}));
  CHECK(zero.q_star.upper == 0);
}

TEST_CASE("fixed-attack certificate signs on random attacks") {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 40; ++it) {
    Rational x = make_rational(static_cast<long>(rng() % 21), 20);
    Rational y = make_rational(static_cast<long>(rng() % 21), 20);
    if (y > x) std::swap(x, y);
    int demand = 1 + static_cast<int>(rng() % 2);
    Rational theta = demand == 1 ? Rational(1) : make_rational(1 + static_cast<long>(rng() % 20), 20);
    auto c = qstar_fixed_attack(make_attack(demand, theta, x, y, 3 + static_cast<int>(rng() % 3)),
                                BetaDist{1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2)});
    check_certificate_signs(c);
  }
}

TEST_CASE("global certification") {
  auto ok = qstar_global(BetaDist{}, 3, r("1/2"));
  CHECK(verdict_name(*ok.verification) == "Certified");
  auto b21 = qstar_global(BetaDist{2, 1}, 3, r("0.4530"));
  CHECK(verdict_name(*b21.verification) == "Certified");

  auto bad = qstar_global(BetaDist{}, 3, r("0.40"));
  REQUIRE(std::holds_alternative<Counterexample>(*bad.verification));
  REQUIRE(bad.falsification.has_value());
  CHECK(bad.falsification->value < 0);
  Rational q = -1;
  for (const auto& [v, val] : bad.falsification->point)
    if (v == Var::q) q = val;
  CHECK(q >= r("0.40"));
  CHECK(q < r("1/2"));
}

TEST_CASE("global certificates are monotone in q_guess") {
  for (const char* g : {"3/5", "4/5", "1"}) {
    CAPTURE(g);
    CHECK(verdict_name(*qstar_global(BetaDist{}, 3, r(g)).verification) == "Certified");
  }
  CHECK(verdict_name(*qstar_global(BetaDist{2, 1}, 3, r("1/2")).verification) == "Certified");
}

TEST_CASE("impossibility witnesses") {
  CHECK_THROWS(impossibility_witness(1, 5));
  CHECK_THROWS(impossibility_witness(r("1/2"), 2));
  for (const char* qs : {"3/10", "3/5", "9/10", "99/100", "1/2"})
    for (int n : {3, 4, 6}) {
      Rational q = r(qs);
      auto w = impossibility_witness(q, n);
      CAPTURE(qs);
      CAPTURE(n);
      CHECK(w.diff < 0);
      CHECK(w.epsilon > 0);
      CHECK(epsilon_admissible(w.epsilon, q, n));
      auto b = epsilon_bounds(q, n);
      for (double bound : b) CHECK(to_double(w.epsilon) <= bound);
      // Independent recomputation of the witness value.
      CHECK(at_q(discrete_expected_diff(make_model(q, w.distribution), w.attack), q) == w.diff);
      REQUIRE(w.distribution.atoms.size() == 3);
      CHECK(w.distribution.atoms[0].value == r("1/2"));
      CHECK(w.distribution.atoms[1].prob == 1 - 2 * w.epsilon);
    }
}

TEST_CASE("best attack search") {
  auto split = best_attack_search(2, 1, BetaDist{}, 3, r("9/20"), r("1/20"));
  CHECK(split.best_x == 1);
  CHECK(split.best_y == 1);
  CHECK(split.best_diff > 0);
  CHECK(split.evaluated == 231);
  for (const auto& p : split.beneficial) CHECK(p.gain <= split.best_diff);

  auto e7 = best_attack_search(1, 1, kExample6, 3, r("3/20"), r("1/20"));
  bool found = false;
  for (const auto& p : e7.beneficial) found |= p.x == 1 && p.y == r("1/5");
  CHECK(found);
  CHECK(at_q(diff_polynomial(split_attack(3), kExample6), r("3/20")) >= 0);

  for (int demand : {1, 2}) {
    CHECK(best_attack_search(demand, 1, BetaDist{}, 3, 1, r("1/10")).beneficial.empty());
    CHECK(best_attack_search(demand, 1, kExample6, 4, 1, r("1/10")).beneficial.empty());
  }
  CHECK_THROWS(best_attack_search(1, 1, BetaDist{}, 3, r("1/2"), r("1/3")));
}

TEST_CASE("two bidders: no beneficial attack at q = 2/3 for random discrete laws") {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 100; ++it) {
    const int atoms = 1 + static_cast<int>(rng() % 4);
    std::vector<Atom> law;
    std::vector<long> weights;
    long total = 0;
    std::set<long> used;
    for (int a = 0; a < atoms; ++a) {
      long v = 1 + static_cast<long>(rng() % 32);
      if (!used.insert(v).second) continue;
      weights.push_back(1 + static_cast<long>(rng() % 9));
      total += weights.back();
      law.push_back({make_rational(v, 32), 0});
    }
    for (std::size_t i = 0; i < law.size(); ++i) law[i].prob = make_rational(weights[i], total);
    ValueDistribution d = make_discrete(law);
    for (int demand : {1, 2}) {
      auto rep = best_attack_search(demand, 1, d, 2, r("2/3"), r("1/32"));
      CAPTURE(to_string(d));
      CAPTURE(demand);
      CHECK(rep.beneficial.empty());
    }
  }
}
