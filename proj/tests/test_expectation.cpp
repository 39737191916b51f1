// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/expectation.hpp"

#include <doctest.h>

#include <random>

using namespace fnvcg;

namespace {

Rational r(const char* s) { return parse_rational(s); }
Rational at_q(const RatPoly& p, const Rational& q) { return p.evaluate(Valuation{{Var::q, q}}); }

Rational binom(int n, int k) {
  Rational c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Beta(a,b) discretised to m cells: atom at each cell midpoint carrying the cell's mass.
DiscreteDist grid_law(int a, int b, int m) {
  RatPoly cdf = beta_pdf_cdf(a, b).cdf;
  auto F = [&](const Rational& v) { return cdf.evaluate(Valuation{{Var::v1, v}}); };
  std::vector<Atom> atoms;
  for (int i = 0; i < m; ++i) {
    Rational p = F(make_rational(i + 1, m)) - F(make_rational(i, m));
    if (p > 0) atoms.push_back({make_rational(2 * i + 1, 2 * m), p});
  }
  return make_discrete(atoms);
}

BidProfile profile_of(const TopStats& st) {
  BidProfile p;
  if (st.w1 > 0) p.push_back({2, st.w1});
  if (st.v1 > 0) p.push_back({1, st.v1});
  if (st.v2 > 0) p.push_back({1, st.v2});
  return p;
}

}  // namespace

TEST_CASE("reduced utility examples agree with the mechanism") {
  TopStats none;
  CHECK(reduced_utility(make_truthful(1, 1, 3), none) == 1);
  TopStats a{r("1/5"), r("3/10"), r("1/10")};
  CHECK(reduced_utility(make_truthful(2, r("1/2"), 4), a) == r("3/5"));
  CHECK(focal_utility(Bid{2, r("1/2")}, BidProfile{{2, r("1/2")}}, profile_of(a)) == r("3/5"));
  TopStats b{r("9/10"), r("4/5"), r("1/10")};
  CHECK(reduced_utility(make_attack(2, 1, 1, 1, 4), b) == r("2/5"));
  CHECK(focal_utility(Bid{2, 1}, BidProfile{{1, 1}, {1, 1}}, profile_of(b)) == r("2/5"));
  CHECK_THROWS(reduced_utility(make_truthful(1, 1, 3), TopStats{0, r("1/10"), r("1/5")}));
  CHECK(top_stats(BidProfile{{1, r("0.3")}, {2, r("0.2")}, {1, r("0.7")}, {1, r("0.5")}, {2, r("0.6")}}).v2 ==
        r("0.5"));
}

TEST_CASE("scenario validation") {
  CHECK_THROWS(make_attack(1, 1, r("1/4"), r("1/2"), 3));
  CHECK_THROWS(make_attack(3, 1, 1, 1, 3));
  CHECK_THROWS(make_truthful(1, 1, 1));
  CHECK_THROWS(expected_diff_given_k(split_attack(3), BetaDist{}, 3));
  CHECK_THROWS(expected_diff_given_k(split_attack(3), BetaDist{}, -1));
}

TEST_CASE("reduced utility equals the mechanism on random profiles") {
  std::mt19937_64 rng(21);
  auto rnd = [&](long den) { return make_rational(static_cast<long>(rng() % (den + 1)), den); };
  int checked = 0;
  while (checked < 20000) {
    int demand = 1 + static_cast<int>(rng() % 2);
    Rational theta = rnd(60), x = rnd(60), y = rnd(60);
    if (y > x) std::swap(x, y);
    BidProfile adv;
    const int size = static_cast<int>(rng() % 7);
    for (int i = 0; i < size; ++i) adv.push_back({1 + static_cast<int>(rng() % 2), rnd(60)});
    BidProfile truth{{demand, theta}}, atk{{1, x}, {1, y}};
    truth.insert(truth.end(), adv.begin(), adv.end());
    atk.insert(atk.end(), adv.begin(), adv.end());
    if (has_welfare_tie(truth) || has_welfare_tie(atk)) continue;
    ++checked;
    TopStats st = top_stats(adv);
    CHECK(reduced_truth_utility(demand, theta, st) == focal_utility(Bid{demand, theta}, BidProfile{{demand, theta}}, adv));
    CHECK(reduced_attack_utility(demand, theta, x, y, st) ==
          focal_utility(Bid{demand, theta}, BidProfile{{1, x}, {1, y}}, adv));
  }
}

TEST_CASE("uniform split attack per-k values") {
  auto s = split_attack(3);
  CHECK(expected_diff_given_k(s, BetaDist{}, 2) == r("1/3"));
  CHECK(expected_diff_given_k(s, BetaDist{}, 0) == r("-1/2"));
  CHECK(expected_diff_given_k(s, BetaDist{}, 1) == r("1/12"));
  auto d = expected_diff_poly_q(s, BetaDist{});
  CHECK(d.q_poly == RatPoly::parse("-1/3 * q^2 + 7/6 * q - 1/2"));
  CHECK(d.q_poly == binomial_mixture(d.per_k));
}

TEST_CASE("n=2 split attack by hand integration") {
  // k=1: truth pays v1, attack pays 2 v1. k=0: truth pays 2 w1, attack pays 2 max(0, 2 w1 - 1).
  auto s = split_attack(2);
  CHECK(expected_diff_given_k(s, BetaDist{}, 1) == r("1/2"));
  CHECK(expected_diff_given_k(s, BetaDist{}, 0) == r("-1/2"));
  // Beta(2,1): E[v1] = 2/3; E[max(0, 2w-1)] = int_{1/2}^1 (2w-1) 2w dw = 5/12.
  CHECK(expected_diff_given_k(s, BetaDist{2, 1}, 1) == r("2/3"));
  CHECK(expected_diff_given_k(s, BetaDist{2, 1}, 0) == (2 - r("4/3")) - (2 - r("5/6")));
}

TEST_CASE("uniform split closed form") {
  CHECK(uniform_split_closed_form(2, 2) == r("1/3"));
  CHECK(uniform_split_closed_form(2, 0) == r("-1/2"));
  CHECK(uniform_split_closed_form(2, 1) == r("1/12"));
  Rational sum2 = 0;
  for (int k = 0; k <= 2; ++k) sum2 += binom(2, k) * uniform_split_closed_form(2, k);
  CHECK(sum2 == 0);
  CHECK_THROWS(uniform_split_closed_form(1, 0));
  CHECK_THROWS(uniform_split_closed_form(3, 4));
  for (int nt = 2; nt <= 11; ++nt)
    for (int k : {0, 1, nt})
      CHECK(uniform_split_closed_form(nt, k) == expected_diff_given_k(split_attack(nt + 1), BetaDist{}, k));
  // The general case (2 <= k < n_tilde) does not reproduce the integral: 11/24 against 1/8.
  CHECK(uniform_split_closed_form(3, 2) == r("11/24"));
  CHECK(expected_diff_given_k(split_attack(4), BetaDist{}, 2) == r("1/8"));
}

TEST_CASE("split middle sums obey the recurrence in unnormalised form") {
  // M[nt] = sum_{k=2}^{nt-1} C(nt,k) F(nt,k) with F from integration. Because the full
  // binomial sum vanishes, -M[nt] = F(nt,0) + nt F(nt,1) + F(nt,nt) and
  // -2(1+nt)(-M[nt]) + (2+nt)(-M[nt+1]) = -7 + 3 2^(1-nt) + 2 nt.
  std::vector<Rational> M(13);
  for (int nt = 2; nt <= 12; ++nt) {
    auto pk = expected_diff_poly_q(split_attack(nt + 1), BetaDist{}).per_k;
    for (int k = 2; k <= nt - 1; ++k) M[nt] += binom(nt, k) * pk[k];
    CHECK(-M[nt] == pk[0] + nt * pk[1] + pk[nt]);
  }
  for (int nt = 2; nt <= 11; ++nt)
    CHECK(-2 * (1 + nt) * -M[nt] + (2 + nt) * -M[nt + 1] == -7 + 3 * pow2(1 - nt) + 2 * nt);
}

TEST_CASE("integration vanishes at one half") {
  for (int n = 3; n <= 12; ++n) {
    auto d = expected_diff_poly_q(split_attack(n), BetaDist{});
    CHECK(at_q(d.q_poly, r("1/2")) == 0);
    CHECK(d.q_poly.degree(Var::q) <= static_cast<unsigned>(n - 1));
    CHECK(at_q(d.q_poly, 0) == d.per_k.front());
    CHECK(at_q(d.q_poly, 1) == d.per_k.back());
  }
}

TEST_CASE("discrete enumeration examples") {
  auto f = make_discrete({{1, r("1/2")}, {r("0.1"), r("1/2")}});
  auto ex = discrete_expected_diff(make_model(r("1/2"), f), split_attack(3));
  CHECK(ex == RatPoly::parse("-1/10 * q^2 + 3/5 * q - 1/20"));

  ValueDistribution zero = make_discrete({{0, 1}});
  CHECK(discrete_expected_diff(make_model(r("1/2"), zero), make_attack(2, 0, 0, 0, 4)).is_zero());

  EnumerationGuard small{1000};
  CHECK_THROWS(discrete_expected_diff(make_model(r("1/2"), grid_law(1, 1, 100)), split_attack(6), small));
}

TEST_CASE("different per-demand laws make the attack profitable for every q < 1") {
  for (const char* qs : {"1/2", "1/5", "9/10"}) {
    Rational q = r(qs);
    Rational eps = std::min(Rational(r("1/10") * (1 - q) / q), Rational(1));
    std::vector<Atom> atoms{{eps, 1 - eps}};
    if (eps < 1) atoms.push_back({r("1/2"), eps});
    if (eps == r("1/2")) atoms = {{r("1/2"), 1}};
    auto m = make_model(q, make_discrete(atoms), make_discrete({{r("1/5"), 1}}));
    Rational gain = -at_q(discrete_expected_diff(m, make_attack(2, r("1/5"), r("1/2"), r("1/2"), 2)), q);
    // Against a (1,1/2) adversary both own bids win two items worth 2/5 and pay 1 in total.
    CHECK(gain == (1 - q) * (r("24/100") + eps / 10));
    CHECK(gain > 0);
    if (q == r("1/2")) CHECK(gain == r("1/8"));
  }
}

TEST_CASE("per-k integration converges to the discretised oracle") {
  const int m = 32;
  struct Case {
    int a, b;
    Scenario s;
  };
  std::vector<Case> cases{{1, 1, split_attack(3)},
                          {2, 1, split_attack(3)},
                          {1, 2, make_attack(1, 1, r("3/5"), r("1/5"), 3)},
                          {2, 1, make_attack(1, 1, r("1/2"), r("1/2"), 3)},
                          {1, 1, make_attack(2, r("7/10"), r("3/4"), r("1/3"), 3)},
                          {1, 1, split_attack(4)},
                          {3, 2, make_attack(2, r("1/2"), r("1/2"), r("1/4"), 4)}};
  for (const auto& c : cases) {
    auto law = grid_law(c.a, c.b, m);
    auto oracle = discrete_diff_by_k(make_model(r("1/2"), law), c.s);
    for (int k = 0; k < c.s.n; ++k) {
      Rational exact = expected_diff_given_k(c.s, BetaDist{c.a, c.b}, k);
      CAPTURE(describe(c.s));
      CAPTURE(k);
      CHECK(abs(to_double(exact - oracle[k])) <= 4.0 / m);
    }
  }
}

TEST_CASE("q=1 resilience and monotonicity properties") {
  std::mt19937_64 rng(22);
  auto rnd = [&](long den) { return make_rational(static_cast<long>(rng() % (den + 1)), den); };
  for (int it = 0; it < 1000; ++it) {
    int demand = 1 + static_cast<int>(rng() % 2);
    Rational theta = demand == 1 ? Rational(1) : rnd(20);
    Rational x = rnd(20), y = rnd(20);
    if (y > x) std::swap(x, y);
    int n = 2 + static_cast<int>(rng() % 8);
    BetaDist d{1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2)};
    CHECK(expected_diff_given_k(make_attack(demand, theta, x, y, n), d, n - 1) >= 0);
  }
  for (BetaDist d : {BetaDist{1, 1}, BetaDist{2, 1}})
    for (int n = 3; n <= 9; ++n) {
      auto pk = expected_diff_poly_q(split_attack(n), d).per_k;
      for (int k = 0; k + 1 < n; ++k) CHECK(pk[k + 1] >= pk[k]);
    }
}

// The acceptance binary runs the same grid up to n = 9.
TEST_CASE("demand-1 claims on a 32x32 grid") {
  for (int n = 3; n <= 5; ++n) {
    const int nt = n - 1;
    for (int i = 0; i <= 32; ++i)
      for (int j = 0; j <= i; ++j) {
        auto s = make_attack(1, 1, make_rational(i, 32), make_rational(j, 32), n);
        std::vector<Rational> pk(n);
        for (int k = 0; k < n; ++k) pk[k] = expected_diff_given_k(s, BetaDist{}, k);
        for (int k = 1; k <= nt; ++k) CHECK(pk[k] >= 0);
        CHECK(pk[0] + nt * pk[1] + pk[nt] >= 0);
      }
  }
}

TEST_CASE("n=2 pointwise suites through the mechanism") {
  const int g = 64;
  for (int a = 0; a <= g; ++a) {
    Rational th = make_rational(a, g);
    for (int i = 0; i <= g; ++i)
      for (int j = 0; j <= i; ++j) {
        Rational x = make_rational(i, g), y = make_rational(j, g);
        BidProfile atk{{1, x}, {1, y}};
        for (int demand : {1, 2}) {
          Bid type{demand, 1};
          auto gap = [&](int adv_demand) -> Rational {
            BidProfile adv{{adv_demand, th}};
            return focal_utility(type, BidProfile{type}, adv) - focal_utility(type, atk, adv);
          };
          Rational weighted = (demand == 1 ? 1 : 2) * gap(1) + gap(2);
          CHECK(weighted >= 0);
        }
      }
  }
}
