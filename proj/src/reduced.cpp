// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/expectation.hpp"

#include <algorithm>
#include <stdexcept>

namespace fnvcg {

Scenario Scenario::truthful() const {
  Scenario s = *this;
  s.attack = false;
  s.x = 0;
  s.y = 0;
  return s;
}

BidProfile Scenario::own_bids() const {
  if (attack) return {{1, x}, {1, y}};
  return {{demand, theta}};
}

Scenario make_attack(int demand, Rational theta, Rational x, Rational y, int n) {
  Scenario s{demand, std::move(theta), true, std::move(x), std::move(y), n};
  validate(s);
  return s;
}

Scenario make_truthful(int demand, Rational theta, int n) {
  Scenario s{demand, std::move(theta), false, 0, 0, n};
  validate(s);
  return s;
}

Scenario split_attack(int n) { return make_attack(2, 1, 1, 1, n); }

void validate(const Scenario& s) {
  if (s.demand != 1 && s.demand != 2) throw std::invalid_argument("demand must be 1 or 2");
  if (s.theta < 0 || s.theta > 1) throw std::invalid_argument("theta must lie in [0,1]");
  if (s.n < 2) throw std::invalid_argument("n must be at least 2");
  if (s.attack) {
    if (s.y < 0 || s.x > 1 || s.y > s.x) throw std::invalid_argument("attack needs 0 <= y <= x <= 1");
  }
}

std::string describe(const Scenario& s) {
  std::string out = "true (" + std::to_string(s.demand) + "," + to_fraction_string(s.theta) + "), ";
  if (s.attack) {
    out += "attack (1," + to_fraction_string(s.x) + "),(1," + to_fraction_string(s.y) + ")";
  } else {
    out += "truthful";
  }
  return out + ", n=" + std::to_string(s.n);
}

TopStats top_stats(const BidProfile& adversaries) {
  TopStats st;
  for (const auto& b : adversaries) {
    if (b.demand == 2) {
      if (b.value > st.w1) st.w1 = b.value;
    } else if (b.value > st.v1) {
      st.v2 = st.v1;
      st.v1 = b.value;
    } else if (b.value > st.v2) {
      st.v2 = b.value;
    }
  }
  return st;
}

namespace {
void check(const TopStats& st) {
  if (st.v2 > st.v1) throw std::invalid_argument("top statistics need v2 <= v1");
}
}  // namespace

Rational reduced_truth_utility(int demand, const Rational& theta, const TopStats& st) {
  check(st);
  if (demand == 1) {
    // wins iff theta > v2 and theta + v1 > 2 w1; pays max(v2, 2 w1 - v1)
    Rational two_w = 2 * st.w1;
    if (theta < st.v2 || theta + st.v1 <= two_w) return 0;
    return theta - std::max(st.v2, Rational(two_w - st.v1));
  }
  Rational rival = std::max(Rational(st.v1 + st.v2), Rational(2 * st.w1));
  Rational u = 2 * theta - rival;
  return u > 0 ? u : Rational(0);
}

Rational reduced_attack_utility(int demand, const Rational& theta, const Rational& x,
                                const Rational& y, const TopStats& st) {
  check(st);
  if (y > x) throw std::invalid_argument("attack needs y <= x");
  const Rational two_w = 2 * st.w1;
  // zero bids never win: dropping them keeps welfare with fewer winners
  if (y > 0 && y >= st.v1) {
    // both identities among the top two single-item bids
    if (two_w >= x + y) return 0;
    Rational pay_x = std::max(two_w, Rational(y + st.v1)) - y;
    Rational pay_y = std::max(two_w, Rational(x + st.v1)) - x;
    return demand * theta - pay_x - pay_y;
  }
  if (x > 0 && x >= st.v2) {
    // only the x identity wins, alongside v1
    if (two_w >= x + st.v1) return 0;
    Rational pay_x = std::max(two_w, Rational(st.v1 + std::max(y, st.v2))) - st.v1;
    return (demand == 1 ? theta : Rational(0)) - pay_x;
  }
  return 0;
}

Rational reduced_utility(const Scenario& s, const TopStats& stats) {
  if (s.attack) return reduced_attack_utility(s.demand, s.theta, s.x, s.y, stats);
  return reduced_truth_utility(s.demand, s.theta, stats);
}

}  // namespace fnvcg
