// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fnvcg/distributions.hpp"
#include "fnvcg/mechanism.hpp"
#include "fnvcg/polynomial.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fnvcg {

// A true type (demand, theta) facing n-1 adversaries, bidding either truthfully
// or with the two-identity attack (1,x),(1,y), y <= x.
struct Scenario {
  int demand = 1;
  Rational theta = 1;
  bool attack = false;
  Rational x = 0;
  Rational y = 0;
  int n = 2;

  int n_tilde() const { return n - 1; }
  Scenario truthful() const;
  BidProfile own_bids() const;
  Bid true_type() const { return {demand, theta}; }
};

Scenario make_attack(int demand, Rational theta, Rational x, Rational y, int n);
Scenario make_truthful(int demand, Rational theta, int n);
// True type (2,1) bidding (1,1),(1,1).
Scenario split_attack(int n);
void validate(const Scenario& s);
std::string describe(const Scenario& s);

struct TopStats {
  Rational w1 = 0;
  Rational v1 = 0;
  Rational v2 = 0;
};

TopStats top_stats(const BidProfile& adversaries);

// Utility of the scenario's strategy as a function of the adversaries' top
// order statistics (absent values are 0).
Rational reduced_utility(const Scenario& s, const TopStats& stats);
Rational reduced_truth_utility(int demand, const Rational& theta, const TopStats& stats);
Rational reduced_attack_utility(int demand, const Rational& theta, const Rational& x,
                                const Rational& y, const TopStats& stats);

struct DiffByK {
  int n = 2;
  std::vector<Rational> per_k;  // truth minus attack, k = 0..n-1
  RatPoly q_poly;
};

// Expected utility of the scenario's strategy given exactly k 1-type adversaries.
Rational expected_utility_given_k(const Scenario& s, const BetaDist& dist, int k);
Rational expected_diff_given_k(const Scenario& s, const BetaDist& dist, int k);
DiffByK expected_diff_poly_q(const Scenario& s, const BetaDist& dist);
// sum_k C(nt,k) q^k (1-q)^(nt-k) per_k[k]
RatPoly binomial_mixture(const std::vector<Rational>& per_k);
RatPoly binomial_mixture(const std::vector<RatPoly>& per_k);

// Truth minus attack as a polynomial in q by exact enumeration of adversary
// multisets. Requires discrete f1 and f2.
struct EnumerationGuard {
  double max_terms = 1e7;
};
RatPoly discrete_expected_diff(const TypeModel& model, const Scenario& s,
                               const EnumerationGuard& guard = {});
// Per-k version: coefficient list c_k with diff = sum C(nt,k) q^k (1-q)^(nt-k) c_k.
std::vector<Rational> discrete_diff_by_k(const TypeModel& model, const Scenario& s,
                                         const EnumerationGuard& guard = {});

// Closed form of the uniform split-attack difference given k 1-types.
Rational uniform_split_closed_form(int n_tilde, int k);

}  // namespace fnvcg
