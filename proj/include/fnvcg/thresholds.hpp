// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fnvcg/chambers.hpp"
#include "fnvcg/distributions.hpp"
#include "fnvcg/expectation.hpp"
#include "fnvcg/polynomial.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fnvcg {

// Truth-minus-attack as an exact polynomial in q, from the beta pipeline or
// discrete enumeration (F1 = F2 = dist).
RatPoly diff_polynomial(const Scenario& s, const ValueDistribution& dist, const EnumerationGuard& guard = {});

// Largest q_bar in [0,1] such that p >= 0 on (q_bar, 1]; 0 if p >= 0 on [0,1].
struct QBar {
  RootInterval value;                // exact when lower == upper
  std::vector<RootInterval> roots;   // all roots in [0,1], refined
};
QBar largest_sign_change(const RatPoly& p, const Rational& width = Rational("1/1000000000000"));

struct SliceReport {
  int demand = 1;
  std::string slice;
  std::size_t walls = 0;
  std::size_t chambers = 0;
  std::size_t distinct_polynomials = 0;
  std::string verdict;
  double seconds = 0;
};

struct ThresholdCertificate {
  enum class Scope { FixedAttack, Global };
  Scope scope = Scope::FixedAttack;
  int n = 2;
  std::string dist;
  RootInterval q_star;
  // FixedAttack
  std::optional<Scenario> scenario;
  RatPoly q_poly;
  std::vector<RootInterval> roots;
  // Global
  std::optional<PositivityVerdict> verification;
  std::vector<SliceReport> slices;
  // A point with negative difference; for Global, (t, x, y, q) and the
  // difference recomputed directly at that point.
  std::optional<Counterexample> falsification;
  double seconds = 0;
};

ThresholdCertificate qstar_fixed_attack(const Scenario& s, const ValueDistribution& dist,
                                        const EnumerationGuard& guard = {});

struct GlobalOptions {
  CertifyOptions certify;
  InterpolationOptions interpolation;
  int hunt_steps = 32;  // pre-pass grid per parameter and in q
  int threads = 1;
};

ThresholdCertificate qstar_global(const BetaDist& dist, int n, const Rational& q_guess,
                                  const GlobalOptions& opts = {});

struct ImpossibilityWitness {
  Rational q;
  int n = 3;
  Rational epsilon;
  DiscreteDist distribution;
  Scenario attack;
  Rational diff;  // truth minus attack, negative
};

// Upper bounds on epsilon; the root-based ones only in double precision.
std::array<double, 4> epsilon_bounds(const Rational& q, int n);
// Exact check of epsilon against all four bounds.
bool epsilon_admissible(const Rational& eps, const Rational& q, int n);
ImpossibilityWitness impossibility_witness(const Rational& q, int n);

struct AttackPoint {
  Rational x;
  Rational y;
  Rational gain;  // attack minus truth
};

struct AttackSearchReport {
  Rational best_x;
  Rational best_y;
  Rational best_diff;  // attack-minus-truth gain at the best point
  Rational grid_step;
  std::vector<AttackPoint> beneficial;
  std::size_t evaluated = 0;
};

AttackSearchReport best_attack_search(int demand, const Rational& theta, const ValueDistribution& dist, int n,
                                      const Rational& q, const Rational& grid_step,
                                      const EnumerationGuard& guard = {});

}  // namespace fnvcg
