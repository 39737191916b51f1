// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fnvcg/mechanism.hpp"
#include "fnvcg/polynomial.hpp"
#include "fnvcg/rational.hpp"
#include "fnvcg/rng.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fnvcg {

struct BetaDist {
  int alpha = 1;
  int beta = 1;
};

struct Atom {
  Rational value;
  Rational prob;
};

struct DiscreteDist {
  std::vector<Atom> atoms;  // strictly increasing values, probabilities sum to 1
};

using ValueDistribution = std::variant<BetaDist, DiscreteDist>;

struct TypeModel {
  Rational q;
  ValueDistribution f1;
  ValueDistribution f2;
};

BetaDist make_beta(int alpha, int beta);
// Sorts atoms by value; rejects duplicates, nonpositive probabilities and sums != 1.
DiscreteDist make_discrete(std::vector<Atom> atoms);
TypeModel make_model(Rational q, ValueDistribution f1, ValueDistribution f2);
TypeModel make_model(Rational q, const ValueDistribution& f);

// "beta:A,B", "uniform", "discrete:v1:p1,v2:p2,...".
ValueDistribution parse_distribution(std::string_view literal);
std::string to_string(const ValueDistribution& d);

struct PdfCdf {
  RatPoly pdf;
  RatPoly cdf;
};

PdfCdf beta_pdf_cdf(int alpha, int beta, Var v = Var::v1);
Dense beta_pdf_dense(int alpha, int beta);
Dense beta_cdf_dense(int alpha, int beta);

// Draws values on a fixed grid of numerators over `denominator`. Atoms of a
// discrete law are exact when their denominators divide it.
class ValueSampler {
 public:
  ValueSampler(const ValueDistribution& dist, std::int64_t denominator);

  std::int64_t draw_fixed(CounterRng& rng) const;
  std::int64_t denominator() const { return denominator_; }

 private:
  std::int64_t denominator_;
  int alpha_ = 1;
  int beta_ = 1;
  bool discrete_ = false;
  std::vector<double> cdf_;                 // general beta, power basis
  std::vector<std::uint64_t> thresholds_;   // discrete cumulative, on the 2^53 lattice
  std::vector<std::int64_t> numerators_;
};

// Exact numerator of r over `denominator`, rounded to nearest.
std::int64_t to_fixed(const Rational& r, std::int64_t denominator);

// Shared denominator for exact fixed-point Monte Carlo: the lcm of all atom and
// extra denominators when it fits below 2^53, else 2^53.
std::int64_t fixed_denominator(const TypeModel& model, const std::vector<Rational>& extra);

// Sampled value as an exact dyadic (beta) or atom (discrete) rational.
Rational sample_value(const ValueDistribution& dist, CounterRng& rng);

BasicProfile<std::int64_t> sample_adversary_profile_fixed(const TypeModel& model, int count,
                                                          const ValueSampler& f1,
                                                          const ValueSampler& f2,
                                                          CounterRng& rng);
BidProfile sample_adversary_profile(const TypeModel& model, int count, CounterRng& rng);

}  // namespace fnvcg
