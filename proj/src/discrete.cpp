// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/expectation.hpp"

#include <functional>
#include <stdexcept>

namespace fnvcg {

namespace {

// Calls visit(counts) for each multiset of `size` items over `m` kinds, in
// lexicographic order of the count vector.
void for_each_multiset(std::size_t m, int size, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> counts(m, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == m) {
      counts[i] = left;
      visit(counts);
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  if (m == 0) {
    if (size == 0) visit(counts);
    return;
  }
  rec(0, size);
}

// Multinomial coefficient times product of probabilities.
Rational multiset_weight(const std::vector<int>& counts, const std::vector<Atom>& atoms) {
  int total = 0;
  Rational w = 1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    total += counts[i];
    w *= rational_pow(atoms[i].prob, static_cast<unsigned>(counts[i]));
    w /= Rational(factorial(static_cast<unsigned>(counts[i])));
  }
  return w * Rational(factorial(static_cast<unsigned>(total)));
}

double multiset_count(std::size_t m, int size) {
  return binomial(static_cast<unsigned>(size + m - 1), static_cast<unsigned>(size)).get_d();
}

}  // namespace

std::vector<Rational> discrete_diff_by_k(const TypeModel& model, const Scenario& s,
                                         const EnumerationGuard& guard) {
  validate(s);
  if (!s.attack) throw std::invalid_argument("difference needs an attack scenario");
  const auto* d1 = std::get_if<DiscreteDist>(&model.f1);
  const auto* d2 = std::get_if<DiscreteDist>(&model.f2);
  if (!d1 || !d2) throw std::invalid_argument("enumeration needs discrete distributions");
  const int nt = s.n_tilde();
  double terms = 0;
  for (int k = 0; k <= nt; ++k) {
    terms += multiset_count(d1->atoms.size(), k) * multiset_count(d2->atoms.size(), nt - k);
  }
  if (terms > guard.max_terms) {
    throw std::length_error("enumeration would visit " + std::to_string(static_cast<long long>(terms)) +
                            " adversary multisets, above the guard");
  }
  const Bid truth = s.true_type();
  const BidProfile own_truth{truth};
  const BidProfile own_attack = s.own_bids();
  std::vector<Rational> per_k;
  for (int k = 0; k <= nt; ++k) {
    Rational acc = 0;
    for_each_multiset(d1->atoms.size(), k, [&](const std::vector<int>& c1) {
      Rational w1 = multiset_weight(c1, d1->atoms);
      BidProfile adv;
      for (std::size_t i = 0; i < c1.size(); ++i) {
        for (int r = 0; r < c1[i]; ++r) adv.push_back({1, d1->atoms[i].value});
      }
      const std::size_t ones = adv.size();
      for_each_multiset(d2->atoms.size(), nt - k, [&](const std::vector<int>& c2) {
        Rational w = w1 * multiset_weight(c2, d2->atoms);
        adv.resize(ones);
        for (std::size_t i = 0; i < c2.size(); ++i) {
          for (int r = 0; r < c2[i]; ++r) adv.push_back({2, d2->atoms[i].value});
        }
        Rational diff = focal_utility(truth, own_truth, adv) - focal_utility(truth, own_attack, adv);
        if (diff != 0) acc += w * diff;
      });
    });
    per_k.push_back(acc);
  }
  return per_k;
}

RatPoly discrete_expected_diff(const TypeModel& model, const Scenario& s,
                               const EnumerationGuard& guard) {
  return binomial_mixture(discrete_diff_by_k(model, s, guard));
}

}  // namespace fnvcg
