// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fnvcg/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fnvcg {

// Single-minded bid: `demand` identical items at `value` per item.
// V is Rational for exact analysis or an integer numerator over a shared
// denominator (Monte Carlo); both are exact.
template <typename V>
struct BasicBid {
  int demand = 1;
  V value{};

  friend bool operator==(const BasicBid& a, const BasicBid& b) {
    return a.demand == b.demand && a.value == b.value;
  }
};

template <typename V>
using BasicProfile = std::vector<BasicBid<V>>;

template <typename V>
struct BasicOutcome {
  std::vector<std::size_t> winners;  // ascending
  std::vector<std::size_t> losers;   // ascending
  V welfare{};
  std::vector<V> payments;  // parallel to winners

  bool wins(std::size_t i) const {
    return std::find(winners.begin(), winners.end(), i) != winners.end();
  }
  V payment(std::size_t i) const {
    for (std::size_t k = 0; k < winners.size(); ++k) {
      if (winners[k] == i) return payments[k];
    }
    return V{};
  }
};

using Bid = BasicBid<Rational>;
using BidProfile = BasicProfile<Rational>;
using Outcome = BasicOutcome<Rational>;

struct FocalReport {
  Bid true_type;
  BidProfile own_bids;
};

void validate_bid(const Bid& b);
std::string to_string(const Bid& b);

namespace detail {

// Welfare-maximizing feasible set under the tie rule: fewest winners, then the
// lexicographically smallest sorted index list. `skip` removes one bid.
template <typename V>
struct Allocation {
  V welfare{};
  std::size_t count = 0;
  std::size_t idx[2] = {0, 0};
};

template <typename V>
Allocation<V> allocate(const BasicProfile<V>& bids, std::optional<std::size_t> skip) {
  const std::size_t none = static_cast<std::size_t>(-1);
  std::size_t top2 = none;        // best 2-type
  std::size_t a = none, b = none;  // best two 1-types, a first
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (skip && *skip == i) continue;
    const auto& bid = bids[i];
    if (bid.demand == 2) {
      if (top2 == none || bids[top2].value < bid.value) top2 = i;
    } else if (a == none || bids[a].value < bid.value) {
      b = a;
      a = i;
    } else if (b == none || bids[b].value < bid.value) {
      b = i;
    }
  }
  Allocation<V> out;
  V best{};
  if (top2 != none) best = std::max(best, V(bids[top2].value + bids[top2].value));
  if (a != none) best = std::max(best, bids[a].value);
  if (b != none) best = std::max(best, V(bids[a].value + bids[b].value));
  out.welfare = best;
  if (!(V{} < best)) return out;  // empty set is optimal and smallest

  // single-bid optimum: smallest index achieving it
  std::size_t single = none;
  for (std::size_t i = 0; i < bids.size() && single == none; ++i) {
    if (skip && *skip == i) continue;
    const auto& bid = bids[i];
    V w = bid.demand == 2 ? V(bid.value + bid.value) : bid.value;
    if (w == best) single = i;
  }
  if (single != none) {
    out.count = 1;
    out.idx[0] = single;
    return out;
  }
  // pair of 1-types: values must be the top two 1-type values
  const V hi = bids[a].value;
  const V lo = bids[b].value;
  std::size_t first = none, second = none;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (skip && *skip == i) continue;
    if (bids[i].demand != 1) continue;
    if (hi == lo) {
      if (bids[i].value == hi) {
        if (first == none) {
          first = i;
        } else if (second == none) {
          second = i;
        }
      }
    } else if (bids[i].value == hi) {
      first = i;
    } else if (bids[i].value == lo && second == none) {
      second = i;
    }
  }
  out.count = 2;
  out.idx[0] = std::min(first, second);
  out.idx[1] = std::max(first, second);
  return out;
}

}  // namespace detail

template <typename V>
V social_welfare(const BasicProfile<V>& bids) {
  return detail::allocate(bids, std::nullopt).welfare;
}

template <typename V>
BasicOutcome<V> vcg_outcome(const BasicProfile<V>& bids) {
  auto alloc = detail::allocate(bids, std::nullopt);
  BasicOutcome<V> out;
  out.welfare = alloc.welfare;
  for (std::size_t k = 0; k < alloc.count; ++k) out.winners.push_back(alloc.idx[k]);
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (!out.wins(i)) out.losers.push_back(i);
  }
  for (std::size_t w : out.winners) {
    V own = bids[w].demand == 2 ? V(bids[w].value + bids[w].value) : bids[w].value;
    V without = detail::allocate(bids, w).welfare;
    out.payments.push_back(V(without - (alloc.welfare - own)));
  }
  return out;
}

// Utility of a bidder with true type `true_type` submitting `own` ahead of
// `adversaries` (own bids occupy the first indices).
template <typename V>
V focal_utility(const BasicBid<V>& true_type, const BasicProfile<V>& own,
                const BasicProfile<V>& adversaries) {
  BasicProfile<V> all;
  all.reserve(own.size() + adversaries.size());
  all.insert(all.end(), own.begin(), own.end());
  all.insert(all.end(), adversaries.begin(), adversaries.end());
  auto out = vcg_outcome(all);
  int items = 0;
  V paid{};
  for (std::size_t k = 0; k < out.winners.size(); ++k) {
    if (out.winners[k] < own.size()) {
      items += all[out.winners[k]].demand;
      paid = paid + out.payments[k];
    }
  }
  V value{};
  if (items >= true_type.demand) {
    value = true_type.demand == 2 ? V(true_type.value + true_type.value) : true_type.value;
  }
  return V(value - paid);
}

Rational focal_utility(const FocalReport& report, const BidProfile& adversaries);

// True when more than one feasible set attains the maximum welfare.
template <typename V>
bool has_welfare_tie(const BasicProfile<V>& bids) {
  V best = social_welfare(bids);
  std::size_t count = 0;
  if (best == V{}) ++count;  // the empty set
  std::vector<V> ones;
  for (const auto& b : bids) {
    V w = b.demand == 2 ? V(b.value + b.value) : b.value;
    if (w == best) ++count;
    if (b.demand == 1) ones.push_back(b.value);
  }
  for (std::size_t i = 0; i < ones.size(); ++i) {
    for (std::size_t j = i + 1; j < ones.size(); ++j) {
      if (V(ones[i] + ones[j]) == best) ++count;
    }
  }
  return count > 1;
}

}  // namespace fnvcg
