// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/mechanism.hpp"

namespace fnvcg {

void validate_bid(const Bid& b) {
  if (b.demand != 1 && b.demand != 2) throw std::invalid_argument("bid demand must be 1 or 2");
  if (b.value < 0 || b.value > 1) throw std::invalid_argument("bid value must lie in [0,1]");
}

std::string to_string(const Bid& b) {
  return "(" + std::to_string(b.demand) + "," + to_fraction_string(b.value) + ")";
}

Rational focal_utility(const FocalReport& report, const BidProfile& adversaries) {
  if (report.own_bids.empty()) throw std::invalid_argument("focal report needs at least one bid");
  return focal_utility(report.true_type, report.own_bids, adversaries);
}

}  // namespace fnvcg
