// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fnvcg/distributions.hpp"
#include "fnvcg/expectation.hpp"

#include <cstdint>

namespace fnvcg {

struct McEstimate {
  double mean = 0;
  double stderr_ = 0;  // sample standard deviation / sqrt(samples)
  long samples = 0;
  std::uint64_t seed = 0;
  std::int64_t denominator = 0;  // fixed-point scale of all values
};

struct McOptions {
  int threads = 1;
  long shard_size = 4096;
};

// Truth minus attack through the full mechanism, on common adversary draws.
// Values live on a fixed grid of numerators over fixed_denominator(); the
// scenario's theta, x and y are rounded to it when they do not divide it.
McEstimate estimate_expected_diff(const TypeModel& model, const Scenario& s, long samples, std::uint64_t seed,
                                  const McOptions& opts = {});

struct OracleReport {
  long trials = 0;
  long mismatches = 0;         // reduced form vs mechanism
  long append_mismatches = 0;  // dominated adversaries changed the outcome
  long ties_skipped = 0;
};

// Random tie-free instances with adversary profiles of mixed sizes.
OracleReport oracle_consistency(long trials, std::uint64_t seed);

}  // namespace fnvcg
