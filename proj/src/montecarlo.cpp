// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/montecarlo.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace fnvcg {

namespace {

struct Shard {
  __int128 sum = 0;
  long double sum_sq = 0;  // in units of the denominator squared
  long count = 0;
};

}  // namespace

McEstimate estimate_expected_diff(const TypeModel& model, const Scenario& s, long samples, std::uint64_t seed,
                                  const McOptions& opts) {
  validate(s);
  if (samples < 1000) throw std::invalid_argument("at least 1000 samples required");
  if (opts.shard_size < 1) throw std::invalid_argument("shard size must be positive");
  const std::int64_t D = fixed_denominator(model, {s.theta, s.x, s.y});
  ValueSampler f1(model.f1, D), f2(model.f2, D);
  using Bid64 = BasicBid<std::int64_t>;
  const Bid64 type{s.demand, to_fixed(s.theta, D)};
  const BasicProfile<std::int64_t> truth_bids{type};
  BasicProfile<std::int64_t> attack_bids;
  if (s.attack) attack_bids = {Bid64{1, to_fixed(s.x, D)}, Bid64{1, to_fixed(s.y, D)}};
  else attack_bids = truth_bids;

  const long shards = (samples + opts.shard_size - 1) / opts.shard_size;
  std::vector<Shard> results(static_cast<std::size_t>(shards));
  auto run_shard = [&](long sh) {
    CounterRng rng(seed, static_cast<std::uint64_t>(sh));
    const long begin = sh * opts.shard_size;
    const long end = std::min(samples, begin + opts.shard_size);
    Shard acc;
    for (long i = begin; i < end; ++i) {
      auto adv = sample_adversary_profile_fixed(model, s.n_tilde(), f1, f2, rng);
      std::int64_t d = focal_utility(type, truth_bids, adv) - focal_utility(type, attack_bids, adv);
      acc.sum += d;
      long double dd = static_cast<long double>(d);
      acc.sum_sq += dd * dd;
      ++acc.count;
    }
    results[static_cast<std::size_t>(sh)] = acc;
  };
  const int threads = std::max(1, opts.threads);
  if (threads == 1) {
    for (long sh = 0; sh < shards; ++sh) run_shard(sh);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (long sh = w; sh < shards; sh += threads) run_shard(sh);
      });
    }
    for (auto& t : pool) t.join();
  }
  // Fixed-order reduction keeps results independent of the thread count.
  __int128 sum = 0;
  long double sum_sq = 0;
  for (const auto& r : results) {
    sum += r.sum;
    sum_sq += r.sum_sq;
  }
  const long double n = static_cast<long double>(samples);
  const long double scale = static_cast<long double>(D);
  long double mean = static_cast<long double>(sum) / n;
  long double var = (sum_sq - n * mean * mean) / (n - 1);
  if (var < 0) var = 0;
  McEstimate out;
  out.mean = static_cast<double>(mean / scale);
  out.stderr_ = static_cast<double>(std::sqrt(var / n) / scale);
  out.samples = samples;
  out.seed = seed;
  out.denominator = D;
  return out;
}

OracleReport oracle_consistency(long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  OracleReport rep;
  CounterRng rng(seed, 0);
  auto grid = [&](long den) { return make_rational(static_cast<long>(rng.next() % (den + 1)), den); };
  while (rep.trials < trials) {
    const int n = 3 + static_cast<int>(rng.next() % 4);
    const int demand = 1 + static_cast<int>(rng.next() % 2);
    Rational theta = grid(1000), x = grid(1000), y = grid(1000);
    if (y > x) std::swap(x, y);
    BidProfile adv;
    for (int i = 0; i < n - 1; ++i) adv.push_back({1 + static_cast<int>(rng.next() % 2), grid(1000)});
    Scenario truth = make_truthful(demand, theta, n);
    Scenario attack = make_attack(demand, theta, x, y, n);
    const Bid type = truth.true_type();
    auto tied = [&](const Scenario& sc, const BidProfile& a) {
      BidProfile all = sc.own_bids();
      all.insert(all.end(), a.begin(), a.end());
      return has_welfare_tie(all);
    };
    if (tied(truth, adv) || tied(attack, adv)) {
      ++rep.ties_skipped;
      continue;
    }
    ++rep.trials;
    TopStats st = top_stats(adv);
    for (const Scenario* sc : {&truth, &attack}) {
      Rational direct = focal_utility(type, sc->own_bids(), adv);
      if (reduced_utility(*sc, st) != direct) ++rep.mismatches;
      BidProfile more = adv;
      more.push_back({1, st.v2 / 2});
      more.push_back({2, st.w1 / 2});
      if (!tied(*sc, more) && focal_utility(type, sc->own_bids(), more) != direct) ++rep.append_mismatches;
    }
  }
  return rep;
}

}  // namespace fnvcg
