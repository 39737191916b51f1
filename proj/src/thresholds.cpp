// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/thresholds.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace fnvcg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; results are written by index.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads && static_cast<std::size_t>(w) < n; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Rational diff_at(int demand, int n, const BetaDist& dist, const Rational& t, const Rational& x, const Rational& y,
                 const Rational& q) {
  return expected_diff_poly_q(make_attack(demand, t, x, y, n), dist).q_poly.evaluate(Valuation{{Var::q, q}});
}

}  // namespace

RatPoly diff_polynomial(const Scenario& s, const ValueDistribution& dist, const EnumerationGuard& guard) {
  if (const auto* b = std::get_if<BetaDist>(&dist)) return expected_diff_poly_q(s, *b).q_poly;
  return discrete_expected_diff(make_model(0, dist), s, guard);
}

QBar largest_sign_change(const RatPoly& p, const Rational& width) {
  QBar out;
  out.value = {0, 0};
  if (p.is_zero()) return out;
  for (auto r : isolate_real_roots(p, 0, 1)) out.roots.push_back(refine_root(p, r, width));
  // Gaps between consecutive roots, right to left.
  std::vector<std::pair<Rational, Rational>> gaps;
  Rational left = 0;
  for (const auto& r : out.roots) {
    if (r.lower > left) gaps.emplace_back(left, r.lower);
    left = r.upper;
  }
  if (left < 1) gaps.emplace_back(left, Rational(1));
  for (std::size_t g = gaps.size(); g-- > 0;) {
    Rational mid = (gaps[g].first + gaps[g].second) / 2;
    if (p.evaluate(Valuation{{Var::q, mid}}) < 0) {
      if (gaps[g].second == 1 && (out.roots.empty() || out.roots.back().upper < 1)) {
        out.value = {1, 1};
        return out;
      }
      // The root bounding this gap from the right.
      for (const auto& r : out.roots) {
        if (r.lower >= gaps[g].second) {
          out.value = r;
          return out;
        }
      }
      out.value = {1, 1};
      return out;
    }
  }
  return out;
}

ThresholdCertificate qstar_fixed_attack(const Scenario& s, const ValueDistribution& dist,
                                        const EnumerationGuard& guard) {
  validate(s);
  auto t0 = std::chrono::steady_clock::now();
  ThresholdCertificate cert;
  cert.scope = ThresholdCertificate::Scope::FixedAttack;
  cert.n = s.n;
  cert.dist = to_string(dist);
  cert.scenario = s;
  cert.q_poly = diff_polynomial(s, dist, guard);
  QBar qb = largest_sign_change(cert.q_poly);
  cert.q_star = qb.value;
  cert.roots = qb.roots;
  if (qb.value.lower > 0) {
    // Witness just below q*: a point inside the negative gap.
    Rational below = qb.value.lower;
    for (const auto& r : qb.roots)
      if (r.upper < qb.value.lower) below = r.upper;
    if (below == qb.value.lower) below = 0;
    Rational q = (below + qb.value.lower) / 2;
    Rational v = cert.q_poly.evaluate(Valuation{{Var::q, q}});
    if (v < 0) cert.falsification = Counterexample{{{Var::q, q}}, v};
  }
  cert.seconds = seconds_since(t0);
  return cert;
}

ThresholdCertificate qstar_global(const BetaDist& dist, int n, const Rational& q_guess, const GlobalOptions& opts) {
  if (q_guess < 0 || q_guess > 1) throw std::invalid_argument("q_guess must lie in [0,1]");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  auto t0 = std::chrono::steady_clock::now();
  ThresholdCertificate cert;
  cert.scope = ThresholdCertificate::Scope::Global;
  cert.n = n;
  cert.dist = to_string(ValueDistribution{dist});
  cert.q_star = {q_guess, q_guess};

  struct Part {
    int demand;
    ParamSlice slice;
  };
  std::vector<Part> parts = {{1, {Rational(1), {}, {}}}};
  if (dist.beta == 1) {
    parts.push_back({2, {Rational(1), {}, {}}});
    parts.push_back({2, {{}, Rational(1), {}}});
  } else {
    parts.push_back({2, {}});
  }

  bool inconclusive = false;
  int deepest = 0;
  auto point_of = [](const ParamSlice& sl, const std::vector<Var>& free, const std::vector<Rational>& vals,
                     const Rational& q) {
    Rational t = sl.t.value_or(0), x = sl.x.value_or(0), y = sl.y.value_or(0);
    for (std::size_t i = 0; i < free.size(); ++i) {
      if (free[i] == Var::t) t = vals[i];
      if (free[i] == Var::x) x = vals[i];
      if (free[i] == Var::y) y = vals[i];
    }
    return std::vector<std::pair<Var, Rational>>{{Var::t, t}, {Var::x, x}, {Var::y, y}, {Var::q, q}};
  };
  auto confirm = [&](int demand, const std::vector<std::pair<Var, Rational>>& pt) -> std::optional<Counterexample> {
    Rational v = diff_at(demand, n, dist, pt[0].second, pt[1].second, pt[2].second, pt[3].second);
    if (v < 0) return Counterexample{pt, v};
    return std::nullopt;
  };

  for (const auto& part : parts) {
    auto ts = std::chrono::steady_clock::now();
    SliceReport rep;
    rep.demand = part.demand;
    rep.slice = part.slice.describe();
    ChamberComplex cx = enumerate_chambers(part.demand, n, part.slice);
    rep.walls = cx.walls.size();
    rep.chambers = cx.chambers.size();
    const std::size_t dims = cx.free.size();

    std::vector<RatPoly> polys(cx.chambers.size());
    std::vector<std::string> failures(cx.chambers.size());
    parallel_for(cx.chambers.size(), opts.threads, [&](std::size_t i) {
      try {
        polys[i] = interpolate_diff_polynomial(part.demand, dist, n, cx, cx.chambers[i], opts.interpolation);
      } catch (const std::runtime_error& e) {
        failures[i] = e.what();
      }
    });
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < polys.size(); ++i)
      if (failures[i].empty()) distinct.insert(polys[i].to_string());
    rep.distinct_polynomials = distinct.size();

    // Pre-pass: grid hunt in double precision, confirmed exactly.
    std::optional<Counterexample> found;
    if (opts.hunt_steps > 0) {
      const long steps = dims == 2 ? opts.hunt_steps : std::max(2, opts.hunt_steps / 2);
      double best = 0;
      std::vector<Rational> best_pt;
      Rational best_q;
      std::vector<long> idx(dims, 0);
      for (;;) {
        std::vector<Rational> pt(dims);
        for (std::size_t i = 0; i < dims; ++i) pt[i] = make_rational(idx[i], steps);
        int c = cx.locate(pt);
        if (c >= 0 && failures[c].empty()) {
          std::array<double, kNumVars> at{};
          for (std::size_t i = 0; i < dims; ++i) at[var_index(cx.free[i])] = to_double(pt[i]);
          for (long j = 0; j <= opts.hunt_steps; ++j) {
            Rational q = q_guess + (1 - q_guess) * make_rational(j, opts.hunt_steps);
            at[var_index(Var::q)] = to_double(q);
            double v = polys[c].evaluate_double(at);
            if (v < best) {
              best = v;
              best_pt = pt;
              best_q = q;
            }
          }
        }
        std::size_t k = 0;
        while (k < dims && ++idx[k] > steps) idx[k++] = 0;
        if (k == dims) break;
      }
      if (!best_pt.empty()) found = confirm(part.demand, point_of(part.slice, cx.free, best_pt, best_q));
    }

    PositivityVerdict verdict = Certified{};
    if (found) verdict = *found;
    for (std::size_t i = 0; i < cx.chambers.size() && !found; ++i) {
      if (!failures[i].empty()) {
        verdict = Inconclusive{0};
        inconclusive = true;
        continue;
      }
      const Chamber& ch = cx.chambers[i];
      PositivityVerdict v;
      if (dims == 2) {
        v = certify_nonnegative_on_prism(polys[i], cx.free[0], cx.free[1], ch.polygon, Var::q,
                                         Interval{q_guess, Rational(1)}, opts.certify);
      } else {
        // The bounding box may leave the chamber, where the polynomial does
        // not apply: box counterexamples count only after direct confirmation.
        Box box = ch.box;
        box.set(Var::q, q_guess, 1);
        v = certify_nonnegative(polys[i], box, opts.certify);
      }
      if (auto* ce = std::get_if<Counterexample>(&v)) {
        std::vector<Rational> vals;
        Rational q = q_guess;
        for (const auto& [var, val] : ce->point) {
          if (var == Var::q) q = val;
        }
        for (Var fv : cx.free) {
          for (const auto& [var, val] : ce->point)
            if (var == fv) vals.push_back(val);
        }
        std::optional<Counterexample> direct;
        if (cx.locate(vals) >= 0) direct = confirm(part.demand, point_of(part.slice, cx.free, vals, q));
        if (direct) {
          found = direct;
          verdict = *direct;
        } else {
          v = Inconclusive{opts.certify.max_depth};
        }
      }
      if (auto* inc = std::get_if<Inconclusive>(&v)) {
        deepest = std::max(deepest, inc->depth_reached);
        if (!std::holds_alternative<Counterexample>(verdict)) verdict = *inc;
        inconclusive = true;
      }
    }
    rep.verdict = verdict_name(verdict);
    rep.seconds = seconds_since(ts);
    cert.slices.push_back(rep);
    if (found) {
      cert.verification = *found;
      cert.falsification = found;
      cert.seconds = seconds_since(t0);
      return cert;
    }
  }
  if (inconclusive) {
    cert.verification = Inconclusive{deepest};
  } else {
    cert.verification = Certified{};
  }
  cert.seconds = seconds_since(t0);
  return cert;
}

std::array<double, 4> epsilon_bounds(const Rational& q, int n) {
  const double nt = n - 1;
  const double qd = to_double(q);
  const double inf = std::numeric_limits<double>::infinity();
  double b1 = qd > 0 ? (1 - qd) / (3000 * qd * nt) : inf;
  double b2 = 1.0 / 1000;
  double b3 = -std::expm1(std::log(0.2) / nt) / 2;
  double r = std::pow(1 - qd, nt) / 300;
  double b4 = -std::expm1(std::log1p(-r) / nt);
  return {b1, b2, b3, b4};
}

bool epsilon_admissible(const Rational& eps, const Rational& q, int n) {
  const unsigned nt = static_cast<unsigned>(n - 1);
  if (eps <= 0) return false;
  if (q > 0 && eps * 3000 * q * nt > 1 - q) return false;
  if (eps > Rational(1, 1000)) return false;
  if (rational_pow(1 - 2 * eps, nt) < Rational(1, 5)) return false;
  if (rational_pow(1 - eps, nt) < 1 - rational_pow(1 - q, nt) / 300) return false;
  return true;
}

ImpossibilityWitness impossibility_witness(const Rational& q, int n) {
  if (q >= 1 || q < 0) throw std::invalid_argument("witness needs 0 <= q < 1");
  if (n <= 2) throw std::invalid_argument("witness needs n > 2");
  auto b = epsilon_bounds(q, n);
  double m = *std::min_element(b.begin(), b.end());
  // Nine significant digits, rounded down.
  const int e = static_cast<int>(std::floor(std::log10(m)));
  Integer den = 1;
  for (int i = 0; i < 8 - e; ++i) den *= 10;
  Integer num = static_cast<long>(std::floor(m * den.get_d()));
  Rational eps = make_rational(num, den);
  while (!epsilon_admissible(eps, q, n)) {
    num -= 1;
    if (num <= 0) throw std::logic_error("no admissible epsilon found");
    eps = make_rational(num, den);
  }
  ImpossibilityWitness w;
  w.q = q;
  w.n = n;
  w.epsilon = eps;
  w.distribution = make_discrete({{Rational(1, 2), eps}, {Rational(3, 5), 1 - 2 * eps}, {Rational(1), eps}});
  w.attack = make_attack(1, 1, 1, Rational(1, 2), n);
  w.diff = discrete_expected_diff(make_model(q, w.distribution), w.attack).evaluate(Valuation{{Var::q, q}});
  if (w.diff >= 0) throw std::logic_error("impossibility construction did not produce a beneficial attack");
  return w;
}

AttackSearchReport best_attack_search(int demand, const Rational& theta, const ValueDistribution& dist, int n,
                                      const Rational& q, const Rational& grid_step, const EnumerationGuard& guard) {
  if (grid_step <= 0 || grid_step > Rational(1, 4)) throw std::invalid_argument("grid step must lie in (0, 1/4]");
  if (q < 0 || q > 1) throw std::invalid_argument("q must lie in [0,1]");
  validate(make_truthful(demand, theta, n));
  const int nt = n - 1;
  std::vector<Rational> weight(nt + 1);
  for (int k = 0; k <= nt; ++k)
    weight[k] = Rational(binomial(nt, k)) * rational_pow(q, k) * rational_pow(1 - q, nt - k);

  const auto* beta = std::get_if<BetaDist>(&dist);
  std::vector<Rational> truth(nt + 1);
  if (beta) {
    Scenario tr = make_truthful(demand, theta, n);
    for (int k = 0; k <= nt; ++k)
      if (sgn(weight[k]) != 0) truth[k] = expected_utility_given_k(tr, *beta, k);
  }
  auto gain_at = [&](const Rational& x, const Rational& y) {
    Scenario s = make_attack(demand, theta, x, y, n);
    Rational g = 0;
    if (beta) {
      for (int k = 0; k <= nt; ++k)
        if (sgn(weight[k]) != 0) g += weight[k] * (expected_utility_given_k(s, *beta, k) - truth[k]);
    } else {
      auto per_k = discrete_diff_by_k(make_model(q, dist), s, guard);
      for (int k = 0; k <= nt; ++k) g -= weight[k] * per_k[k];
    }
    return g;
  };

  AttackSearchReport rep;
  rep.grid_step = grid_step;
  bool first = true;
  for (Rational x = 0; x <= 1; x += grid_step) {
    for (Rational y = 0; y <= x; y += grid_step) {
      Rational g = gain_at(x, y);
      ++rep.evaluated;
      if (g > 0) rep.beneficial.push_back({x, y, g});
      if (first || g >= rep.best_diff) {
        rep.best_x = x;
        rep.best_y = y;
        rep.best_diff = g;
        first = false;
      }
    }
  }
  return rep;
}

}  // namespace fnvcg
