// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/arrangement.hpp"
#include "fnvcg/expectation.hpp"

#include <stdexcept>

namespace fnvcg {

Rational expected_utility_given_k(const Scenario& s, const BetaDist& dist, int k) {
  validate(s);
  KCase kc = k_case(dist, s.n_tilde(), k);
  std::vector<LinForm> planes;
  for (const auto& p : utility_planes(s.demand, s.attack)) planes.push_back(p.at(s.theta, s.x, s.y));
  Integrand f = [&s](const Coords& z) { return reduced_utility(s, TopStats{z[2], z[0], z[1]}); };
  return integrate_piecewise_affine(kc, planes, f);
}

Rational expected_diff_given_k(const Scenario& s, const BetaDist& dist, int k) {
  if (!s.attack) throw std::invalid_argument("difference needs an attack scenario");
  return expected_utility_given_k(s.truthful(), dist, k) - expected_utility_given_k(s, dist, k);
}

RatPoly binomial_mixture(const std::vector<RatPoly>& per_k) {
  if (per_k.empty()) return {};
  const unsigned nt = static_cast<unsigned>(per_k.size() - 1);
  RatPoly q = RatPoly::variable(Var::q);
  RatPoly one_minus_q = RatPoly(1) - q;
  RatPoly out;
  for (unsigned k = 0; k <= nt; ++k) {
    if (per_k[k].is_zero()) continue;
    out += per_k[k] * Rational(binomial(nt, k)) * q.pow(k) * one_minus_q.pow(nt - k);
  }
  return out;
}

RatPoly binomial_mixture(const std::vector<Rational>& per_k) {
  std::vector<RatPoly> polys(per_k.begin(), per_k.end());
  return binomial_mixture(polys);
}

DiffByK expected_diff_poly_q(const Scenario& s, const BetaDist& dist) {
  DiffByK out;
  out.n = s.n;
  for (int k = 0; k <= s.n_tilde(); ++k) out.per_k.push_back(expected_diff_given_k(s, dist, k));
  out.q_poly = binomial_mixture(out.per_k);
  return out;
}

Rational uniform_split_closed_form(int n_tilde, int k) {
  if (n_tilde < 2) throw std::out_of_range("closed form needs n_tilde >= 2");
  if (k < 0 || k > n_tilde) throw std::out_of_range("k outside 0..n_tilde");
  const Rational nt(n_tilde);
  if (k == 0) {
    return Rational(1) / ((nt + 1) * pow2(n_tilde - 1)) - Rational(2) / (nt + 1);
  }
  if (k == 1) {
    return Rational(8) / (nt * (nt + 1)) - Rational(2) / nt -
           Rational(3) / (nt * (nt + 1) * pow2(n_tilde - 1));
  }
  if (k == n_tilde) return Rational(1) / (nt + 1);

  const int m = n_tilde - k;
  const Rational kk(k);
  auto C = [](int a, int b) { return Rational(binomial(static_cast<unsigned>(a), static_cast<unsigned>(b))); };
  Rational s1 = 0;
  for (int i = 0; i <= m; ++i) s1 += C(m, i) * (Rational(1, i + k) + Rational(1, i + k + 1));
  Rational s2 = 0;
  for (int i = 0; i <= m + 1; ++i) s2 += C(m + 1, i) / Rational(n_tilde - i);
  Rational s3 = 0;
  for (int i = 0; i <= m + 1; ++i) s3 += C(m + 1, i) / Rational(i + k);
  Rational s4 = 0;
  for (int i = 0; i <= m; ++i) s4 += C(m, i) * (Rational(1, n_tilde - i) + Rational(1, n_tilde - i - 1));

  Rational out = 2 * kk / pow2(m) * s1;
  out += 2 * kk * (kk - 1) * Rational(m) / ((nt + 1) * Rational(m + 1) * pow2(m + 1)) * s2;
  out -= Rational(2) / nt;
  out -= 4 * kk * Rational(m) / (Rational(m + 1) * pow2(m + 1)) * s3;
  out -= kk * (kk - 1) / ((nt + 1) * pow2(m)) * s4;
  return out;
}

}  // namespace fnvcg
