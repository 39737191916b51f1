// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace fnvcg {

namespace {

void trim(Dense& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Dense derivative(const Dense& p) {
  Dense d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<unsigned long>(i));
  trim(d);
  return d;
}

// Remainder and quotient of a / b, b nonzero.
std::pair<Dense, Dense> divmod(Dense a, const Dense& b) {
  trim(a);
  Dense quot(a.size() >= b.size() ? a.size() - b.size() + 1 : 0);
  while (a.size() >= b.size() && !a.empty()) {
    std::size_t shift = a.size() - b.size();
    Rational f = a.back() / b.back();
    quot[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  trim(quot);
  return {quot, a};
}

Dense monic(Dense p) {
  Rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

Dense gcd(Dense a, Dense b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : monic(a);
}

Dense squarefree_part(const Dense& p) {
  Dense g = gcd(p, derivative(p));
  if (g.size() <= 1) return monic(p);
  return monic(divmod(p, g).first);
}

int sign_variations(const Dense& coeffs) {
  int count = 0;
  int last = 0;
  for (const auto& c : coeffs) {
    int s = sgn(c);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

Var sole_variable(const RatPoly& p) {
  auto vars = p.variables();
  if (vars.size() > 1) throw std::invalid_argument("root isolation needs a univariate polynomial");
  return vars.empty() ? Var::q : vars.front();
}

void isolate(const Dense& sf, const Rational& a, const Rational& b, std::vector<RootInterval>& out,
             int depth) {
  // endpoints are not roots of sf here
  int v = sign_variations(bernstein_coefficients(sf, a, b, sf.size() - 1));
  if (v == 0) return;
  if (v == 1) {
    out.push_back({a, b});
    return;
  }
  if (depth > 4000) throw std::runtime_error("root isolation failed to separate roots");
  Rational m = (a + b) / 2;
  isolate(sf, a, m, out, depth + 1);
  if (evaluate_dense(sf, m) == 0) out.push_back({m, m});
  isolate(sf, m, b, out, depth + 1);
}

}  // namespace

Rational evaluate_dense(const Dense& p, const Rational& at) {
  Rational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * at + p[i];
  return acc;
}

Dense taylor_shift(const Dense& p, const Rational& a, const Rational& h) {
  // p(a + u) by repeated synthetic division, then scale u -> h u
  Dense c = p;
  const std::size_t n = c.size();
  if (a != 0) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = n - 1; j-- > i;) c[j] += a * c[j + 1];
    }
  }
  Rational hp = 1;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] *= hp;
    hp *= h;
  }
  return c;
}

Dense bernstein_coefficients(const Dense& power, const Rational& lo, const Rational& hi,
                             std::size_t deg) {
  Dense a = taylor_shift(power, lo, hi - lo);
  a.resize(deg + 1);
  Dense b(deg + 1);
  // b_i = sum_{j<=i} C(i,j)/C(deg,j) a_j
  std::vector<Integer> cdeg(deg + 1);
  for (std::size_t j = 0; j <= deg; ++j) cdeg[j] = binomial(static_cast<unsigned>(deg), static_cast<unsigned>(j));
  for (std::size_t i = 0; i <= deg; ++i) {
    Rational s = 0;
    Integer cij = 1;  // C(i, j)
    for (std::size_t j = 0; j <= i; ++j) {
      if (a[j] != 0) s += a[j] * make_rational(cij, cdeg[j]);
      cij = cij * static_cast<unsigned long>(i - j) / static_cast<unsigned long>(j + 1);
    }
    b[i] = s;
  }
  return b;
}

std::vector<RootInterval> isolate_real_roots(const RatPoly& p, const Rational& lo,
                                             const Rational& hi) {
  if (p.is_zero()) throw std::invalid_argument("cannot isolate roots of the zero polynomial");
  if (lo > hi) throw std::invalid_argument("empty interval");
  Dense dense = p.univariate_coefficients(sole_variable(p));
  trim(dense);
  std::vector<RootInterval> out;
  if (dense.size() <= 1) return out;
  Dense sf = squarefree_part(dense);
  if (evaluate_dense(sf, lo) == 0) out.push_back({lo, lo});
  if (lo < hi) {
    isolate(sf, lo, hi, out, 0);
    if (evaluate_dense(sf, hi) == 0) out.push_back({hi, hi});
  }
  return out;
}

Rational simplest_rational_between(const Rational& lo, const Rational& hi) {
  // Stern-Brocot descent via continued fractions; assumes lo <= hi
  if (lo > hi) return simplest_rational_between(hi, lo);
  if (lo <= 0 && hi >= 0) return 0;
  if (hi < 0) return -simplest_rational_between(-hi, -lo);
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  if (Rational(fl) == lo) return lo;
  if (Rational(fl + 1) <= hi) return Rational(fl + 1);
  // both in (fl, fl+1)
  Rational a = lo - fl;
  Rational b = hi - fl;
  Rational inner = simplest_rational_between(1 / b, 1 / a);
  return Rational(fl) + 1 / inner;
}

RootInterval refine_root(const RatPoly& p, RootInterval root, const Rational& max_width) {
  if (root.exact()) return root;
  Dense dense = p.univariate_coefficients(sole_variable(p));
  trim(dense);
  Dense sf = squarefree_part(dense);
  // Isolating intervals are open; a neighbouring root may sit on an endpoint.
  for (const Rational& e : {root.lower, root.upper}) {
    if (evaluate_dense(sf, e) == 0) sf = divmod(sf, Dense{-e, 1}).first;
  }
  int s_lo = sgn(evaluate_dense(sf, root.lower));
  if (s_lo == 0 || s_lo == sgn(evaluate_dense(sf, root.upper)))
    throw std::invalid_argument("interval does not isolate a simple root");
  while (root.width() > max_width) {
    Rational m = (root.lower + root.upper) / 2;
    int s = sgn(evaluate_dense(sf, m));
    if (s == 0) return {m, m};
    if (s == s_lo) {
      root.lower = m;
    } else {
      root.upper = m;
    }
  }
  Rational simple = simplest_rational_between(root.lower, root.upper);
  if (evaluate_dense(sf, simple) == 0) return {simple, simple};
  return root;
}

}  // namespace fnvcg
