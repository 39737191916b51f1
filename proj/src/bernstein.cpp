// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/polynomial.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

namespace fnvcg {

Box& Box::set(Var v, Rational lower, Rational upper) {
  if (lower > upper) throw std::invalid_argument("box interval with lower > upper");
  for (auto& [var, iv] : dims_) {
    if (var == v) {
      iv = {std::move(lower), std::move(upper)};
      return *this;
    }
  }
  dims_.emplace_back(v, Interval{std::move(lower), std::move(upper)});
  return *this;
}

bool Box::has(Var v) const {
  return std::any_of(dims_.begin(), dims_.end(), [v](const auto& d) { return d.first == v; });
}

const Interval& Box::get(Var v) const {
  for (const auto& [var, iv] : dims_) {
    if (var == v) return iv;
  }
  throw std::invalid_argument("box has no interval for " + std::string(var_name(v)));
}

std::string verdict_name(const PositivityVerdict& v) {
  if (std::holds_alternative<Certified>(v)) return "Certified";
  if (std::holds_alternative<Counterexample>(v)) return "Counterexample";
  return "Inconclusive";
}

namespace {

struct Tensor {
  std::vector<std::size_t> deg;
  std::vector<std::size_t> stride;
  std::vector<Rational> c;

  explicit Tensor(std::vector<std::size_t> d) : deg(std::move(d)), stride(deg.size()) {
    std::size_t n = 1;
    for (std::size_t k = deg.size(); k-- > 0;) {
      stride[k] = n;
      n *= deg[k] + 1;
    }
    c.assign(n, Rational(0));
  }

  // Calls f(fiber) for every line along axis k; f may rewrite the fiber in place.
  template <typename F>
  void for_each_fiber(std::size_t k, F&& f) {
    const std::size_t len = deg[k] + 1;
    const std::size_t s = stride[k];
    Dense fiber(len);
    for (std::size_t base = 0; base < c.size(); ++base) {
      if ((base / s) % len != 0) continue;
      for (std::size_t i = 0; i < len; ++i) fiber[i] = c[base + i * s];
      f(fiber);
      for (std::size_t i = 0; i < len; ++i) c[base + i * s] = fiber[i];
    }
  }
};

Dense power_to_bernstein_unit(const Dense& a) {
  const std::size_t d = a.size() - 1;
  Dense b(d + 1);
  std::vector<Integer> cd(d + 1);
  for (std::size_t j = 0; j <= d; ++j) cd[j] = binomial(static_cast<unsigned>(d), static_cast<unsigned>(j));
  for (std::size_t i = 0; i <= d; ++i) {
    Rational s = 0;
    Integer cij = 1;
    for (std::size_t j = 0; j <= i; ++j) {
      if (a[j] != 0) s += a[j] * make_rational(cij, cd[j]);
      cij = cij * static_cast<unsigned long>(i - j) / static_cast<unsigned long>(j + 1);
    }
    b[i] = s;
  }
  return b;
}

// Left and right halves of a Bernstein fiber split at 1/2.
void de_casteljau_half(const Dense& b, Dense& left, Dense& right) {
  const std::size_t n = b.size();
  Dense w = b;
  left.resize(n);
  right.resize(n);
  left[0] = w[0];
  right[n - 1] = w[n - 1];
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i + r < n; ++i) w[i] = (w[i] + w[i + 1]) / 2;
    left[r] = w[0];
    right[n - 1 - r] = w[n - 1 - r];
  }
}

struct Node {
  Tensor t;
  std::vector<Interval> box;
  std::vector<int> splits;
  int depth;
};

}  // namespace

namespace {

std::optional<Rational> rational_sqrt(const Rational& c) {
  if (c < 0) return std::nullopt;
  if (!mpz_perfect_square_p(c.get_num_mpz_t()) || !mpz_perfect_square_p(c.get_den_mpz_t())) return std::nullopt;
  Integer num, den;
  mpz_sqrt(num.get_mpz_t(), c.get_num_mpz_t());
  mpz_sqrt(den.get_mpz_t(), c.get_den_mpz_t());
  return make_rational(num, den);
}

std::optional<Monomial> divide(Monomial a, Monomial b) {
  Monomial out;
  for (Var v : kAllVars) {
    if (a.exponent(v) < b.exponent(v)) return std::nullopt;
    out = out.with(v, a.exponent(v) - b.exponent(v));
  }
  return out;
}

// Exact square root of p, peeled from the leading term down (the packed
// monomial order is multiplicative, so leading terms multiply).
bool is_perfect_square(const RatPoly& p) {
  if (p.is_zero()) return true;
  const auto& [lead_m, lead_c] = p.terms().back();
  Monomial half;
  for (Var v : kAllVars) {
    if (lead_m.exponent(v) % 2 != 0) return false;
    half = half.with(v, lead_m.exponent(v) / 2);
  }
  auto root_c = rational_sqrt(lead_c);
  if (!root_c) return false;
  RatPoly s = RatPoly::term(*root_c, half);
  Monomial last = half;
  for (std::size_t iter = 0; iter <= p.terms().size() * 4 + 4; ++iter) {
    RatPoly r = p - s * s;
    if (r.is_zero()) return true;
    const auto& [m, c] = r.terms().back();
    auto q = divide(m, half);
    if (!q || !(*q < last)) return false;
    s += RatPoly::term(c / (2 * *root_c), *q);
    last = *q;
  }
  return false;
}

}  // namespace

PositivityVerdict certify_nonnegative(const RatPoly& p, const Box& box, int max_depth) {
  CertifyOptions opts;
  opts.max_depth = max_depth;
  return certify_nonnegative(p, box, opts);
}

PositivityVerdict certify_nonnegative(const RatPoly& p, const Box& box,
                                      const CertifyOptions& opts) {
  for (Var v : p.variables()) {
    if (!box.has(v)) throw std::invalid_argument("box misses variable " + std::string(var_name(v)));
  }
  const auto& dims = box.dims();
  const std::size_t m = dims.size();

  auto to_point = [&](const std::vector<Rational>& coords) {
    std::vector<std::pair<Var, Rational>> pt;
    for (std::size_t k = 0; k < m; ++k) pt.emplace_back(dims[k].first, coords[k]);
    return pt;
  };
  auto eval_exact = [&](const std::vector<Rational>& coords) {
    Valuation val;
    for (std::size_t k = 0; k < m; ++k) val.set(dims[k].first, coords[k]);
    return p.evaluate(val);
  };

  if (p.is_zero() || is_perfect_square(p)) return Certified{};
  if (m == 0) {
    Rational c = p.constant_term();
    if (c < 0) return Counterexample{{}, c};
    return Certified{};
  }

  // Pre-pass: coarse grid hunt in double precision, confirmed exactly.
  if (opts.hunt_steps > 0) {
    long steps = opts.hunt_steps;
    auto total = [&](long s) {
      double n = 1;
      for (std::size_t k = 0; k < m; ++k) n *= static_cast<double>(s + 1);
      return n;
    };
    while (steps > 2 && total(steps) > 3e5) steps /= 2;
    std::vector<long> idx(m, 0);
    std::array<double, kNumVars> at{};
    double best = std::numeric_limits<double>::infinity();
    std::vector<long> best_idx(m, 0);
    while (true) {
      for (std::size_t k = 0; k < m; ++k) {
        const auto& iv = dims[k].second;
        at[var_index(dims[k].first)] =
            iv.lower.get_d() + Rational(iv.upper - iv.lower).get_d() * static_cast<double>(idx[k]) / steps;
      }
      double v = p.evaluate_double(at);
      if (v < best) {
        best = v;
        best_idx = idx;
      }
      std::size_t k = 0;
      while (k < m && ++idx[k] > steps) idx[k++] = 0;
      if (k == m) break;
    }
    auto coords_of = [&](const std::vector<Rational>& frac) {
      std::vector<Rational> coords(m);
      for (std::size_t k = 0; k < m; ++k) {
        const auto& iv = dims[k].second;
        coords[k] = iv.lower + (iv.upper - iv.lower) * frac[k];
      }
      return coords;
    };
    std::vector<Rational> frac(m);
    for (std::size_t k = 0; k < m; ++k) frac[k] = make_rational(best_idx[k], steps);
    Rational val = eval_exact(coords_of(frac));
    // coordinate descent with shrinking steps
    Rational step(1, steps);
    for (int round = 0; round < 24 && val >= 0 && best < 1e-9; ++round) {
      bool moved = false;
      for (std::size_t k = 0; k < m; ++k) {
        for (int dir : {-1, 1}) {
          auto trial = frac;
          trial[k] += step * dir;
          if (trial[k] < 0 || trial[k] > 1) continue;
          Rational tv = eval_exact(coords_of(trial));
          if (tv < val) {
            val = tv;
            frac = trial;
            moved = true;
          }
        }
      }
      if (!moved) step /= 2;
    }
    if (val < 0) return Counterexample{to_point(coords_of(frac)), val};
  }

  // Bernstein tensor on the box.
  std::vector<std::size_t> deg(m);
  for (std::size_t k = 0; k < m; ++k) deg[k] = std::max(1u, p.degree(dims[k].first));
  Tensor root(deg);
  for (const auto& [mono, c] : p.terms()) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < m; ++k) off += mono.exponent(dims[k].first) * root.stride[k];
    root.c[off] += c;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const auto& iv = dims[k].second;
    root.for_each_fiber(k, [&](Dense& f) {
      f = power_to_bernstein_unit(taylor_shift(f, iv.lower, iv.upper - iv.lower));
    });
  }

  std::vector<Interval> root_box;
  for (const auto& d : dims) root_box.push_back(d.second);
  std::vector<Node> stack;
  stack.push_back({std::move(root), root_box, std::vector<int>(m, 0), 0});
  long leaves = 0;
  int deepest = 0;
  bool exhausted = false;

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    deepest = std::max(deepest, node.depth);
    const auto& c = node.t.c;
    if (std::all_of(c.begin(), c.end(), [](const Rational& r) { return r >= 0; })) {
      ++leaves;
      continue;
    }
    // corner coefficients are exact values at the corners
    for (std::size_t corner = 0; corner < (std::size_t{1} << m); ++corner) {
      std::size_t off = 0;
      std::vector<Rational> coords(m);
      for (std::size_t k = 0; k < m; ++k) {
        bool hi = (corner >> k) & 1u;
        off += (hi ? node.t.deg[k] : 0) * node.t.stride[k];
        coords[k] = hi ? node.box[k].upper : node.box[k].lower;
      }
      if (c[off] < 0) return Counterexample{to_point(coords), c[off]};
    }
    if (node.depth >= opts.max_depth || ++leaves > opts.max_leaves) {
      exhausted = true;
      continue;
    }
    // split the variable halved the fewest times (widest relative to the root box)
    std::size_t axis = 0;
    for (std::size_t k = 1; k < m; ++k) {
      if (node.splits[k] < node.splits[axis]) axis = k;
    }
    Tensor left = node.t;
    Tensor right = node.t;
    {
      const std::size_t len = node.t.deg[axis] + 1;
      const std::size_t s = node.t.stride[axis];
      Dense fiber(len), lf, rf;
      for (std::size_t base = 0; base < c.size(); ++base) {
        if ((base / s) % len != 0) continue;
        for (std::size_t i = 0; i < len; ++i) fiber[i] = c[base + i * s];
        de_casteljau_half(fiber, lf, rf);
        for (std::size_t i = 0; i < len; ++i) {
          left.c[base + i * s] = lf[i];
          right.c[base + i * s] = rf[i];
        }
      }
    }
    Rational mid = (node.box[axis].lower + node.box[axis].upper) / 2;
    auto lbox = node.box;
    auto rbox = node.box;
    lbox[axis].upper = mid;
    rbox[axis].lower = mid;
    auto splits = node.splits;
    ++splits[axis];
    stack.push_back({std::move(right), std::move(rbox), splits, node.depth + 1});
    stack.push_back({std::move(left), std::move(lbox), splits, node.depth + 1});
  }
  if (exhausted) return Inconclusive{deepest};
  return Certified{};
}

namespace {

struct Tri {
  std::array<Point2, 3> v;
  Interval q;
  int depth;
};

Rational edge_len2(const Point2& a, const Point2& b) {
  Rational dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

}  // namespace

PositivityVerdict certify_nonnegative_on_prism(const RatPoly& p, Var u0, Var u1,
                                               const std::vector<Point2>& polygon, Var q,
                                               const Interval& q_range, const CertifyOptions& opts) {
  for (Var v : p.variables()) {
    if (v != u0 && v != u1 && v != q) throw std::invalid_argument("unexpected variable " + std::string(var_name(v)));
  }
  if (polygon.size() < 3) throw std::invalid_argument("polygon needs three vertices");
  // Local coordinates: barycentric l1, l2 and interval parameter s.
  const Var l1 = Var::v1, l2 = Var::v2, sv = Var::w1;
  for (Var v : {u0, u1, q}) {
    if (v == l1 || v == l2 || v == sv) throw std::invalid_argument("reserved variable in prism certification");
  }
  auto point = [&](const Point2& at, const Rational& qv) {
    return std::vector<std::pair<Var, Rational>>{{u0, at[0]}, {u1, at[1]}, {q, qv}};
  };
  auto value = [&](const Point2& at, const Rational& qv) {
    return p.evaluate(Valuation{{u0, at[0]}, {u1, at[1]}, {q, qv}});
  };

  std::vector<Tri> stack;
  for (std::size_t i = polygon.size() - 1; i >= 2; --i) stack.push_back({{polygon[0], polygon[i - 1], polygon[i]}, q_range, 0});
  long leaves = 0;
  int deepest = 0;
  bool exhausted = false;
  while (!stack.empty()) {
    Tri tri = std::move(stack.back());
    stack.pop_back();
    deepest = std::max(deepest, tri.depth);
    const auto& [A, B, C] = tri.v;
    RatPoly local = p;
    for (int axis = 0; axis < 2; ++axis) {
      RatPoly r = RatPoly(A[axis]) + RatPoly::variable(l1) * Rational(B[axis] - A[axis]) +
                  RatPoly::variable(l2) * Rational(C[axis] - A[axis]);
      local = local.substitute(axis == 0 ? u0 : u1, r);
    }
    local = local.substitute(q, RatPoly(tri.q.lower) + RatPoly::variable(sv) * Rational(tri.q.upper - tri.q.lower));
    unsigned D = 0, e = 0;
    for (const auto& [mono, c] : local.terms()) {
      D = std::max(D, mono.exponent(l1) + mono.exponent(l2));
      e = std::max(e, mono.exponent(sv));
    }
    // a[j1][j2][l] -> triangle Bernstein per l, then interval Bernstein.
    const std::size_t W = D + 1, E = e + 1;
    std::vector<Rational> a(W * W * E);
    auto at3 = [&](std::size_t i1, std::size_t i2, std::size_t l) -> std::size_t { return (i1 * W + i2) * E + l; };
    for (const auto& [mono, c] : local.terms()) a[at3(mono.exponent(l1), mono.exponent(l2), mono.exponent(sv))] += c;
    std::vector<Rational> b(W * W * E);
    for (std::size_t l = 0; l < E; ++l) {
      for (std::size_t i1 = 0; i1 <= D; ++i1) {
        for (std::size_t i2 = 0; i1 + i2 <= D; ++i2) {
          Rational sum = 0;
          for (std::size_t j1 = 0; j1 <= i1; ++j1) {
            for (std::size_t j2 = 0; j2 <= i2; ++j2) {
              const Rational& coef = a[at3(j1, j2, l)];
              if (sgn(coef) == 0) continue;
              Integer multi = factorial(D) / (factorial(static_cast<unsigned>(j1)) * factorial(static_cast<unsigned>(j2)) *
                                              factorial(static_cast<unsigned>(D - j1 - j2)));
              sum += coef * Rational(binomial(static_cast<unsigned>(i1), static_cast<unsigned>(j1)) *
                                     binomial(static_cast<unsigned>(i2), static_cast<unsigned>(j2))) /
                     Rational(multi);
            }
          }
          b[at3(i1, i2, l)] = sum;
        }
      }
    }
    bool nonneg = true;
    std::vector<Rational> bern(W * W * E);
    for (std::size_t i1 = 0; i1 <= D; ++i1) {
      for (std::size_t i2 = 0; i1 + i2 <= D; ++i2) {
        for (std::size_t l2i = 0; l2i < E; ++l2i) {
          Rational c = 0;
          for (std::size_t l = 0; l <= l2i; ++l) {
            const Rational& coef = b[at3(i1, i2, l)];
            if (sgn(coef) == 0) continue;
            c += coef * Rational(binomial(static_cast<unsigned>(l2i), static_cast<unsigned>(l))) /
                 Rational(binomial(e, static_cast<unsigned>(l)));
          }
          if (c < 0) nonneg = false;
          bern[at3(i1, i2, l2i)] = c;
        }
      }
    }
    // Spread of the coefficients along q and across the triangle.
    Rational q_spread = 0, t_spread = 0;
    for (std::size_t i1 = 0; i1 <= D; ++i1) {
      for (std::size_t i2 = 0; i1 + i2 <= D; ++i2) {
        for (std::size_t l = 0; l + 1 < E; ++l) {
          Rational d = abs(bern[at3(i1, i2, l + 1)] - bern[at3(i1, i2, l)]);
          if (d > q_spread) q_spread = d;
        }
      }
    }
    for (std::size_t l = 0; l < E; ++l) {
      for (std::size_t i1 = 0; i1 <= D; ++i1) {
        for (std::size_t i2 = 0; i1 + i2 <= D; ++i2) {
          if (i1 + i2 < D) {
            Rational d1 = abs(bern[at3(i1 + 1, i2, l)] - bern[at3(i1, i2, l)]);
            Rational d2 = abs(bern[at3(i1, i2 + 1, l)] - bern[at3(i1, i2, l)]);
            if (d1 > t_spread) t_spread = d1;
            if (d2 > t_spread) t_spread = d2;
          }
        }
      }
    }
    if (nonneg) {
      ++leaves;
      continue;
    }
    // Corners, then the centre, as exact witnesses.
    for (const auto& vtx : tri.v) {
      for (const Rational* qv : {&tri.q.lower, &tri.q.upper}) {
        Rational val = value(vtx, *qv);
        if (val < 0) return Counterexample{point(vtx, *qv), val};
      }
    }
    Point2 centre{(A[0] + B[0] + C[0]) / 3, (A[1] + B[1] + C[1]) / 3};
    Rational qmid = (tri.q.lower + tri.q.upper) / 2;
    if (Rational val = value(centre, qmid); val < 0) return Counterexample{point(centre, qmid), val};
    if (tri.depth >= opts.max_depth || ++leaves > opts.max_leaves) {
      exhausted = true;
      continue;
    }
    if (q_spread > t_spread) {
      Tri lo = tri, hi = tri;
      lo.q.upper = qmid;
      hi.q.lower = qmid;
      ++lo.depth;
      ++hi.depth;
      stack.push_back(std::move(hi));
      stack.push_back(std::move(lo));
    } else {
      int longest = 0;  // edge (i, i+1)
      Rational best = -1;
      for (int i = 0; i < 3; ++i) {
        Rational len = edge_len2(tri.v[i], tri.v[(i + 1) % 3]);
        if (len > best) {
          best = len;
          longest = i;
        }
      }
      const Point2& P = tri.v[longest];
      const Point2& Q = tri.v[(longest + 1) % 3];
      const Point2& R = tri.v[(longest + 2) % 3];
      Point2 M{(P[0] + Q[0]) / 2, (P[1] + Q[1]) / 2};
      Tri first = tri, second = tri;
      first.v = {P, M, R};
      second.v = {M, Q, R};
      ++first.depth;
      ++second.depth;
      stack.push_back(std::move(second));
      stack.push_back(std::move(first));
    }
  }
  if (exhausted) return Inconclusive{deepest};
  return Certified{};
}

}  // namespace fnvcg
