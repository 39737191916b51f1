// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/chambers.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fnvcg {

std::vector<Var> ParamSlice::free_vars() const {
  std::vector<Var> out;
  if (!t) out.push_back(Var::t);
  if (!x) out.push_back(Var::x);
  if (!y) out.push_back(Var::y);
  return out;
}

std::string ParamSlice::describe() const {
  std::ostringstream os;
  const char* sep = "";
  auto put = [&](const char* name, const std::optional<Rational>& v) {
    if (!v) return;
    os << sep << name << "=" << to_fraction_string(*v);
    sep = ",";
  };
  put("t", t);
  put("x", x);
  put("y", y);
  if (!t && !x && !y) os << "full";
  return os.str();
}

Scenario scenario_at(int demand, int n, const ParamSlice& slice, const std::vector<Rational>& free_values) {
  Rational t = slice.t.value_or(0), x = slice.x.value_or(0), y = slice.y.value_or(0);
  std::size_t i = 0;
  if (!slice.t) t = free_values.at(i++);
  if (!slice.x) x = free_values.at(i++);
  if (!slice.y) y = free_values.at(i++);
  return make_attack(demand, t, x, y, n);
}

namespace {

std::array<bool, 3> active_mask(int n_tilde, int k) {
  if (k == 0) return {false, false, true};
  if (k == 1) return {true, false, n_tilde >= 2};
  return {true, true, n_tilde - k >= 1};
}

// Null space of the columns given by rows (each row a normal in R^3), when it
// is one-dimensional with full support.
std::optional<std::vector<Rational>> circuit(const std::vector<Coords>& rows) {
  const std::size_t m = rows.size();
  // Matrix M (3 x m), columns = normals; solve M lambda = 0.
  std::vector<std::vector<Rational>> M(3, std::vector<Rational>(m));
  for (std::size_t j = 0; j < m; ++j)
    for (int i = 0; i < 3; ++i) M[i][j] = rows[j][i];
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m && r < 3; ++c) {
    std::size_t p = r;
    while (p < 3 && sgn(M[p][c]) == 0) ++p;
    if (p == 3) continue;
    std::swap(M[p], M[r]);
    Rational inv = 1 / M[r][c];
    for (auto& v : M[r]) v *= inv;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i == r || sgn(M[i][c]) == 0) continue;
      Rational f = M[i][c];
      for (std::size_t j = 0; j < m; ++j) M[i][j] -= f * M[r][j];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  if (m - r != 1) return std::nullopt;
  std::size_t free_col = 0;
  for (std::size_t c = 0; c < m; ++c)
    if (std::find(pivot_col.begin(), pivot_col.end(), static_cast<int>(c)) == pivot_col.end()) free_col = c;
  std::vector<Rational> lambda(m);
  lambda[free_col] = 1;
  for (std::size_t i = 0; i < r; ++i) lambda[pivot_col[i]] = -M[i][free_col];
  for (const auto& l : lambda)
    if (sgn(l) == 0) return std::nullopt;
  return lambda;
}

// Parametric part p . (t, x, y, 1) restricted to the slice, over the free dims.
std::optional<AffineForm> restrict_to_slice(const std::array<Rational, 4>& p, const ParamSlice& slice) {
  AffineForm f;
  f.c = p[3];
  int d = 0;
  const std::array<const std::optional<Rational>*, 3> fixed = {&slice.t, &slice.x, &slice.y};
  for (int i = 0; i < 3; ++i) {
    if (*fixed[i]) {
      f.c += p[i] * **fixed[i];
    } else {
      f.a[d++] = p[i];
    }
  }
  if (!f.normalize()) return std::nullopt;
  return f;
}

void subsets(int n, int size, int start, std::vector<int>& cur, const std::function<void()>& fn) {
  if (static_cast<int>(cur.size()) == size) {
    fn();
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, size, i + 1, cur, fn);
    cur.pop_back();
  }
}

std::vector<AffineForm> compute_walls(int demand, int n, const ParamSlice& slice) {
  std::set<AffineForm> walls;
  std::set<std::array<bool, 3>> masks;
  for (int k = 0; k <= n - 1; ++k) masks.insert(active_mask(n - 1, k));
  for (const auto& mask : masks) {
    for (bool attack : {false, true}) {
      std::vector<SymPlane> planes = utility_planes(demand, attack);
      for (auto& p : domain_planes()) planes.push_back(p);
      std::vector<SymPlane> live;
      for (auto& p : planes) {
        for (int i = 0; i < 3; ++i)
          if (!mask[i]) p.a[i] = 0;
        bool zero_normal = sgn(p.a[0]) == 0 && sgn(p.a[1]) == 0 && sgn(p.a[2]) == 0;
        if (zero_normal) {
          if (auto w = restrict_to_slice(p.p, slice)) walls.insert(*w);
        } else {
          live.push_back(p);
        }
      }
      const int d = static_cast<int>(mask[0]) + mask[1] + mask[2];
      const int m = static_cast<int>(live.size());
      std::vector<int> cur;
      for (int size = 2; size <= d + 1; ++size) {
        subsets(m, size, 0, cur, [&] {
          std::vector<Coords> rows;
          for (int i : cur) rows.push_back(live[i].a);
          auto lambda = circuit(rows);
          if (!lambda) return;
          std::array<Rational, 4> w{};
          for (std::size_t j = 0; j < cur.size(); ++j)
            for (int i = 0; i < 4; ++i) w[i] += (*lambda)[j] * live[cur[j]].p[i];
          if (auto f = restrict_to_slice(w, slice)) walls.insert(*f);
        });
      }
    }
  }
  return {walls.begin(), walls.end()};
}

struct Domain {
  std::vector<AffineForm> lo, hi;
};

Domain slice_domain(const ParamSlice& slice) {
  Domain d;
  const auto fv = slice.free_vars();
  for (std::size_t i = 0; i < fv.size(); ++i) {
    AffineForm lo, hi;
    hi.c = 1;
    if (fv[i] == Var::y) {
      if (slice.x) {
        hi.c = *slice.x;
      } else {
        hi.c = 0;
        hi.a[i - 1] = 1;  // x precedes y
      }
    }
    d.lo.push_back(lo);
    d.hi.push_back(hi);
  }
  return d;
}

Rational cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Keeps the part of a convex polygon where s * f >= 0.
std::vector<Point2> clip(const std::vector<Point2>& poly, const AffineForm& f, int s) {
  auto val = [&](const Point2& p) { return Rational(s * (f.a[0] * p[0] + f.a[1] * p[1] + f.c)); };
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    Rational va = val(a), vb = val(b);
    if (sgn(va) >= 0) out.push_back(a);
    if ((sgn(va) > 0 && sgn(vb) < 0) || (sgn(va) < 0 && sgn(vb) > 0)) {
      Rational r = va / (va - vb);
      out.push_back({a[0] + r * (b[0] - a[0]), a[1] + r * (b[1] - a[1])});
    }
  }
  // Drop repeated and collinear vertices.
  std::vector<Point2> clean;
  for (const auto& p : out)
    if (clean.empty() || clean.back() != p) clean.push_back(p);
  while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
  bool changed = true;
  while (changed && clean.size() > 2) {
    changed = false;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const auto& prev = clean[(i + clean.size() - 1) % clean.size()];
      const auto& next = clean[(i + 1) % clean.size()];
      if (sgn(cross(prev, clean[i], next)) == 0) {
        clean.erase(clean.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return clean;
}

void collect_cells(const Cad& cad, int L, std::array<Rational, 3>& z, ParamCell& cell,
                   const std::function<void(const ParamCell&, const std::array<Rational, 3>&)>& fn) {
  if (L == cad.dims()) {
    fn(cell, z);
    return;
  }
  auto bp = cad.breakpoints(L, z);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    z[L] = (bp[i].second + bp[i + 1].second) / 2;
    cell.bounds.emplace_back(bp[i].first, bp[i + 1].first);
    collect_cells(cad, L + 1, z, cell, fn);
    cell.bounds.pop_back();
  }
  z[L] = 0;
}

// Corner points of a cylindrical cell; its convex hull is the cell.
std::vector<std::array<Rational, 3>> cell_corners(const ParamCell& cell) {
  std::vector<std::array<Rational, 3>> pts(1);
  for (std::size_t L = 0; L < cell.bounds.size(); ++L) {
    std::vector<std::array<Rational, 3>> next;
    for (const auto& p : pts) {
      for (const AffineForm* f : {&cell.bounds[L].first, &cell.bounds[L].second}) {
        auto q = p;
        q[L] = f->eval(p, static_cast<int>(L));
        next.push_back(q);
      }
    }
    pts = std::move(next);
  }
  return pts;
}

}  // namespace

int ChamberComplex::locate(const std::vector<Rational>& point) const {
  std::array<Rational, 3> z{};
  for (std::size_t i = 0; i < point.size(); ++i) z[i] = point[i];
  const int dims = static_cast<int>(free.size());
  std::vector<int> s(walls.size());
  for (std::size_t i = 0; i < walls.size(); ++i) s[i] = sgn(walls[i].eval(z, dims));
  for (std::size_t c = 0; c < chambers.size(); ++c) {
    bool ok = true;
    for (std::size_t i = 0; i < walls.size() && ok; ++i) ok = s[i] == 0 || s[i] == chambers[c].signs[i];
    if (ok) {
      // Also require the point to be in the domain.
      Domain d = slice_domain(slice);
      for (int L = 0; L < dims && ok; ++L) ok = z[L] >= d.lo[L].eval(z, L) && z[L] <= d.hi[L].eval(z, L);
      return ok ? static_cast<int>(c) : -1;
    }
  }
  return -1;
}

ChamberComplex enumerate_chambers(int demand, int n, const ParamSlice& slice) {
  if (demand != 1 && demand != 2) throw std::invalid_argument("demand must be 1 or 2");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  ChamberComplex cx;
  cx.demand = demand;
  cx.n = n;
  cx.slice = slice;
  cx.free = slice.free_vars();
  const int dims = static_cast<int>(cx.free.size());
  if (dims == 0) throw std::invalid_argument("slice has no free parameter");
  for (auto& w : compute_walls(demand, n, slice)) {
    for (int i = dims; i < 3; ++i)
      if (sgn(w.a[i]) != 0) throw std::logic_error("wall outside free dimensions");
    cx.walls.push_back(w);
  }
  Domain dom = slice_domain(slice);
  Cad cad(dims, dom.lo, dom.hi, cx.walls);
  std::map<std::vector<std::int8_t>, std::size_t> index;
  std::array<Rational, 3> z{};
  ParamCell cell;
  collect_cells(cad, 0, z, cell, [&](const ParamCell& c, const std::array<Rational, 3>& at) {
    std::vector<std::int8_t> signs(cx.walls.size());
    for (std::size_t i = 0; i < cx.walls.size(); ++i) {
      int s = sgn(cx.walls[i].eval(at, dims));
      if (s == 0) throw std::logic_error("cell sample on a wall");
      signs[i] = static_cast<std::int8_t>(s);
    }
    auto [it, fresh] = index.emplace(signs, cx.chambers.size());
    if (fresh) {
      Chamber ch;
      ch.signs = signs;
      for (int i = 0; i < dims; ++i) ch.interior.set(cx.free[i], at[i]);
      cx.chambers.push_back(std::move(ch));
    }
    cx.chambers[it->second].cells.push_back(c);
  });
  for (auto& ch : cx.chambers) {
    std::vector<Rational> lo(dims), hi(dims);
    bool first = true;
    for (const auto& c : ch.cells) {
      for (const auto& p : cell_corners(c)) {
        for (int i = 0; i < dims; ++i) {
          if (first || p[i] < lo[i]) lo[i] = p[i];
          if (first || p[i] > hi[i]) hi[i] = p[i];
        }
        first = false;
      }
    }
    for (int i = 0; i < dims; ++i) ch.box.set(cx.free[i], lo[i], hi[i]);
    if (dims == 2) {
      std::vector<Point2> poly;
      std::array<Rational, 3> p0{};
      Rational h0 = dom.hi[1].eval(p0, 1), l0 = dom.lo[1].eval(p0, 1);
      std::array<Rational, 3> p1{Rational(1), 0, 0};
      Rational h1 = dom.hi[1].eval(p1, 1), l1 = dom.lo[1].eval(p1, 1);
      for (Point2 v : {Point2{0, l0}, Point2{1, l1}, Point2{1, h1}, Point2{0, h0}})
        if (poly.empty() || (poly.back() != v && poly.front() != v)) poly.push_back(v);
      for (std::size_t i = 0; i < cx.walls.size() && poly.size() >= 3; ++i) poly = clip(poly, cx.walls[i], ch.signs[i]);
      if (poly.size() < 3) throw std::logic_error("degenerate chamber polygon");
      ch.polygon = std::move(poly);
    }
  }
  return cx;
}

unsigned diff_degree_bound(const BetaDist& dist, int n_tilde, int k) {
  KCase kc = k_case(dist, n_tilde, k);
  unsigned deg = 1;
  for (int i = 0; i < 3; ++i) {
    if (!kc.active[i]) continue;
    deg += 1;
    std::size_t d = kc.density[i].size();
    while (d > 0 && sgn(kc.density[i][d - 1]) == 0) --d;
    if (d > 1) deg += static_cast<unsigned>(d - 1);
  }
  return deg;
}

namespace {

std::vector<Monomial> monomials_upto(const std::vector<Var>& vars, unsigned deg) {
  std::vector<Monomial> out{Monomial{}};
  for (Var v : vars) {
    std::vector<Monomial> next;
    for (const auto& m : out)
      for (unsigned e = 0; m.total_degree() + e <= deg; ++e) next.push_back(m.with(v, e));
    out = std::move(next);
  }
  return out;
}

Rational monomial_value(const Monomial& m, const std::vector<Var>& vars, const std::vector<Rational>& at) {
  Rational v = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    unsigned e = m.exponent(vars[i]);
    if (e > 0) v *= rational_pow(at[i], e);
  }
  return v;
}

// Solves A c = b exactly; nullopt if singular.
std::optional<std::vector<Rational>> solve(std::vector<std::vector<Rational>> A, std::vector<Rational> b) {
  const std::size_t n = A.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(A[p][c]) == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    Rational inv = 1 / A[c][c];
    for (std::size_t j = c; j < n; ++j) A[c][j] *= inv;
    b[c] *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || sgn(A[i][c]) == 0) continue;
      Rational f = A[i][c];
      for (std::size_t j = c; j < n; ++j) A[i][j] -= f * A[c][j];
      b[i] -= f * b[c];
    }
  }
  return b;
}

}  // namespace

RatPoly interpolate_diff_polynomial(int demand, const BetaDist& dist, int n, const ChamberComplex& cx,
                                    const Chamber& chamber, const InterpolationOptions& opts) {
  const int nt = n - 1;
  const int dims = static_cast<int>(cx.free.size());
  std::vector<unsigned> degs(nt + 1);
  unsigned max_deg = 0;
  for (int k = 0; k <= nt; ++k) max_deg = std::max(max_deg, degs[k] = diff_degree_bound(dist, nt, k));
  const auto all_monos = monomials_upto(cx.free, max_deg);

  std::mt19937_64 rng(opts.seed);
  std::set<std::vector<Rational>> seen;
  auto draw_node = [&]() {
    for (;;) {
      const auto& cell = chamber.cells[rng() % chamber.cells.size()];
      std::array<Rational, 3> z{};
      for (int L = 0; L < dims; ++L) {
        Rational lo = cell.bounds[L].first.eval(z, L), hi = cell.bounds[L].second.eval(z, L);
        long den = 3 + static_cast<long>(rng() % 29);
        long num = 1 + static_cast<long>(rng() % (den - 1));
        z[L] = lo + make_rational(num, den) * (hi - lo);
      }
      std::vector<Rational> node(z.begin(), z.begin() + dims);
      if (seen.insert(node).second) return node;
    }
  };
  auto per_k_at = [&](const std::vector<Rational>& node) {
    return expected_diff_poly_q(scenario_at(demand, n, cx.slice, node), dist).per_k;
  };

  for (int attempt = 0; attempt < 5; ++attempt) {
    std::vector<std::vector<Rational>> nodes;
    std::vector<std::vector<Rational>> values;
    for (std::size_t i = 0; i < all_monos.size(); ++i) {
      nodes.push_back(draw_node());
      values.push_back(per_k_at(nodes.back()));
    }
    std::vector<RatPoly> per_k(nt + 1);
    bool singular = false;
    for (int k = 0; k <= nt && !singular; ++k) {
      auto monos = monomials_upto(cx.free, degs[k]);
      const std::size_t u = monos.size();
      std::vector<std::vector<Rational>> A(u, std::vector<Rational>(u));
      std::vector<Rational> b(u);
      for (std::size_t i = 0; i < u; ++i) {
        for (std::size_t j = 0; j < u; ++j) A[i][j] = monomial_value(monos[j], cx.free, nodes[i]);
        b[i] = values[i][k];
      }
      auto c = solve(std::move(A), std::move(b));
      if (!c) {
        singular = true;
        break;
      }
      std::vector<RatPoly::Term> terms;
      for (std::size_t j = 0; j < u; ++j) terms.emplace_back(monos[j], (*c)[j]);
      per_k[k] = RatPoly::from_terms(std::move(terms));
    }
    if (singular) continue;
    for (int v = 0; v < opts.validation_nodes; ++v) {
      auto node = draw_node();
      auto want = per_k_at(node);
      Valuation at;
      for (int i = 0; i < dims; ++i) at.set(cx.free[i], node[i]);
      for (int k = 0; k <= nt; ++k) {
        if (per_k[k].evaluate(at) != want[k]) {
          throw std::runtime_error("interpolant disagrees with a held-out node in chamber at " +
                                   cx.slice.describe());
        }
      }
    }
    return binomial_mixture(per_k);
  }
  throw std::runtime_error("interpolation nodes kept producing a singular system");
}

}  // namespace fnvcg
