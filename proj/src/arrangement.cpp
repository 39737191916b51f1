// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/arrangement.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

namespace fnvcg {

LinForm SymPlane::at(const Rational& t, const Rational& x, const Rational& y) const {
  return {a, Rational(p[0] * t + p[1] * x + p[2] * y + p[3])};
}

Rational AffineForm::eval(const std::array<Rational, 3>& z, int dims) const {
  Rational s = c;
  for (int i = 0; i < dims; ++i) {
    if (a[i] != 0) s += a[i] * z[i];
  }
  return s;
}

int AffineForm::top_dim() const {
  for (int i = 2; i >= 0; --i) {
    if (a[i] != 0) return i;
  }
  return -1;
}

bool AffineForm::normalize() {
  int t = top_dim();
  if (t < 0) return false;
  Rational s = a[t];
  if (s != 1) {
    for (auto& x : a) x /= s;
    c /= s;
  }
  return true;
}

bool operator<(const AffineForm& l, const AffineForm& r) {
  for (int i = 0; i < 3; ++i) {
    if (l.a[i] != r.a[i]) return l.a[i] < r.a[i];
  }
  return l.c < r.c;
}

bool operator==(const AffineForm& l, const AffineForm& r) { return l.a == r.a && l.c == r.c; }

Cad::Cad(int dims, std::vector<AffineForm> dom_lo, std::vector<AffineForm> dom_hi,
         const std::vector<AffineForm>& planes)
    : dims_(dims), dom_lo_(std::move(dom_lo)), dom_hi_(std::move(dom_hi)) {
  std::set<AffineForm> level;
  auto add = [&](AffineForm f) {
    for (int i = dims_; i < 3; ++i) f.a[i] = 0;
    if (f.normalize()) level.insert(std::move(f));
  };
  for (const auto& p : planes) add(p);
  for (int i = 0; i < dims_; ++i) {
    for (const auto* dom : {&dom_lo_[i], &dom_hi_[i]}) {
      AffineForm f;
      for (int k = 0; k < 3; ++k) f.a[k] = -dom->a[k];
      f.c = -dom->c;
      f.a[i] = 1;
      add(f);
    }
  }
  bounds_.resize(dims_);
  for (int L = dims_ - 1; L >= 0; --L) {
    std::set<AffineForm> next;
    std::vector<AffineForm> top;
    for (const auto& f : level) {
      if (f.top_dim() == L) {
        // z_L = -(rest)
        AffineForm b;
        for (int i = 0; i < L; ++i) b.a[i] = -f.a[i];
        b.c = -f.c;
        top.push_back(std::move(b));
      } else {
        next.insert(f);
      }
    }
    std::sort(top.begin(), top.end());
    top.erase(std::unique(top.begin(), top.end()), top.end());
    for (std::size_t i = 0; i < top.size(); ++i) {
      for (std::size_t j = i + 1; j < top.size(); ++j) {
        AffineForm diff;
        for (int k = 0; k < 3; ++k) diff.a[k] = top[i].a[k] - top[j].a[k];
        diff.c = top[i].c - top[j].c;
        if (diff.normalize()) next.insert(std::move(diff));
      }
    }
    bounds_[L] = std::move(top);
    level = std::move(next);
  }
}

std::vector<std::pair<AffineForm, Rational>> Cad::breakpoints(int L, const std::array<Rational, 3>& z) const {
  Rational lo = dom_lo_[L].eval(z, L);
  Rational hi = dom_hi_[L].eval(z, L);
  std::vector<std::pair<Rational, const AffineForm*>> pts;
  pts.emplace_back(lo, &dom_lo_[L]);
  pts.emplace_back(hi, &dom_hi_[L]);
  for (const auto& b : bounds_[L]) {
    Rational v = b.eval(z, L);
    if (v > lo && v < hi) pts.emplace_back(std::move(v), &b);
  }
  std::stable_sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<std::pair<AffineForm, Rational>> out;
  for (auto& p : pts) {
    if (!out.empty() && out.back().second == p.first) continue;
    out.emplace_back(*p.second, p.first);
  }
  if (out.size() < 2) out.clear();
  return out;
}

namespace {

SymPlane plane(Coords a, std::array<Rational, 4> p) { return {std::move(a), std::move(p)}; }

Dense dense_mul(const Dense& a, const Dense& b) {
  if (a.empty() || b.empty()) return {};
  Dense out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Dense dense_pow(const Dense& a, int e) {
  Dense out{Rational(1)};
  for (int i = 0; i < e; ++i) out = dense_mul(out, a);
  return out;
}

Dense dense_scale(Dense a, const Rational& c) {
  for (auto& x : a) x *= c;
  return a;
}

}  // namespace

std::vector<SymPlane> utility_planes(int demand, bool attack) {
  // coordinates (v1, v2, w1); parameters (t, x, y, 1)
  std::vector<SymPlane> out;
  if (!attack) {
    if (demand == 1) {
      out.push_back(plane({0, 1, 0}, {-1, 0, 0, 0}));    // v2 = t
      out.push_back(plane({-1, 0, 2}, {-1, 0, 0, 0}));   // 2 w1 = t + v1
      out.push_back(plane({-1, -1, 2}, {0, 0, 0, 0}));   // 2 w1 = v1 + v2
    } else {
      out.push_back(plane({1, 1, 0}, {-2, 0, 0, 0}));    // v1 + v2 = 2t
      out.push_back(plane({0, 0, 1}, {-1, 0, 0, 0}));    // w1 = t
      out.push_back(plane({-1, -1, 2}, {0, 0, 0, 0}));   // 2 w1 = v1 + v2
    }
    return out;
  }
  out.push_back(plane({1, 0, 0}, {0, 0, -1, 0}));     // v1 = y
  out.push_back(plane({0, 1, 0}, {0, -1, 0, 0}));     // v2 = x
  out.push_back(plane({0, 1, 0}, {0, 0, -1, 0}));     // v2 = y
  out.push_back(plane({0, 0, 2}, {0, -1, -1, 0}));    // 2 w1 = x + y
  out.push_back(plane({-1, 0, 2}, {0, -1, 0, 0}));    // 2 w1 = x + v1
  out.push_back(plane({-1, 0, 2}, {0, 0, -1, 0}));    // 2 w1 = y + v1
  out.push_back(plane({-1, -1, 2}, {0, 0, 0, 0}));    // 2 w1 = v1 + v2
  return out;
}

std::vector<SymPlane> domain_planes() {
  return {plane({1, 0, 0}, {0, 0, 0, 0}),  plane({1, 0, 0}, {0, 0, 0, -1}),
          plane({0, 1, 0}, {0, 0, 0, 0}),  plane({-1, 1, 0}, {0, 0, 0, 0}),
          plane({0, 0, 1}, {0, 0, 0, 0}),  plane({0, 0, 1}, {0, 0, 0, -1})};
}

KCase k_case(const BetaDist& dist, int n_tilde, int k) {
  if (n_tilde < 1 || k < 0 || k > n_tilde) throw std::out_of_range("k outside 0..n_tilde");
  Dense f = beta_pdf_dense(dist.alpha, dist.beta);
  Dense F = beta_cdf_dense(dist.alpha, dist.beta);
  KCase kc;
  const int m = n_tilde - k;  // 2-type adversaries
  if (k >= 1) {
    kc.active[0] = true;
    kc.density[0] = k >= 2 ? dense_scale(f, Rational(k * (k - 1))) : f;
  }
  if (k >= 2) {
    kc.active[1] = true;
    kc.density[1] = dense_mul(f, dense_pow(F, k - 2));
  }
  if (m >= 1) {
    kc.active[2] = true;
    kc.density[2] = dense_scale(dense_mul(f, dense_pow(F, m - 1)), Rational(m));
  }
  return kc;
}

namespace {

struct Bound {
  AffineForm lo, hi;
};

class Engine {
 public:
  Engine(const KCase& kc, const std::vector<LinForm>& planes, const Integrand& f) : f_(f) {
    for (int i = 0; i < 3; ++i) {
      if (kc.active[i]) {
        orig_.push_back(i);
        rho_.push_back(kc.density[i]);
      }
    }
    d_ = static_cast<int>(orig_.size());
    if (d_ == 0) throw std::invalid_argument("nothing to integrate");
    static constexpr Var kVars[3] = {Var::v1, Var::v2, Var::w1};
    for (int i = 0; i < d_; ++i) vars_.push_back(kVars[orig_[i]]);

    std::vector<AffineForm> lo(d_), hi(d_);
    for (int i = 0; i < d_; ++i) {
      if (orig_[i] == 1) {
        hi[i].a[0] = 1;  // v2 <= v1, and v1 is dimension 0
      } else {
        hi[i].c = 1;
      }
    }
    std::vector<AffineForm> forms;
    for (const auto& p : planes) {
      AffineForm f;
      for (int i = 0; i < d_; ++i) f.a[i] = p.a[orig_[i]];
      f.c = p.c;
      forms.push_back(std::move(f));
    }
    cad_.emplace(d_, std::move(lo), std::move(hi), forms);

    // R0 = int rho, R1 = int z rho for the innermost dimension
    const Dense& rho = rho_.back();
    r0_.assign(rho.size() + 1, Rational(0));
    r1_.assign(rho.size() + 2, Rational(0));
    for (std::size_t i = 0; i < rho.size(); ++i) {
      r0_[i + 1] = rho[i] / static_cast<unsigned long>(i + 1);
      r1_[i + 2] = rho[i] / static_cast<unsigned long>(i + 2);
    }
  }

  Rational run(IntegrationStats* stats) {
    std::array<Rational, 3> z{};
    std::vector<Bound> chain;
    RatPoly result = level(0, z, chain);
    if (stats) stats->leaves += leaves_;
    if (!result.is_constant()) throw std::logic_error("integration left free variables");
    return result.constant_term();
  }

 private:
  RatPoly as_poly(const AffineForm& f, int dims) const {
    std::vector<RatPoly::Term> terms;
    if (f.c != 0) terms.emplace_back(Monomial(), f.c);
    for (int i = 0; i < dims; ++i) {
      if (f.a[i] != 0) terms.emplace_back(Monomial::of(vars_[i]), f.a[i]);
    }
    return RatPoly::from_terms(std::move(terms));
  }

  const RatPoly& composed(int which, const AffineForm& f, int dims) {
    auto key = std::make_pair(which, f);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const Dense& r = which == 0 ? r0_ : r1_;
    RatPoly ell = as_poly(f, dims);
    RatPoly acc;
    for (std::size_t i = r.size(); i-- > 0;) acc = acc * ell + RatPoly(r[i]);
    return cache_.emplace(key, std::move(acc)).first->second;
  }

  // Point inside the cell chain at fractions fr.
  std::array<Rational, 3> point(const std::vector<Bound>& chain, const std::array<Rational, 3>& fr) const {
    std::array<Rational, 3> z{};
    for (std::size_t i = 0; i < chain.size(); ++i) {
      int L = static_cast<int>(i);
      Rational lo = chain[i].lo.eval(z, L);
      Rational hi = chain[i].hi.eval(z, L);
      z[i] = lo + fr[i] * (hi - lo);
    }
    return z;
  }

  Rational call(const std::array<Rational, 3>& z) const {
    Coords c{};
    for (int i = 0; i < d_; ++i) c[orig_[i]] = z[i];
    return f_(c);
  }

  AffineForm fit_affine(const std::vector<Bound>& chain) const {
    const int n = d_ + 1;
    std::vector<std::array<Rational, 3>> pts;
    std::array<Rational, 3> base{Rational(1, 2), Rational(1, 2), Rational(1, 2)};
    pts.push_back(point(chain, base));
    for (int i = 0; i < d_; ++i) {
      auto fr = base;
      fr[i] = Rational(1, 4);
      pts.push_back(point(chain, fr));
    }
    // rows [z_0 .. z_{d-1}, 1 | value]
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < d_; ++c) m[r][c] = pts[r][c];
      m[r][d_] = 1;
      m[r][n] = call(pts[r]);
    }
    for (int col = 0; col < n; ++col) {
      int piv = col;
      while (piv < n && m[piv][col] == 0) ++piv;
      if (piv == n) throw std::logic_error("degenerate cell sample");
      std::swap(m[piv], m[col]);
      for (int r = 0; r < n; ++r) {
        if (r == col || m[r][col] == 0) continue;
        Rational factor = m[r][col] / m[col][col];
        for (int c = col; c <= n; ++c) m[r][c] -= factor * m[col][c];
      }
    }
    AffineForm g;
    for (int c = 0; c < d_; ++c) g.a[c] = m[c][n] / m[c][c];
    g.c = m[d_][n] / m[d_][d_];
    for (const auto& fr : {std::array<Rational, 3>{Rational(3, 4), Rational(3, 4), Rational(3, 4)},
                           std::array<Rational, 3>{Rational(1, 3), Rational(5, 7), Rational(1, 6)}}) {
      auto z = point(chain, fr);
      if (g.eval(z, d_) != call(z)) {
        throw std::logic_error("integrand is not affine on a decomposition cell");
      }
    }
    return g;
  }

  RatPoly level(int L, std::array<Rational, 3>& z, std::vector<Bound>& chain) {
    auto brk = cad_->breakpoints(L, z);
    RatPoly total;
    if (L == d_ - 1) {
      // innermost: closed form via R0, R1; neighbours with equal integrands merge
      std::vector<std::pair<Bound, AffineForm>> pieces;
      for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
        Bound b{brk[i].first, brk[i + 1].first};
        chain.push_back(b);
        AffineForm g = fit_affine(chain);
        chain.pop_back();
        ++leaves_;
        if (!pieces.empty() && pieces.back().second == g) {
          pieces.back().first.hi = b.hi;
        } else {
          pieces.emplace_back(b, g);
        }
      }
      for (const auto& [b, g] : pieces) {
        AffineForm outer = g;
        outer.a[L] = 0;
        if (!(outer == AffineForm{})) {
          RatPoly diff = composed(0, b.hi, L) - composed(0, b.lo, L);
          total += as_poly(outer, L) * diff;
        }
        if (g.a[L] != 0) {
          RatPoly diff = composed(1, b.hi, L) - composed(1, b.lo, L);
          total += diff * g.a[L];
        }
      }
      return total;
    }
    const Var v = vars_[L];
    RatPoly rho = RatPoly::from_univariate(v, rho_[L]);
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
      Bound b{brk[i].first, brk[i + 1].first};
      z[L] = (brk[i].second + brk[i + 1].second) / 2;
      chain.push_back(b);
      RatPoly inner = level(L + 1, z, chain);
      chain.pop_back();
      if (inner.is_zero()) continue;
      RatPoly anti = (inner * rho).antiderivative(v);
      total += anti.substitute(v, as_poly(b.hi, L)) - anti.substitute(v, as_poly(b.lo, L));
    }
    z[L] = 0;
    return total;
  }

  const Integrand& f_;
  int d_ = 0;
  std::vector<int> orig_;
  std::vector<Var> vars_;
  std::vector<Dense> rho_;
  std::optional<Cad> cad_;
  Dense r0_, r1_;
  std::map<std::pair<int, AffineForm>, RatPoly> cache_;
  long leaves_ = 0;
};

}  // namespace

Rational integrate_piecewise_affine(const KCase& kc, const std::vector<LinForm>& planes,
                                    const Integrand& f, IntegrationStats* stats) {
  Engine e(kc, planes, f);
  return e.run(stats);
}

}  // namespace fnvcg
