// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact integration of piecewise-affine functions against product densities
// over the order-statistic domain 0 <= v2 <= v1 <= 1, 0 <= w1 <= 1, by
// cylindrical decomposition along (v1, v2, w1).

#include "fnvcg/distributions.hpp"
#include "fnvcg/polynomial.hpp"

#include <array>
#include <functional>
#include <vector>

namespace fnvcg {

using Coords = std::array<Rational, 3>;  // (v1, v2, w1)

// a . z + c over (v1, v2, w1)
struct LinForm {
  Coords a{};
  Rational c = 0;
};

// a . z + p . (t, x, y, 1) = 0; the parameter part is symbolic.
struct SymPlane {
  Coords a{};
  std::array<Rational, 4> p{};

  LinForm at(const Rational& t, const Rational& x, const Rational& y) const;
};

// Breakpoint hyperplanes of the truthful or attack utility.
std::vector<SymPlane> utility_planes(int demand, bool attack);
// v1 in {0,1}, v2 in {0,v1}, w1 in {0,1}
std::vector<SymPlane> domain_planes();

// Which order statistics are present with k single-item adversaries out of
// n_tilde, and their (unnormalized-by-binomial) joint density factors.
struct KCase {
  std::array<bool, 3> active{};
  std::array<Dense, 3> density;
};
KCase k_case(const BetaDist& dist, int n_tilde, int k);

// Affine form over up to three ordered dimensions: a . z + c.
struct AffineForm {
  std::array<Rational, 3> a{};
  Rational c = 0;

  Rational eval(const std::array<Rational, 3>& z, int dims) const;
  int top_dim() const;  // -1 for constants
  // Scales so the highest nonzero coefficient is 1; false for constants.
  bool normalize();
};
bool operator<(const AffineForm& l, const AffineForm& r);
bool operator==(const AffineForm& l, const AffineForm& r);

// Cylindrical decomposition of the region lo_L(z_<L) <= z_L <= hi_L(z_<L)
// induced by a hyperplane set: along each dimension the cells above any point
// of a lower-dimensional cell are delimited by the same bound forms.
class Cad {
 public:
  Cad(int dims, std::vector<AffineForm> dom_lo, std::vector<AffineForm> dom_hi,
      const std::vector<AffineForm>& planes);

  int dims() const { return dims_; }
  // Ascending distinct breakpoints along dimension L over the point z (only
  // z_0..z_{L-1} are read), domain ends included; consecutive pairs are cells.
  std::vector<std::pair<AffineForm, Rational>> breakpoints(int L, const std::array<Rational, 3>& z) const;
  std::size_t bound_count(int L) const { return bounds_[L].size(); }

 private:
  int dims_;
  std::vector<AffineForm> dom_lo_, dom_hi_;
  std::vector<std::vector<AffineForm>> bounds_;
};

using Integrand = std::function<Rational(const Coords&)>;

struct IntegrationStats {
  long leaves = 0;
};

// Integral of f times the product density over the active coordinates; f must
// be affine on every cell cut out by `planes` (checked at extra points).
Rational integrate_piecewise_affine(const KCase& kc, const std::vector<LinForm>& planes,
                                    const Integrand& f, IntegrationStats* stats = nullptr);

}  // namespace fnvcg
