// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fnvcg/arrangement.hpp"
#include "fnvcg/expectation.hpp"
#include "fnvcg/polynomial.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace fnvcg {

// Fixes some of (t, x, y); the rest are free parameters, in that order.
struct ParamSlice {
  std::optional<Rational> t, x, y;

  std::vector<Var> free_vars() const;
  std::string describe() const;
};

// A cylindrical cell in parameter space: nested bounds per free dimension.
struct ParamCell {
  std::vector<std::pair<AffineForm, AffineForm>> bounds;  // (lower, upper) per level
};

struct Chamber {
  std::vector<std::int8_t> signs;  // sign of each wall inside the chamber
  std::vector<ParamCell> cells;
  std::vector<Point2> polygon;     // convex, counter-clockwise; two free parameters only
  Box box;                         // bounding box over the free parameters
  Valuation interior;              // a point strictly inside
};

struct ChamberComplex {
  int demand = 1;
  int n = 2;
  ParamSlice slice;
  std::vector<Var> free;
  std::vector<AffineForm> walls;  // over the free parameters
  std::vector<Chamber> chambers;

  // Index of a chamber whose closure contains the point (coordinates of the
  // free parameters), or -1 outside the domain.
  int locate(const std::vector<Rational>& point) const;
};

// Walls: parameter loci where the breakpoint arrangement of some k changes
// combinatorial type (circuits of the hyperplane normals).
ChamberComplex enumerate_chambers(int demand, int n, const ParamSlice& slice);

struct InterpolationOptions {
  int validation_nodes = 20;
  std::uint64_t seed = 0x5eed;
};

// Truth-minus-attack as one polynomial in the free parameters and q, valid
// on the closure of the chamber. Throws std::runtime_error when held-out
// nodes disagree with the interpolant.
RatPoly interpolate_diff_polynomial(int demand, const BetaDist& dist, int n, const ChamberComplex& cx,
                                    const Chamber& chamber, const InterpolationOptions& opts = {});

// Per-k total-degree bound in the parameters.
unsigned diff_degree_bound(const BetaDist& dist, int n_tilde, int k);

// Scenario at a parameter point of the slice (free values in free_vars order).
Scenario scenario_at(int demand, int n, const ParamSlice& slice, const std::vector<Rational>& free_values);

}  // namespace fnvcg
