// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fnvcg {

namespace {
constexpr std::array<std::string_view, kNumVars> kNames = {"q", "x", "y", "t", "v1", "v2", "w1"};
}

std::string_view var_name(Var v) { return kNames[var_index(v)]; }

std::optional<Var> parse_var(std::string_view name) {
  for (std::size_t i = 0; i < kNumVars; ++i) {
    if (kNames[i] == name) return static_cast<Var>(i);
  }
  if (name == "theta") return Var::t;
  return std::nullopt;
}

Monomial Monomial::of(Var v, unsigned e) { return Monomial().with(v, e); }

Monomial Monomial::with(Var v, unsigned e) const {
  if (e > kMaxExponent) throw std::overflow_error("monomial exponent overflow");
  const unsigned shift = kBits * var_index(v);
  std::uint64_t k = key_ & ~(std::uint64_t{kMaxExponent} << shift);
  return Monomial(k | (std::uint64_t{e} << shift));
}

unsigned Monomial::total_degree() const {
  unsigned d = 0;
  for (Var v : kAllVars) d += exponent(v);
  return d;
}

Monomial operator*(Monomial a, Monomial b) {
  Monomial out;
  for (Var v : kAllVars) {
    unsigned e = a.exponent(v) + b.exponent(v);
    if (e > Monomial::kMaxExponent) throw std::overflow_error("monomial exponent overflow");
    out = out.with(v, e);
  }
  return out;
}

Valuation::Valuation(std::initializer_list<std::pair<Var, Rational>> init) {
  for (const auto& [v, r] : init) set(v, r);
}

Valuation& Valuation::set(Var v, Rational value) {
  values_[var_index(v)] = std::move(value);
  present_[var_index(v)] = true;
  return *this;
}

const Rational& Valuation::get(Var v) const {
  if (!present_[var_index(v)]) {
    throw std::invalid_argument("variable " + std::string(var_name(v)) + " is unassigned");
  }
  return values_[var_index(v)];
}

RatPoly::RatPoly(const Rational& c) {
  if (c != 0) terms_.emplace_back(Monomial(), c);
}

RatPoly RatPoly::variable(Var v) { return term(1, Monomial::of(v)); }

RatPoly RatPoly::term(const Rational& c, Monomial m) {
  RatPoly p;
  if (c != 0) p.terms_.emplace_back(m, c);
  return p;
}

RatPoly RatPoly::from_terms(std::vector<Term> terms) {
  RatPoly p;
  p.terms_ = std::move(terms);
  p.normalize();
  return p;
}

void RatPoly::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      if (!merged.empty() && merged.back().second == 0) merged.pop_back();
      merged.push_back(std::move(t));
    }
  }
  if (!merged.empty() && merged.back().second == 0) merged.pop_back();
  terms_ = std::move(merged);
}

bool RatPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_constant());
}

Rational RatPoly::constant_term() const { return coefficient(Monomial()); }

Rational RatPoly::coefficient(Monomial m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Monomial key) { return t.first < key; });
  if (it != terms_.end() && it->first == m) return it->second;
  return 0;
}

unsigned RatPoly::degree(Var v) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.first.exponent(v));
  return d;
}

unsigned RatPoly::total_degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.first.total_degree());
  return d;
}

std::vector<Var> RatPoly::variables() const {
  std::vector<Var> out;
  for (Var v : kAllVars) {
    if (uses(v)) out.push_back(v);
  }
  return out;
}

namespace {

template <typename Op>
std::vector<RatPoly::Term> merge_terms(const std::vector<RatPoly::Term>& a,
                                       const std::vector<RatPoly::Term>& b, Op op) {
  std::vector<RatPoly::Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, op(Rational(0), b[j].second));
      ++j;
    } else {
      Rational c = op(a[i].second, b[j].second);
      if (c != 0) out.emplace_back(a[i].first, std::move(c));
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

RatPoly& RatPoly::operator+=(const RatPoly& o) {
  terms_ = merge_terms(terms_, o.terms_, [](const Rational& x, const Rational& y) { return Rational(x + y); });
  return *this;
}

RatPoly& RatPoly::operator-=(const RatPoly& o) {
  terms_ = merge_terms(terms_, o.terms_, [](const Rational& x, const Rational& y) { return Rational(x - y); });
  return *this;
}

RatPoly operator*(const RatPoly& a, const RatPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::unordered_map<std::uint64_t, Rational> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  std::vector<std::pair<Monomial, Rational*>> order;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma * mb;
      auto [it, inserted] = acc.try_emplace(m.key());
      if (inserted) {
        it->second = ca * cb;
      } else {
        mpq_class prod = ca * cb;
        it->second += prod;
      }
    }
  }
  std::vector<RatPoly::Term> terms;
  terms.reserve(acc.size());
  for (auto& [k, c] : acc) {
    if (c == 0) continue;
    Monomial m;
    for (Var v : kAllVars) {
      m = m.with(v, static_cast<unsigned>((k >> (Monomial::kBits * var_index(v))) & Monomial::kMaxExponent));
    }
    terms.emplace_back(m, std::move(c));
  }
  std::sort(terms.begin(), terms.end(),
            [](const RatPoly::Term& x, const RatPoly::Term& y) { return x.first < y.first; });
  RatPoly out;
  out.terms_ = std::move(terms);
  return out;
}

RatPoly& RatPoly::operator*=(const RatPoly& o) {
  *this = *this * o;
  return *this;
}

RatPoly& RatPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= c;
  return *this;
}

RatPoly RatPoly::operator-() const {
  RatPoly out = *this;
  for (auto& t : out.terms_) t.second = -t.second;
  return out;
}

RatPoly RatPoly::pow(unsigned e) const {
  RatPoly result(Rational(1));
  RatPoly base = *this;
  while (e > 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

Rational RatPoly::evaluate(const Valuation& at) const {
  // powers cached per variable
  std::array<std::vector<Rational>, kNumVars> powers;
  Rational sum = 0;
  for (const auto& [m, c] : terms_) {
    Rational term = c;
    for (Var v : kAllVars) {
      unsigned e = m.exponent(v);
      if (e == 0) continue;
      auto& pw = powers[var_index(v)];
      if (pw.empty()) pw.push_back(1);
      while (pw.size() <= e) pw.push_back(pw.back() * at.get(v));
      term *= pw[e];
    }
    sum += term;
  }
  return sum;
}

RatPoly RatPoly::partial_evaluate(const Valuation& at) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& [m, c] : terms_) {
    Rational coef = c;
    Monomial rest = m;
    for (Var v : kAllVars) {
      unsigned e = m.exponent(v);
      if (e == 0 || !at.has(v)) continue;
      coef *= rational_pow(at.get(v), e);
      rest = rest.with(v, 0);
    }
    out.emplace_back(rest, std::move(coef));
  }
  return from_terms(std::move(out));
}

double RatPoly::evaluate_double(const std::array<double, kNumVars>& at) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = c.get_d();
    for (Var v : kAllVars) {
      unsigned e = m.exponent(v);
      if (e > 0) term *= std::pow(at[var_index(v)], static_cast<int>(e));
    }
    sum += term;
  }
  return sum;
}

std::vector<RatPoly> RatPoly::coefficients_in(Var v) const {
  std::vector<std::vector<Term>> buckets(degree(v) + 1);
  for (const auto& [m, c] : terms_) buckets[m.exponent(v)].emplace_back(m.with(v, 0), c);
  std::vector<RatPoly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
  return out;
}

std::vector<Rational> RatPoly::univariate_coefficients(Var v) const {
  std::vector<Rational> out(degree(v) + 1);
  for (const auto& [m, c] : terms_) {
    if (!(m.with(v, 0) == Monomial())) {
      throw std::invalid_argument("polynomial is not univariate in " + std::string(var_name(v)));
    }
    out[m.exponent(v)] = c;
  }
  return out;
}

RatPoly RatPoly::from_univariate(Var v, const std::vector<Rational>& coeffs) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] != 0) terms.emplace_back(Monomial::of(v, static_cast<unsigned>(i)), coeffs[i]);
  }
  return from_terms(std::move(terms));
}

RatPoly RatPoly::substitute(Var v, const RatPoly& replacement) const {
  auto coeffs = coefficients_in(v);
  // Horner in the replacement
  RatPoly result;
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    result = result * replacement + coeffs[i];
  }
  return result;
}

RatPoly RatPoly::derivative(Var v) const {
  std::vector<Term> out;
  for (const auto& [m, c] : terms_) {
    unsigned e = m.exponent(v);
    if (e == 0) continue;
    out.emplace_back(m.with(v, e - 1), c * e);
  }
  return from_terms(std::move(out));
}

RatPoly RatPoly::antiderivative(Var v) const {
  std::vector<Term> out;
  for (const auto& [m, c] : terms_) {
    unsigned e = m.exponent(v);
    out.emplace_back(m.with(v, e + 1), Rational(c / (e + 1)));
  }
  return from_terms(std::move(out));
}

std::string RatPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // highest total degree first reads better; ties by canonical order
  std::vector<const Term*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const Term* a, const Term* b) {
    return a->first.total_degree() > b->first.total_degree();
  });
  for (const Term* t : order) {
    const auto& [m, c] = *t;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    os << to_fraction_string(abs(c));
    if (!m.is_constant()) {
      os << " *";
      for (Var v : kAllVars) {
        unsigned e = m.exponent(v);
        if (e > 0) os << ' ' << var_name(v) << '^' << e;
      }
    }
  }
  return os.str();
}

RatPoly RatPoly::parse(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& why) -> void {
    throw std::invalid_argument("polynomial parse error at " + std::to_string(pos) + ": " + why);
  };
  std::vector<Term> terms;
  skip_ws();
  if (text.substr(pos) == "0") return {};
  int sign_next = 1;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    sign_next = text[pos] == '-' ? -1 : 1;
    ++pos;
  }
  while (true) {
    skip_ws();
    // coefficient (optional when a variable follows directly)
    Rational coef = 1;
    std::size_t start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '/' || text[pos] == '.')) {
      ++pos;
    }
    if (pos > start) coef = parse_rational(text.substr(start, pos - start));
    skip_ws();
    Monomial m;
    bool need_var = pos == start;
    if (pos < text.size() && text[pos] == '*') {
      ++pos;
      need_var = true;
    }
    skip_ws();
    while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) {
      std::size_t ns = pos;
      while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]))) ++pos;
      auto var = parse_var(text.substr(ns, pos - ns));
      if (!var) fail("unknown variable");
      unsigned e = 1;
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        std::size_t es = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (es == pos) fail("missing exponent");
        e = static_cast<unsigned>(std::stoul(std::string(text.substr(es, pos - es))));
      }
      m = m.with(*var, m.exponent(*var) + e);
      need_var = false;
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        skip_ws();
      }
    }
    if (need_var) fail("expected term");
    terms.emplace_back(m, Rational(coef * sign_next));
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] == '+' || text[pos] == '-') {
      sign_next = text[pos] == '-' ? -1 : 1;
      ++pos;
    } else {
      fail("unexpected character");
    }
  }
  return from_terms(std::move(terms));
}

RatPoly integrate_definite(const RatPoly& p, Var v, const RatPoly& lower, const RatPoly& upper) {
  if (lower.uses(v) || upper.uses(v)) {
    throw std::invalid_argument("integration bounds must not involve the integration variable");
  }
  RatPoly anti = p.antiderivative(v);
  return anti.substitute(v, upper) - anti.substitute(v, lower);
}

}  // namespace fnvcg
