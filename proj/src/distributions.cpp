// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fnvcg {

namespace {
constexpr std::int64_t kTwo53 = std::int64_t{1} << 53;

std::uint64_t lattice53(const Rational& p) {
  if (p >= 1) return std::uint64_t{1} << 53;
  if (p <= 0) return 0;
  Rational s = p * Rational(kTwo53);
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  return f.get_ui();
}
}  // namespace

BetaDist make_beta(int alpha, int beta) {
  if (alpha < 1 || beta < 1) throw std::invalid_argument("beta parameters must be integers >= 1");
  if (alpha > 200 || beta > 200) throw std::invalid_argument("beta parameters above 200 are not supported");
  return {alpha, beta};
}

DiscreteDist make_discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete distribution needs atoms");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  Rational total = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].value < 0 || atoms[i].value > 1) throw std::invalid_argument("atom value outside [0,1]");
    if (atoms[i].prob <= 0) throw std::invalid_argument("atom probability must be positive");
    if (i > 0 && atoms[i].value == atoms[i - 1].value) throw std::invalid_argument("duplicate atom value");
    total += atoms[i].prob;
  }
  if (total != 1) throw std::invalid_argument("atom probabilities sum to " + to_fraction_string(total) + ", not 1");
  return {std::move(atoms)};
}

TypeModel make_model(Rational q, ValueDistribution f1, ValueDistribution f2) {
  if (q < 0 || q > 1) throw std::invalid_argument("q must lie in [0,1]");
  return {std::move(q), std::move(f1), std::move(f2)};
}

TypeModel make_model(Rational q, const ValueDistribution& f) { return make_model(std::move(q), f, f); }

ValueDistribution parse_distribution(std::string_view literal) {
  auto fail = [&]() -> ValueDistribution {
    throw std::invalid_argument("malformed distribution literal '" + std::string(literal) + "'");
  };
  if (literal == "uniform") return make_beta(1, 1);
  auto colon = literal.find(':');
  if (colon == std::string_view::npos) return fail();
  auto kind = literal.substr(0, colon);
  auto body = literal.substr(colon + 1);
  if (kind == "beta") {
    auto comma = body.find(',');
    if (comma == std::string_view::npos) return fail();
    Rational a = parse_rational(body.substr(0, comma));
    Rational b = parse_rational(body.substr(comma + 1));
    if (a.get_den() != 1 || b.get_den() != 1) return fail();
    return make_beta(static_cast<int>(a.get_num().get_si()), static_cast<int>(b.get_num().get_si()));
  }
  if (kind == "discrete") {
    std::vector<Atom> atoms;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      auto next = body.find(',', pos);
      auto item = body.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
      auto c = item.find(':');
      if (c == std::string_view::npos) return fail();
      atoms.push_back({parse_rational(item.substr(0, c)), parse_rational(item.substr(c + 1))});
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return make_discrete(std::move(atoms));
  }
  return fail();
}

std::string to_string(const ValueDistribution& d) {
  if (auto* b = std::get_if<BetaDist>(&d)) {
    return "beta:" + std::to_string(b->alpha) + "," + std::to_string(b->beta);
  }
  std::string s = "discrete:";
  const auto& atoms = std::get<DiscreteDist>(d).atoms;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) s += ",";
    s += to_fraction_string(atoms[i].value) + ":" + to_fraction_string(atoms[i].prob);
  }
  return s;
}

Dense beta_pdf_dense(int alpha, int beta) {
  make_beta(alpha, beta);
  Rational c(factorial(static_cast<unsigned>(alpha + beta - 1)),
             factorial(static_cast<unsigned>(alpha - 1)) * factorial(static_cast<unsigned>(beta - 1)));
  c.canonicalize();
  Dense out(static_cast<std::size_t>(alpha + beta - 1));
  // c v^(a-1) (1-v)^(b-1)
  for (int j = 0; j < beta; ++j) {
    Rational term = c * Rational(binomial(static_cast<unsigned>(beta - 1), static_cast<unsigned>(j)));
    if (j % 2) term = -term;
    out[static_cast<std::size_t>(alpha - 1 + j)] += term;
  }
  return out;
}

Dense beta_cdf_dense(int alpha, int beta) {
  Dense pdf = beta_pdf_dense(alpha, beta);
  Dense cdf(pdf.size() + 1);
  for (std::size_t i = 0; i < pdf.size(); ++i) cdf[i + 1] = pdf[i] / static_cast<unsigned long>(i + 1);
  return cdf;
}

PdfCdf beta_pdf_cdf(int alpha, int beta, Var v) {
  return {RatPoly::from_univariate(v, beta_pdf_dense(alpha, beta)),
          RatPoly::from_univariate(v, beta_cdf_dense(alpha, beta))};
}

std::int64_t to_fixed(const Rational& r, std::int64_t denominator) {
  Rational s = r * Rational(denominator);
  Integer n = (s.get_num() * 2 + s.get_den()) / (s.get_den() * 2);
  return n.get_si();
}

std::int64_t fixed_denominator(const TypeModel& model, const std::vector<Rational>& extra) {
  Integer lcm = 1;
  bool exact = true;
  auto absorb = [&](const Rational& r) {
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), r.get_den_mpz_t());
    if (lcm > kTwo53) exact = false;
  };
  for (const auto* f : {&model.f1, &model.f2}) {
    if (std::holds_alternative<BetaDist>(*f)) {
      exact = false;
    } else {
      for (const auto& a : std::get<DiscreteDist>(*f).atoms) absorb(a.value);
    }
  }
  for (const auto& r : extra) absorb(r);
  if (!exact) return kTwo53;
  return lcm.get_si();
}

ValueSampler::ValueSampler(const ValueDistribution& dist, std::int64_t denominator)
    : denominator_(denominator) {
  if (auto* b = std::get_if<BetaDist>(&dist)) {
    alpha_ = b->alpha;
    beta_ = b->beta;
    if (beta_ != 1) {
      for (const auto& c : beta_cdf_dense(alpha_, beta_)) cdf_.push_back(c.get_d());
    }
    return;
  }
  discrete_ = true;
  Rational cum = 0;
  for (const auto& a : std::get<DiscreteDist>(dist).atoms) {
    cum += a.prob;
    thresholds_.push_back(lattice53(cum));
    numerators_.push_back(to_fixed(a.value, denominator));
  }
  thresholds_.back() = std::uint64_t{1} << 53;
}

std::int64_t ValueSampler::draw_fixed(CounterRng& rng) const {
  if (discrete_) {
    std::uint64_t u = rng.bits53();
    std::size_t i = 0;
    while (u >= thresholds_[i]) ++i;
    return numerators_[i];
  }
  double v;
  if (beta_ == 1) {
    double u = rng.uniform();
    v = alpha_ == 1 ? u : std::pow(u, 1.0 / alpha_);
  } else {
    double u = rng.uniform();
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 0x1.0p-40) {
      double mid = 0.5 * (lo + hi);
      double c = 0.0;
      for (std::size_t i = cdf_.size(); i-- > 0;) c = c * mid + cdf_[i];
      (c < u ? lo : hi) = mid;
    }
    v = 0.5 * (lo + hi);
  }
  return static_cast<std::int64_t>(std::floor(v * static_cast<double>(denominator_)));
}

Rational sample_value(const ValueDistribution& dist, CounterRng& rng) {
  if (auto* d = std::get_if<DiscreteDist>(&dist)) {
    std::uint64_t u = rng.bits53();
    Rational cum = 0;
    for (const auto& a : d->atoms) {
      cum += a.prob;
      if (u < lattice53(cum)) return a.value;
    }
    return d->atoms.back().value;
  }
  ValueSampler s(dist, kTwo53);
  Rational r(s.draw_fixed(rng), kTwo53);
  r.canonicalize();
  return r;
}

BasicProfile<std::int64_t> sample_adversary_profile_fixed(const TypeModel& model, int count,
                                                          const ValueSampler& f1,
                                                          const ValueSampler& f2,
                                                          CounterRng& rng) {
  const std::uint64_t q53 = lattice53(model.q);
  BasicProfile<std::int64_t> out(static_cast<std::size_t>(count));
  for (auto& b : out) {
    bool one = rng.bits53() < q53;
    b.demand = one ? 1 : 2;
    b.value = one ? f1.draw_fixed(rng) : f2.draw_fixed(rng);
  }
  return out;
}

BidProfile sample_adversary_profile(const TypeModel& model, int count, CounterRng& rng) {
  if (count < 0) throw std::invalid_argument("negative adversary count");
  const std::uint64_t q53 = lattice53(model.q);
  BidProfile out(static_cast<std::size_t>(count));
  for (auto& b : out) {
    bool one = rng.bits53() < q53;
    b.demand = one ? 1 : 2;
    b.value = sample_value(one ? model.f1 : model.f2, rng);
  }
  return out;
}

}  // namespace fnvcg
