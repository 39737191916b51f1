// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fnvcg/cli.hpp"

#include "fnvcg/montecarlo.hpp"
#include "fnvcg/thresholds.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fnvcg::cli {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string target;  // reproduce
  std::string dist = "uniform";
  int n = 3;
  std::string q = "1/2";
  std::string attack = "split";
  int demand = 1;
  std::string theta = "1";
  std::string grid = "1/20";
  long samples = 200000;
  std::uint64_t seed = 1;
  int depth = 12;
  std::string json_path;
  std::string csv_path;
  std::string out_path;
  int threads = 0;
  std::string alphas = "1..5";
  std::string ns = "3..9";
  bool verify = false;
};

json config_json(const RunConfig& c) {
  json j{{"command", c.command}, {"dist", c.dist}, {"n", c.n}, {"q", c.q}, {"attack", c.attack},
         {"demand", c.demand}, {"theta", c.theta}, {"grid", c.grid}, {"samples", c.samples},
         {"seed", c.seed}, {"depth", c.depth}, {"threads", c.threads}};
  if (c.command == "reproduce") {
    j["target"] = c.target;
    j["alphas"] = c.alphas;
    j["n"] = c.ns;
    j["verify"] = c.verify;
  }
  return j;
}

void load_config(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("malformed config file: " + std::string(e.what()));
  }
  auto str = [&](const char* key, std::string& field) {
    if (!j.contains(key)) return;
    const auto& v = j[key];
    field = v.is_string() ? v.get<std::string>() : v.dump();
  };
  try {
    str("dist", c.dist);
    if (j.contains("n")) {
      if (j["n"].is_string()) {
        c.ns = j["n"].get<std::string>();
        std::vector<int> list;
        try {
          list = parse_int_list(c.ns);
        } catch (const std::exception& e) {
          throw UsageError("bad config value for n: " + c.ns);
        }
        if (list.size() == 1) c.n = list.front();
      } else {
        c.n = j["n"].get<int>(), c.ns = std::to_string(c.n);
      }
    }
    str("q", c.q);
    str("attack", c.attack);
    if (j.contains("demand")) c.demand = j["demand"].get<int>();
    str("theta", c.theta);
    str("grid", c.grid);
    if (j.contains("samples")) c.samples = j["samples"].get<long>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("depth")) c.depth = j["depth"].get<int>();
    str("json", c.json_path);
    str("csv", c.csv_path);
    str("out", c.out_path);
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    str("alphas", c.alphas);
    if (j.contains("verify")) c.verify = j["verify"].get<bool>();
  } catch (const json::exception& e) {
    throw UsageError("bad config value: " + std::string(e.what()));
  }
}

Rational rational_arg(const std::string& text, const char* what) {
  try {
    return parse_rational(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad ") + what + ": " + e.what());
  }
}

ValueDistribution dist_arg(const std::string& text) {
  try {
    return parse_distribution(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad distribution: ") + e.what());
  }
}

Scenario scenario_arg(const RunConfig& c) {
  try {
    if (c.attack == "split") return split_attack(c.n);
    const auto comma = c.attack.find(',');
    if (comma == std::string::npos) throw UsageError("attack must be 'split' or 'x,y'");
    Rational x = rational_arg(c.attack.substr(0, comma), "attack x");
    Rational y = rational_arg(c.attack.substr(comma + 1), "attack y");
    if (y > x) std::swap(x, y);
    return make_attack(c.demand, rational_arg(c.theta, "theta"), x, y, c.n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

json rational_json(const Rational& r) {
  return {{"num", r.get_num().get_str()}, {"den", r.get_den().get_str()}, {"decimal", to_decimal_string(r)}};
}

json interval_json(const RootInterval& r) {
  if (r.exact()) return rational_json(r.lower);
  return {{"lo", to_fraction_string(r.lower)}, {"hi", to_fraction_string(r.upper)},
          {"decimal", to_decimal_string((r.lower + r.upper) / 2)}};
}

std::string interval_text(const RootInterval& r) {
  if (r.exact()) return to_fraction_string(r.lower) + " (" + to_decimal_string(r.lower) + ")";
  return to_decimal_string((r.lower + r.upper) / 2) + " in [" + to_fraction_string(r.lower) + ", " +
         to_fraction_string(r.upper) + "]";
}

json point_json(const std::vector<std::pair<Var, Rational>>& pt) {
  json j = json::object();
  for (const auto& [v, r] : pt) j[std::string(var_name(v))] = to_fraction_string(r);
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << content;
}

int threads_for(const RunConfig& c) {
  if (c.threads > 0) return c.threads;
  if (const char* env = std::getenv("FNVCG_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_threshold(const RunConfig& c, std::ostream& out) {
  Scenario s = scenario_arg(c);
  auto cert = qstar_fixed_attack(s, dist_arg(c.dist));
  out << "scenario: " << describe(s) << "\n";
  out << "distribution: " << cert.dist << "\n";
  out << "truth-minus-attack: " << cert.q_poly.to_string() << "\n";
  out << "roots in [0,1]: " << cert.roots.size() << "\n";
  for (const auto& r : cert.roots) out << "  " << interval_text(r) << "\n";
  out << "q*: " << interval_text(cert.q_star) << "\n";
  if (!c.json_path.empty()) {
    json roots = json::array();
    for (const auto& r : cert.roots) roots.push_back(interval_json(r));
    json j{{"config", config_json(c)}, {"scope", "fixed_attack"}, {"scenario", describe(s)},
           {"dist", cert.dist}, {"q_poly", cert.q_poly.to_string()}, {"roots", roots},
           {"q_star", interval_json(cert.q_star)}, {"timing", cert.seconds}};
    if (cert.falsification)
      j["witness"] = {{"point", point_json(cert.falsification->point)},
                      {"value", to_fraction_string(cert.falsification->value)}};
    write_file(c.json_path, j.dump(2) + "\n");
  }
  if (!c.csv_path.empty()) {
    std::ostringstream csv;
    csv << "q_star,q_star_lo,q_star_hi\n"
        << to_decimal_string((cert.q_star.lower + cert.q_star.upper) / 2) << ','
        << to_fraction_string(cert.q_star.lower) << ',' << to_fraction_string(cert.q_star.upper) << "\n";
    write_file(c.csv_path, csv.str());
  }
  return kOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  auto d = dist_arg(c.dist);
  const auto* beta = std::get_if<BetaDist>(&d);
  if (!beta) throw UsageError("verify needs a beta distribution");
  if (c.depth < 1 || c.depth > 30) throw UsageError("depth must lie in 1..30");
  GlobalOptions opts;
  opts.certify.max_depth = c.depth;
  opts.threads = threads_for(c);
  Rational q = rational_arg(c.q, "q");
  if (q < 0 || q > 1) throw UsageError("q must lie in [0,1]");
  auto cert = qstar_global(*beta, c.n, q, opts);
  const std::string verdict = verdict_name(*cert.verification);
  for (const auto& s : cert.slices) {
    out << "demand " << s.demand << " slice " << s.slice << ": " << s.chambers << " chambers, "
        << s.distinct_polynomials << " distinct polynomials, " << s.verdict << "\n";
  }
  out << "verdict for q in [" << to_fraction_string(q) << ", 1]: " << verdict << "\n";
  if (cert.falsification) {
    out << "counterexample:";
    for (const auto& [v, r] : cert.falsification->point) out << ' ' << var_name(v) << '=' << to_fraction_string(r);
    out << " diff=" << to_fraction_string(cert.falsification->value) << "\n";
  }
  if (!c.json_path.empty()) {
    json slices = json::array();
    for (const auto& s : cert.slices)
      slices.push_back({{"demand", s.demand}, {"slice", s.slice}, {"walls", s.walls}, {"chambers", s.chambers},
                        {"distinct_polynomials", s.distinct_polynomials}, {"verdict", s.verdict}});
    json j{{"config", config_json(c)}, {"scope", "global"}, {"dist", cert.dist}, {"n", c.n},
           {"q_star", interval_json(cert.q_star)}, {"verdict", verdict}, {"slices", slices},
           {"timing", cert.seconds}};
    if (cert.falsification)
      j["witness"] = {{"point", point_json(cert.falsification->point)},
                      {"value", to_fraction_string(cert.falsification->value)}};
    write_file(c.json_path, j.dump(2) + "\n");
  }
  return std::holds_alternative<Certified>(*cert.verification) ? kOk : kFalsified;
}

int cmd_witness(const RunConfig& c, std::ostream& out) {
  Rational q = rational_arg(c.q, "q");
  ImpossibilityWitness w;
  try {
    w = impossibility_witness(q, c.n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  out << "epsilon: " << to_fraction_string(w.epsilon) << "\n";
  out << "distribution: " << to_string(ValueDistribution{w.distribution}) << "\n";
  out << "scenario: " << describe(w.attack) << "\n";
  out << "truth minus attack: " << to_fraction_string(w.diff) << " (" << to_double(w.diff) << ")\n";
  if (!c.json_path.empty()) {
    json atoms = json::array();
    for (const auto& a : w.distribution.atoms)
      atoms.push_back({{"value", to_fraction_string(a.value)}, {"prob", to_fraction_string(a.prob)}});
    json j{{"config", config_json(c)}, {"q", to_fraction_string(w.q)}, {"n", w.n},
           {"epsilon", rational_json(w.epsilon)}, {"distribution", atoms},
           {"attack", {{"x", "1"}, {"y", "1/2"}}}, {"diff", rational_json(w.diff)}};
    write_file(c.json_path, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  Scenario s = scenario_arg(c);
  Rational q = rational_arg(c.q, "q");
  if (q < 0 || q > 1) throw UsageError("q must lie in [0,1]");
  if (c.samples < 1000) throw UsageError("samples must be at least 1000");
  TypeModel model = make_model(q, dist_arg(c.dist));
  McOptions opts;
  opts.threads = threads_for(c);
  auto est = estimate_expected_diff(model, s, c.samples, c.seed, opts);
  out << "scenario: " << describe(s) << "\n";
  out << "truth minus attack: mean " << est.mean << " stderr " << est.stderr_ << " samples " << est.samples
      << " seed " << est.seed << "\n";
  if (!c.json_path.empty()) {
    json j{{"config", config_json(c)}, {"mean", est.mean}, {"stderr", est.stderr_},
           {"samples", est.samples}, {"seed", est.seed}, {"denominator", est.denominator}};
    write_file(c.json_path, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_search(const RunConfig& c, std::ostream& out) {
  Rational q = rational_arg(c.q, "q");
  Rational step = rational_arg(c.grid, "grid");
  Rational theta = rational_arg(c.theta, "theta");
  AttackSearchReport rep;
  try {
    rep = best_attack_search(c.demand, theta, dist_arg(c.dist), c.n, q, step);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  out << "evaluated " << rep.evaluated << " attacks; beneficial: " << rep.beneficial.size() << "\n";
  out << "best: x=" << to_fraction_string(rep.best_x) << " y=" << to_fraction_string(rep.best_y)
      << " gain=" << to_fraction_string(rep.best_diff) << " (" << to_decimal_string(rep.best_diff) << ")\n";
  if (!c.csv_path.empty()) {
    std::ostringstream csv;
    csv << "x,y,gain,gain_exact\n";
    for (const auto& p : rep.beneficial)
      csv << to_fraction_string(p.x) << ',' << to_fraction_string(p.y) << ',' << to_decimal_string(p.gain) << ','
          << to_fraction_string(p.gain) << "\n";
    write_file(c.csv_path, csv.str());
  }
  if (!c.json_path.empty()) {
    json ben = json::array();
    for (const auto& p : rep.beneficial)
      ben.push_back({{"x", to_fraction_string(p.x)}, {"y", to_fraction_string(p.y)}, {"gain", to_fraction_string(p.gain)}});
    json j{{"config", config_json(c)},
           {"best", {{"x", to_fraction_string(rep.best_x)}, {"y", to_fraction_string(rep.best_y)}}},
           {"best_diff", rational_json(rep.best_diff)}, {"grid_step", to_fraction_string(rep.grid_step)},
           {"beneficial", ben}};
    write_file(c.json_path, j.dump(2) + "\n");
  }
  return rep.beneficial.empty() ? kOk : kFalsified;
}

int cmd_reproduce(const RunConfig& c, std::ostream& out) {
  if (c.target != "fig3") throw UsageError("reproduce supports only 'fig3'");
  std::vector<int> alphas = parse_int_list(c.alphas), ns = parse_int_list(c.ns);
  for (int a : alphas)
    if (a < 1 || a > 200) throw UsageError("alpha must lie in 1..200");
  for (int n : ns)
    if (n < 2) throw UsageError("n must be at least 2");
  GlobalOptions opts;
  opts.certify.max_depth = c.depth;
  opts.threads = threads_for(c);
  std::ostringstream csv;
  csv << "alpha,n,q_star,q_star_lo,q_star_hi" << (c.verify ? ",verdict" : "") << "\n";
  bool all_certified = true;
  for (int a : alphas) {
    for (int n : ns) {
      auto cert = qstar_fixed_attack(split_attack(n), make_beta(a, 1));
      csv << a << ',' << n << ',' << to_decimal_string((cert.q_star.lower + cert.q_star.upper) / 2) << ','
          << to_fraction_string(cert.q_star.lower) << ',' << to_fraction_string(cert.q_star.upper);
      out << "alpha=" << a << " n=" << n << " q*=" << to_decimal_string(cert.q_star.upper);
      if (c.verify) {
        // Certify just above the split-attack threshold.
        Rational guess = floor_to_denominator(cert.q_star.upper, 10000) + Rational(1, 10000);
        std::string verdict;
        try {
          auto g = qstar_global(make_beta(a, 1), n, guess, opts);
          verdict = verdict_name(*g.verification);
        } catch (const std::exception& e) {
          verdict = "Inconclusive";
        }
        all_certified = all_certified && verdict == "Certified";
        csv << ',' << verdict;
        out << " verified above " << to_decimal_string(guess, 4) << ": " << verdict;
      }
      csv << "\n";
      out << "\n";
    }
  }
  if (!c.out_path.empty()) write_file(c.out_path, csv.str());
  if (!c.csv_path.empty()) write_file(c.csv_path, csv.str());
  return all_certified ? kOk : kFalsified;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("bad integer list '" + text + "'");
    return v;
  };
  while (std::getline(ss, part, ',')) {
    auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(part));
    } else {
      int lo = to_int(part.substr(0, dots)), hi = to_int(part.substr(dots + 2));
      if (lo > hi) throw UsageError("empty range '" + part + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw UsageError("empty integer list");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  // The config file is read first so flags override it.
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        load_config(args[i + 1], cfg);
      } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
      }
    }
  }

  CLI::App app{"Exact analysis of two-item VCG under false-name attacks"};
  app.name("fnvcg");
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default values for the flags");
  int n_flag = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--dist", cfg.dist, "uniform | beta:A,B | discrete:v:p,...");
    sub->add_option("--n", n_flag, "number of bidders");
    sub->add_option("--json", cfg.json_path, "write a JSON report");
    sub->add_option("--csv", cfg.csv_path, "write a CSV table");
    sub->add_option("--threads", cfg.threads, "worker threads (default: FNVCG_THREADS or all cores)");
  };
  auto attack_opts = [&](CLI::App* sub) {
    sub->add_option("--attack", cfg.attack, "split | x,y");
    sub->add_option("--demand", cfg.demand, "true demand (1 or 2)");
    sub->add_option("--theta", cfg.theta, "true per-item value");
  };

  auto* threshold = app.add_subcommand("threshold", "q* of a fixed attack");
  common(threshold);
  attack_opts(threshold);
  auto* verify = app.add_subcommand("verify", "certify truthfulness for all attacks and q >= --q");
  common(verify);
  verify->add_option("--q", cfg.q, "lower end of the q range");
  verify->add_option("--depth", cfg.depth, "subdivision depth limit");
  auto* witness = app.add_subcommand("witness", "impossibility witness for n > 2");
  common(witness);
  witness->add_option("--q", cfg.q, "probability of a 1-type");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate through the mechanism");
  common(simulate);
  attack_opts(simulate);
  simulate->add_option("--q", cfg.q, "probability of a 1-type");
  simulate->add_option("--samples", cfg.samples, "number of samples");
  simulate->add_option("--seed", cfg.seed, "random seed");
  auto* search = app.add_subcommand("search", "grid search for the best attack");
  common(search);
  search->add_option("--q", cfg.q, "probability of a 1-type");
  search->add_option("--demand", cfg.demand, "true demand (1 or 2)");
  search->add_option("--theta", cfg.theta, "true per-item value");
  search->add_option("--grid", cfg.grid, "grid step");
  auto* reproduce = app.add_subcommand("reproduce", "regenerate a table");
  reproduce->add_option("target", cfg.target, "fig3")->required();
  reproduce->add_option("--alphas", cfg.alphas, "alpha list, e.g. 1..5");
  std::string n_list;
  reproduce->add_option("--n", n_list, "n list, e.g. 3..9");
  reproduce->add_option("--out", cfg.out_path, "CSV output path");
  reproduce->add_option("--csv", cfg.csv_path, "CSV output path");
  reproduce->add_flag("--verify", cfg.verify, "also certify globally just above each q*");
  reproduce->add_option("--depth", cfg.depth, "subdivision depth limit");
  reproduce->add_option("--threads", cfg.threads, "worker threads");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (n_flag != 0) cfg.n = n_flag;
  if (!n_list.empty()) cfg.ns = n_list;

  auto* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    if (cfg.command != "reproduce" && cfg.n < 2) throw UsageError("n must be at least 2");
    if (cfg.demand != 1 && cfg.demand != 2) throw UsageError("demand must be 1 or 2");
    out << "config: " << config_json(cfg).dump() << "\n";
    if (cfg.command == "threshold") return cmd_threshold(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    if (cfg.command == "witness") return cmd_witness(cfg, out);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out);
    if (cfg.command == "search") return cmd_search(cfg, out);
    if (cfg.command == "reproduce") return cmd_reproduce(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  err << "error: unknown command\n";
  return kUsage;
}

}  // namespace fnvcg::cli
