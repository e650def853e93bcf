// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <tuple>

#include "aps_util.hpp"
#include "fcl/aps.hpp"
#include "fcl/fctl.hpp"
#include "fcl/fltlflat.hpp"
#include "fcl/ph.hpp"
#include "fixtures.hpp"
#include "gen.hpp"
#include "ph_props.hpp"
#include "props.hpp"

using namespace fcl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FormulaPtr formula_file(const std::string& name) { return parse_formula(slurp(std::string(FCL_DATA_DIR) + "/" + name)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double s) {
  std::ostringstream o;
  o.precision(2);
  o << std::fixed << s << "s";
  return o.str();
}

Outcome example_verdicts() {
  Outcome o;
  auto k = fixtures::example();
  auto timed = [&](const std::string& name, bool want, const std::function<Verdict()>& run) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = run();
    double s = seconds_since(t0);
    bool ok = v == v_of(want) && s < 10.0;
    o.pass = o.pass && ok;
    o.detail += name + "=" + verdict_name(v) + " in " + fmt(s) + (ok ? "" : " (expected " + std::string(want ? "True" : "False") + " < 10s)") + "; ";
  };
  PhEvalOptions opt;
  opt.domain_bound = 64;
  timed("phi1", false, [&] { return check_cctl_bounded(k, formula_file("phi1.fml"), opt).verdict; });
  timed("phi1'", false, [&] { return v_of(model_check_fctl(k, formula_file("phi1prime.fml")).holds); });
  timed("phi2", true, [&] { return check_cctl_bounded(k, formula_file("phi2.fml"), opt).verdict; });
  return o;
}

// Changes one existing guard, update or label of the certificate.
std::string mutate(gen::Rng& rng, Aps& m, const std::vector<FormulaPtr>& subs) {
  std::vector<std::tuple<int, int, int>> fields;  // kind, location, counter
  for (int l = 0; l < m.size(); ++l) {
    for (const auto& [c, neg] : m.at(l).guards) fields.push_back({0, l, c});
    for (const auto& [c, u] : m.at(l).updates)
      if (u != 0) fields.push_back({1, l, c});
    fields.push_back({2, l, -1});
  }
  int kind = gen::pick(rng, 3);
  std::vector<std::tuple<int, int, int>> of;
  for (const auto& t : fields)
    if (std::get<0>(t) == kind) of.push_back(t);
  auto [unused, l, c] = of[gen::pick(rng, static_cast<int>(of.size()))];
  AugState& a = m.at(l);
  std::string at = " at location " + std::to_string(l);
  if (kind == 0) {
    if (gen::pick(rng, 2)) {
      a.guards.erase(c);
      return "drop guard on " + m.counters[c] + at;
    }
    a.guards[c] = !a.guards[c];
    return "flip guard on " + m.counters[c] + at;
  }
  if (kind == 1) {
    std::int64_t d = 1 + gen::pick(rng, 3);
    if (gen::pick(rng, 2)) d = -d;
    std::int64_t u = a.update(c) + d;
    if (u == 0)
      a.updates.erase(c);
    else
      a.updates[c] = u;
    return "shift update of " + m.counters[c] + " by " + std::to_string(d) + at;
  }
  FormulaPtr f = subs[gen::pick(rng, static_cast<int>(subs.size()))];
  a.set(f, !a.has(f));
  return "toggle label " + to_string(f) + at;
}

Outcome certificate() {
  Outcome o;
  auto k = fixtures::example();
  ParsedAps g = parse_aps(k, slurp(std::string(FCL_DATA_DIR) + "/guarded_cert.aps"));
  FormulaPtr until = parse_formula("r U{2/3} q");
  CertificateCheck c = verify_certificate(k, g.formula, g.aps);
  ConsistencyReport rep = check_consistency(k, g.aps, g.formula);
  bool rules = rep.at(until, 1)->rule == "3c" && rep.at(until, 0)->rule == "3d";
  if (!c.ok || !rules) {
    o.pass = false;
    o.detail = "golden certificate rejected or justified differently; ";
  }
  gen::Rng rng(2024);
  auto subs = subformulae(g.formula);
  int flipped = 0;
  std::string neutral;
  for (int i = 0; i < 100; ++i) {
    Aps m = g.aps;
    std::string what = mutate(rng, m, subs);
    if (!verify_certificate(k, g.formula, m).ok)
      ++flipped;
    else
      neutral += " [" + what + "]";
  }
  o.pass = o.pass && flipped >= 95;
  o.detail += "verifies with 1:3c 0:3d; " + std::to_string(flipped) + "/100 mutations rejected" +
              (neutral.empty() ? "" : ", neutral:" + neutral);
  return o;
}

Outcome coupling() {
  auto g = fixtures::guarded_example();
  NonemptyOptions seven;
  seven.fixed = {{2, 7}};
  auto w = aps_nonempty(g.cs, g.seg, seven);
  bool at_least_two = w.witness && w.witness->counts[1] >= 2;
  bool min_two = false;
  if (w.witness) {
    // every witness with seven iterations of the last loop takes the middle loop at least twice
    min_two = true;
    for (std::int64_t n = 0; n < 2; ++n) {
      NonemptyOptions fixed = seven;
      fixed.fixed.push_back({1, n});
      if (aps_nonempty(g.cs, g.seg, fixed).witness) min_two = false;
    }
  }
  seven.fixed.push_back({1, 1});
  bool one_infeasible = !aps_nonempty(g.cs, g.seg, seven).witness;
  Outcome o;
  o.pass = at_least_two && min_two && one_infeasible;
  o.detail = std::string("witness middle count ") + (w.witness ? std::to_string(w.witness->counts[1]) : "none") +
             ", count 1 " + (one_infeasible ? "infeasible" : "FEASIBLE");
  return o;
}

Outcome fctl_agreement() {
  gen::Rng rng(4001);
  int compared = 0, structures = 0, bad = 0;
  std::string first;
  auto t0 = std::chrono::steady_clock::now();
  for (; structures < 400; ++structures) {
    int n = 2 + gen::pick(rng, 5);
    auto k = gen::random_flat(rng, n);
    auto f = gen::random_fctl(rng, 3, 2, 4);
    long long y = max_denominator(f);
    long long horizon = k.size() + k.size() * (y * k.size() + 2);
    Verdict v = eval_branching(k, f, k.initial(), 8, horizon);
    if (v == Verdict::Unknown) continue;
    ++compared;
    if (model_check_fctl(k, f).holds != (v == Verdict::True)) {
      if (bad++ == 0) first = to_string(f);
    }
  }
  Outcome o;
  double s = seconds_since(t0);
  o.pass = bad == 0 && compared >= 200 && s < 300;
  o.detail = std::to_string(structures) + " structures, " + std::to_string(compared) + " definitive, " +
             std::to_string(bad) + " disagreements" + (first.empty() ? "" : " (first: " + first + ")") + ", " + fmt(s);
  return o;
}

Outcome holds_soundness() {
  gen::Rng rng(5001);
  std::mt19937 srng(5002);
  int holds = 0, bad = 0, tried = 0;
  std::string first;
  while (holds < 100 && tried < 1000) {
    ++tried;
    auto k = gen::random_flat(rng, 2 + gen::pick(rng, 4));
    auto f = gen::random_fltl(rng, 3, 3);
    FltlConfig cfg;
    cfg.loop_bound = 6;
    auto v = model_check_fltl_flat(k, f, cfg);
    if (v.kind != CheckKind::Holds) continue;
    ++holds;
    int runs = 0;
    std::string m = aps_util::label_mismatch(k, v.certificate, f, srng, 5, &runs);
    if (!m.empty() || runs < 5) {
      if (bad++ == 0) first = m.empty() ? "fewer than 5 runs sampled" : m;
    }
  }
  Outcome o;
  o.pass = holds >= 100 && bad == 0;
  o.detail = std::to_string(holds) + " Holds verdicts, 5 runs each, " + std::to_string(bad) + " unsound" +
             (first.empty() ? "" : " (" + first + ")");
  return o;
}

Outcome counted(const std::string& what, int need, int limit, const std::function<props::Outcome()>& run) {
  int applied = 0, bad = 0;
  std::string first;
  for (int it = 0; it < limit && applied < need; ++it) {
    auto r = run();
    if (!r.applicable) continue;
    ++applied;
    if (!r.failure.empty() && bad++ == 0) first = r.failure;
  }
  Outcome o;
  o.pass = applied >= need && bad == 0;
  o.detail = std::to_string(applied) + " " + what + ", " + std::to_string(bad) + " failures" +
             (first.empty() ? "" : " (first: " + first + ")");
  return o;
}

Outcome ph_counted(const std::string& what, int need, int limit, const std::function<ph_props::Outcome()>& run) {
  return counted(what, need, limit, [&] {
    auto r = run();
    return props::Outcome{r.applicable, r.failure};
  });
}

Outcome decomposition() {
  gen::Rng rng(6001);
  return counted("decompositions", 100, 20000, [&] { return props::decomposition_case(rng); });
}

Outcome transforms() {
  gen::Rng rng(7001);
  return counted("transforms", 200, 2000, [&] { return props::transform_case(rng); });
}

Outcome encoder() {
  gen::Rng rng(8001);
  auto t0 = std::chrono::steady_clock::now();
  Outcome o = ph_counted("definitive cases", 300, 5000, [&] { return ph_props::encoder_case(rng, 48); });
  double s = seconds_since(t0);
  o.pass = o.pass && s < 600;
  o.detail += ", " + fmt(s);
  return o;
}

Outcome translation() {
  gen::Rng rng(9001);
  return ph_counted("definitive sentences", 200, 2000, [&] { return ph_props::translation_case(rng, 16); });
}

Outcome reachability_methods() {
  gen::Rng rng(10001);
  int bad = 0, found = 0;
  const int n = 200;
  for (int it = 0; it < n; ++it) {
    auto cs = gen::random_ocs(rng, 1 + gen::pick(rng, 5), 5);
    bool d = repeated_reachability(cs, 0, {}, RrMethod::Direct).found;
    bool s = repeated_reachability(cs, 0, {}, RrMethod::Stack).found;
    if (d != s) ++bad;
    found += d;
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = std::to_string(n) + " systems (" + std::to_string(found) + " with a run), " + std::to_string(bad) +
             " disagreements";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"example verdicts", example_verdicts},
      {"guarded certificate and mutations", certificate},
      {"guard-count coupling", coupling},
      {"fCTL agrees with the oracle", fctl_agreement},
      {"Holds certificates are sound", holds_soundness},
      {"decomposition periodicity", decomposition},
      {"transforms preserve verdicts", transforms},
      {"PH encoder agrees with the oracle", encoder},
      {"PH to CLTL translation", translation},
      {"reachability methods agree", reachability_methods},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
