#include <algorithm>
#include <functional>
#include <map>

#include "fcl/fltlflat.hpp"

namespace fcl {

const char* check_kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::Holds: return "Holds";
    case CheckKind::NotFoundWithinBound: return "NotFoundWithinBound";
    case CheckKind::Fails: return "Fails";
  }
  return "?";
}

CertificateCheck verify_certificate(const KripkeStructure& k, const FormulaPtr& f, const Aps& p) {
  CertificateCheck out;
  out.diagnostics = aps_shape_problems(k, p);
  if (!out.diagnostics.empty()) return out;
  try {
    auto rep = check_consistency(k, p, f);
    if (!rep.consistent()) out.diagnostics.push_back(rep.first_failure());
  } catch (const ApsError& e) {
    out.diagnostics.push_back(e.what());
    return out;
  }
  if (!p.at(0).has(f)) out.diagnostics.push_back("location 0 is not labelled by " + to_string(f));
  auto res = aps_nonempty(cs_of_aps(p), p.segmentation());
  if (res.witness) out.witness = res.witness;
  else out.diagnostics.push_back(res.exhausted ? "non-emptiness undetermined (solver budget exhausted)"
                                               : "the schema admits no run");
  out.ok = out.diagnostics.empty();
  return out;
}

namespace {

// Count tuples ordered by their maximum, then lexicographically.
std::vector<std::vector<long long>> count_tuples(int loops, int bound) {
  std::vector<long long> dom;
  for (long long i = 1; i <= bound; ++i) dom.push_back(i);
  auto total = [&] {
    double t = 1;
    for (int i = 0; i < loops; ++i) t *= static_cast<double>(dom.size());
    return t;
  };
  // thin out the middle of the domain until the product is manageable
  while (total() > 20000 && dom.size() > 3) dom.erase(dom.begin() + static_cast<long>(dom.size()) / 2);
  std::vector<std::vector<long long>> out;
  std::vector<long long> cur(loops, dom[0]);
  std::function<void(int)> rec = [&](int i) {
    if (i == loops) {
      out.push_back(cur);
      return;
    }
    for (long long v : dom) {
      cur[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    long long ma = a.empty() ? 0 : *std::max_element(a.begin(), a.end());
    long long mb = b.empty() ? 0 : *std::max_element(b.begin(), b.end());
    return ma < mb;
  });
  return out;
}

}  // namespace

CheckVerdict model_check_fltl_flat(const KripkeStructure& k, const FormulaPtr& f, const FltlConfig& cfg) {
  if (!is_linear(f) || f->has_counting) throw NotLinear("not a linear frequency formula: " + to_string(f));
  int start = cfg.start >= 0 ? cfg.start : k.initial();
  auto skeletons = enumerate_path_schemas_from(k, start);
  CheckVerdict out;
  bool complete = true;
  std::string failures;
  for (const auto& sk : skeletons) {
    if (sk.loop_count() > 0) complete = false;
    for (const auto& counts : count_tuples(sk.loop_count(), std::max(1, cfg.loop_bound))) {
      LassoRun run = instantiate(sk, counts);
      long long h = cfg.horizon > 0 ? cfg.horizon : fltl_sufficient_horizon(run, f);
      Verdict v = eval_linear(k, run, f, 0, {}, h);
      if (v == Verdict::Unknown) complete = false;
      if (v != Verdict::True) continue;
      try {
        SizeBudget budget(k, f);
        Build b = build_certificate(k, sk, counts, f, &budget);
        auto chk = verify_certificate(k, f, b.aps);
        if (!chk.ok) {
          failures += "certificate rejected: " + chk.diagnostics.front() + "\n";
          continue;
        }
        out.kind = CheckKind::Holds;
        out.certificate = std::move(b.aps);
        out.witness = *chk.witness;
        out.run = run;
        return out;
      } catch (const std::exception& e) {
        failures += std::string("construction failed: ") + e.what() + "\n";
      }
    }
  }
  out.diagnostics = failures;
  if (cfg.exhaustive && complete && failures.empty()) {
    out.kind = CheckKind::Fails;
    out.diagnostics += "every run of the structure was examined";
  } else {
    out.kind = CheckKind::NotFoundWithinBound;
    out.diagnostics += "no satisfying run with loop counts <= " + std::to_string(cfg.loop_bound);
  }
  return out;
}

namespace {

struct Lift {
  const KripkeStructure& k;
  const FltlConfig& cfg;
  FctlStarResult& res;
  std::map<std::string, std::vector<Verdict>> memo;
  int fresh = 0;

  // Replaces maximal quantified subformulae by fresh atoms.
  FormulaPtr abstract(const FormulaPtr& f, std::vector<std::pair<std::string, FormulaPtr>>& atoms) {
    switch (f->op) {
      case Op::Exists: {
        std::string name = "#e" + std::to_string(fresh++);
        atoms.push_back({name, f});
        return mk_atom(name);
      }
      case Op::True:
      case Op::Atom:
        return f;
      case Op::And: return mk_and(abstract(f->kid(0), atoms), abstract(f->kid(1), atoms));
      case Op::Not: return mk_not(abstract(f->kid(), atoms));
      case Op::Next: return mk_next(abstract(f->kid(), atoms));
      case Op::Until: return mk_until(abstract(f->kid(0), atoms), abstract(f->kid(1), atoms));
      case Op::FreqUntil: return mk_freq_until(abstract(f->kid(0), atoms), f->ratio, abstract(f->kid(1), atoms));
      default: throw NotLinear("counting constraints are outside the frequency fragment: " + to_string(f));
    }
  }

  std::vector<Verdict> label(const FormulaPtr& g) {
    auto it = memo.find(g->key);
    if (it != memo.end()) return it->second;
    const int n = k.size();
    std::vector<Verdict> out(n, Verdict::Unknown);
    switch (g->op) {
      case Op::True:
        out.assign(n, Verdict::True);
        break;
      case Op::Atom:
        for (int s = 0; s < n; ++s) out[s] = v_of(k.has_label(s, g->name));
        break;
      case Op::And: {
        auto a = label(g->kid(0)), b = label(g->kid(1));
        for (int s = 0; s < n; ++s) out[s] = v_and(a[s], b[s]);
        break;
      }
      case Op::Not: {
        auto a = label(g->kid());
        for (int s = 0; s < n; ++s) out[s] = v_not(a[s]);
        break;
      }
      case Op::Exists: {
        std::vector<std::pair<std::string, FormulaPtr>> atoms;
        FormulaPtr body = abstract(g->kid(), atoms);
        KripkeStructure kk;
        std::vector<std::set<std::string>> extra(n);
        bool definite = true;
        for (const auto& [name, sub] : atoms) {
          auto v = label(sub);
          for (int s = 0; s < n; ++s) {
            if (v[s] == Verdict::Unknown) definite = false;
            if (v[s] == Verdict::True) extra[s].insert(name);
          }
        }
        if (!definite) break;
        for (int s = 0; s < n; ++s) {
          auto labs = k.labels(s);
          labs.insert(extra[s].begin(), extra[s].end());
          kk.add_state(k.name(s), labs);
        }
        for (int s = 0; s < n; ++s)
          for (int t : k.succ(s)) kk.add_edge(s, t);
        kk.set_initial(k.initial());
        for (int s = 0; s < n; ++s) {
          FltlConfig c = cfg;
          c.start = s;
          auto v = model_check_fltl_flat(kk, body, c);
          out[s] = v.kind == CheckKind::Holds ? Verdict::True
                                              : (v.kind == CheckKind::Fails ? Verdict::False : Verdict::Unknown);
        }
        break;
      }
      default:
        throw NotLinear("temporal operator or counting constraint in state position: " + to_string(g));
    }
    memo[g->key] = out;
    res.table.push_back({g, out});
    return out;
  }
};

}  // namespace

FctlStarResult model_check_fctl_star_flat(const KripkeStructure& k, const FormulaPtr& f, const FltlConfig& cfg) {
  FctlStarResult res;
  if (f->has_counting) throw NotLinear("counting constraints are outside the frequency fragment: " + to_string(f));
  Lift lift{k, cfg, res, {}, 0};
  // a path formula at top level is read existentially
  std::function<bool(const FormulaPtr&)> state = [&](const FormulaPtr& g) {
    if (g->op == Op::And || g->op == Op::Not) return std::all_of(g->kids.begin(), g->kids.end(), state);
    return g->op == Op::True || g->op == Op::Atom || g->op == Op::Exists;
  };
  FormulaPtr top = state(f) ? f : mk_exists(f);
  auto v = lift.label(top);
  int s = cfg.start >= 0 ? cfg.start : k.initial();
  res.verdict = v.at(s);
  return res;
}

}  // namespace fcl
