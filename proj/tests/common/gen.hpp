#pragma once

// Random instance generators shared by the unit and acceptance suites.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fcl/countersys.hpp"
#include "fcl/logic.hpp"
#include "fcl/model.hpp"

namespace gen {

using Rng = std::mt19937;

inline int pick(Rng& rng, int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

inline fcl::FormulaPtr random_atom(Rng& rng, const std::vector<std::string>& props = {"p", "q", "r"}) {
  int k = pick(rng, static_cast<int>(props.size()) + 1);
  if (k == static_cast<int>(props.size())) return fcl::mk_true();
  return fcl::mk_atom(props[k]);
}

inline fcl::Ratio random_ratio(Rng& rng, int max_den = 4) {
  fcl::Ratio r;
  r.den = 1 + pick(rng, max_den);
  r.num = pick(rng, static_cast<int>(r.den) + 1);
  return r;
}

// Linear frequency formulas.
inline fcl::FormulaPtr random_fltl(Rng& rng, int depth, int max_den = 4) {
  if (depth <= 0) return random_atom(rng);
  switch (pick(rng, 7)) {
    case 0: return random_atom(rng);
    case 1: return fcl::mk_not(random_fltl(rng, depth - 1, max_den));
    case 2: return fcl::mk_and(random_fltl(rng, depth - 1, max_den), random_fltl(rng, depth - 1, max_den));
    case 3: return fcl::mk_next(random_fltl(rng, depth - 1, max_den));
    case 4: return fcl::mk_until(random_fltl(rng, depth - 1, max_den), random_fltl(rng, depth - 1, max_den));
    default:
      return fcl::mk_freq_until(random_fltl(rng, depth - 1, max_den), random_ratio(rng, max_den),
                                random_fltl(rng, depth - 1, max_den));
  }
}

// State formulas of fCTL with bounded until nesting.
inline fcl::FormulaPtr random_fctl(Rng& rng, int depth, int until_budget, int max_den = 4) {
  if (depth <= 0) return random_atom(rng);
  int c = pick(rng, 8);
  if (c == 0) return random_atom(rng);
  if (c == 1) return fcl::mk_not(random_fctl(rng, depth - 1, until_budget, max_den));
  if (c == 2)
    return fcl::mk_and(random_fctl(rng, depth - 1, until_budget, max_den),
                       random_fctl(rng, depth - 1, until_budget, max_den));
  if (c == 3) {
    auto x = fcl::mk_next(random_fctl(rng, depth - 1, until_budget, max_den));
    return pick(rng, 2) ? fcl::mk_exists(x) : fcl::mk_forall(x);
  }
  if (until_budget <= 0) return random_atom(rng);
  auto a = random_fctl(rng, depth - 1, until_budget - 1, max_den);
  auto b = random_fctl(rng, depth - 1, until_budget - 1, max_den);
  fcl::FormulaPtr u = pick(rng, 4) == 0 ? fcl::mk_until(a, b) : fcl::mk_freq_until(a, random_ratio(rng, max_den), b);
  return pick(rng, 2) ? fcl::mk_exists(u) : fcl::mk_forall(u);
}

inline std::vector<fcl::Term> random_terms(Rng& rng, const std::vector<std::string>& vars, int depth);

// Anything in the full counting logic; used for syntax round trips.
inline fcl::FormulaPtr random_cctl_star(Rng& rng, int depth, std::vector<std::string> bound = {}) {
  if (depth <= 0) {
    if (!bound.empty() && pick(rng, 3) == 0)
      return fcl::mk_compare(random_terms(rng, bound, 0), random_terms(rng, bound, 0));
    return pick(rng, 6) == 0 ? fcl::mk_false() : random_atom(rng);
  }
  auto sub = [&](std::vector<std::string> b = {}) {
    if (b.empty()) b = bound;
    return random_cctl_star(rng, depth - 1, b);
  };
  switch (pick(rng, 13)) {
    case 0: return fcl::mk_not(sub());
    case 1: return fcl::mk_and(sub(), sub());
    case 2: return fcl::mk_or(sub(), sub());
    case 3: return fcl::mk_implies(sub(), sub());
    case 4: return fcl::mk_next(sub());
    case 5: return fcl::mk_until(sub(), sub());
    case 6: return fcl::mk_freq_until(sub(), random_ratio(rng), sub());
    case 7: return pick(rng, 2) ? fcl::mk_exists(sub()) : fcl::mk_forall(sub());
    case 8: return pick(rng, 2) ? fcl::mk_finally(sub()) : fcl::mk_globally(sub());
    case 9: {
      std::string v = std::string(1, "xyz"[pick(rng, 3)]);
      auto b = bound;
      b.push_back(v);
      return fcl::mk_bind(v, sub(b));
    }
    case 10:
      if (!bound.empty()) {
        auto c = fcl::mk_compare(random_terms(rng, bound, depth - 1), random_terms(rng, bound, depth - 1));
        return pick(rng, 2) ? c : fcl::mk_not(c);
      }
      return random_atom(rng);
    default: return random_atom(rng);
  }
}

inline std::vector<fcl::Term> random_terms(Rng& rng, const std::vector<std::string>& vars, int depth) {
  std::vector<fcl::Term> out;
  int n = 1 + pick(rng, 2);
  for (int i = 0; i < n; ++i) {
    fcl::Term t;
    t.coef = pick(rng, 7) - 3;
    if (pick(rng, 3) != 0) {
      t.var = vars[pick(rng, static_cast<int>(vars.size()))];
      t.arg = depth > 0 ? random_cctl_star(rng, depth - 1, vars) : random_atom(rng);
    }
    out.push_back(t);
  }
  return out;
}

inline fcl::KripkeStructure random_structure(Rng& rng, int n, double p_edge,
                                             const std::vector<std::string>& props = {"p", "q", "r"}) {
  fcl::KripkeStructure k;
  std::bernoulli_distribution lab(0.4);
  for (int i = 0; i < n; ++i) {
    std::set<std::string> l;
    for (const auto& p : props)
      if (lab(rng)) l.insert(p);
    k.add_state("s" + std::to_string(i), l);
  }
  std::bernoulli_distribution coin(p_edge);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (coin(rng)) k.add_edge(i, j);
    if (k.succ(i).empty()) k.add_edge(i, (i + 1) % n);
  }
  k.set_initial(0);
  return k;
}

// Flat, dead-end free, every state reachable from s0.
inline fcl::KripkeStructure random_flat(Rng& rng, int n,
                                        const std::vector<std::string>& props = {"p", "q", "r"}) {
  while (true) {
    auto k = random_structure(rng, n, std::min(0.5, 1.6 / n), props);
    if (!fcl::is_flat(k).flat) continue;
    k.prune_unreachable();
    if (k.size() < std::max(1, n - 1)) continue;
    return k;
  }
}

// A chain of simple loops joined by forward edges, sometimes skipping ahead; flat by construction.
inline fcl::KripkeStructure random_loop_chain(Rng& rng, int loops, int max_len = 3,
                                              const std::vector<std::string>& props = {"p", "q", "r"}) {
  fcl::KripkeStructure k;
  std::bernoulli_distribution lab(0.45);
  std::vector<std::pair<int, int>> span;  // first, last state of each loop
  for (int i = 0; i < loops; ++i) {
    int len = 1 + pick(rng, max_len);
    int first = k.size();
    for (int j = 0; j < len; ++j) {
      std::set<std::string> l;
      for (const auto& p : props)
        if (lab(rng)) l.insert(p);
      k.add_state("s" + std::to_string(k.size()), l);
      if (j > 0) k.add_edge(k.size() - 2, k.size() - 1);
    }
    k.add_edge(k.size() - 1, first);
    span.push_back({first, k.size() - 1});
  }
  for (int i = 0; i + 1 < loops; ++i) {
    int from = span[i].first + pick(rng, span[i].second - span[i].first + 1);
    k.add_edge(from, span[i + 1].first);
    if (i + 2 < loops && pick(rng, 3) == 0) k.add_edge(span[i].second, span[i + 2].first + pick(rng, span[i + 2].second - span[i + 2].first + 1));
  }
  k.set_initial(0);
  return k;
}

// One counter, updates in [-max_update, max_update], some transitions guarded.
inline fcl::CounterSystem random_ocs(Rng& rng, int n, int max_update) {
  fcl::CounterSystem cs;
  for (int i = 0; i < n; ++i) cs.add_state("q" + std::to_string(i));
  cs.add_counter("c");
  int edges = n + pick(rng, 2 * n);
  for (int e = 0; e < edges; ++e) {
    int src = pick(rng, n), dst = pick(rng, n);
    std::int64_t u = pick(rng, 2 * max_update + 1) - max_update;
    std::vector<fcl::Guard> g;
    int gk = pick(rng, 4);
    if (gk == 1) g.push_back({0, true});
    if (gk == 2) g.push_back({0, false});
    cs.add_transition(src, {u}, g, dst);
  }
  cs.set_initial(0);
  return cs;
}

inline bool same_word(const fcl::LassoRun& a, const fcl::LassoRun& b) {
  long long n = 2 * static_cast<long long>(a.prefix.size() + a.loop.size() + b.prefix.size() + b.loop.size());
  for (long long i = 0; i < n; ++i)
    if (a.at(i) != b.at(i)) return false;
  return true;
}

}  // namespace gen
