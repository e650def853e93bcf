#include "fcl/fltlflat.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

namespace fcl {

namespace {

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kMax / b) return kMax;
  return a * b;
}

std::int64_t sat_pow(std::int64_t a, std::int64_t e) {
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < e; ++i) r = sat_mul(r, a);
  return r;
}

}  // namespace

SizeBudget::SizeBudget(const KripkeStructure& k, const FormulaPtr& f)
    : states(k.size()), formula_size(fcl::formula_size(f)) {}

std::int64_t SizeBudget::total_cap() const {
  std::int64_t per = sat_mul(17, sat_mul(sat_pow(2, std::min<std::int64_t>(formula_size, 62)), sat_pow(states, 3)));
  return sat_mul(std::max<std::int64_t>(base, 1), sat_pow(per, formula_size));
}

void SizeBudget::check_base(const Aps& p) {
  base = p.size();
  log.push_back("base " + std::to_string(base) + " <= " + std::to_string(base_cap()));
  if (base > base_cap()) throw BudgetExceeded("base schema has " + std::to_string(base) + " locations, cap " +
                                              std::to_string(base_cap()));
}

void SizeBudget::check_step(const FormulaPtr& g, const Aps& before, const Aps& after, std::int64_t y) {
  std::int64_t cap = sat_mul(before.comp_count(), until_component_cap(y));
  std::ostringstream os;
  os << to_string(g) << ": " << before.size() << " -> " << after.size() << " locations (step cap " << cap
     << ", total cap " << total_cap() << ")";
  log.push_back(os.str());
  if (after.size() > cap || after.size() > total_cap()) throw BudgetExceeded(os.str());
}

Build base_schema_from_run(const KripkeStructure& k, const PathSchemaSkeleton& sk, const std::vector<long long>& counts) {
  Build b;
  std::size_t j = 0;
  for (std::size_t i = 0; i < sk.segments.size(); ++i) {
    const auto& seg = sk.segments[i];
    bool final_seg = i + 1 == sk.segments.size();
    std::int64_t n = 1;
    if (seg.kind == SegKind::Loop && !final_seg) n = counts.at(j++);
    bool loop = final_seg || (seg.kind == SegKind::Loop && n >= 2);
    ApsComponent c{loop, {}};
    for (int s : seg.path) {
      AugState a;
      a.state = s;
      a.loop_type = loop;
      for (const auto& p : k.labels(s)) a.add(mk_atom(p));
      c.states.push_back(std::move(a));
    }
    b.aps.comps.push_back(std::move(c));
    b.run.counts.push_back(final_seg ? 0 : (loop ? n : 1));
  }
  if (j != counts.size()) throw ConstructionError("count vector does not match the skeleton");
  return b;
}

namespace {

bool is_until(const FormulaPtr& g) { return g->op == Op::Until || g->op == Op::FreqUntil; }

// Operand truth along one pass of the run.
std::vector<char> along(const Build& b, const RunLayout& lay, const FormulaPtr& f) {
  std::vector<char> v(lay.locs.size());
  for (std::size_t i = 0; i < lay.locs.size(); ++i) v[i] = b.aps.at(lay.locs[i]).has(f);
  return v;
}

void replace_component(Build& b, int k, std::vector<ApsComponent> comps, std::vector<std::int64_t> counts) {
  b.aps.comps.erase(b.aps.comps.begin() + k);
  b.aps.comps.insert(b.aps.comps.begin() + k, comps.begin(), comps.end());
  b.run.counts.erase(b.run.counts.begin() + k);
  b.run.counts.insert(b.run.counts.begin() + k, counts.begin(), counts.end());
}

// n row copies in place of loop k
void expand_rows(Build& b, int k, std::int64_t n) {
  ApsComponent r = row_of(b.aps.comps[k]);
  replace_component(b, k, std::vector<ApsComponent>(n, r), std::vector<std::int64_t>(n, 1));
}

// R R P^(n-4) R R
void shape_five(Build& b, int k) {
  ApsComponent p = b.aps.comps[k], r = row_of(p);
  std::int64_t n = b.run.counts[k];
  replace_component(b, k, {r, r, p, r, r}, {1, 1, n - 4, 1, 1});
}

void shape_loop(Build& b, int k) {
  std::int64_t n = b.run.counts[k];
  if (n <= 4) expand_rows(b, k, n);
  else shape_five(b, k);
}

void label_next(Build& b, const FormulaPtr& g) {
  for (bool changed = true; changed;) {
    changed = false;
    for (int k = 0; k + 1 < b.aps.comp_count() && !changed; ++k) {
      if (!b.aps.comps[k].loop) continue;
      int last = b.aps.first(k) + b.aps.comps[k].size() - 1;
      auto su = b.aps.succ(last);
      if (su.size() < 2 || b.aps.at(su[0]).has(g->kid()) == b.aps.at(su[1]).has(g->kid())) continue;
      if (b.run.counts[k] == 1) {
        b.aps = cut(b.aps, k);
      } else {
        b.aps = unfold_right(b.aps, k);
        b.run.counts[k] -= 1;
        b.run.counts.insert(b.run.counts.begin() + k + 1, 1);
      }
      changed = true;
    }
  }
  for (int l = 0; l < b.aps.size(); ++l) b.aps.at(l).set(g, b.aps.at(b.aps.succ(l)[0]).has(g->kid()));
}

struct UntilView {
  RunLayout lay;
  std::vector<char> truth;
  std::vector<std::int64_t> pre;  // pre[i] = sum of weights of positions < i
  std::int64_t final_bal = 0;
};

UntilView until_view(const Build& b, const FormulaPtr& g) {
  UntilView v;
  const Ratio r = until_ratio(g);
  v.lay = layout(b.aps, b.run);
  auto phi = along(b, v.lay, g->kid(0));
  auto psi = along(b, v.lay, g->kid(1));
  v.truth = freq_until_truth(phi, psi, v.lay.loop_start, r);
  v.pre.assign(phi.size() + 1, 0);
  for (std::size_t i = 0; i < phi.size(); ++i) v.pre[i + 1] = v.pre[i] + (phi[i] ? r.den - r.num : -r.num);
  v.final_bal = v.pre.back() - v.pre[v.lay.loop_start];
  return v;
}

// Component k takes the same truth values in every iteration.
bool stable(const Build& b, const UntilView& v, int k) {
  std::size_t pos = 0;
  for (int j = 0; j < k; ++j) pos += static_cast<std::size_t>(b.aps.comps[j].size()) * (b.aps.comps[j].loop ? b.run.counts[j] : 1);
  const std::size_t len = b.aps.comps[k].size();
  const std::int64_t n = b.run.counts[k];
  for (std::int64_t t = 1; t < n; ++t)
    for (std::size_t i = 0; i < len; ++i)
      if (v.truth[pos + i] != v.truth[pos + t * len + i]) return false;
  return true;
}

void stabilize(Build& b, const FormulaPtr& g) {
  const std::int64_t y = until_ratio(g).den;
  for (bool changed = true; changed;) {
    changed = false;
    UntilView v = until_view(b, g);
    for (int k = b.aps.comp_count() - 2; k >= 0 && !changed; --k) {
      if (!b.aps.comps[k].loop || stable(b, v, k)) continue;
      std::int64_t n = b.run.counts[k];
      std::int64_t nhat = b.aps.comps[k].size() * y;
      if (n <= nhat + 1) {
        expand_rows(b, k, n);
      } else {
        Decomposition d = decompose_unstable(b.aps, k, g, b.run);
        b.aps = std::move(d.aps);
        b.run = std::move(d.run);
      }
      changed = true;
    }
  }
}

// Adds a dedicated balance counter for g at each given row location (case 3c).
// Locations labelled by g without a guardable witness are skipped.
void track(Build& b, const FormulaPtr& g, const std::vector<int>& rows) {
  if (rows.empty()) return;
  const Ratio r = until_ratio(g);
  const auto& phi = g->kid(0);
  const auto& psi = g->kid(1);
  UntilView v = until_view(b, g);
  const std::size_t a = v.lay.loop_start;
  std::vector<std::vector<std::size_t>> visits(b.aps.size());
  for (std::size_t i = 0; i < v.lay.locs.size(); ++i) visits[v.lay.locs[i]].push_back(i);
  char hash[16];
  std::snprintf(hash, sizeof hash, "%06zx", std::hash<std::string>()(g->key) & 0xffffff);

  for (int l : rows) {
    bool in = b.aps.at(l).has(g);
    const std::size_t i = visits[l].front();
    int witness = -1;
    if (in) {
      for (int m = l + 1; m < b.aps.size() && witness < 0; ++m) {
        if (!b.aps.at(m).has(psi)) continue;
        bool ok = true;
        for (std::size_t j : visits[m]) ok = ok && v.pre[j] - v.pre[i] >= 0;
        if (ok && visits[m].front() >= a) ok = v.final_bal >= 0;
        if (ok) witness = m;
      }
      if (witness < 0) continue;  // left to periodic delegation
    }
    std::string name = "bal_" + std::to_string(l) + "_" + hash;
    while (std::find(b.aps.counters.begin(), b.aps.counters.end(), name) != b.aps.counters.end()) name += "'";
    int c = b.aps.add_counter(name);
    for (int m = l; m < b.aps.size(); ++m) {
      AugState& s = b.aps.at(m);
      s.updates[c] = s.has(phi) ? r.den - r.num : -r.num;
      if (!in && m > l && s.has(psi)) s.guards[c] = true;
    }
    if (in) b.aps.at(witness).guards[c] = false;
  }
}

void label_until(Build& b, const FormulaPtr& g) {
  const Ratio r = until_ratio(g);
  const auto& phi = g->kid(0);
  const auto& psi = g->kid(1);
  stabilize(b, g);

  // labels from the first visit of every location
  {
    UntilView v = until_view(b, g);
    std::vector<char> seen(b.aps.size(), 0);
    for (std::size_t i = 0; i < v.lay.locs.size(); ++i) {
      int l = v.lay.locs[i];
      if (!seen[l]) b.aps.at(l).set(g, v.truth[i]);
      seen[l] = 1;
    }
  }

  // every loop gets row copies around it unless the final loop settles everything
  const int last = b.aps.comp_count() - 1;
  bool final_has_psi = false;
  for (const auto& a : b.aps.comps[last].states) final_has_psi = final_has_psi || a.has(psi);
  bool final_good = component_balance(b.aps.comps[last], phi, r) > 0 && final_has_psi;
  if (!final_good) {
    ApsComponent row = row_of(b.aps.comps[last]);
    b.aps.comps.insert(b.aps.comps.begin() + last, {row, row});
    b.run.counts.insert(b.run.counts.begin() + last, {1, 1});
  }
  for (int k = b.aps.comp_count() - 2; k >= 0; --k)
    if (b.aps.comps[k].loop) shape_loop(b, k);

  // one counter per row location that neither 3a nor 3b covers
  std::vector<int> rows;
  for (int l = 0; l < b.aps.size(); ++l) {
    const AugState& at = b.aps.at(l);
    bool in = at.has(g);
    if (at.loop_type || (in && at.has(psi)) || (in && final_good)) continue;
    rows.push_back(l);
  }
  track(b, g, rows);
}

// Re-establishes strict until subformulae at row locations that structural changes left unsupported.
void repair(const KripkeStructure& k, Build& b, const FormulaPtr& g) {
  for (const auto& h : subformulae(g)) {
    if (h == g || !is_until(h)) continue;
    auto rep = check_consistency(k, b.aps, h);
    std::vector<int> rows;
    for (int l = 0; l < b.aps.size(); ++l)
      if (!rep.at(h, l)->ok && !b.aps.at(l).loop_type) rows.push_back(l);
    if (!rows.empty()) track(b, h, rows);
  }
}

}  // namespace

void label_step(const KripkeStructure& k, Build& b, const FormulaPtr& g, SizeBudget* budget) {
  Aps before = budget ? b.aps : Aps{};
  switch (g->op) {
    case Op::True:
      break;
    case Op::Atom:
      for (int l = 0; l < b.aps.size(); ++l) b.aps.at(l).set(g, k.has_label(b.aps.at(l).state, g->name));
      break;
    case Op::And:
      for (int l = 0; l < b.aps.size(); ++l) {
        auto& s = b.aps.at(l);
        s.set(g, s.has(g->kid(0)) && s.has(g->kid(1)));
      }
      break;
    case Op::Not:
      for (int l = 0; l < b.aps.size(); ++l) b.aps.at(l).set(g, !b.aps.at(l).has(g->kid()));
      break;
    case Op::Next:
      label_next(b, g);
      break;
    case Op::Until:
    case Op::FreqUntil:
      label_until(b, g);
      break;
    default:
      throw ConstructionError("formula outside the linear fragment: " + to_string(g));
  }
  repair(k, b, g);
  if (budget) budget->check_step(g, before, b.aps, is_until(g) ? until_ratio(g).den : 1);
  auto rep = check_consistency(k, b.aps, g);
  if (!rep.consistent_for(g))
    throw ConstructionError("labelling by " + to_string(g) + " left an inconsistency: " + rep.first_failure());
}

Build build_certificate(const KripkeStructure& k, const PathSchemaSkeleton& sk, const std::vector<long long>& counts,
                        const FormulaPtr& f, SizeBudget* budget) {
  Build b = base_schema_from_run(k, sk, counts);
  if (budget) budget->check_base(b.aps);
  for (const auto& g : subformulae(f)) label_step(k, b, g, budget);
  auto cs = cs_of_aps(b.aps);
  if (!simulate_witness(cs, b.aps.segmentation(), run_to_witness(b.aps, b.run)).ok())
    throw ConstructionError("the guiding run violates a guard of the constructed schema");
  return b;
}

}  // namespace fcl
