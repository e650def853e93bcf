#include "fcl/aps.hpp"

#include <algorithm>
#include <set>

namespace fcl {

bool AugState::has(const FormulaPtr& f) const { return f->op == Op::True || labels.count(f->key) > 0; }

std::int64_t AugState::update(int c) const {
  auto it = updates.find(c);
  return it == updates.end() ? 0 : it->second;
}

int Aps::size() const {
  int n = 0;
  for (const auto& c : comps) n += c.size();
  return n;
}

int Aps::first(int k) const {
  int n = 0;
  for (int i = 0; i < k; ++i) n += comps[i].size();
  return n;
}

int Aps::comp_of(int l) const {
  for (int k = 0; k < comp_count(); ++k) {
    if (l < comps[k].size()) return k;
    l -= comps[k].size();
  }
  throw ApsError("location out of range");
}

const AugState& Aps::at(int l) const {
  int k = comp_of(l);
  return comps[k].states[l - first(k)];
}

AugState& Aps::at(int l) {
  int k = comp_of(l);
  return comps[k].states[l - first(k)];
}

std::vector<int> Aps::succ(int l) const {
  std::vector<int> out;
  int k = comp_of(l);
  int f = first(k), last = f + comps[k].size() - 1;
  if (l + 1 < size()) out.push_back(l + 1);
  if (comps[k].loop && l == last && (out.empty() || out[0] != f)) out.push_back(f);
  return out;
}

int Aps::add_counter(const std::string& name) {
  counters.push_back(name);
  return static_cast<int>(counters.size()) - 1;
}

Segmentation Aps::segmentation() const {
  Segmentation s;
  int l = 0;
  for (const auto& c : comps) {
    s.comps.push_back({c.loop, l, l + c.size() - 1});
    l += c.size();
  }
  return s;
}

std::vector<std::string> aps_shape_problems(const KripkeStructure& k, const Aps& p) {
  std::vector<std::string> out;
  if (p.comps.empty()) return {"no components"};
  if (!p.comps.back().loop) out.push_back("final component is a row");
  int nc = static_cast<int>(p.counters.size());
  for (int i = 0; i < p.comp_count(); ++i) {
    const auto& c = p.comps[i];
    std::string where = "component " + std::to_string(i);
    if (c.states.empty()) {
      out.push_back(where + " is empty");
      continue;
    }
    std::set<int> seen;
    for (const auto& a : c.states) {
      if (a.state < 0 || a.state >= k.size()) {
        out.push_back(where + " refers to an unknown state");
        continue;
      }
      if (a.loop_type != c.loop) out.push_back(where + " has a state of the wrong type");
      if (c.loop && !seen.insert(a.state).second) out.push_back(where + " is a loop that is not simple");
      for (const auto& [cn, neg] : a.guards)
        if (cn < 0 || cn >= nc) out.push_back(where + " guards an undeclared counter");
      for (const auto& [cn, v] : a.updates)
        if (cn < 0 || cn >= nc) out.push_back(where + " updates an undeclared counter");
    }
  }
  if (!out.empty()) return out;
  for (int l = 0; l < p.size(); ++l)
    for (int m : p.succ(l))
      if (!k.has_edge(p.at(l).state, p.at(m).state))
        out.push_back("no edge " + k.name(p.at(l).state) + " -> " + k.name(p.at(m).state) + " for locations " +
                      std::to_string(l) + " -> " + std::to_string(m));
  return out;
}

CounterSystem cs_of_aps(const Aps& p) {
  CounterSystem cs;
  for (int l = 0; l < p.size(); ++l) cs.add_state(std::to_string(l));
  for (const auto& c : p.counters) cs.add_counter(c);
  auto upd = [&](int l) {
    std::vector<std::int64_t> u(p.counters.size(), 0);
    for (const auto& [c, v] : p.at(l).updates) u[c] = v;
    return u;
  };
  auto grd = [&](int l) {
    std::vector<Guard> g;
    for (const auto& [c, neg] : p.at(l).guards) g.push_back({c, neg});
    return g;
  };
  for (int l = 0; l < p.size(); ++l)
    for (int m : p.succ(l)) cs.add_transition(l, upd(l), grd(m), m);
  cs.set_initial(0);
  return cs;
}

GuardedRunWitness run_to_witness(const Aps& p, const ApsRun& r) {
  GuardedRunWitness w;
  for (int k = 0; k + 1 < p.comp_count(); ++k)
    if (p.comps[k].loop) w.counts.push_back(r.counts.at(k));
  return w;
}

ApsRun witness_to_run(const Aps& p, const GuardedRunWitness& w) {
  ApsRun r;
  std::size_t j = 0;
  for (int k = 0; k < p.comp_count(); ++k) {
    if (k + 1 == p.comp_count()) r.counts.push_back(0);
    else if (p.comps[k].loop) r.counts.push_back(w.counts.at(j++));
    else r.counts.push_back(1);
  }
  return r;
}

RunLayout layout(const Aps& p, const ApsRun& r) {
  RunLayout out;
  int l = 0;
  for (int k = 0; k < p.comp_count(); ++k) {
    int len = p.comps[k].size();
    if (k + 1 == p.comp_count()) {
      out.loop_start = out.locs.size();
      for (int i = 0; i < len; ++i) out.locs.push_back(l + i);
    } else {
      std::int64_t n = p.comps[k].loop ? r.counts.at(k) : 1;
      for (std::int64_t t = 0; t < n; ++t)
        for (int i = 0; i < len; ++i) out.locs.push_back(l + i);
    }
    l += len;
  }
  return out;
}

LassoRun project(const Aps& p, const ApsRun& r) {
  RunLayout lay = layout(p, r);
  LassoRun out;
  for (std::size_t i = 0; i < lay.locs.size(); ++i)
    (i < lay.loop_start ? out.prefix : out.loop).push_back(p.at(lay.locs[i]).state);
  return out;
}

ApsComponent row_of(const ApsComponent& c) {
  ApsComponent r = c;
  r.loop = false;
  for (auto& a : r.states) a.loop_type = false;
  return r;
}

namespace {

void require_loop(const Aps& p, int k, bool non_final) {
  if (k < 0 || k >= p.comp_count()) throw ApsError("component index out of range");
  if (!p.comps[k].loop) throw ApsError("component " + std::to_string(k) + " is a row");
  if (non_final && k + 1 == p.comp_count()) throw ApsError("the final loop cannot be turned into a row here");
}

}  // namespace

Aps cut(const Aps& p, int k) {
  require_loop(p, k, true);
  Aps q = p;
  q.comps[k] = row_of(p.comps[k]);
  return q;
}

Aps unfold_left(const Aps& p, int k) {
  require_loop(p, k, false);
  Aps q = p;
  q.comps.insert(q.comps.begin() + k, row_of(p.comps[k]));
  return q;
}

Aps unfold_right(const Aps& p, int k) {
  require_loop(p, k, true);
  Aps q = p;
  q.comps.insert(q.comps.begin() + k + 1, row_of(p.comps[k]));
  return q;
}

Aps duplicate(const Aps& p, int k) {
  require_loop(p, k, false);
  Aps q = p;
  q.comps.insert(q.comps.begin() + k + 1, p.comps[k]);
  return q;
}

std::vector<char> freq_until_truth(const std::vector<char>& phi, const std::vector<char>& psi, std::size_t loop_start,
                                   const Ratio& r) {
  const std::size_t n = phi.size(), a = loop_start, b = n - loop_start;
  auto at = [&](std::size_t pos) { return pos < n ? pos : a + (pos - a) % b; };
  auto w = [&](std::size_t pos) { return phi[at(pos)] ? r.den - r.num : -r.num; };
  std::int64_t loop_bal = 0;
  bool loop_psi = false;
  for (std::size_t i = a; i < n; ++i) {
    loop_bal += w(i);
    loop_psi = loop_psi || psi[i];
  }
  std::vector<char> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t bal = 0;
    std::size_t end = std::max(i, a) + b;
    for (std::size_t k = i; k < end; ++k) {
      if (psi[at(k)] && bal >= 0) {
        out[i] = 1;
        break;
      }
      bal += w(k);
    }
    if (!out[i] && loop_bal > 0 && loop_psi) out[i] = 1;
  }
  return out;
}

std::int64_t component_balance(const ApsComponent& c, const FormulaPtr& phi, const Ratio& r) {
  std::int64_t b = 0;
  for (const auto& a : c.states) b += a.has(phi) ? r.den - r.num : -r.num;
  return b;
}

Ratio until_ratio(const FormulaPtr& f) { return f->op == Op::FreqUntil ? f->ratio : Ratio{1, 1}; }

Decomposition decompose_unstable(const Aps& p, int k, const FormulaPtr& until, const ApsRun& run) {
  require_loop(p, k, true);
  if (until->op != Op::Until && until->op != Op::FreqUntil) throw ApsError("decomposition needs an until formula");
  const Ratio r = until_ratio(until);
  const auto& comp = p.comps[k];
  const std::int64_t len = comp.size();
  const std::int64_t n = run.counts.at(k);
  const std::int64_t nhat = len * r.den;
  if (n < nhat + 2) throw ApsError("loop is iterated fewer than nhat + 2 times");

  RunLayout lay = layout(p, run);
  std::vector<char> phi(lay.locs.size()), psi(lay.locs.size());
  for (std::size_t i = 0; i < lay.locs.size(); ++i) {
    phi[i] = p.at(lay.locs[i]).has(until->kid(0));
    psi[i] = p.at(lay.locs[i]).has(until->kid(1));
  }
  std::vector<char> truth = freq_until_truth(phi, psi, lay.loop_start, r);
  // |u|: positions before the first iteration of component k
  std::int64_t u = 0;
  for (int j = 0; j < k; ++j) u += p.comps[j].size() * (p.comps[j].loop ? run.counts.at(j) : 1);

  std::int64_t bal = component_balance(comp, until->kid(0), r);
  std::int64_t n1 = n - nhat - 1;
  const std::int64_t limit = u + (n - nhat) * len;
  if (bal > 0) {
    for (std::int64_t i = u; i < limit; ++i)
      if (!truth[i]) {
        n1 = std::max<std::int64_t>(1, (i - u) / len);
        break;
      }
  } else if (bal < 0) {
    for (std::int64_t i = u + len; i < limit; ++i)
      if (truth[i] && !truth[i - len]) {
        n1 = (i - u) / len;
        break;
      }
  }
  Decomposition d;
  d.n1 = n1;
  d.nhat = nhat;
  d.n2 = n - nhat - n1;
  d.first = k;
  d.last = k + 1 + static_cast<int>(nhat);
  d.aps = p;
  d.aps.comps.insert(d.aps.comps.begin() + k + 1, comp);
  d.aps.comps.insert(d.aps.comps.begin() + k + 1, static_cast<std::size_t>(nhat), row_of(comp));
  d.run = run;
  d.run.counts[k] = n1;
  d.run.counts.insert(d.run.counts.begin() + k + 1, d.n2);
  d.run.counts.insert(d.run.counts.begin() + k + 1, static_cast<std::size_t>(nhat), 1);
  return d;
}

}  // namespace fcl
