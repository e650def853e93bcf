#include "fcl/countersys.hpp"

#include <algorithm>
#include <map>

#include "fcl/ilp.hpp"

namespace fcl {

int CounterSystem::add_state(const std::string& name) {
  names_.push_back(name);
  return size() - 1;
}

int CounterSystem::add_counter(const std::string& name) {
  counter_names_.push_back(name);
  for (auto& t : trans_) t.update.resize(counter_names_.size(), 0);
  return counters() - 1;
}

int CounterSystem::add_transition(int src, std::vector<std::int64_t> update, std::vector<Guard> guards, int dst) {
  if (src < 0 || src >= size() || dst < 0 || dst >= size()) throw std::invalid_argument("transition endpoint out of range");
  update.resize(counter_names_.size(), 0);
  for (const auto& g : guards)
    if (g.counter < 0 || g.counter >= counters()) throw std::invalid_argument("guard on unknown counter");
  std::sort(guards.begin(), guards.end());
  trans_.push_back({src, std::move(update), std::move(guards), dst});
  return static_cast<int>(trans_.size()) - 1;
}

int CounterSystem::counter_index(const std::string& c) const {
  auto it = std::find(counter_names_.begin(), counter_names_.end(), c);
  return it == counter_names_.end() ? -1 : static_cast<int>(it - counter_names_.begin());
}

std::vector<int> CounterSystem::out(int s) const {
  std::vector<int> r;
  for (int i = 0; i < static_cast<int>(trans_.size()); ++i)
    if (trans_[i].src == s) r.push_back(i);
  return r;
}

int CounterSystem::find_transition(int src, int dst) const {
  int found = -1;
  for (int i = 0; i < static_cast<int>(trans_.size()); ++i)
    if (trans_[i].src == src && trans_[i].dst == dst) {
      if (found >= 0) return -2;
      found = i;
    }
  return found;
}

static bool guard_holds(const Guard& g, const std::vector<std::int64_t>& v) {
  return g.negative ? v[g.counter] < 0 : v[g.counter] >= 0;
}

SimResult simulate(const CounterSystem& cs, const std::vector<int>& steps) {
  SimResult r;
  std::vector<std::int64_t> v(cs.counters(), 0);
  r.trace.push_back(v);
  int at = cs.initial();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] < 0 || steps[i] >= static_cast<int>(cs.transitions().size()))
      throw StepError("unknown transition index");
    const auto& t = cs.transitions()[steps[i]];
    if (t.src != at) throw StepError("step " + std::to_string(i) + " does not continue the path");
    for (int c = 0; c < cs.counters(); ++c) v[c] += t.update[c];
    r.trace.push_back(v);
    at = t.dst;
    for (const auto& g : t.guards)
      if (!guard_holds(g, v)) {
        r.violation = static_cast<int>(i) + 1;
        return r;
      }
  }
  return r;
}

SimResult simulate_path(const CounterSystem& cs, const std::vector<int>& states) {
  if (states.empty()) return simulate(cs, {});
  if (states.front() != cs.initial()) throw StepError("path must start at the initial state");
  std::vector<int> steps;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    int t = cs.find_transition(states[i], states[i + 1]);
    if (t == -1) throw StepError("no transition " + cs.name(states[i]) + " -> " + cs.name(states[i + 1]));
    if (t == -2) throw StepError("ambiguous transition " + cs.name(states[i]) + " -> " + cs.name(states[i + 1]));
    steps.push_back(t);
  }
  return simulate(cs, steps);
}

std::vector<int> Segmentation::loop_ids() const {
  std::vector<int> ids(comps.size(), -1);
  int n = 0;
  for (std::size_t k = 0; k + 1 < comps.size(); ++k)
    if (comps[k].loop) ids[k] = n++;
  return ids;
}

int Segmentation::loop_count() const {
  int n = 0;
  for (std::size_t k = 0; k + 1 < comps.size(); ++k) n += comps[k].loop ? 1 : 0;
  return n;
}

void check_segmented(const CounterSystem& cs, const Segmentation& seg) {
  if (seg.comps.empty() || !seg.comps.back().loop) throw NotSegmented("last component must be a loop");
  int next = 0;
  for (const auto& c : seg.comps) {
    if (c.first != next || c.last < c.first) throw NotSegmented("components must tile the locations in order");
    next = c.last + 1;
  }
  if (next != cs.size()) throw NotSegmented("components must cover every location");
  if (cs.initial() != 0) throw NotSegmented("initial location must be 0");
  std::map<std::pair<int, int>, int> expected;
  for (int l = 0; l + 1 < cs.size(); ++l) expected[{l, l + 1}] = 0;
  for (const auto& c : seg.comps)
    if (c.loop) expected[{c.last, c.first}] = 0;
  for (const auto& t : cs.transitions()) {
    auto it = expected.find({t.src, t.dst});
    if (it == expected.end()) throw NotSegmented("unexpected transition " + cs.name(t.src) + " -> " + cs.name(t.dst));
    if (++it->second > 1) throw NotSegmented("duplicate transition " + cs.name(t.src) + " -> " + cs.name(t.dst));
  }
  for (const auto& [e, n] : expected)
    if (n == 0) throw NotSegmented("missing transition " + cs.name(e.first) + " -> " + cs.name(e.second));
}

namespace {

struct Lin {
  std::vector<std::int64_t> a;
  std::int64_t b = 0;
};

struct Builder {
  int nv;
  std::vector<LinCon> cons;
  bool contradiction = false;

  Lin zero() const { return Lin{std::vector<std::int64_t>(nv, 0), 0}; }

  void require(const Lin& e, bool negative) {
    bool constant = std::all_of(e.a.begin(), e.a.end(), [](std::int64_t v) { return v == 0; });
    if (constant) {
      if (negative ? !(e.b < 0) : !(e.b >= 0)) contradiction = true;
      return;
    }
    LinCon c;
    c.a = e.a;
    c.rel = negative ? LinCon::Le : LinCon::Ge;
    c.rhs = negative ? -1 - e.b : -e.b;
    cons.push_back(c);
  }
};

}  // namespace

NonemptyResult aps_nonempty(const CounterSystem& cs, const Segmentation& seg, const NonemptyOptions& opt) {
  check_segmented(cs, seg);
  const int L = cs.size();
  const int C = cs.counters();
  const auto ids = seg.loop_ids();
  const int nv = seg.loop_count();
  std::vector<int> fwd(L, -1);
  std::vector<int> back(seg.comps.size(), -1);
  for (int l = 0; l + 1 < L; ++l) fwd[l] = cs.find_transition(l, l + 1);
  for (std::size_t k = 0; k < seg.comps.size(); ++k)
    if (seg.comps[k].loop) {
      for (int i = 0; i < static_cast<int>(cs.transitions().size()); ++i) {
        const auto& t = cs.transitions()[i];
        if (t.src == seg.comps[k].last && t.dst == seg.comps[k].first) back[k] = i;
      }
    }

  // Loops whose back edge carries a guard not already checked on entry need n = 1 vs n >= 2.
  std::vector<int> split;
  for (std::size_t k = 0; k + 1 < seg.comps.size(); ++k) {
    if (!seg.comps[k].loop) continue;
    const auto& bg = cs.transitions()[back[k]].guards;
    std::vector<Guard> entry;
    if (seg.comps[k].first > 0) entry = cs.transitions()[fwd[seg.comps[k].first - 1]].guards;
    for (const auto& g : bg)
      if (std::find(entry.begin(), entry.end(), g) == entry.end()) {
        split.push_back(static_cast<int>(k));
        break;
      }
  }

  NonemptyResult best;
  std::int64_t best_sum = -1;
  for (std::size_t mask = 0; mask < (std::size_t{1} << split.size()); ++mask) {
    std::vector<char> single(seg.comps.size(), 0);  // loop forced to one iteration
    std::vector<char> multi(seg.comps.size(), 0);   // loop forced to at least two
    for (std::size_t i = 0; i < split.size(); ++i) (mask >> i & 1 ? multi : single)[split[i]] = 1;

    Builder bld{nv, {}, false};
    for (int c = 0; c < C; ++c) {
      Lin entry = bld.zero();
      for (std::size_t k = 0; k < seg.comps.size(); ++k) {
        const auto& comp = seg.comps[k];
        bool final_loop = k + 1 == seg.comps.size();
        // internal transitions and their cumulative offsets
        std::int64_t pre = 0;
        std::vector<std::pair<int, std::int64_t>> internal;  // transition, value offset after it
        for (int l = comp.first; l < comp.last; ++l) {
          pre += cs.transitions()[fwd[l]].update[c];
          internal.push_back({fwd[l], pre});
        }
        std::int64_t D = 0;
        if (comp.loop) D = pre + cs.transitions()[back[k]].update[c];
        // value at t = n-1 (or t = 0 for rows)
        Lin last_iter = entry;
        int v = ids[k];
        if (comp.loop && !final_loop) {
          last_iter.a[v] += D;
          last_iter.b -= D;
        }
        auto check_range = [&](std::int64_t off, const Guard& g, bool from_one) {
          if (g.counter != c) return;
          Lin first = entry;
          first.b += off + (from_one ? D : 0);
          if (final_loop) {
            bld.require(first, g.negative);
            if (g.negative ? D > 0 : D < 0) bld.contradiction = true;
            return;
          }
          if (!comp.loop) {
            bld.require(first, g.negative);
            return;
          }
          if (from_one && single[k]) return;
          Lin last = last_iter;
          last.b += off;
          bld.require(first, g.negative);
          bld.require(last, g.negative);
        };
        for (const auto& [t, off] : internal)
          for (const auto& g : cs.transitions()[t].guards) check_range(off, g, false);
        if (comp.loop)
          for (const auto& g : cs.transitions()[back[k]].guards) {
            bool from_one = final_loop || std::find(split.begin(), split.end(), static_cast<int>(k)) != split.end();
            check_range(0, g, from_one);
          }
        if (final_loop) break;
        // exit transition into the next component
        int ex = fwd[comp.last];
        Lin next = last_iter;
        next.b += pre + cs.transitions()[ex].update[c];
        for (const auto& g : cs.transitions()[ex].guards)
          if (g.counter == c) bld.require(next, g.negative);
        entry = next;
      }
    }
    if (bld.contradiction) continue;
    IlpProblem p;
    p.nvars = nv;
    p.cons = bld.cons;
    p.lower.assign(nv, 1);
    p.upper.assign(nv, opt.max_count);
    for (std::size_t k = 0; k + 1 < seg.comps.size(); ++k) {
      if (ids[k] < 0) continue;
      if (single[k]) p.upper[ids[k]] = 1;
      if (multi[k]) p.lower[ids[k]] = 2;
    }
    for (auto [j, n] : opt.at_least) p.lower[j] = std::max(p.lower[j], n);
    for (auto [j, n] : opt.at_most) p.upper[j] = std::min(p.upper[j], n);
    for (auto [j, n] : opt.fixed) {
      p.lower[j] = std::max(p.lower[j], n);
      p.upper[j] = std::min(p.upper[j], n);
    }
    auto r = solve_ilp(p, opt.node_cap);
    if (r.exhausted) best.exhausted = true;
    if (!r.feasible) continue;
    std::int64_t sum = 0;
    for (auto x : r.x) sum += x;
    if (best_sum < 0 || sum < best_sum) {
      best_sum = sum;
      best.witness = GuardedRunWitness{r.x};
    }
  }
  if (best.witness) best.exhausted = false;
  return best;
}

std::optional<GuardedRunWitness> aps_sample(const CounterSystem& cs, const Segmentation& seg, std::mt19937& rng,
                                            std::int64_t spread) {
  int nv = seg.loop_count();
  for (int attempt = 0; attempt < 4; ++attempt) {
    NonemptyOptions opt;
    for (int j = 0; j < nv; ++j) {
      std::int64_t lo = 1 + static_cast<std::int64_t>(rng() % static_cast<unsigned>(std::max<std::int64_t>(1, spread)));
      opt.at_least.push_back({j, lo});
    }
    auto r = aps_nonempty(cs, seg, opt);
    if (r.witness) return r.witness;
    spread = std::max<std::int64_t>(1, spread / 2);
  }
  return aps_nonempty(cs, seg).witness;
}

std::vector<int> witness_locations(const Segmentation& seg, const GuardedRunWitness& w, int final_iterations) {
  std::vector<int> out;
  auto ids = seg.loop_ids();
  for (std::size_t k = 0; k < seg.comps.size(); ++k) {
    const auto& c = seg.comps[k];
    std::int64_t n = 1;
    if (k + 1 == seg.comps.size()) n = final_iterations;
    else if (ids[k] >= 0) n = w.counts.at(ids[k]);
    for (std::int64_t t = 0; t < n; ++t)
      for (int l = c.first; l <= c.last; ++l) out.push_back(l);
  }
  return out;
}

SimResult simulate_witness(const CounterSystem& cs, const Segmentation& seg, const GuardedRunWitness& w,
                           int final_iterations) {
  return simulate_path(cs, witness_locations(seg, w, final_iterations));
}

}  // namespace fcl
