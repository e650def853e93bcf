#include <algorithm>
#include <array>
#include <cstdlib>
#include <deque>
#include <set>

#include "fcl/fctl.hpp"

namespace fcl {

namespace {

// ---- stack encoding: the counter as a unary stack over {bottom, plus, minus} ----

enum Sym { Bot = 0, Plus = 1, Minus = 2 };
constexpr int kSyms = 3;

struct Rule {
  int p, g, q;
  std::vector<int> w;  // top first, length <= 2
};

struct Pds {
  int controls = 0;
  std::vector<char> accepting;
  std::vector<Rule> rules;
};

Pds encode(const CounterSystem& cs, const StateSet& acc) {
  Pds d;
  d.controls = cs.size();
  d.accepting.assign(cs.size(), 0);
  for (int s = 0; s < cs.size(); ++s) d.accepting[s] = acc.empty() ? 1 : acc[s];
  auto fresh = [&] {
    d.accepting.push_back(0);
    return d.controls++;
  };
  for (const auto& t : cs.transitions()) {
    std::int64_t u = t.update.empty() ? 0 : t.update[0];
    int cur = t.src;
    for (std::int64_t i = 0; i < std::llabs(u); ++i) {
      int nxt = fresh();
      if (u > 0) {
        d.rules.push_back({cur, Minus, nxt, {}});
        d.rules.push_back({cur, Bot, nxt, {Plus, Bot}});
        d.rules.push_back({cur, Plus, nxt, {Plus, Plus}});
      } else {
        d.rules.push_back({cur, Plus, nxt, {}});
        d.rules.push_back({cur, Bot, nxt, {Minus, Bot}});
        d.rules.push_back({cur, Minus, nxt, {Minus, Minus}});
      }
      cur = nxt;
    }
    bool neg = false, nonneg = false;
    for (const auto& g : t.guards) (g.negative ? neg : nonneg) = true;
    if (neg && nonneg) continue;
    for (int g = 0; g < kSyms; ++g) {
      if (neg && g != Minus) continue;
      if (nonneg && g == Minus) continue;
      d.rules.push_back({cur, g, t.dst, {g}});
    }
  }
  return d;
}

bool stack_method(const CounterSystem& cs, int from, const StateSet& acc) {
  Pds d = encode(cs, acc);
  const int P = d.controls;
  auto head = [](int p, int g) { return p * kSyms + g; };

  // sum[p][g][p2]: 0 none, 1 pop path, 2 pop path through an accepting control
  std::vector<char> sum(static_cast<std::size_t>(P) * kSyms * P, 0);
  auto S = [&](int p, int g, int p2) -> char& { return sum[(static_cast<std::size_t>(p) * kSyms + g) * P + p2]; };
  for (bool changed = true; changed;) {
    changed = false;
    auto raise = [&](char& c, char v) {
      if (v > c) {
        c = v;
        changed = true;
      }
    };
    for (const auto& r : d.rules) {
      char a = d.accepting[r.p] ? 2 : 1;
      if (r.w.empty()) {
        raise(S(r.p, r.g, r.q), a);
      } else if (r.w.size() == 1) {
        for (int p2 = 0; p2 < P; ++p2)
          if (char f = S(r.q, r.w[0], p2)) raise(S(r.p, r.g, p2), std::max(a, f));
      } else {
        for (int p1 = 0; p1 < P; ++p1) {
          char f1 = S(r.q, r.w[0], p1);
          if (!f1) continue;
          for (int p2 = 0; p2 < P; ++p2)
            if (char f2 = S(p1, r.w[1], p2)) raise(S(r.p, r.g, p2), std::max({a, f1, f2}));
        }
      }
    }
  }

  // head reachability graph
  const int H = P * kSyms;
  std::vector<std::vector<std::pair<int, char>>> adj(H);
  for (const auto& r : d.rules) {
    char a = d.accepting[r.p] ? 2 : 1;
    int h = head(r.p, r.g);
    if (r.w.empty()) continue;
    adj[h].push_back({head(r.q, r.w[0]), a});
    if (r.w.size() == 2)
      for (int p2 = 0; p2 < P; ++p2)
        if (char f = S(r.q, r.w[0], p2)) adj[h].push_back({head(p2, r.w[1]), std::max(a, f)});
  }
  auto reach_from = [&](int src) {
    std::vector<char> seen(H, 0);
    std::vector<int> st{src};
    seen[src] = 1;
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      for (auto [y, l] : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          st.push_back(y);
        }
    }
    return seen;
  };
  std::vector<char> repeating(H, 0);
  for (int x = 0; x < H; ++x) {
    std::vector<int> targets;
    for (auto [y, l] : adj[x])
      if (l == 2) targets.push_back(y);
    if (targets.empty()) continue;
    for (int y : targets)
      if (reach_from(y)[x]) {
        repeating[x] = 1;
        break;
      }
  }

  // pre* of Rep . Gamma^* by saturation; automaton states 0..P-1 plus final F = P
  const int F = P;
  std::vector<std::array<std::set<int>, kSyms>> tr(P + 1);
  for (int g = 0; g < kSyms; ++g) tr[F][g].insert(F);
  for (int p = 0; p < P; ++p)
    for (int g = 0; g < kSyms; ++g)
      if (repeating[head(p, g)]) tr[p][g].insert(F);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : d.rules) {
      std::set<int> cur{r.q};
      for (int sym : r.w) {
        std::set<int> nxt;
        for (int q : cur) nxt.insert(tr[q][sym].begin(), tr[q][sym].end());
        cur.swap(nxt);
      }
      auto& dst = tr[r.p][r.g];
      for (int q : cur)
        if (dst.insert(q).second) changed = true;
    }
  }
  return tr[from][Bot].count(F) > 0;
}

// ---- direct search over bounded configurations ----

RrResult direct_method(const CounterSystem& cs, int from) {
  const auto& ts = cs.transitions();
  std::int64_t w = 0;
  for (const auto& t : ts) w = std::max<std::int64_t>(w, std::llabs(t.update.empty() ? 0 : t.update[0]));
  // A run reaching |c| > bound passes a pumpable cycle that never changes sign.
  const std::int64_t bound = (static_cast<std::int64_t>(cs.size()) + 1) * w;
  const std::int64_t width = 2 * bound + 1;
  auto id = [&](int s, std::int64_t v) { return static_cast<std::size_t>(s * width + (v + bound)); };
  const std::size_t total = static_cast<std::size_t>(cs.size()) * width;

  std::vector<std::int64_t> parent(total, -1);  // config
  std::vector<int> via(total, -1);              // transition
  std::vector<char> seen(total, 0);
  auto decode = [&](std::size_t c) { return std::pair<int, std::int64_t>(c / width, static_cast<std::int64_t>(c % width) - bound); };
  auto ok = [](const CsTransition& t, std::int64_t v) {
    for (const auto& g : t.guards)
      if (g.negative != (v < 0)) return false;
    return true;
  };
  auto path_to = [&](std::size_t c) {
    std::vector<int> steps;
    while (parent[c] >= 0) {
      steps.push_back(via[c]);
      c = static_cast<std::size_t>(parent[c]);
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
  };

  RrResult res;
  std::deque<std::size_t> queue{id(from, 0)};
  seen[id(from, 0)] = 1;
  std::vector<std::vector<std::pair<std::size_t, int>>> succ(total);
  while (!queue.empty()) {
    std::size_t c = queue.front();
    queue.pop_front();
    auto [s, v] = decode(c);
    for (int ti : cs.out(s)) {
      const auto& t = ts[ti];
      std::int64_t nv = v + (t.update.empty() ? 0 : t.update[0]);
      if (!ok(t, nv)) continue;
      if (std::llabs(nv) > bound) {
        // escape: find two level crossings at the same state after the last sign change
        std::vector<int> steps = path_to(c);
        steps.push_back(ti);
        std::vector<std::pair<int, std::int64_t>> cfg{{from, 0}};
        for (int x : steps) cfg.push_back({ts[x].dst, cfg.back().second + ts[x].update[0]});
        int sign = nv > 0 ? 1 : -1;
        std::size_t start = 0;
        for (std::size_t i = 0; i < cfg.size(); ++i)
          if (sign * cfg[i].second <= 0) start = i;
        std::vector<std::size_t> firsts;
        for (std::int64_t lvl = 1; lvl <= cs.size() + 1; ++lvl)
          for (std::size_t i = start; i < cfg.size(); ++i)
            if (sign * cfg[i].second > lvl * w) {
              firsts.push_back(i);
              break;
            }
        res.found = true;
        for (std::size_t a = 0; a < firsts.size() && res.loop.empty(); ++a)
          for (std::size_t b = a + 1; b < firsts.size(); ++b)
            if (cfg[firsts[a]].first == cfg[firsts[b]].first) {
              res.prefix.assign(steps.begin(), steps.begin() + static_cast<long>(firsts[a]));
              res.loop.assign(steps.begin() + static_cast<long>(firsts[a]), steps.begin() + static_cast<long>(firsts[b]));
              break;
            }
        return res;
      }
      std::size_t n = id(t.dst, nv);
      succ[c].push_back({n, ti});
      if (!seen[n]) {
        seen[n] = 1;
        parent[n] = static_cast<std::int64_t>(c);
        via[n] = ti;
        queue.push_back(n);
      }
    }
  }

  // peel off configurations without successors; anything left lies on or leads to a cycle
  std::vector<int> outdeg(total, 0);
  std::vector<std::vector<std::size_t>> pred(total);
  for (std::size_t c = 0; c < total; ++c)
    for (auto [n, ti] : succ[c]) {
      ++outdeg[c];
      pred[n].push_back(c);
    }
  std::vector<char> alive = seen;
  std::vector<std::size_t> work;
  for (std::size_t c = 0; c < total; ++c)
    if (alive[c] && outdeg[c] == 0) work.push_back(c);
  while (!work.empty()) {
    std::size_t c = work.back();
    work.pop_back();
    alive[c] = 0;
    for (std::size_t p : pred[c])
      if (alive[p] && --outdeg[p] == 0) work.push_back(p);
  }
  std::size_t startc = total;
  for (std::size_t c = 0; c < total; ++c)
    if (alive[c]) {
      startc = c;
      break;
    }
  if (startc == total) return res;
  res.found = true;
  std::vector<long> pos(total, -1);
  std::vector<std::pair<std::size_t, int>> walk;
  std::size_t c = startc;
  while (pos[c] < 0) {
    pos[c] = static_cast<long>(walk.size());
    for (auto [n, ti] : succ[c])
      if (alive[n]) {
        walk.push_back({c, ti});
        c = n;
        break;
      }
  }
  res.prefix = path_to(c);
  for (std::size_t i = static_cast<std::size_t>(pos[c]); i < walk.size(); ++i) res.loop.push_back(walk[i].second);
  return res;
}

}  // namespace

RrResult repeated_reachability(const CounterSystem& ocs, int from, const StateSet& accepting, RrMethod method) {
  if (ocs.counters() != 1) throw std::invalid_argument("repeated reachability needs exactly one counter");
  bool all = accepting.empty() || std::all_of(accepting.begin(), accepting.end(), [](char c) { return c != 0; });
  if (method == RrMethod::Direct && all) return direct_method(ocs, from);
  RrResult r;
  r.found = stack_method(ocs, from, all ? StateSet{} : accepting);
  return r;
}

}  // namespace fcl
