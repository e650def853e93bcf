#include "fcl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace fcl {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::True: return "True";
    case Verdict::False: return "False";
    default: return "Unknown";
  }
}

std::int64_t bal(const std::vector<bool>& phi_positions, const Ratio& r) {
  std::int64_t d = 0;
  for (bool b : phi_positions) d += b ? 1 : 0;
  return r.den * d - r.num * static_cast<std::int64_t>(phi_positions.size());
}

LoopClass classify_balance(std::int64_t b) {
  return b > 0 ? LoopClass::Good : (b == 0 ? LoopClass::Neutral : LoopClass::Bad);
}

LoopClass classify_loop(const std::vector<bool>& phi_labels, const Ratio& r) {
  return classify_balance(bal(phi_labels, r));
}

const char* loop_class_name(LoopClass c) {
  switch (c) {
    case LoopClass::Good: return "good";
    case LoopClass::Neutral: return "neutral";
    default: return "bad";
  }
}

std::vector<long long> count_domain(int loop_bound) {
  std::vector<long long> v;
  for (long long i = 1; i <= loop_bound; ++i) v.push_back(i);
  for (long long f : {2, 4, 8}) v.push_back(f * loop_bound);
  return v;
}

long long fltl_sufficient_horizon(const LassoRun& run, const FormulaPtr& f) {
  long long a = static_cast<long long>(run.prefix.size());
  long long b = static_cast<long long>(run.loop.size());
  long long y = std::max<long long>(1, max_denominator(f));
  return a + b * (y * (a + b) + 2);
}

namespace {

using Iv = std::pair<long long, long long>;  // lo, hi

Iv iv_add(Iv x, Iv y) { return {x.first + y.first, x.second + y.second}; }
Iv iv_scale(Iv x, long long c) {
  return c >= 0 ? Iv{c * x.first, c * x.second} : Iv{c * x.second, c * x.first};
}
Iv iv_of(Verdict v) {
  return v == Verdict::True ? Iv{1, 1} : (v == Verdict::False ? Iv{0, 0} : Iv{0, 1});
}

struct OKey {
  const Formula* f;
  long long p;
  std::vector<long long> th;
  bool operator==(const OKey& o) const { return f == o.f && p == o.p && th == o.th; }
};

struct OKeyHash {
  std::size_t operator()(const OKey& k) const {
    std::size_t h = std::hash<const void*>()(k.f) ^ (std::hash<long long>()(k.p) * 0x9e3779b97f4a7c15ULL);
    for (long long v : k.th) h = h * 1000003ULL ^ std::hash<long long>()(v);
    return h;
  }
};

// Truth depends on the current state only.
bool state_shaped(const Formula* f) {
  switch (f->op) {
    case Op::True:
    case Op::Atom: return true;
    case Op::And: return state_shaped(f->kid(0).get()) && state_shaped(f->kid(1).get());
    case Op::Not: return state_shaped(f->kid(0).get());
    case Op::Exists: return f->closed;
    default: return false;
  }
}

struct Ctx {
  LassoRun run;
  long long a = 0, b = 1;
  std::unordered_map<const Formula*, std::vector<std::int8_t>> closed;
  std::unordered_map<const Formula*, std::vector<Iv>> cum;  // cum[j] counts positions < j
  std::unordered_map<const Formula*, Iv> delta;             // virtual part of lhs - rhs
  std::unordered_map<OKey, Verdict, OKeyHash> open;
  long long widen = 0;  // inherited count magnitudes lengthen scan windows

  explicit Ctx(LassoRun r) : run(std::move(r)) {
    a = static_cast<long long>(run.prefix.size());
    b = static_cast<long long>(run.loop.size());
  }
};

// A counting term inside an E body whose variable is free at the E node.
struct VirtTerm {
  const Formula* cmp;
  int side;  // +1 lhs, -1 rhs
  std::size_t idx;
};

struct ExistsInfo {
  bool offsettable = true;
  std::vector<const Formula*> cmps;  // compare nodes carrying virtual terms, in key order
  std::vector<VirtTerm> terms;
};

}  // namespace

struct Evaluator::Impl {
  const KripkeStructure& k;
  EvalOptions opt;
  std::unordered_map<int, std::vector<LassoRun>> conts;
  std::map<std::pair<const Formula*, int>, Verdict> state_memo;
  std::unordered_map<OKey, Verdict, OKeyHash> offset_memo;  // th = state then deltas
  std::unordered_map<const Formula*, ExistsInfo> exists_info;
  std::vector<FormulaPtr> keep;  // owns formulas referenced by pointer

  Impl(const KripkeStructure& kk, EvalOptions o) : k(kk), opt(o) {}

  long long window(const Ctx& c) const { return 2 * opt.horizon + c.widen; }

  const std::vector<LassoRun>& continuations(int s) {
    auto it = conts.find(s);
    if (it != conts.end()) return it->second;
    std::vector<LassoRun> out;
    auto full = count_domain(opt.loop_bound);
    std::vector<long long> small{1, 2, 3, static_cast<long long>(opt.loop_bound),
                                 8LL * opt.loop_bound};
    std::sort(small.begin(), small.end());
    small.erase(std::unique(small.begin(), small.end()), small.end());
    std::vector<long long> tiny{1, 8LL * opt.loop_bound};
    const double cap = 20000;
    for_each_path_schema(k, s, [&](const PathSchemaSkeleton& sk) {
      int m = sk.loop_count();
      const std::vector<long long>* dom = &full;
      if (std::pow(static_cast<double>(full.size()), m) > cap) dom = &small;
      if (std::pow(static_cast<double>(dom->size()), m) > cap) dom = &tiny;
      std::vector<std::size_t> ix(m, 0);
      std::vector<long long> counts(m);
      while (true) {
        for (int j = 0; j < m; ++j) counts[j] = (*dom)[ix[j]];
        out.push_back(instantiate(sk, counts));
        int j = m - 1;
        while (j >= 0 && ix[j] + 1 == dom->size()) ix[j--] = 0;
        if (j < 0) break;
        ++ix[j];
      }
      return true;
    });
    return conts.emplace(s, std::move(out)).first->second;
  }

  // ---- closed formulas: truth depends only on the suffix ----

  Verdict closed_at(Ctx& c, const Formula* f, long long p) {
    long long q = c.run.norm(p);
    auto& memo = c.closed[f];
    if (memo.empty()) memo.assign(static_cast<std::size_t>(c.a + c.b), -1);
    if (memo[q] >= 0) return static_cast<Verdict>(memo[q]);
    Verdict v = closed_compute(c, f, q);
    c.closed[f][q] = static_cast<std::int8_t>(v);
    return v;
  }

  Verdict closed_compute(Ctx& c, const Formula* f, long long p) {
    if (opt.extra) {
      auto it = opt.extra->find(f->key);
      if (it != opt.extra->end()) return v_of(it->second.at(c.run.at(p)) != 0);
    }
    switch (f->op) {
      case Op::True: return Verdict::True;
      case Op::Atom: return v_of(k.has_label(c.run.at(p), f->name));
      case Op::And: {
        Verdict l = closed_at(c, f->kid(0).get(), p);
        if (l == Verdict::False) return l;
        return v_and(l, closed_at(c, f->kid(1).get(), p));
      }
      case Op::Not: return v_not(closed_at(c, f->kid(0).get(), p));
      case Op::Next: return closed_at(c, f->kid(0).get(), p + 1);
      case Op::Until: {
        Verdict res = Verdict::False, acc = Verdict::True;
        long long end = std::max(p, c.a) + c.b;
        for (long long j = p; j < end; ++j) {
          res = v_or(res, v_and(acc, closed_at(c, f->kid(1).get(), j)));
          if (res == Verdict::True) break;
          acc = v_and(acc, closed_at(c, f->kid(0).get(), j));
          if (acc == Verdict::False) break;
        }
        return res;
      }
      case Op::FreqUntil: return freq_closed(c, f, p);
      case Op::Exists: return exists_state(f, c.run.at(p));
      case Op::Bind: {
        Valuation th{{f->name, p}};
        return ev(c, f->kid(0).get(), p, th);
      }
      case Op::Compare: return compare(c, f, p, {});
    }
    return Verdict::Unknown;
  }

  Verdict freq_closed(Ctx& c, const Formula* f, long long p) {
    const Formula* phi = f->kid(0).get();
    const Formula* psi = f->kid(1).get();
    long long up = f->ratio.den - f->ratio.num, down = -f->ratio.num;
    Verdict res = closed_at(c, psi, p);
    if (res == Verdict::True) return res;
    Iv balv{0, 0};
    long long end = std::max(p, c.a) + 2 * c.b + 1;
    for (long long j = p + 1; j <= end; ++j) {
      Verdict ph = closed_at(c, phi, j - 1);
      balv = iv_add(balv, ph == Verdict::True ? Iv{up, up}
                          : ph == Verdict::False ? Iv{down, down} : Iv{down, up});
      Verdict ok = balv.first >= 0 ? Verdict::True : (balv.second >= 0 ? Verdict::Unknown : Verdict::False);
      res = v_or(res, v_and(ok, closed_at(c, psi, j)));
      if (res == Verdict::True) return res;
    }
    // Past `end` every phase repeats with the loop balance added.
    Iv loopb{0, 0};
    Verdict psi_in_loop = Verdict::False;
    for (long long j = c.a; j < c.a + c.b; ++j) {
      Verdict ph = closed_at(c, phi, j);
      loopb = iv_add(loopb, ph == Verdict::True ? Iv{up, up}
                          : ph == Verdict::False ? Iv{down, down} : Iv{down, up});
      psi_in_loop = v_or(psi_in_loop, closed_at(c, psi, j));
    }
    if (loopb.second <= 0) return res;
    if (loopb.first > 0 && psi_in_loop == Verdict::True) return Verdict::True;
    if (psi_in_loop == Verdict::False) return res;
    return v_or(res, Verdict::Unknown);
  }

  Verdict exists_state(const Formula* f, int s) {
    auto key = std::make_pair(f, s);
    auto it = state_memo.find(key);
    if (it != state_memo.end()) return it->second;
    Verdict out = Verdict::False;
    for (const auto& r : continuations(s)) {
      Ctx nc(r);
      Verdict v = ev(nc, f->kid(0).get(), 0, {});
      if (v == Verdict::True) {
        out = v;
        break;
      }
      if (v == Verdict::Unknown) out = v;
    }
    state_memo[key] = out;
    return out;
  }

  // ---- general evaluation ----

  static long long lookup(const Valuation& th, const std::string& x) {
    auto it = th.find(x);
    return it == th.end() ? 0 : it->second;
  }

  Verdict ev(Ctx& c, const Formula* f, long long p, const Valuation& th) {
    if (f->closed) return closed_at(c, f, p);
    OKey key{f, p, {}};
    key.th.reserve(f->free_vars.size());
    for (const auto& x : f->free_vars) key.th.push_back(lookup(th, x));
    auto it = c.open.find(key);
    if (it != c.open.end()) return it->second;
    Verdict v = open_compute(c, f, p, th);
    c.open.emplace(std::move(key), v);
    return v;
  }

  Verdict open_compute(Ctx& c, const Formula* f, long long p, const Valuation& th) {
    switch (f->op) {
      case Op::And: {
        Verdict l = ev(c, f->kid(0).get(), p, th);
        if (l == Verdict::False) return l;
        return v_and(l, ev(c, f->kid(1).get(), p, th));
      }
      case Op::Not: return v_not(ev(c, f->kid(0).get(), p, th));
      case Op::Next: return ev(c, f->kid(0).get(), p + 1, th);
      case Op::Until: {
        Verdict res = Verdict::False, acc = Verdict::True;
        for (long long j = p; j < p + window(c); ++j) {
          res = v_or(res, v_and(acc, ev(c, f->kid(1).get(), j, th)));
          if (res == Verdict::True) break;
          acc = v_and(acc, ev(c, f->kid(0).get(), j, th));
          if (acc == Verdict::False) break;
        }
        if (opt.strict_windows && res != Verdict::True && acc != Verdict::False) return Verdict::Unknown;
        return res;
      }
      case Op::FreqUntil: {
        long long up = f->ratio.den - f->ratio.num, down = -f->ratio.num;
        Verdict res = ev(c, f->kid(1).get(), p, th);
        Iv balv{0, 0};
        for (long long j = p + 1; j <= p + window(c) && res != Verdict::True; ++j) {
          Verdict ph = ev(c, f->kid(0).get(), j - 1, th);
          balv = iv_add(balv, ph == Verdict::True ? Iv{up, up}
                              : ph == Verdict::False ? Iv{down, down} : Iv{down, up});
          Verdict ok = balv.first >= 0 ? Verdict::True
                                       : (balv.second >= 0 ? Verdict::Unknown : Verdict::False);
          if (ok != Verdict::False) res = v_or(res, v_and(ok, ev(c, f->kid(1).get(), j, th)));
        }
        if (opt.strict_windows && res != Verdict::True) return Verdict::Unknown;
        return res;
      }
      case Op::Bind: {
        Valuation t2 = th;
        t2[f->name] = p;
        return ev(c, f->kid(0).get(), p, t2);
      }
      case Op::Compare: return compare(c, f, p, th);
      case Op::Exists: return exists_open(c, f, p, th);
      default: break;
    }
    return Verdict::Unknown;
  }

  Iv count(Ctx& c, const Formula* arg, long long from, long long to, const Valuation& th) {
    if (from > to) return {0, 0};
    if (arg->closed) {
      if (c.cum[arg].empty()) c.cum[arg].push_back({0, 0});
      while (static_cast<long long>(c.cum[arg].size()) <= to + 1) {
        long long j = static_cast<long long>(c.cum[arg].size()) - 1;
        Iv add = iv_of(closed_at(c, arg, j));
        auto& cu = c.cum[arg];
        cu.push_back(iv_add(cu.back(), add));
      }
      const auto& cc = c.cum[arg];
      return {cc[to + 1].first - cc[from].first, cc[to + 1].second - cc[from].second};
    }
    Iv out{0, 0};
    for (long long j = from; j <= to; ++j) out = iv_add(out, iv_of(ev(c, arg, j, th)));
    return out;
  }

  Iv side_value(Ctx& c, const std::vector<Term>& ts, long long p, const Valuation& th) {
    Iv s{0, 0};
    for (const auto& t : ts) {
      if (!t.arg) {
        s = iv_add(s, {t.coef, t.coef});
        continue;
      }
      long long from = std::max(0LL, lookup(th, t.var));
      s = iv_add(s, iv_scale(count(c, t.arg.get(), from, p, th), t.coef));
    }
    return s;
  }

  Verdict compare(Ctx& c, const Formula* f, long long p, const Valuation& th) {
    Iv l = side_value(c, f->lhs, p, th);
    Iv r = side_value(c, f->rhs, p, th);
    auto d = c.delta.find(f);
    if (d != c.delta.end()) l = iv_add(l, d->second);
    if (l.second <= r.first) return Verdict::True;
    if (l.first > r.second) return Verdict::False;
    return Verdict::Unknown;
  }

  const ExistsInfo& info(const Formula* e) {
    auto it = exists_info.find(e);
    if (it != exists_info.end()) return it->second;
    ExistsInfo inf;
    std::set<std::string> vis(e->free_vars.begin(), e->free_vars.end());
    std::function<void(const Formula*, std::set<std::string>)> walk = [&](const Formula* g,
                                                                         std::set<std::string> v) {
      if (g->closed || v.empty()) return;
      if (g->op == Op::Bind) v.erase(g->name);
      if (g->op == Op::Compare) {
        bool any = false;
        for (int side : {1, -1}) {
          const auto& ts = side > 0 ? g->lhs : g->rhs;
          for (std::size_t i = 0; i < ts.size(); ++i) {
            if (!ts[i].arg || !v.count(ts[i].var)) continue;
            any = true;
            inf.terms.push_back({g, side, i});
            if (!state_shaped(ts[i].arg.get())) inf.offsettable = false;
          }
        }
        if (any && std::find(inf.cmps.begin(), inf.cmps.end(), g) == inf.cmps.end()) inf.cmps.push_back(g);
        return;
      }
      for (const auto& kid : g->kids) walk(kid.get(), v);
    };
    walk(e->kid(0).get(), vis);
    return exists_info.emplace(e, std::move(inf)).first->second;
  }

  Verdict exists_open(Ctx& c, const Formula* f, long long p, const Valuation& th) {
    const ExistsInfo& inf = info(f);
    int s = c.run.at(p);
    if (inf.offsettable) {
      std::map<const Formula*, Iv> nd;
      for (const Formula* g : inf.cmps) {
        auto d = c.delta.find(g);
        nd[g] = d == c.delta.end() ? Iv{0, 0} : d->second;
      }
      for (const auto& vt : inf.terms) {
        const Term& t = (vt.side > 0 ? vt.cmp->lhs : vt.cmp->rhs)[vt.idx];
        long long from = std::max(0LL, lookup(th, t.var));
        Iv cnt = iv_scale(count(c, t.arg.get(), from, p - 1, th), t.coef * vt.side);
        nd[vt.cmp] = iv_add(nd[vt.cmp], cnt);
      }
      OKey key{f, s, {}};
      for (const Formula* g : inf.cmps) {
        key.th.push_back(nd[g].first);
        key.th.push_back(nd[g].second);
      }
      auto it = offset_memo.find(key);
      if (it != offset_memo.end()) return it->second;
      Valuation t2;
      for (const auto& x : f->free_vars) t2[x] = -1;
      Verdict out = Verdict::False;
      for (const auto& r : continuations(s)) {
        Ctx nc(r);
        for (auto& [g, iv] : nd) {
          nc.delta[g] = iv;
          nc.widen += std::max(std::abs(iv.first), std::abs(iv.second));
        }
        Verdict v = ev(nc, f->kid(0).get(), 0, t2);
        if (v == Verdict::True) {
          out = v;
          break;
        }
        if (v == Verdict::Unknown) out = v;
      }
      offset_memo.emplace(std::move(key), out);
      return out;
    }
    // Fall back to rebuilding the run with the shared prefix.
    Verdict out = Verdict::False;
    for (const auto& r : continuations(s)) {
      LassoRun nr;
      for (long long j = 0; j < p; ++j) nr.prefix.push_back(c.run.at(j));
      nr.prefix.insert(nr.prefix.end(), r.prefix.begin(), r.prefix.end());
      nr.loop = r.loop;
      Ctx nc(std::move(nr));
      nc.delta = c.delta;
      nc.widen = c.widen;
      Verdict v = ev(nc, f->kid(0).get(), p, th);
      if (v == Verdict::True) return v;
      if (v == Verdict::Unknown) out = v;
    }
    return out;
  }
};

Evaluator::Evaluator(const KripkeStructure& k, EvalOptions opt) : impl_(std::make_unique<Impl>(k, opt)) {}
Evaluator::~Evaluator() = default;

Verdict Evaluator::eval(const FormulaPtr& f, const LassoRun& run, long long i, const Valuation& theta) {
  impl_->keep.push_back(f);
  Ctx c(run);
  return impl_->ev(c, f.get(), i, theta);
}

Verdict Evaluator::eval_from_state(const FormulaPtr& f, int s) {
  impl_->keep.push_back(f);
  if (f->closed && f->op == Op::Exists) return impl_->exists_state(f.get(), s);
  auto e = mk_exists(f);
  impl_->keep.push_back(e);
  if (e->closed) return impl_->exists_state(e.get(), s);
  Verdict out = Verdict::False;
  for (const auto& r : impl_->continuations(s)) {
    Ctx c(r);
    Verdict v = impl_->ev(c, f.get(), 0, {});
    if (v == Verdict::True) return v;
    if (v == Verdict::Unknown) out = v;
  }
  return out;
}

const std::vector<LassoRun>& Evaluator::continuations(int s) { return impl_->continuations(s); }

Verdict eval_linear(const KripkeStructure& k, const LassoRun& run, const FormulaPtr& f, long long i,
                    const Valuation& theta, long long horizon, const StateLabels* extra) {
  if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
  if (i < 0) throw std::invalid_argument("negative position");
  if (run.loop.empty()) throw std::invalid_argument("empty loop");
  for (const auto& [x, v] : theta)
    if (v < 0 || v > i) throw std::invalid_argument("valuation of " + x + " exceeds the position");
  EvalOptions opt;
  opt.horizon = horizon;
  opt.extra = extra;
  Evaluator ev(k, opt);
  return ev.eval(f, run, i, theta);
}

Verdict eval_branching(const KripkeStructure& k, const FormulaPtr& f, int s, int loop_bound,
                       long long horizon) {
  if (horizon <= 0 || loop_bound <= 0) throw std::invalid_argument("bounds must be positive");
  if (!is_flat(k).flat) throw NotFlat("structure is not flat");
  EvalOptions opt;
  opt.horizon = horizon;
  opt.loop_bound = loop_bound;
  Evaluator ev(k, opt);
  return ev.eval_from_state(f, s);
}

}  // namespace fcl
