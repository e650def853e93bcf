#include <bitset>
#include <deque>
#include <unordered_map>

#include "fcl/ph.hpp"

namespace fcl {

namespace {

constexpr int kMaxVars = 256;
using Bits = std::bitset<kMaxVars>;
// Not a variable: marks results that rest on a counterexample search cut off at its cap.
constexpr int kCut = kMaxVars - 1;

struct BudgetExceeded {};

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& k) const {
    std::size_t h = k.size();
    for (auto v : k) h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::size_t>(v) + (h >> 29);
    return h;
  }
};

// Results keyed by the values of the variables a result depended on.
struct Slot {
  Bits mask;
  std::vector<int> vars;
  std::unordered_map<std::vector<std::int64_t>, std::int64_t, KeyHash> map;
};

struct CTerm {
  std::int64_t c = 0;
  std::vector<std::pair<std::int64_t, int>> v;
};

struct CNode {
  PhOp op = PhOp::Le;
  CTerm l, r;
  int var = -1, cnt = -1;
  std::vector<CNode*> kids;
  const PhNative* native = nullptr;
  std::vector<int> args;
  Bits free;
  std::vector<Slot> memo[3];
};

struct Res {
  Verdict v;
  Bits d;
};

struct CountRes {
  std::int64_t count;  // -1: unknown
  Bits d;
};

struct Range {
  PhDom may, must;
};

int flip(int pol) { return pol == 2 ? 2 : 1 - pol; }

class PhEvaluator {
 public:
  PhEvaluator(const PhDefinitions& defs, const PhEvalOptions& opt) : defs_(defs), opt_(opt) {
    bound_ = opt.domain_bound;
  }

  CNode* compile(const PhPtr& f) {
    CNode* root = build(ph_expand(f, defs_, true));
    // counterexamples are searched at least past every constant of the formula
    ubound_ = opt_.universal_bound > 0 ? opt_.universal_bound : std::max({std::int64_t{1}, bound_ / 4, cmax_ + 1});
    return root;
  }

  // Free variables keep one id; a bound variable holds its id only within its scope.
  int id(const std::string& x) {
    auto sc = scope_.find(x);
    if (sc != scope_.end() && !sc->second.empty()) return sc->second.back();
    auto it = ids_.find(x);
    if (it != ids_.end()) return it->second;
    int i = fresh(x, false);
    ids_[x] = i;
    return i;
  }

  int fresh(const std::string& x, bool reuse = true) {
    if (reuse && !spare_.empty()) {
      int i = spare_.back();
      spare_.pop_back();
      names_[i] = x;
      return i;
    }
    int i = static_cast<int>(names_.size());
    if (i >= kCut) throw PhError("too many PH variables in scope (limit " + std::to_string(kCut) + ")");
    names_.push_back(x);
    val_.push_back(0);
    bound_flag_.push_back(0);
    masked_.push_back(0);
    return i;
  }

  const std::string& name(int v) const { return names_[v]; }
  std::int64_t value(int v) const { return val_[v]; }

  void set(int v, std::int64_t x) {
    val_[v] = x;
    bound_flag_[v] = 1;
  }

  void require_bound(const CNode* n) const {
    for (std::size_t v = 0; v < names_.size(); ++v)
      if (n->free[v] && !bound_flag_[v]) throw PhError("free variable " + names_[v] + " has no value");
  }

  Res eval(CNode* n, int pol) {
    if (++stats.steps > opt_.max_steps) throw BudgetExceeded{};
    switch (n->op) {
      case PhOp::Le: {
        Bits d;
        std::int64_t a = term(n->l, d), b = term(n->r, d);
        return {v_of(a <= b), d};
      }
      case PhOp::Not: {
        Res r = eval(n->kids[0], flip(pol));
        r.v = v_not(r.v);
        return r;
      }
      case PhOp::And: {
        Bits d;
        bool unknown = false;
        for (CNode* k : n->kids) {
          Res r = eval(k, pol);
          if (r.v == Verdict::False) return r;
          unknown = unknown || r.v == Verdict::Unknown;
          d |= r.d;
        }
        return {unknown ? Verdict::Unknown : Verdict::True, d};
      }
      case PhOp::Pred: {
        args_.clear();
        for (int a : n->args) args_.push_back(val_[a]);
        deps_.clear();
        bool ok = n->native->holds(args_.data(), &deps_);
        Bits d;
        for (int i : deps_) d.set(n->args[i]);
        return {v_of(ok), d};
      }
      case PhOp::Count: {
        CountRes c = count(n);
        c.d.set(n->cnt);
        if (c.count < 0) return {Verdict::Unknown, c.d};
        return {v_of(val_[n->cnt] == c.count), c.d};
      }
      case PhOp::Exists:
        break;
    }
    std::int64_t hit;
    Bits hd;
    if (lookup(n->memo[pol], hit, hd)) return {static_cast<Verdict>(hit), hd};
    Res r = exists(n, pol);
    store(n->memo[pol], r.d, static_cast<std::int64_t>(r.v));
    return r;
  }

  // Candidate values for the variable bound by n, with the variables they were read from.
  PhDom domain(CNode* n, int pol, Bits& dd, std::int64_t& tail) {
    int x = n->var;
    ++masked_[x];
    Range m = range(n->kids[0], x, true, dd);
    --masked_[x];
    tail = m.may.bounded() ? -1 : m.may.iv.back().first;
    return capped(m.may, pol == 1 ? ubound_ : bound_);
  }

  // An unbounded tail [lo, inf) is searched up to lo + cap.
  static PhDom capped(const PhDom& d, std::int64_t cap) {
    if (d.bounded()) return d;
    return d.meet(PhDom::range(0, d.iv.back().first + cap));
  }

  struct Scope {
    PhEvaluator& e;
    int v;
    std::int64_t val;
    char bound, masked;
    Scope(PhEvaluator& e_, int v_) : e(e_), v(v_), val(e_.val_[v_]), bound(e_.bound_flag_[v_]), masked(e_.masked_[v_]) {
      e.bound_flag_[v] = 1;
      e.masked_[v] = 0;
    }
    ~Scope() {
      e.val_[v] = val;
      e.bound_flag_[v] = bound;
      e.masked_[v] = masked;
    }
  };

  PhEvalStats stats;

 private:
  const PhDefinitions& defs_;
  PhEvalOptions opt_;
  std::int64_t bound_, ubound_ = 1, cmax_ = 0;
  std::deque<CNode> pool_;
  std::unordered_map<std::string, int> ids_;
  std::unordered_map<std::string, std::vector<int>> scope_;
  std::vector<int> spare_;
  std::vector<std::string> names_;
  std::vector<std::int64_t> val_;
  std::vector<char> bound_flag_, masked_;
  std::vector<std::int64_t> args_, key_;
  std::vector<int> deps_;
  std::vector<char> known_;

  CTerm cterm(const PhTerm& t, Bits& free) {
    CTerm c;
    c.c = t.constant;
    cmax_ = std::max(cmax_, t.constant);
    for (const auto& [a, x] : t.vars) {
      int v = id(x);
      c.v.push_back({a, v});
      free.set(v);
    }
    return c;
  }

  CNode* build(const PhPtr& f) {
    pool_.emplace_back();
    CNode* n = &pool_.back();
    n->op = f->op;
    switch (f->op) {
      case PhOp::Le:
        n->l = cterm(f->lhs, n->free);
        n->r = cterm(f->rhs, n->free);
        break;
      case PhOp::Not:
        n->kids = {build(f->kids[0])};
        n->free = n->kids[0]->free;
        break;
      case PhOp::And: {
        // flatten nested conjunctions
        std::vector<PhPtr> todo{f->kids[1], f->kids[0]};
        while (!todo.empty()) {
          PhPtr g = todo.back();
          todo.pop_back();
          if (g->op == PhOp::And) {
            todo.push_back(g->kids[1]);
            todo.push_back(g->kids[0]);
            continue;
          }
          n->kids.push_back(build(g));
          n->free |= n->kids.back()->free;
        }
        break;
      }
      case PhOp::Exists:
      case PhOp::Count:
        n->var = fresh(f->var);
        scope_[f->var].push_back(n->var);
        n->kids = {build(f->kids[0])};
        scope_[f->var].pop_back();
        spare_.push_back(n->var);
        n->free = n->kids[0]->free;
        n->free.reset(n->var);
        if (f->op == PhOp::Count) {
          n->cnt = id(f->count);
          n->free.set(n->cnt);
        }
        break;
      case PhOp::Pred: {
        const PhDef& d = defs_.at(f->name);
        n->native = d.native.get();
        for (const auto& a : f->args) {
          n->args.push_back(id(a));
          n->free.set(n->args.back());
        }
        break;
      }
    }
    return n;
  }

  std::int64_t term(const CTerm& t, Bits& d) {
    std::int64_t s = t.c;
    for (const auto& [a, v] : t.v) {
      s += a * val_[v];
      d.set(v);
    }
    return s;
  }

  bool known(int v) const { return bound_flag_[v] && !masked_[v]; }

  bool lookup(std::vector<Slot>& slots, std::int64_t& out, Bits& d) {
    for (auto& s : slots) {
      key_.clear();
      for (int v : s.vars) key_.push_back(val_[v]);
      auto it = s.map.find(key_);
      if (it != s.map.end()) {
        ++stats.memo_hits;
        out = it->second;
        d = s.mask;
        return true;
      }
    }
    return false;
  }

  void store(std::vector<Slot>& slots, const Bits& mask, std::int64_t value) {
    Slot* s = nullptr;
    for (auto& c : slots)
      if (c.mask == mask) s = &c;
    if (!s) {
      slots.emplace_back();
      s = &slots.back();
      s->mask = mask;
      for (int v = 0; v < kMaxVars; ++v)
        if (mask[v] && v != kCut) s->vars.push_back(v);
    }
    std::vector<std::int64_t> k;
    for (int v : s->vars) k.push_back(val_[v]);
    s->map.emplace(std::move(k), value);
  }

  Res exists(CNode* n, int pol) {
    int x = n->var;
    Bits acc;
    std::int64_t tail;
    PhDom dom = domain(n, pol, acc, tail);
    Scope scope(*this, x);
    bool unknown = false;
    for (const auto& [lo, hi] : dom.iv)
      for (std::int64_t v = lo; v <= hi; ++v) {
        val_[x] = v;
        Res r = eval(n->kids[0], pol);
        if (r.v == Verdict::True || !r.d[x]) {
          // a witness, or a body that never looked at x
          // a far witness may only have survived because the refuting search stopped short
          if (r.v == Verdict::True && pol == 0 && tail >= 0 && r.d[kCut] && 2 * (v - tail) > ubound_)
            r.v = Verdict::Unknown;
          r.d.reset(x);
          return r;
        }
        acc |= r.d;
        unknown = unknown || r.v == Verdict::Unknown;
      }
    acc.reset(x);
    if (pol == 1 && tail >= 0) acc.set(kCut);
    return {unknown ? Verdict::Unknown : Verdict::False, acc};
  }

  CountRes count(CNode* n) {
    std::int64_t hit;
    Bits hd;
    if (lookup(n->memo[0], hit, hd)) return {hit, hd};
    int y = n->var;
    Bits acc;
    ++masked_[y];
    Range m = range(n->kids[0], y, true, acc);
    --masked_[y];
    bool frontier = !m.may.bounded();
    std::int64_t base = frontier ? m.may.iv.back().first : 0;
    PhDom dom = capped(m.may, bound_);
    CountRes out{0, {}};
    bool unknown = false, early = false;
    {
      Scope scope(*this, y);
      for (std::size_t j = 0; j < dom.iv.size() && !early; ++j)
        for (std::int64_t v = dom.iv[j].first; v <= dom.iv[j].second; ++v) {
          val_[y] = v;
          Res r = eval(n->kids[0], 2);
          acc |= r.d;
          if (!r.d[y]) {
            // same answer for every candidate
            if (r.v == Verdict::Unknown || (r.v == Verdict::True && frontier))
              unknown = true;
            else
              out.count = r.v == Verdict::True ? dom.size() : 0;
            early = true;
            break;
          }
          if (r.v == Verdict::Unknown) unknown = true;
          if (r.v == Verdict::True) {
            ++out.count;
            if (frontier && 2 * (v - base) > bound_) unknown = true;
          }
        }
    }
    acc.reset(y);
    out.d = acc;
    if (unknown) out.count = -1;
    store(n->memo[0], out.d, out.count);
    return out;
  }

  // Necessary (may) and sufficient (must) sets of values of x for n to hold.
  Range range(CNode* n, int x, bool chain, Bits& dd) {
    switch (n->op) {
      case PhOp::Le: {
        std::int64_t a = 0, rest = n->r.c - n->l.c;
        Bits d;
        for (const auto& [c, v] : n->l.v) {
          if (v == x) {
            a += c;
          } else {
            if (!known(v)) return {PhDom::all(), PhDom::none()};
            rest -= c * val_[v];
            d.set(v);
          }
        }
        for (const auto& [c, v] : n->r.v) {
          if (v == x) {
            a -= c;
          } else {
            if (!known(v)) return {PhDom::all(), PhDom::none()};
            rest += c * val_[v];
            d.set(v);
          }
        }
        dd |= d;
        PhDom s;
        if (a == 0)
          s = rest >= 0 ? PhDom::all() : PhDom::none();
        else if (a > 0)
          s = rest < 0 ? PhDom::none() : PhDom::range(0, rest / a);
        else
          s = rest >= 0 ? PhDom::all() : PhDom::range((-rest + (-a) - 1) / (-a), kPhInf);
        return {s, s};
      }
      case PhOp::Not: {
        Range r = range(n->kids[0], x, false, dd);
        return {r.must.complement(), r.may.complement()};
      }
      case PhOp::And: {
        Range out{PhDom::all(), PhDom::all()};
        for (CNode* k : n->kids) {
          Range r = range(k, x, false, dd);
          out.may = out.may.meet(r.may);
          out.must = out.must.meet(r.must);
          if (out.may.empty()) break;
        }
        return out;
      }
      case PhOp::Exists: {
        if (!chain || n->var == x) return {PhDom::all(), PhDom::none()};
        ++masked_[n->var];
        Range r = range(n->kids[0], x, true, dd);
        --masked_[n->var];
        return r;
      }
      case PhOp::Count: {
        if (n->cnt != x || n->var == x || n->kids[0]->free[x]) return {PhDom::all(), PhDom::none()};
        for (std::size_t v = 0; v < names_.size(); ++v)
          if (n->kids[0]->free[v] && static_cast<int>(v) != n->var && !known(static_cast<int>(v)))
            return {PhDom::all(), PhDom::none()};
        CountRes c = count(n);
        dd |= c.d;
        if (c.count < 0) return {PhDom::all(), PhDom::none()};
        return {PhDom::point(c.count), PhDom::point(c.count)};
      }
      case PhOp::Pred: {
        if (!n->native->candidates || !n->free[x]) return {PhDom::all(), PhDom::none()};
        std::vector<std::int64_t> vals;
        std::vector<char> kn;
        for (int a : n->args) {
          bool k = a != x && known(a);
          kn.push_back(k);
          vals.push_back(k ? val_[a] : 0);
        }
        PhDom out = PhDom::all();
        std::vector<int> deps;
        for (std::size_t i = 0; i < n->args.size(); ++i) {
          if (n->args[i] != x) continue;
          deps.clear();
          out = out.meet(n->native->candidates(vals.data(), kn.data(), static_cast<int>(i), &deps));
          for (int j : deps) dd.set(n->args[j]);
        }
        dd.reset(x);
        return {out, PhDom::none()};
      }
    }
    return {PhDom::all(), PhDom::none()};
  }
};

}  // namespace

Verdict eval_ph(const PhPtr& f, const PhDefinitions& defs, const std::map<std::string, std::int64_t>& env,
                const PhEvalOptions& opt, PhEvalStats* stats) {
  PhEvaluator e(defs, opt);
  CNode* root = e.compile(f);
  for (const auto& [x, v] : env) {
    if (v < 0) throw PhError("negative value for " + x);
    e.set(e.id(x), v);
  }
  e.require_bound(root);
  Verdict out;
  try {
    out = e.eval(root, 0).v;
  } catch (const BudgetExceeded&) {
    e.stats.budget_exhausted = true;
    out = Verdict::Unknown;
  }
  if (stats) *stats = e.stats;
  return out;
}

Verdict eval_ph(const PhPtr& f, const std::map<std::string, std::int64_t>& env, std::int64_t domain_bound) {
  PhEvalOptions opt;
  opt.domain_bound = domain_bound;
  return eval_ph(f, {}, env, opt);
}

PhSat sat_ph_bounded(const PhPtr& f, const PhDefinitions& defs, const PhEvalOptions& opt) {
  PhEvaluator e(defs, opt);
  CNode* root = e.compile(f);
  e.require_bound(root);
  PhSat out;
  try {
    out.verdict = e.eval(root, 0).v;
    if (out.verdict == Verdict::True) {
      // walk the leading existential block, taking the first value that keeps the rest true
      for (CNode* n = root; n->op == PhOp::Exists; n = n->kids[0]) {
        Bits dd;
        std::int64_t tail;
        PhDom dom = e.domain(n, 0, dd, tail);
        bool found = false;
        for (const auto& [lo, hi] : dom.iv) {
          for (std::int64_t v = lo; v <= hi && !found; ++v) {
            e.set(n->var, v);
            if (e.eval(n->kids[0], 0).v == Verdict::True) found = true;
          }
          if (found) break;
        }
        if (!found) break;
        out.witness[e.name(n->var)] = e.value(n->var);
      }
      out.sat = true;
    }
  } catch (const BudgetExceeded&) {
    e.stats.budget_exhausted = true;
    out.verdict = Verdict::Unknown;
  }
  out.stats = e.stats;
  return out;
}

}  // namespace fcl
