#include <algorithm>
#include <chrono>

#include "fcl/ph.hpp"

namespace fcl {

int RunCodec::state_at(const std::int64_t* r, std::int64_t i, std::vector<int>* deps) const {
  if (deps) deps->push_back(0);
  if (r[0] < 0 || r[0] >= static_cast<std::int64_t>(skeletons.size())) return -1;
  const auto& segs = skeletons[r[0]].segments;
  std::int64_t pos = 0;
  int loop = 0;
  for (std::size_t t = 0; t < segs.size(); ++t) {
    const auto& path = segs[t].path;
    const std::int64_t len = static_cast<std::int64_t>(path.size());
    if (t + 1 == segs.size()) return path[(i - pos) % len];
    std::int64_t reps = 1;
    if (segs[t].kind == SegKind::Loop) {
      if (deps) deps->push_back(1 + loop);
      reps = r[1 + loop++] + 1;
    }
    if (i < pos + len * reps) return path[(i - pos) % len];
    pos += len * reps;
  }
  return -1;
}

bool RunCodec::valid(const std::int64_t* r) const {
  if (r[0] < 0 || r[0] >= static_cast<std::int64_t>(skeletons.size())) return false;
  for (int j = 1 + skeletons[r[0]].loop_count(); j < n; ++j)
    if (r[j] != 0) return false;
  return true;
}

std::vector<std::int64_t> RunCodec::encode(int skeleton, const std::vector<long long>& counts) const {
  std::vector<std::int64_t> r(n, 0);
  r[0] = skeleton;
  for (std::size_t j = 0; j < counts.size(); ++j) r[1 + j] = counts[j] - 1;
  return r;
}

LassoRun RunCodec::decode(const std::vector<std::int64_t>& r) const {
  if (!valid(r.data())) throw PhError("not a run encoding");
  const auto& sk = skeletons[r[0]];
  std::vector<long long> counts;
  for (int j = 0; j < sk.loop_count(); ++j) counts.push_back(r[1 + j] + 1);
  return instantiate(sk, counts);
}

namespace {

std::string prime(const std::string& x) { return x + "'"; }

std::vector<std::string> run_vars(int n, const std::string& suffix) {
  std::vector<std::string> out;
  for (int j = 1; j <= n; ++j) out.push_back("r" + std::to_string(j) + suffix);
  return out;
}

// Can the skeleton emit w[from..] starting at segment t0?
bool fits(const PathSchemaSkeleton& sk, std::size_t t0, const std::vector<int>& w, std::size_t from) {
  const auto& segs = sk.segments;
  std::vector<std::size_t> base(segs.size() + 1, 0);
  for (std::size_t t = 0; t < segs.size(); ++t) base[t + 1] = base[t] + segs[t].path.size();
  std::vector<char> cur(base.back(), 0), nxt(base.back(), 0);
  if (t0 >= segs.size()) return from >= w.size();
  cur[base[t0]] = 1;
  for (std::size_t j = from; j < w.size(); ++j) {
    std::fill(nxt.begin(), nxt.end(), 0);
    bool any = false;
    for (std::size_t t = 0; t < segs.size(); ++t) {
      const auto& path = segs[t].path;
      for (std::size_t o = 0; o < path.size(); ++o) {
        if (!cur[base[t] + o] || path[o] != w[j]) continue;
        any = true;
        if (o + 1 < path.size()) {
          nxt[base[t] + o + 1] = 1;
        } else if (segs[t].kind == SegKind::Row) {
          if (t + 1 < segs.size()) nxt[base[t + 1]] = 1;
        } else {
          nxt[base[t]] = 1;
          if (t + 1 < segs.size()) nxt[base[t + 1]] = 1;
        }
      }
    }
    if (!any) return false;
    std::swap(cur, nxt);
  }
  return true;
}

// States of the run encoded at r on positions 0..i; empty when r selects no schema.
std::vector<int> prefix(const RunCodec& c, const std::int64_t* r, std::int64_t i, std::vector<int>* deps) {
  std::vector<int> out;
  for (std::int64_t p = 0; p <= i; ++p) {
    int s = c.state_at(r, p, deps);
    if (s < 0) return {};
    out.push_back(s);
  }
  return out;
}

void unique_deps(std::vector<int>* deps) {
  std::sort(deps->begin(), deps->end());
  deps->erase(std::unique(deps->begin(), deps->end()), deps->end());
}

PhDom agree_candidates(const RunCodec& c, const std::int64_t* a, const char* known, int k, std::vector<int>* deps) {
  const int n = c.n;
  if (k < n) return PhDom::all();
  const int j = k - n;
  for (int x = 0; x < n; ++x)
    if (!known[x]) return PhDom::all();
  for (int x = 0; x < j; ++x)
    if (!known[n + x]) return PhDom::all();
  if (!known[2 * n]) return PhDom::all();
  const std::int64_t i = a[2 * n];
  deps->push_back(2 * n);
  std::vector<int> w = prefix(c, a, i, deps);
  if (w.empty()) return PhDom::none();
  const int nsk = static_cast<int>(c.skeletons.size());
  if (j == 0) {
    PhDom out;
    for (int s = 0; s < nsk; ++s)
      if (fits(c.skeletons[s], 0, w, 0)) out = out.join(PhDom::point(s));
    return out;
  }
  deps->push_back(n);
  const std::int64_t s = a[n];
  if (s < 0 || s >= nsk) return PhDom::none();
  const auto& sk = c.skeletons[s];
  const int loop = j - 1;
  if (loop >= sk.loop_count()) return PhDom::all();
  for (int x = 1; x < j; ++x) deps->push_back(n + x);
  std::int64_t pos = 0;
  int seen = 0;
  for (std::size_t t = 0; t + 1 < sk.segments.size(); ++t) {
    const auto& path = sk.segments[t].path;
    const std::int64_t len = static_cast<std::int64_t>(path.size());
    const bool is_loop = sk.segments[t].kind == SegKind::Loop;
    if (is_loop && seen == loop) {
      if (pos > i) return PhDom::all();
      PhDom out;
      for (std::int64_t m = 1;; ++m) {
        std::int64_t from = pos + len * (m - 1);
        for (std::int64_t o = 0; o < len && from + o <= i; ++o)
          if (path[o] != w[from + o]) return out;
        if (from + len - 1 >= i) return out.join(PhDom::range(m - 1, kPhInf));
        if (fits(sk, t + 1, w, static_cast<std::size_t>(from + len))) out = out.join(PhDom::point(m - 1));
      }
    }
    std::int64_t reps = is_loop ? a[n + 1 + seen++] + 1 : 1;
    for (std::int64_t p = pos; p < pos + len * reps && p <= i; ++p)
      if (path[(p - pos) % len] != w[p]) return PhDom::none();
    pos += len * reps;
  }
  return PhDom::all();
}

}  // namespace

RunPredicates encode_run_predicates(const KripkeStructure& k) {
  auto codec = std::make_shared<RunCodec>();
  codec->k = k;
  codec->skeletons = enumerate_path_schemas(k);
  if (codec->skeletons.empty()) throw PhError("the structure has no path schema from its initial state");
  int loops = 0;
  for (const auto& sk : codec->skeletons) loops = std::max(loops, sk.loop_count());
  codec->n = 1 + loops;
  const int n = codec->n;
  RunPredicates out;
  out.n = n;
  out.codec = codec;
  std::shared_ptr<const RunCodec> c = codec;

  auto r = run_vars(n, "");
  auto rp = run_vars(n, "'");

  // Run
  {
    std::vector<PhPtr> alts;
    for (std::size_t s = 0; s < c->skeletons.size(); ++s) {
      std::vector<PhPtr> parts{ph_eq(ph_var(r[0]), ph_const(static_cast<std::int64_t>(s)))};
      for (int j = 1 + c->skeletons[s].loop_count(); j < n; ++j) parts.push_back(ph_eq(ph_var(r[j]), ph_const(0)));
      alts.push_back(ph_and(parts));
    }
    PhDef d{r, ph_or(alts), std::make_shared<PhNative>()};
    d.native->holds = [c](const std::int64_t* a, std::vector<int>* deps) {
      deps->push_back(0);
      if (a[0] < 0 || a[0] >= static_cast<std::int64_t>(c->skeletons.size())) return false;
      for (int j = 1 + c->skeletons[a[0]].loop_count(); j < c->n; ++j) {
        deps->push_back(j);
        if (a[j] != 0) return false;
      }
      return true;
    };
    d.native->candidates = [c](const std::int64_t* a, const char* known, int k, std::vector<int>* deps) {
      const auto nsk = static_cast<std::int64_t>(c->skeletons.size());
      if (k == 0) return PhDom::range(0, nsk - 1);
      if (!known[0]) return PhDom::all();
      deps->push_back(0);
      if (a[0] < 0 || a[0] >= nsk) return PhDom::none();
      return k - 1 >= c->skeletons[a[0]].loop_count() ? PhDom::point(0) : PhDom::all();
    };
    out.defs["Run"] = d;
  }

  // Conf
  {
    std::vector<PhPtr> alts;
    for (std::size_t s = 0; s < c->skeletons.size(); ++s) {
      const auto& segs = c->skeletons[s].segments;
      std::vector<PhPtr> where;
      PhTerm start = ph_const(0);
      int loop = 0;
      for (std::size_t t = 0; t < segs.size(); ++t) {
        const auto& path = segs[t].path;
        const auto len = static_cast<std::int64_t>(path.size());
        const bool last = t + 1 == segs.size();
        PhTerm next = start;
        if (!last) next = segs[t].kind == SegKind::Loop ? start + ph_var(r[1 + loop++], len) + ph_const(len) : start + ph_const(len);
        std::vector<PhPtr> parts{ph_le(start, ph_var("i"))};
        if (!last) parts.push_back(ph_le(ph_var("i") + ph_const(1), next));
        if (len == 1) {
          parts.push_back(ph_eq(ph_var("s"), ph_const(path[0])));
        } else {
          std::vector<PhPtr> pick;
          for (std::int64_t o = 0; o < len; ++o)
            pick.push_back(ph_and(ph_eq(ph_var("o"), ph_const(o)), ph_eq(ph_var("s"), ph_const(path[o]))));
          PhPtr body;
          if (segs[t].kind == SegKind::Row) {
            body = ph_exists("o", ph_and(ph_eq(start + ph_var("o"), ph_var("i")), ph_or(pick)));
          } else {
            body = ph_exists("q", ph_exists("o", ph_and({ph_le(ph_var("o") + ph_const(1), ph_const(len)),
                                                          ph_eq(start + ph_var("q", len) + ph_var("o"), ph_var("i")),
                                                          ph_or(pick)})));
          }
          parts.push_back(body);
        }
        where.push_back(ph_and(parts));
        start = next;
      }
      alts.push_back(ph_and(ph_eq(ph_var(r[0]), ph_const(static_cast<std::int64_t>(s))), ph_or(where)));
    }
    auto params = r;
    params.push_back("i");
    params.push_back("s");
    PhDef d{params, ph_or(alts), std::make_shared<PhNative>()};
    d.native->holds = [c](const std::int64_t* a, std::vector<int>* deps) {
      deps->push_back(c->n);
      deps->push_back(c->n + 1);
      int st = c->state_at(a, a[c->n], deps);
      return st >= 0 && st == a[c->n + 1];
    };
    d.native->candidates = [c](const std::int64_t* a, const char* known, int k, std::vector<int>* deps) {
      if (k != c->n + 1 || !known[c->n]) return PhDom::all();
      for (int j = 0; j < c->n; ++j)
        if (!known[j]) return PhDom::all();
      deps->push_back(c->n);
      int st = c->state_at(a, a[c->n], deps);
      return st < 0 ? PhDom::none() : PhDom::point(st);
    };
    out.defs["Conf"] = d;
  }

  // Agree
  {
    auto conf = [&](const std::vector<std::string>& v) {
      auto args = v;
      args.push_back("j");
      args.push_back("s");
      return ph_pred("Conf", args);
    };
    PhPtr body = ph_not(ph_exists(
        "j", ph_and(ph_le(ph_var("j"), ph_var("i")), ph_not(ph_exists("s", ph_and(conf(r), conf(rp)))))));
    auto params = r;
    params.insert(params.end(), rp.begin(), rp.end());
    params.push_back("i");
    PhDef d{params, body, std::make_shared<PhNative>()};
    d.native->holds = [c](const std::int64_t* a, std::vector<int>* deps) {
      const int n = c->n;
      deps->push_back(2 * n);
      std::vector<int> second;
      bool ok = true;
      for (std::int64_t p = 0; p <= a[2 * n] && ok; ++p) {
        int x = c->state_at(a, p, deps);
        int y = c->state_at(a + n, p, &second);
        ok = x >= 0 && y >= 0 && x == y;
      }
      for (int q : second) deps->push_back(q + n);
      unique_deps(deps);
      return ok;
    };
    d.native->candidates = [c](const std::int64_t* a, const char* known, int k, std::vector<int>* deps) {
      return agree_candidates(*c, a, known, k, deps);
    };
    out.defs["Agree"] = d;
  }
  return out;
}

namespace {

struct Encoder {
  int n;
  const KripkeStructure& k;
  int zs = 0;

  PhPtr atom(const std::string& p, const std::vector<std::string>& r, const std::string& i) {
    std::vector<PhPtr> alts;
    for (int s = 0; s < k.size(); ++s)
      if (k.has_label(s, p)) alts.push_back(ph_eq(ph_var("s"), ph_const(s)));
    auto args = r;
    args.push_back(i);
    args.push_back("s");
    return ph_exists("s", ph_and(ph_pred("Conf", args), ph_or(alts)));
  }

  static std::string var_name(const std::string& x) { return "x_" + x; }

  PhPtr compare(const FormulaPtr& f, const std::vector<std::string>& r, const std::string& i) {
    // move negative coefficients across so both sides are natural
    PhTerm lhs, rhs;
    std::vector<PhPtr> counts;
    std::vector<std::string> zvars;
    auto add = [&](const Term& t, bool left) {
      if (t.coef == 0) return;
      bool to_left = (t.coef > 0) == left;
      std::int64_t a = t.coef > 0 ? t.coef : -t.coef;
      if (!t.arg) {
        (to_left ? lhs : rhs) = (to_left ? lhs : rhs) + ph_const(a);
        return;
      }
      std::string z = "z" + std::to_string(++zs);
      std::string j = prime(i);
      zvars.push_back(z);
      counts.push_back(ph_count(z, j, ph_and({ph_le(ph_var(var_name(t.var)), ph_var(j)), ph_le(ph_var(j), ph_var(i)),
                                              chk(t.arg, r, j)})));
      (to_left ? lhs : rhs) = (to_left ? lhs : rhs) + ph_var(z, a);
    };
    for (const auto& t : f->lhs) add(t, true);
    for (const auto& t : f->rhs) add(t, false);
    std::int64_t m = std::min(lhs.constant, rhs.constant);
    lhs.constant -= m;
    rhs.constant -= m;
    counts.push_back(ph_le(lhs, rhs));
    PhPtr out = ph_and(counts);
    for (auto it = zvars.rbegin(); it != zvars.rend(); ++it) out = ph_exists(*it, out);
    return out;
  }

  PhPtr chk(const FormulaPtr& f, const std::vector<std::string>& r, const std::string& i) {
    switch (f->op) {
      case Op::True:
        return ph_true();
      case Op::Atom:
        return atom(f->name, r, i);
      case Op::And:
        return ph_and(chk(f->kid(0), r, i), chk(f->kid(1), r, i));
      case Op::Not:
        return ph_not(chk(f->kid(), r, i));
      case Op::Next: {
        std::string j = prime(i);
        return ph_exists(j, ph_and(ph_eq(ph_var(j), ph_var(i) + ph_const(1)), chk(f->kid(), r, j)));
      }
      case Op::Until: {
        std::string j = prime(i), l = prime(j);
        PhPtr gap = ph_exists(j, ph_and({ph_le(ph_var(i), ph_var(j)), ph_le(ph_var(j) + ph_const(1), ph_var(l)),
                                         ph_not(chk(f->kid(0), r, j))}));
        return ph_exists(l, ph_and({ph_le(ph_var(i), ph_var(l)), chk(f->kid(1), r, l), ph_not(gap)}));
      }
      case Op::Exists: {
        std::vector<std::string> rp;
        for (const auto& x : r) rp.push_back(prime(x));
        auto agree = r;
        agree.insert(agree.end(), rp.begin(), rp.end());
        agree.push_back(i);
        PhPtr out = ph_and({ph_pred("Run", rp), ph_pred("Agree", agree), chk(f->kid(), rp, i)});
        for (auto it = rp.rbegin(); it != rp.rend(); ++it) out = ph_exists(*it, out);
        return out;
      }
      case Op::Bind: {
        std::string x = var_name(f->name);
        return ph_exists(x, ph_and(ph_eq(ph_var(x), ph_var(i)), chk(f->kid(), r, i)));
      }
      case Op::Compare:
        return compare(f, r, i);
      case Op::FreqUntil:
        break;
    }
    throw PhError("unsupported operator in the PH encoding: " + to_string(f));
  }
};

}  // namespace

PhEncoding encode_cctls_to_ph(const KripkeStructure& k, const FormulaPtr& f) {
  if (!f->closed) throw PhError("formula has free position variables: " + to_string(f));
  RunPredicates rp = encode_run_predicates(k);
  FormulaPtr g = desugar_frequency_until(f);
  Encoder e{rp.n, k};
  auto r = run_vars(rp.n, "");
  PhPtr body = ph_and({ph_pred("Run", r), ph_eq(ph_var("i"), ph_const(0)), e.chk(g, r, "i")});
  PhPtr s = ph_exists("i", body);
  for (auto it = r.rbegin(); it != r.rend(); ++it) s = ph_exists(*it, s);
  PhEncoding out;
  out.defs = rp.defs;
  out.sentence = s;
  out.n = rp.n;
  return out;
}

CctlBoundedResult check_cctl_bounded(const KripkeStructure& k, const FormulaPtr& f, const PhEvalOptions& opt) {
  PhEncoding enc = encode_cctls_to_ph(k, f);
  CctlBoundedResult out;
  out.sentence_size = ph_size(enc.sentence);
  out.verdict = eval_ph(enc.sentence, enc.defs, {}, opt, &out.stats);
  return out;
}

}  // namespace fcl
