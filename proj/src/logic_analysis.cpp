#include <algorithm>
#include <functional>
#include <unordered_set>

#include "fcl/logic.hpp"

namespace fcl {

namespace {

bool is_temporal(Op op) { return op == Op::Next || op == Op::Until || op == Op::FreqUntil; }

bool has_freq(const FormulaPtr& f) {
  if (f->op == Op::FreqUntil) return true;
  for (const auto& k : f->kids)
    if (has_freq(k)) return true;
  for (const auto* side : {&f->lhs, &f->rhs})
    for (const auto& t : *side)
      if (t.arg && has_freq(t.arg)) return true;
  return false;
}

// Every temporal operator sits directly under an E, up to negations.
bool state_shaped(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True:
    case Op::Atom:
      return true;
    case Op::Next:
    case Op::Until:
    case Op::FreqUntil:
      return false;
    case Op::Exists: {
      auto body = strip_not(f->kid(), nullptr);
      if (is_temporal(body->op)) {
        for (const auto& k : body->kids)
          if (!state_shaped(k)) return false;
        return true;
      }
      return state_shaped(body);
    }
    case Op::Compare:
      for (const auto* side : {&f->lhs, &f->rhs})
        for (const auto& t : *side)
          if (t.arg && !state_shaped(t.arg)) return false;
      return true;
    default:
      for (const auto& k : f->kids)
        if (!state_shaped(k)) return false;
      return true;
  }
}

}  // namespace

const char* fragment_name(Fragment f) {
  switch (f) {
    case Fragment::LTL: return "LTL";
    case Fragment::CTL: return "CTL";
    case Fragment::CTLStar: return "CTL*";
    case Fragment::FLTL: return "fLTL";
    case Fragment::FCTL: return "fCTL";
    case Fragment::FCTLStar: return "fCTL*";
    case Fragment::CLTL: return "CLTL";
    case Fragment::CCTL: return "CCTL";
    case Fragment::CCTLStar: return "CCTL*";
  }
  return "?";
}

bool is_linear(const FormulaPtr& f) { return !f->has_exists; }

Fragment classify_fragment(const FormulaPtr& f) {
  bool linear = is_linear(f);
  bool branching = state_shaped(f);
  if (f->has_counting) {
    if (linear) return Fragment::CLTL;
    return branching ? Fragment::CCTL : Fragment::CCTLStar;
  }
  if (has_freq(f)) {
    if (linear) return Fragment::FLTL;
    return branching ? Fragment::FCTL : Fragment::FCTLStar;
  }
  if (linear) return Fragment::LTL;
  return branching ? Fragment::CTL : Fragment::CTLStar;
}

bool fragment_leq(Fragment a, Fragment b) {
  // (family, shape): family 0 plain, 1 frequency, 2 counting; shape 0 linear, 1 branching, 2 star
  auto fam = [](Fragment f) { return static_cast<int>(f) / 3; };
  auto shp = [](Fragment f) { return static_cast<int>(f) % 3; };
  if (fam(a) > fam(b)) return false;
  if (shp(a) == shp(b)) return true;
  if (shp(b) == 2) return true;  // linear and branching both sit inside the star fragment
  return false;
}

std::set<std::string> free_variables(const FormulaPtr& f) {
  return {f->free_vars.begin(), f->free_vars.end()};
}

std::set<std::string> variables(const FormulaPtr& f) {
  std::set<std::string> out;
  std::function<void(const FormulaPtr&)> go = [&](const FormulaPtr& g) {
    if (g->op == Op::Bind) out.insert(g->name);
    for (const auto& k : g->kids) go(k);
    for (const auto* side : {&g->lhs, &g->rhs})
      for (const auto& t : *side)
        if (t.arg) {
          out.insert(t.var);
          go(t.arg);
        }
  };
  go(f);
  return out;
}

namespace {

std::int64_t bits(std::int64_t v) {
  v = v < 0 ? -v : v;
  std::int64_t b = 1;
  while (v > 1) {
    v >>= 1;
    ++b;
  }
  return b;
}

}  // namespace

std::int64_t formula_size(const FormulaPtr& f) {
  std::int64_t n = 1;
  if (f->op == Op::FreqUntil) n += bits(f->ratio.num) + bits(f->ratio.den);
  for (const auto& k : f->kids) n += formula_size(k);
  for (const auto* side : {&f->lhs, &f->rhs})
    for (const auto& t : *side) {
      n += bits(t.coef);
      if (t.arg) n += 1 + formula_size(t.arg);
    }
  return n;
}

int until_depth(const FormulaPtr& f) {
  int d = 0;
  for (const auto& k : f->kids) d = std::max(d, until_depth(k));
  for (const auto* side : {&f->lhs, &f->rhs})
    for (const auto& t : *side)
      if (t.arg) d = std::max(d, until_depth(t.arg));
  if (f->op == Op::Until || f->op == Op::FreqUntil) ++d;
  return d;
}

std::int64_t max_denominator(const FormulaPtr& f) {
  std::int64_t d = f->op == Op::FreqUntil ? f->ratio.den : 1;
  for (const auto& k : f->kids) d = std::max(d, max_denominator(k));
  for (const auto* side : {&f->lhs, &f->rhs})
    for (const auto& t : *side)
      if (t.arg) d = std::max(d, max_denominator(t.arg));
  return d;
}

std::vector<FormulaPtr> subformulae(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  std::unordered_set<std::string> seen;
  std::function<void(const FormulaPtr&)> go = [&](const FormulaPtr& g) {
    if (seen.count(g->key)) return;
    for (const auto& k : g->kids) go(k);
    for (const auto* side : {&g->lhs, &g->rhs})
      for (const auto& t : *side)
        if (t.arg) go(t.arg);
    if (seen.insert(g->key).second) out.push_back(g);
  };
  go(f);
  return out;
}

FormulaPtr desugar_frequency_until(const FormulaPtr& f) {
  auto used = variables(f);
  long long next = 0;
  for (const auto& v : used) {
    if (v.size() < 2 || v[0] != 'x') continue;
    if (!std::all_of(v.begin() + 1, v.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    if (v.size() > 18) continue;
    next = std::max(next, std::stoll(v.substr(1)) + 1);
  }
  auto fresh = [&]() {
    std::string v;
    do v = "x" + std::to_string(next++);
    while (used.count(v));
    used.insert(v);
    return v;
  };
  std::function<FormulaPtr(const FormulaPtr&)> go = [&](const FormulaPtr& g) -> FormulaPtr {
    switch (g->op) {
      case Op::True:
      case Op::Atom:
        return g;
      case Op::And: return mk_and(go(g->kid(0)), go(g->kid(1)));
      case Op::Not: return mk_not(go(g->kid()));
      case Op::Next: return mk_next(go(g->kid()));
      case Op::Until: return mk_until(go(g->kid(0)), go(g->kid(1)));
      case Op::Exists: return mk_exists(go(g->kid()));
      case Op::Bind: return mk_bind(g->name, go(g->kid()));
      case Op::Compare: {
        auto l = g->lhs, r = g->rhs;
        for (auto* side : {&l, &r})
          for (auto& t : *side)
            if (t.arg) t.arg = go(t.arg);
        return mk_compare(l, r);
      }
      case Op::FreqUntil: {
        auto phi = go(g->kid(0));
        auto psi = go(g->kid(1));
        std::string x = fresh();
        std::vector<Term> lhs{{g->ratio.num, x, mk_true()}};
        std::vector<Term> rhs{{g->ratio.den, x, phi}};
        auto body = mk_and(mk_next(psi), mk_compare(lhs, rhs));
        return mk_or(psi, mk_bind(x, mk_finally(body)));
      }
    }
    return g;
  };
  return go(f);
}

}  // namespace fcl
