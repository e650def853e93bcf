#include "fcl/logic.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_set>

namespace fcl {

namespace {

void merge_vars(std::vector<std::string>& into, const std::vector<std::string>& from) {
  std::vector<std::string> out;
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into = std::move(out);
}

std::string terms_key(const std::vector<Term>& ts) {
  std::string k;
  for (const auto& t : ts) {
    k += std::to_string(t.coef);
    if (t.arg) k += "*#" + t.var + "(" + t.arg->key + ")";
    k += ';';
  }
  return k;
}

std::shared_ptr<Formula> node(Op op, std::vector<FormulaPtr> kids) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->kids = std::move(kids);
  for (const auto& k : f->kids) {
    merge_vars(f->free_vars, k->free_vars);
    f->has_counting = f->has_counting || k->has_counting;
    f->has_exists = f->has_exists || k->has_exists;
  }
  return f;
}

FormulaPtr finish(std::shared_ptr<Formula> f) {
  f->closed = f->free_vars.empty();
  return f;
}

}  // namespace

bool same(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->key == b->key;
}

FormulaPtr mk_true() {
  static FormulaPtr t = [] {
    auto f = node(Op::True, {});
    f->key = "T";
    return finish(f);
  }();
  return t;
}

FormulaPtr mk_false() { return mk_not(mk_true()); }

FormulaPtr mk_atom(const std::string& p) {
  auto f = node(Op::Atom, {});
  f->name = p;
  f->key = "p:" + p;
  return finish(f);
}

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) {
  auto f = node(Op::And, {a, b});
  f->key = "&(" + a->key + "," + b->key + ")";
  return finish(f);
}

FormulaPtr mk_not(FormulaPtr a) {
  auto f = node(Op::Not, {a});
  f->key = "!(" + a->key + ")";
  return finish(f);
}

FormulaPtr mk_next(FormulaPtr a) {
  auto f = node(Op::Next, {a});
  f->key = "X(" + a->key + ")";
  return finish(f);
}

FormulaPtr mk_until(FormulaPtr a, FormulaPtr b) {
  auto f = node(Op::Until, {a, b});
  f->key = "U(" + a->key + "," + b->key + ")";
  return finish(f);
}

FormulaPtr mk_freq_until(FormulaPtr a, Ratio r, FormulaPtr b) {
  if (r.den <= 0 || r.num < 0 || r.num > r.den)
    throw FormulaError("ratio " + std::to_string(r.num) + "/" + std::to_string(r.den) +
                       " violates n <= m > 0");
  auto f = node(Op::FreqUntil, {a, b});
  f->ratio = r;
  f->key = "U[" + std::to_string(r.num) + "/" + std::to_string(r.den) + "](" + a->key + "," +
           b->key + ")";
  return finish(f);
}

FormulaPtr mk_exists(FormulaPtr a) {
  auto f = node(Op::Exists, {a});
  f->has_exists = true;
  f->key = "E(" + a->key + ")";
  return finish(f);
}

FormulaPtr mk_bind(const std::string& var, FormulaPtr a) {
  auto f = node(Op::Bind, {a});
  f->name = var;
  f->has_counting = true;
  f->free_vars.erase(std::remove(f->free_vars.begin(), f->free_vars.end(), var), f->free_vars.end());
  f->key = "B[" + var + "](" + a->key + ")";
  return finish(f);
}

FormulaPtr mk_compare(std::vector<Term> lhs, std::vector<Term> rhs) {
  auto f = node(Op::Compare, {});
  f->has_counting = true;
  for (const auto* side : {&lhs, &rhs})
    for (const auto& t : *side) {
      if (!t.arg) continue;
      merge_vars(f->free_vars, {t.var});
      merge_vars(f->free_vars, t.arg->free_vars);
      f->has_exists = f->has_exists || t.arg->has_exists;
    }
  f->key = "C[" + terms_key(lhs) + "<=" + terms_key(rhs) + "]";
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return finish(f);
}

FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) { return mk_not(mk_and(mk_not(a), mk_not(b))); }
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) { return mk_not(mk_and(a, mk_not(b))); }
FormulaPtr mk_finally(FormulaPtr a) { return mk_until(mk_true(), a); }
FormulaPtr mk_globally(FormulaPtr a) { return mk_not(mk_finally(mk_not(a))); }
FormulaPtr mk_forall(FormulaPtr a) { return mk_not(mk_exists(mk_not(a))); }

FormulaPtr strip_not(const FormulaPtr& f, int* count) {
  FormulaPtr g = f;
  int n = 0;
  while (g->op == Op::Not) {
    g = g->kid();
    ++n;
  }
  if (count) *count = n;
  return g;
}

// ---------------------------------------------------------------- printing

namespace {

std::string print(const FormulaPtr& f, int ctx);

std::string wrap(const std::string& s, int prec, int ctx) { return prec < ctx ? "(" + s + ")" : s; }

std::string print_term(const Term& t) {
  if (!t.arg) return std::to_string(t.coef);
  std::string cnt = "#" + t.var + "(" + print(t.arg, 0) + ")";
  if (t.coef == 1) return cnt;
  return std::to_string(t.coef) + "*" + cnt;
}

// Binary sugar patterns, checked in this order.
bool match_or(const FormulaPtr& f, FormulaPtr* a, FormulaPtr* b) {
  if (f->op != Op::Not || f->kid()->op != Op::And) return false;
  const auto& c = f->kid();
  if (c->kid(0)->op != Op::Not || c->kid(1)->op != Op::Not) return false;
  *a = c->kid(0)->kid();
  *b = c->kid(1)->kid();
  return true;
}

bool match_implies(const FormulaPtr& f, FormulaPtr* a, FormulaPtr* b) {
  if (f->op != Op::Not || f->kid()->op != Op::And) return false;
  const auto& c = f->kid();
  if (c->kid(1)->op != Op::Not) return false;
  *a = c->kid(0);
  *b = c->kid(1)->kid();
  return true;
}

std::string print(const FormulaPtr& f, int ctx) {
  FormulaPtr a, b;
  switch (f->op) {
    case Op::True:
      return "true";
    case Op::Atom:
      return f->name;
    case Op::Compare:
      return term_to_string(f->lhs) + " <= " + term_to_string(f->rhs);
    case Op::And:
      return wrap(print(f->kid(0), 2) + " & " + print(f->kid(1), 3), 2, ctx);
    case Op::Until:
      if (f->kid(0)->op == Op::True) return wrap("F " + print(f->kid(1), 4), 4, ctx);
      return wrap(print(f->kid(0), 4) + " U " + print(f->kid(1), 3), 3, ctx);
    case Op::FreqUntil:
      return wrap(print(f->kid(0), 4) + " U{" + std::to_string(f->ratio.num) + "/" +
                      std::to_string(f->ratio.den) + "} " + print(f->kid(1), 3),
                  3, ctx);
    case Op::Next:
      return wrap("X " + print(f->kid(), 4), 4, ctx);
    case Op::Exists:
      return wrap("E " + print(f->kid(), 4), 4, ctx);
    case Op::Bind:
      return wrap(f->name + ". " + print(f->kid(), 4), 4, ctx);
    case Op::Not: {
      const auto& g = f->kid();
      if (g->op == Op::True) return "false";
      if (g->op == Op::Compare) return term_to_string(g->rhs) + " < " + term_to_string(g->lhs);
      if (g->op == Op::Exists && g->kid()->op == Op::Not)
        return wrap("A " + print(g->kid()->kid(), 4), 4, ctx);
      if (g->op == Op::Until && g->kid(0)->op == Op::True && g->kid(1)->op == Op::Not)
        return wrap("G " + print(g->kid(1)->kid(), 4), 4, ctx);
      if (match_or(f, &a, &b)) return wrap(print(a, 1) + " | " + print(b, 2), 1, ctx);
      if (match_implies(f, &a, &b)) return wrap(print(a, 1) + " -> " + print(b, 0), 0, ctx);
      return wrap("!" + print(g, 4), 4, ctx);
    }
  }
  return "?";
}

}  // namespace

std::string term_to_string(const std::vector<Term>& ts) {
  if (ts.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += " + ";
    out += print_term(ts[i]);
  }
  return out;
}

std::string to_string(const FormulaPtr& f) { return print(f, 0); }

}  // namespace fcl
