#include <algorithm>
#include <cctype>
#include <sstream>

#include "fcl/ph.hpp"

namespace fcl {

PhTerm ph_const(std::int64_t a) {
  PhTerm t;
  t.constant = a;
  return t;
}

PhTerm ph_var(const std::string& x, std::int64_t coef) {
  PhTerm t;
  if (coef != 0) t.vars.push_back({coef, x});
  return t;
}

PhTerm operator+(PhTerm a, const PhTerm& b) {
  a.constant += b.constant;
  for (const auto& [c, x] : b.vars) {
    auto it = std::find_if(a.vars.begin(), a.vars.end(), [&](const auto& v) { return v.second == x; });
    if (it == a.vars.end())
      a.vars.push_back({c, x});
    else
      it->first += c;
  }
  return a;
}

namespace {

std::shared_ptr<PhNode> node(PhOp op) {
  auto n = std::make_shared<PhNode>();
  n->op = op;
  return n;
}

void check_term(const PhTerm& t) {
  if (t.constant < 0) throw PhError("negative constant in a PH term");
  for (const auto& [c, x] : t.vars)
    if (c < 0) throw PhError("negative coefficient for " + x);
}

}  // namespace

PhPtr ph_le(PhTerm a, PhTerm b) {
  check_term(a);
  check_term(b);
  auto n = node(PhOp::Le);
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

PhPtr ph_eq(const PhTerm& a, const PhTerm& b) { return ph_and(ph_le(a, b), ph_le(b, a)); }
PhPtr ph_true() { return ph_le(ph_const(0), ph_const(0)); }
PhPtr ph_false() { return ph_not(ph_true()); }

PhPtr ph_not(PhPtr a) {
  auto n = node(PhOp::Not);
  n->kids = {std::move(a)};
  return n;
}

PhPtr ph_and(PhPtr a, PhPtr b) {
  auto n = node(PhOp::And);
  n->kids = {std::move(a), std::move(b)};
  return n;
}

PhPtr ph_and(const std::vector<PhPtr>& parts) {
  if (parts.empty()) return ph_true();
  PhPtr out = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) out = ph_and(parts[i], out);
  return out;
}

PhPtr ph_or(PhPtr a, PhPtr b) { return ph_not(ph_and(ph_not(std::move(a)), ph_not(std::move(b)))); }

PhPtr ph_or(const std::vector<PhPtr>& parts) {
  if (parts.empty()) return ph_false();
  if (parts.size() == 1) return parts[0];
  std::vector<PhPtr> neg;
  for (const auto& p : parts) neg.push_back(ph_not(p));
  return ph_not(ph_and(neg));
}

PhPtr ph_implies(PhPtr a, PhPtr b) { return ph_not(ph_and(std::move(a), ph_not(std::move(b)))); }

PhPtr ph_exists(const std::string& x, PhPtr body) {
  auto n = node(PhOp::Exists);
  n->var = x;
  n->kids = {std::move(body)};
  return n;
}

PhPtr ph_forall(const std::string& x, PhPtr body) { return ph_not(ph_exists(x, ph_not(std::move(body)))); }

PhPtr ph_count(const std::string& x, const std::string& y, PhPtr body) {
  auto n = node(PhOp::Count);
  n->count = x;
  n->var = y;
  n->kids = {std::move(body)};
  return n;
}

PhPtr ph_pred(const std::string& name, std::vector<std::string> args) {
  auto n = node(PhOp::Pred);
  n->name = name;
  n->args = std::move(args);
  return n;
}

PhDom PhDom::range(std::int64_t lo, std::int64_t hi) {
  lo = std::max<std::int64_t>(lo, 0);
  if (hi < lo) return none();
  return {{{lo, hi}}};
}

std::int64_t PhDom::size() const {
  if (!bounded()) return kPhInf;
  std::int64_t s = 0;
  for (const auto& [a, b] : iv) s += b - a + 1;
  return s;
}

PhDom PhDom::meet(const PhDom& o) const {
  PhDom out;
  std::size_t i = 0, j = 0;
  while (i < iv.size() && j < o.iv.size()) {
    std::int64_t lo = std::max(iv[i].first, o.iv[j].first), hi = std::min(iv[i].second, o.iv[j].second);
    if (lo <= hi) out.iv.push_back({lo, hi});
    if (iv[i].second < o.iv[j].second)
      ++i;
    else
      ++j;
  }
  return out;
}

PhDom PhDom::complement() const {
  PhDom out;
  std::int64_t next = 0;
  for (const auto& [a, b] : iv) {
    if (a > next) out.iv.push_back({next, a - 1});
    if (b == kPhInf) return out;
    next = b + 1;
  }
  out.iv.push_back({next, kPhInf});
  return out;
}

PhDom PhDom::join(const PhDom& o) const { return complement().meet(o.complement()).complement(); }

namespace {

void free_into(const PhPtr& f, std::set<std::string>& bound, std::set<std::string>& out) {
  auto use = [&](const std::string& x) {
    if (!bound.count(x)) out.insert(x);
  };
  auto bind = [&](const std::string& x, const PhPtr& body) {
    bool had = bound.count(x) > 0;
    bound.insert(x);
    free_into(body, bound, out);
    if (!had) bound.erase(x);
  };
  switch (f->op) {
    case PhOp::Le:
      for (const auto& t : {&f->lhs, &f->rhs})
        for (const auto& v : t->vars) use(v.second);
      break;
    case PhOp::Not:
    case PhOp::And:
      for (const auto& k : f->kids) free_into(k, bound, out);
      break;
    case PhOp::Exists:
      bind(f->var, f->kids[0]);
      break;
    case PhOp::Count:
      use(f->count);
      bind(f->var, f->kids[0]);
      break;
    case PhOp::Pred:
      for (const auto& a : f->args) use(a);
      break;
  }
}

PhTerm rename_term(const PhTerm& t, const std::map<std::string, std::string>& m) {
  PhTerm out;
  out.constant = t.constant;
  for (const auto& [c, x] : t.vars) {
    auto it = m.find(x);
    out.vars.push_back({c, it == m.end() ? x : it->second});
  }
  return out;
}

struct Expander {
  const PhDefinitions& defs;
  bool keep_native = false;
  int fresh = 0;
  int depth = 0;

  std::string rename(const std::string& x, std::map<std::string, std::string>& m) {
    std::string y = x + "_" + std::to_string(++fresh);
    m[x] = y;
    return y;
  }

  // m maps free names to their replacements; only definition bodies rename binders
  PhPtr run(const PhPtr& f, std::map<std::string, std::string> m, bool in_def) {
    auto get = [&](const std::string& x) {
      auto it = m.find(x);
      return it == m.end() ? x : it->second;
    };
    switch (f->op) {
      case PhOp::Le:
        return ph_le(rename_term(f->lhs, m), rename_term(f->rhs, m));
      case PhOp::Not:
        return ph_not(run(f->kids[0], m, in_def));
      case PhOp::And:
        return ph_and(run(f->kids[0], m, in_def), run(f->kids[1], m, in_def));
      case PhOp::Exists: {
        std::string y = f->var;
        if (in_def)
          y = rename(f->var, m);
        else
          m.erase(f->var);
        return ph_exists(y, run(f->kids[0], m, in_def));
      }
      case PhOp::Count: {
        std::string c = get(f->count);
        std::string y = f->var;
        if (in_def)
          y = rename(f->var, m);
        else
          m.erase(f->var);
        return ph_count(c, y, run(f->kids[0], m, in_def));
      }
      case PhOp::Pred: {
        auto it = defs.find(f->name);
        if (it == defs.end()) throw PhError("undefined predicate " + f->name);
        const PhDef& d = it->second;
        if (d.params.size() != f->args.size())
          throw PhError("predicate " + f->name + " expects " + std::to_string(d.params.size()) + " arguments");
        if (keep_native && d.native) {
          std::vector<std::string> args;
          for (const auto& a : f->args) args.push_back(get(a));
          return ph_pred(f->name, args);
        }
        if (++depth > 64) throw PhError("recursive predicate definition " + f->name);
        std::map<std::string, std::string> inner;
        for (std::size_t i = 0; i < d.params.size(); ++i) inner[d.params[i]] = get(f->args[i]);
        PhPtr out = run(d.body, inner, true);
        --depth;
        return out;
      }
    }
    return f;
  }
};

}  // namespace

std::set<std::string> ph_free_vars(const PhPtr& f) {
  std::set<std::string> bound, out;
  free_into(f, bound, out);
  return out;
}

std::int64_t ph_size(const PhPtr& f) {
  std::int64_t s = 1;
  for (const auto& k : f->kids) s += ph_size(k);
  return s;
}

int ph_quantifier_depth(const PhPtr& f) {
  int d = 0;
  for (const auto& k : f->kids) d = std::max(d, ph_quantifier_depth(k));
  return d + (f->op == PhOp::Exists || f->op == PhOp::Count ? 1 : 0);
}

int ph_count_quantifiers(const PhPtr& f) {
  int n = f->op == PhOp::Count ? 1 : 0;
  for (const auto& k : f->kids) n += ph_count_quantifiers(k);
  return n;
}

PhPtr ph_expand(const PhPtr& f, const PhDefinitions& defs, bool keep_native) {
  Expander e{defs, keep_native};
  return e.run(f, {}, false);
}

// ---------- printing ----------

namespace {

std::string term_text(const PhTerm& t) {
  std::string s;
  for (const auto& [c, x] : t.vars) {
    if (!s.empty()) s += " + ";
    s += c == 1 ? x : std::to_string(c) + "*" + x;
  }
  if (t.constant != 0 || s.empty()) {
    if (!s.empty()) s += " + ";
    s += std::to_string(t.constant);
  }
  return s;
}

bool same_term(const PhTerm& a, const PhTerm& b) {
  if (a.constant != b.constant || a.vars.size() != b.vars.size()) return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i)
    if (a.vars[i] != b.vars[i]) return false;
  return true;
}

bool is_eq(const PhPtr& f) {
  if (f->op != PhOp::And) return false;
  const auto& a = f->kids[0];
  const auto& b = f->kids[1];
  return a->op == PhOp::Le && b->op == PhOp::Le && same_term(a->lhs, b->rhs) && same_term(a->rhs, b->lhs);
}

// prec 0: anything, 1: operand of "and", 2: operand of "not"
void print(const PhPtr& f, int prec, std::ostream& os) {
  if (is_eq(f)) {
    if (prec >= 2) os << "(";
    os << term_text(f->kids[0]->lhs) << " = " << term_text(f->kids[0]->rhs);
    if (prec >= 2) os << ")";
    return;
  }
  switch (f->op) {
    case PhOp::Le:
      if (prec >= 2) os << "(";
      os << term_text(f->lhs) << " <= " << term_text(f->rhs);
      if (prec >= 2) os << ")";
      break;
    case PhOp::Not:
      os << "not ";
      print(f->kids[0], 2, os);
      break;
    case PhOp::And:
      if (prec >= 2) os << "(";
      print(f->kids[0], 1, os);
      os << " and ";
      print(f->kids[1], 1, os);
      if (prec >= 2) os << ")";
      break;
    case PhOp::Exists:
    case PhOp::Count:
      if (prec >= 1) os << "(";
      if (f->op == PhOp::Exists)
        os << "exists " << f->var << ". ";
      else
        os << "count " << f->count << " of " << f->var << ". ";
      print(f->kids[0], 0, os);
      if (prec >= 1) os << ")";
      break;
    case PhOp::Pred:
      os << f->name << "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) os << (i ? ", " : "") << f->args[i];
      os << ")";
      break;
  }
}

}  // namespace

std::string ph_to_string(const PhPtr& f) {
  std::ostringstream os;
  print(f, 0, os);
  return os.str();
}

std::string ph_to_text(const PhPtr& f, const PhDefinitions& defs) {
  std::ostringstream os;
  for (const auto& [name, d] : defs) {
    os << "define " << name << "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) os << (i ? ", " : "") << d.params[i];
    os << ") :=\n  " << ph_to_string(d.body) << ";\n";
  }
  os << ph_to_string(f) << "\n";
  return os.str();
}

// ---------- parsing ----------

namespace {

struct Parser {
  std::string s;
  std::size_t p = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw PhError("PH syntax error at offset " + std::to_string(p) + ": " + msg);
  }

  void ws() {
    while (p < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[p]))) {
        ++p;
      } else if (s[p] == '#') {
        while (p < s.size() && s[p] != '\n') ++p;
      } else {
        break;
      }
    }
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

  bool peek(const std::string& t) {
    ws();
    if (s.compare(p, t.size(), t) != 0) return false;
    if (std::isalpha(static_cast<unsigned char>(t[0])) && p + t.size() < s.size() && ident_char(s[p + t.size()]))
      return false;
    return true;
  }

  bool eat(const std::string& t) {
    if (!peek(t)) return false;
    p += t.size();
    return true;
  }

  void expect(const std::string& t) {
    if (!eat(t)) fail("expected '" + t + "'");
  }

  static bool keyword(const std::string& w) {
    return w == "exists" || w == "count" || w == "of" || w == "and" || w == "or" || w == "not" || w == "define" ||
           w == "true" || w == "false";
  }

  std::string ident() {
    ws();
    if (p >= s.size() || !(std::isalpha(static_cast<unsigned char>(s[p])) || s[p] == '_')) fail("expected a variable");
    std::size_t q = p;
    while (p < s.size() && ident_char(s[p])) ++p;
    std::string w = s.substr(q, p - q);
    if (keyword(w)) {
      p = q;
      fail("unexpected keyword '" + w + "'");
    }
    return w;
  }

  bool at_number() {
    ws();
    return p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]));
  }

  std::int64_t number() {
    ws();
    std::size_t q = p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (q == p) fail("expected a natural number");
    if (p - q > 15) fail("number too large");
    return std::stoll(s.substr(q, p - q));
  }

  PhTerm product() {
    if (at_number()) {
      std::int64_t c = number();
      if (eat("*")) return ph_var(ident(), c);
      return ph_const(c);
    }
    return ph_var(ident());
  }

  PhTerm term() {
    PhTerm t = product();
    while (eat("+")) t = t + product();
    return t;
  }

  PhPtr formula() {
    PhPtr f = conj();
    while (eat("or")) f = ph_or(f, conj());
    return f;
  }

  PhPtr conj() {
    PhPtr f = unary();
    while (eat("and")) f = ph_and(f, unary());
    return f;
  }

  PhPtr unary() {
    if (eat("not")) return ph_not(unary());
    if (eat("true")) return ph_true();
    if (eat("false")) return ph_false();
    if (eat("exists")) {
      std::string x = ident();
      expect(".");
      return ph_exists(x, formula());
    }
    if (eat("count")) {
      std::string x = ident();
      expect("of");
      std::string y = ident();
      expect(".");
      return ph_count(x, y, formula());
    }
    if (eat("(")) {
      PhPtr f = formula();
      expect(")");
      return f;
    }
    // predicate call or comparison
    std::size_t save = p;
    if (!at_number()) {
      std::string name = ident();
      if (eat("(")) {
        std::vector<std::string> args;
        if (!eat(")")) {
          do args.push_back(ident());
          while (eat(","));
          expect(")");
        }
        return ph_pred(name, args);
      }
      p = save;
    }
    PhTerm a = term();
    if (eat("<=")) return ph_le(a, term());
    if (eat("=")) return ph_eq(a, term());
    if (eat("<")) return ph_le(a + ph_const(1), term());
    fail("expected '<=', '=' or '<'");
  }
};

}  // namespace

ParsedPh parse_ph(const std::string& text) {
  Parser ps{text};
  ParsedPh out;
  while (ps.eat("define")) {
    std::string name = ps.ident();
    PhDef d;
    ps.expect("(");
    if (!ps.eat(")")) {
      do d.params.push_back(ps.ident());
      while (ps.eat(","));
      ps.expect(")");
    }
    ps.expect(":=");
    d.body = ps.formula();
    ps.expect(";");
    auto fv = ph_free_vars(d.body);
    for (const auto& x : fv)
      if (std::find(d.params.begin(), d.params.end(), x) == d.params.end())
        throw PhError("definition of " + name + " uses undeclared variable " + x);
    if (!out.defs.emplace(name, d).second) throw PhError("predicate " + name + " defined twice");
  }
  out.formula = ps.formula();
  ps.eat(";");
  ps.ws();
  if (ps.p != ps.s.size()) ps.fail("trailing input");
  return out;
}

PhPtr parse_ph_formula(const std::string& text) {
  auto parsed = parse_ph(text);
  if (!parsed.defs.empty()) return ph_expand(parsed.formula, parsed.defs);
  return parsed.formula;
}

}  // namespace fcl
