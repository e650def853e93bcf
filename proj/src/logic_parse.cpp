#include <cctype>

#include "fcl/logic.hpp"

namespace fcl {

namespace {

enum class T { Ident, Int, Sym, End };

struct Token {
  T kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({T::Ident, s.substr(i, j - i), i});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({T::Int, s.substr(i, j - i), i});
      i = j;
      continue;
    }
    static const char* two[] = {"->", "<=", ">=", "&&", "||"};
    bool matched = false;
    for (const char* t : two)
      if (s.compare(i, 2, t) == 0) {
        std::string txt = t;
        if (txt == "&&") txt = "&";
        if (txt == "||") txt = "|";
        out.push_back({T::Sym, txt, i});
        i += 2;
        matched = true;
        break;
      }
    if (matched) continue;
    if (std::string("()!&|.#*+-<>={}/").find(c) != std::string::npos) {
      out.push_back({T::Sym, std::string(1, c), i});
      ++i;
      continue;
    }
    throw FormulaError("unexpected character '" + std::string(1, c) + "' at offset " +
                       std::to_string(i));
  }
  out.push_back({T::End, "", s.size()});
  return out;
}

bool is_keyword(const std::string& w) {
  return w == "X" || w == "U" || w == "F" || w == "G" || w == "E" || w == "A" || w == "true" ||
         w == "false";
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  FormulaPtr parse_all() {
    auto f = implies();
    if (peek().kind != T::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

  std::vector<std::string> warnings;

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  bool sym(const char* s) const { return peek().kind == T::Sym && peek().text == s; }
  bool ident(const char* s) const { return peek().kind == T::Ident && peek().text == s; }
  Token take() { return toks_[i_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw FormulaError("syntax error at offset " + std::to_string(peek().pos) + ": " + msg);
  }
  void expect(const char* s) {
    if (!sym(s)) fail(std::string("expected '") + s + "'");
    ++i_;
  }

  FormulaPtr implies() {
    auto a = disj();
    if (sym("->")) {
      ++i_;
      return mk_implies(a, implies());
    }
    return a;
  }
  FormulaPtr disj() {
    auto a = conj();
    while (sym("|")) {
      ++i_;
      a = mk_or(a, conj());
    }
    return a;
  }
  FormulaPtr conj() {
    auto a = until();
    while (sym("&")) {
      ++i_;
      a = mk_and(a, until());
    }
    return a;
  }
  FormulaPtr until() {
    auto a = unary();
    if (ident("U")) {
      ++i_;
      if (sym("{")) {
        ++i_;
        Ratio r;
        r.num = integer();
        expect("/");
        r.den = integer();
        expect("}");
        return mk_freq_until(a, r, until());
      }
      return mk_until(a, until());
    }
    return a;
  }
  std::int64_t integer() {
    if (peek().kind != T::Int) fail("expected integer");
    try {
      return std::stoll(take().text);
    } catch (const std::out_of_range&) {
      fail("integer out of range");
    }
  }
  FormulaPtr unary() {
    if (sym("!")) {
      ++i_;
      return mk_not(unary());
    }
    if (peek().kind == T::Ident) {
      const std::string& w = peek().text;
      if (w == "X") return ++i_, mk_next(unary());
      if (w == "F") return ++i_, mk_finally(unary());
      if (w == "G") return ++i_, mk_globally(unary());
      if (w == "E") return ++i_, mk_exists(unary());
      if (w == "A") return ++i_, mk_forall(unary());
      if (!is_keyword(w) && peek(1).kind == T::Sym && peek(1).text == ".") {
        std::string v = take().text;
        ++i_;
        bound_.push_back(v);
        auto body = unary();
        bound_.pop_back();
        return mk_bind(v, body);
      }
    }
    return primary();
  }
  FormulaPtr primary() {
    if (ident("true")) return ++i_, mk_true();
    if (ident("false")) return ++i_, mk_false();
    if (sym("(")) {
      ++i_;
      auto f = implies();
      expect(")");
      return f;
    }
    if (peek().kind == T::Int || sym("#") || sym("-")) return comparison();
    if (peek().kind == T::Ident) {
      if (is_keyword(peek().text)) fail("unexpected keyword '" + peek().text + "'");
      return mk_atom(take().text);
    }
    fail(peek().kind == T::End ? "unexpected end of input" : "unexpected '" + peek().text + "'");
  }
  FormulaPtr comparison() {
    auto l = sum();
    std::string op = peek().text;
    if (peek().kind != T::Sym || (op != "<=" && op != "<" && op != ">=" && op != ">" && op != "="))
      fail("expected comparison operator");
    ++i_;
    auto r = sum();
    if (op == "<=") return mk_compare(l, r);
    if (op == ">=") return mk_compare(r, l);
    if (op == "<") return mk_not(mk_compare(r, l));
    if (op == ">") return mk_not(mk_compare(l, r));
    return mk_and(mk_compare(l, r), mk_compare(r, l));
  }
  std::vector<Term> sum() {
    std::vector<Term> out{term(false)};
    while (sym("+") || sym("-")) {
      bool neg = take().text == "-";
      out.push_back(term(neg));
    }
    return out;
  }
  Term term(bool negate) {
    bool neg = negate;
    if (sym("-")) {
      ++i_;
      neg = !neg;
    }
    Term t;
    if (peek().kind == T::Int) {
      t.coef = integer();
      if (sym("*")) {
        ++i_;
        count(t);
      } else if (sym("#")) {
        count(t);
      }
    } else if (sym("#")) {
      t.coef = 1;
      count(t);
    } else {
      fail("expected term");
    }
    if (neg) t.coef = -t.coef;
    return t;
  }
  void count(Term& t) {
    expect("#");
    if (peek().kind != T::Ident || is_keyword(peek().text)) fail("expected counting variable");
    t.var = take().text;
    bool ok = false;
    for (const auto& b : bound_) ok = ok || b == t.var;
    if (!ok) warnings.push_back("#" + t.var + " occurs outside any binder of " + t.var);
    expect("(");
    t.arg = implies();
    expect(")");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::vector<std::string> bound_;
};

}  // namespace

ParsedFormula parse_formula_full(const std::string& text) {
  Parser p(text);
  ParsedFormula out;
  out.formula = p.parse_all();
  out.warnings = p.warnings;
  return out;
}

FormulaPtr parse_formula(const std::string& text) { return parse_formula_full(text).formula; }

}  // namespace fcl
