#include <random>

#include "doctest.h"
#include "fcl/logic.hpp"
#include "gen.hpp"

using namespace fcl;

TEST_CASE("parse example formulas") {
  auto phi1 = parse_formula("z. A G (q -> (#z(p) <= #z(E X r)))");
  REQUIRE(phi1->op == Op::Bind);
  CHECK(phi1->name == "z");
  CHECK(phi1->closed);
  CHECK(classify_fragment(phi1) == Fragment::CCTL);

  auto p1 = parse_formula("A ((E X r) U{1/2} q)");
  CHECK(classify_fragment(p1) == Fragment::FCTL);
  int nots = 0;
  auto e = strip_not(p1, &nots);
  CHECK(nots == 1);
  CHECK(e->op == Op::Exists);

  auto phi2 = parse_formula("z. A G (!q -> E F #z(p) < #z(r))");
  CHECK(classify_fragment(phi2) == Fragment::CCTL);

  CHECK_THROWS_AS(parse_formula("p U{2/1} q"), FormulaError);
  CHECK_THROWS_AS(parse_formula("p U{1/0} q"), FormulaError);
  CHECK_THROWS_AS(parse_formula("p &"), FormulaError);
  CHECK_THROWS_AS(parse_formula("(p"), FormulaError);
  auto w = parse_formula_full("#y(p) <= 1");
  CHECK(w.warnings.size() == 1);
}

TEST_CASE("precedence") {
  CHECK(same(parse_formula("a | b & c"), mk_or(mk_atom("a"), mk_and(mk_atom("b"), mk_atom("c")))));
  CHECK(same(parse_formula("a -> b -> c"),
             mk_implies(mk_atom("a"), mk_implies(mk_atom("b"), mk_atom("c")))));
  CHECK(same(parse_formula("a U b U c"), mk_until(mk_atom("a"), mk_until(mk_atom("b"), mk_atom("c")))));
  CHECK(same(parse_formula("a U b & c"), mk_and(mk_until(mk_atom("a"), mk_atom("b")), mk_atom("c"))));
  CHECK(same(parse_formula("X a U b"), mk_until(mk_next(mk_atom("a")), mk_atom("b"))));
  CHECK(same(parse_formula("!a & b"), mk_and(mk_not(mk_atom("a")), mk_atom("b"))));
  CHECK(same(parse_formula("F p"), mk_until(mk_true(), mk_atom("p"))));
  CHECK(same(parse_formula("A p"), mk_not(mk_exists(mk_not(mk_atom("p"))))));
}

TEST_CASE("fragments") {
  CHECK(classify_fragment(parse_formula("p U{1/3} q")) == Fragment::FLTL);
  CHECK(classify_fragment(parse_formula("p & q")) == Fragment::LTL);
  CHECK(classify_fragment(parse_formula("E p")) == Fragment::CTL);
  CHECK(classify_fragment(parse_formula("A G E F p")) == Fragment::CTL);
  CHECK(classify_fragment(parse_formula("E (F p & G q)")) == Fragment::CTLStar);
  CHECK(classify_fragment(parse_formula("E (p U{1/2} q)")) == Fragment::FCTL);
  CHECK(classify_fragment(parse_formula("E (X p U{1/2} q)")) == Fragment::FCTLStar);
  CHECK(classify_fragment(parse_formula("x. F #x(p) >= 2")) == Fragment::CLTL);
  CHECK(classify_fragment(parse_formula("x. E F (#x(p) >= 2 & X q)")) == Fragment::CCTLStar);
  CHECK(fragment_leq(Fragment::LTL, Fragment::FCTLStar));
  CHECK_FALSE(fragment_leq(Fragment::CTL, Fragment::FLTL));
  CHECK(fragment_leq(Fragment::FCTL, Fragment::CCTL));
}

TEST_CASE("wrapping linear formulas in E stays within fCTL*") {
  std::mt19937 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto f = gen::random_fltl(rng, 3);
    auto c = classify_fragment(mk_exists(f));
    CHECK(fragment_leq(c, Fragment::FCTLStar));
  }
}

TEST_CASE("desugaring") {
  auto d = desugar_frequency_until(parse_formula("p U{1/3} q"));
  auto expect = parse_formula("q | x0. F ((X q) & 3*#x0(p) >= 1*#x0(true))");
  CHECK(same(d, expect));
  auto plain = parse_formula("p U q & X r");
  CHECK(same(desugar_frequency_until(plain), plain));

  auto nested = desugar_frequency_until(parse_formula("p U{1/2} (p U{1/2} q)"));
  auto vars = variables(nested);
  CHECK(vars == std::set<std::string>{"x0", "x1"});
  CHECK(classify_fragment(nested) == Fragment::CLTL);

  auto avoid = desugar_frequency_until(parse_formula("x3. (p U{1/2} q) & #x3(p) <= 4"));
  CHECK(variables(avoid).count("x4"));
}

TEST_CASE("subformulae order") {
  auto s = subformulae(parse_formula("p & q"));
  REQUIRE(s.size() == 3);
  CHECK(s[2]->op == Op::And);
  auto e = subformulae(parse_formula("E X r"));
  REQUIRE(e.size() == 3);
  CHECK(to_string(e[0]) == "r");
  CHECK(to_string(e[1]) == "X r");
  auto p1 = parse_formula("A ((E X r) U{1/2} q)");
  auto sub = subformulae(p1);
  std::set<std::string> shown;
  for (const auto& g : sub) shown.insert(to_string(g));
  for (const char* t : {"r", "X r", "E X r", "q", "E X r U{1/2} q", "A (E X r U{1/2} q)"})
    CHECK(shown.count(t));
  for (std::size_t i = 0; i < sub.size(); ++i)
    for (const auto& k : sub[i]->kids) {
      bool before = false;
      for (std::size_t j = 0; j < i; ++j) before = before || same(sub[j], k);
      CHECK(before);
    }
}

TEST_CASE("print and parse round trip") {
  std::mt19937 rng(1);
  for (int i = 0; i < 1500; ++i) {
    auto f = gen::random_cctl_star(rng, 4);
    auto text = to_string(f);
    FormulaPtr g;
    REQUIRE_NOTHROW(g = parse_formula(text));
    CHECK_MESSAGE(same(f, g), text);
  }
  for (const char* t : {"false", "true", "A G p", "E F q", "a -> b", "a | b", "#x(p) < 3",
                        "x. (#x(p) + -2*#x(q) <= -1)"}) {
    auto f = parse_formula(t);
    CHECK(same(parse_formula(to_string(f)), f));
  }
}

TEST_CASE("size and depth") {
  auto f = parse_formula("p U{1/3} (q U r)");
  CHECK(until_depth(f) == 2);
  CHECK(max_denominator(f) == 3);
  CHECK(formula_size(f) > 5);
}
