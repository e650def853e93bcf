#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fcl/model.hpp"

namespace fcl {

enum class Op { True, Atom, And, Not, Next, Until, FreqUntil, Exists, Bind, Compare };

struct Ratio {
  std::int64_t num = 1;  // x
  std::int64_t den = 1;  // y
  bool operator==(const Ratio& o) const { return num == o.num && den == o.den; }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// coef alone when arg is null, otherwise coef * #var(arg)
struct Term {
  std::int64_t coef = 0;
  std::string var;
  FormulaPtr arg;
};

struct Formula {
  Op op = Op::True;
  std::string name;  // proposition or bound variable
  std::vector<FormulaPtr> kids;
  Ratio ratio;
  std::vector<Term> lhs, rhs;  // lhs <= rhs
  std::string key;             // canonical structural key
  std::vector<std::string> free_vars;  // sorted
  bool closed = true;                  // free_vars is empty
  bool has_counting = false;
  bool has_exists = false;

  const FormulaPtr& kid(std::size_t i = 0) const { return kids[i]; }
};

bool same(const FormulaPtr& a, const FormulaPtr& b);

FormulaPtr mk_true();
FormulaPtr mk_false();
FormulaPtr mk_atom(const std::string& p);
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_not(FormulaPtr a);
FormulaPtr mk_next(FormulaPtr a);
FormulaPtr mk_until(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_freq_until(FormulaPtr a, Ratio r, FormulaPtr b);
FormulaPtr mk_exists(FormulaPtr a);
FormulaPtr mk_bind(const std::string& var, FormulaPtr a);
FormulaPtr mk_compare(std::vector<Term> lhs, std::vector<Term> rhs);

FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_finally(FormulaPtr a);
FormulaPtr mk_globally(FormulaPtr a);
FormulaPtr mk_forall(FormulaPtr a);

struct FormulaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParsedFormula {
  FormulaPtr formula;
  std::vector<std::string> warnings;
};

ParsedFormula parse_formula_full(const std::string& text);
FormulaPtr parse_formula(const std::string& text);

std::string to_string(const FormulaPtr& f);
std::string term_to_string(const std::vector<Term>& t);

enum class Fragment { LTL, CTL, CTLStar, FLTL, FCTL, FCTLStar, CLTL, CCTL, CCTLStar };

const char* fragment_name(Fragment f);
Fragment classify_fragment(const FormulaPtr& f);
// Inclusion order between fragments.
bool fragment_leq(Fragment a, Fragment b);
bool is_linear(const FormulaPtr& f);

FormulaPtr desugar_frequency_until(const FormulaPtr& f);

// Post-order, duplicates removed; counting-term arguments are included.
std::vector<FormulaPtr> subformulae(const FormulaPtr& f);

std::set<std::string> free_variables(const FormulaPtr& f);
std::set<std::string> variables(const FormulaPtr& f);
std::int64_t formula_size(const FormulaPtr& f);
int until_depth(const FormulaPtr& f);
std::int64_t max_denominator(const FormulaPtr& f);

// Strips a chain of negations, returning the count.
FormulaPtr strip_not(const FormulaPtr& f, int* count);

}  // namespace fcl
