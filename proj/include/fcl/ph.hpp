#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fcl/logic.hpp"
#include "fcl/model.hpp"
#include "fcl/oracle.hpp"

namespace fcl {

struct PhError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// a + sum of coef * var, all naturals
struct PhTerm {
  std::int64_t constant = 0;
  std::vector<std::pair<std::int64_t, std::string>> vars;
};

PhTerm ph_const(std::int64_t a);
PhTerm ph_var(const std::string& x, std::int64_t coef = 1);
PhTerm operator+(PhTerm a, const PhTerm& b);

enum class PhOp { Le, Not, And, Exists, Count, Pred };

struct PhNode;
using PhPtr = std::shared_ptr<const PhNode>;

struct PhNode {
  PhOp op = PhOp::Le;
  PhTerm lhs, rhs;                // Le
  std::string var;                // Exists: bound variable; Count: counted variable y
  std::string count;              // Count: x in "count x of y"
  std::string name;               // Pred
  std::vector<std::string> args;  // Pred
  std::vector<PhPtr> kids;
};

PhPtr ph_le(PhTerm a, PhTerm b);
PhPtr ph_eq(const PhTerm& a, const PhTerm& b);
PhPtr ph_true();
PhPtr ph_false();
PhPtr ph_not(PhPtr a);
PhPtr ph_and(PhPtr a, PhPtr b);
PhPtr ph_and(const std::vector<PhPtr>& parts);
PhPtr ph_or(PhPtr a, PhPtr b);
PhPtr ph_or(const std::vector<PhPtr>& parts);
PhPtr ph_implies(PhPtr a, PhPtr b);
PhPtr ph_exists(const std::string& x, PhPtr body);
PhPtr ph_forall(const std::string& x, PhPtr body);
PhPtr ph_count(const std::string& x, const std::string& y, PhPtr body);
PhPtr ph_pred(const std::string& name, std::vector<std::string> args);

// Sorted intervals over the naturals; hi == kPhInf means unbounded.
inline constexpr std::int64_t kPhInf = INT64_MAX;
struct PhDom {
  std::vector<std::pair<std::int64_t, std::int64_t>> iv;
  static PhDom all() { return {{{0, kPhInf}}}; }
  static PhDom none() { return {}; }
  static PhDom point(std::int64_t v) { return {{{v, v}}}; }
  static PhDom range(std::int64_t lo, std::int64_t hi);
  bool empty() const { return iv.empty(); }
  bool bounded() const { return iv.empty() || iv.back().second != kPhInf; }
  std::int64_t size() const;  // kPhInf when unbounded
  PhDom meet(const PhDom& o) const;
  PhDom join(const PhDom& o) const;
  PhDom complement() const;
  bool operator==(const PhDom& o) const { return iv == o.iv; }
};

// Native implementation of a defined predicate. deps receives the indices of the arguments read.
struct PhNative {
  std::function<bool(const std::int64_t* args, std::vector<int>* deps)> holds;
  // Values of argument k that can make the predicate true, given the arguments flagged in known.
  std::function<PhDom(const std::int64_t* args, const char* known, int k, std::vector<int>* deps)> candidates;
};

struct PhDef {
  std::vector<std::string> params;
  PhPtr body;
  std::shared_ptr<PhNative> native;  // optional
};
using PhDefinitions = std::map<std::string, PhDef>;

std::set<std::string> ph_free_vars(const PhPtr& f);
std::int64_t ph_size(const PhPtr& f);
int ph_quantifier_depth(const PhPtr& f);
int ph_count_quantifiers(const PhPtr& f);
// Replaces predicate calls by their bodies (recursively), renaming bound variables apart.
// With keep_native, calls of predicates that have a native implementation stay.
PhPtr ph_expand(const PhPtr& f, const PhDefinitions& defs, bool keep_native = false);

std::string ph_to_string(const PhPtr& f);
std::string ph_to_text(const PhPtr& f, const PhDefinitions& defs = {});

struct ParsedPh {
  PhDefinitions defs;
  PhPtr formula;
};
// Grammar: optional "define Name(params) := formula ;" lines, then one formula.
ParsedPh parse_ph(const std::string& text);
PhPtr parse_ph_formula(const std::string& text);

struct PhEvalOptions {
  std::int64_t domain_bound = 16;
  // Range of unbounded universal quantifiers (existentials under an odd number of negations).
  // 0 selects max(domain_bound / 4, 1 + the largest constant of the formula).
  std::int64_t universal_bound = 0;
  std::int64_t max_steps = 200'000'000;
};

struct PhEvalStats {
  std::int64_t steps = 0;
  std::int64_t memo_hits = 0;
  bool budget_exhausted = false;
};

// Bounded evaluation. Quantifiers whose values are not bounded by their body range over
// [0, domain_bound] (universal ones over [0, universal_bound]). A counting quantifier with an
// unbounded solution set is Unknown when a solution lies in (domain_bound/2, domain_bound].
Verdict eval_ph(const PhPtr& f, const PhDefinitions& defs, const std::map<std::string, std::int64_t>& env,
                const PhEvalOptions& opt, PhEvalStats* stats = nullptr);
Verdict eval_ph(const PhPtr& f, const std::map<std::string, std::int64_t>& env, std::int64_t domain_bound);

struct PhSat {
  bool sat = false;
  Verdict verdict = Verdict::Unknown;
  std::map<std::string, std::int64_t> witness;  // values of the leading existential block
  PhEvalStats stats;
};
// Never claims unsatisfiability: sat is false whenever no witness was found.
PhSat sat_ph_bounded(const PhPtr& f, const PhDefinitions& defs, const PhEvalOptions& opt);

// Runs of a flat structure as naturals: r1 selects a path schema, r2..rN hold loop iterations - 1.
struct RunCodec {
  KripkeStructure k;
  std::vector<PathSchemaSkeleton> skeletons;
  int n = 1;
  // State at position i, or -1 for an encoding that selects no schema.
  int state_at(const std::int64_t* r, std::int64_t i, std::vector<int>* deps = nullptr) const;
  bool valid(const std::int64_t* r) const;
  std::vector<std::int64_t> encode(int skeleton, const std::vector<long long>& counts) const;
  LassoRun decode(const std::vector<std::int64_t>& r) const;
};

struct RunPredicates {
  int n = 1;
  std::shared_ptr<const RunCodec> codec;
  PhDefinitions defs;  // Run(r1..rN), Conf(r1..rN, i, s), Agree(r1..rN, r1'..rN', i)
};
RunPredicates encode_run_predicates(const KripkeStructure& k);

struct PhEncoding {
  PhDefinitions defs;
  PhPtr sentence;
  int n = 1;
};
// Satisfiable iff some run from the initial state satisfies f at position 0.
PhEncoding encode_cctls_to_ph(const KripkeStructure& k, const FormulaPtr& f);

struct CltlTranslation {
  KripkeStructure k;  // one state with a self-loop, no propositions
  FormulaPtr formula;
};
CltlTranslation translate_ph_to_cltl(const PhPtr& closed);

struct CctlBoundedResult {
  Verdict verdict = Verdict::Unknown;
  PhEvalStats stats;
  std::int64_t sentence_size = 0;
};
CctlBoundedResult check_cctl_bounded(const KripkeStructure& k, const FormulaPtr& f, const PhEvalOptions& opt);

}  // namespace fcl
