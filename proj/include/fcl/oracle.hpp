#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "fcl/logic.hpp"
#include "fcl/model.hpp"

namespace fcl {

enum class Verdict : std::int8_t { False = 0, True = 1, Unknown = 2 };

inline Verdict v_not(Verdict a) {
  return a == Verdict::Unknown ? a : (a == Verdict::True ? Verdict::False : Verdict::True);
}
inline Verdict v_and(Verdict a, Verdict b) {
  if (a == Verdict::False || b == Verdict::False) return Verdict::False;
  if (a == Verdict::True && b == Verdict::True) return Verdict::True;
  return Verdict::Unknown;
}
inline Verdict v_or(Verdict a, Verdict b) { return v_not(v_and(v_not(a), v_not(b))); }
inline Verdict v_of(bool b) { return b ? Verdict::True : Verdict::False; }
const char* verdict_name(Verdict v);

// y * (#phi positions) - x * length
std::int64_t bal(const std::vector<bool>& phi_positions, const Ratio& r);

enum class LoopClass { Good, Neutral, Bad };
LoopClass classify_balance(std::int64_t b);
LoopClass classify_loop(const std::vector<bool>& phi_labels, const Ratio& r);
const char* loop_class_name(LoopClass c);

// Formula key -> per-state truth, for subformulae decided elsewhere.
using StateLabels = std::map<std::string, std::vector<char>>;
using Valuation = std::map<std::string, long long>;

struct EvalOptions {
  long long horizon = 200;
  int loop_bound = 8;
  const StateLabels* extra = nullptr;
  // Open until that finds no witness within its window yields Unknown instead of false.
  bool strict_windows = false;
};

// Loop counts tried for every non-final loop when quantifying over runs.
std::vector<long long> count_domain(int loop_bound);

class Evaluator {
 public:
  Evaluator(const KripkeStructure& k, EvalOptions opt);
  ~Evaluator();

  // Truth at position i of `run` under theta (missing variables are 0).
  Verdict eval(const FormulaPtr& f, const LassoRun& run, long long i, const Valuation& theta = {});
  // Some run from s satisfies f at position 0.
  Verdict eval_from_state(const FormulaPtr& f, int s);

  // Lasso continuations from s within the loop-count domain.
  const std::vector<LassoRun>& continuations(int s);

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

Verdict eval_linear(const KripkeStructure& k, const LassoRun& run, const FormulaPtr& f, long long i,
                    const Valuation& theta, long long horizon, const StateLabels* extra = nullptr);

Verdict eval_branching(const KripkeStructure& k, const FormulaPtr& f, int s, int loop_bound,
                       long long horizon);

// Horizon after which closed frequency formulas are settled on this run.
long long fltl_sufficient_horizon(const LassoRun& run, const FormulaPtr& f);

}  // namespace fcl
