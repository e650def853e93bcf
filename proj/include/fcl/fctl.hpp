#pragma once

#include <string>
#include <vector>

#include "fcl/countersys.hpp"
#include "fcl/logic.hpp"
#include "fcl/model.hpp"

namespace fcl {

using StateSet = std::vector<char>;  // indexed by state

enum class RrMethod { Stack, Direct };

struct RrResult {
  bool found = false;
  // Transition indices of a lasso witness; filled by the direct method when it can.
  std::vector<int> prefix, loop;
};

// Infinite guard-respecting run from (from, 0) visiting `accepting` infinitely often.
// An empty accepting set means every state. The direct method handles the
// every-state case itself and defers to the stack method otherwise.
RrResult repeated_reachability(const CounterSystem& ocs, int from, const StateSet& accepting = {},
                               RrMethod method = RrMethod::Direct);

// Counter system over the states of K: leaving a phi-state adds m-n, any other state -n.
CounterSystem build_hat(const KripkeStructure& k, const StateSet& phi, const Ratio& r, int s);
// Edges into psi-states additionally require c < 0.
CounterSystem build_r(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s);
// Adds a sink (index k.size()) entered from psi-states under c >= 0.
CounterSystem build_u(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s);

bool check_a_until(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s,
                   RrMethod method = RrMethod::Direct);
bool check_e_until(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s,
                   RrMethod method = RrMethod::Direct);

struct LabelTable {
  std::vector<FormulaPtr> formulas;  // state subformulae, children first
  std::vector<StateSet> sets;
  const StateSet* find(const FormulaPtr& f) const;
  std::string to_text(const KripkeStructure& k) const;
};

struct FragmentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FctlResult {
  bool holds = false;
  LabelTable table;
};

// Throws FragmentError unless every temporal operator sits under E (through negations only).
void require_fctl(const FormulaPtr& f);

FctlResult model_check_fctl(const KripkeStructure& k, const FormulaPtr& f, RrMethod method = RrMethod::Direct);

}  // namespace fcl
