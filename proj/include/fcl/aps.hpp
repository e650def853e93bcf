#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcl/countersys.hpp"
#include "fcl/logic.hpp"
#include "fcl/model.hpp"

namespace fcl {

struct AugState {
  int state = 0;
  std::map<std::string, FormulaPtr> labels;  // by formula key
  std::map<int, bool> guards;                // counter -> negative (c < 0), else c >= 0
  std::map<int, std::int64_t> updates;       // absent means 0
  bool loop_type = false;                    // type L

  // `true` holds everywhere regardless of the label set.
  bool has(const FormulaPtr& f) const;
  void add(const FormulaPtr& f) { labels[f->key] = f; }
  void remove(const FormulaPtr& f) { labels.erase(f->key); }
  void set(const FormulaPtr& f, bool on) { on ? add(f) : remove(f); }
  std::int64_t update(int c) const;
};

struct ApsComponent {
  bool loop = false;
  std::vector<AugState> states;
  int size() const { return static_cast<int>(states.size()); }
};

struct ApsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class Aps {
 public:
  std::vector<std::string> counters;
  std::vector<ApsComponent> comps;

  int size() const;
  int comp_count() const { return static_cast<int>(comps.size()); }
  int first(int k) const;  // first location of component k
  int comp_of(int l) const;
  const AugState& at(int l) const;
  AugState& at(int l);
  std::vector<int> succ(int l) const;
  int add_counter(const std::string& name);
  Segmentation segmentation() const;
};

// Shape problems (empty, last component a row, type mismatch, loop not simple, missing edges)
// as human readable lines; empty when the APS is well formed in K.
std::vector<std::string> aps_shape_problems(const KripkeStructure& k, const Aps& p);

CounterSystem cs_of_aps(const Aps& p);

// Iteration counts per component; rows carry 1, the final loop is ignored.
struct ApsRun {
  std::vector<std::int64_t> counts;
};

GuardedRunWitness run_to_witness(const Aps& p, const ApsRun& r);
ApsRun witness_to_run(const Aps& p, const GuardedRunWitness& w);
// Locations of the finite part followed by one pass of the final loop.
struct RunLayout {
  std::vector<int> locs;
  std::size_t loop_start = 0;
};
RunLayout layout(const Aps& p, const ApsRun& r);
LassoRun project(const Aps& p, const ApsRun& r);

ApsComponent row_of(const ApsComponent& c);
Aps cut(const Aps& p, int k);
Aps unfold_left(const Aps& p, int k);
Aps unfold_right(const Aps& p, int k);
Aps duplicate(const Aps& p, int k);

// Truth of phi U^{x/y} psi at every position of a lasso given as one pass of prefix and loop.
std::vector<char> freq_until_truth(const std::vector<char>& phi, const std::vector<char>& psi, std::size_t loop_start,
                                   const Ratio& r);
// Balance of a component for the ratio (phi-labelled locations count y - x, others -x).
std::int64_t component_balance(const ApsComponent& c, const FormulaPtr& phi, const Ratio& r);
// Frequency view of an until node: plain until is ratio 1/1.
Ratio until_ratio(const FormulaPtr& f);

struct Decomposition {
  Aps aps;
  ApsRun run;
  std::int64_t n1 = 0, nhat = 0, n2 = 0;
  int first = 0, last = 0;  // component indices of the two surviving loops
};

// Replaces loop k by (loop, nhat row copies, loop) and splits the run's count accordingly.
// Truth of the operands is read from the labels.
Decomposition decompose_unstable(const Aps& p, int k, const FormulaPtr& until, const ApsRun& run);

struct LocationVerdict {
  bool ok = false;
  std::string rule;    // 1, 2, 3a, 3b, 3c, 3d
  std::string detail;  // counter for 3c, referenced component for 3d, failure reason otherwise
};

struct ConsistencyReport {
  std::vector<FormulaPtr> formulas;                   // subformulae, children first
  std::vector<std::vector<LocationVerdict>> verdicts;  // [formula][location]
  bool consistent() const;
  bool consistent_for(const FormulaPtr& f) const;
  const LocationVerdict* at(const FormulaPtr& f, int l) const;
  std::string first_failure() const;
};

// Formulas must be free of path quantifiers and counting constraints.
ConsistencyReport check_consistency(const KripkeStructure& k, const Aps& p, const FormulaPtr& f);

struct ParsedAps {
  Aps aps;
  FormulaPtr formula;  // null when the header has none
};

std::string aps_to_text(const KripkeStructure& k, const Aps& p, const FormulaPtr& formula = nullptr);
ParsedAps parse_aps(const KripkeStructure& k, const std::string& text);

}  // namespace fcl
