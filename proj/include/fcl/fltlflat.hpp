#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcl/aps.hpp"
#include "fcl/oracle.hpp"

namespace fcl {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Growth ledger for the certificate construction.
struct SizeBudget {
  std::int64_t states = 0;        // |S|
  std::int64_t formula_size = 0;  // |Phi|
  std::int64_t base = 0;          // size of the base schema
  std::vector<std::string> log;   // one line per step

  SizeBudget(const KripkeStructure& k, const FormulaPtr& f);
  std::int64_t base_cap() const { return 2 * states; }
  std::int64_t until_component_cap(std::int64_t y) const { return 17 * y * states * states * states; }
  // Saturates at INT64_MAX.
  std::int64_t total_cap() const;
  void check_base(const Aps& p);
  // before/after: the schema around one labelling step; y is 1 for non-until steps.
  void check_step(const FormulaPtr& g, const Aps& before, const Aps& after, std::int64_t y);
};

struct Build {
  Aps aps;
  ApsRun run;
};

// Rows for segments taken once, loops otherwise; the final segment is always a loop.
Build base_schema_from_run(const KripkeStructure& k, const PathSchemaSkeleton& sk, const std::vector<long long>& counts);

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adds g to the labelling; all strict subformulae of g must already be consistent.
void label_step(const KripkeStructure& k, Build& b, const FormulaPtr& g, SizeBudget* budget = nullptr);

// Base schema plus one labelling step per subformula.
Build build_certificate(const KripkeStructure& k, const PathSchemaSkeleton& sk, const std::vector<long long>& counts,
                        const FormulaPtr& f, SizeBudget* budget = nullptr);

struct CertificateCheck {
  bool ok = false;
  std::vector<std::string> diagnostics;
  std::optional<GuardedRunWitness> witness;
};

CertificateCheck verify_certificate(const KripkeStructure& k, const FormulaPtr& f, const Aps& p);

struct FltlConfig {
  int loop_bound = 16;
  long long horizon = 0;  // 0 selects the sufficiency bound of each run
  bool exhaustive = false;
  int start = -1;  // -1 means the initial state
};

enum class CheckKind { Holds, NotFoundWithinBound, Fails };
const char* check_kind_name(CheckKind k);

struct CheckVerdict {
  CheckKind kind = CheckKind::NotFoundWithinBound;
  Aps certificate;
  GuardedRunWitness witness;
  LassoRun run;  // the satisfying run the certificate was built from
  std::string diagnostics;
};

struct NotLinear : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Throws NotFlat for non-flat structures and NotLinear outside the linear frequency fragment.
CheckVerdict model_check_fltl_flat(const KripkeStructure& k, const FormulaPtr& f, const FltlConfig& cfg = {});

// State formulas whose path quantifiers range over linear frequency formulas, by nested calls.
// E is True when a witness run is found, False only when the search space was exhausted.
struct FctlStarResult {
  Verdict verdict = Verdict::Unknown;
  std::vector<std::pair<FormulaPtr, std::vector<Verdict>>> table;
};
FctlStarResult model_check_fctl_star_flat(const KripkeStructure& k, const FormulaPtr& f, const FltlConfig& cfg = {});

}  // namespace fcl
