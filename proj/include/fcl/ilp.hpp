#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fcl {

// sum_j a[j] * x[j]  (rel)  rhs
struct LinCon {
  enum Rel { Le, Ge, Eq };
  std::vector<std::int64_t> a;
  Rel rel = Le;
  std::int64_t rhs = 0;
};

struct IlpProblem {
  int nvars = 0;
  std::vector<LinCon> cons;
  std::vector<std::int64_t> lower;  // default 0
  std::vector<std::int64_t> upper;  // default `default_upper`
  std::vector<std::int64_t> objective;  // minimised; default all ones
  std::int64_t default_upper = 1000000;
};

struct IlpResult {
  bool feasible = false;
  bool exhausted = false;  // node cap reached before a decision
  std::vector<std::int64_t> x;
  int nodes = 0;
};

// Exact rational simplex with depth-first branch and bound.
IlpResult solve_ilp(const IlpProblem& p, int node_cap = 20000);

}  // namespace fcl
