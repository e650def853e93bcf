#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcl {

struct Guard {
  int counter = 0;
  bool negative = true;  // c < 0, otherwise c >= 0
  bool operator==(const Guard& o) const { return counter == o.counter && negative == o.negative; }
  bool operator<(const Guard& o) const {
    return counter != o.counter ? counter < o.counter : negative < o.negative;
  }
};

struct CsTransition {
  int src = 0;
  std::vector<std::int64_t> update;  // one entry per counter
  std::vector<Guard> guards;
  int dst = 0;
};

class CounterSystem {
 public:
  int add_state(const std::string& name);
  int add_counter(const std::string& name);
  // Missing update entries are zero.
  int add_transition(int src, std::vector<std::int64_t> update, std::vector<Guard> guards, int dst);
  void set_initial(int s) { initial_ = s; }

  int size() const { return static_cast<int>(names_.size()); }
  int counters() const { return static_cast<int>(counter_names_.size()); }
  int initial() const { return initial_; }
  const std::string& name(int s) const { return names_[s]; }
  const std::string& counter_name(int c) const { return counter_names_[c]; }
  int counter_index(const std::string& c) const;
  const std::vector<CsTransition>& transitions() const { return trans_; }
  // Transitions leaving s.
  std::vector<int> out(int s) const;
  // -1 when absent, -2 when ambiguous.
  int find_transition(int src, int dst) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::string> counter_names_;
  std::vector<CsTransition> trans_;
  int initial_ = 0;
};

struct SimResult {
  std::vector<std::vector<std::int64_t>> trace;  // theta_0 .. theta_k
  int violation = -1;  // index i of theta_i whose guard failed, -1 if none
  bool ok() const { return violation < 0; }
};

struct StepError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Steps are transition indices; the first leaves the initial state.
SimResult simulate(const CounterSystem& cs, const std::vector<int>& steps);
// State sequence starting at the initial state; each consecutive pair must have one transition.
SimResult simulate_path(const CounterSystem& cs, const std::vector<int>& states);

// Locations 0..L-1 laid out as consecutive rows and loops, the last one a loop.
struct CsComponent {
  bool loop = false;
  int first = 0, last = 0;  // inclusive
};

struct Segmentation {
  std::vector<CsComponent> comps;
  // Index among non-final loops, -1 for rows and the final loop.
  std::vector<int> loop_ids() const;
  int loop_count() const;
};

struct NotSegmented : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Checks the shape: forward edges l -> l+1, loop back edges, nothing else.
void check_segmented(const CounterSystem& cs, const Segmentation& seg);

struct GuardedRunWitness {
  std::vector<std::int64_t> counts;  // per non-final loop, >= 1
};

struct NonemptyOptions {
  std::vector<std::pair<int, std::int64_t>> fixed;        // (loop id, count)
  std::vector<std::pair<int, std::int64_t>> at_least;     // (loop id, bound)
  std::vector<std::pair<int, std::int64_t>> at_most;      // (loop id, bound)
  std::int64_t max_count = 1000000;
  int node_cap = 20000;
};

struct NonemptyResult {
  std::optional<GuardedRunWitness> witness;
  bool exhausted = false;  // solver gave up; no claim either way
};

NonemptyResult aps_nonempty(const CounterSystem& cs, const Segmentation& seg, const NonemptyOptions& opt = {});

// A feasible witness with randomised lower bounds, falling back to the minimal one.
std::optional<GuardedRunWitness> aps_sample(const CounterSystem& cs, const Segmentation& seg, std::mt19937& rng,
                                            std::int64_t spread = 6);

// Location sequence of the run: prefix with the given counts, then `final_iterations` of the last loop.
std::vector<int> witness_locations(const Segmentation& seg, const GuardedRunWitness& w, int final_iterations);

// Simulates the witness with some iterations of the final loop.
SimResult simulate_witness(const CounterSystem& cs, const Segmentation& seg, const GuardedRunWitness& w,
                           int final_iterations = 3);

}  // namespace fcl
