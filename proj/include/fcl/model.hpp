#pragma once

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcl {

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int column_)
      : std::runtime_error("line " + std::to_string(line_) + ", column " +
                           std::to_string(column_) + ": " + msg),
        line(line_),
        column(column_) {}
};

struct NotFlat : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// States are dense indices 0..n-1; names are kept for I/O.
class KripkeStructure {
 public:
  KripkeStructure() = default;

  int add_state(const std::string& name, std::set<std::string> labels = {});
  void add_edge(int from, int to);
  void set_initial(int s) { initial_ = s; }

  int size() const { return static_cast<int>(names_.size()); }
  int initial() const { return initial_; }
  const std::string& name(int s) const { return names_[s]; }
  const std::set<std::string>& labels(int s) const { return labels_[s]; }
  bool has_label(int s, const std::string& p) const { return labels_[s].count(p) > 0; }
  const std::vector<int>& succ(int s) const { return succ_[s]; }
  bool has_edge(int from, int to) const;
  int edge_count() const;
  // -1 when unknown
  int index_of(const std::string& name) const;
  std::set<std::string> propositions() const;

  // Throws std::invalid_argument naming the first dead-end state.
  void check_no_dead_ends() const;
  // Removes states not reachable from the initial one; returns removed names.
  std::vector<std::string> prune_unreachable();

  std::string to_text() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::set<std::string>> labels_;
  std::vector<std::vector<int>> succ_;
  int initial_ = -1;
};

struct ParsedKripke {
  KripkeStructure ks;
  std::vector<std::string> warnings;
};

// Grammar: `state <id> [label p q ...] [init]`, `edge <id> -> <id>`, `#` comments.
ParsedKripke parse_kripke(const std::string& text);
KripkeStructure load_kripke_file(const std::string& path);

struct SimpleLoop {
  std::vector<int> path;
  bool operator==(const SimpleLoop& o) const { return path == o.path; }
  bool operator<(const SimpleLoop& o) const { return path < o.path; }
};

// Canonical form: rotated so the lexicographically smallest state name is first.
std::vector<SimpleLoop> simple_loops(const KripkeStructure& k, std::size_t cap = 100000);

struct FlatnessResult {
  bool flat = true;
  int state = -1;
  SimpleLoop first, second;
};

FlatnessResult is_flat(const KripkeStructure& k);

enum class SegKind { Row, Loop };

struct Segment {
  SegKind kind;
  std::vector<int> path;
  bool operator==(const Segment& o) const { return kind == o.kind && path == o.path; }
};

struct PathSchemaSkeleton {
  std::vector<Segment> segments;
  int loop_count() const;           // loops excluding the final one
  std::vector<int> states() const;  // concatenated segment paths
  bool operator==(const PathSchemaSkeleton& o) const { return segments == o.segments; }
};

std::string skeleton_to_string(const KripkeStructure& k, const PathSchemaSkeleton& sk);

// prefix . loop^omega
struct LassoRun {
  std::vector<int> prefix;
  std::vector<int> loop;
  int at(long long pos) const {
    long long a = static_cast<long long>(prefix.size());
    if (pos < a) return prefix[pos];
    return loop[(pos - a) % static_cast<long long>(loop.size())];
  }
  // Smallest position with the same suffix as `pos`.
  long long norm(long long pos) const {
    long long a = static_cast<long long>(prefix.size());
    if (pos < a) return pos;
    return a + (pos - a) % static_cast<long long>(loop.size());
  }
  bool operator==(const LassoRun& o) const { return prefix == o.prefix && loop == o.loop; }
};

// counts[j] is the iteration count (>= 1) of the j-th non-final loop.
LassoRun instantiate(const PathSchemaSkeleton& sk, const std::vector<long long>& counts);
bool is_run_of(const KripkeStructure& k, const LassoRun& r);
LassoRun parse_lasso(const KripkeStructure& k, const std::string& text);
std::string lasso_to_string(const KripkeStructure& k, const LassoRun& r);

// Streams skeletons of runs starting at `start`; the callback returns false to stop.
// Order is the depth-first order, not sorted.
void for_each_path_schema(const KripkeStructure& k, int start,
                          const std::function<bool(const PathSchemaSkeleton&)>& fn);

// All skeletons from the initial state, sorted by state-name sequence. Throws NotFlat.
std::vector<PathSchemaSkeleton> enumerate_path_schemas(const KripkeStructure& k);
std::vector<PathSchemaSkeleton> enumerate_path_schemas_from(const KripkeStructure& k, int start);

}  // namespace fcl
