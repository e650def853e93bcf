#include "fcl/model.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fcl {

int KripkeStructure::add_state(const std::string& name, std::set<std::string> labels) {
  names_.push_back(name);
  labels_.push_back(std::move(labels));
  succ_.emplace_back();
  return size() - 1;
}

void KripkeStructure::add_edge(int from, int to) {
  auto& v = succ_[from];
  auto it = std::lower_bound(v.begin(), v.end(), to);
  if (it == v.end() || *it != to) v.insert(it, to);
}

bool KripkeStructure::has_edge(int from, int to) const {
  if (from < 0 || from >= size()) return false;
  return std::binary_search(succ_[from].begin(), succ_[from].end(), to);
}

int KripkeStructure::edge_count() const {
  int n = 0;
  for (const auto& v : succ_) n += static_cast<int>(v.size());
  return n;
}

int KripkeStructure::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (names_[i] == name) return i;
  return -1;
}

std::set<std::string> KripkeStructure::propositions() const {
  std::set<std::string> out;
  for (const auto& l : labels_) out.insert(l.begin(), l.end());
  return out;
}

void KripkeStructure::check_no_dead_ends() const {
  for (int s = 0; s < size(); ++s)
    if (succ_[s].empty()) throw std::invalid_argument("dead-end state '" + names_[s] + "'");
}

std::vector<std::string> KripkeStructure::prune_unreachable() {
  std::vector<char> seen(size(), 0);
  std::vector<int> stack{initial_};
  seen[initial_] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int t : succ_[s])
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
  }
  std::vector<std::string> removed;
  std::vector<int> remap(size(), -1);
  KripkeStructure out;
  for (int s = 0; s < size(); ++s) {
    if (seen[s])
      remap[s] = out.add_state(names_[s], labels_[s]);
    else
      removed.push_back(names_[s]);
  }
  if (removed.empty()) return removed;
  for (int s = 0; s < size(); ++s)
    if (seen[s])
      for (int t : succ_[s]) out.add_edge(remap[s], remap[t]);
  out.set_initial(remap[initial_]);
  *this = std::move(out);
  return removed;
}

std::string KripkeStructure::to_text() const {
  std::ostringstream os;
  for (int s = 0; s < size(); ++s) {
    os << "state " << names_[s];
    if (!labels_[s].empty()) {
      os << " label";
      for (const auto& p : labels_[s]) os << ' ' << p;
    }
    if (s == initial_) os << " init";
    os << '\n';
  }
  for (int s = 0; s < size(); ++s)
    for (int t : succ_[s]) os << "edge " << names_[s] << " -> " << names_[t] << '\n';
  return os.str();
}

namespace {

bool is_ident(const std::string& w) {
  if (w.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(w[0])) return false;
  for (char c : w)
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  return true;
}

struct Tok {
  std::string text;
  int col;
};

std::vector<Tok> split_line(const std::string& line) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (line.compare(i, 2, "->") == 0) {
      j = i + 2;
    } else {
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
             line[j] != '#' && line.compare(j, 2, "->") != 0)
        ++j;
    }
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

}  // namespace

ParsedKripke parse_kripke(const std::string& text) {
  ParsedKripke res;
  KripkeStructure& ks = res.ks;
  std::map<std::string, int> ids;
  struct PendingEdge {
    std::string a, b;
    int line, col_a, col_b;
  };
  std::vector<PendingEdge> edges;
  int init = -1;
  int init_line = 0;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    auto toks = split_line(line);
    if (toks.empty()) continue;
    if (toks[0].text == "state") {
      if (toks.size() < 2 || !is_ident(toks[1].text))
        throw ParseError("expected state identifier", ln, toks.size() < 2 ? 6 : toks[1].col);
      const std::string& id = toks[1].text;
      if (ids.count(id)) throw ParseError("duplicate state '" + id + "'", ln, toks[1].col);
      std::set<std::string> labels;
      bool is_init = false;
      std::size_t i = 2;
      if (i < toks.size() && toks[i].text == "label") {
        ++i;
        while (i < toks.size() && toks[i].text != "init") {
          if (!is_ident(toks[i].text))
            throw ParseError("bad proposition '" + toks[i].text + "'", ln, toks[i].col);
          labels.insert(toks[i].text);
          ++i;
        }
      }
      if (i < toks.size() && toks[i].text == "init") {
        is_init = true;
        ++i;
      }
      if (i < toks.size()) throw ParseError("unexpected '" + toks[i].text + "'", ln, toks[i].col);
      int s = ks.add_state(id, std::move(labels));
      ids[id] = s;
      if (is_init) {
        if (init >= 0) throw ParseError("second init state (first on line " +
                                            std::to_string(init_line) + ")",
                                        ln, toks[1].col);
        init = s;
        init_line = ln;
      }
    } else if (toks[0].text == "edge") {
      if (toks.size() != 4 || toks[2].text != "->" || !is_ident(toks[1].text) ||
          !is_ident(toks[3].text))
        throw ParseError("expected 'edge <id> -> <id>'", ln, toks[0].col);
      edges.push_back({toks[1].text, toks[3].text, ln, toks[1].col, toks[3].col});
    } else {
      throw ParseError("unknown directive '" + toks[0].text + "'", ln, toks[0].col);
    }
  }
  for (const auto& e : edges) {
    auto a = ids.find(e.a);
    if (a == ids.end()) throw ParseError("unknown state '" + e.a + "'", e.line, e.col_a);
    auto b = ids.find(e.b);
    if (b == ids.end()) throw ParseError("unknown state '" + e.b + "'", e.line, e.col_b);
    ks.add_edge(a->second, b->second);
  }
  if (ks.size() == 0) throw ParseError("no states declared", ln + 1, 1);
  if (init < 0) throw ParseError("no init state", ln + 1, 1);
  ks.set_initial(init);
  try {
    ks.check_no_dead_ends();
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what(), ln + 1, 1);
  }
  for (const auto& n : ks.prune_unreachable())
    res.warnings.push_back("pruned unreachable state '" + n + "'");
  return res;
}

KripkeStructure load_kripke_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_kripke(ss.str()).ks;
}

namespace {

SimpleLoop canonical(const KripkeStructure& k, std::vector<int> path) {
  auto best = path.begin();
  for (auto it = path.begin(); it != path.end(); ++it)
    if (k.name(*it) < k.name(*best)) best = it;
  std::rotate(path.begin(), best, path.end());
  return SimpleLoop{std::move(path)};
}

// Tarjan SCC; returns component id per state.
std::vector<int> scc_ids(const KripkeStructure& k, int* count) {
  int n = k.size(), idx = 0, comps = 0;
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on(n, 0);
  std::vector<std::pair<int, std::size_t>> work;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    work.push_back({root, 0});
    index[root] = low[root] = idx++;
    stack.push_back(root);
    on[root] = 1;
    while (!work.empty()) {
      auto& [v, i] = work.back();
      if (i < k.succ(v).size()) {
        int w = k.succ(v)[i++];
        if (index[w] < 0) {
          index[w] = low[w] = idx++;
          stack.push_back(w);
          on[w] = 1;
          work.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        int vv = v;
        work.pop_back();
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[vv]);
        if (low[vv] == index[vv]) {
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on[w] = 0;
            comp[w] = comps;
          } while (w != vv);
          ++comps;
        }
      }
    }
  }
  if (count) *count = comps;
  return comp;
}

// Cycles through v inside component c, at most `limit` of them.
std::vector<std::vector<int>> cycles_through(const KripkeStructure& k, const std::vector<int>& comp,
                                             int v, std::size_t limit) {
  std::vector<std::vector<int>> out;
  std::vector<int> path{v};
  std::vector<char> on(k.size(), 0);
  on[v] = 1;
  std::function<void(int)> dfs = [&](int u) {
    for (int w : k.succ(u)) {
      if (out.size() >= limit) return;
      if (comp[w] != comp[v]) continue;
      if (w == v) {
        out.push_back(path);
      } else if (!on[w]) {
        on[w] = 1;
        path.push_back(w);
        dfs(w);
        path.pop_back();
        on[w] = 0;
      }
    }
  };
  dfs(v);
  return out;
}

}  // namespace

std::vector<SimpleLoop> simple_loops(const KripkeStructure& k, std::size_t cap) {
  std::vector<int> order(k.size());
  for (int i = 0; i < k.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return k.name(a) < k.name(b); });
  std::vector<int> rank(k.size());
  for (int i = 0; i < k.size(); ++i) rank[order[i]] = i;

  std::vector<SimpleLoop> out;
  std::vector<char> on(k.size(), 0);
  std::vector<int> path;
  std::function<void(int, int)> dfs = [&](int s, int u) {
    for (int w : k.succ(u)) {
      if (out.size() >= cap) return;
      if (w == s) {
        out.push_back(SimpleLoop{path});
      } else if (rank[w] > rank[s] && !on[w]) {
        on[w] = 1;
        path.push_back(w);
        dfs(s, w);
        path.pop_back();
        on[w] = 0;
      }
    }
  };
  for (int s : order) {
    path = {s};
    on[s] = 1;
    dfs(s, s);
    on[s] = 0;
  }
  for (auto& l : out) l = canonical(k, l.path);
  std::sort(out.begin(), out.end(), [&](const SimpleLoop& a, const SimpleLoop& b) {
    std::vector<std::string> x, y;
    for (int s : a.path) x.push_back(k.name(s));
    for (int s : b.path) y.push_back(k.name(s));
    return x < y;
  });
  return out;
}

FlatnessResult is_flat(const KripkeStructure& k) {
  int comps = 0;
  auto comp = scc_ids(k, &comps);
  std::vector<int> verts(comps, 0), edges(comps, 0);
  for (int s = 0; s < k.size(); ++s) {
    ++verts[comp[s]];
    for (int t : k.succ(s))
      if (comp[t] == comp[s]) ++edges[comp[s]];
  }
  FlatnessResult res;
  for (int c = 0; c < comps; ++c) {
    if (edges[c] <= verts[c]) continue;
    res.flat = false;
    for (int v = 0; v < k.size(); ++v) {
      if (comp[v] != c) continue;
      auto cyc = cycles_through(k, comp, v, 2);
      if (cyc.size() == 2) {
        res.state = v;
        res.first = canonical(k, cyc[0]);
        res.second = canonical(k, cyc[1]);
        return res;
      }
    }
    return res;
  }
  return res;
}

int PathSchemaSkeleton::loop_count() const {
  int n = 0;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i)
    if (segments[i].kind == SegKind::Loop) ++n;
  return n;
}

std::vector<int> PathSchemaSkeleton::states() const {
  std::vector<int> out;
  for (const auto& s : segments) out.insert(out.end(), s.path.begin(), s.path.end());
  return out;
}

std::string skeleton_to_string(const KripkeStructure& k, const PathSchemaSkeleton& sk) {
  std::string out = "[";
  for (std::size_t i = 0; i < sk.segments.size(); ++i) {
    const auto& seg = sk.segments[i];
    if (i) out += ", ";
    out += seg.kind == SegKind::Loop ? "Loop(" : "Row(";
    for (std::size_t j = 0; j < seg.path.size(); ++j) {
      if (j) out += ' ';
      out += k.name(seg.path[j]);
    }
    out += ')';
  }
  return out + "]";
}

namespace {

struct FlatInfo {
  std::vector<int> comp;
  std::vector<int> cycle_next;  // -1 when the state is on no loop
};

FlatInfo flat_info(const KripkeStructure& k) {
  if (!is_flat(k).flat) throw NotFlat("structure is not flat");
  FlatInfo fi;
  fi.comp = scc_ids(k, nullptr);
  fi.cycle_next.assign(k.size(), -1);
  for (int s = 0; s < k.size(); ++s)
    for (int t : k.succ(s))
      if (fi.comp[t] == fi.comp[s]) fi.cycle_next[s] = t;
  return fi;
}

}  // namespace

void for_each_path_schema(const KripkeStructure& k, int start,
                          const std::function<bool(const PathSchemaSkeleton&)>& fn) {
  FlatInfo fi = flat_info(k);
  bool stop = false;
  std::vector<Segment> segs;
  std::function<void(int, std::vector<int>)> go = [&](int v, std::vector<int> row) {
    if (stop) return;
    if (fi.cycle_next[v] < 0) {
      row.push_back(v);
      for (int w : k.succ(v)) go(w, row);
      return;
    }
    std::vector<int> cyc{v};
    for (int x = fi.cycle_next[v]; x != v; x = fi.cycle_next[x]) cyc.push_back(x);
    {
      PathSchemaSkeleton sk;
      sk.segments = segs;
      if (!row.empty()) sk.segments.push_back({SegKind::Row, row});
      sk.segments.push_back({SegKind::Loop, cyc});
      if (!fn(sk)) {
        stop = true;
        return;
      }
    }
    for (int iterate = 0; iterate < 2 && !stop; ++iterate) {
      std::size_t saved = segs.size();
      std::vector<int> base = row;
      if (iterate) {
        if (!base.empty()) segs.push_back({SegKind::Row, base});
        segs.push_back({SegKind::Loop, cyc});
        base.clear();
      }
      std::vector<int> partial;
      for (int x : cyc) {
        partial.push_back(x);
        for (int w : k.succ(x)) {
          if (fi.comp[w] == fi.comp[v]) continue;
          std::vector<int> r = base;
          r.insert(r.end(), partial.begin(), partial.end());
          go(w, r);
          if (stop) break;
        }
        if (stop) break;
      }
      segs.resize(saved);
    }
  };
  go(start, {});
}

std::vector<PathSchemaSkeleton> enumerate_path_schemas_from(const KripkeStructure& k, int start) {
  std::vector<PathSchemaSkeleton> out;
  for_each_path_schema(k, start, [&](const PathSchemaSkeleton& sk) {
    out.push_back(sk);
    return true;
  });
  auto key = [&](const PathSchemaSkeleton& sk) {
    std::vector<std::string> v;
    for (const auto& seg : sk.segments) {
      for (int s : seg.path) v.push_back(k.name(s));
      v.push_back(seg.kind == SegKind::Loop ? ")" : "|");
    }
    return v;
  };
  std::vector<std::pair<std::vector<std::string>, std::size_t>> keyed;
  for (std::size_t i = 0; i < out.size(); ++i) keyed.push_back({key(out[i]), i});
  std::sort(keyed.begin(), keyed.end());
  std::vector<PathSchemaSkeleton> sorted;
  for (auto& [_, i] : keyed) sorted.push_back(out[i]);
  return sorted;
}

std::vector<PathSchemaSkeleton> enumerate_path_schemas(const KripkeStructure& k) {
  return enumerate_path_schemas_from(k, k.initial());
}

LassoRun instantiate(const PathSchemaSkeleton& sk, const std::vector<long long>& counts) {
  LassoRun r;
  std::size_t li = 0;
  for (std::size_t i = 0; i + 1 < sk.segments.size(); ++i) {
    const auto& seg = sk.segments[i];
    long long n = 1;
    if (seg.kind == SegKind::Loop) {
      if (li >= counts.size()) throw std::invalid_argument("missing loop count");
      n = counts[li++];
      if (n < 1) throw std::invalid_argument("loop count must be positive");
    }
    for (long long t = 0; t < n; ++t) r.prefix.insert(r.prefix.end(), seg.path.begin(), seg.path.end());
  }
  r.loop = sk.segments.back().path;
  return r;
}

bool is_run_of(const KripkeStructure& k, const LassoRun& r) {
  if (r.loop.empty()) return false;
  std::vector<int> seq = r.prefix;
  seq.insert(seq.end(), r.loop.begin(), r.loop.end());
  seq.push_back(r.loop.front());
  for (int s : seq)
    if (s < 0 || s >= k.size()) return false;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (!k.has_edge(seq[i], seq[i + 1])) return false;
  return true;
}

LassoRun parse_lasso(const KripkeStructure& k, const std::string& text) {
  auto semi = text.find(';');
  if (semi == std::string::npos) throw std::invalid_argument("lasso needs 'prefix: ... ; loop: ...'");
  auto read = [&](std::string part, const std::string& tag) {
    std::istringstream is(part);
    std::string w;
    is >> w;
    if (w != tag + ":") throw std::invalid_argument("expected '" + tag + ":'");
    std::vector<int> out;
    while (is >> w) {
      int s = k.index_of(w);
      if (s < 0) throw std::invalid_argument("unknown state '" + w + "'");
      out.push_back(s);
    }
    return out;
  };
  LassoRun r{read(text.substr(0, semi), "prefix"), read(text.substr(semi + 1), "loop")};
  if (r.loop.empty()) throw std::invalid_argument("empty loop");
  if (!is_run_of(k, r)) throw std::invalid_argument("lasso is not a path of the structure");
  return r;
}

std::string lasso_to_string(const KripkeStructure& k, const LassoRun& r) {
  std::string out = "prefix:";
  for (int s : r.prefix) out += " " + k.name(s);
  out += " ; loop:";
  for (int s : r.loop) out += " " + k.name(s);
  return out;
}

}  // namespace fcl
