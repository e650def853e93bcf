#include <random>

#include "doctest.h"
#include "fcl/model.hpp"
#include "fixtures.hpp"

using namespace fcl;

namespace {

std::vector<std::string> names(const KripkeStructure& k, const std::vector<int>& v) {
  std::vector<std::string> out;
  for (int s : v) out.push_back(k.name(s));
  return out;
}

KripkeStructure random_structure(std::mt19937& rng, int n, double p_edge) {
  KripkeStructure k;
  for (int i = 0; i < n; ++i) k.add_state("s" + std::to_string(i));
  std::bernoulli_distribution coin(p_edge);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (coin(rng)) k.add_edge(i, j);
    if (k.succ(i).empty()) k.add_edge(i, (i + 1) % n);
  }
  k.set_initial(0);
  return k;
}

}  // namespace

TEST_CASE("parse the example structure") {
  auto k = fixtures::example();
  CHECK(k.size() == 6);
  CHECK(k.edge_count() == 10);
  CHECK(k.name(k.initial()) == "s0");
  CHECK(k.has_label(k.index_of("s3"), "r"));
  CHECK(k.has_edge(k.index_of("s3"), k.index_of("s2")));
}

TEST_CASE("parse errors") {
  CHECK_NOTHROW(parse_kripke("state q init\nedge q -> q\n"));
  CHECK_THROWS_AS(parse_kripke("state a init\nstate b\nedge a -> b\n"), ParseError);
  CHECK_THROWS_AS(parse_kripke("state a init\nedge a -> c\n"), ParseError);
  CHECK_THROWS_AS(parse_kripke("state a init\nstate a\nedge a -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_kripke("state a init\nedge a => a\n"), ParseError);
  try {
    parse_kripke("state a init\nedge a -> a\nedge a -> zz\n");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.column == 11);
  }
}

TEST_CASE("unreachable states are pruned with a warning") {
  auto res = parse_kripke("state a init\nstate b\nedge a -> a\nedge b -> a\n");
  CHECK(res.ks.size() == 1);
  REQUIRE(res.warnings.size() == 1);
}

TEST_CASE("simple loops") {
  auto k = fixtures::example();
  auto loops = simple_loops(k);
  REQUIRE(loops.size() == 4);
  CHECK(names(k, loops[0].path) == std::vector<std::string>{"s0"});
  CHECK(names(k, loops[1].path) == std::vector<std::string>{"s2", "s3"});
  CHECK(names(k, loops[2].path) == std::vector<std::string>{"s4"});
  CHECK(names(k, loops[3].path) == std::vector<std::string>{"s5"});

  auto ab = parse_kripke("state a init\nstate b\nedge a -> a\nedge a -> b\nedge b -> a\n").ks;
  auto l2 = simple_loops(ab);
  REQUIRE(l2.size() == 2);
  CHECK(names(ab, l2[0].path) == std::vector<std::string>{"a"});
  CHECK(names(ab, l2[1].path) == std::vector<std::string>{"a", "b"});

  KripkeStructure dag;
  dag.add_state("a");
  dag.add_state("b");
  dag.add_edge(0, 1);
  dag.set_initial(0);
  CHECK(simple_loops(dag).empty());
}

TEST_CASE("flatness") {
  CHECK(is_flat(fixtures::example()).flat);
  auto ab = parse_kripke("state a init\nstate b\nedge a -> a\nedge a -> b\nedge b -> a\n").ks;
  auto r = is_flat(ab);
  CHECK_FALSE(r.flat);
  CHECK(ab.name(r.state) == "a");
  CHECK_FALSE(r.first == r.second);
  CHECK(is_flat(parse_kripke("state q init\nedge q -> q\n").ks).flat);
}

TEST_CASE("flatness agrees with loop counting on random structures") {
  std::mt19937 rng(7);
  for (int it = 0; it < 400; ++it) {
    int n = 2 + static_cast<int>(rng() % 7);
    auto k = random_structure(rng, n, 0.25);
    auto loops = simple_loops(k);
    std::vector<int> count(k.size(), 0);
    bool shared = false;
    for (const auto& l : loops)
      for (int s : l.path) shared = shared || ++count[s] > 1;
    auto fr = is_flat(k);
    CHECK(fr.flat == !shared);
    if (!fr.flat) {
      CHECK(std::find(fr.first.path.begin(), fr.first.path.end(), fr.state) != fr.first.path.end());
      CHECK(std::find(fr.second.path.begin(), fr.second.path.end(), fr.state) != fr.second.path.end());
    }
  }
}

TEST_CASE("simple loops are invariant under state renaming") {
  std::mt19937 rng(11);
  for (int it = 0; it < 50; ++it) {
    auto k = random_structure(rng, 5, 0.3);
    std::vector<int> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    KripkeStructure p;
    for (int i = 0; i < 5; ++i) p.add_state("s" + std::to_string(perm[i]));
    // state i of p is named after perm[i]; copy edges by name
    for (int s = 0; s < 5; ++s)
      for (int t : k.succ(s)) {
        int a = static_cast<int>(std::find(perm.begin(), perm.end(), s) - perm.begin());
        int b = static_cast<int>(std::find(perm.begin(), perm.end(), t) - perm.begin());
        p.add_edge(a, b);
      }
    p.set_initial(0);
    auto l1 = simple_loops(k), l2 = simple_loops(p);
    REQUIRE(l1.size() == l2.size());
    for (std::size_t i = 0; i < l1.size(); ++i) CHECK(names(k, l1[i].path) == names(p, l2[i].path));
  }
}

TEST_CASE("path schemas of the example structure") {
  auto k = fixtures::example();
  auto sks = enumerate_path_schemas(k);
  std::vector<std::string> shown;
  for (const auto& sk : sks) shown.push_back(skeleton_to_string(k, sk));
  auto has = [&](const std::string& s) {
    return std::find(shown.begin(), shown.end(), s) != shown.end();
  };
  CHECK(has("[Loop(s0), Row(s0 s1), Loop(s2 s3), Row(s2), Loop(s4), Row(s4), Loop(s5)]"));
  CHECK(has("[Loop(s0), Row(s0), Loop(s2 s3), Row(s2), Loop(s4), Row(s4), Loop(s5)]"));
  CHECK(has("[Row(s0 s2), Loop(s4), Row(s4), Loop(s5)]"));
  CHECK(has("[Loop(s0)]"));
  for (const auto& sk : sks) {
    CHECK(sk.segments.back().kind == SegKind::Loop);
    CHECK(static_cast<int>(sk.states().size()) <= 2 * k.size());
  }
  CHECK(sks == enumerate_path_schemas(k));
}

TEST_CASE("small schema cases") {
  auto q = parse_kripke("state q init\nedge q -> q\n").ks;
  auto s1 = enumerate_path_schemas(q);
  REQUIRE(s1.size() == 1);
  CHECK(skeleton_to_string(q, s1[0]) == "[Loop(q)]");
  auto ab = parse_kripke("state a init\nstate b\nedge a -> b\nedge b -> b\n").ks;
  auto s2 = enumerate_path_schemas(ab);
  REQUIRE(s2.size() == 1);
  CHECK(skeleton_to_string(ab, s2[0]) == "[Row(a), Loop(b)]");
  auto nf = parse_kripke("state a init\nstate b\nedge a -> a\nedge a -> b\nedge b -> a\n").ks;
  CHECK_THROWS_AS(enumerate_path_schemas(nf), NotFlat);
}

namespace {

KripkeStructure random_flat(std::mt19937& rng, int n) {
  while (true) {
    auto k = random_structure(rng, n, 0.3);
    if (is_flat(k).flat) return k;
  }
}

}  // namespace

TEST_CASE("runs match exactly one skeleton") {
  std::mt19937 rng(3);
  for (int it = 0; it < 60; ++it) {
    auto k = random_flat(rng, 2 + static_cast<int>(rng() % 4));
    auto sks = enumerate_path_schemas(k);
    // every instantiation is a run; distinct (skeleton, counts) give distinct runs
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
    for (const auto& sk : sks) {
      int m = sk.loop_count();
      std::vector<long long> counts(m, 1);
      while (true) {
        auto r = instantiate(sk, counts);
        CHECK(is_run_of(k, r));
        CHECK((r.prefix.empty() ? r.loop.front() : r.prefix.front()) == k.initial());
        CHECK(seen.insert({r.prefix, r.loop}).second);
        int j = 0;
        while (j < m && counts[j] == 3) counts[j++] = 1;
        if (j == m) break;
        ++counts[j];
      }
    }
  }
}
