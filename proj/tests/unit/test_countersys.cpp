#include <random>

#include "doctest.h"
#include "fcl/countersys.hpp"
#include "fcl/ilp.hpp"
#include "fixtures.hpp"

using namespace fcl;

TEST_CASE("integer solver basics") {
  IlpProblem p;
  p.nvars = 2;
  // 2x - 2y = 1 has no integer solution
  p.cons.push_back({{2, -2}, LinCon::Eq, 1});
  p.upper = {50, 50};
  CHECK_FALSE(solve_ilp(p).feasible);

  IlpProblem q;
  q.nvars = 2;
  q.cons.push_back({{3, 2}, LinCon::Ge, 13});
  q.cons.push_back({{1, -1}, LinCon::Le, 1});
  q.lower = {1, 1};
  auto r = solve_ilp(q);
  REQUIRE(r.feasible);
  CHECK(3 * r.x[0] + 2 * r.x[1] >= 13);
  CHECK(r.x[0] + r.x[1] == 5);
}

TEST_CASE("integer solver against enumeration") {
  std::mt19937 rng(4);
  for (int it = 0; it < 300; ++it) {
    IlpProblem p;
    p.nvars = 1 + static_cast<int>(rng() % 3);
    int m = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < m; ++i) {
      LinCon c;
      for (int j = 0; j < p.nvars; ++j) c.a.push_back(static_cast<int>(rng() % 9) - 4);
      c.rel = static_cast<LinCon::Rel>(rng() % 3);
      c.rhs = static_cast<int>(rng() % 13) - 6;
      p.cons.push_back(c);
    }
    p.lower.assign(p.nvars, 0);
    p.upper.assign(p.nvars, 6);
    auto r = solve_ilp(p);
    // brute force
    std::int64_t best = -1;
    std::vector<std::int64_t> x(p.nvars, 0);
    while (true) {
      bool ok = true;
      for (const auto& c : p.cons) {
        std::int64_t s = 0;
        for (int j = 0; j < p.nvars; ++j) s += c.a[j] * x[j];
        ok = ok && (c.rel == LinCon::Le ? s <= c.rhs : c.rel == LinCon::Ge ? s >= c.rhs : s == c.rhs);
      }
      if (ok) {
        std::int64_t sum = 0;
        for (auto v : x) sum += v;
        if (best < 0 || sum < best) best = sum;
      }
      int j = 0;
      while (j < p.nvars && x[j] == 6) x[j++] = 0;
      if (j == p.nvars) break;
      ++x[j];
    }
    REQUIRE(r.feasible == (best >= 0));
    if (r.feasible) {
      std::int64_t sum = 0;
      for (auto v : r.x) sum += v;
      CHECK(sum == best);
    }
  }
}

TEST_CASE("simulation follows the post-update convention") {
  auto g = fixtures::guarded_example();
  auto r = simulate_path(g.cs, {0, 1, 2, 3, 4, 3, 4, 5, 6, 7});
  CHECK(r.ok());
  std::vector<std::int64_t> c;
  for (const auto& v : r.trace) c.push_back(v[0]);
  CHECK(c == std::vector<std::int64_t>{0, 0, -2, -4, -6, -5, -7, -6, -8, -7});
  CHECK(simulate(g.cs, {}).trace.size() == 1);

  // one trip around 3 4 and seven through 6 enter 7 with c = 0
  auto bad = simulate_path(g.cs, {0, 1, 2, 3, 4, 5, 6, 6, 6, 6, 6, 6, 6, 7});
  CHECK(bad.violation == 13);
  CHECK(bad.trace.back()[0] == 0);

  CounterSystem one;
  one.add_state("a");
  one.add_state("b");
  int x = one.add_counter("x");
  one.add_transition(0, {-1}, {{x, false}}, 1);
  one.add_transition(1, {0}, {}, 1);
  CHECK(simulate_path(one, {0, 1}).violation == 1);
  CHECK_THROWS_AS(simulate_path(one, {0, 0}), StepError);
}

TEST_CASE("guard-count coupling on the example system") {
  auto g = fixtures::guarded_example();
  auto r = aps_nonempty(g.cs, g.seg);
  REQUIRE(r.witness);
  CHECK(simulate_witness(g.cs, g.seg, *r.witness, 5).ok());
  // loop ids: 0 -> location 0, 1 -> locations 3 4, 2 -> location 6
  NonemptyOptions seven;
  seven.fixed = {{2, 7}};
  auto w = aps_nonempty(g.cs, g.seg, seven);
  REQUIRE(w.witness);
  CHECK(w.witness->counts[1] >= 2);
  CHECK(w.witness->counts[2] == 7);
  seven.fixed.push_back({1, 1});
  CHECK_FALSE(aps_nonempty(g.cs, g.seg, seven).witness);
}

TEST_CASE("small non-emptiness cases") {
  CounterSystem free;
  free.add_state("a");
  free.add_state("b");
  free.add_state("c");
  free.add_transition(0, {}, {}, 0);
  free.add_transition(0, {}, {}, 1);
  free.add_transition(1, {}, {}, 2);
  free.add_transition(2, {}, {}, 2);
  Segmentation s{{{true, 0, 0}, {false, 1, 1}, {true, 2, 2}}};
  auto r = aps_nonempty(free, s);
  REQUIRE(r.witness);
  CHECK(r.witness->counts == std::vector<std::int64_t>{1});

  CounterSystem dec;
  dec.add_state("a");
  int c = dec.add_counter("c");
  dec.add_transition(0, {-1}, {{c, false}}, 0);
  CHECK_FALSE(aps_nonempty(dec, Segmentation{{{true, 0, 0}}}).witness);

  CHECK_THROWS_AS(aps_nonempty(free, Segmentation{{{true, 0, 0}, {false, 1, 2}}}), NotSegmented);
}

namespace {

struct RandomSystem {
  CounterSystem cs;
  Segmentation seg;
};

RandomSystem random_system(std::mt19937& rng) {
  RandomSystem r;
  int ncomp = 2 + static_cast<int>(rng() % 4);
  int loops = 0;
  int l = 0;
  for (int k = 0; k < ncomp; ++k) {
    bool last = k + 1 == ncomp;
    bool loop = last || (loops < 3 && rng() % 2);
    if (loop && !last) ++loops;
    int len = 1 + static_cast<int>(rng() % (loop ? 3 : 2));
    r.seg.comps.push_back({loop, l, l + len - 1});
    l += len;
  }
  for (int i = 0; i < l; ++i) r.cs.add_state(std::to_string(i));
  int nc = 1 + static_cast<int>(rng() % 2);
  for (int c = 0; c < nc; ++c) r.cs.add_counter("c" + std::to_string(c));
  auto trans = [&](int a, int b) {
    std::vector<std::int64_t> u;
    std::vector<Guard> g;
    for (int c = 0; c < nc; ++c) {
      u.push_back(static_cast<int>(rng() % 7) - 3);
      if (rng() % 4 == 0) g.push_back({c, (rng() % 2) == 0});
    }
    r.cs.add_transition(a, u, g, b);
  };
  for (int i = 0; i + 1 < l; ++i) trans(i, i + 1);
  for (const auto& c : r.seg.comps)
    if (c.loop) trans(c.last, c.first);
  return r;
}

}  // namespace

TEST_CASE("non-emptiness agrees with enumeration") {
  std::mt19937 rng(9);
  int nonempty = 0;
  for (int it = 0; it < 400; ++it) {
    auto sys = random_system(rng);
    int m = sys.seg.loop_count();
    auto r = aps_nonempty(sys.cs, sys.seg);
    REQUIRE_FALSE(r.exhausted);
    bool brute = false;
    std::vector<std::int64_t> counts(m, 1);
    while (!brute) {
      brute = simulate_witness(sys.cs, sys.seg, GuardedRunWitness{counts}, 400).ok();
      int j = 0;
      while (j < m && counts[j] == 12) counts[j++] = 1;
      if (j == m) break;
      ++counts[j];
    }
    if (r.witness) {
      ++nonempty;
      CHECK(simulate_witness(sys.cs, sys.seg, *r.witness, 400).ok());
      bool small = std::all_of(r.witness->counts.begin(), r.witness->counts.end(), [](auto v) { return v <= 12; });
      if (small) CHECK(brute);
    } else {
      CHECK_FALSE(brute);
    }
  }
  CHECK(nonempty > 50);
}

TEST_CASE("fixed counts match full simulation") {
  std::mt19937 rng(21);
  for (int it = 0; it < 300; ++it) {
    auto sys = random_system(rng);
    int m = sys.seg.loop_count();
    NonemptyOptions opt;
    std::vector<std::int64_t> counts;
    for (int j = 0; j < m; ++j) {
      counts.push_back(1 + static_cast<int>(rng() % 9));
      opt.fixed.push_back({j, counts.back()});
    }
    bool solver = aps_nonempty(sys.cs, sys.seg, opt).witness.has_value();
    bool sim = simulate_witness(sys.cs, sys.seg, GuardedRunWitness{counts}, 400).ok();
    CHECK(solver == sim);
  }
}

TEST_CASE("sampled witnesses are valid") {
  auto g = fixtures::guarded_example();
  std::mt19937 rng(5);
  std::set<std::vector<std::int64_t>> seen;
  for (int i = 0; i < 10; ++i) {
    auto w = aps_sample(g.cs, g.seg, rng);
    REQUIRE(w);
    CHECK(simulate_witness(g.cs, g.seg, *w, 4).ok());
    seen.insert(w->counts);
  }
  CHECK(seen.size() > 1);
}
