#include <fstream>
#include <sstream>

#include "aps_util.hpp"
#include "doctest.h"
#include "fcl/aps.hpp"
#include "fixtures.hpp"

using namespace fcl;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParsedAps golden(const KripkeStructure& k) { return parse_aps(k, slurp(std::string(FCL_DATA_DIR) + "/guarded_cert.aps")); }

const FormulaPtr kUntil = parse_formula("r U{2/3} q");

}  // namespace

TEST_CASE("golden certificate verifies") {
  auto k = fixtures::example();
  auto g = golden(k);
  REQUIRE(g.formula);
  CHECK(aps_shape_problems(k, g.aps).empty());
  CHECK(g.aps.size() == 15);
  auto rep = check_consistency(k, g.aps, g.formula);
  CHECK_MESSAGE(rep.consistent(), rep.first_failure());
  CHECK(rep.at(kUntil, 1)->rule == "3c");
  CHECK(rep.at(kUntil, 1)->detail == "c");
  CHECK(rep.at(kUntil, 2)->rule == "3c");
  CHECK(rep.at(kUntil, 0)->rule == "3d");
  CHECK(rep.at(kUntil, 5)->rule == "3d");
  CHECK(rep.at(kUntil, 10)->rule == "3d");
  CHECK(rep.at(kUntil, 13)->rule == "3a");
  CHECK(g.aps.at(0).has(g.formula));

  auto cs = cs_of_aps(g.aps);
  auto seg = g.aps.segmentation();
  auto res = aps_nonempty(cs, seg);
  REQUIRE(res.witness);
  // loops: P0, P4, P7; the second and third must differ by 2 or 3
  std::int64_t d = res.witness->counts[2] - res.witness->counts[1];
  CHECK(d >= 2);
  CHECK(d <= 3);
  NonemptyOptions opt;
  opt.fixed = {{1, 5}, {2, 6}};
  CHECK_FALSE(aps_nonempty(cs, seg, opt).witness);
}

TEST_CASE("golden certificate labels agree with the oracle on sampled runs") {
  auto k = fixtures::example();
  auto g = golden(k);
  std::mt19937 rng(3);
  int runs = 0;
  CHECK(aps_util::label_mismatch(k, g.aps, g.formula, rng, 8, &runs) == "");
  CHECK(runs == 8);
}

TEST_CASE("certificate text round trip") {
  auto k = fixtures::example();
  auto g = golden(k);
  std::string text = aps_to_text(k, g.aps, g.formula);
  auto again = parse_aps(k, text);
  CHECK(aps_to_text(k, again.aps, again.formula) == text);
  CHECK(check_consistency(k, again.aps, again.formula).consistent());

  CHECK_THROWS_AS(parse_aps(k, "aps 2\n"), ApsError);
  CHECK_THROWS_AS(parse_aps(k, "aps 1\nloop\n  state=s9 type=L\n"), ApsError);
  CHECK_THROWS_AS(parse_aps(k, "aps 1\nloop\n  state=s0 guards={z<0} type=L\n"), ApsError);
  CHECK_THROWS_AS(parse_aps(k, "aps 1\nloop\n  state=s0 labels={p U{1/2 q} type=L\n"), ApsError);
}

TEST_CASE("mutations are detected") {
  auto k = fixtures::example();
  auto g = golden(k);
  SUBCASE("dropping the negative guard on the first q location") {
    g.aps.at(13).guards.erase(0);
    auto rep = check_consistency(k, g.aps, g.formula);
    CHECK_FALSE(rep.at(kUntil, 1)->ok);
    CHECK_FALSE(rep.consistent());
  }
  SUBCASE("labelling location 0 with the until formula") {
    g.aps.at(0).add(kUntil);
    g.aps.at(0).remove(g.formula);
    CHECK_FALSE(check_consistency(k, g.aps, g.formula).consistent());
  }
  SUBCASE("an atom label that the state lacks") {
    g.aps.at(3).add(parse_formula("r"));
    auto rep = check_consistency(k, g.aps, g.formula);
    CHECK(rep.at(parse_formula("r"), 3)->ok == false);
  }
  SUBCASE("final component a row") {
    g.aps.comps.back().loop = false;
    CHECK_FALSE(aps_shape_problems(k, g.aps).empty());
  }
}

TEST_CASE("local cases") {
  auto k = fixtures::example();
  Aps p;
  auto add = [&](bool loop, std::vector<std::string> states) {
    ApsComponent c{loop, {}};
    for (const auto& s : states) {
      AugState a;
      a.state = k.index_of(s);
      a.loop_type = loop;
      if (k.has_label(a.state, "q")) a.add(parse_formula("q"));
      c.states.push_back(a);
    }
    p.comps.push_back(c);
  };
  add(false, {"s4"});
  add(true, {"s5"});
  auto f = parse_formula("true U q");
  for (int l = 0; l < 2; ++l) p.at(l).add(f);
  // a neutral final loop does not witness the row location
  CHECK_FALSE(check_consistency(k, p, f).at(f, 0)->ok);
  int c = p.add_counter("c");
  p.at(1).guards[c] = false;
  auto rep = check_consistency(k, p, f);
  CHECK_MESSAGE(rep.consistent(), rep.first_failure());
  CHECK(rep.at(f, 0)->rule == "3c");
  CHECK(rep.at(f, 1)->rule == "3a");

  auto xq = parse_formula("X q");
  p.at(0).add(xq);
  CHECK_FALSE(check_consistency(k, p, xq).consistent());
  p.at(1).add(xq);
  CHECK(check_consistency(k, p, xq).consistent());

  // the strict subformula must be consistent first
  p.at(0).add(parse_formula("q"));
  auto rep2 = check_consistency(k, p, xq);
  CHECK_FALSE(rep2.at(xq, 1)->ok);
  CHECK(rep2.at(xq, 1)->detail.find("strict subformula") != std::string::npos);
}

TEST_CASE("transforms") {
  auto k = fixtures::example();
  auto g = golden(k);
  auto r = unfold_right(g.aps, 4);
  CHECK(r.size() == 17);
  CHECK(r.comps[5].states[0].state == g.aps.comps[4].states[0].state);
  CHECK_FALSE(r.comps[5].loop);
  CHECK(r.at(9).state == g.aps.at(7).state);
  auto c = cut(g.aps, 7);
  CHECK_FALSE(c.comps[7].loop);
  CHECK_FALSE(c.comps[7].states[0].loop_type);
  CHECK_THROWS_AS(cut(g.aps, 1), ApsError);
  CHECK_THROWS_AS(cut(g.aps, 11), ApsError);
  CHECK(unfold_left(g.aps, 11).comp_count() == 13);
  CHECK(duplicate(g.aps, 4).comps[5].loop);
  for (const auto& q : {r, c, unfold_left(g.aps, 0), duplicate(g.aps, 7), unfold_left(g.aps, 11)}) {
    CHECK(aps_shape_problems(k, q).empty());
    auto rep = check_consistency(k, q, g.formula);
    CHECK_MESSAGE(rep.consistent(), rep.first_failure());
  }
}

TEST_CASE("counter system of an aps") {
  auto k = fixtures::example();
  Aps p;
  AugState a;
  a.state = k.index_of("s5");
  a.loop_type = true;
  p.comps.push_back({true, {a}});
  auto cs = cs_of_aps(p);
  CHECK(cs.size() == 1);
  REQUIRE(cs.transitions().size() == 1);
  CHECK(cs.transitions()[0].src == 0);
  CHECK(cs.transitions()[0].dst == 0);

  auto g = golden(k);
  auto big = cs_of_aps(g.aps);
  CHECK(big.size() == 15);
  CHECK(big.transitions().size() == 14 + 4);
}

TEST_CASE("frequency until truth on a lasso") {
  // p p !p | q, ratio 2/3
  std::vector<char> phi = {1, 1, 0, 0}, psi = {0, 0, 0, 1};
  auto t = freq_until_truth(phi, psi, 3, Ratio{2, 3});
  CHECK(t == std::vector<char>{1, 0, 0, 1});
  // loop of p only, never psi
  auto t2 = freq_until_truth({1}, {0}, 0, Ratio{1, 2});
  CHECK(t2 == std::vector<char>{0});
}
