#pragma once

// Randomized property cases shared by the unit tests and the acceptance binary.
// Each returns an empty string on success and a description of the failure otherwise.

#include <optional>
#include <set>
#include <string>

#include "fcl/fltlflat.hpp"
#include "gen.hpp"

namespace props {

struct Instance {
  fcl::KripkeStructure k;
  fcl::PathSchemaSkeleton sk;
  std::vector<long long> counts;
};

inline Instance random_instance(gen::Rng& rng, int max_count) {
  Instance in;
  in.k = gen::pick(rng, 2) ? gen::random_flat(rng, 2 + gen::pick(rng, 5)) : gen::random_loop_chain(rng, 2 + gen::pick(rng, 3));
  auto sks = fcl::enumerate_path_schemas(in.k);
  in.sk = sks[gen::pick(rng, static_cast<int>(sks.size()))];
  for (int i = 0; i < in.sk.loop_count(); ++i) in.counts.push_back(1 + gen::pick(rng, max_count));
  return in;
}

// The certificate construction terminates within budget, keeps the run and labels the formula correctly.
inline std::string construction_case(gen::Rng& rng, int max_count) {
  using namespace fcl;
  Instance in = random_instance(rng, max_count);
  auto f = gen::random_fltl(rng, 3, 4);
  auto where = [&] { return to_string(f) + "\n" + in.k.to_text() + skeleton_to_string(in.k, in.sk); };
  try {
    SizeBudget budget(in.k, f);
    Build b = build_certificate(in.k, in.sk, in.counts, f, &budget);
    LassoRun run = instantiate(in.sk, in.counts);
    if (!gen::same_word(project(b.aps, b.run), run)) return "run not preserved: " + where();
    auto rep = check_consistency(in.k, b.aps, f);
    if (!rep.consistent()) return "inconsistent: " + rep.first_failure() + "\n" + where();
    bool truth = eval_linear(in.k, run, f, 0, {}, fltl_sufficient_horizon(run, f)) == Verdict::True;
    if (truth != b.aps.at(0).has(f)) return "initial label disagrees with the oracle: " + where();
  } catch (const std::exception& e) {
    return std::string("construction threw: ") + e.what() + "\n" + where();
  }
  return "";
}

struct Outcome {
  bool applicable = false;
  std::string failure;
};

// Decomposes an unstable non-final loop and checks that the until formula is periodic on both surviving loops.
inline Outcome decomposition_case(gen::Rng& rng) {
  using namespace fcl;
  Outcome out;
  // entry, a loop mixing p and !p, a tail where q may occur, and a final self-loop
  KripkeStructure k;
  // the tail's p density opposes the loop's so that truth flips a few iterations before the exit
  bool dense_loop = gen::pick(rng, 2) == 0;
  std::bernoulli_distribution loop_p(dense_loop ? 0.8 : 0.2), tail_p(dense_loop ? 0.1 : 0.9), half(0.5), rare(0.1);
  auto add = [&](bool p, bool q) {
    std::set<std::string> l;
    if (p) l.insert("p");
    if (q) l.insert("q");
    if (half(rng)) l.insert("r");
    k.add_state("s" + std::to_string(k.size()), l);
    return k.size() - 1;
  };
  int entry = add(half(rng), rare(rng));
  int loop_len = 1 + gen::pick(rng, 3), first = k.size();
  for (int i = 0; i < loop_len; ++i) add(loop_p(rng), rare(rng));
  int tail = 2 + gen::pick(rng, 8), tail0 = k.size();
  for (int i = 0; i < tail; ++i) add(tail_p(rng), i + 1 == tail || rare(rng));
  k.add_edge(entry, first);
  for (int i = first; i + 1 < tail0; ++i) k.add_edge(i, i + 1);
  k.add_edge(tail0 - 1, first);
  k.add_edge(first + gen::pick(rng, loop_len), tail0);
  for (int i = tail0; i + 1 < k.size(); ++i) k.add_edge(i, i + 1);
  k.add_edge(k.size() - 1, k.size() - 1);
  k.set_initial(entry);
  PathSchemaSkeleton sk;
  for (const auto& s : enumerate_path_schemas(k))
    if (s.loop_count() == 1) sk = s;
  if (sk.loop_count() != 1) return out;
  Ratio ratio;
  ratio.den = 2 + gen::pick(rng, 3);
  ratio.num = 1 + gen::pick(rng, static_cast<int>(ratio.den) - 1);
  auto f = mk_freq_until(gen::pick(rng, 4) ? mk_atom("p") : gen::random_atom(rng), ratio,
                         gen::pick(rng, 4) ? mk_atom("q") : gen::random_atom(rng));
  const Ratio r = until_ratio(f);
  std::vector<long long> counts;
  for (int i = 0; i < sk.loop_count(); ++i) counts.push_back(1 + gen::pick(rng, 12));
  Build b = base_schema_from_run(k, sk, counts);
  std::vector<int> loops;
  for (int c = 0; c + 1 < b.aps.comp_count(); ++c)
    if (b.aps.comps[c].loop) loops.push_back(c);
  if (loops.empty()) return out;
  int c = loops[gen::pick(rng, static_cast<int>(loops.size()))];
  const std::int64_t len = b.aps.comps[c].size();
  const std::int64_t nhat = len * r.den;
  b.run.counts[c] = nhat + 2 + gen::pick(rng, 10);

  LassoRun before = project(b.aps, b.run);
  std::int64_t u = 0;
  for (int j = 0; j < c; ++j) u += b.aps.comps[j].size() * (b.aps.comps[j].loop ? b.run.counts[j] : 1);
  long long h = fltl_sufficient_horizon(before, f);
  auto truth = [&](const LassoRun& w, std::int64_t i) { return eval_linear(k, w, f, i, {}, h); };
  // only loops whose truth actually varies between iterations count
  bool unstable = false;
  for (std::int64_t i = u; i + len < u + b.run.counts[c] * len && !unstable; ++i)
    if (truth(before, i) != truth(before, i + len)) unstable = true;
  if (!unstable) return out;
  out.applicable = true;

  Decomposition d = decompose_unstable(b.aps, c, f, b.run);
  LassoRun after = project(d.aps, d.run);
  if (!gen::same_word(before, after)) {
    out.failure = "decomposition changed the run";
    return out;
  }
  std::int64_t second = u + (d.n1 + d.nhat) * len;
  auto check = [&](std::int64_t from, std::int64_t iters, const char* which) {
    for (std::int64_t i = from; i + len < from + iters * len; ++i) {
      Verdict a = truth(after, i), z = truth(after, i + len);
      if (a == Verdict::Unknown || a != z) {
        out.failure = std::string(which) + " loop not periodic at position " + std::to_string(i) + " for " +
                      to_string(f) + " (n=" + std::to_string(b.run.counts[c]) + ", n1=" + std::to_string(d.n1) + ")\n" +
                      k.to_text() + skeleton_to_string(k, sk);
        return false;
      }
    }
    return true;
  };
  if (check(u, d.n1, "first")) check(second, d.n2, "second");
  return out;
}

// Maps a location of the transformed schema to the location it copies.
inline int origin(const fcl::Aps& before, const fcl::Aps& after, int kind, int comp, int loc) {
  int ac = 0, off = loc;
  while (off >= after.comps[ac].size()) off -= after.comps[ac++].size();
  int bc = kind == 0 || ac <= comp ? ac : ac - 1;
  int base = 0;
  for (int j = 0; j < bc; ++j) base += before.comps[j].size();
  return base + off;
}

// Applies a random cut/unfold/duplicate to a constructed certificate; no verdict that was consistent may fail.
inline Outcome transform_case(gen::Rng& rng) {
  using namespace fcl;
  Outcome out;
  Instance in = random_instance(rng, 6);
  auto f = gen::random_fltl(rng, 3, 4);
  Build b;
  try {
    b = build_certificate(in.k, in.sk, in.counts, f);
  } catch (const std::exception&) {
    return out;
  }
  const Aps& p = b.aps;
  int kind = gen::pick(rng, 4);  // 0 cut, 1 unfold_left, 2 unfold_right, 3 duplicate
  std::vector<int> comps;
  for (int c = 0; c < p.comp_count(); ++c) {
    bool last = c + 1 == p.comp_count();
    if (!p.comps[c].loop) continue;
    if ((kind == 0 || kind == 2) && last) continue;
    comps.push_back(c);
  }
  if (comps.empty()) return out;
  int c = comps[gen::pick(rng, static_cast<int>(comps.size()))];
  Aps q;
  static const char* names[] = {"cut", "unfold_left", "unfold_right", "duplicate"};
  switch (kind) {
    case 0: q = cut(p, c); break;
    case 1: q = unfold_left(p, c); break;
    case 2: q = unfold_right(p, c); break;
    default: q = duplicate(p, c); break;
  }
  out.applicable = true;
  auto rb = check_consistency(in.k, p, f);
  auto ra = check_consistency(in.k, q, f);
  for (const auto& g : rb.formulas)
    for (int l = 0; l < q.size(); ++l) {
      int o = origin(p, q, kind, c, l);
      if (rb.at(g, o)->ok && !ra.at(g, l)->ok) {
        out.failure = std::string(names[kind]) + " of component " + std::to_string(c) + ": " + to_string(g) +
                      " at location " + std::to_string(l) + " (from " +
                      std::to_string(o) + " by " + rb.at(g, o)->rule + ", " + std::to_string(p.comp_count()) +
                      " components) degraded: " + ra.at(g, l)->detail;
        return out;
      }
    }
  return out;
}

}  // namespace props
