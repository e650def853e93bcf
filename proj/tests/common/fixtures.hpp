#pragma once

#include "fcl/countersys.hpp"
#include "fcl/model.hpp"

namespace fixtures {

inline const char* kExample = R"(
state s0 label p init
state s1
state s2
state s3 label r
state s4 label r
state s5 label q
edge s0 -> s0
edge s0 -> s1
edge s0 -> s2
edge s1 -> s2
edge s2 -> s3
edge s3 -> s2
edge s2 -> s4
edge s4 -> s4
edge s4 -> s5
edge s5 -> s5
)";

inline fcl::KripkeStructure example() { return fcl::parse_kripke(kExample).ks; }

// Nine locations over s0 s0 s0 (s2 s3) s2 s4 s5 s5 with one balance counter started at
// location 1 for r U{2/3} q; q-locations 7 and 8 require c < 0.
struct GuardedSystem {
  fcl::CounterSystem cs;
  fcl::Segmentation seg;
};

inline GuardedSystem guarded_example() {
  GuardedSystem g;
  for (int l = 0; l < 9; ++l) g.cs.add_state(std::to_string(l));
  int c = g.cs.add_counter("c");
  const std::int64_t u[9] = {0, -2, -2, -2, 1, -2, 1, -2, -2};
  auto guards = [&](int dst) {
    return dst >= 7 ? std::vector<fcl::Guard>{{c, true}} : std::vector<fcl::Guard>{};
  };
  for (int l = 0; l < 8; ++l) g.cs.add_transition(l, {u[l]}, guards(l + 1), l + 1);
  g.cs.add_transition(0, {u[0]}, guards(0), 0);
  g.cs.add_transition(4, {u[4]}, guards(3), 3);
  g.cs.add_transition(6, {u[6]}, guards(6), 6);
  g.cs.add_transition(8, {u[8]}, guards(8), 8);
  g.seg.comps = {{true, 0, 0}, {false, 1, 1}, {false, 2, 2}, {true, 3, 4},
                 {false, 5, 5}, {true, 6, 6}, {false, 7, 7}, {true, 8, 8}};
  return g;
}

}  // namespace fixtures
