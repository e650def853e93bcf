#include "fcl/ph.hpp"

namespace fcl {

namespace {

std::string z(int i) { return "z" + std::to_string(i); }

Term ticks(std::int64_t a, int i) { return Term{a, z(i), mk_true()}; }

// A variable x stands for the distance between the positions of z_{Z(x)-1} and z_{Z(x)}.
struct Translator {
  using Slots = std::map<std::string, int>;

  int slot(const Slots& s, const std::string& x) const {
    auto it = s.find(x);
    return it == s.end() ? 1 : it->second;
  }

  // lhs and rhs of a natural comparison, each variable split into two tick counts
  void place(const PhTerm& t, bool left, const Slots& s, std::vector<Term>& lhs, std::vector<Term>& rhs) const {
    auto& same = left ? lhs : rhs;
    auto& other = left ? rhs : lhs;
    if (t.constant != 0) same.push_back(Term{t.constant, "", nullptr});
    for (const auto& [a, x] : t.vars) {
      int k = slot(s, x);
      same.push_back(ticks(a, k - 1));
      other.push_back(ticks(a, k));
    }
  }

  FormulaPtr run(const PhPtr& f, const Slots& s, int i) const {
    switch (f->op) {
      case PhOp::Le: {
        std::vector<Term> lhs, rhs;
        place(f->lhs, true, s, lhs, rhs);
        place(f->rhs, false, s, lhs, rhs);
        return mk_compare(lhs, rhs);
      }
      case PhOp::Not:
        return mk_not(run(f->kids[0], s, i));
      case PhOp::And:
        return mk_and(run(f->kids[0], s, i), run(f->kids[1], s, i));
      case PhOp::Exists: {
        Slots t = s;
        t[f->var] = i;
        return mk_finally(mk_bind(z(i), run(f->kids[0], t, i + 1)));
      }
      case PhOp::Count: {
        Slots t = s;
        t[f->var] = i;
        FormulaPtr counted = mk_bind(z(i), run(f->kids[0], t, i + 1));
        int k = slot(s, f->count);
        Term hits{1, z(i - 1), counted};
        FormulaPtr up = mk_compare({ticks(1, k - 1)}, {ticks(1, k), hits});
        FormulaPtr down = mk_compare({ticks(1, k), hits}, {ticks(1, k - 1)});
        return mk_finally(mk_globally(mk_and(up, down)));
      }
      case PhOp::Pred:
        throw PhError("expand predicate " + f->name + " before translating to CLTL");
    }
    throw PhError("unknown PH node");
  }
};

}  // namespace

CltlTranslation translate_ph_to_cltl(const PhPtr& closed) {
  auto fv = ph_free_vars(closed);
  if (!fv.empty()) throw PhError("PH formula is not closed: " + *fv.begin() + " is free");
  CltlTranslation out;
  int u = out.k.add_state("u");
  out.k.add_edge(u, u);
  out.k.set_initial(u);
  out.formula = mk_bind(z(0), Translator{}.run(closed, {}, 1));
  return out;
}

}  // namespace fcl
