#include <sstream>

#include "fcl/aps.hpp"

namespace fcl {

bool ConsistencyReport::consistent() const {
  for (const auto& row : verdicts)
    for (const auto& v : row)
      if (!v.ok) return false;
  return true;
}

bool ConsistencyReport::consistent_for(const FormulaPtr& f) const {
  for (std::size_t i = 0; i < formulas.size(); ++i)
    if (formulas[i]->key == f->key) {
      for (const auto& v : verdicts[i])
        if (!v.ok) return false;
      return true;
    }
  return false;
}

const LocationVerdict* ConsistencyReport::at(const FormulaPtr& f, int l) const {
  for (std::size_t i = 0; i < formulas.size(); ++i)
    if (formulas[i]->key == f->key) return &verdicts[i].at(l);
  return nullptr;
}

std::string ConsistencyReport::first_failure() const {
  for (std::size_t i = 0; i < formulas.size(); ++i)
    for (std::size_t l = 0; l < verdicts[i].size(); ++l)
      if (!verdicts[i][l].ok) {
        std::ostringstream os;
        os << "location " << l << " is inconsistent for " << to_string(formulas[i]) << ": " << verdicts[i][l].detail;
        return os.str();
      }
  return "";
}

namespace {

struct Checker {
  const KripkeStructure& k;
  const Aps& p;
  int size;
  int last_comp;
  std::vector<int> comp, first;

  Checker(const KripkeStructure& k_, const Aps& p_) : k(k_), p(p_), size(p_.size()), last_comp(p_.comp_count() - 1) {
    for (int c = 0; c < p.comp_count(); ++c) {
      first.push_back(static_cast<int>(comp.size()));
      for (int i = 0; i < p.comps[c].size(); ++i) comp.push_back(c);
    }
  }

  const AugState& at(int l) const { return p.comps[comp[l]].states[l - first[comp[l]]]; }

  std::vector<LocationVerdict> local(const FormulaPtr& f) const {
    std::vector<LocationVerdict> out(size);
    switch (f->op) {
      case Op::True:
        for (auto& v : out) v = {true, "1", ""};
        break;
      case Op::Atom:
        for (int l = 0; l < size; ++l) {
          bool lab = at(l).has(f), real = k.has_label(at(l).state, f->name);
          out[l] = lab == real ? LocationVerdict{true, "1", ""}
                               : LocationVerdict{false, "", lab ? "labelled but the state lacks the proposition"
                                                                : "state carries the proposition but is unlabelled"};
        }
        break;
      case Op::And:
        for (int l = 0; l < size; ++l) {
          bool want = at(l).has(f->kid(0)) && at(l).has(f->kid(1));
          out[l] = want == at(l).has(f) ? LocationVerdict{true, "1", ""}
                                        : LocationVerdict{false, "", "label disagrees with the conjuncts"};
        }
        break;
      case Op::Not:
        for (int l = 0; l < size; ++l) {
          bool want = !at(l).has(f->kid());
          out[l] = want == at(l).has(f) ? LocationVerdict{true, "1", ""}
                                        : LocationVerdict{false, "", "label disagrees with the negated formula"};
        }
        break;
      case Op::Next:
        for (int l = 0; l < size; ++l) {
          bool ok = true;
          for (int m : p.succ(l)) ok = ok && (at(l).has(f) == at(m).has(f->kid()));
          out[l] = ok ? LocationVerdict{true, "2", ""}
                      : LocationVerdict{false, "", "a successor disagrees with the next label"};
        }
        break;
      case Op::Until:
      case Op::FreqUntil:
        until(f, out);
        break;
      default:
        throw ApsError("formula outside the linear fragment: " + to_string(f));
    }
    return out;
  }

  std::int64_t bal(int c, const FormulaPtr& phi, const Ratio& r) const {
    return component_balance(p.comps[c], phi, r);
  }

  bool periodic(int a, int b, const FormulaPtr& f) const {
    const FormulaPtr set[3] = {f->kid(0), f->kid(1), f};
    for (int c = a; c < b; ++c) {
      const auto& x = p.comps[c];
      const auto& y = p.comps[c + 1];
      if (x.size() != y.size()) return false;
      for (int i = 0; i < x.size(); ++i)
        for (const auto& g : set)
          if (x.states[i].has(g) != y.states[i].has(g)) return false;
    }
    return true;
  }

  std::string counter_case(const FormulaPtr& f, int l) const {
    const Ratio r = until_ratio(f);
    const auto& phi = f->kid(0);
    const auto& psi = f->kid(1);
    bool in = at(l).has(f);
    if (!in && at(l).has(psi)) return "";
    for (int c = 0; c < static_cast<int>(p.counters.size()); ++c) {
      bool ok = true;
      for (int m = 0; m < l && ok; ++m) ok = at(m).update(c) == 0;
      for (int m = l; m < size && ok; ++m) ok = at(m).update(c) == (at(m).has(phi) ? r.den - r.num : -r.num);
      if (!ok) continue;
      if (!in) {
        for (int m = l + 1; m < size && ok; ++m) {
          if (!at(m).has(psi)) continue;
          auto g = at(m).guards.find(c);
          ok = g != at(m).guards.end() && g->second;
        }
      } else {
        ok = false;
        for (int m = l + 1; m < size && !ok; ++m) {
          if (!at(m).has(psi)) continue;
          auto g = at(m).guards.find(c);
          ok = g != at(m).guards.end() && !g->second;
        }
      }
      if (ok) return p.counters[c];
    }
    return "";
  }

  void until(const FormulaPtr& f, std::vector<LocationVerdict>& out) const {
    const Ratio r = until_ratio(f);
    const auto& phi = f->kid(0);
    const auto& psi = f->kid(1);
    const auto& fin = p.comps[last_comp];
    bool final_good = bal(last_comp, phi, r) > 0;
    bool final_psi = false;
    for (const auto& a : fin.states) final_psi = final_psi || a.has(psi);

    for (int l = 0; l < size; ++l) {
      bool in = at(l).has(f);
      if (in && at(l).has(psi)) {
        out[l] = {true, "3a", ""};
      } else if (in && final_good && final_psi) {
        out[l] = {true, "3b", ""};
      } else if (!at(l).loop_type) {
        std::string c = counter_case(f, l);
        if (!c.empty()) out[l] = {true, "3c", c};
      }
    }
    // periodic delegation: least fixpoint over fully consistent components
    auto full = [&](int c) {
      for (int i = 0; i < p.comps[c].size(); ++i)
        if (!out[first[c] + i].ok) return false;
      return true;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (int l = 0; l < size; ++l) {
        if (out[l].ok) continue;
        int c = comp[l];
        bool in = at(l).has(f);
        std::int64_t b = bal(c, phi, r);
        int ref = -1;
        if (c == last_comp) {
          for (int c2 = 0; c2 < c && ref < 0; ++c2)
            if (full(c2) && periodic(c2, c, f)) ref = c2;
        } else if ((b >= 0 && !in) || (b < 0 && in)) {
          for (int c2 = 0; c2 < c && ref < 0; ++c2)
            if (full(c2) && periodic(c2, c + 1, f)) ref = c2;
        } else {
          for (int c2 = c + 1; c2 < last_comp && ref < 0; ++c2)
            if (full(c2) && periodic(c, c2 + 1, f)) ref = c2;
        }
        // copies of the final loop read the same suffix as the final loop itself
        if (ref < 0 && c != last_comp && full(last_comp) && periodic(c, last_comp, f)) ref = last_comp;
        if (ref >= 0) {
          out[l] = {true, "3d", "component " + std::to_string(ref)};
          changed = true;
        }
      }
    }
    for (int l = 0; l < size; ++l)
      if (!out[l].ok) out[l].detail = in_reason(f, l);
  }

  std::string in_reason(const FormulaPtr& f, int l) const {
    if (at(l).has(f)) return "labelled, but no witness location, good final loop or periodic delegation applies";
    if (at(l).has(f->kid(1))) return "unlabelled although the right operand holds";
    return "unlabelled, but no counter guards the later right-operand locations and no periodic delegation applies";
  }
};

}  // namespace

ConsistencyReport check_consistency(const KripkeStructure& k, const Aps& p, const FormulaPtr& f) {
  ConsistencyReport rep;
  Checker ch(k, p);
  rep.formulas = subformulae(f);
  std::map<std::string, bool> full;
  for (const auto& g : rep.formulas) {
    std::vector<LocationVerdict> v = ch.local(g);
    std::string bad_kid;
    for (const auto& kid : g->kids)
      if (!full.at(kid->key)) bad_kid = to_string(kid);
    if (!bad_kid.empty())
      for (auto& x : v) x = {false, "", "strict subformula " + bad_kid + " is inconsistent"};
    bool all = true;
    for (const auto& x : v) all = all && x.ok;
    full[g->key] = all;
    rep.verdicts.push_back(std::move(v));
  }
  return rep;
}

}  // namespace fcl
