#include "fcl/fctl.hpp"

#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace fcl {

namespace {

bool temporal(Op op) { return op == Op::Next || op == Op::Until || op == Op::FreqUntil; }

std::int64_t weight(const StateSet& phi, const Ratio& r, int s) { return phi[s] ? r.den - r.num : -r.num; }

CounterSystem hat_states(const KripkeStructure& k, int s) {
  CounterSystem cs;
  for (int t = 0; t < k.size(); ++t) cs.add_state(k.name(t));
  cs.add_counter("c");
  cs.set_initial(s);
  return cs;
}

bool e_until_direct(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s) {
  const int n = k.size();
  // states that can still reach psi
  std::vector<std::vector<int>> pred(n);
  for (int t = 0; t < n; ++t)
    for (int u : k.succ(t)) pred[u].push_back(t);
  std::vector<char> useful(n, 0);
  std::vector<int> st;
  for (int t = 0; t < n; ++t)
    if (psi[t]) {
      useful[t] = 1;
      st.push_back(t);
    }
  while (!st.empty()) {
    int t = st.back();
    st.pop_back();
    for (int u : pred[t])
      if (!useful[u]) {
        useful[u] = 1;
        st.push_back(u);
      }
  }
  if (!useful[s]) return false;
  // longest balance from s; an improvement in round n means a positive cycle on the way to psi
  constexpr std::int64_t none = std::numeric_limits<std::int64_t>::min();
  std::vector<std::int64_t> best(n, none);
  best[s] = 0;
  for (int round = 0; round <= n; ++round) {
    bool changed = false;
    for (int t = 0; t < n; ++t) {
      if (best[t] == none || !useful[t]) continue;
      for (int u : k.succ(t)) {
        if (!useful[u]) continue;
        std::int64_t v = best[t] + weight(phi, r, t);
        if (v > best[u]) {
          best[u] = v;
          changed = true;
        }
      }
    }
    if (!changed) break;
    if (round == n) return true;
  }
  for (int t = 0; t < n; ++t)
    if (psi[t] && best[t] != none && best[t] >= 0) return true;
  return false;
}

}  // namespace

CounterSystem build_hat(const KripkeStructure& k, const StateSet& phi, const Ratio& r, int s) {
  CounterSystem cs = hat_states(k, s);
  for (int t = 0; t < k.size(); ++t)
    for (int u : k.succ(t)) cs.add_transition(t, {weight(phi, r, t)}, {}, u);
  return cs;
}

CounterSystem build_r(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s) {
  CounterSystem cs = hat_states(k, s);
  for (int t = 0; t < k.size(); ++t)
    for (int u : k.succ(t)) {
      std::vector<Guard> g;
      if (psi[u]) g.push_back({0, true});
      cs.add_transition(t, {weight(phi, r, t)}, g, u);
    }
  return cs;
}

CounterSystem build_u(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s) {
  CounterSystem cs = build_hat(k, phi, r, s);
  int sink = cs.add_state("#sink");
  for (int t = 0; t < k.size(); ++t)
    if (psi[t]) cs.add_transition(t, {0}, {{0, false}}, sink);
  cs.add_transition(sink, {0}, {}, sink);
  return cs;
}

bool check_a_until(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s,
                   RrMethod method) {
  if (psi[s]) return true;
  return !repeated_reachability(build_r(k, phi, psi, r, s), s, {}, method).found;
}

bool check_e_until(const KripkeStructure& k, const StateSet& phi, const StateSet& psi, const Ratio& r, int s,
                   RrMethod method) {
  if (psi[s]) return true;
  if (method == RrMethod::Direct) return e_until_direct(k, phi, psi, r, s);
  CounterSystem u = build_u(k, phi, psi, r, s);
  StateSet acc(u.size(), 0);
  acc[k.size()] = 1;
  return repeated_reachability(u, s, acc, RrMethod::Stack).found;
}

const StateSet* LabelTable::find(const FormulaPtr& f) const {
  for (std::size_t i = 0; i < formulas.size(); ++i)
    if (formulas[i]->key == f->key) return &sets[i];
  return nullptr;
}

std::string LabelTable::to_text(const KripkeStructure& k) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    os << to_string(formulas[i]) << " : {";
    bool first = true;
    for (int s = 0; s < k.size(); ++s)
      if (sets[i][s]) {
        os << (first ? "" : ", ") << k.name(s);
        first = false;
      }
    os << "}\n";
  }
  return os.str();
}

void require_fctl(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True:
    case Op::Atom:
      return;
    case Op::And:
    case Op::Not:
      for (const auto& c : f->kids) require_fctl(c);
      return;
    case Op::Exists: {
      auto body = strip_not(f->kid(), nullptr);
      if (temporal(body->op))
        for (const auto& c : body->kids) require_fctl(c);
      else
        require_fctl(body);
      return;
    }
    case Op::Next:
    case Op::Until:
    case Op::FreqUntil:
      throw FragmentError("temporal operator outside a path quantifier: " + to_string(f));
    case Op::Bind:
    case Op::Compare:
      throw FragmentError("counting constraints are not supported by the labelling algorithm: " + to_string(f));
  }
}

FctlResult model_check_fctl(const KripkeStructure& k, const FormulaPtr& f, RrMethod method) {
  require_fctl(f);
  const int n = k.size();
  FctlResult res;
  std::map<std::string, StateSet> memo;
  auto complement = [](StateSet s) {
    for (auto& c : s) c = !c;
    return s;
  };

  std::function<StateSet(const FormulaPtr&)> label;
  // A/E over a temporal body whose operands are state formulas
  auto quantified = [&](const FormulaPtr& body, bool universal) {
    StateSet out(n, 0);
    if (body->op == Op::Next) {
      StateSet a = label(body->kid());
      for (int s = 0; s < n; ++s) {
        bool any = false, all = true;
        for (int t : k.succ(s)) {
          any = any || a[t];
          all = all && a[t];
        }
        out[s] = universal ? all : any;
      }
    } else if (body->op == Op::Until) {
      StateSet a = label(body->kid(0)), b = label(body->kid(1));
      out = b;
      for (bool changed = true; changed;) {
        changed = false;
        for (int s = 0; s < n; ++s) {
          if (out[s] || !a[s]) continue;
          bool any = false, all = true;
          for (int t : k.succ(s)) {
            any = any || out[t];
            all = all && out[t];
          }
          if (universal ? all : any) {
            out[s] = 1;
            changed = true;
          }
        }
      }
    } else {
      StateSet a = label(body->kid(0)), b = label(body->kid(1));
      for (int s = 0; s < n; ++s)
        out[s] = universal ? check_a_until(k, a, b, body->ratio, s, method)
                           : check_e_until(k, a, b, body->ratio, s, method);
    }
    return out;
  };

  label = [&](const FormulaPtr& g) -> StateSet {
    auto it = memo.find(g->key);
    if (it != memo.end()) return it->second;
    StateSet out(n, 0);
    switch (g->op) {
      case Op::True:
        out.assign(n, 1);
        break;
      case Op::Atom:
        for (int s = 0; s < n; ++s) out[s] = k.has_label(s, g->name);
        break;
      case Op::And: {
        StateSet a = label(g->kid(0)), b = label(g->kid(1));
        for (int s = 0; s < n; ++s) out[s] = a[s] && b[s];
        break;
      }
      case Op::Not:
        out = complement(label(g->kid()));
        break;
      case Op::Exists: {
        int negs = 0;
        auto body = strip_not(g->kid(), &negs);
        if (!temporal(body->op)) {
          out = label(g->kid());
        } else if (negs % 2 == 0) {
          out = quantified(body, false);
        } else {
          out = complement(quantified(body, true));
        }
        break;
      }
      default:
        throw FragmentError("unexpected operator in state position: " + to_string(g));
    }
    memo[g->key] = out;
    res.table.formulas.push_back(g);
    res.table.sets.push_back(out);
    return out;
  };

  StateSet top = label(f);
  res.holds = k.initial() >= 0 && top[k.initial()];
  return res;
}

}  // namespace fcl
