#include "fcl/ilp.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace fcl {

namespace {

using Q = boost::multiprecision::cpp_rational;

struct Lp {
  // rows: a . x (rel) b with x >= 0
  std::vector<std::vector<Q>> a;
  std::vector<LinCon::Rel> rel;
  std::vector<Q> b;
  std::vector<Q> c;  // minimise
};

struct LpOut {
  bool feasible = false;
  std::vector<Q> x;
  Q value;
};

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), t_(rows + 1, std::vector<Q>(cols + 1)), basis_(rows, -1) {}

  Q& at(int i, int j) { return t_[i][j]; }
  Q& rhs(int i) { return t_[i][n_]; }
  Q& cost(int j) { return t_[m_][j]; }
  Q& value() { return t_[m_][n_]; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int r, int col) {
    Q piv = t_[r][col];
    for (auto& v : t_[r]) v /= piv;
    for (int i = 0; i <= m_; ++i) {
      if (i == r || t_[i][col] == 0) continue;
      Q f = t_[i][col];
      for (int j = 0; j <= n_; ++j)
        if (t_[r][j] != 0) t_[i][j] -= f * t_[r][j];
    }
    basis_[r] = col;
  }

  // Bland's rule; columns >= allowed are never entered. false when unbounded.
  bool optimise(int allowed) {
    while (true) {
      int col = -1;
      for (int j = 0; j < allowed; ++j)
        if (t_[m_][j] < 0) {
          col = j;
          break;
        }
      if (col < 0) return true;
      int row = -1;
      Q best;
      for (int i = 0; i < m_; ++i) {
        if (t_[i][col] <= 0) continue;
        Q ratio = t_[i][n_] / t_[i][col];
        if (row < 0 || ratio < best || (ratio == best && basis_[i] < basis_[row])) {
          row = i;
          best = ratio;
        }
      }
      if (row < 0) return false;
      pivot(row, col);
    }
  }

  int rows() const { return m_; }

 private:
  int m_, n_;
  std::vector<std::vector<Q>> t_;
  std::vector<int> basis_;
};

LpOut solve_lp(Lp lp) {
  int m = static_cast<int>(lp.a.size());
  int n = static_cast<int>(lp.c.size());
  for (int i = 0; i < m; ++i) {
    if (lp.b[i] < 0) {
      for (auto& v : lp.a[i]) v = -v;
      lp.b[i] = -lp.b[i];
      if (lp.rel[i] == LinCon::Le) lp.rel[i] = LinCon::Ge;
      else if (lp.rel[i] == LinCon::Ge) lp.rel[i] = LinCon::Le;
    }
  }
  int slacks = 0, arts = 0;
  for (int i = 0; i < m; ++i) {
    if (lp.rel[i] != LinCon::Eq) ++slacks;
    if (lp.rel[i] != LinCon::Le) ++arts;
  }
  int cols = n + slacks + arts;
  Tableau t(m, cols);
  int si = n, ai = n + slacks;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t.at(i, j) = lp.a[i][j];
    t.rhs(i) = lp.b[i];
    if (lp.rel[i] == LinCon::Le) {
      t.at(i, si) = 1;
      t.basis()[i] = si++;
    } else {
      if (lp.rel[i] == LinCon::Ge) t.at(i, si++) = -1;
      t.at(i, ai) = 1;
      t.basis()[i] = ai++;
    }
  }
  LpOut out;
  // phase 1: minimise the artificial sum
  if (arts > 0) {
    for (int i = 0; i < m; ++i) {
      if (t.basis()[i] < n + slacks) continue;
      for (int j = 0; j <= cols; ++j) {
        Q v = j == cols ? t.rhs(i) : t.at(i, j);
        if (j < n + slacks) t.cost(j) -= v;
        else if (j == cols) t.value() -= v;
      }
    }
    t.optimise(n + slacks);
    if (t.value() != 0) return out;
    for (int i = 0; i < m; ++i) {
      if (t.basis()[i] < n + slacks) continue;
      for (int j = 0; j < n + slacks; ++j)
        if (t.at(i, j) != 0) {
          t.pivot(i, j);
          break;
        }
    }
  }
  for (int j = 0; j <= cols; ++j) t.cost(j) = 0;
  for (int j = 0; j < n; ++j) t.cost(j) = lp.c[j];
  for (int i = 0; i < m; ++i) {
    int bj = t.basis()[i];
    if (bj >= n + slacks || t.cost(bj) == 0) continue;
    Q f = t.cost(bj);
    for (int j = 0; j <= cols; ++j) {
      if (j == cols) t.value() -= f * t.rhs(i);
      else t.cost(j) -= f * t.at(i, j);
    }
  }
  // artificial rows left in the basis are redundant and stay at zero
  if (!t.optimise(n + slacks)) return out;  // unbounded cannot happen with upper bounds
  out.feasible = true;
  out.x.assign(n, Q(0));
  for (int i = 0; i < m; ++i)
    if (t.basis()[i] < n) out.x[t.basis()[i]] = t.rhs(i);
  out.value = -t.value();
  return out;
}

Q floor_q(const Q& q) {
  using boost::multiprecision::cpp_int;
  cpp_int num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
  cpp_int f = num / den;
  if (num < 0 && f * den != num) f -= 1;
  return Q(f);
}

}  // namespace

IlpResult solve_ilp(const IlpProblem& p, int node_cap) {
  int n = p.nvars;
  std::vector<std::int64_t> lo(n, 0), hi(n, p.default_upper), obj(n, 1);
  for (int j = 0; j < n && j < static_cast<int>(p.lower.size()); ++j) lo[j] = p.lower[j];
  for (int j = 0; j < n && j < static_cast<int>(p.upper.size()); ++j) hi[j] = p.upper[j];
  for (int j = 0; j < n && j < static_cast<int>(p.objective.size()); ++j) obj[j] = p.objective[j];

  IlpResult res;
  std::optional<Q> best;
  std::vector<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> stack{{lo, hi}};
  while (!stack.empty()) {
    if (res.nodes >= node_cap) {
      res.exhausted = !res.feasible;
      break;
    }
    auto [l, h] = stack.back();
    stack.pop_back();
    ++res.nodes;
    bool empty = false;
    for (int j = 0; j < n; ++j) empty = empty || l[j] > h[j];
    if (empty) continue;
    // substitute x = l + y, y >= 0
    Lp lp;
    lp.c.assign(n, Q(0));
    for (int j = 0; j < n; ++j) lp.c[j] = obj[j];
    for (const auto& con : p.cons) {
      std::vector<Q> row(n);
      Q shift = 0;
      for (int j = 0; j < n && j < static_cast<int>(con.a.size()); ++j) {
        row[j] = con.a[j];
        shift += Q(con.a[j]) * l[j];
      }
      lp.a.push_back(row);
      lp.rel.push_back(con.rel);
      lp.b.push_back(Q(con.rhs) - shift);
    }
    for (int j = 0; j < n; ++j) {
      std::vector<Q> row(n);
      row[j] = 1;
      lp.a.push_back(row);
      lp.rel.push_back(LinCon::Le);
      lp.b.push_back(Q(h[j] - l[j]));
    }
    LpOut o = solve_lp(lp);
    if (!o.feasible) continue;
    Q value = o.value;
    for (int j = 0; j < n; ++j) value += Q(obj[j]) * l[j];
    if (best && value >= *best) continue;
    int frac = -1;
    for (int j = 0; j < n; ++j)
      if (boost::multiprecision::denominator(o.x[j]) != 1) {
        frac = j;
        break;
      }
    if (frac < 0) {
      best = value;
      res.feasible = true;
      res.x.assign(n, 0);
      for (int j = 0; j < n; ++j) res.x[j] = l[j] + static_cast<std::int64_t>(boost::multiprecision::numerator(o.x[j]));
      continue;
    }
    std::int64_t f = l[frac] + static_cast<std::int64_t>(boost::multiprecision::numerator(floor_q(o.x[frac])));
    auto h2 = h;
    h2[frac] = f;
    auto l2 = l;
    l2[frac] = f + 1;
    stack.push_back({l2, h});
    stack.push_back({l, h2});
  }
  return res;
}

}  // namespace fcl
