#include "handoff/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "handoff/errors.hpp"

namespace handoff {

int LinearProgram::add_variable(std::string name, double lower) {
  if (!std::isfinite(lower))
    throw std::invalid_argument("variable lower bound must be finite");
  names_.push_back(std::move(name));
  lower_.push_back(lower);
  objective_.push_back(0.0);
  return num_variables() - 1;
}

void LinearProgram::set_objective_coeff(int var, double coeff) {
  objective_.at(var) = coeff;
}

int LinearProgram::add_constraint(const std::vector<std::pair<int, double>>& coeffs,
                                  Rel rel, double rhs) {
  std::map<int, double> acc;
  for (const auto& [v, c] : coeffs) {
    if (v < 0 || v >= num_variables())
      throw std::out_of_range("constraint references unknown variable");
    acc[v] += c;
  }
  std::vector<std::pair<int, double>> row(acc.begin(), acc.end());
  rows_.push_back(std::move(row));
  rels_.push_back(rel);
  rhs_.push_back(rhs);
  return num_constraints() - 1;
}

void LinearProgram::write_lp_format(std::ostream& os) const {
  auto term = [&](double c, const std::string& n, bool first) {
    std::string s;
    if (c >= 0 && !first) s += " + ";
    if (c < 0) s += first ? "-" : " - ";
    s += std::to_string(std::abs(c)) + " " + n;
    return s;
  };
  os << (sense_ == Sense::minimize ? "Minimize" : "Maximize") << "\n obj:";
  bool first = true;
  for (int v = 0; v < num_variables(); ++v) {
    if (objective_[v] == 0.0) continue;
    os << " " << term(objective_[v], names_[v], first);
    first = false;
  }
  if (first && !names_.empty()) os << " 0 " << names_[0];
  os << "\nSubject To\n";
  for (int i = 0; i < num_constraints(); ++i) {
    os << " c" << i << ":";
    first = true;
    for (const auto& [v, c] : rows_[i]) {
      os << " " << term(c, names_[v], first);
      first = false;
    }
    const char* rel = rels_[i] == Rel::le ? "<=" : rels_[i] == Rel::ge ? ">=" : "=";
    os << " " << rel << " " << rhs_[i] << "\n";
  }
  os << "Bounds\n";
  for (int v = 0; v < num_variables(); ++v)
    os << " " << lower_[v] << " <= " << names_[v] << " <= +inf\n";
  os << "End\n";
}

namespace {

struct Column {
  std::vector<std::pair<int, double>> entries;  // (row, coeff)
  double cost = 0.0;      // phase-2 cost (minimization form)
  bool artificial = false;
};

}  // namespace

/**
 * Internal standard-form solver. Lower bounds are shifted out, relations
 * turned into slack/surplus columns, rows normalized to rhs >= 0, and
 * artificial columns added where no natural basic column exists.
 */
struct SimplexSolver {
  explicit SimplexSolver(const LinearProgram& lp) : lp_(lp) { build(); }

  const LinearProgram& lp_;
  int m = 0;
  int n_structural = 0;
  std::vector<Column> cols;
  std::vector<double> rhs;        // >= 0 after normalization
  std::vector<char> row_flipped;
  std::vector<int> orig_row;      // current row -> original constraint index
  std::vector<int> basis;
  std::vector<double> binv;       // dense m*m, row-major
  std::vector<double> xb;
  std::vector<char> in_basis;
  long iterations = 0;
  long iteration_cap = 0;
  // Cautious mode for the retry after a numerical breakdown: Bland's rule
  // throughout, tight refactorization cadence, and a stricter ratio-test
  // pivot floor so drift cannot promote a true-zero entry into a pivot.
  bool cautious = false;
  long refactor_every = 64;
  double ratio_floor = kLpPivotTol;

  void build() {
    m = lp_.num_constraints();
    n_structural = lp_.num_variables();
    rhs.assign(m, 0.0);
    row_flipped.assign(m, 0);
    orig_row.resize(m);
    for (int i = 0; i < m; ++i) orig_row[i] = i;

    cols.resize(n_structural);
    bool minimize = lp_.sense() == Sense::minimize;
    for (int v = 0; v < n_structural; ++v)
      cols[v].cost = minimize ? lp_.objective_[v] : -lp_.objective_[v];

    for (int i = 0; i < m; ++i) {
      double b = lp_.rhs_[i];
      for (const auto& [v, c] : lp_.rows_[i]) b -= c * lp_.lower_[v];  // shift bounds
      rhs[i] = b;
      for (const auto& [v, c] : lp_.rows_[i])
        if (c != 0.0) cols[v].entries.push_back({i, c});
    }

    std::vector<int> slack_col(m, -1);
    for (int i = 0; i < m; ++i) {
      if (lp_.rels_[i] == Rel::eq) continue;
      Column sc;
      sc.entries.push_back({i, lp_.rels_[i] == Rel::le ? 1.0 : -1.0});
      slack_col[i] = static_cast<int>(cols.size());
      cols.push_back(std::move(sc));
    }

    for (int i = 0; i < m; ++i)
      if (rhs[i] < 0.0) {
        rhs[i] = -rhs[i];
        row_flipped[i] = 1;
      }
    for (auto& col : cols)
      for (auto& [r, c] : col.entries)
        if (row_flipped[r]) c = -c;

    basis.assign(m, -1);
    for (int i = 0; i < m; ++i) {
      if (slack_col[i] >= 0 && cols[slack_col[i]].entries[0].second > 0.0) {
        basis[i] = slack_col[i];
      } else {
        Column ac;
        ac.entries.push_back({i, 1.0});
        ac.artificial = true;
        basis[i] = static_cast<int>(cols.size());
        cols.push_back(std::move(ac));
      }
    }
    in_basis.assign(cols.size(), 0);
    for (int i = 0; i < m; ++i) in_basis[basis[i]] = 1;

    binv.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) binv[static_cast<size_t>(i) * m + i] = 1.0;
    xb = rhs;
    iteration_cap = 20000 + 200L * (m + static_cast<long>(cols.size()));
  }

  double col_cost(int j, bool phase1) const {
    return phase1 ? (cols[j].artificial ? 1.0 : 0.0) : cols[j].cost;
  }

  std::vector<double> dual_row(bool phase1) const {
    std::vector<double> y(m, 0.0);
    for (int r = 0; r < m; ++r) {
      double cb = col_cost(basis[r], phase1);
      if (cb == 0.0) continue;
      const double* row = &binv[static_cast<size_t>(r) * m];
      for (int i = 0; i < m; ++i) y[i] += cb * row[i];
    }
    return y;
  }

  double reduced_cost(int j, const std::vector<double>& y, bool phase1) const {
    double d = col_cost(j, phase1);
    for (const auto& [r, c] : cols[j].entries) d -= y[r] * c;
    return d;
  }

  // w = B^{-1} A_j
  std::vector<double> ftran(int j) const {
    std::vector<double> w(m, 0.0);
    for (const auto& [r, c] : cols[j].entries)
      for (int i = 0; i < m; ++i) w[i] += binv[static_cast<size_t>(i) * m + r] * c;
    return w;
  }

  void pivot(int leave_row, int enter, const std::vector<double>& w, double theta) {
    double piv = w[leave_row];
    double* lrow = &binv[static_cast<size_t>(leave_row) * m];
    for (int i = 0; i < m; ++i) lrow[i] /= piv;
    for (int r = 0; r < m; ++r) {
      if (r == leave_row || w[r] == 0.0) continue;
      double f = w[r];
      double* row = &binv[static_cast<size_t>(r) * m];
      for (int i = 0; i < m; ++i) row[i] -= f * lrow[i];
    }
    for (int r = 0; r < m; ++r)
      if (r != leave_row) xb[r] = std::max(0.0, xb[r] - theta * w[r]);
    in_basis[basis[leave_row]] = 0;
    basis[leave_row] = enter;
    in_basis[enter] = 1;
    xb[leave_row] = theta;
  }

  void refactor() {
    std::vector<double> a(static_cast<size_t>(m) * m, 0.0);
    for (int c = 0; c < m; ++c)
      for (const auto& [r, v] : cols[basis[c]].entries)
        a[static_cast<size_t>(r) * m + c] = v;
    std::vector<double> inv(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<size_t>(i) * m + i] = 1.0;

    for (int k = 0; k < m; ++k) {
      int piv = k;
      double best = std::abs(a[static_cast<size_t>(k) * m + k]);
      for (int r = k + 1; r < m; ++r) {
        double v = std::abs(a[static_cast<size_t>(r) * m + k]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < 1e-12) throw solver_error("singular basis during refactorization");
      if (piv != k)
        for (int c = 0; c < m; ++c) {
          std::swap(a[static_cast<size_t>(piv) * m + c], a[static_cast<size_t>(k) * m + c]);
          std::swap(inv[static_cast<size_t>(piv) * m + c], inv[static_cast<size_t>(k) * m + c]);
        }
      double d = a[static_cast<size_t>(k) * m + k];
      for (int c = 0; c < m; ++c) {
        a[static_cast<size_t>(k) * m + c] /= d;
        inv[static_cast<size_t>(k) * m + c] /= d;
      }
      for (int r = 0; r < m; ++r) {
        if (r == k) continue;
        double f = a[static_cast<size_t>(r) * m + k];
        if (f == 0.0) continue;
        for (int c = 0; c < m; ++c) {
          a[static_cast<size_t>(r) * m + c] -= f * a[static_cast<size_t>(k) * m + c];
          inv[static_cast<size_t>(r) * m + c] -= f * inv[static_cast<size_t>(k) * m + c];
        }
      }
    }
    binv = std::move(inv);
    recompute_xb();
  }

  void recompute_xb() {
    xb.assign(m, 0.0);
    for (int r = 0; r < m; ++r) {
      const double* row = &binv[static_cast<size_t>(r) * m];
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += row[i] * rhs[i];
      if (s < 0.0) {
        if (s < -kLpFeasTol) throw solver_error("feasibility lost during solve");
        s = 0.0;
      }
      xb[r] = s;
    }
  }

  /** Runs one phase to optimality. Returns false iff unbounded (phase 2). */
  bool iterate(bool phase1) {
    int degenerate_streak = 0;
    bool bland = cautious;
    long since_refactor = 0;
    while (true) {
      // Phase 1 is done as soon as the artificials reach zero; waiting for
      // nonnegative reduced costs wastes unbounded effort on degenerate
      // shuffles once point-mass right-hand sides have been absorbed.
      if (phase1 && phase_objective(true) <= kLpFeasTol * 0.5) return true;
      if (++iterations > iteration_cap)
        throw solver_error("simplex iteration limit exceeded");
      auto y = dual_row(phase1);

      int enter = -1;
      double best = -kLpPivotTol;
      for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        if (in_basis[j] || cols[j].artificial) continue;
        double d = reduced_cost(j, y, phase1);
        if (bland) {
          if (d < -kLpPivotTol) {
            enter = j;
            break;
          }
        } else if (d < best) {
          best = d;
          enter = j;
        }
      }
      if (enter < 0) return true;

      auto w = ftran(enter);
      int leave = -1;
      bool refreshed = false;
      while (true) {
        // Entries far below the column's largest magnitude are elimination
        // noise, not pivot candidates; an absolute floor alone admits them
        // once the basis is ill conditioned and that turns the basis
        // exactly singular.
        double wmax = 0.0;
        for (int r = 0; r < m; ++r) wmax = std::max(wmax, std::abs(w[r]));
        double eligible = std::max(ratio_floor, 1e-9 * wmax);

        double tmin = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r)
          if (w[r] > eligible) tmin = std::min(tmin, xb[r] / w[r]);
        if (!std::isfinite(tmin)) {
          if (refreshed) {
            if (phase1) throw solver_error("phase-1 subproblem unbounded");
            return false;
          }
          refreshed = true;
          refactor();
          since_refactor = 0;
          w = ftran(enter);
          continue;
        }
        std::vector<int> ties;
        double tie_tol = 1e-12 * (1.0 + tmin);
        for (int r = 0; r < m; ++r)
          if (w[r] > eligible && xb[r] / w[r] <= tmin + tie_tol) ties.push_back(r);
        // Lexicographic tie break on the rows of [x_B | B^-1] scaled by the
        // pivot: guarantees termination under any entering rule, which
        // matters here because flow programs with point-mass right-hand
        // sides are almost totally degenerate.
        for (int j = 0; j < m && ties.size() > 1; ++j) {
          double best_val = std::numeric_limits<double>::infinity();
          for (int r : ties)
            best_val = std::min(best_val, binv[static_cast<size_t>(r) * m + j] / w[r]);
          std::vector<int> kept;
          for (int r : ties)
            if (binv[static_cast<size_t>(r) * m + j] / w[r] <= best_val + 1e-12)
              kept.push_back(r);
          ties = std::move(kept);
        }
        leave = ties[0];
        for (int r : ties)
          if (std::abs(w[r]) > std::abs(w[leave])) leave = r;
        // A pivot that is tiny relative to the column is usually stale
        // noise. Rebuild the inverse once and re-derive the column before
        // trusting it; a genuine small pivot survives the refresh.
        if (!refreshed && std::abs(w[leave]) < 1e-7 * wmax) {
          refreshed = true;
          refactor();
          since_refactor = 0;
          w = ftran(enter);
          continue;
        }
        break;
      }
      double theta = std::max(0.0, xb[leave] / w[leave]);

      pivot(leave, enter, w, theta);
      if (theta <= 1e-12) {
        if (++degenerate_streak >= 50) bland = true;
      } else {
        degenerate_streak = 0;
        bland = cautious;
      }
      if (++since_refactor >= refactor_every) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  double phase_objective(bool phase1) const {
    double obj = 0.0;
    for (int r = 0; r < m; ++r) obj += col_cost(basis[r], phase1) * xb[r];
    return obj;
  }

  /** After phase 1: pivot basic artificials out; rows where that is
   *  impossible are linearly dependent on the others and get dropped. */
  void eliminate_artificials() {
    for (int r = 0; r < m; ++r) {
      if (!cols[basis[r]].artificial) continue;
      int enter = -1;
      for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        if (cols[j].artificial || in_basis[j]) continue;
        double wr = 0.0;
        for (const auto& [row, c] : cols[j].entries)
          wr += binv[static_cast<size_t>(r) * m + row] * c;
        if (std::abs(wr) > 1e-7) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) {
        // Degenerate pivot: the artificial sits at (numerical) zero.
        xb[r] = 0.0;
        auto w = ftran(enter);
        pivot(r, enter, w, 0.0);
      }
    }

    std::vector<char> drop(m, 0);
    bool any = false;
    for (int r = 0; r < m; ++r)
      if (cols[basis[r]].artificial) {
        if (xb[r] > kLpFeasTol) throw solver_error("artificial stuck at positive level");
        drop[r] = 1;
        any = true;
      }
    if (!any) return;

    std::vector<int> newrow(m, -1);
    int nm = 0;
    for (int r = 0; r < m; ++r)
      if (!drop[r]) newrow[r] = nm++;
    std::vector<double> nrhs(nm);
    std::vector<char> nflip(nm);
    std::vector<int> norig(nm);
    std::vector<int> nbasis(nm);
    for (int r = 0; r < m; ++r)
      if (!drop[r]) {
        nrhs[newrow[r]] = rhs[r];
        nflip[newrow[r]] = row_flipped[r];
        norig[newrow[r]] = orig_row[r];
        nbasis[newrow[r]] = basis[r];
      }
    for (auto& col : cols) {
      std::vector<std::pair<int, double>> kept;
      for (const auto& [r, c] : col.entries)
        if (!drop[r]) kept.push_back({newrow[r], c});
      col.entries = std::move(kept);
    }
    rhs = std::move(nrhs);
    row_flipped = std::move(nflip);
    orig_row = std::move(norig);
    basis = std::move(nbasis);
    m = nm;
    in_basis.assign(cols.size(), 0);
    for (int r = 0; r < m; ++r) in_basis[basis[r]] = 1;
    binv.assign(static_cast<size_t>(m) * m, 0.0);
    refactor();
  }

  LpSolution extract(LpStatus status) {
    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations;
    if (status != LpStatus::optimal) return sol;

    refactor();  // exact basic values from a fresh factorization

    std::vector<double> shifted(cols.size(), 0.0);
    for (int r = 0; r < m; ++r) shifted[basis[r]] = xb[r];
    sol.values.resize(lp_.num_variables());
    for (int v = 0; v < lp_.num_variables(); ++v)
      sol.values[v] = lp_.lower_[v] + shifted[v];

    double obj = lp_.objective_constant_;
    for (int v = 0; v < lp_.num_variables(); ++v)
      obj += lp_.objective_[v] * sol.values[v];
    sol.objective = obj;

    bool minimize = lp_.sense() == Sense::minimize;
    auto y = dual_row(false);
    sol.duals.assign(lp_.num_constraints(), 0.0);
    for (int r = 0; r < m; ++r) {
      double yr = y[r];
      if (row_flipped[r]) yr = -yr;
      sol.duals[orig_row[r]] = minimize ? yr : -yr;
    }

    // Dual objective y^T b + sum_j l_j (c_j - y^T A_j), original coordinates.
    double dobj = 0.0;
    for (int i = 0; i < lp_.num_constraints(); ++i) dobj += sol.duals[i] * lp_.rhs_[i];
    std::vector<double> yta(lp_.num_variables(), 0.0);
    for (int i = 0; i < lp_.num_constraints(); ++i)
      for (const auto& [v, c] : lp_.rows_[i]) yta[v] += sol.duals[i] * c;
    for (int v = 0; v < lp_.num_variables(); ++v)
      if (lp_.lower_[v] != 0.0) dobj += lp_.lower_[v] * (lp_.objective_[v] - yta[v]);
    sol.dual_objective = dobj + lp_.objective_constant_;
    return sol;
  }
};

LpSolution solve(const LinearProgram& lp) {
  if (lp.num_constraints() == 0) {
    // No constraints: each variable sits at its lower bound unless its
    // objective coefficient pushes it to +inf.
    LpSolution sol;
    bool minimize = lp.sense() == Sense::minimize;
    sol.values.resize(lp.num_variables());
    sol.objective = lp.objective_constant();
    for (int v = 0; v < lp.num_variables(); ++v) {
      double c = lp.objective_coeff(v);
      if ((minimize && c < 0.0) || (!minimize && c > 0.0)) {
        sol.status = LpStatus::unbounded;
        sol.values.clear();
        return sol;
      }
      sol.values[v] = lp.lower_bound(v);
      sol.objective += c * lp.lower_bound(v);
    }
    sol.dual_objective = sol.objective;
    return sol;
  }

  auto run = [&lp](bool cautious) {
    SimplexSolver s(lp);
    if (cautious) {
      s.cautious = true;
      s.refactor_every = 16;
      s.ratio_floor = 1e-7;
    }
    bool needs_phase1 = false;
    for (int r = 0; r < s.m; ++r)
      if (s.cols[s.basis[r]].artificial) {
        needs_phase1 = true;
        break;
      }
    if (needs_phase1) {
      s.iterate(true);
      if (s.phase_objective(true) > kLpFeasTol) return s.extract(LpStatus::infeasible);
      s.eliminate_artificials();
    }
    if (!s.iterate(false)) return s.extract(LpStatus::unbounded);
    return s.extract(LpStatus::optimal);
  };
  try {
    return run(false);
  } catch (const solver_error&) {
    // Numerical breakdown on the fast path; redo the whole solve cautiously.
    return run(true);
  }
}

}  // namespace handoff
