#include "handoff/aec_stage.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace handoff {
namespace {

std::string occ_var_name(const ProductMdp& p, int v, int row) {
  std::string n = "x_" + p.state_ids[v] + "_" + p.actions[p.rows[v][row].action].id();
  for (char& c : n)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return n;
}

// Row index in p.rows[v] for a global action index.
int row_of_action(const ProductMdp& p, int v, int action) {
  const auto& rows = p.rows[v];
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (rows[k].action == action) return static_cast<int>(k);
  throw invariant_error("action " + std::to_string(action) + " is not enabled at state " +
                        p.state_ids[v]);
}

bool strongly_connected(const std::vector<int>& states,
                        const std::map<int, std::vector<int>>& succ) {
  if (states.empty()) return false;
  std::map<int, std::vector<int>> pred;
  for (const auto& [v, outs] : succ)
    for (int w : outs) pred[w].push_back(v);
  auto reaches_all = [&](const std::map<int, std::vector<int>>& adj) {
    std::set<int> seen{states[0]};
    std::queue<int> q;
    q.push(states[0]);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      auto it = adj.find(v);
      if (it == adj.end()) continue;
      for (int w : it->second)
        if (seen.insert(w).second) q.push(w);
    }
    return seen.size() == states.size();
  };
  return reaches_all(succ) && reaches_all(pred);
}

}  // namespace

std::vector<Violation> validate_policy(const ProductMdp& p, const MemorylessPolicy& g) {
  std::vector<Violation> out;
  for (const auto& [v, dist] : g.choice) {
    if (v < 0 || v >= p.num_states()) {
      out.push_back({"policy", "state index " + std::to_string(v) + " out of range"});
      continue;
    }
    double total = 0.0;
    for (const auto& [a, pr] : dist) {
      if (pr < -kProbTol)
        out.push_back({"policy." + p.state_ids[v], "negative probability on action " +
                                                       std::to_string(a)});
      bool enabled = false;
      for (const auto& row : p.rows[v])
        if (row.action == a) enabled = true;
      if (!enabled)
        out.push_back({"policy." + p.state_ids[v],
                       "action " + std::to_string(a) + " is not enabled here"});
      total += pr;
    }
    if (std::abs(total - 1.0) > kProbTol)
      out.push_back({"policy." + p.state_ids[v],
                     "probabilities sum to " + std::to_string(total)});
  }
  return out;
}

AecLp build_aec_lp(const ProductMdp& p, const EndComponent& ec,
                   const std::map<int, double>& eta, double eps_visit) {
  if (ec.states.empty()) throw invariant_error("empty component in occupancy program");
  AecLp out;
  out.lp.set_sense(Sense::minimize);

  std::map<int, int> pos;
  for (std::size_t i = 0; i < ec.states.size(); ++i) pos[ec.states[i]] = static_cast<int>(i);

  // One variable per staying action; membership in the staying set is what
  // keeps every feasible occupancy closed under the component.
  for (int v : ec.states) {
    for (int action : ec.staying.at(v)) {
      int k = row_of_action(p, v, action);
      int col = out.lp.add_variable(occ_var_name(p, v, k), 0.0);
      out.var_of[{v, k}] = col;
      out.lp.set_objective_coeff(col, p.rows[v][k].expected_cost);
    }
  }

  // Discounted flow balance: x(v) - gamma * inflow(v) = eta(v).
  for (int v : ec.states) {
    std::vector<std::pair<int, double>> terms;
    for (const auto& [key, col] : out.var_of) {
      const auto& [w, k] = key;
      const ProductRow& row = p.rows[w][k];
      double coeff = (w == v) ? 1.0 : 0.0;
      for (std::size_t i = 0; i < row.succ.size(); ++i)
        if (row.succ[i] == v) coeff -= p.gamma * row.prob[i];
      if (coeff != 0.0) terms.emplace_back(col, coeff);
    }
    auto it = eta.find(v);
    double rhs = it == eta.end() ? 0.0 : it->second;
    out.lp.add_constraint(terms, Rel::eq, rhs);
  }

  // Visitation floor so the extracted policy is defined on all of the component.
  for (int v : ec.states) {
    std::vector<std::pair<int, double>> terms;
    for (const auto& [key, col] : out.var_of)
      if (key.first == v) terms.emplace_back(col, 1.0);
    out.lp.add_constraint(terms, Rel::ge, eps_visit);
  }
  return out;
}

AecSolution solve_aec_policy(const ProductMdp& p, const EndComponent& ec, double eps_visit) {
  std::map<int, double> eta;
  for (int v : ec.states) eta[v] = 1.0 / static_cast<double>(ec.states.size());
  AecLp prog = build_aec_lp(p, ec, eta, eps_visit);
  LpSolution sol = solve(prog.lp);
  if (sol.status == LpStatus::infeasible) throw visit_floor_error(eps_visit);
  if (sol.status != LpStatus::optimal)
    throw solver_error("occupancy program unbounded on a finite component");

  AecSolution out;
  out.objective = sol.objective;
  std::map<int, double> total;
  for (const auto& [key, col] : prog.var_of) {
    double x = std::max(0.0, sol.values[col]);
    out.occupancy[{key.first, p.rows[key.first][key.second].action}] = x;
    total[key.first] += x;
  }
  for (const auto& [key, col] : prog.var_of) {
    const auto& [v, k] = key;
    double x = std::max(0.0, sol.values[col]);
    if (total[v] <= 0.0)
      throw solver_error("state " + p.state_ids[v] + " carries no occupancy despite the floor");
    out.policy.choice[v][p.rows[v][k].action] = x / total[v];
  }

  std::map<int, std::vector<int>> succ;
  for (int v : ec.states) {
    for (const auto& [a, pr] : out.policy.choice[v]) {
      if (pr <= 1e-15) continue;
      const ProductRow& row = p.rows[v][row_of_action(p, v, a)];
      for (std::size_t i = 0; i < row.succ.size(); ++i)
        if (row.prob[i] > 0.0) succ[v].push_back(row.succ[i]);
    }
  }
  out.irreducible = strongly_connected(ec.states, succ);
  return out;
}

std::map<int, double> evaluate_policy(const ProductMdp& p, const std::vector<int>& domain,
                                      const MemorylessPolicy& g, const TransitionValue& value,
                                      bool require_closed) {
  const int n = static_cast<int>(domain.size());
  std::map<int, int> pos;
  for (int i = 0; i < n; ++i) pos[domain[i]] = i;

  // (I - gamma P_g) U = r_g, assembled densely.
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> r(n, 0.0);
  for (int i = 0; i < n; ++i) {
    int v = domain[i];
    a[static_cast<std::size_t>(i) * n + i] = 1.0;
    if (!g.defined_at(v))
      throw invariant_error("policy undefined at state " + p.state_ids[v]);
    for (const auto& [action, pr] : g.at(v)) {
      if (pr <= 0.0) continue;
      int k = row_of_action(p, v, action);
      const ProductRow& row = p.rows[v][k];
      for (std::size_t s = 0; s < row.succ.size(); ++s) {
        r[i] += pr * row.prob[s] * value(v, k, s);
        auto it = pos.find(row.succ[s]);
        if (it == pos.end()) {
          if (require_closed && row.prob[s] > kProbTol)
            throw invariant_error("policy leaks from " + p.state_ids[v] + " to " +
                                  p.state_ids[row.succ[s]] + " outside its domain");
          continue;
        }
        a[static_cast<std::size_t>(i) * n + it->second] -= p.gamma * pr * row.prob[s];
      }
    }
  }

  std::vector<double> a0 = a, r0 = r;  // kept for the residual check

  // Gaussian elimination with partial pivoting; the matrix is strictly
  // diagonally dominant for gamma < 1 so pivots stay well away from zero.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::fabs(a[static_cast<std::size_t>(i) * n + col]) >
          std::fabs(a[static_cast<std::size_t>(piv) * n + col]))
        piv = i;
    if (std::fabs(a[static_cast<std::size_t>(piv) * n + col]) < 1e-12)
      throw solver_error("singular system while evaluating a policy");
    if (piv != col) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<std::size_t>(piv) * n + j],
                  a[static_cast<std::size_t>(col) * n + j]);
      std::swap(r[piv], r[col]);
    }
    double d = a[static_cast<std::size_t>(col) * n + col];
    for (int i = col + 1; i < n; ++i) {
      double f = a[static_cast<std::size_t>(i) * n + col] / d;
      if (f == 0.0) continue;
      a[static_cast<std::size_t>(i) * n + col] = 0.0;
      for (int j = col + 1; j < n; ++j)
        a[static_cast<std::size_t>(i) * n + j] -= f * a[static_cast<std::size_t>(col) * n + j];
      r[i] -= f * r[col];
    }
  }
  std::vector<double> u(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = r[i];
    for (int j = i + 1; j < n; ++j) s -= a[static_cast<std::size_t>(i) * n + j] * u[j];
    u[i] = s / a[static_cast<std::size_t>(i) * n + i];
  }

  double resid = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = -r0[i];
    for (int j = 0; j < n; ++j) s += a0[static_cast<std::size_t>(i) * n + j] * u[j];
    resid = std::max(resid, std::fabs(s));
  }
  if (resid > 1e-10)
    throw solver_error("policy evaluation residual " + std::to_string(resid) +
                       " exceeds tolerance");

  std::map<int, double> out;
  for (int i = 0; i < n; ++i) out[domain[i]] = u[i];
  return out;
}

TerminalCosts terminal_costs(const ProductMdp& p, const std::vector<EndComponent>& aecs,
                             double eps_visit) {
  TerminalCosts out;
  out.components = aecs;
  for (std::size_t id = 0; id < aecs.size(); ++id) {
    double eps = eps_visit;
    std::optional<AecSolution> sol;
    while (!sol) {
      try {
        sol = solve_aec_policy(p, aecs[id], eps);
      } catch (const visit_floor_error&) {
        eps /= 10.0;
        if (eps < kVisitFloorMin)
          throw solver_error("occupancy program for component " + std::to_string(id) +
                             " stayed infeasible down to the smallest visitation floor");
      }
    }
    auto cost_of = [&p](int v, int k, std::size_t s) { return p.rows[v][k].cost[s]; };
    std::map<int, double> val =
        evaluate_policy(p, aecs[id].states, sol->policy, cost_of, /*require_closed=*/true);
    for (const auto& [v, c] : val) {
      auto it = out.value.find(v);
      if (it == out.value.end() || c < it->second) {
        out.value[v] = c;
        out.component_of[v] = static_cast<int>(id);
      }
    }
    out.solutions.push_back(std::move(*sol));
    out.floors.push_back(eps);
    out.component_values.push_back(std::move(val));
  }
  return out;
}

}  // namespace handoff
