#include "handoff/pareto_stage.hpp"

#include <algorithm>
#include <cmath>

namespace handoff {
namespace {

std::string flow_var_name(const ProductMdp& p, int v, int k) {
  std::string n = "x_" + p.state_ids[v] + "_" + p.actions[p.rows[v][k].action].id();
  for (char& c : n)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return n;
}

/**
 * Discounted flow system over the domain: one variable per (state, action),
 * one equality per state. Probability that crosses into the accepting union
 * leaves the system; it is paid for through the reward terms instead.
 */
std::map<std::pair<int, int>, int> add_flow_system(LinearProgram& lp, const ProductMdp& p,
                                                   const RewardVector& rw) {
  std::map<std::pair<int, int>, int> var_of;
  for (int v : rw.domain)
    for (std::size_t k = 0; k < p.rows[v].size(); ++k)
      var_of[{v, static_cast<int>(k)}] = lp.add_variable(flow_var_name(p, v, k), 0.0);

  std::map<int, std::vector<std::pair<int, double>>> inflow;
  for (const auto& [key, col] : var_of) {
    const ProductRow& row = p.rows[key.first][key.second];
    for (std::size_t s = 0; s < row.succ.size(); ++s)
      if (!rw.in_union[row.succ[s]])
        inflow[row.succ[s]].emplace_back(col, p.gamma * row.prob[s]);
  }
  for (int v : rw.domain) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t k = 0; k < p.rows[v].size(); ++k)
      terms.emplace_back(var_of.at({v, static_cast<int>(k)}), 1.0);
    for (const auto& [col, c] : inflow[v]) terms.emplace_back(col, -c);
    lp.add_constraint(terms, Rel::eq, p.initial[v]);
  }
  return var_of;
}

}  // namespace

RewardVector build_reward_vector(const ProductMdp& p, const std::vector<int>& target_union,
                                 const TerminalCosts& terminal) {
  const int n = static_cast<int>(p.num_states());
  RewardVector rw;
  rw.in_union.assign(n, 0);
  for (int v : target_union) {
    if (!terminal.value.count(v))
      throw invariant_error("no terminal cost for accepting state " + p.state_ids[v]);
    rw.in_union[v] = 1;
  }
  for (int v = 0; v < n; ++v)
    if (!rw.in_union[v]) rw.domain.push_back(v);

  for (int obj = 0; obj < 2; ++obj) {
    rw.per_succ[obj].resize(n);
    rw.expected[obj].resize(n);
  }
  for (int v = 0; v < n; ++v) {
    for (const ProductRow& row : p.rows[v]) {
      std::vector<double> v1(row.succ.size(), 0.0), v2(row.succ.size(), 0.0);
      if (!rw.in_union[v]) {
        for (std::size_t s = 0; s < row.succ.size(); ++s) {
          if (rw.in_union[row.succ[s]]) {
            v1[s] = 1.0;
            v2[s] = -terminal.value.at(row.succ[s]);
          } else {
            v2[s] = -row.cost[s];
          }
        }
      }
      double e1 = 0.0, e2 = 0.0;
      for (std::size_t s = 0; s < row.succ.size(); ++s) {
        e1 += row.prob[s] * v1[s];
        e2 += row.prob[s] * v2[s];
      }
      rw.per_succ[0][v].push_back(std::move(v1));
      rw.per_succ[1][v].push_back(std::move(v2));
      rw.expected[0][v].push_back(e1);
      rw.expected[1][v].push_back(e2);
    }
  }
  return rw;
}

SingleObjective solve_single_objective(const ProductMdp& p, const RewardVector& rewards,
                                       int objective) {
  SingleObjective out;

  LinearProgram lp;
  lp.set_sense(Sense::maximize);
  auto var_of = add_flow_system(lp, p, rewards);
  for (const auto& [key, col] : var_of)
    lp.set_objective_coeff(col, rewards.rho(objective, key.first, key.second));
  LpSolution sol = solve(lp);
  if (sol.status != LpStatus::optimal)
    throw solver_error("single-objective occupancy program did not reach an optimum");
  out.lp_value = sol.objective;

  // Value iteration on the same domain, both as a cross-check and to give
  // unreached states a concrete maximizing action.
  std::map<int, int> pos;
  for (std::size_t i = 0; i < rewards.domain.size(); ++i)
    pos[rewards.domain[i]] = static_cast<int>(i);
  std::vector<double> u(rewards.domain.size(), 0.0), next(rewards.domain.size(), 0.0);
  auto q_value = [&](int v, std::size_t k) {
    const ProductRow& row = p.rows[v][k];
    double q = rewards.rho(objective, v, static_cast<int>(k));
    for (std::size_t s = 0; s < row.succ.size(); ++s) {
      auto it = pos.find(row.succ[s]);
      if (it != pos.end()) q += p.gamma * row.prob[s] * u[it->second];
    }
    return q;
  };
  const int cap = 500000;
  int iter = 0;
  for (; iter < cap; ++iter) {
    double diff = 0.0;
    for (std::size_t i = 0; i < rewards.domain.size(); ++i) {
      int v = rewards.domain[i];
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < p.rows[v].size(); ++k) best = std::max(best, q_value(v, k));
      if (p.rows[v].empty()) best = 0.0;
      next[i] = best;
      diff = std::max(diff, std::fabs(best - u[i]));
    }
    u.swap(next);
    if (diff <= 1e-12) break;
  }
  if (iter == cap) throw solver_error("value iteration failed to converge");

  for (std::size_t i = 0; i < rewards.domain.size(); ++i) {
    out.value[rewards.domain[i]] = u[i];
    out.vi_value += p.initial[rewards.domain[i]] * u[i];
  }
  if (std::fabs(out.vi_value - out.lp_value) > 1e-6)
    throw solver_error("occupancy optimum and value iteration disagree by " +
                       std::to_string(std::fabs(out.vi_value - out.lp_value)));

  std::map<int, double> total;
  for (const auto& [key, col] : var_of) total[key.first] += std::max(0.0, sol.values[col]);
  for (int v : rewards.domain) {
    if (total[v] > 1e-12) {
      for (std::size_t k = 0; k < p.rows[v].size(); ++k) {
        double x = std::max(0.0, sol.values[var_of.at({v, static_cast<int>(k)})]);
        if (x > 0.0) out.policy.choice[v][p.rows[v][k].action] = x / total[v];
      }
    } else {
      // Unreached by every optimal occupancy; any maximizing action will do.
      std::size_t best_k = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < p.rows[v].size(); ++k) {
        double q = q_value(v, k);
        if (q > best_q + 1e-15) {
          best_q = q;
          best_k = k;
        }
      }
      out.policy.choice[v][p.rows[v][best_k].action] = 1.0;
    }
  }
  return out;
}

CornerPoints ideal_and_nadir(const ProductMdp& p, const RewardVector& rewards) {
  CornerPoints out;
  out.best[0] = solve_single_objective(p, rewards, 0);
  out.best[1] = solve_single_objective(p, rewards, 1);

  std::map<int, double> cross[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto fn = [&rewards, i](int v, int k, std::size_t s) { return rewards.r(i, v, k, s); };
      cross[i][j] = evaluate_policy(p, rewards.domain, out.best[j].policy, fn,
                                    /*require_closed=*/false);
    }
  for (int i = 0; i < 2; ++i) {
    double ideal = 0.0, nadir = 0.0;
    for (int v : rewards.domain) {
      ideal += p.initial[v] * cross[i][i].at(v);
      nadir += p.initial[v] * std::min(cross[i][0].at(v), cross[i][1].at(v));
    }
    out.ideal[i] = ideal;
    out.nadir[i] = nadir;
  }
  return out;
}

Scalarization make_scalarization(const CornerPoints& corners, std::array<double, 2> weights,
                                 double eps_aug) {
  Scalarization sc;
  sc.weights = weights;
  sc.ideal = corners.ideal;
  sc.eps_aug = eps_aug;
  for (int i = 0; i < 2; ++i) {
    double range = std::fabs(corners.ideal[i] - corners.nadir[i]);
    sc.lambda[i] = range > 1e-12 ? weights[i] / range : weights[i];
  }
  return sc;
}

TchebychevLp build_tchebychev_lp(const ProductMdp& p, const RewardVector& rewards,
                                 const Scalarization& sc) {
  TchebychevLp out;
  out.lp.set_sense(Sense::minimize);
  out.z_col = out.lp.add_variable("z", 0.0);
  out.var_of = add_flow_system(out.lp, p, rewards);

  // z >= lambda_i * (ideal_i - R_i x), written lambda_i R_i x + z >= lambda_i ideal_i.
  for (int i = 0; i < 2; ++i) {
    std::vector<std::pair<int, double>> terms{{out.z_col, 1.0}};
    for (const auto& [key, col] : out.var_of) {
      double c = sc.lambda[i] * rewards.rho(i, key.first, key.second);
      if (c != 0.0) terms.emplace_back(col, c);
    }
    out.lp.add_constraint(terms, Rel::ge, sc.lambda[i] * sc.ideal[i]);
  }

  out.lp.set_objective_coeff(out.z_col, 1.0);
  double constant = 0.0;
  for (int i = 0; i < 2; ++i) constant += sc.eps_aug * sc.lambda[i] * sc.ideal[i];
  for (const auto& [key, col] : out.var_of) {
    double c = 0.0;
    for (int i = 0; i < 2; ++i) c += sc.lambda[i] * rewards.rho(i, key.first, key.second);
    out.lp.set_objective_coeff(col, -sc.eps_aug * c);
  }
  out.lp.set_objective_constant(constant);
  return out;
}

MemorylessPolicy extract_policy(const ProductMdp& p, const std::vector<int>& domain,
                                const std::map<std::pair<int, int>, int>& var_of,
                                const std::vector<double>& x) {
  MemorylessPolicy g;
  for (int v : domain) {
    double total = 0.0;
    for (std::size_t k = 0; k < p.rows[v].size(); ++k)
      total += std::max(0.0, x[var_of.at({v, static_cast<int>(k)})]);
    if (total > 1e-12) {
      for (std::size_t k = 0; k < p.rows[v].size(); ++k) {
        double m = std::max(0.0, x[var_of.at({v, static_cast<int>(k)})]);
        if (m > 0.0) g.choice[v][p.rows[v][k].action] = m / total;
      }
    } else {
      double u = 1.0 / static_cast<double>(p.rows[v].size());
      for (const ProductRow& row : p.rows[v]) g.choice[v][row.action] = u;
    }
  }
  return g;
}

ValueProfile evaluate_profile(const ProductMdp& p, const RewardVector& rewards,
                              const TerminalCosts& terminal, const MemorylessPolicy& f) {
  ValueProfile out;
  for (int i = 0; i < 2; ++i) {
    auto fn = [&rewards, i](int v, int k, std::size_t s) { return rewards.r(i, v, k, s); };
    std::map<int, double> u = evaluate_policy(p, rewards.domain, f, fn, false);
    double total = 0.0;
    for (int v : rewards.domain) total += p.initial[v] * u.at(v);
    (i == 0 ? out.u1 : out.u2) = total;
  }
  for (std::size_t v = 0; v < p.num_states(); ++v) {
    if (!rewards.in_union[v] || p.initial[v] == 0.0) continue;
    out.u1 += p.initial[v];
    out.u2 -= p.initial[v] * terminal.value.at(static_cast<int>(v));
  }
  return out;
}

SweepPoint solve_scalarized(const ProductMdp& p, const RewardVector& rewards,
                            const TerminalCosts& terminal, const CornerPoints& corners,
                            std::array<double, 2> weights, double eps_aug) {
  SweepPoint point;
  point.weights = weights;
  point.eps_aug = eps_aug;
  Scalarization sc = make_scalarization(corners, weights, eps_aug);
  point.lambda = sc.lambda;
  try {
    TchebychevLp prog = build_tchebychev_lp(p, rewards, sc);
    LpSolution sol = solve(prog.lp);
    if (sol.status != LpStatus::optimal) {
      point.message = sol.status == LpStatus::infeasible ? "scalarized program infeasible"
                                                         : "scalarized program unbounded";
      return point;
    }
    point.scalar_objective = sol.objective;
    for (const auto& [key, col] : prog.var_of) {
      double x = std::max(0.0, sol.values[col]);
      for (int i = 0; i < 2; ++i)
        point.recovered[i] += rewards.rho(i, key.first, key.second) * x;
    }
    point.policy = extract_policy(p, rewards.domain, prog.var_of, sol.values);
    point.profile = evaluate_profile(p, rewards, terminal, point.policy);
    point.solved = true;
  } catch (const std::runtime_error& e) {
    point.message = e.what();
  }
  return point;
}

std::vector<SweepPoint> pareto_sweep(const ProductMdp& p, const RewardVector& rewards,
                                     const TerminalCosts& terminal, const CornerPoints& corners,
                                     const std::vector<std::array<double, 2>>& weights,
                                     double eps_aug) {
  std::vector<SweepPoint> out;
  for (const auto& w : weights)
    out.push_back(solve_scalarized(p, rewards, terminal, corners, w, eps_aug));
  std::stable_sort(out.begin(), out.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return a.weights[0] < b.weights[0];
  });
  return out;
}

}  // namespace handoff
