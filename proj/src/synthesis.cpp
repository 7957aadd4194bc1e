#include "handoff/synthesis.hpp"

namespace handoff {

TwoStage prepare_two_stage(const SharedAutonomyMdp& sa, const RabinAutomaton& dra,
                           double eps_visit) {
  TwoStage ts;
  ts.product = product_with_dra(sa, dra);
  ts.accepting = accepting_end_components(ts.product);
  ts.terminal = terminal_costs(ts.product, ts.accepting, eps_visit);
  ts.rewards = build_reward_vector(ts.product, accepting_states_union(ts.accepting), ts.terminal);
  ts.corners = ideal_and_nadir(ts.product, ts.rewards);
  return ts;
}

SweepPoint solve_point(const TwoStage& ts, std::array<double, 2> weights, double eps_aug) {
  return solve_scalarized(ts.product, ts.rewards, ts.terminal, ts.corners, weights, eps_aug);
}

std::vector<SweepPoint> solve_sweep(const TwoStage& ts,
                                    const std::vector<std::array<double, 2>>& weights,
                                    double eps_aug) {
  return pareto_sweep(ts.product, ts.rewards, ts.terminal, ts.corners, weights, eps_aug);
}

SwitchingPolicy make_switching_policy(const TwoStage& ts, const SweepPoint& point) {
  if (!point.solved) throw invariant_error("cannot execute an unsolved point: " + point.message);
  SwitchingPolicy sp;
  sp.outside = point.policy;
  sp.component_of = ts.terminal.component_of;
  for (const AecSolution& sol : ts.terminal.solutions) sp.inside.push_back(sol.policy);
  return sp;
}

}  // namespace handoff
