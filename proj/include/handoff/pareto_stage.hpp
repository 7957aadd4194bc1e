#pragma once

#include <array>

#include "handoff/aec_stage.hpp"

namespace handoff {

inline constexpr double kDefaultAugmentation = 1e-4;

/**
 * The two objectives over the product, aligned with p.rows. Objective 0 pays
 * 1 exactly when a transition crosses from outside the accepting union into
 * it (so its discounted sum is the probability-weighted discount of reaching
 * the union). Objective 1 is the negated attention cost, with the crossing
 * step charged the destination's optimal steady-state cost instead and
 * transitions inside the union charged nothing.
 */
struct RewardVector {
  std::vector<char> in_union;  // per product state
  std::vector<int> domain;     // states outside the union, ascending
  std::vector<std::vector<std::vector<double>>> per_succ[2];  // [obj][v][row][succ pos]
  std::vector<std::vector<double>> expected[2];               // [obj][v][row]

  double r(int objective, int v, int row, std::size_t s) const {
    return per_succ[objective][v][row][s];
  }
  double rho(int objective, int v, int row) const { return expected[objective][v][row]; }
};

/** Assembles both objectives. Every state of `target_union` must carry a
 *  terminal cost (invariant_error otherwise). */
RewardVector build_reward_vector(const ProductMdp& p, const std::vector<int>& target_union,
                                 const TerminalCosts& terminal);

struct SingleObjective {
  MemorylessPolicy policy;      // defined on all of rewards.domain
  std::map<int, double> value;  // optimal value per domain state
  double lp_value = 0.0;        // initial-weighted optimum from the occupancy program
  double vi_value = 0.0;        // the same quantity from value iteration
};

/**
 * Maximizes one objective alone: discounted occupancy program over the
 * domain, cross-checked against value iteration (they must agree to 1e-6;
 * tests pin a tighter bound). States the occupancy never reaches get the
 * value-iteration argmax action so the policy is total.
 */
SingleObjective solve_single_objective(const ProductMdp& p, const RewardVector& rewards,
                                       int objective);

struct CornerPoints {
  SingleObjective best[2];
  std::array<double, 2> ideal{};
  std::array<double, 2> nadir{};
};

/**
 * Ideal point from the two single-objective optima; nadir from the pessimal
 * cross-evaluation, taken per initial state before weighting (for each state
 * the worse of the two optimal policies' values, then averaged under the
 * initial distribution).
 */
CornerPoints ideal_and_nadir(const ProductMdp& p, const RewardVector& rewards);

struct Scalarization {
  std::array<double, 2> weights{};
  std::array<double, 2> lambda{};
  std::array<double, 2> ideal{};
  double eps_aug = kDefaultAugmentation;
};

/** lambda_i = w_i / |ideal_i - nadir_i|, falling back to w_i when the two
 *  points coincide to 1e-12 (a flat objective carries no scale). */
Scalarization make_scalarization(const CornerPoints& corners, std::array<double, 2> weights,
                                 double eps_aug = kDefaultAugmentation);

struct TchebychevLp {
  LinearProgram lp;
  std::map<std::pair<int, int>, int> var_of;  // (state, row position) -> column
  int z_col = -1;
};

/**
 * Weighted min-max program: minimize z + eps_aug * sum_i lambda_i * (ideal_i
 * - R_i x) subject to the occupancy flow constraints and z >= lambda_i *
 * (ideal_i - R_i x). The augmentation keeps the optimum on the Pareto face
 * rather than anywhere on a weakly dominated plateau.
 */
TchebychevLp build_tchebychev_lp(const ProductMdp& p, const RewardVector& rewards,
                                 const Scalarization& sc);

/** Occupancy-to-policy projection: x(v,a)/sum_a x(v,a), uniform over every
 *  enabled action at states the occupancy misses (below 1e-12 total mass). */
MemorylessPolicy extract_policy(const ProductMdp& p, const std::vector<int>& domain,
                                const std::map<std::pair<int, int>, int>& var_of,
                                const std::vector<double>& x);

struct ValueProfile {
  double u1 = 0.0;  // discounted probability of reaching the accepting union
  double u2 = 0.0;  // negated discounted attention cost

  bool operator==(const ValueProfile&) const = default;
};

/** Exact profile of a stage-one policy, including the contribution of
 *  initial mass already inside the accepting union (u1 gains the mass, u2
 *  pays its steady-state cost). */
ValueProfile evaluate_profile(const ProductMdp& p, const RewardVector& rewards,
                              const TerminalCosts& terminal, const MemorylessPolicy& f);

struct SweepPoint {
  std::array<double, 2> weights{};
  std::array<double, 2> lambda{};
  double eps_aug = kDefaultAugmentation;
  bool solved = false;
  std::string message;                // failure reason when !solved
  double scalar_objective = 0.0;      // optimum of the min-max program
  std::array<double, 2> recovered{};  // R_i x at the optimum, domain part only
  ValueProfile profile{};
  MemorylessPolicy policy;
};

/** One scalarized solve at the given weights. Solver failures are captured
 *  in the returned point, not thrown. */
SweepPoint solve_scalarized(const ProductMdp& p, const RewardVector& rewards,
                            const TerminalCosts& terminal, const CornerPoints& corners,
                            std::array<double, 2> weights,
                            double eps_aug = kDefaultAugmentation);

/** Scalarized solves across a weight list, returned in ascending order of
 *  the first weight. */
std::vector<SweepPoint> pareto_sweep(const ProductMdp& p, const RewardVector& rewards,
                                     const TerminalCosts& terminal, const CornerPoints& corners,
                                     const std::vector<std::array<double, 2>>& weights,
                                     double eps_aug = kDefaultAugmentation);

}  // namespace handoff
