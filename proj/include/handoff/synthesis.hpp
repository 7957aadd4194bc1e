#pragma once

#include "handoff/pareto_stage.hpp"

namespace handoff {

/**
 * Everything the scalarized solves share for one (model, objective) pair:
 * the product, its accepting components with optimal steady-state policies
 * and costs, the two-objective rewards, and the ideal/nadir corners.
 */
struct TwoStage {
  ProductMdp product;
  std::vector<EndComponent> accepting;
  TerminalCosts terminal;
  RewardVector rewards;
  CornerPoints corners;

  bool accepting_empty() const { return accepting.empty(); }
};

/** Builds the shared stage structure. With no accepting component the
 *  reach objective is identically zero; callers should surface a warning
 *  but every downstream solve still goes through. */
TwoStage prepare_two_stage(const SharedAutonomyMdp& sa, const RabinAutomaton& dra,
                           double eps_visit = kDefaultVisitFloor);

/** One scalarized solve against prepared stages. */
SweepPoint solve_point(const TwoStage& ts, std::array<double, 2> weights,
                       double eps_aug = kDefaultAugmentation);

/** Scalarized solves for a whole weight list, ascending in the first weight. */
std::vector<SweepPoint> solve_sweep(const TwoStage& ts,
                                    const std::vector<std::array<double, 2>>& weights,
                                    double eps_aug = kDefaultAugmentation);

/**
 * Executable form of a two-stage solution: follow `outside` until the first
 * visit to an accepting state, then follow the staying policy of that
 * state's best component forever.
 */
struct SwitchingPolicy {
  MemorylessPolicy outside;
  std::map<int, int> component_of;       // accepting state -> component id
  std::vector<MemorylessPolicy> inside;  // staying policy per component id
};

SwitchingPolicy make_switching_policy(const TwoStage& ts, const SweepPoint& point);

}  // namespace handoff
