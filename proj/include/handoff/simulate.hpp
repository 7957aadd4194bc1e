#pragma once

#include <cstdint>
#include <optional>

#include "handoff/synthesis.hpp"

namespace handoff {

struct SimOptions {
  std::uint64_t seed = 1;
  int horizon = 2000;
};

/** Post-switch suffix length a trace needs before its recurrence behaviour
 *  is judged, and the window within which recurrent states must reappear. */
inline constexpr int kSuffixWindow = 500;

struct Trace {
  std::vector<int> states;   // v_0 .. v_T
  std::vector<int> actions;  // global action index per step
  std::vector<double> costs;
  std::optional<int> switch_time;  // first t with v_t accepting
  double discounted_cost = 0.0;
  double reach_sample = 0.0;  // gamma^(crossing step); 1 if born accepting; 0 if never
};

/**
 * One rollout of a switching policy, fully determined by the seed. The walk
 * follows the outside policy until the first accepting state, then the
 * staying policy of that state's component for the rest of the horizon.
 */
Trace simulate(const ProductMdp& p, const RewardVector& rewards, const SwitchingPolicy& pol,
               const SimOptions& opt);

struct Estimate {
  int traces = 0;
  double reach_mean = 0.0, reach_se = 0.0;
  double cost_mean = 0.0, cost_se = 0.0;
  // Horizon-truncation error bounds on the two means: tails past the horizon
  // contribute at most gamma^h to reach, gamma^h * cmax / (1 - gamma) to cost.
  double reach_truncation = 0.0;
  double cost_truncation = 0.0;
  long switched = 0;           // traces that reached an accepting state
  long qualified = 0;          // switched traces with >= kSuffixWindow steps left
  long recurrent_covered = 0;  // qualified traces revisiting all of their final
                               // recurrent class within the last window
  long component_covered = 0;  // qualified traces doing so for the whole component
  std::map<int, long> occupation;  // accepting state -> total post-switch visits
};

/**
 * Monte-Carlo summary over n rollouts; trace i uses a split of the base seed
 * so runs are reproducible and extendable. Per-trace recurrence bookkeeping
 * compares the window of last visits against the recurrent classes of the
 * active component policies (and, stricter, whole components).
 */
Estimate estimate(const ProductMdp& p, const RewardVector& rewards, const SwitchingPolicy& pol,
                  int n, const SimOptions& opt);

}  // namespace handoff
