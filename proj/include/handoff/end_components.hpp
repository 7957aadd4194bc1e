#pragma once

#include <map>
#include <set>
#include <vector>

#include "handoff/compose.hpp"

namespace handoff {

/**
 * End component of a product MDP: a set of states together with, per state,
 * the actions whose entire successor support stays inside the set. The
 * state set is strongly connected under those actions and every state keeps
 * at least one such action.
 *
 * States are product indices (sorted); staying actions are global action
 * indices (sorted per state).
 */
struct EndComponent {
  std::vector<int> states;
  std::map<int, std::vector<int>> staying;  // state -> staying actions

  bool operator==(const EndComponent&) const = default;
};

/**
 * Maximal end components, pairwise disjoint, sorted by smallest member
 * state. Computed by the standard fixpoint: repeatedly decompose the
 * candidate sub-MDP into SCCs and prune actions whose support leaves the
 * containing SCC (dropping states left without actions) until stable.
 */
std::vector<EndComponent> maximal_end_components(const ProductMdp& p);

/**
 * Accepting end components. For each acceptance pair (J, K): remove the
 * J-states, take the maximal end components of the remaining sub-MDP, and
 * keep those containing at least one K-state. Components found under
 * several pairs are merged by state-set equality (staying actions unioned).
 * Sorted by smallest member state; the position in the returned vector is
 * the component id used elsewhere.
 */
std::vector<EndComponent> accepting_end_components(const ProductMdp& p);

/** Union of the component state sets, sorted ascending. */
std::vector<int> accepting_states_union(const std::vector<EndComponent>& aecs);

}  // namespace handoff
