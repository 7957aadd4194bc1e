#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "handoff/mdp.hpp"
#include "handoff/rabin.hpp"

namespace handoff {

enum class Controller { autonomous, human };

inline const char* controller_tag(Controller c) {
  return c == Controller::autonomous ? "A" : "H";
}

/** Composite action: a physical action under one controller, paired with an
 *  attention-request event. Encoded id "base|A|event" / "base|H|event". */
struct ComposedAction {
  Id base;
  Controller mode = Controller::autonomous;
  Id event;

  Id id() const { return base + "|" + controller_tag(mode) + "|" + event; }
  // Table-style rendering, e.g. "(a_A,1)".
  std::string display() const {
    return "(" + base + "_" + controller_tag(mode) + "," + event + ")";
  }

  auto operator<=>(const ComposedAction&) const = default;
};

/** Composite state: system state paired with attention state. Id "s|h". */
struct SaState {
  Id system;
  Id attention;

  Id id() const { return system + "|" + attention; }

  auto operator<=>(const SaState&) const = default;
};

/**
 * Shared-autonomy MDP: the synchronous composition of an autonomous-control
 * model, a human-control model and the operator's cognitive model.
 *
 * The composite is itself a labeled MDP (states "s|h", actions
 * "base|A/H|event", labels inherited from the system state) plus the
 * attention-cost function over its transitions. Decode tables map the
 * encoded ids back to their structured forms.
 */
struct SharedAutonomyMdp {
  LabeledMdp mdp;
  std::map<Id, SaState> state_of;          // composite state id -> (s, h)
  std::map<Id, ComposedAction> action_of;  // composite action id -> structured action
  CognitiveModel att;                      // retained for the cost function

  /** cost((s,h),(a,e),(s',h')) = attention cost of (h, e, h'). */
  double cost(const Id& from, const Id& action, const Id& to) const;
};

/**
 * Builds the shared-autonomy composition.
 *
 * `ma` and `mh` must agree on states, atomic propositions, labels and the
 * initial distribution (composition_error lists every mismatch otherwise).
 * Human-controlled actions are enabled only at composite states whose
 * attention component lies in att.takeover. The composite discount factor
 * is att.gamma. Every transition factors as T(s,a,s') * T_att(h,e,h').
 */
SharedAutonomyMdp compose_shared_autonomy(const LabeledMdp& ma, const LabeledMdp& mh,
                                          const CognitiveModel& att);

/** Product transition row: one enabled action with its successor fan-out. */
struct ProductRow {
  int action = -1;                 // index into ProductMdp::actions
  std::vector<int> succ;           // product state indices
  std::vector<double> prob;
  std::vector<double> cost;        // attention cost per transition
  double expected_cost = 0.0;      // sum of prob*cost
};

/** Acceptance pair lifted to the product state space. */
struct ProductAcceptance {
  RabinPair source;                // original (J, K) over automaton states
  std::vector<int> avoid_states;   // product states whose q lies in J (sorted)
  std::vector<int> repeat_states;  // product states whose q lies in K (sorted)
};

/**
 * Product of a shared-autonomy MDP with a deterministic Rabin automaton,
 * restricted to the states reachable from the initial distribution.
 *
 * States are (composite state, automaton state) pairs with id "s|h|q".
 * The automaton component of the initial state is seeded by reading the
 * label of the initial system state; each transition advances the automaton
 * on the label of the successor system state.
 *
 * Integer indices are the working representation; `state_ids` carries the
 * printable form. Iteration over `rows[v]` is ordered by action id.
 */
struct ProductMdp {
  std::vector<Id> state_ids;                  // "s|h|q"
  std::vector<SaState> sa_of;                 // composite part per state
  std::vector<Id> q_of;                       // automaton part per state
  std::vector<std::set<Id>> label_of;         // labels of the system component
  std::vector<ComposedAction> actions;        // global action table
  std::vector<std::vector<ProductRow>> rows;  // enabled actions per state
  std::vector<double> initial;                // initial distribution over states
  double gamma = 0.0;
  std::vector<ProductAcceptance> acceptance;

  int state_index(const Id& id) const;        // not_found_error if unknown
  int action_index(const Id& id) const;       // not_found_error if unknown
  const ProductRow* row(int v, int action) const;  // nullptr if not enabled

  size_t num_states() const { return state_ids.size(); }

  std::map<Id, int> state_lookup;
  std::map<Id, int> action_lookup;
};

/** Builds the reachable product. Throws not_found_error if the composite
 *  uses a proposition the automaton does not declare. */
ProductMdp product_with_dra(const SharedAutonomyMdp& sa, const RabinAutomaton& a);

}  // namespace handoff
