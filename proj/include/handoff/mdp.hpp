#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "handoff/distribution.hpp"

namespace handoff {

/** One validation finding: where in the model, and what is wrong. */
struct Violation {
  std::string where;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/**
 * Labeled discounted MDP. States, actions and atomic propositions are
 * string ids; the transition map is partial (an absent (state, action)
 * key means the action is not enabled there).
 *
 * Ids may not be empty and may not contain '|', which is reserved as the
 * separator in composite state/action ids.
 */
struct LabeledMdp {
  std::vector<Id> states;
  std::vector<Id> actions;
  std::vector<Id> ap;
  std::map<Id, std::set<Id>> labels;  // states absent from the map carry the empty label
  Distribution initial;
  std::map<std::pair<Id, Id>, Distribution> transitions;  // (state, action) -> successor dist
  double gamma = 0.0;

  bool operator==(const LabeledMdp&) const = default;
};

/**
 * Operator cognitive model: attention states, attention-request events,
 * stochastic attention dynamics, per-transition attention cost, and the
 * set of attention states in which the operator can take over control.
 */
struct CognitiveModel {
  std::vector<Id> states;   // attention levels H
  std::vector<Id> events;   // attention-request events E
  Distribution initial;
  std::map<std::pair<Id, Id>, Distribution> transitions;  // (h, e) -> dist over h'
  std::map<std::tuple<Id, Id, Id>, double> cost;          // (h, e, h') -> cost, default 0
  std::set<Id> takeover;    // attention states where operator actions are enabled
  double gamma = 0.0;

  double cost_of(const Id& h, const Id& e, const Id& h2) const {
    auto it = cost.find({h, e, h2});
    return it == cost.end() ? 0.0 : it->second;
  }

  bool operator==(const CognitiveModel&) const = default;
};

/** Actions enabled at `s`: those with a transition entry. Throws
 *  not_found_error for an unknown state id. */
std::set<Id> enabled_actions(const LabeledMdp& m, const Id& s);

/**
 * Full structural validation. Checks id well-formedness and uniqueness,
 * per-(state,action) distribution validity, absence of deadlock states,
 * label/AP consistency, initial distribution support, and gamma in (0,1).
 * Returns every violation found; an empty result means the model is valid.
 */
std::vector<Violation> validate_mdp(const LabeledMdp& m);

/** Validation for cognitive models: transition totality over H x E,
 *  distribution validity, finite non-negative costs on known triples,
 *  non-empty takeover set contained in H, gamma in (0,1). */
std::vector<Violation> validate_cognitive(const CognitiveModel& c);

/** Shared id well-formedness rule: non-empty, no '|' separator. */
bool well_formed_id(const Id& id);

}  // namespace handoff
