#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "handoff/mdp.hpp"

namespace handoff {

/** A letter of the automaton alphabet: the set of propositions that hold. */
using Letter = std::set<Id>;

struct RabinPair {
  std::set<Id> avoid;   // J: visited finitely often by accepting runs
  std::set<Id> repeat;  // K: visited infinitely often by accepting runs

  bool operator==(const RabinPair&) const = default;
};

/**
 * Deterministic Rabin automaton over the alphabet 2^AP.
 *
 * The transition function is given per state as an explicit letter->successor
 * map plus an optional default successor for unlisted letters. The function
 * must be total: every state needs either a default or an explicit entry for
 * all 2^|AP| letters.
 */
struct RabinAutomaton {
  std::vector<Id> states;
  std::vector<Id> ap;
  Id initial;
  std::map<Id, std::map<Letter, Id>> transitions;
  std::map<Id, Id> default_successor;  // per-state fallback for unlisted letters
  std::vector<RabinPair> pairs;

  bool operator==(const RabinAutomaton&) const = default;
};

/**
 * Successor state for reading `letter` in state `q`.
 *
 * Propositions in the letter that the automaton does not declare are a
 * caller error (not_found_error), as is an unknown state or a state with
 * neither an explicit entry nor a default for the letter.
 */
Id dra_step(const RabinAutomaton& a, const Id& q, const Letter& letter);

/** Structural validation: non-empty state set, at least one acceptance pair,
 *  known initial state, totality of the transition function, pair/transition
 *  targets drawn from the declared states and alphabet. */
std::vector<Violation> validate_automaton(const RabinAutomaton& a);

}  // namespace handoff
