#include "handoff/rabin.hpp"

#include <algorithm>

#include "handoff/errors.hpp"

namespace handoff {

Id dra_step(const RabinAutomaton& a, const Id& q, const Letter& letter) {
  if (std::find(a.states.begin(), a.states.end(), q) == a.states.end())
    throw not_found_error("dra_step: unknown automaton state '" + q + "'");
  for (const auto& p : letter)
    if (std::find(a.ap.begin(), a.ap.end(), p) == a.ap.end())
      throw not_found_error("dra_step: proposition '" + p +
                            "' is not in the automaton alphabet");
  if (auto it = a.transitions.find(q); it != a.transitions.end()) {
    if (auto jt = it->second.find(letter); jt != it->second.end()) return jt->second;
  }
  if (auto it = a.default_successor.find(q); it != a.default_successor.end())
    return it->second;
  std::string txt = "{";
  for (const auto& p : letter) txt += (txt.size() > 1 ? "," : "") + p;
  throw not_found_error("dra_step: state '" + q + "' has no transition for letter " +
                        txt + "} and no default successor");
}

std::vector<Violation> validate_automaton(const RabinAutomaton& a) {
  std::vector<Violation> out;
  std::set<Id> seen;
  for (const auto& q : a.states) {
    if (!well_formed_id(q)) out.push_back({"states", "ill-formed id '" + q + "'"});
    if (!seen.insert(q).second) out.push_back({"states", "duplicate id '" + q + "'"});
  }
  if (a.states.empty()) out.push_back({"states", "automaton has no states"});

  std::set<Id> state_set(a.states.begin(), a.states.end());
  std::set<Id> ap_set;
  for (const auto& p : a.ap) {
    if (!well_formed_id(p)) out.push_back({"ap", "ill-formed proposition '" + p + "'"});
    if (!ap_set.insert(p).second) out.push_back({"ap", "duplicate proposition '" + p + "'"});
  }

  if (!state_set.count(a.initial))
    out.push_back({"initial", "unknown state '" + a.initial + "'"});

  std::map<Id, size_t> listed;
  for (const auto& [q, by_letter] : a.transitions) {
    if (!state_set.count(q))
      out.push_back({"transitions", "unknown source state '" + q + "'"});
    for (const auto& [letter, succ] : by_letter) {
      std::string where = "transitions[" + q + "]";
      for (const auto& p : letter)
        if (!ap_set.count(p))
          out.push_back({where, "letter uses undeclared proposition '" + p + "'"});
      if (!state_set.count(succ))
        out.push_back({where, "unknown successor '" + succ + "'"});
    }
    listed[q] = by_letter.size();
  }
  for (const auto& [q, succ] : a.default_successor) {
    if (!state_set.count(q))
      out.push_back({"default", "unknown source state '" + q + "'"});
    if (!state_set.count(succ))
      out.push_back({"default", "unknown successor '" + succ + "'"});
  }

  // Totality: a default successor, or one entry per letter of 2^|AP|.
  if (a.ap.size() <= 20) {
    size_t full = size_t{1} << a.ap.size();
    for (const auto& q : a.states)
      if (!a.default_successor.count(q) && listed[q] < full)
        out.push_back({"transitions",
                       "state '" + q + "' lists " + std::to_string(listed[q]) + " of " +
                           std::to_string(full) + " letters and has no default successor"});
  } else {
    for (const auto& q : a.states)
      if (!a.default_successor.count(q))
        out.push_back({"transitions",
                       "state '" + q + "' needs a default successor (alphabet too large "
                       "to enumerate)"});
  }

  if (a.pairs.empty())
    out.push_back({"pairs", "automaton needs at least one acceptance pair"});
  for (size_t i = 0; i < a.pairs.size(); ++i) {
    for (const auto& q : a.pairs[i].avoid)
      if (!state_set.count(q))
        out.push_back({"pairs[" + std::to_string(i) + "].avoid", "unknown state '" + q + "'"});
    for (const auto& q : a.pairs[i].repeat)
      if (!state_set.count(q))
        out.push_back({"pairs[" + std::to_string(i) + "].repeat", "unknown state '" + q + "'"});
  }
  return out;
}

}  // namespace handoff
