#include "handoff/mdp.hpp"

#include <algorithm>

#include "handoff/errors.hpp"

namespace handoff {

bool well_formed_id(const Id& id) {
  return !id.empty() && id.find('|') == std::string::npos;
}

std::set<Id> enabled_actions(const LabeledMdp& m, const Id& s) {
  if (std::find(m.states.begin(), m.states.end(), s) == m.states.end())
    throw not_found_error("enabled_actions: unknown state '" + s + "'");
  std::set<Id> out;
  for (const auto& [key, dist] : m.transitions) {
    (void)dist;
    if (key.first == s) out.insert(key.second);
  }
  return out;
}

namespace {

void check_id_list(const std::vector<Id>& ids, const std::string& what,
                   std::vector<Violation>& out) {
  std::set<Id> seen;
  for (const auto& id : ids) {
    if (!well_formed_id(id))
      out.push_back({what, "ill-formed id '" + id + "' (empty or contains '|')"});
    if (!seen.insert(id).second) out.push_back({what, "duplicate id '" + id + "'"});
  }
}

void check_initial(const Distribution& d, const std::set<Id>& known,
                   const std::string& what, std::vector<Violation>& out) {
  if (auto msg = d.defect()) out.push_back({what, *msg});
  for (const auto& [id, p] : d.entries) {
    (void)p;
    if (!known.count(id)) out.push_back({what, "unknown state '" + id + "'"});
  }
}

}  // namespace

std::vector<Violation> validate_mdp(const LabeledMdp& m) {
  std::vector<Violation> out;
  check_id_list(m.states, "states", out);
  check_id_list(m.actions, "actions", out);
  check_id_list(m.ap, "ap", out);
  if (m.states.empty()) out.push_back({"states", "model has no states"});
  if (m.actions.empty()) out.push_back({"actions", "model has no actions"});

  std::set<Id> state_set(m.states.begin(), m.states.end());
  std::set<Id> action_set(m.actions.begin(), m.actions.end());
  std::set<Id> ap_set(m.ap.begin(), m.ap.end());

  for (const auto& [s, props] : m.labels) {
    if (!state_set.count(s)) out.push_back({"labels", "unknown state '" + s + "'"});
    for (const auto& p : props)
      if (!ap_set.count(p))
        out.push_back({"labels[" + s + "]", "proposition '" + p + "' not declared in ap"});
  }

  check_initial(m.initial, state_set, "initial", out);

  std::set<Id> with_action;
  for (const auto& [key, dist] : m.transitions) {
    const auto& [s, a] = key;
    std::string where = "transitions[" + s + "," + a + "]";
    if (!state_set.count(s)) out.push_back({where, "unknown state '" + s + "'"});
    if (!action_set.count(a)) out.push_back({where, "unknown action '" + a + "'"});
    if (auto msg = dist.defect()) out.push_back({where, *msg});
    for (const auto& [succ, p] : dist.entries) {
      (void)p;
      if (!state_set.count(succ))
        out.push_back({where, "unknown successor state '" + succ + "'"});
    }
    with_action.insert(s);
  }
  for (const auto& s : m.states)
    if (!with_action.count(s))
      out.push_back({"transitions", "deadlock state '" + s + "' has no enabled action"});

  if (!(m.gamma > 0.0 && m.gamma < 1.0))
    out.push_back({"gamma", "discount factor must lie in (0,1)"});
  return out;
}

std::vector<Violation> validate_cognitive(const CognitiveModel& c) {
  std::vector<Violation> out;
  check_id_list(c.states, "states", out);
  check_id_list(c.events, "events", out);
  if (c.states.empty()) out.push_back({"states", "cognitive model has no states"});
  if (c.events.empty()) out.push_back({"events", "cognitive model has no events"});

  std::set<Id> state_set(c.states.begin(), c.states.end());
  std::set<Id> event_set(c.events.begin(), c.events.end());

  check_initial(c.initial, state_set, "initial", out);

  // Attention dynamics must be total: one distribution per (h, e).
  for (const auto& h : c.states)
    for (const auto& e : c.events)
      if (!c.transitions.count({h, e}))
        out.push_back({"transitions", "missing distribution for (" + h + "," + e + ")"});

  for (const auto& [key, dist] : c.transitions) {
    const auto& [h, e] = key;
    std::string where = "transitions[" + h + "," + e + "]";
    if (!state_set.count(h)) out.push_back({where, "unknown attention state '" + h + "'"});
    if (!event_set.count(e)) out.push_back({where, "unknown event '" + e + "'"});
    if (auto msg = dist.defect()) out.push_back({where, *msg});
    for (const auto& [succ, p] : dist.entries) {
      (void)p;
      if (!state_set.count(succ))
        out.push_back({where, "unknown successor '" + succ + "'"});
    }
  }

  for (const auto& [key, value] : c.cost) {
    const auto& [h, e, h2] = key;
    std::string where = "cost[" + h + "," + e + "," + h2 + "]";
    if (!state_set.count(h) || !state_set.count(h2))
      out.push_back({where, "unknown attention state"});
    if (!event_set.count(e)) out.push_back({where, "unknown event '" + e + "'"});
    if (!std::isfinite(value) || value < 0.0)
      out.push_back({where, "cost must be finite and non-negative"});
  }

  if (c.takeover.empty())
    out.push_back({"takeover", "takeover set is empty"});
  for (const auto& h : c.takeover)
    if (!state_set.count(h))
      out.push_back({"takeover", "unknown attention state '" + h + "'"});

  if (!(c.gamma > 0.0 && c.gamma < 1.0))
    out.push_back({"gamma", "discount factor must lie in (0,1)"});
  return out;
}

}  // namespace handoff
