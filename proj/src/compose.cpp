#include "handoff/compose.hpp"

#include <algorithm>
#include <deque>

#include "handoff/errors.hpp"

namespace handoff {

double SharedAutonomyMdp::cost(const Id& from, const Id& action, const Id& to) const {
  auto fs = state_of.find(from);
  auto ts = state_of.find(to);
  auto ac = action_of.find(action);
  if (fs == state_of.end() || ts == state_of.end() || ac == action_of.end())
    throw not_found_error("cost: unknown composite id");
  return att.cost_of(fs->second.attention, ac->second.event, ts->second.attention);
}

namespace {

// Collects every way ma and mh disagree on the shared structure.
std::vector<std::string> structural_mismatches(const LabeledMdp& ma, const LabeledMdp& mh) {
  std::vector<std::string> out;
  std::set<Id> sa(ma.states.begin(), ma.states.end());
  std::set<Id> sh(mh.states.begin(), mh.states.end());
  for (const auto& s : sa)
    if (!sh.count(s)) out.push_back("state '" + s + "' only in autonomous model");
  for (const auto& s : sh)
    if (!sa.count(s)) out.push_back("state '" + s + "' only in human model");

  std::set<Id> pa(ma.ap.begin(), ma.ap.end());
  std::set<Id> ph(mh.ap.begin(), mh.ap.end());
  if (pa != ph) out.push_back("atomic proposition sets differ");

  for (const auto& s : sa) {
    if (!sh.count(s)) continue;
    auto la = ma.labels.count(s) ? ma.labels.at(s) : std::set<Id>{};
    auto lh = mh.labels.count(s) ? mh.labels.at(s) : std::set<Id>{};
    if (la != lh) out.push_back("labels differ at state '" + s + "'");
  }

  if (ma.initial.entries != mh.initial.entries)
    out.push_back("initial distributions differ");
  return out;
}

}  // namespace

SharedAutonomyMdp compose_shared_autonomy(const LabeledMdp& ma, const LabeledMdp& mh,
                                          const CognitiveModel& att) {
  auto mism = structural_mismatches(ma, mh);
  if (!mism.empty()) throw composition_error("models do not share structure", mism);

  SharedAutonomyMdp out;
  out.att = att;
  LabeledMdp& m = out.mdp;
  m.ap = ma.ap;
  m.gamma = att.gamma;

  for (const auto& s : ma.states)
    for (const auto& h : att.states) {
      SaState st{s, h};
      m.states.push_back(st.id());
      out.state_of.emplace(st.id(), st);
      if (auto it = ma.labels.find(s); it != ma.labels.end() && !it->second.empty())
        m.labels[st.id()] = it->second;
    }

  // Initial distribution is the product of the system and attention priors.
  for (const auto& [s, ps] : ma.initial.entries)
    for (const auto& [h, ph] : att.initial.entries)
      if (ps * ph > 0.0) m.initial.entries[SaState{s, h}.id()] = ps * ph;

  // One composite action per (physical action, controller, event). Human
  // copies exist only if the human model enables the action somewhere.
  std::set<Id> added;
  auto add_action = [&](const ComposedAction& ca) {
    if (added.insert(ca.id()).second) {
      m.actions.push_back(ca.id());
      out.action_of.emplace(ca.id(), ca);
    }
  };

  auto emit = [&](const LabeledMdp& side, Controller mode) {
    for (const auto& [key, dist] : side.transitions) {
      const auto& [s, a] = key;
      for (const auto& e : att.events) {
        ComposedAction ca{a, mode, e};
        add_action(ca);
        for (const auto& h : att.states) {
          if (mode == Controller::human && !att.takeover.count(h)) continue;
          Distribution joint;
          const Distribution& hdist = att.transitions.at({h, e});
          for (const auto& [s2, p1] : dist.entries)
            for (const auto& [h2, p2] : hdist.entries)
              if (p1 * p2 > 0.0) joint.entries[SaState{s2, h2}.id()] += p1 * p2;
          m.transitions[{SaState{s, h}.id(), ca.id()}] = std::move(joint);
        }
      }
    }
  };
  emit(ma, Controller::autonomous);
  emit(mh, Controller::human);

  std::sort(m.actions.begin(), m.actions.end());
  return out;
}

int ProductMdp::state_index(const Id& id) const {
  auto it = state_lookup.find(id);
  if (it == state_lookup.end())
    throw not_found_error("product: unknown state '" + id + "'");
  return it->second;
}

int ProductMdp::action_index(const Id& id) const {
  auto it = action_lookup.find(id);
  if (it == action_lookup.end())
    throw not_found_error("product: unknown action '" + id + "'");
  return it->second;
}

const ProductRow* ProductMdp::row(int v, int action) const {
  for (const auto& r : rows.at(v))
    if (r.action == action) return &r;
  return nullptr;
}

ProductMdp product_with_dra(const SharedAutonomyMdp& sa, const RabinAutomaton& a) {
  const LabeledMdp& m = sa.mdp;
  ProductMdp p;
  p.gamma = m.gamma;

  for (const auto& [id, ca] : sa.action_of) {
    (void)id;
    p.actions.push_back(ca);
  }
  std::sort(p.actions.begin(), p.actions.end());
  for (size_t i = 0; i < p.actions.size(); ++i)
    p.action_lookup[p.actions[i].id()] = static_cast<int>(i);

  auto label_of = [&](const Id& sa_id) -> Letter {
    if (auto it = m.labels.find(sa_id); it != m.labels.end()) return it->second;
    return {};
  };

  // Transition cache for (automaton state, letter); also validates the
  // letters actually used against the automaton alphabet.
  std::map<std::pair<Id, Letter>, Id> step_cache;
  auto step = [&](const Id& q, const Letter& l) -> const Id& {
    auto key = std::make_pair(q, l);
    auto it = step_cache.find(key);
    if (it == step_cache.end()) it = step_cache.emplace(key, dra_step(a, q, l)).first;
    return it->second;
  };

  auto intern = [&](const Id& sa_id, const Id& q) -> int {
    Id pid = sa_id + "|" + q;
    if (auto it = p.state_lookup.find(pid); it != p.state_lookup.end()) return it->second;
    int idx = static_cast<int>(p.state_ids.size());
    p.state_lookup.emplace(pid, idx);
    p.state_ids.push_back(pid);
    p.sa_of.push_back(sa.state_of.at(sa_id));
    p.q_of.push_back(q);
    p.label_of.push_back(label_of(sa_id));
    p.rows.emplace_back();
    p.initial.push_back(0.0);
    return idx;
  };

  // Seed: the automaton reads the label of the initial composite state.
  std::deque<int> work;
  std::set<int> queued;
  for (const auto& [sa_id, pr] : m.initial.entries) {
    if (pr <= 0.0) continue;
    Id q0 = step(a.initial, label_of(sa_id));
    int v = intern(sa_id, q0);
    p.initial[v] += pr;
    if (queued.insert(v).second) work.push_back(v);
  }

  // Enabled actions per composite state, ordered by action id for
  // deterministic row layout.
  std::map<Id, std::vector<Id>> enabled;
  for (const auto& [key, dist] : m.transitions) {
    (void)dist;
    enabled[key.first].push_back(key.second);
  }
  for (auto& [s, acts] : enabled) std::sort(acts.begin(), acts.end());

  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    const Id sa_id = p.sa_of[v].id();
    const Id q = p.q_of[v];
    auto en = enabled.find(sa_id);
    if (en == enabled.end()) continue;
    for (const auto& act : en->second) {
      const Distribution& dist = m.transitions.at({sa_id, act});
      ProductRow row;
      row.action = p.action_lookup.at(act);
      for (const auto& [succ_sa, pr] : dist.entries) {
        if (pr <= 0.0) continue;
        Id q2 = step(q, label_of(succ_sa));
        int w = intern(succ_sa, q2);
        if (queued.insert(w).second) work.push_back(w);
        double c = sa.cost(sa_id, act, succ_sa);
        row.succ.push_back(w);
        row.prob.push_back(pr);
        row.cost.push_back(c);
        row.expected_cost += pr * c;
      }
      p.rows[v].push_back(std::move(row));
    }
  }

  // Lift the acceptance pairs onto the materialized states.
  for (const auto& pair : a.pairs) {
    ProductAcceptance acc;
    acc.source = pair;
    for (size_t v = 0; v < p.num_states(); ++v) {
      if (pair.avoid.count(p.q_of[v])) acc.avoid_states.push_back(static_cast<int>(v));
      if (pair.repeat.count(p.q_of[v])) acc.repeat_states.push_back(static_cast<int>(v));
    }
    p.acceptance.push_back(std::move(acc));
  }
  return p;
}

}  // namespace handoff
