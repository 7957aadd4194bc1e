#include "handoff/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace handoff {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& path,
                       const std::string& msg) {
  throw schema_error(where, path + ": " + msg);
}

json parse_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw schema_error(where, e.what());
  }
}

void check_object(const json& j, const std::string& where, const std::string& path) {
  if (!j.is_object()) fail(where, path, "expected an object");
}

void check_fields(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where, const std::string& path) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) known = true;
    if (!known) fail(where, path, "unknown field \"" + item.key() + "\"");
  }
}

const json& require(const json& j, const char* key, const std::string& where,
                    const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, path, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string as_string(const json& j, const std::string& where, const std::string& path) {
  if (!j.is_string()) fail(where, path, "expected a string");
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& where, const std::string& path) {
  if (!j.is_number()) fail(where, path, "expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& where, const std::string& path) {
  if (!j.is_boolean()) fail(where, path, "expected a boolean");
  return j.get<bool>();
}

int as_int(const json& j, const std::string& where, const std::string& path) {
  if (!j.is_number_integer()) fail(where, path, "expected an integer");
  return j.get<int>();
}

std::vector<Id> as_string_array(const json& j, const std::string& where,
                                const std::string& path) {
  if (!j.is_array()) fail(where, path, "expected an array of strings");
  std::vector<Id> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_string(j[i], where, path + "[" + std::to_string(i) + "]"));
  return out;
}

Distribution as_distribution(const json& j, const std::string& where, const std::string& path) {
  check_object(j, where, path);
  Distribution d;
  for (const auto& item : j.items())
    d.entries[item.key()] = as_number(item.value(), where, path + "." + item.key());
  return d;
}

void expect_type(const json& j, const char* want, const std::string& where,
                 const std::string& path) {
  auto it = j.find("type");
  if (it == j.end()) return;
  std::string got = as_string(*it, where, path + ".type");
  if (got != want)
    fail(where, path + ".type", "expected \"" + std::string(want) + "\", found \"" + got + "\"");
}

// ---- labeled MDP --------------------------------------------------------

LabeledMdp mdp_from_json(const json& j, const std::string& where, const std::string& path) {
  check_object(j, where, path);
  check_fields(j, {"type", "states", "actions", "ap", "labels", "initial", "transitions", "gamma"},
               where, path);
  expect_type(j, "mdp", where, path);
  LabeledMdp m;
  m.states = as_string_array(require(j, "states", where, path), where, path + ".states");
  m.actions = as_string_array(require(j, "actions", where, path), where, path + ".actions");
  m.ap = as_string_array(require(j, "ap", where, path), where, path + ".ap");
  if (auto it = j.find("labels"); it != j.end()) {
    check_object(*it, where, path + ".labels");
    for (const auto& item : it->items()) {
      auto props =
          as_string_array(item.value(), where, path + ".labels." + item.key());
      m.labels[item.key()] = std::set<Id>(props.begin(), props.end());
    }
  }
  m.initial = as_distribution(require(j, "initial", where, path), where, path + ".initial");
  const json& tr = require(j, "transitions", where, path);
  if (!tr.is_array()) fail(where, path + ".transitions", "expected an array");
  for (std::size_t i = 0; i < tr.size(); ++i) {
    std::string tp = path + ".transitions[" + std::to_string(i) + "]";
    check_object(tr[i], where, tp);
    check_fields(tr[i], {"from", "action", "to", "p"}, where, tp);
    Id from = as_string(require(tr[i], "from", where, tp), where, tp + ".from");
    Id action = as_string(require(tr[i], "action", where, tp), where, tp + ".action");
    Id to = as_string(require(tr[i], "to", where, tp), where, tp + ".to");
    double p = as_number(require(tr[i], "p", where, tp), where, tp + ".p");
    Distribution& d = m.transitions[{from, action}];
    if (d.entries.count(to)) fail(where, tp, "duplicate transition triple");
    d.entries[to] = p;
  }
  m.gamma = as_number(require(j, "gamma", where, path), where, path + ".gamma");
  return m;
}

json mdp_to_json(const LabeledMdp& m) {
  json j;
  j["type"] = "mdp";
  j["states"] = m.states;
  j["actions"] = m.actions;
  j["ap"] = m.ap;
  json labels = json::object();
  for (const auto& [s, props] : m.labels) labels[s] = std::vector<Id>(props.begin(), props.end());
  j["labels"] = labels;
  json initial = json::object();
  for (const auto& [s, p] : m.initial.entries) initial[s] = p;
  j["initial"] = initial;
  json tr = json::array();
  for (const auto& [key, dist] : m.transitions)
    for (const auto& [to, p] : dist.entries)
      tr.push_back({{"from", key.first}, {"action", key.second}, {"to", to}, {"p", p}});
  j["transitions"] = tr;
  j["gamma"] = m.gamma;
  return j;
}

// ---- cognitive model ----------------------------------------------------

CognitiveModel cognitive_from_json(const json& j, const std::string& where,
                                   const std::string& path) {
  check_object(j, where, path);
  check_fields(
      j, {"type", "states", "events", "initial", "transitions", "cost", "takeover", "gamma"},
      where, path);
  expect_type(j, "cognitive", where, path);
  CognitiveModel c;
  c.states = as_string_array(require(j, "states", where, path), where, path + ".states");
  c.events = as_string_array(require(j, "events", where, path), where, path + ".events");
  c.initial = as_distribution(require(j, "initial", where, path), where, path + ".initial");
  const json& tr = require(j, "transitions", where, path);
  if (!tr.is_array()) fail(where, path + ".transitions", "expected an array");
  for (std::size_t i = 0; i < tr.size(); ++i) {
    std::string tp = path + ".transitions[" + std::to_string(i) + "]";
    check_object(tr[i], where, tp);
    check_fields(tr[i], {"from", "event", "to", "p"}, where, tp);
    Id from = as_string(require(tr[i], "from", where, tp), where, tp + ".from");
    Id event = as_string(require(tr[i], "event", where, tp), where, tp + ".event");
    Id to = as_string(require(tr[i], "to", where, tp), where, tp + ".to");
    double p = as_number(require(tr[i], "p", where, tp), where, tp + ".p");
    Distribution& d = c.transitions[{from, event}];
    if (d.entries.count(to)) fail(where, tp, "duplicate transition triple");
    d.entries[to] = p;
  }
  const json& co = require(j, "cost", where, path);
  if (!co.is_array()) fail(where, path + ".cost", "expected an array");
  for (std::size_t i = 0; i < co.size(); ++i) {
    std::string cp = path + ".cost[" + std::to_string(i) + "]";
    check_object(co[i], where, cp);
    check_fields(co[i], {"from", "event", "to", "c"}, where, cp);
    Id from = as_string(require(co[i], "from", where, cp), where, cp + ".from");
    Id event = as_string(require(co[i], "event", where, cp), where, cp + ".event");
    Id to = as_string(require(co[i], "to", where, cp), where, cp + ".to");
    double value = as_number(require(co[i], "c", where, cp), where, cp + ".c");
    auto key = std::make_tuple(from, event, to);
    if (c.cost.count(key)) fail(where, cp, "duplicate cost triple");
    c.cost[key] = value;
  }
  auto take = as_string_array(require(j, "takeover", where, path), where, path + ".takeover");
  c.takeover = std::set<Id>(take.begin(), take.end());
  c.gamma = as_number(require(j, "gamma", where, path), where, path + ".gamma");
  return c;
}

json cognitive_to_json(const CognitiveModel& c) {
  json j;
  j["type"] = "cognitive";
  j["states"] = c.states;
  j["events"] = c.events;
  json initial = json::object();
  for (const auto& [h, p] : c.initial.entries) initial[h] = p;
  j["initial"] = initial;
  json tr = json::array();
  for (const auto& [key, dist] : c.transitions)
    for (const auto& [to, p] : dist.entries)
      tr.push_back({{"from", key.first}, {"event", key.second}, {"to", to}, {"p", p}});
  j["transitions"] = tr;
  json co = json::array();
  for (const auto& [key, value] : c.cost)
    co.push_back({{"from", std::get<0>(key)},
                  {"event", std::get<1>(key)},
                  {"to", std::get<2>(key)},
                  {"c", value}});
  j["cost"] = co;
  j["takeover"] = std::vector<Id>(c.takeover.begin(), c.takeover.end());
  j["gamma"] = c.gamma;
  return j;
}

// ---- automaton -----------------------------------------------------------

RabinAutomaton automaton_from_json(const json& j, const std::string& where,
                                   const std::string& path) {
  check_object(j, where, path);
  check_fields(j, {"type", "states", "ap", "initial", "transitions", "default", "pairs"}, where,
               path);
  expect_type(j, "automaton", where, path);
  RabinAutomaton a;
  a.states = as_string_array(require(j, "states", where, path), where, path + ".states");
  a.ap = as_string_array(require(j, "ap", where, path), where, path + ".ap");
  a.initial = as_string(require(j, "initial", where, path), where, path + ".initial");
  const json& tr = require(j, "transitions", where, path);
  if (!tr.is_array()) fail(where, path + ".transitions", "expected an array");
  for (std::size_t i = 0; i < tr.size(); ++i) {
    std::string tp = path + ".transitions[" + std::to_string(i) + "]";
    check_object(tr[i], where, tp);
    check_fields(tr[i], {"from", "letter", "to"}, where, tp);
    Id from = as_string(require(tr[i], "from", where, tp), where, tp + ".from");
    auto props = as_string_array(require(tr[i], "letter", where, tp), where, tp + ".letter");
    Letter letter(props.begin(), props.end());
    Id to = as_string(require(tr[i], "to", where, tp), where, tp + ".to");
    auto& row = a.transitions[from];
    if (row.count(letter)) fail(where, tp, "duplicate (state, letter) transition");
    row[letter] = to;
  }
  if (auto it = j.find("default"); it != j.end()) {
    check_object(*it, where, path + ".default");
    for (const auto& item : it->items())
      a.default_successor[item.key()] =
          as_string(item.value(), where, path + ".default." + item.key());
  }
  const json& pairs = require(j, "pairs", where, path);
  if (!pairs.is_array()) fail(where, path + ".pairs", "expected an array");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::string pp = path + ".pairs[" + std::to_string(i) + "]";
    check_object(pairs[i], where, pp);
    check_fields(pairs[i], {"avoid", "repeat"}, where, pp);
    RabinPair pair;
    auto avoid = as_string_array(require(pairs[i], "avoid", where, pp), where, pp + ".avoid");
    auto repeat = as_string_array(require(pairs[i], "repeat", where, pp), where, pp + ".repeat");
    pair.avoid = std::set<Id>(avoid.begin(), avoid.end());
    pair.repeat = std::set<Id>(repeat.begin(), repeat.end());
    a.pairs.push_back(std::move(pair));
  }
  return a;
}

json automaton_to_json(const RabinAutomaton& a) {
  json j;
  j["type"] = "automaton";
  j["states"] = a.states;
  j["ap"] = a.ap;
  j["initial"] = a.initial;
  json tr = json::array();
  for (const auto& [from, row] : a.transitions)
    for (const auto& [letter, to] : row)
      tr.push_back({{"from", from},
                    {"letter", std::vector<Id>(letter.begin(), letter.end())},
                    {"to", to}});
  j["transitions"] = tr;
  json def = json::object();
  for (const auto& [q, to] : a.default_successor) def[q] = to;
  j["default"] = def;
  json pairs = json::array();
  for (const RabinPair& pair : a.pairs)
    pairs.push_back({{"avoid", std::vector<Id>(pair.avoid.begin(), pair.avoid.end())},
                     {"repeat", std::vector<Id>(pair.repeat.begin(), pair.repeat.end())}});
  j["pairs"] = pairs;
  return j;
}

// ---- policies and bundles -------------------------------------------------

json policy_to_json(const std::map<Id, std::map<Id, double>>& policy) {
  json j = json::object();
  for (const auto& [state, row] : policy) {
    json r = json::object();
    for (const auto& [action, p] : row) r[action] = p;
    j[state] = r;
  }
  return j;
}

std::map<Id, std::map<Id, double>> policy_from_json(const json& j, const std::string& where,
                                                    const std::string& path) {
  check_object(j, where, path);
  std::map<Id, std::map<Id, double>> out;
  for (const auto& state : j.items()) {
    check_object(state.value(), where, path + "." + state.key());
    for (const auto& action : state.value().items())
      out[state.key()][action.key()] = as_number(
          action.value(), where, path + "." + state.key() + "." + action.key());
  }
  return out;
}

std::map<Id, std::map<Id, double>> policy_ids(const ProductMdp& p, const MemorylessPolicy& g) {
  std::map<Id, std::map<Id, double>> out;
  for (const auto& [v, row] : g.choice)
    for (const auto& [a, pr] : row) out[p.state_ids[v]][p.actions[a].id()] = pr;
  return out;
}

MemorylessPolicy policy_indices(const ProductMdp& p,
                                const std::map<Id, std::map<Id, double>>& ids) {
  MemorylessPolicy g;
  for (const auto& [state, row] : ids)
    for (const auto& [action, pr] : row)
      g.choice[p.state_index(state)][p.action_index(action)] = pr;
  return g;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw io_error("read failure on " + path);
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot create " + path);
  out << content;
  out.flush();
  if (!out) throw io_error("write failure on " + path);
}

ModelKind sniff_kind(const std::string& text, const std::string& where) {
  json j = parse_text(text, where);
  check_object(j, where, "$");
  if (auto it = j.find("type"); it != j.end()) {
    std::string t = as_string(*it, where, "$.type");
    if (t == "mdp") return ModelKind::labeled_mdp;
    if (t == "cognitive") return ModelKind::cognitive;
    if (t == "automaton") return ModelKind::automaton;
    if (t == "bundle") return ModelKind::bundle;
    fail(where, "$.type", "unknown document type \"" + t + "\"");
  }
  if (j.contains("models")) return ModelKind::bundle;
  if (j.contains("pairs")) return ModelKind::automaton;
  if (j.contains("events")) return ModelKind::cognitive;
  return ModelKind::labeled_mdp;
}

LabeledMdp parse_labeled_mdp(const std::string& text, const std::string& where) {
  return mdp_from_json(parse_text(text, where), where, "$");
}

CognitiveModel parse_cognitive(const std::string& text, const std::string& where) {
  return cognitive_from_json(parse_text(text, where), where, "$");
}

RabinAutomaton parse_automaton(const std::string& text, const std::string& where) {
  return automaton_from_json(parse_text(text, where), where, "$");
}

std::string serialize(const LabeledMdp& m) { return dump(mdp_to_json(m)); }
std::string serialize(const CognitiveModel& c) { return dump(cognitive_to_json(c)); }
std::string serialize(const RabinAutomaton& a) { return dump(automaton_to_json(a)); }

Bundle make_bundle(const InputModels& in, const TwoStage& ts, const SweepPoint& point,
                   double eps_visit) {
  if (!point.solved)
    throw invariant_error("cannot bundle an unsolved point: " + point.message);
  Bundle b;
  b.models = in;
  b.weights = point.weights;
  b.lambda = point.lambda;
  b.recovered = point.recovered;
  b.eps_aug = point.eps_aug;
  b.eps_visit = eps_visit;
  b.scalar_objective = point.scalar_objective;
  b.profile = point.profile;
  b.stage1 = policy_ids(ts.product, point.policy);
  if (ts.accepting_empty())
    b.warnings.push_back(
        "no accepting end component: the objective is unsatisfiable from every reachable state; "
        "the policy only minimizes attention cost");
  for (std::size_t i = 0; i < ts.accepting.size(); ++i) {
    Bundle::Component comp;
    for (int v : ts.accepting[i].states) comp.states.push_back(ts.product.state_ids[v]);
    comp.policy = policy_ids(ts.product, ts.terminal.solutions[i].policy);
    for (const auto& [v, c] : ts.terminal.component_values[i])
      comp.terminal[ts.product.state_ids[v]] = c;
    comp.floor = ts.terminal.floors[i];
    comp.irreducible = ts.terminal.solutions[i].irreducible;
    b.components.push_back(std::move(comp));
  }
  for (const auto& [v, c] : ts.terminal.value) b.terminal[ts.product.state_ids[v]] = c;
  for (const auto& [v, k] : ts.terminal.component_of)
    b.component_of[ts.product.state_ids[v]] = k;
  return b;
}

std::string serialize(const Bundle& b) {
  json j;
  j["type"] = "bundle";
  j["weights"] = b.weights;
  j["lambda"] = b.lambda;
  j["recovered"] = b.recovered;
  j["eps_aug"] = b.eps_aug;
  j["eps_visit"] = b.eps_visit;
  j["scalar_objective"] = b.scalar_objective;
  j["profile"] = {{"u1", b.profile.u1}, {"u2", b.profile.u2}};
  j["warnings"] = b.warnings;
  j["models"] = {{"ma", mdp_to_json(b.models.ma)},
                 {"mh", mdp_to_json(b.models.mh)},
                 {"att", cognitive_to_json(b.models.att)},
                 {"dra", automaton_to_json(b.models.dra)}};
  j["stage1"] = policy_to_json(b.stage1);
  json comps = json::array();
  for (const Bundle::Component& c : b.components) {
    json jc;
    jc["states"] = c.states;
    jc["policy"] = policy_to_json(c.policy);
    json term = json::object();
    for (const auto& [s, v] : c.terminal) term[s] = v;
    jc["terminal"] = term;
    jc["floor"] = c.floor;
    jc["irreducible"] = c.irreducible;
    comps.push_back(std::move(jc));
  }
  j["components"] = comps;
  json term = json::object();
  for (const auto& [s, v] : b.terminal) term[s] = v;
  j["terminal"] = term;
  json compof = json::object();
  for (const auto& [s, k] : b.component_of) compof[s] = k;
  j["component_of"] = compof;
  return dump(j);
}

Bundle parse_bundle(const std::string& text, const std::string& where) {
  json j = parse_text(text, where);
  check_object(j, where, "$");
  check_fields(j,
               {"type", "weights", "lambda", "recovered", "eps_aug", "eps_visit",
                "scalar_objective", "profile", "warnings", "models", "stage1", "components",
                "terminal", "component_of"},
               where, "$");
  expect_type(j, "bundle", where, "$");
  Bundle b;
  auto pair_of = [&](const char* key) {
    const json& v = require(j, key, where, "$");
    if (!v.is_array() || v.size() != 2)
      fail(where, std::string("$.") + key, "expected an array of two numbers");
    return std::array<double, 2>{as_number(v[0], where, std::string("$.") + key + "[0]"),
                                 as_number(v[1], where, std::string("$.") + key + "[1]")};
  };
  b.weights = pair_of("weights");
  b.lambda = pair_of("lambda");
  b.recovered = pair_of("recovered");
  b.eps_aug = as_number(require(j, "eps_aug", where, "$"), where, "$.eps_aug");
  b.eps_visit = as_number(require(j, "eps_visit", where, "$"), where, "$.eps_visit");
  b.scalar_objective =
      as_number(require(j, "scalar_objective", where, "$"), where, "$.scalar_objective");
  const json& prof = require(j, "profile", where, "$");
  check_object(prof, where, "$.profile");
  check_fields(prof, {"u1", "u2"}, where, "$.profile");
  b.profile.u1 = as_number(require(prof, "u1", where, "$.profile"), where, "$.profile.u1");
  b.profile.u2 = as_number(require(prof, "u2", where, "$.profile"), where, "$.profile.u2");
  for (const auto& w : require(j, "warnings", where, "$"))
    b.warnings.push_back(as_string(w, where, "$.warnings[]"));
  const json& models = require(j, "models", where, "$");
  check_object(models, where, "$.models");
  check_fields(models, {"ma", "mh", "att", "dra"}, where, "$.models");
  b.models.ma = mdp_from_json(require(models, "ma", where, "$.models"), where, "$.models.ma");
  b.models.mh = mdp_from_json(require(models, "mh", where, "$.models"), where, "$.models.mh");
  b.models.att =
      cognitive_from_json(require(models, "att", where, "$.models"), where, "$.models.att");
  b.models.dra =
      automaton_from_json(require(models, "dra", where, "$.models"), where, "$.models.dra");
  b.stage1 = policy_from_json(require(j, "stage1", where, "$"), where, "$.stage1");
  const json& comps = require(j, "components", where, "$");
  if (!comps.is_array()) fail(where, "$.components", "expected an array");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::string cp = "$.components[" + std::to_string(i) + "]";
    check_object(comps[i], where, cp);
    check_fields(comps[i], {"states", "policy", "terminal", "floor", "irreducible"}, where, cp);
    Bundle::Component c;
    c.states = as_string_array(require(comps[i], "states", where, cp), where, cp + ".states");
    c.policy = policy_from_json(require(comps[i], "policy", where, cp), where, cp + ".policy");
    const json& term = require(comps[i], "terminal", where, cp);
    check_object(term, where, cp + ".terminal");
    for (const auto& item : term.items())
      c.terminal[item.key()] = as_number(item.value(), where, cp + ".terminal." + item.key());
    c.floor = as_number(require(comps[i], "floor", where, cp), where, cp + ".floor");
    c.irreducible =
        as_bool(require(comps[i], "irreducible", where, cp), where, cp + ".irreducible");
    b.components.push_back(std::move(c));
  }
  const json& term = require(j, "terminal", where, "$");
  check_object(term, where, "$.terminal");
  for (const auto& item : term.items())
    b.terminal[item.key()] = as_number(item.value(), where, "$.terminal." + item.key());
  const json& compof = require(j, "component_of", where, "$");
  check_object(compof, where, "$.component_of");
  for (const auto& item : compof.items())
    b.component_of[item.key()] = as_int(item.value(), where, "$.component_of." + item.key());
  return b;
}

RunnableBundle instantiate(const Bundle& b) {
  RunnableBundle rb;
  rb.sa = compose_shared_autonomy(b.models.ma, b.models.mh, b.models.att);
  rb.product = product_with_dra(rb.sa, b.models.dra);
  try {
    TerminalCosts tc;
    std::vector<int> target;
    for (const auto& [id, c] : b.terminal) {
      int v = rb.product.state_index(id);
      tc.value[v] = c;
      target.push_back(v);
    }
    std::sort(target.begin(), target.end());
    for (const auto& [id, k] : b.component_of) {
      if (k < 0 || k >= static_cast<int>(b.components.size()))
        throw schema_error("bundle", "component index " + std::to_string(k) + " out of range");
      tc.component_of[rb.product.state_index(id)] = k;
    }
    rb.rewards = build_reward_vector(rb.product, target, tc);
    rb.policy.outside = policy_indices(rb.product, b.stage1);
    rb.policy.component_of = tc.component_of;
    for (const Bundle::Component& c : b.components)
      rb.policy.inside.push_back(policy_indices(rb.product, c.policy));
  } catch (const not_found_error& e) {
    throw schema_error("bundle", e.what());
  }
  return rb;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "w1,w2,lambda1,lambda2,u1,u2\n";
  for (const SweepPoint& pt : points) {
    double u1 = pt.solved ? pt.profile.u1 : std::nan("");
    double u2 = pt.solved ? pt.profile.u2 : std::nan("");
    out += fmt("%.12g", pt.weights[0]) + "," + fmt("%.12g", pt.weights[1]) + "," +
           fmt("%.12g", pt.lambda[0]) + "," + fmt("%.12g", pt.lambda[1]) + "," +
           fmt("%.12g", u1) + "," + fmt("%.12g", u2) + "\n";
    if (!pt.solved)
      out += "# unsolved at w1=" + fmt("%.12g", pt.weights[0]) + ": " + pt.message + "\n";
  }
  return out;
}

std::string sweep_svg(const std::vector<SweepPoint>& points) {
  double lo1 = 0.0, hi1 = 1.0, lo2 = 0.0, hi2 = 1.0;
  bool first = true;
  for (const SweepPoint& pt : points) {
    if (!pt.solved) continue;
    if (first) {
      lo1 = hi1 = pt.profile.u1;
      lo2 = hi2 = pt.profile.u2;
      first = false;
    } else {
      lo1 = std::min(lo1, pt.profile.u1);
      hi1 = std::max(hi1, pt.profile.u1);
      lo2 = std::min(lo2, pt.profile.u2);
      hi2 = std::max(hi2, pt.profile.u2);
    }
  }
  if (hi1 - lo1 < 1e-12) {
    lo1 -= 0.5;
    hi1 += 0.5;
  }
  if (hi2 - lo2 < 1e-12) {
    lo2 -= 0.5;
    hi2 += 0.5;
  }
  const double x0 = 70, x1 = 610, y0 = 440, y1 = 30;  // y grows downward
  auto sx = [&](double u) { return x0 + (u - lo1) / (hi1 - lo1) * (x1 - x0); };
  auto sy = [&](double u) { return y0 + (u - lo2) / (hi2 - lo2) * (y1 - y0); };
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<line x1=\"70\" y1=\"440\" x2=\"610\" y2=\"440\" stroke=\"black\"/>\n";
  svg += "<line x1=\"70\" y1=\"440\" x2=\"70\" y2=\"30\" stroke=\"black\"/>\n";
  svg += "<text x=\"340\" y=\"470\" text-anchor=\"middle\">u1</text>\n";
  svg += "<text x=\"20\" y=\"235\" text-anchor=\"middle\" transform=\"rotate(-90 20 235)\">u2"
         "</text>\n";
  svg += "<text x=\"70\" y=\"456\" text-anchor=\"middle\">" + fmt("%.6g", lo1) + "</text>\n";
  svg += "<text x=\"610\" y=\"456\" text-anchor=\"middle\">" + fmt("%.6g", hi1) + "</text>\n";
  svg += "<text x=\"64\" y=\"444\" text-anchor=\"end\">" + fmt("%.6g", lo2) + "</text>\n";
  svg += "<text x=\"64\" y=\"34\" text-anchor=\"end\">" + fmt("%.6g", hi2) + "</text>\n";
  for (const SweepPoint& pt : points) {
    if (!pt.solved) continue;
    svg += "<circle cx=\"" + fmt("%.6g", sx(pt.profile.u1)) + "\" cy=\"" +
           fmt("%.6g", sy(pt.profile.u2)) + "\" r=\"4\" fill=\"steelblue\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::array<double, 2>> parse_weights_lines(const std::string& text,
                                                       const std::string& where) {
  std::vector<std::array<double, 2>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    std::istringstream row(line);
    double w1, w2;
    if (!(row >> w1)) continue;  // blank or comment-only line
    std::string rest;
    if (!(row >> w2) || (row >> rest))
      throw schema_error(where, "line " + std::to_string(lineno) + ": expected two numbers");
    out.push_back({w1, w2});
  }
  return out;
}

std::string estimates_json(const ProductMdp& p, const Estimate& est, const SimOptions& opt) {
  json j;
  j["type"] = "estimates";
  j["traces"] = est.traces;
  j["horizon"] = opt.horizon;
  j["seed"] = opt.seed;
  j["reach"] = {{"mean", est.reach_mean},
                {"se", est.reach_se},
                {"truncation_bound", est.reach_truncation}};
  j["cost"] = {{"mean", est.cost_mean},
               {"se", est.cost_se},
               {"truncation_bound", est.cost_truncation}};
  j["switched"] = est.switched;
  j["qualified"] = est.qualified;
  j["recurrent_covered"] = est.recurrent_covered;
  j["component_covered"] = est.component_covered;
  json occ = json::object();
  for (const auto& [v, count] : est.occupation) occ[p.state_ids[v]] = count;
  j["occupation"] = occ;
  return dump(j);
}

std::string trace_lines(const ProductMdp& p, const Trace& tr) {
  std::string out;
  json meta;
  meta["type"] = "trace";
  if (tr.switch_time)
    meta["switch_index"] = *tr.switch_time;
  else
    meta["switch_index"] = nullptr;
  meta["discounted_cost"] = tr.discounted_cost;
  meta["reach_sample"] = tr.reach_sample;
  out += meta.dump() + "\n";
  for (std::size_t t = 0; t < tr.actions.size(); ++t) {
    const ComposedAction& a = p.actions[tr.actions[t]];
    json step;
    step["t"] = t;
    step["state"] = p.state_ids[tr.states[t]];
    step["action"] = a.id();
    step["mode"] = controller_tag(a.mode);
    step["cost"] = tr.costs[t];
    out += step.dump() + "\n";
  }
  json last;
  last["t"] = tr.actions.size();
  last["state"] = p.state_ids[tr.states.back()];
  out += last.dump() + "\n";
  return out;
}

}  // namespace handoff
