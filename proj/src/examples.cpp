#include "handoff/examples.hpp"

#include <algorithm>

namespace handoff {
namespace {

// ---- arm -----------------------------------------------------------------

Id arm_state(int c1, int c2) { return std::to_string(c1) + "," + std::to_string(c2); }

LabeledMdp arm_system(double pa, double pb, double gamma) {
  LabeledMdp m;
  for (int c1 : {1, 0})
    for (int c2 : {1, 0}) m.states.push_back(arm_state(c1, c2));
  std::sort(m.states.begin(), m.states.end());
  m.actions = {"a", "b"};
  m.ap = {"done"};
  m.labels[arm_state(0, 0)] = {"done"};
  m.initial.entries[arm_state(1, 1)] = 1.0;
  for (int c1 : {0, 1})
    for (int c2 : {0, 1}) {
      Id s = arm_state(c1, c2);
      Distribution& da = m.transitions[{s, "a"}];
      if (c1 == 1) {
        da.entries[arm_state(0, c2)] = pa;
        da.entries[s] = 1.0 - pa;
      } else {
        da.entries[s] = 1.0;
      }
      Distribution& db = m.transitions[{s, "b"}];
      if (c2 == 1) {
        db.entries[arm_state(c1, 0)] = pb;
        db.entries[s] = 1.0 - pb;
      } else {
        db.entries[s] = 1.0;
      }
    }
  m.gamma = gamma;
  return m;
}

}  // namespace

InputModels build_arm(const ArmParams& params) {
  InputModels in;
  in.ma = arm_system(params.auto_a, params.auto_b, params.gamma);
  in.mh = arm_system(params.human_a, params.human_b, params.gamma);

  CognitiveModel& att = in.att;
  att.states = {"0", "1"};
  att.events = {"0", "1"};
  att.initial.entries["0"] = 1.0;
  for (const Id& h : att.states) {
    // A lower request always lands low; a raise request holds high
    // attention only with probability att_keep.
    att.transitions[{h, "0"}].entries["0"] = 1.0;
    att.transitions[{h, "1"}].entries["1"] = params.att_keep;
    att.transitions[{h, "1"}].entries["0"] = 1.0 - params.att_keep;
    for (const Id& e : att.events)
      for (const Id& h2 : att.states)
        att.cost[{h, e, h2}] = h2 == "1" ? params.cost_high : params.cost_low;
  }
  att.takeover = {"1"};
  att.gamma = params.gamma;

  RabinAutomaton& dra = in.dra;
  dra.states = {"q0", "qacc"};
  dra.ap = {"done"};
  dra.initial = "q0";
  dra.transitions["q0"][{"done"}] = "qacc";
  dra.default_successor["q0"] = "q0";
  dra.default_successor["qacc"] = "qacc";
  dra.pairs.push_back({{}, {"qacc"}});
  return in;
}

// ---- gridworld -------------------------------------------------------------

Id grid_cell_id(int row, int col) {
  return "r" + std::to_string(row) + "c" + std::to_string(col);
}

namespace {

double move_success(char terrain, bool human) {
  switch (terrain) {
    case 'p': return 0.95;
    case 'g': return human ? 0.90 : 0.80;
    case 'v': return human ? 0.85 : 0.75;
    case 's': return human ? 0.80 : 0.65;
    default: throw invariant_error(std::string("unknown terrain letter '") + terrain + "'");
  }
}

LabeledMdp grid_system(const GridParams& gp, bool human) {
  LabeledMdp m;
  auto in_grid = [&](int r, int c) { return r >= 0 && r < gp.rows && c >= 0 && c < gp.cols; };
  for (int r = 0; r < gp.rows; ++r)
    for (int c = 0; c < gp.cols; ++c) m.states.push_back(grid_cell_id(r, c));
  std::sort(m.states.begin(), m.states.end());
  m.actions = {"E", "N", "S", "W"};
  m.ap = {"R1", "R2", "R3", "Unsafe"};
  m.labels[grid_cell_id(gp.r1.first, gp.r1.second)].insert("R1");
  m.labels[grid_cell_id(gp.r2.first, gp.r2.second)].insert("R2");
  m.labels[grid_cell_id(gp.r3.first, gp.r3.second)].insert("R3");
  for (auto [r, c] : gp.unsafe) m.labels[grid_cell_id(r, c)].insert("Unsafe");
  m.initial.entries[grid_cell_id(gp.start.first, gp.start.second)] = 1.0;

  // dr/dc per action, with the two lateral slip directions perpendicular
  // to the move; wall moves bounce back to the source cell.
  struct Move {
    Id action;
    int dr, dc;
  };
  const Move moves[] = {{"N", -1, 0}, {"S", 1, 0}, {"E", 0, 1}, {"W", 0, -1}};
  for (int r = 0; r < gp.rows; ++r)
    for (int c = 0; c < gp.cols; ++c) {
      double p = move_success(gp.terrain[static_cast<std::size_t>(r * gp.cols + c)], human);
      for (const Move& mv : moves) {
        Distribution& d = m.transitions[{grid_cell_id(r, c), mv.action}];
        auto land = [&](int rr, int cc, double mass) {
          Id target = in_grid(rr, cc) ? grid_cell_id(rr, cc) : grid_cell_id(r, c);
          d.entries[target] += mass;
        };
        land(r + mv.dr, c + mv.dc, p);
        land(r + mv.dc, c + mv.dr, (1.0 - p) / 2.0);  // perpendicular slips
        land(r - mv.dc, c - mv.dr, (1.0 - p) / 2.0);
      }
    }
  m.gamma = gp.gamma;
  return m;
}

CognitiveModel grid_attention(double gamma) {
  CognitiveModel att;
  att.states = {"L", "M", "H"};
  att.events = {"+", "-", "lambda"};
  att.initial.entries["L"] = 1.0;
  auto up = [](const Id& h) { return h == "L" ? "M" : "H"; };
  auto down = [](const Id& h) { return h == "H" ? "M" : "L"; };
  for (const Id& h : att.states) {
    if (h == "H")
      att.transitions[{h, "+"}].entries["H"] = 1.0;
    else {
      att.transitions[{h, "+"}].entries[up(h)] = 0.8;
      att.transitions[{h, "+"}].entries[h] += 0.2;
    }
    if (h == "L")
      att.transitions[{h, "-"}].entries["L"] = 1.0;
    else {
      att.transitions[{h, "-"}].entries[down(h)] = 0.8;
      att.transitions[{h, "-"}].entries[h] += 0.2;
    }
    if (h == "L")
      att.transitions[{h, "lambda"}].entries["L"] = 1.0;
    else {
      att.transitions[{h, "lambda"}].entries[h] = 0.9;
      att.transitions[{h, "lambda"}].entries[down(h)] += 0.1;
    }
    for (const Id& e : att.events)
      for (const Id& h2 : att.states)
        att.cost[{h, e, h2}] = h2 == "L" ? 1.0 : h2 == "M" ? 5.0 : 10.0;
  }
  att.takeover = {"H"};
  att.gamma = gamma;
  return att;
}

int advance_progress(int prog, const Letter& l) {
  if (prog == 0) {
    if (l.count("R1")) return l.count("R2") ? 2 : 1;
    return 0;
  }
  if (prog == 1) return l.count("R2") ? 2 : 1;
  return 2;
}

std::vector<Letter> all_letters(const std::vector<Id>& ap) {
  std::vector<Letter> out;
  for (std::size_t mask = 0; mask < (1u << ap.size()); ++mask) {
    Letter l;
    for (std::size_t i = 0; i < ap.size(); ++i)
      if (mask & (1u << i)) l.insert(ap[i]);
    out.push_back(std::move(l));
  }
  return out;
}

// Compress a fully enumerated transition function: the empty-letter
// successor becomes the default, explicit entries only where they differ.
void install_transitions(RabinAutomaton& a,
                         const std::map<Id, std::map<Letter, Id>>& full) {
  for (const auto& [q, row] : full) {
    Id def = row.at(Letter{});
    a.default_successor[q] = def;
    for (const auto& [letter, to] : row)
      if (to != def) a.transitions[q][letter] = to;
  }
}

/**
 * Strict obstacle reading: visit R1 then R2 (then anything), or visit R3
 * infinitely often, never entering an unsafe cell. States track sequential
 * progress and whether the last cell was R3; any Unsafe letter falls into
 * a rejecting sink.
 */
RabinAutomaton grid_automaton_strict() {
  RabinAutomaton a;
  a.ap = {"R1", "R2", "R3", "Unsafe"};
  auto name = [](int prog, bool r3) {
    return "p" + std::to_string(prog) + (r3 ? "r3" : "");
  };
  for (int prog = 0; prog < 3; ++prog)
    for (bool r3 : {false, true}) a.states.push_back(name(prog, r3));
  a.states.push_back("qbad");
  a.initial = name(0, false);

  std::map<Id, std::map<Letter, Id>> full;
  for (int prog = 0; prog < 3; ++prog)
    for (bool r3 : {false, true})
      for (const Letter& l : all_letters(a.ap)) {
        Id to = l.count("Unsafe") ? "qbad"
                                  : name(advance_progress(prog, l), l.count("R3") > 0);
        full[name(prog, r3)][l] = to;
      }
  for (const Letter& l : all_letters(a.ap)) full["qbad"][l] = "qbad";
  install_transitions(a, full);

  RabinPair sequential;
  sequential.avoid = {"qbad"};
  sequential.repeat = {name(2, false), name(2, true)};
  RabinPair recurrent;
  recurrent.avoid = {"qbad"};
  recurrent.repeat = {name(0, true), name(1, true), name(2, true)};
  a.pairs = {sequential, recurrent};
  return a;
}

/**
 * Recurrence obstacle reading: as above, but unsafe cells only need to be
 * left infinitely often. The conjunction of two "infinitely often"
 * demands is folded into single repeat sets by cycling an obligation
 * token between "waiting for R3" and "waiting for a safe cell" and
 * marking the states where the token completes a cycle.
 */
RabinAutomaton grid_automaton_recurrent() {
  RabinAutomaton a;
  a.ap = {"R1", "R2", "R3", "Unsafe"};
  auto name = [](int prog, bool safe, bool await_safe, bool tick) {
    return "p" + std::to_string(prog) + (safe ? "s1" : "s0") + (await_safe ? "ws" : "wr") +
           (tick ? "t1" : "t0");
  };
  for (int prog = 0; prog < 3; ++prog)
    for (bool safe : {false, true})
      for (bool await_safe : {false, true})
        for (bool tick : {false, true}) a.states.push_back(name(prog, safe, await_safe, tick));
  a.initial = name(0, true, false, false);

  std::map<Id, std::map<Letter, Id>> full;
  for (int prog = 0; prog < 3; ++prog)
    for (bool safe : {false, true})
      for (bool await_safe : {false, true})
        for (bool tick : {false, true})
          for (const Letter& l : all_letters(a.ap)) {
            int prog2 = advance_progress(prog, l);
            bool safe2 = l.count("Unsafe") == 0;
            bool await2 = await_safe;
            bool tick2 = false;
            if (!await_safe && l.count("R3")) {
              await2 = true;
              tick2 = true;
            } else if (await_safe && safe2) {
              await2 = false;
              tick2 = true;
            }
            full[name(prog, safe, await_safe, tick)][l] = name(prog2, safe2, await2, tick2);
          }
  install_transitions(a, full);

  RabinPair sequential;  // reached p2 and keeps seeing safe cells
  RabinPair recurrent;   // R3 and safe cells both recur
  for (bool safe : {false, true})
    for (bool await_safe : {false, true})
      for (bool tick : {false, true}) {
        if (safe)
          sequential.repeat.insert(name(2, safe, await_safe, tick));
      }
  for (int prog = 0; prog < 3; ++prog)
    for (bool safe : {false, true})
      for (bool await_safe : {false, true})
        recurrent.repeat.insert(name(prog, safe, await_safe, true));
  a.pairs = {sequential, recurrent};
  return a;
}

}  // namespace

InputModels build_gridworld(const GridParams& gp) {
  if (gp.rows < 1 || gp.cols < 1)
    throw invariant_error("gridworld needs at least one row and column");
  if (gp.terrain.size() != static_cast<std::size_t>(gp.rows * gp.cols))
    throw invariant_error("terrain string length does not match the grid size");
  auto in_grid = [&](std::pair<int, int> rc) {
    return rc.first >= 0 && rc.first < gp.rows && rc.second >= 0 && rc.second < gp.cols;
  };
  for (auto rc : {gp.r1, gp.r2, gp.r3, gp.start})
    if (!in_grid(rc)) throw invariant_error("a marked cell lies outside the grid");
  for (auto rc : gp.unsafe) {
    if (!in_grid(rc)) throw invariant_error("an unsafe cell lies outside the grid");
    if (rc == gp.r1 || rc == gp.r2 || rc == gp.r3 || rc == gp.start)
      throw invariant_error("an unsafe cell collides with a marked cell");
  }
  for (char t : gp.terrain) move_success(t, false);  // validates letters

  InputModels in;
  in.ma = grid_system(gp, false);
  in.mh = grid_system(gp, true);
  in.att = grid_attention(gp.gamma);
  in.dra = gp.liveness_obstacles ? grid_automaton_recurrent() : grid_automaton_strict();
  return in;
}

}  // namespace handoff
