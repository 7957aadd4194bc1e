#pragma once

#include "handoff/model_io.hpp"

namespace handoff {

/**
 * Built-in two-subtask manipulation example. States "c1,c2" mark which
 * subtasks are still pending (1 = pending); action "a" works on the first
 * subtask, "b" on the second, each succeeding with the acting controller's
 * probability and leaving the state unchanged otherwise. "done" labels
 * "0,0". The operator has a two-level attention model: a raise request
 * keeps attention high with probability att_keep, a lower request drops it
 * immediately; every step costs cost_high when attention ends high, else
 * cost_low. The objective automaton accepts runs that eventually see
 * "done".
 */
struct ArmParams {
  double auto_a = 0.85;
  double auto_b = 0.50;
  double human_a = 0.95;
  double human_b = 0.75;
  double att_keep = 0.85;
  double cost_high = 10.0;
  double cost_low = 5.0;
  double gamma = 0.98;
};

InputModels build_arm(const ArmParams& params = {});

/**
 * Built-in stochastic gridworld. Four terrain kinds with per-controller
 * move success probabilities; failed moves slip to the two lateral
 * neighbors, and moves into a wall stay in place. Cells carry labels R1,
 * R2, R3 and Unsafe; the objective is to visit R1 then R2 in that order,
 * or visit R3 infinitely often, while handling obstacles per the chosen
 * automaton variant: the default treats Unsafe strictly (never enter), the
 * liveness variant only demands leaving unsafe cells infinitely often.
 * The three-level attention model uses requests "+", "-" and "lambda" with
 * costs 1/5/10 by resulting attention; takeover requires high attention.
 *
 * The shipped map is an approximation: the source layout is not fully
 * recoverable, so terrain, regions and obstacles are parameters.
 */
struct GridParams {
  int rows = 5;
  int cols = 5;
  // Row-major terrain letters: p(avement), g(rass), v = gravel, s(and).
  // The default layout keeps the top and bottom rows as safe pavement
  // corridors and funnels every route between them through sand cells
  // flanked by obstacles, where a human operator's higher success
  // probability actually buys satisfaction probability.
  std::string terrain =
      "ppppp"
      "gvsss"
      "gvsvs"
      "svsgp"
      "ppppp";
  std::vector<std::pair<int, int>> unsafe = {{1, 3}, {2, 1}, {2, 3}, {3, 0}};
  std::pair<int, int> r1{0, 4};
  std::pair<int, int> r2{4, 4};
  std::pair<int, int> r3{0, 0};
  std::pair<int, int> start{4, 0};
  double gamma = 0.98;
  bool liveness_obstacles = false;
};

InputModels build_gridworld(const GridParams& params = {});

/** Cell id used by the gridworld generator, "r<row>c<col>". */
Id grid_cell_id(int row, int col);

}  // namespace handoff
