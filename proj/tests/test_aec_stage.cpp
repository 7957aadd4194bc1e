#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "handoff/aec_stage.hpp"
#include "handoff/examples.hpp"
#include "handoff/synthesis.hpp"
#include "test_util.hpp"

using namespace handoff;
using namespace testutil;

TEST_CASE("absorbing state pays its self-loop forever") {
  auto p = make_product(1, 1, {{0, 0, {0}, {1.0}, {3.0}}}, point_mass(1, 0), 0.9,
                        {{{}, {0}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 1);
  AecSolution sol = solve_aec_policy(p, aecs[0]);
  CHECK(sol.objective == doctest::Approx(3.0 / 0.1).epsilon(1e-9));
  CHECK(sol.policy.at(0).at(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.irreducible);
}

TEST_CASE("a symmetric cycle with equal costs is cost-flat") {
  auto p = make_product(2, 1,
                        {{0, 0, {1}, {1.0}, {2.0}},
                         {1, 0, {0}, {1.0}, {2.0}}},
                        point_mass(2, 0), 0.9, {{{}, {0}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 1);
  AecSolution sol = solve_aec_policy(p, aecs[0]);
  CHECK(sol.objective == doctest::Approx(2.0 / 0.1).epsilon(1e-9));
  CHECK(sol.irreducible);

  TerminalCosts tc = terminal_costs(p, aecs);
  CHECK(tc.value.at(0) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(tc.value.at(1) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("actions that leave the component get no occupancy variable") {
  // {0,1} cycles; action 1 at state 1 escapes to the absorbing state 2.
  auto p = make_product(3, 2,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {0}, {1.0}, {}},
                         {1, 1, {2}, {1.0}, {}},
                         {2, 0, {2}, {1.0}, {}}},
                        point_mass(3, 0), 0.9, {{{2}, {0}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 1);
  REQUIRE(aecs[0].states == std::vector<int>{0, 1});

  std::map<int, double> eta{{0, 0.5}, {1, 0.5}};
  AecLp prog = build_aec_lp(p, aecs[0], eta, 1e-6);
  CHECK(prog.var_of.count({0, 0}) == 1);
  CHECK(prog.var_of.count({1, 0}) == 1);
  CHECK(prog.var_of.count({1, 1}) == 0);  // the escape row is not a variable
  CHECK(prog.lp.num_variables() == 2);
  // One flow row per state plus one visitation floor per state.
  CHECK(prog.lp.num_constraints() == 4);
}

TEST_CASE("an overly aggressive visitation floor is reported, then relaxed") {
  auto p = make_product(2, 1,
                        {{0, 0, {1}, {1.0}, {1.0}},
                         {1, 0, {0}, {1.0}, {1.0}}},
                        point_mass(2, 0), 0.9, {{{}, {0}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 1);

  // Total discounted mass is 1/(1-gamma) = 10; two states at 6 each cannot fit.
  CHECK_THROWS_AS(solve_aec_policy(p, aecs[0], 6.0), visit_floor_error);
  try {
    solve_aec_policy(p, aecs[0], 6.0);
  } catch (const visit_floor_error& e) {
    CHECK(e.eps() == 6.0);
  }

  // terminal_costs retries at a tenth of the floor until the program fits.
  TerminalCosts tc = terminal_costs(p, aecs, 6.0);
  REQUIRE(tc.floors.size() == 1);
  CHECK(tc.floors[0] < 6.0);
  CHECK(tc.floors[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(tc.value.at(0) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("the solved chain need not be irreducible") {
  // Staying at 0 is free; reaching 1 costs. The optimal occupancy routes no
  // mass into 1 beyond its source weight, leaving it transient.
  auto p = make_product(2, 2,
                        {{0, 0, {0}, {1.0}, {0.0}},
                         {0, 1, {1}, {1.0}, {100.0}},
                         {1, 0, {0}, {1.0}, {0.0}}},
                        point_mass(2, 0), 0.9, {{{}, {0}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 1);
  REQUIRE(aecs[0].states == std::vector<int>{0, 1});
  AecSolution sol = solve_aec_policy(p, aecs[0]);
  CHECK_FALSE(sol.irreducible);
  CHECK(sol.policy.at(0).at(1) == doctest::Approx(0.0).scale(1.0));
  CHECK(sol.objective == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("policy evaluation matches closed forms") {
  auto p = make_product(2, 2,
                        {{0, 0, {0}, {1.0}, {4.0}},
                         {0, 1, {1}, {1.0}, {0.0}},
                         {1, 0, {1}, {1.0}, {0.0}}},
                        point_mass(2, 0), 0.9, {});
  auto cost_of = [&p](int v, int k, std::size_t s) { return p.rows[v][k].cost[s]; };

  MemorylessPolicy loop;
  loop.choice[0][0] = 1.0;
  auto val = evaluate_policy(p, {0}, loop, cost_of, true);
  CHECK(val.at(0) == doctest::Approx(4.0 / 0.1).epsilon(1e-10));

  MemorylessPolicy quiet;
  quiet.choice[1][0] = 1.0;
  CHECK(evaluate_policy(p, {1}, quiet, cost_of, true).at(1) ==
        doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("evaluation treats leaks as terminal unless closure is demanded") {
  // Action 0 at state 0: stay with 0.5, leave the domain with 0.5, cost 1
  // on both branches.
  auto p = make_product(2, 1,
                        {{0, 0, {0, 1}, {0.5, 0.5}, {1.0, 1.0}},
                         {1, 0, {1}, {1.0}, {0.0}}},
                        point_mass(2, 0), 0.9, {});
  auto cost_of = [&p](int v, int k, std::size_t s) { return p.rows[v][k].cost[s]; };
  MemorylessPolicy g;
  g.choice[0][0] = 1.0;

  // U = 1 + gamma * 0.5 * U on the one-state domain.
  auto val = evaluate_policy(p, {0}, g, cost_of, false);
  CHECK(val.at(0) == doctest::Approx(1.0 / (1.0 - 0.45)).epsilon(1e-10));

  CHECK_THROWS_AS(evaluate_policy(p, {0}, g, cost_of, true), invariant_error);
  try {
    evaluate_policy(p, {0}, g, cost_of, true);
  } catch (const invariant_error& e) {
    CHECK(std::string(e.what()).find("leaks") != std::string::npos);
  }
}

TEST_CASE("policy evaluation agrees with Monte Carlo on a random chain") {
  std::mt19937_64 rng(31415);
  RandomOptions opt;
  opt.min_states = 3;
  opt.max_states = 3;
  opt.max_actions = 2;
  opt.gamma_lo = 0.9;
  opt.gamma_hi = 0.9;
  for (int trial = 0; trial < 5; ++trial) {
    ProductMdp p = random_product(rng, opt);
    MemorylessPolicy g;
    std::vector<int> domain;
    for (size_t v = 0; v < p.num_states(); ++v) {
      domain.push_back(static_cast<int>(v));
      for (const ProductRow& row : p.rows[v])
        g.choice[static_cast<int>(v)][row.action] = 1.0 / p.rows[v].size();
    }
    auto cost_of = [&p](int v, int k, std::size_t s) { return p.rows[v][k].cost[s]; };
    auto val = evaluate_policy(p, domain, g, cost_of, true);

    McStats mc = mc_discounted_cost(p, g, 0, 4000, 600, 999 + trial);
    CHECK(std::abs(val.at(0) - mc.mean) <= 3.0 * mc.se + 1e-6);
  }
}

TEST_CASE("terminal costs take the cheapest containing component") {
  // Pair 0 confines runs to the expensive inner cycle {0,1}; pair 1 admits
  // the full triangle, whose long way around is nearly free.
  auto p = make_product(3, 2,
                        {{0, 0, {1}, {1.0}, {2.0}},
                         {1, 0, {0}, {1.0}, {10.0}},
                         {1, 1, {2}, {1.0}, {0.0}},
                         {2, 0, {0}, {1.0}, {0.0}}},
                        point_mass(3, 0), 0.9, {{{2}, {0}}, {{}, {2}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 2);

  TerminalCosts tc = terminal_costs(p, aecs);
  const double gamma = 0.9;
  const double cheap = 2.0 / (1.0 - gamma * gamma * gamma);
  CHECK(tc.value.at(0) == doctest::Approx(cheap).epsilon(1e-8));
  CHECK(tc.value.at(1) == doctest::Approx(gamma * gamma * cheap).epsilon(1e-8));
  CHECK(tc.value.at(2) == doctest::Approx(gamma * cheap).epsilon(1e-8));

  // The attaining component must actually attain the minimum.
  for (const auto& [v, c] : tc.value) {
    int id = tc.component_of.at(v);
    CHECK(tc.component_values[id].at(v) == doctest::Approx(c).epsilon(1e-12));
  }
  CHECK(tc.components[tc.component_of.at(0)].states.size() == 3);
}

TEST_CASE("exact ties resolve toward the smaller component id") {
  // Same component geometry, but every transition costs 4: both components
  // achieve 40 everywhere, so the first one keeps the shared states.
  auto p = make_product(3, 2,
                        {{0, 0, {1}, {1.0}, {4.0}},
                         {1, 0, {0}, {1.0}, {4.0}},
                         {1, 1, {2}, {1.0}, {4.0}},
                         {2, 0, {0}, {1.0}, {4.0}}},
                        point_mass(3, 0), 0.9, {{{2}, {0}}, {{}, {2}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 2);
  TerminalCosts tc = terminal_costs(p, aecs);
  CHECK(tc.value.at(0) == doctest::Approx(40.0).epsilon(1e-8));
  CHECK(tc.component_of.at(0) == 0);
  CHECK(tc.component_of.at(1) == 0);
}

TEST_CASE("occupancy, policy and objective are mutually consistent") {
  std::mt19937_64 rng(2718);
  RandomOptions opt;
  opt.max_states = 5;
  opt.max_actions = 3;
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 25; ++trial) {
    ProductMdp p = random_product(rng, opt);
    auto aecs = accepting_end_components(p);
    for (const EndComponent& ec : aecs) {
      AecSolution sol = solve_aec_policy(p, ec);
      ++checked;

      std::map<int, double> eta;
      for (int v : ec.states) eta[v] = 1.0 / ec.states.size();

      // Recomputing the occupancy of the extracted policy recovers the LP x.
      auto x = occupancy_of_policy(p, ec.states, sol.policy, eta);
      for (const auto& [key, got] : sol.occupancy) {
        REQUIRE(x.count(key) == 1);
        CHECK(std::abs(got - x.at(key)) <= 1e-6 * (1.0 + std::abs(got)));
      }

      // The LP optimum equals the eta-weighted exact value of the policy.
      auto cost_of = [&p](int v, int k, std::size_t s) { return p.rows[v][k].cost[s]; };
      auto val = evaluate_policy(p, ec.states, sol.policy, cost_of, true);
      double weighted = 0.0;
      for (int v : ec.states) weighted += eta[v] * val.at(v);
      CHECK(sol.objective == doctest::Approx(weighted).epsilon(1e-6));

      // Every state clears the default visitation floor.
      std::map<int, double> total;
      for (const auto& [key, m] : sol.occupancy) total[key.first] += m;
      for (int v : ec.states) CHECK(total[v] >= kDefaultVisitFloor * (1.0 - 1e-9));
    }
  }
  CHECK(checked >= 25);
}

TEST_CASE("arm steady state settles at low attention") {
  InputModels in = build_arm();
  TwoStage ts = prepare_two_stage(compose_shared_autonomy(in.ma, in.mh, in.att), in.dra);
  REQUIRE(ts.accepting.size() == 1);
  // Cheapest sustainable behaviour: hold low attention at 5 per step.
  for (int v : ts.accepting[0].states)
    CHECK(ts.terminal.value.at(v) == doctest::Approx(5.0 / (1.0 - 0.98)).epsilon(1e-8));
}

TEST_CASE("policy validation names the offending state") {
  auto p = make_product(2, 2,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {0}, {1.0}, {}},
                         {1, 1, {1}, {1.0}, {}}},
                        point_mass(2, 0), 0.9, {});

  MemorylessPolicy ok;
  ok.choice[0][0] = 1.0;
  ok.choice[1][0] = 0.25;
  ok.choice[1][1] = 0.75;
  CHECK(validate_policy(p, ok).empty());

  MemorylessPolicy bad;
  bad.choice[0][1] = 1.0;  // action 1 is not enabled at state 0
  auto vs = validate_policy(p, bad);
  REQUIRE(!vs.empty());
  CHECK(vs[0].where.find("policy.v0") != std::string::npos);
  CHECK(vs[0].message.find("not enabled") != std::string::npos);

  MemorylessPolicy neg;
  neg.choice[1][0] = 1.5;
  neg.choice[1][1] = -0.5;
  bool saw_negative = false, saw_sum = false;
  for (const auto& v : validate_policy(p, neg)) {
    if (v.message.find("negative probability") != std::string::npos) saw_negative = true;
    if (v.message.find("sum to") != std::string::npos) saw_sum = true;
  }
  CHECK(saw_negative);

  MemorylessPolicy off;
  off.choice[0][0] = 0.7;
  for (const auto& v : validate_policy(p, off))
    if (v.message.find("sum to") != std::string::npos) saw_sum = true;
  CHECK(saw_sum);
}
