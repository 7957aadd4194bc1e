#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "handoff/examples.hpp"
#include "handoff/pareto_stage.hpp"
#include "handoff/synthesis.hpp"
#include "test_util.hpp"

using namespace handoff;
using namespace testutil;

namespace {

// v0 -> v1 -> v2 with v2 an absorbing accepting state of self-loop cost 1.
ProductMdp chain3() {
  return make_product(3, 1,
                      {{0, 0, {1}, {1.0}, {3.0}},
                       {1, 0, {2}, {1.0}, {5.0}},
                       {2, 0, {2}, {1.0}, {1.0}}},
                      point_mass(3, 0), 0.9, {{{}, {2}}});
}

struct Prepared {
  std::vector<EndComponent> aecs;
  TerminalCosts terminal;
  RewardVector rewards;
  CornerPoints corners;
};

Prepared prepare(const ProductMdp& p) {
  Prepared out;
  out.aecs = accepting_end_components(p);
  out.terminal = terminal_costs(p, out.aecs);
  out.rewards = build_reward_vector(p, accepting_states_union(out.aecs), out.terminal);
  out.corners = ideal_and_nadir(p, out.rewards);
  return out;
}

bool dominates(const ValueProfile& a, const ValueProfile& b, double tol) {
  bool no_worse = a.u1 >= b.u1 - 1e-9 && a.u2 >= b.u2 - 1e-9;
  bool better = a.u1 > b.u1 + tol || a.u2 > b.u2 + tol;
  return no_worse && better;
}

}  // namespace

TEST_CASE("reward clauses: crossing pays 1, outside pays cost, inside pays nothing") {
  ProductMdp p = chain3();
  auto aecs = accepting_end_components(p);
  TerminalCosts tc = terminal_costs(p, aecs);
  REQUIRE(tc.value.at(2) == doctest::Approx(1.0 / 0.1).epsilon(1e-9));

  RewardVector rw = build_reward_vector(p, accepting_states_union(aecs), tc);
  CHECK(rw.in_union == std::vector<char>{0, 0, 1});
  CHECK(rw.domain == std::vector<int>{0, 1});

  // Off-union step v0 -> v1: no reach reward, pays the transition cost.
  CHECK(rw.r(0, 0, 0, 0) == 0.0);
  CHECK(rw.r(1, 0, 0, 0) == -3.0);
  // Crossing step v1 -> v2: reach reward 1, pays the terminal cost instead.
  CHECK(rw.r(0, 1, 0, 0) == 1.0);
  CHECK(rw.r(1, 1, 0, 0) == doctest::Approx(-10.0).epsilon(1e-9));
  // Inside the union nothing accrues.
  CHECK(rw.r(0, 2, 0, 0) == 0.0);
  CHECK(rw.r(1, 2, 0, 0) == 0.0);
  CHECK(rw.rho(1, 0, 0) == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("a union state without a terminal cost is rejected") {
  ProductMdp p = chain3();
  TerminalCosts empty;
  CHECK_THROWS_AS(build_reward_vector(p, {2}, empty), invariant_error);
}

TEST_CASE("single-objective optima on the forced chain") {
  ProductMdp p = chain3();
  Prepared pr = prepare(p);

  // Reach: the crossing happens on the second step, discounted once.
  SingleObjective reach = solve_single_objective(p, pr.rewards, 0);
  CHECK(reach.lp_value == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(reach.vi_value == doctest::Approx(0.9).epsilon(1e-9));
  // Cost: pay 3 now, then the discounted terminal 10.
  SingleObjective cost = solve_single_objective(p, pr.rewards, 1);
  CHECK(cost.lp_value == doctest::Approx(-(3.0 + 0.9 * 10.0)).epsilon(1e-9));

  // The policy is total over the domain.
  for (int v : pr.rewards.domain) {
    CHECK(reach.policy.defined_at(v));
    CHECK(cost.policy.defined_at(v));
  }

  // One policy exists, so the corners collapse to a single point.
  CHECK(pr.corners.ideal[0] == doctest::Approx(pr.corners.nadir[0]).epsilon(1e-9));
  CHECK(pr.corners.ideal[1] == doctest::Approx(pr.corners.nadir[1]).epsilon(1e-9));
}

TEST_CASE("occupancy and value iteration agree on random products") {
  std::mt19937_64 rng(60601);
  RandomOptions opt;
  opt.max_states = 5;
  opt.max_actions = 3;
  int ran = 0;
  for (int trial = 0; trial < 80; ++trial) {
    ProductMdp p = random_product(rng, opt);
    Prepared pr;
    pr.aecs = accepting_end_components(p);
    pr.terminal = terminal_costs(p, pr.aecs);
    pr.rewards =
        build_reward_vector(p, accepting_states_union(pr.aecs), pr.terminal);
    if (pr.rewards.domain.empty()) continue;
    ++ran;

    for (int obj = 0; obj < 2; ++obj) {
      SingleObjective so = solve_single_objective(p, pr.rewards, obj);
      // The solver cross-checks to 1e-6 internally; hold it tighter here.
      CHECK(std::abs(so.lp_value - so.vi_value) <= 1e-7 * (1.0 + std::abs(so.lp_value)));
      if (obj == 0) {
        CHECK(so.lp_value >= -1e-9);
        CHECK(so.lp_value <= 1.0 + 1e-9);
        if (pr.aecs.empty()) CHECK(so.lp_value == doctest::Approx(0.0).scale(1.0));
      }
      CHECK(validate_policy(p, so.policy).empty());
    }

    CornerPoints corners = ideal_and_nadir(p, pr.rewards);
    CHECK(corners.nadir[0] <= corners.ideal[0] + 1e-9);
    CHECK(corners.nadir[1] <= corners.ideal[1] + 1e-9);
  }
  CHECK(ran >= 40);
}

TEST_CASE("scalarization weights are range-normalized with a flat fallback") {
  CornerPoints c;
  c.ideal = {0.8, -10.0};
  c.nadir = {0.2, -50.0};
  Scalarization sc = make_scalarization(c, {0.5, 0.5});
  CHECK(sc.lambda[0] == doctest::Approx(0.5 / 0.6).epsilon(1e-12));
  CHECK(sc.lambda[1] == doctest::Approx(0.5 / 40.0).epsilon(1e-12));
  CHECK(sc.ideal[0] == 0.8);

  CornerPoints flat;
  flat.ideal = {0.0, -7.0};
  flat.nadir = {0.0, -7.0 + 5e-13};  // coincides within tolerance
  Scalarization sf = make_scalarization(flat, {0.3, 0.7});
  CHECK(sf.lambda[0] == 0.3);
  CHECK(sf.lambda[1] == 0.7);
}

TEST_CASE("extreme weights recover the single-objective corners") {
  InputModels in = build_arm();
  TwoStage ts = prepare_two_stage(compose_shared_autonomy(in.ma, in.mh, in.att), in.dra);

  SweepPoint p1 = solve_point(ts, {1.0, 0.0});
  REQUIRE(p1.solved);
  CHECK(p1.profile.u1 == doctest::Approx(ts.corners.ideal[0]).epsilon(1e-6));

  SweepPoint p2 = solve_point(ts, {0.0, 1.0});
  REQUIRE(p2.solved);
  CHECK(p2.profile.u2 == doctest::Approx(ts.corners.ideal[1]).epsilon(1e-6));
}

TEST_CASE("policy extraction normalizes occupancies and fills unreached states") {
  auto p = make_product(2, 2,
                        {{0, 0, {0}, {1.0}, {}},
                         {0, 1, {0}, {1.0}, {}},
                         {1, 0, {1}, {1.0}, {}},
                         {1, 1, {0}, {1.0}, {}}},
                        point_mass(2, 0), 0.9, {});
  std::map<std::pair<int, int>, int> var_of{{{0, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 2},
                                            {{1, 1}, 3}};
  std::vector<double> x{0.3, 0.1, 0.0, 0.0};
  MemorylessPolicy g = extract_policy(p, {0, 1}, var_of, x);
  CHECK(g.at(0).at(0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(g.at(0).at(1) == doctest::Approx(0.25).epsilon(1e-12));
  // State 1 carries no mass: uniform over its enabled actions.
  CHECK(g.at(1).at(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.at(1).at(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("initial mass born inside the union is credited to the profile") {
  // Point mass on the accepting state: reach is certain and the steady cost
  // starts immediately; the outside policy never runs.
  auto p = make_product(3, 1,
                        {{0, 0, {1}, {1.0}, {3.0}},
                         {1, 0, {2}, {1.0}, {5.0}},
                         {2, 0, {2}, {1.0}, {1.0}}},
                        point_mass(3, 2), 0.9, {{{}, {2}}});
  Prepared pr = prepare(p);
  MemorylessPolicy f;
  f.choice[0][0] = 1.0;
  f.choice[1][0] = 1.0;
  ValueProfile vp = evaluate_profile(p, pr.rewards, pr.terminal, f);
  CHECK(vp.u1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vp.u2 == doctest::Approx(-10.0).epsilon(1e-9));
}

TEST_CASE("a model with no accepting component still sweeps, at zero reach") {
  InputModels in = build_arm();
  // Demand the impossible: visit the goal infinitely often while never
  // entering the accepting automaton state.
  in.dra.pairs[0].avoid.insert("qacc");
  TwoStage ts = prepare_two_stage(compose_shared_autonomy(in.ma, in.mh, in.att), in.dra);
  CHECK(ts.accepting_empty());

  SweepPoint pt = solve_point(ts, {0.5, 0.5});
  REQUIRE(pt.solved);
  CHECK(pt.profile.u1 == doctest::Approx(0.0).scale(1.0));
  // With reach flat at zero, its scale collapses and the lambda fallback kicks in.
  CHECK(pt.lambda[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sweep points are sorted and mutually non-dominated on the arm") {
  InputModels in = build_arm();
  TwoStage ts = prepare_two_stage(compose_shared_autonomy(in.ma, in.mh, in.att), in.dra);

  std::vector<std::array<double, 2>> weights;
  for (int i = 1; i <= 9; ++i)
    weights.push_back({i / 10.0, 1.0 - i / 10.0});
  // Hand them over shuffled; the sweep must order by the first weight.
  std::shuffle(weights.begin(), weights.end(), std::mt19937_64(7));
  std::vector<SweepPoint> pts = solve_sweep(ts, weights);
  REQUIRE(pts.size() == 9);

  for (size_t i = 0; i < pts.size(); ++i) {
    REQUIRE(pts[i].solved);
    if (i > 0) {
      CHECK(pts[i].weights[0] > pts[i - 1].weights[0]);
      // More weight on reach never lowers the reach attained.
      CHECK(pts[i].profile.u1 >= pts[i - 1].profile.u1 - 1e-6);
      CHECK(pts[i].profile.u2 <= pts[i - 1].profile.u2 + 1e-6);
    }
    // The arm starts outside the union, so the LP view and the exact policy
    // evaluation must coincide.
    CHECK(pts[i].recovered[0] == doctest::Approx(pts[i].profile.u1).epsilon(1e-5));
    CHECK(pts[i].recovered[1] ==
          doctest::Approx(pts[i].profile.u2).epsilon(1e-5).scale(100.0));
  }
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = 0; j < pts.size(); ++j)
      if (i != j) CHECK_FALSE(dominates(pts[i].profile, pts[j].profile, 1e-6));
}

TEST_CASE("no deterministic policy dominates a scalarized optimum") {
  std::mt19937_64 rng(424243);
  RandomOptions opt;
  opt.max_states = 4;
  opt.max_actions = 2;
  int ran = 0;
  for (int trial = 0; trial < 60 && ran < 20; ++trial) {
    ProductMdp p = random_product(rng, opt);
    Prepared pr;
    pr.aecs = accepting_end_components(p);
    if (pr.aecs.empty()) continue;
    pr.terminal = terminal_costs(p, pr.aecs);
    pr.rewards =
        build_reward_vector(p, accepting_states_union(pr.aecs), pr.terminal);
    if (pr.rewards.domain.empty()) continue;
    pr.corners = ideal_and_nadir(p, pr.rewards);

    // Enumerate every deterministic stage-one policy.
    std::vector<std::vector<int>> choices;
    long combos = 1;
    for (int v : pr.rewards.domain) {
      std::vector<int> acts;
      for (const ProductRow& row : p.rows[v]) acts.push_back(row.action);
      combos *= static_cast<long>(acts.size());
      choices.push_back(std::move(acts));
    }
    if (combos > 256) continue;
    ++ran;

    std::vector<ValueProfile> frontier;
    std::vector<size_t> pick(choices.size(), 0);
    for (long c = 0; c < combos; ++c) {
      MemorylessPolicy f;
      long rest = c;
      for (size_t i = 0; i < choices.size(); ++i) {
        f.choice[pr.rewards.domain[i]][choices[i][rest % choices[i].size()]] = 1.0;
        rest /= choices[i].size();
      }
      frontier.push_back(evaluate_profile(p, pr.rewards, pr.terminal, f));
    }

    for (auto w : {std::array<double, 2>{0.5, 0.5}, {0.9, 0.1}, {0.1, 0.9}}) {
      SweepPoint pt = solve_scalarized(p, pr.rewards, pr.terminal, pr.corners, w);
      REQUIRE(pt.solved);
      for (const ValueProfile& vp : frontier)
        CHECK_FALSE(dominates(vp, pt.profile, 1e-6));
    }
  }
  CHECK(ran >= 10);
}

TEST_CASE("an empty weight list yields an empty sweep") {
  ProductMdp p = chain3();
  Prepared pr = prepare(p);
  CHECK(pareto_sweep(p, pr.rewards, pr.terminal, pr.corners, {}).empty());
}
