#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "handoff/end_components.hpp"
#include "handoff/examples.hpp"
#include "handoff/synthesis.hpp"
#include "test_util.hpp"

using namespace handoff;
using namespace testutil;

TEST_CASE("an absorbing state is its own maximal end component") {
  // v0 -> v1 (absorbing). Only v1 can sustain a run.
  auto p = make_product(2, 1,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {1}, {1.0}, {}}},
                        point_mass(2, 0), 0.9, {});
  auto mecs = maximal_end_components(p);
  REQUIRE(mecs.size() == 1);
  CHECK(mecs[0].states == std::vector<int>{1});
  CHECK(mecs[0].staying.at(1) == std::vector<int>{0});
}

TEST_CASE("one-way bridge between two cycles yields two components") {
  // Cycle {0,1} and cycle {2,3}; action 1 at state 1 jumps to the second
  // cycle, so it is not a staying action of the first component.
  auto p = make_product(4, 2,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {0}, {1.0}, {}},
                         {1, 1, {2}, {1.0}, {}},
                         {2, 0, {3}, {1.0}, {}},
                         {3, 0, {2}, {1.0}, {}}},
                        point_mass(4, 0), 0.9, {});
  auto mecs = maximal_end_components(p);
  REQUIRE(mecs.size() == 2);
  CHECK(mecs[0].states == std::vector<int>{0, 1});
  CHECK(mecs[1].states == std::vector<int>{2, 3});
  CHECK(mecs[0].staying.at(1) == std::vector<int>{0});  // the jump is pruned
}

TEST_CASE("purely transient states form no component") {
  // v0 -> v1 -> v2 (absorbing); only the sink survives.
  auto p = make_product(3, 1,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {2}, {1.0}, {}},
                         {2, 0, {2}, {1.0}, {}}},
                        point_mass(3, 0), 0.9, {});
  auto mecs = maximal_end_components(p);
  REQUIRE(mecs.size() == 1);
  CHECK(mecs[0].states == std::vector<int>{2});
}

TEST_CASE("probabilistic exit keeps a state out of every component") {
  // Action at v0 stays with p=0.5 and leaks to the sink with p=0.5: the
  // support leaves {v0}, so v0 sustains nothing.
  auto p = make_product(2, 1,
                        {{0, 0, {0, 1}, {0.5, 0.5}, {}},
                         {1, 0, {1}, {1.0}, {}}},
                        point_mass(2, 0), 0.9, {});
  auto mecs = maximal_end_components(p);
  REQUIRE(mecs.size() == 1);
  CHECK(mecs[0].states == std::vector<int>{1});
}

TEST_CASE("accepting components respect avoid and repeat sets") {
  // Two absorbing states; only v1 is marked accepting, v2 is forbidden.
  auto p = make_product(3, 1,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {1}, {1.0}, {}},
                         {2, 0, {2}, {1.0}, {}}},
                        point_mass(3, 0), 0.9, {{{2}, {1, 2}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 1);
  CHECK(aecs[0].states == std::vector<int>{1});
  CHECK(accepting_states_union(aecs) == std::vector<int>{1});
}

TEST_CASE("an avoid state inside the only cycle kills the component") {
  auto p = make_product(2, 1,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {0}, {1.0}, {}}},
                        point_mass(2, 0), 0.9, {{{1}, {0}}});
  CHECK(accepting_end_components(p).empty());
  CHECK(accepting_states_union({}).empty());
}

TEST_CASE("a maximal component without a repeat state is not accepting") {
  auto p = make_product(2, 1,
                        {{0, 0, {0}, {1.0}, {}},
                         {1, 0, {1}, {1.0}, {}}},
                        point_mass(2, 0), 0.9, {{{}, {1}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 1);
  CHECK(aecs[0].states == std::vector<int>{1});
}

TEST_CASE("components met under several pairs are merged once") {
  // The 2-cycle {0,1} satisfies both pairs; it must appear a single time.
  auto p = make_product(2, 2,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {0}, {1.0}, {}},
                         {1, 1, {1}, {1.0}, {}}},
                        point_mass(2, 0), 0.9, {{{}, {0}}, {{}, {1}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 1);
  CHECK(aecs[0].states == std::vector<int>{0, 1});
  CHECK(aecs[0].staying.at(1) == std::vector<int>{0, 1});
}

TEST_CASE("different pairs may contribute overlapping components") {
  // Pair 0 forbids v2, so its component is the inner cycle {0,1}; pair 1
  // allows everything and finds the full triangle. Both are reported.
  auto p = make_product(3, 2,
                        {{0, 0, {1}, {1.0}, {}},
                         {1, 0, {0}, {1.0}, {}},
                         {1, 1, {2}, {1.0}, {}},
                         {2, 0, {0}, {1.0}, {}}},
                        point_mass(3, 0), 0.9, {{{2}, {0}}, {{}, {2}}});
  auto aecs = accepting_end_components(p);
  REQUIRE(aecs.size() == 2);
  std::sort(aecs.begin(), aecs.end(),
            [](const EndComponent& a, const EndComponent& b) { return a.states < b.states; });
  CHECK(aecs[0].states == std::vector<int>{0, 1});
  CHECK(aecs[1].states == std::vector<int>{0, 1, 2});
  // The union de-duplicates the shared states.
  CHECK(accepting_states_union(aecs) == std::vector<int>{0, 1, 2});
}

TEST_CASE("returned components are internally consistent") {
  std::mt19937_64 rng(4242);
  RandomOptions opt;
  opt.max_states = 8;
  opt.acceptance_pairs = 2;
  for (int trial = 0; trial < 200; ++trial) {
    ProductMdp p = random_product(rng, opt);
    for (const EndComponent& ec : maximal_end_components(p)) {
      std::set<int> w(ec.states.begin(), ec.states.end());
      CHECK(is_end_component(p, w));
      // The recorded staying actions are exactly those whose support stays in.
      for (int v : ec.states) {
        std::vector<int> expect;
        for (int r : staying_rows_in(p, v, w)) expect.push_back(p.rows[v][r].action);
        std::sort(expect.begin(), expect.end());
        CHECK(ec.staying.at(v) == expect);
      }
    }
    // Maximal components are pairwise disjoint.
    auto mecs = maximal_end_components(p);
    std::set<int> seen;
    for (const EndComponent& ec : mecs)
      for (int v : ec.states) CHECK(seen.insert(v).second);
  }
}

TEST_CASE("exhaustive oracle agrees on random products") {
  std::mt19937_64 rng(90210);
  RandomOptions opt;
  opt.max_states = 6;
  opt.max_actions = 3;
  opt.acceptance_pairs = 2;
  for (int trial = 0; trial < 100; ++trial) {
    ProductMdp p = random_product(rng, opt);

    auto mecs = maximal_end_components(p);
    auto want = oracle_mecs(p, full_universe(p));
    REQUIRE(mecs.size() == want.size());
    for (size_t i = 0; i < mecs.size(); ++i) {
      CHECK(mecs[i].states == want[i].states);
      CHECK(mecs[i].staying == want[i].staying);
    }

    // Overlapping components can tie on their smallest member, so compare
    // under a full lexicographic order.
    auto by_states = [](const EndComponent& a, const EndComponent& b) {
      return a.states < b.states;
    };
    auto aecs = accepting_end_components(p);
    auto want2 = oracle_aecs(p);
    std::sort(aecs.begin(), aecs.end(), by_states);
    std::sort(want2.begin(), want2.end(), by_states);
    REQUIRE(aecs.size() == want2.size());
    for (size_t i = 0; i < aecs.size(); ++i) {
      CHECK(aecs[i].states == want2[i].states);
      CHECK(aecs[i].staying == want2[i].staying);
    }
  }
}

TEST_CASE("arm product has a single accepting component at the goal") {
  InputModels in = build_arm();
  TwoStage ts = prepare_two_stage(compose_shared_autonomy(in.ma, in.mh, in.att), in.dra);
  REQUIRE(ts.accepting.size() == 1);
  // Every member state has completed both subtasks and satisfied the
  // objective; it differs only in the attention level.
  for (int v : ts.accepting[0].states) {
    CHECK(ts.product.sa_of[v].system == "0,0");
    CHECK(ts.product.q_of[v] == "qacc");
  }
}

TEST_CASE("strict-obstacle gridworld keeps its accepting components off unsafe cells") {
  InputModels in = build_gridworld();
  SharedAutonomyMdp sa = compose_shared_autonomy(in.ma, in.mh, in.att);
  ProductMdp p = product_with_dra(sa, in.dra);
  auto aecs = accepting_end_components(p);
  REQUIRE(!aecs.empty());
  for (const EndComponent& ec : aecs)
    for (int v : ec.states) CHECK(p.q_of[v] != "qbad");
}
