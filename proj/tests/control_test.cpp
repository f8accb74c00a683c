#include <gtest/gtest.h>

#include <random>

#include "desctl/desctl.hpp"
#include "oracles.hpp"

using namespace desctl;
using fms::Partition;

namespace {

using Words = std::vector<std::string>;

// Only the conveyor loads and the assembly completions uncontrollable, with
// C3.load controllable.
Automaton plant_c12_loads() {
  Alphabet sigma;
  for (const auto& e : fms::event_table()) {
    bool unc = e.id == "C1.load" || e.id == "C2.load" || e.id == "A.done1" || e.id == "A.done2";
    sigma.add({e.id, !unc});
  }
  return fms::build_total().relabeled(sigma);
}

// a b u over {a, b controllable; u uncontrollable}: q0 -a-> q1*, q0 -b-> q2 -u-> q3*
Automaton branching_plant() {
  Alphabet sigma({{"a", true}, {"b", true}, {"u", false}});
  AutomatonBuilder b("P", sigma);
  b.add_state("q0");
  b.add_state("q1", true);
  b.add_state("q2");
  b.add_state("q3", true);
  b.set_initial(0);
  b.add_transition(0, 0, 1);
  b.add_transition(0, 1, 2);
  b.add_transition(2, 2, 3);
  return std::move(b).build();
}

}  // namespace

TEST(ClosedLoop, NamesAndSubAlphabet) {
  auto g = fms::build_total();
  auto loop = closed_loop(g, {fms::build_supervisor(1), fms::build_supervisor(2)});
  EXPECT_EQ(loop.name(), "G/S1/S2");
  EXPECT_EQ(loop.alphabet(), g.alphabet());
  EXPECT_EQ(loop.state_name(loop.initial()), g.state_name(g.initial()) + "||qS1_1||qS2_1");
  // outside E_S1 and E_S2 the plant runs freely
  auto en = active(loop, loop.state_name(loop.initial()));
  EXPECT_EQ(en, (Words{"C1.load", "C2.load", "R.pick5", "R.pick6", "R.pick7"}));

  auto free = closed_loop(g, {});
  EXPECT_EQ(free.num_states(), g.num_states());

  Alphabet foreign({{"Z.z", true}});
  AutomatonBuilder b("Z", foreign);
  b.add_state("z", true);
  b.set_initial(0);
  EXPECT_THROW(closed_loop(g, {std::move(b).build()}), alphabet_error);
}

TEST(ClosedLoop, SupervisorFlagsComeFromPlant) {
  // S1 built with sec28 flags, plant under sec2: flags follow the plant
  auto g2 = fms::build_total(Partition::sec2);
  auto loop = closed_loop(g2, {fms::build_supervisor(1, Partition::sec28)});
  EXPECT_FALSE(loop.alphabet().controllable(loop.alphabet().find("C1.load")));
}

TEST(Controllability, PartitionSec28BothControllable) {
  auto g = fms::build_total();
  for (int cat : {1, 2}) {
    auto r = check_controllability(g, fms::build_supervisor(cat));
    EXPECT_TRUE(r.controllable) << cat;
    EXPECT_FALSE(r.counterexample);
    EXPECT_GT(r.states_checked, 0u);
    EXPECT_FALSE(oracle::controllability_violation(g, fms::build_supervisor(cat), 3)) << cat;
  }
}

// Under the sec2 partition C3.load is uncontrollable, enabled by the plant at
// its initial state, and declared but not enabled by either supervisor there.
TEST(Controllability, PartitionSec2ShortestCounterexamples) {
  auto g = fms::build_total(Partition::sec2);
  for (int cat : {1, 2}) {
    auto s = fms::build_supervisor(cat);
    auto r = check_controllability(g, s);
    ASSERT_FALSE(r.controllable);
    ASSERT_TRUE(r.counterexample);
    auto v = oracle::controllability_violation(g, s, 3);
    ASSERT_TRUE(v);
    EXPECT_EQ(r.counterexample->string, v->s);
    EXPECT_EQ(r.counterexample->event, v->e);
    EXPECT_EQ(r.counterexample->string, Words{});
    EXPECT_EQ(r.counterexample->event, "C3.load");
  }
}

TEST(Controllability, ConveyorLoadsOnlyPartition) {
  auto g = plant_c12_loads();
  auto r1 = check_controllability(g, fms::build_supervisor(1));
  ASSERT_TRUE(r1.counterexample);
  EXPECT_EQ(r1.counterexample->string, (Words{"C1.load", "C1.move"}));
  EXPECT_EQ(r1.counterexample->event, "C1.load");
  auto r2 = check_controllability(g, fms::build_supervisor(2));
  ASSERT_TRUE(r2.counterexample);
  EXPECT_EQ(r2.counterexample->string, (Words{"C2.load", "C2.move"}));
  EXPECT_EQ(r2.counterexample->event, "C2.load");
  for (int cat : {1, 2}) {
    auto s = fms::build_supervisor(cat);
    auto v = oracle::controllability_violation(g, s, 3);
    ASSERT_TRUE(v);
    auto r = check_controllability(g, s);
    EXPECT_EQ(v->s.size(), r.counterexample->string.size());
    EXPECT_EQ(v->e, r.counterexample->event);
  }
}

TEST(Controllability, CounterexampleIsGenuine) {
  auto g = fms::build_total(Partition::sec2);
  auto s = fms::build_supervisor(1);
  auto cx = *check_controllability(g, s).counterexample;
  auto se = cx.string;
  se.push_back(cx.event);
  EXPECT_TRUE(membership(g, se).in_generated);
  EXPECT_TRUE(membership(s, project(cx.string, s.alphabet())).in_generated);
  EXPECT_FALSE(membership(s, project(se, s.alphabet())).in_generated);
}

TEST(Controllability, RandomAgreesWithBoundedEnumeration) {
  std::mt19937_64 rng(1234);
  int violations = 0;
  for (int i = 0; i < 80; ++i) {
    auto sigma = oracle::random_alphabet(rng, 3, 0.4);
    auto plant = oracle::random_automaton(rng, sigma, 3, 0.6, 0.5, "P");
    Alphabet sub;
    for (std::size_t e = 0; e < 2; ++e) sub.add(sigma[e]);
    auto sup = oracle::random_automaton(rng, sub, 2, 0.6, 0.5, "S");
    auto r = check_controllability(plant, sup);
    // 3 x 2 product states bound any shortest counterexample by length 5
    auto v = oracle::controllability_violation(plant, sup, 6);
    ASSERT_EQ(r.controllable, !v.has_value()) << i;
    if (v) {
      ++violations;
      EXPECT_EQ(r.counterexample->string.size(), v->s.size());
    }
  }
  EXPECT_GT(violations, 5);
}

TEST(Nonconflict, FmsAgreesWithExploration) {
  auto g = fms::build_total();
  SupervisorSet sups{fms::build_supervisor(1), fms::build_supervisor(2)};
  auto r = check_nonconflicting(g, sups);
  auto x = oracle::explore_nonblocking(sim::ClosedLoop(g, sups), 100000);
  ASSERT_TRUE(x.complete);
  EXPECT_EQ(r.nonconflicting, x.nonblocking);
  EXPECT_EQ(r.states, x.configurations);
  if (!r.nonconflicting) {
    ASSERT_TRUE(r.witness);
    sim::ClosedLoop loop(g, sups);
    auto c = loop.initial();
    for (const auto& e : *r.witness) c = loop.fire(c, e);
  }
  for (int cat : {1, 2}) {
    SupervisorSet one{fms::build_supervisor(cat)};
    auto single = check_nonconflicting(g, one);
    auto xs = oracle::explore_nonblocking(sim::ClosedLoop(g, one), 100000);
    ASSERT_TRUE(xs.complete);
    EXPECT_EQ(single.nonconflicting, xs.nonblocking) << cat;
  }
}

TEST(Nonconflict, RandomAgreesWithExploration) {
  std::mt19937_64 rng(555);
  int conflicts = 0;
  for (int i = 0; i < 60; ++i) {
    auto sigma = oracle::random_alphabet(rng, 4, 0.3);
    auto plant = oracle::random_automaton(rng, sigma, 4, 0.6, 0.4, "P");
    Alphabet a1, a2;
    a1.add(sigma[0]);
    a1.add(sigma[1]);
    a2.add(sigma[1]);
    a2.add(sigma[2]);
    SupervisorSet sups{oracle::random_automaton(rng, a1, 2, 0.7, 0.6, "S1"),
                       oracle::random_automaton(rng, a2, 2, 0.7, 0.6, "S2")};
    auto r = check_nonconflicting(plant, sups);
    auto x = oracle::explore_nonblocking(sim::ClosedLoop(plant, sups), 1000);
    ASSERT_TRUE(x.complete);
    EXPECT_EQ(r.nonconflicting, x.nonblocking) << i;
    if (!r.nonconflicting) ++conflicts;
  }
  EXPECT_GT(conflicts, 5);
}

TEST(Supcon, BranchingToy) {
  auto p = branching_plant();
  auto spec = compile("pc(a + b)", p.alphabet(), "K");
  auto s = supcon(p, spec);
  EXPECT_EQ(s.name(), "supcon(P,K)");
  EXPECT_TRUE(equivalent(s, compile("a", p.alphabet())).equivalent);
  EXPECT_TRUE(check_controllability(p, s).controllable);
}

TEST(Supcon, EmptyWhenNothingSurvives) {
  Alphabet sigma({{"a", true}, {"u", false}});
  AutomatonBuilder b("P", sigma);
  b.add_state("q0");
  b.add_state("q1");
  b.add_state("q2", true);
  b.set_initial(0);
  b.add_transition(0, 0, 1);
  b.add_transition(1, 1, 2);
  auto p = std::move(b).build();
  auto s = supcon(p, compile("a", sigma, "K"));
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.initial(), npos);
}

TEST(Supcon, PlantAgainstItselfIsTrimPlant) {
  auto p = branching_plant();
  EXPECT_TRUE(equivalent(supcon(p, p), trim(p)).equivalent);
  auto c = fms::build("C1");
  EXPECT_TRUE(equivalent(supcon(c, c), c).equivalent);
}

TEST(Supcon, FmsSpecs) {
  auto g = fms::build_total();
  for (int cat : {1, 2}) {
    auto k = compile(fms::spec_text(cat), fms::spec_alphabet(cat), "K");
    auto s = supcon(g, k);
    EXPECT_TRUE(check_controllability(g, s).controllable);
    EXPECT_TRUE(is_sublanguage(s, closed_loop(g, {k})).holds);
    EXPECT_EQ(trim(s).num_states(), s.num_states());
    EXPECT_TRUE(s.empty() || is_nonblocking(s));
  }
}

TEST(Supcon, RandomProperties) {
  std::mt19937_64 rng(2718);
  int nonempty = 0;
  for (int i = 0; i < 50; ++i) {
    auto sigma = oracle::random_alphabet(rng, 3, 0.35);
    auto plant = oracle::random_automaton(rng, sigma, 1 + rng() % 6, 0.6, 0.4, "P");
    auto spec = oracle::random_automaton(rng, sigma, 1 + rng() % 6, 0.6, 0.5, "K");
    auto s = supcon(plant, spec);
    EXPECT_TRUE(check_controllability(plant, s).controllable) << i;
    EXPECT_TRUE(is_sublanguage(s, closed_loop(plant, {spec})).holds) << i;
    EXPECT_EQ(trim(s).num_states(), s.num_states()) << i;
    // a fixpoint: the result is its own supremal controllable sublanguage
    EXPECT_TRUE(equivalent(supcon(plant, s), s).equivalent) << i;
    // monotone in the specification
    auto narrower = supcon(plant, numbered(closed_loop(spec, {s})));
    EXPECT_TRUE(is_sublanguage(narrower, s).holds) << i;
    if (!s.empty()) ++nonempty;
  }
  EXPECT_GT(nonempty, 5);
}

// Under sec2 the initial closed-loop state already violates controllability
// (C3.load), so nothing survives the fixpoint.
TEST(Supcon, Sec2PlantAgainstS1) {
  auto g = fms::build_total(Partition::sec2);
  auto s1 = fms::build_supervisor(1);
  auto v = oracle::controllability_violation(g, s1, 0);
  ASSERT_TRUE(v);
  EXPECT_TRUE(v->s.empty());
  auto s = supcon(g, s1);
  EXPECT_TRUE(s.empty());
  EXPECT_TRUE(check_controllability(g, s).controllable);
}

TEST(Supcon, ConveyorLoadsOnlyPlantAgainstSupervisors) {
  auto g = plant_c12_loads();
  for (int cat : {1, 2}) {
    auto sup = fms::build_supervisor(cat);
    auto s = supcon(g, sup);
    ASSERT_FALSE(s.empty()) << cat;
    EXPECT_TRUE(check_controllability(g, s).controllable) << cat;
    EXPECT_TRUE(is_sublanguage(s, closed_loop(g, {sup})).holds) << cat;
    EXPECT_TRUE(is_nonblocking(s)) << cat;
    EXPECT_LT(s.num_states(), closed_loop(g, {sup}).num_states()) << cat;
  }
}
