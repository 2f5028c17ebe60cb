#include "nwsynth/rlc.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

namespace nwsynth {
namespace {

using testing::caller_callee_composition;
using testing::caller_callee_library;
using testing::loop_composition;
using testing::loop_library;

bool has(const std::vector<std::string>& d, const std::string& suffix) {
  for (const auto& s : d)
    if (s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) return true;
  return false;
}

TEST(Validate, LoopFixtureIsValid) {
  auto lib = loop_library();
  EXPECT_TRUE(validate(lib).empty());
  EXPECT_TRUE(validate(loop_composition(), lib).empty());
}

TEST(Validate, DanglingInterfaceTarget) {
  auto lib = loop_library();
  Composition c{{Element{0, {1}}}};
  EXPECT_TRUE(has(validate(c, lib), "dangling interface target"));
}

TEST(Validate, CallArityMismatch) {
  auto lib = loop_library();
  lib.components[0].calls.clear();
  EXPECT_TRUE(has(validate(lib), "call arity mismatch"));
}

TEST(Validate, PartialDeltaAndBoundaryInitial) {
  auto lib = loop_library();
  lib.components[0].delta[1][0] = -1;
  lib.components[0].initial = 1;
  auto d = validate(lib);
  EXPECT_TRUE(has(d, "transition function is not total"));
  EXPECT_TRUE(has(d, "initial state is a call or return state"));
}

TEST(Step, LoopStaysInternal) {
  auto lib = loop_library();
  auto comp = loop_composition();
  auto r = step(comp, lib, initial_stack_state(comp, lib), 0);
  EXPECT_EQ(r.tag, Tag::Int);
  EXPECT_EQ(r.letter, (Letter{0, 0}));
  EXPECT_EQ(r.next.top_state, 0);
  EXPECT_FALSE(r.terminated);
}

TEST(Step, CallerCalleeCallReturnTerminate) {
  auto lib = caller_callee_library();
  auto comp = caller_callee_composition();
  auto s0 = initial_stack_state(comp, lib);
  auto r1 = step(comp, lib, s0, 0);
  EXPECT_EQ(r1.tag, Tag::Call);
  EXPECT_EQ(r1.next.frames, (std::vector<int>{0, 1}));
  EXPECT_EQ(r1.letter.out, 1);  // callee's initial label y
  auto r2 = step(comp, lib, r1.next, 0);
  EXPECT_EQ(r2.tag, Tag::Ret);
  EXPECT_EQ(r2.next.frames, (std::vector<int>{0}));
  EXPECT_EQ(r2.next.top_state, 2);  // caller's e1
  EXPECT_EQ(r2.letter.out, 1);      // caller's label at e1
  EXPECT_FALSE(r2.terminated);
  auto r3 = step(comp, lib, r2.next, 0);
  EXPECT_EQ(r3.tag, Tag::Ret);
  EXPECT_TRUE(r3.terminated);
  EXPECT_EQ(r3.letter.out, 0);  // root's label at r1
  EXPECT_THROW(step(comp, lib, r3.next, 0), std::logic_error);
}

TEST(Simulate, LoopFourSteps) {
  auto lib = loop_library();
  auto sim = simulate(loop_composition(), lib, {0, 0, 0, 0});
  ASSERT_EQ(sim.word.size(), 4);
  for (int i = 1; i <= 4; ++i) {
    EXPECT_TRUE(sim.word.is_internal(i));
    EXPECT_EQ(sim.word.letter(i).out, 0);
  }
  EXPECT_FALSE(sim.terminated);
}

TEST(Simulate, CallerCalleeTerminates) {
  auto lib = caller_callee_library();
  auto sim = simulate(caller_callee_composition(), lib, {0, 0, 0, 0});
  ASSERT_EQ(sim.word.size(), 3);
  EXPECT_EQ(sim.word.tag(1), Tag::Call);
  EXPECT_EQ(sim.word.tag(2), Tag::Ret);
  EXPECT_EQ(sim.word.tag(3), Tag::Ret);
  EXPECT_EQ(sim.word.mu(), (PairSet{{1, 2}}));
  EXPECT_TRUE(sim.terminated);
}

TEST(Simulate, EmptyInput) {
  auto lib = loop_library();
  auto sim = simulate(loop_composition(), lib, {});
  EXPECT_TRUE(sim.word.empty());
  EXPECT_FALSE(sim.terminated);
}

// Random two-component libraries over inputs {a, b}.
Library random_library(std::mt19937& rng) {
  Library lib;
  lib.alphabet = Alphabet{{"a", "b"}, {"x", "y"}};
  lib.n_c = 1;
  lib.n_r = 1;
  for (int k = 0; k < 2; ++k) {
    Component c;
    c.name = "C" + std::to_string(k);
    c.states = {"s0", "s1", "c", "r"};
    c.initial = 0;
    c.reentry = {static_cast<int>(rng() % 2)};
    c.calls = {2};
    c.returns = {3};
    c.delta.assign(4, std::vector<int>(2));
    for (auto& row : c.delta)
      for (int& t : row) t = static_cast<int>(rng() % 4);
    for (int s = 0; s < 4; ++s) c.label.push_back(static_cast<int>(rng() % 2));
    lib.components.push_back(std::move(c));
  }
  return lib;
}

TEST(Simulate, StackDisciplineOnRandomLibraries) {
  std::mt19937 rng(8);
  for (int t = 0; t < 200; ++t) {
    auto lib = random_library(rng);
    ASSERT_TRUE(validate(lib).empty());
    Composition comp{{Element{0, {static_cast<int>(rng() % 2)}}, Element{1, {static_cast<int>(rng() % 2)}}}};
    std::vector<int> input;
    for (int i = 0; i < 12; ++i) input.push_back(static_cast<int>(rng() % 2));
    auto sim = simulate(comp, lib, input);
    const auto& w = sim.word;
    EXPECT_EQ(validate_matching(w.size(), w.calls(), w.rets(), w.mu()), std::nullopt);
    EXPECT_EQ(simulate(comp, lib, input).word, w);
    // Only the terminating step can be an unmatched return.
    for (int i = 1; i <= w.size(); ++i)
      if (w.is_ret(i) && !w.is_matched_ret(i)) {
        EXPECT_EQ(i, w.size());
        EXPECT_TRUE(sim.terminated);
      }
  }
}

TEST(CompositionTree, LoopAllLoop) {
  auto lib = loop_library();
  for (const auto& n : composition_tree(loop_composition(), lib, 2)) EXPECT_EQ(n.component, 0);
  EXPECT_EQ(composition_tree(loop_composition(), lib, 2).size(), 3u);
}

TEST(CompositionTree, CallerThenCallee) {
  auto lib = caller_callee_library();
  auto t = composition_tree(caller_callee_composition(), lib, 1);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].component, 0);
  EXPECT_EQ(t[1].component, 1);
}

TEST(CompositionTree, CrossWiredAlternates) {
  auto lib = caller_callee_library();
  Composition comp{{Element{0, {1}}, Element{1, {0}}}};
  for (const auto& n : composition_tree(comp, lib, 3)) EXPECT_EQ(n.component, static_cast<int>(n.path.size() % 2));
}

TEST(RegularTree, SingleStateIsLoop) {
  TreeTransducer t{0, {0}, {{0}}};
  EXPECT_EQ(composition_of_regular_tree(t, 1), loop_composition());
}

TEST(RegularTree, TwoStatesMatchUnfolding) {
  auto lib = caller_callee_library();
  TreeTransducer t{0, {0, 1}, {{1}, {0}}};
  auto comp = composition_of_regular_tree(t, 1);
  EXPECT_EQ(comp, (Composition{{Element{0, {1}}, Element{1, {0}}}}));
  for (int d = 0; d <= 4; ++d) {
    std::vector<int> labels;
    for (const auto& n : composition_tree(comp, lib, d)) labels.push_back(n.component);
    EXPECT_EQ(labels, unfold(t, 1, d));
  }
}

TEST(RegularTree, UnreachableStatesDropped) {
  auto lib = caller_callee_library();
  TreeTransducer t{1, {0, 1, 0}, {{0}, {2}, {1}}};
  auto comp = composition_of_regular_tree(t, 1);
  EXPECT_EQ(comp.size(), 2);
  // Same behavior as the reachable part written by hand.
  Composition expect{{Element{1, {1}}, Element{0, {0}}}};
  for (int len = 0; len <= 6; ++len) {
    std::vector<int> input(len, 0);
    EXPECT_EQ(simulate(comp, lib, input).word, simulate(expect, lib, input).word);
  }
}

TEST(Io, LibraryRoundTrip) {
  auto lib = caller_callee_library();
  auto again = library_from_json(library_to_json(lib));
  EXPECT_EQ(library_to_json(again), library_to_json(lib));
  auto comp = caller_callee_composition();
  EXPECT_EQ(composition_from_json(composition_to_json(comp, lib), lib), comp);
}

}  // namespace
}  // namespace nwsynth
