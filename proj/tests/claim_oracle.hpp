#pragma once

#include <set>
#include <tuple>
#include <vector>

#include "nwsynth/abt.hpp"

namespace nwsynth::testing {

/// A computation of a composition that starts at its root and returns from it.
struct ReturningComputation {
  std::vector<std::pair<Letter, Tag>> steps;  // the body and the returning step
  int ret = 0;                                // return index of the root component
};

/// All returning computations on input words of length at most max_len whose
/// call nesting below the root stays within depth.
inline std::vector<ReturningComputation> returning_computations(const Composition& comp, const Library& lib,
                                                                int depth, int max_len) {
  const Component& root = lib.components[comp.elements[0].component];
  const int n_in = lib.num_inputs();
  std::vector<ReturningComputation> out;
  auto extend = [&](auto&& self, const StackState& st, std::vector<std::pair<Letter, Tag>>& steps) -> void {
    if (static_cast<int>(steps.size()) == max_len) return;
    for (int a = 0; a < n_in; ++a) {
      auto r = step(comp, lib, st, a);
      if (static_cast<int>(r.next.frames.size()) - 1 > depth) continue;
      steps.emplace_back(r.letter, r.tag);
      if (r.terminated)
        out.push_back({steps, root.return_index(r.next.top_state)});
      else
        self(self, r.next, steps);
      steps.pop_back();
    }
  };
  std::vector<std::pair<Letter, Tag>> steps;
  extend(extend, initial_stack_state(comp, lib), steps);
  return out;
}

/// End states of the runs from q over w, with whether a Büchi state was entered.
inline std::set<std::pair<State, bool>> run_ends(const NwbaIndex& ix, const NestedWord& w, State q) {
  using Config = std::tuple<State, std::vector<HierSymbol>, bool>;
  std::set<Config> cur{{q, {}, false}};
  for (Position i = 1; i <= w.size(); ++i) {
    Letter l = w.letter(i);
    std::set<Config> next;
    for (const auto& [s, stack, seen] : cur) {
      if (w.is_internal(i)) {
        for (State t : ix.internals(s, l)) next.insert({t, stack, seen || ix.buchi(t)});
      } else if (w.is_call(i)) {
        for (auto [t, p] : ix.calls(s, l)) {
          auto st = stack;
          st.push_back(p);
          next.insert({t, std::move(st), seen || ix.buchi(t)});
        }
      } else if (!stack.empty()) {
        for (auto [p, t] : ix.returns(s, l)) {
          if (p != stack.back()) continue;
          auto st = stack;
          st.pop_back();
          next.insert({t, std::move(st), seen || ix.buchi(t)});
        }
      }
    }
    cur = std::move(next);
  }
  std::set<std::pair<State, bool>> ends;
  for (const auto& [s, stack, seen] : cur) ends.insert({s, seen});
  return ends;
}

/// CallCheck states (q, sigma, q2, ret, out, b) witnessed by a returning
/// computation: the automaton reads the call letter (sigma, root label), the
/// body, and the returning step relabelled with output out, going from q to q2
/// and entering a Büchi state when b = 1.
inline std::set<std::tuple<State, int, State, int, int, int>> brute_call_checks(const Library& lib,
                                                                               const NwbaIndex& ix,
                                                                               const Composition& comp, int depth,
                                                                               int max_len) {
  const Component& root = lib.components[comp.elements[0].component];
  const int n_q = static_cast<int>(ix.automaton().states.size());
  std::set<std::tuple<State, int, State, int, int, int>> out;
  for (const auto& rc : returning_computations(comp, lib, depth, max_len))
    for (int sigma = 0; sigma < lib.num_inputs(); ++sigma)
      for (int o = 0; o < static_cast<int>(lib.alphabet.outputs.size()); ++o) {
        std::vector<std::pair<Letter, Tag>> word{{Letter{sigma, root.label[root.initial]}, Tag::Call}};
        word.insert(word.end(), rc.steps.begin(), rc.steps.end());
        word.back().first.out = o;
        auto w = build_nested_word(word);
        for (State q = 0; q < n_q; ++q)
          for (auto [q2, seen] : run_ends(ix, w, q)) {
            out.insert({q, sigma, q2, rc.ret, o, 0});
            if (seen) out.insert({q, sigma, q2, rc.ret, o, 1});
          }
      }
  return out;
}

inline std::tuple<State, int, State, int, int, int> call_check_key(const AbtState& s) {
  return {s.q, s.sigma, s.q2, s.ret, s.out, s.b};
}

}  // namespace nwsynth::testing
