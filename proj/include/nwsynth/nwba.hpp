#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "nwsynth/alphabet.hpp"
#include "nwsynth/nested_word.hpp"

namespace nwsynth {

using State = int;
using HierSymbol = int;

struct CallTransition {
  State from;
  Letter letter;
  State to;
  HierSymbol push;
  auto operator<=>(const CallTransition&) const = default;
};

struct InternalTransition {
  State from;
  Letter letter;
  State to;
  auto operator<=>(const InternalTransition&) const = default;
};

struct ReturnTransition {
  State from;
  HierSymbol pop;
  Letter letter;
  State to;
  auto operator<=>(const ReturnTransition&) const = default;
};

/// Nested-word Büchi automaton ⟨Σ,Q,Q0,Qf,P,P0,Pf,δc,δi,δr⟩.
///
/// `accepting` is the final-state set used for finite words. `buchi` is the set
/// that must be visited infinitely often on ω-words; when unset it is `accepting`,
/// so a hand-written automaton carries the single acceptance structure.
struct Nwba {
  Alphabet alphabet;
  std::vector<Letter> letters;
  std::vector<std::string> states;
  std::vector<State> initial;
  std::vector<State> accepting;
  std::optional<std::vector<State>> buchi;
  std::vector<std::string> hier;
  std::vector<HierSymbol> hier_initial;
  std::vector<HierSymbol> hier_final;
  std::vector<CallTransition> delta_call;
  std::vector<InternalTransition> delta_int;
  std::vector<ReturnTransition> delta_ret;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_hier() const { return static_cast<int>(hier.size()); }
  const std::vector<State>& buchi_states() const { return buchi ? *buchi : accepting; }
};

struct AutomatonReport {
  std::vector<std::string> defects;
  std::vector<std::string> warnings;
  bool valid() const { return defects.empty(); }
};

inline AutomatonReport check_automaton(const Nwba& a) {
  AutomatonReport r;
  auto state_ok = [&](State q) { return q >= 0 && q < a.num_states(); };
  auto hier_ok = [&](HierSymbol p) { return p >= 0 && p < a.num_hier(); };
  std::set<Letter> sigma(a.letters.begin(), a.letters.end());
  auto letter_ok = [&](Letter l) { return sigma.count(l) > 0; };
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) r.defects.push_back(what);
  };
  for (Letter l : a.letters)
    need(l.in >= 0 && l.in < static_cast<int>(a.alphabet.inputs.size()) && l.out >= 0 &&
             l.out < static_cast<int>(a.alphabet.outputs.size()),
         "letter outside the input/output alphabets");
  for (State q : a.initial) need(state_ok(q), "unknown initial state");
  for (State q : a.accepting) need(state_ok(q), "unknown accepting state");
  for (State q : a.buchi_states()) need(state_ok(q), "unknown Büchi state");
  for (HierSymbol p : a.hier_initial) need(hier_ok(p), "unknown initial hierarchical symbol");
  for (HierSymbol p : a.hier_final) need(hier_ok(p), "unknown final hierarchical symbol");
  for (const auto& t : a.delta_call) {
    need(state_ok(t.from) && state_ok(t.to), "call transition references unknown state");
    need(hier_ok(t.push), "unknown hierarchical symbol");
    need(letter_ok(t.letter), "call transition letter not in alphabet");
  }
  for (const auto& t : a.delta_int) {
    need(state_ok(t.from) && state_ok(t.to), "internal transition references unknown state");
    need(letter_ok(t.letter), "internal transition letter not in alphabet");
  }
  for (const auto& t : a.delta_ret) {
    need(state_ok(t.from) && state_ok(t.to), "return transition references unknown state");
    need(hier_ok(t.pop), "unknown hierarchical symbol");
    need(letter_ok(t.letter), "return transition letter not in alphabet");
  }
  std::sort(r.defects.begin(), r.defects.end());
  r.defects.erase(std::unique(r.defects.begin(), r.defects.end()), r.defects.end());
  if (a.initial.empty()) r.warnings.push_back("language is empty");
  return r;
}

/// Transition tables indexed by (state, dense letter index), with membership
/// flags. Built once per automaton and shared by the algorithms.
class NwbaIndex {
 public:
  explicit NwbaIndex(const Nwba& a)
      : a_(std::make_shared<const Nwba>(a)), n_letters_(static_cast<int>(a.alphabet.num_letters())) {
    auto q = static_cast<std::size_t>(a.num_states());
    auto cells = q * n_letters_;
    call_.resize(cells);
    int_.resize(cells);
    ret_.resize(cells);
    for (const auto& t : a.delta_call) call_[cell(t.from, t.letter)].emplace_back(t.to, t.push);
    for (const auto& t : a.delta_int) int_[cell(t.from, t.letter)].push_back(t.to);
    for (const auto& t : a.delta_ret) ret_[cell(t.from, t.letter)].emplace_back(t.pop, t.to);
    accepting_.assign(q, false);
    buchi_.assign(q, false);
    initial_.assign(q, false);
    for (State s : a.accepting) accepting_[s] = true;
    for (State s : a.buchi_states()) buchi_[s] = true;
    for (State s : a.initial) initial_[s] = true;
    hier_initial_.assign(a.num_hier(), false);
    hier_final_.assign(a.num_hier(), false);
    for (HierSymbol p : a.hier_initial) hier_initial_[p] = true;
    for (HierSymbol p : a.hier_final) hier_final_[p] = true;
    in_sigma_.assign(n_letters_, false);
    for (Letter l : a.letters) in_sigma_[letter_index(a.alphabet, l)] = true;
  }

  const Nwba& automaton() const { return *a_; }
  int num_states() const { return a_->num_states(); }

  const std::vector<std::pair<State, HierSymbol>>& calls(State q, Letter l) const { return call_[cell(q, l)]; }
  const std::vector<State>& internals(State q, Letter l) const { return int_[cell(q, l)]; }
  /// (popped symbol, target) pairs.
  const std::vector<std::pair<HierSymbol, State>>& returns(State q, Letter l) const { return ret_[cell(q, l)]; }

  bool accepting(State q) const { return accepting_[q]; }
  bool buchi(State q) const { return buchi_[q]; }
  bool initial(State q) const { return initial_[q]; }
  bool hier_initial(HierSymbol p) const { return hier_initial_[p]; }
  bool hier_final(HierSymbol p) const { return hier_final_[p]; }
  bool in_sigma(Letter l) const { return in_sigma_[letter_index(a_->alphabet, l)]; }

 private:
  std::size_t cell(State q, Letter l) const {
    return static_cast<std::size_t>(q) * n_letters_ + letter_index(a_->alphabet, l);
  }

  std::shared_ptr<const Nwba> a_;
  int n_letters_;
  std::vector<std::vector<std::pair<State, HierSymbol>>> call_;
  std::vector<std::vector<State>> int_;
  std::vector<std::vector<std::pair<HierSymbol, State>>> ret_;
  std::vector<bool> accepting_, buchi_, initial_, hier_initial_, hier_final_, in_sigma_;
};

/// Membership of a finite nested word. Inside a matched call frame the run is
/// summarized as (state after the call, pushed symbol, current state); at the
/// matched return the summary is joined with the caller's configurations saved
/// at the call. Pending calls push symbols that are never popped, so only
/// symbols in Pf are kept for them.
inline bool accepts_finite(const NwbaIndex& ix, const NestedWord& w) {
  const Nwba& a = ix.automaton();
  for (Position i = 1; i <= w.size(); ++i) {
    Letter l = w.letter(i);
    if (l.in < 0 || l.out < 0 || l.in >= static_cast<int>(a.alphabet.inputs.size()) ||
        l.out >= static_cast<int>(a.alphabet.outputs.size()) || !ix.in_sigma(l))
      throw std::invalid_argument("letter at position " + std::to_string(i) + " is not in the automaton alphabet");
  }
  // (entry state, pushed symbol, current state); entry and symbol are -1 at top level.
  using Config = std::tuple<State, HierSymbol, State>;
  struct Frame {
    std::set<Config> caller;
    Letter call_letter;
  };
  std::vector<Frame> frames;
  std::set<Config> cur;
  for (State q : a.initial) cur.insert({-1, -1, q});
  for (Position i = 1; i <= w.size() && (!cur.empty() || !frames.empty()); ++i) {
    Letter l = w.letter(i);
    std::set<Config> next;
    switch (w.tag(i)) {
      case Tag::Int:
        for (auto [e, p, q] : cur)
          for (State t : ix.internals(q, l)) next.insert({e, p, t});
        break;
      case Tag::Call:
        if (w.is_matched_call(i)) {
          for (auto [e, p, q] : cur)
            for (auto [t, push] : ix.calls(q, l)) next.insert({t, push, t});
          frames.push_back({std::move(cur), l});
        } else {
          for (auto [e, p, q] : cur)
            for (auto [t, push] : ix.calls(q, l))
              if (ix.hier_final(push)) next.insert({e, p, t});
        }
        break;
      case Tag::Ret:
        if (w.is_matched_ret(i)) {
          Frame f = std::move(frames.back());
          frames.pop_back();
          std::set<std::tuple<State, HierSymbol, State>> exits;  // (entry, symbol, target)
          for (auto [e, p, q] : cur)
            for (auto [pop, t] : ix.returns(q, l))
              if (pop == p) exits.insert({e, p, t});
          for (auto [e, p, q] : f.caller)
            for (auto [t, push] : ix.calls(q, f.call_letter))
              for (auto it = exits.lower_bound({t, push, -1}); it != exits.end() && std::get<0>(*it) == t &&
                                                               std::get<1>(*it) == push;
                   ++it)
                next.insert({e, p, std::get<2>(*it)});
        } else {
          for (auto [e, p, q] : cur)
            for (auto [pop, t] : ix.returns(q, l))
              if (ix.hier_initial(pop)) next.insert({e, p, t});
        }
        break;
    }
    cur = std::move(next);
  }
  if (!frames.empty()) return false;
  for (auto [e, p, q] : cur)
    if (ix.accepting(q)) return true;
  return false;
}

inline bool accepts_finite(const Nwba& a, const NestedWord& w) { return accepts_finite(NwbaIndex(a), w); }

/// Re-expresses the automaton over `target`, matching symbols by name.
/// Letters with a symbol unknown to `target` are dropped with their transitions.
inline Nwba align_alphabet(const Nwba& a, const Alphabet& target) {
  if (a.alphabet == target) return a;
  auto map = [&](Letter l) -> std::optional<Letter> {
    int in = target.input_index(a.alphabet.inputs.at(l.in));
    int out = target.output_index(a.alphabet.outputs.at(l.out));
    if (in < 0 || out < 0) return std::nullopt;
    return Letter{in, out};
  };
  Nwba b = a;
  b.alphabet = target;
  b.letters.clear();
  b.delta_call.clear();
  b.delta_int.clear();
  b.delta_ret.clear();
  for (Letter l : a.letters)
    if (auto m = map(l)) b.letters.push_back(*m);
  for (auto t : a.delta_call)
    if (auto m = map(t.letter)) b.delta_call.push_back({t.from, *m, t.to, t.push});
  for (auto t : a.delta_int)
    if (auto m = map(t.letter)) b.delta_int.push_back({t.from, *m, t.to});
  for (auto t : a.delta_ret)
    if (auto m = map(t.letter)) b.delta_ret.push_back({t.from, t.pop, *m, t.to});
  return b;
}

/// One state, every transition over the full letter alphabet; accepts everything.
inline Nwba universal_nwba(const Alphabet& ab) {
  Nwba a;
  a.alphabet = ab;
  for (int i = 0; i < static_cast<int>(ab.num_letters()); ++i) a.letters.push_back(letter_at(ab, i));
  a.states = {"q0"};
  a.initial = {0};
  a.accepting = {0};
  a.hier = {"p"};
  a.hier_initial = {0};
  a.hier_final = {0};
  for (Letter l : a.letters) {
    a.delta_call.push_back({0, l, 0, 0});
    a.delta_int.push_back({0, l, 0});
    a.delta_ret.push_back({0, 0, l, 0});
  }
  return a;
}

}  // namespace nwsynth
