#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nwsynth/alphabet.hpp"
#include "nwsynth/nested_word.hpp"

namespace nwsynth {

/// Recursive component: a finite transducer with call, return and re-entry
/// states. States are indices into `states`; -1 marks an unknown or missing entry.
struct Component {
  std::string name;
  std::vector<std::string> states;
  int initial = 0;
  std::vector<int> reentry;
  std::vector<int> calls;
  std::vector<int> returns;
  std::vector<std::vector<int>> delta;  // delta[s][input]
  std::vector<int> label;               // output symbol of each state

  int num_states() const { return static_cast<int>(states.size()); }
  /// j such that s is the j-th call state, or -1.
  int call_index(int s) const { return index_in(calls, s); }
  int return_index(int s) const { return index_in(returns, s); }

 private:
  static int index_in(const std::vector<int>& v, int s) {
    auto it = std::find(v.begin(), v.end(), s);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
  }
};

struct Library {
  Alphabet alphabet;
  int n_c = 1;
  int n_r = 1;
  std::vector<Component> components;

  int num_inputs() const { return static_cast<int>(alphabet.inputs.size()); }
  int find(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(components.size()); ++i)
      if (components[i].name == name) return i;
    return -1;
  }
};

/// Element e (0-based here, 1-based in files) runs component `component`; its
/// j-th call state invokes element interface[j]. Element 0 is the root.
struct Element {
  int component = 0;
  std::vector<int> interface;
  bool operator==(const Element&) const = default;
};

struct Composition {
  std::vector<Element> elements;
  int size() const { return static_cast<int>(elements.size()); }
  bool operator==(const Composition&) const = default;
};

inline std::vector<std::string> validate(const Library& lib) {
  std::vector<std::string> d;
  auto add = [&](const std::string& c, const std::string& what) { d.push_back(c + ": " + what); };
  if (lib.components.empty()) d.push_back("library has no components");
  if (lib.n_c < 0 || lib.n_r < 1) d.push_back("arities must satisfy n_c >= 0 and n_r >= 1");
  std::set<std::string> names;
  int n_out = static_cast<int>(lib.alphabet.outputs.size());
  for (const auto& c : lib.components) {
    if (!names.insert(c.name).second) add(c.name, "duplicate component name");
    int n = c.num_states();
    auto known = [&](int s) { return s >= 0 && s < n; };
    if (static_cast<int>(c.calls.size()) != lib.n_c) add(c.name, "call arity mismatch");
    if (static_cast<int>(c.returns.size()) != lib.n_r) add(c.name, "return arity mismatch");
    if (static_cast<int>(c.reentry.size()) != lib.n_r) add(c.name, "reentry arity mismatch");
    if (!known(c.initial)) add(c.name, "unknown initial state");
    for (const auto* v : {&c.reentry, &c.calls, &c.returns})
      for (int s : *v)
        if (!known(s)) add(c.name, "unknown state");
    std::set<int> boundary(c.calls.begin(), c.calls.end());
    if (static_cast<int>(boundary.size()) != static_cast<int>(c.calls.size())) add(c.name, "duplicate call state");
    std::set<int> rets(c.returns.begin(), c.returns.end());
    if (rets.size() != c.returns.size()) add(c.name, "duplicate return state");
    for (int s : rets)
      if (boundary.count(s)) add(c.name, "state is both a call and a return state");
    boundary.insert(rets.begin(), rets.end());
    if (boundary.count(c.initial)) add(c.name, "initial state is a call or return state");
    for (int s : c.reentry)
      if (boundary.count(s)) add(c.name, "re-entry state is a call or return state");
    bool total = static_cast<int>(c.delta.size()) == n;
    for (const auto& row : c.delta) {
      total = total && static_cast<int>(row.size()) == lib.num_inputs();
      for (int t : row) total = total && known(t);
    }
    if (!total) add(c.name, "transition function is not total");
    bool labeled = static_cast<int>(c.label.size()) == n;
    for (int o : c.label) labeled = labeled && o >= 0 && o < n_out;
    if (!labeled) add(c.name, "missing or unknown output label");
  }
  return d;
}

inline std::vector<std::string> validate(const Composition& comp, const Library& lib) {
  std::vector<std::string> d;
  if (comp.elements.empty()) d.push_back("composition has no elements");
  for (int e = 0; e < comp.size(); ++e) {
    const auto& el = comp.elements[e];
    std::string at = "element " + std::to_string(e + 1) + ": ";
    if (el.component < 0 || el.component >= static_cast<int>(lib.components.size())) d.push_back(at + "unknown component");
    if (static_cast<int>(el.interface.size()) != lib.n_c) d.push_back(at + "interface arity mismatch");
    for (int t : el.interface)
      if (t < 0 || t >= comp.size()) d.push_back(at + "dangling interface target");
  }
  return d;
}

/// State of the induced transducer: the call stack of element indices and the
/// component state of the top frame. Call and return states are never occupied.
struct StackState {
  std::vector<int> frames;
  int top_state = 0;
  bool terminated = false;
  auto operator<=>(const StackState&) const = default;
};

struct StepResult {
  StackState next;
  Letter letter;
  Tag tag;
  bool terminated;
};

inline StackState initial_stack_state(const Composition& comp, const Library& lib) {
  return StackState{{0}, lib.components[comp.elements[0].component].initial, false};
}

inline StepResult step(const Composition& comp, const Library& lib, const StackState& s, int input) {
  if (s.terminated) throw std::logic_error("cannot step a terminated computation");
  const Element& el = comp.elements[s.frames.back()];
  const Component& c = lib.components[el.component];
  int t = c.delta.at(s.top_state).at(input);
  StepResult r{s, Letter{input, 0}, Tag::Int, false};
  if (int j = c.call_index(t); j >= 0) {
    int callee = el.interface[j];
    const Component& cc = lib.components[comp.elements[callee].component];
    r.next.frames.push_back(callee);
    r.next.top_state = cc.initial;
    r.letter.out = cc.label[cc.initial];
    r.tag = Tag::Call;
  } else if (int j = c.return_index(t); j >= 0) {
    r.tag = Tag::Ret;
    if (s.frames.size() >= 2) {
      r.next.frames.pop_back();
      const Component& caller = lib.components[comp.elements[r.next.frames.back()].component];
      r.next.top_state = caller.reentry[j];
      r.letter.out = caller.label[caller.reentry[j]];
    } else {
      r.next.top_state = t;
      r.next.terminated = r.terminated = true;
      r.letter.out = c.label[t];
    }
  } else {
    r.next.top_state = t;
    r.letter.out = c.label[t];
  }
  return r;
}

struct Simulation {
  NestedWord word;
  bool terminated = false;
};

inline Simulation simulate(const Composition& comp, const Library& lib, const std::vector<int>& input) {
  std::vector<std::pair<Letter, Tag>> out;
  StackState s = initial_stack_state(comp, lib);
  for (int a : input) {
    auto r = step(comp, lib, s, a);
    out.emplace_back(r.letter, r.tag);
    s = r.next;
    if (r.terminated) break;
  }
  return Simulation{build_nested_word(out), s.terminated};
}

struct TreeNode {
  std::vector<int> path;  // directions, 0-based
  int element;
  int component;
};

/// The composition tree truncated to depth d, in breadth-first order.
inline std::vector<TreeNode> composition_tree(const Composition& comp, const Library& lib, int depth) {
  std::vector<TreeNode> nodes{{{}, 0, comp.elements[0].component}};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (static_cast<int>(nodes[i].path.size()) == depth) continue;
    for (int j = 0; j < lib.n_c; ++j) {
      TreeNode child = nodes[i];
      child.path.push_back(j);
      child.element = comp.elements[nodes[i].element].interface[j];
      child.component = comp.elements[child.element].component;
      nodes.push_back(std::move(child));
    }
  }
  return nodes;
}

/// Deterministic top-down tree transducer generating a regular composition
/// tree: state q outputs component label[q] and moves to next[q][j] in direction j.
struct TreeTransducer {
  int initial = 0;
  std::vector<int> label;
  std::vector<std::vector<int>> next;

  int num_states() const { return static_cast<int>(label.size()); }
};

/// Labels of the depth-d unfolding, breadth-first; compare with composition_tree.
inline std::vector<int> unfold(const TreeTransducer& t, int n_c, int depth) {
  std::vector<int> labels;
  std::deque<std::pair<int, int>> q{{t.initial, 0}};
  while (!q.empty()) {
    auto [s, d] = q.front();
    q.pop_front();
    labels.push_back(t.label[s]);
    if (d == depth) continue;
    for (int j = 0; j < n_c; ++j) q.emplace_back(t.next[s][j], d + 1);
  }
  return labels;
}

/// One element per state reachable from the initial state, numbered in
/// breadth-first order so the initial state becomes the root.
inline Composition composition_of_regular_tree(const TreeTransducer& t, int n_c) {
  std::vector<int> id(t.num_states(), -1);
  std::vector<int> order{t.initial};
  id[t.initial] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int j = 0; j < n_c; ++j) {
      int s = t.next[order[i]][j];
      if (id[s] < 0) {
        id[s] = static_cast<int>(order.size());
        order.push_back(s);
      }
    }
  Composition c;
  for (int s : order) {
    Element e{t.label[s], {}};
    for (int j = 0; j < n_c; ++j) e.interface.push_back(id[t.next[s][j]]);
    c.elements.push_back(std::move(e));
  }
  return c;
}

}  // namespace nwsynth
