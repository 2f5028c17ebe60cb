#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nwsynth/nwba.hpp"
#include "nwsynth/rlc.hpp"

namespace nwsynth {

/// Node of the product of one composition element with the NWBA: the element's
/// component is in state s, the automaton in q; `seen` records a Büchi visit.
struct ProductNode {
  int element = 0;
  int s = 0;
  State q = 0;
  bool seen = false;
  auto operator<=>(const ProductNode&) const = default;
};

enum class CounterexampleKind { Finite, InternalLasso, SummaryLasso, PendingDescent };

inline std::string to_string(CounterexampleKind k) {
  switch (k) {
    case CounterexampleKind::Finite: return "finite";
    case CounterexampleKind::InternalLasso: return "internal-lasso";
    case CounterexampleKind::SummaryLasso: return "summary-lasso";
    case CounterexampleKind::PendingDescent: return "pending-descent";
  }
  return "";
}

/// Inputs `stem` then `cycle` repeated forever (cycle empty for finite kinds).
struct Counterexample {
  CounterexampleKind kind;
  std::vector<int> stem;
  std::vector<int> cycle;
  std::string sketch;
};

/// Summary of a returning call: the callee left through return index `ret`
/// on input `sigma`, with the automaton in q just before the return letter.
struct CallSummary {
  int ret;
  int sigma;
  State q;
  bool seen;
  auto operator<=>(const CallSummary&) const = default;
};

class ModelChecker {
 public:
  ModelChecker(const Composition& comp, const Library& lib, const Nwba& a)
      : comp_(comp), lib_(lib), ix_(align_alphabet(a, lib.alphabet)) {
    summ_.assign(comp.size(), std::vector<std::map<CallSummary, std::vector<int>>>(ix_.num_states()));
    saturate();
  }

  /// Summ_e(q1) with a witness input word per tuple (from the step after the call
  /// through the returning step).
  const std::map<CallSummary, std::vector<int>>& summaries(int element, State q1) const { return summ_[element][q1]; }

  std::optional<Counterexample> run() const {
    if (auto c = finite()) return c;
    // Frames reachable by pending calls, with their entry words.
    struct Frame {
      int element;
      State q1;
      std::vector<int> word;
    };
    std::vector<Frame> frames;
    std::map<std::pair<int, State>, std::vector<int>> found;
    auto root_starts = root_start();
    auto explore_calls = [&](const std::map<ProductNode, std::vector<int>>& reach) {
      for (const auto& [n, w] : reach)
        for (const auto& c : moves(n).calls)
          if (!found.count({c.element, c.q1})) {
            auto word = w;
            word.push_back(c.sigma);
            found[{c.element, c.q1}] = word;
            frames.push_back({c.element, c.q1, word});
          }
    };
    auto root_reach = search(root_starts, false);
    explore_calls(root_reach);
    for (std::size_t k = 0; k < frames.size(); ++k)
      explore_calls(search({{entry(frames[k].element, frames[k].q1), frames[k].word}}, false));

    for (bool internal_only : {true, false}) {
      auto kind = internal_only ? CounterexampleKind::InternalLasso : CounterexampleKind::SummaryLasso;
      if (auto c = lasso(root_reach, internal_only, kind, "root frame")) return c;
      for (const auto& f : frames) {
        auto reach = search({{entry(f.element, f.q1), f.word}}, false);
        std::string where = "pending frame of element " + std::to_string(f.element + 1);
        if (auto c = lasso(reach, internal_only, kind, where)) return c;
      }
    }
    return descent(frames);
  }

 private:
  struct Edge {
    ProductNode to;
    std::vector<int> word;
    bool internal;
  };
  struct Exit {
    CallSummary summary;
  };
  struct PendingCall {
    int element;
    State q1;
    int sigma;
    bool seen;
  };
  struct Moves {
    std::vector<Edge> local;
    std::vector<Exit> exits;
    std::vector<PendingCall> calls;
  };

  const Component& component(int e) const { return lib_.components[comp_.elements[e].component]; }

  ProductNode entry(int e, State q1) const { return ProductNode{e, component(e).initial, q1, false}; }

  std::map<ProductNode, std::vector<int>> root_start() const {
    std::map<ProductNode, std::vector<int>> m;
    for (State q0 : ix_.automaton().initial) m[entry(0, q0)] = {};
    return m;
  }

  Moves moves(const ProductNode& n) const {
    Moves m;
    const Component& c = component(n.element);
    const Element& el = comp_.elements[n.element];
    for (int sigma = 0; sigma < lib_.num_inputs(); ++sigma) {
      int t = c.delta[n.s][sigma];
      if (int j = c.call_index(t); j >= 0) {
        int callee = el.interface[j];
        const Component& cc = component(callee);
        for (auto [q1, p] : ix_.calls(n.q, Letter{sigma, cc.label[cc.initial]})) {
          if (ix_.hier_final(p)) m.calls.push_back({callee, q1, sigma, n.seen || ix_.buchi(q1)});
          for (const auto& [sm, w] : summ_[callee][q1]) {
            int re = c.reentry[sm.ret];
            for (auto [pop, q2] : ix_.returns(sm.q, Letter{sm.sigma, c.label[re]})) {
              if (pop != p) continue;
              std::vector<int> word{sigma};
              word.insert(word.end(), w.begin(), w.end());
              bool seen = n.seen || ix_.buchi(q1) || sm.seen || ix_.buchi(q2);
              m.local.push_back({ProductNode{n.element, re, q2, seen}, std::move(word), false});
            }
          }
        }
      } else if (int i = c.return_index(t); i >= 0) {
        m.exits.push_back({CallSummary{i, sigma, n.q, n.seen}});
      } else {
        for (State q2 : ix_.internals(n.q, Letter{sigma, c.label[t]}))
          m.local.push_back({ProductNode{n.element, t, q2, n.seen || ix_.buchi(q2)}, {sigma}, true});
      }
    }
    return m;
  }

  /// Breadth-first reachability in one frame, keeping a word per node.
  std::map<ProductNode, std::vector<int>> search(std::map<ProductNode, std::vector<int>> start,
                                                 bool internal_only) const {
    std::deque<ProductNode> work;
    for (const auto& [n, w] : start) work.push_back(n);
    while (!work.empty()) {
      ProductNode n = work.front();
      work.pop_front();
      for (auto& e : moves(n).local) {
        if (internal_only && !e.internal) continue;
        if (start.count(e.to)) continue;
        auto w = start[n];
        w.insert(w.end(), e.word.begin(), e.word.end());
        start[e.to] = std::move(w);
        work.push_back(e.to);
      }
    }
    return start;
  }

  void saturate() {
    for (bool changed = true; changed;) {
      changed = false;
      for (int e = 0; e < comp_.size(); ++e)
        for (State q1 = 0; q1 < ix_.num_states(); ++q1)
          for (const auto& [n, w] : search({{entry(e, q1), {}}}, false))
            for (const auto& x : moves(n).exits)
              if (!summ_[e][q1].count(x.summary)) {
                auto word = w;
                word.push_back(x.summary.sigma);
                summ_[e][q1][x.summary] = std::move(word);
                changed = true;
              }
    }
  }

  std::optional<Counterexample> finite() const {
    const Component& root = component(0);
    for (const auto& [n, w] : search(root_start(), false))
      for (const auto& x : moves(n).exits) {
        int r = root.returns[x.summary.ret];
        for (auto [pop, q2] : ix_.returns(n.q, Letter{x.summary.sigma, root.label[r]}))
          if (ix_.hier_initial(pop) && ix_.accepting(q2)) {
            auto word = w;
            word.push_back(x.summary.sigma);
            return Counterexample{CounterexampleKind::Finite, word, {}, "root returns through " + root.states[r]};
          }
      }
    return std::nullopt;
  }

  /// A reachable (s, q) from which the frame returns to (s, q) through a Büchi state.
  std::optional<Counterexample> lasso(const std::map<ProductNode, std::vector<int>>& reach, bool internal_only,
                                      CounterexampleKind kind, const std::string& where) const {
    std::set<std::pair<int, State>> tried;
    for (const auto& [n, w] : reach) {
      if (!tried.insert({n.s, n.q}).second) continue;
      ProductNode base{n.element, n.s, n.q, false};
      auto loop = search({{base, {}}}, internal_only);
      ProductNode back{n.element, n.s, n.q, true};
      if (auto it = loop.find(back); it != loop.end() && !it->second.empty()) {
        const Component& c = component(n.element);
        std::ostringstream os;
        os << where << ": cycle at " << c.states[n.s] << " with automaton state "
           << ix_.automaton().states[n.q];
        return Counterexample{kind, w, it->second, os.str()};
      }
    }
    return std::nullopt;
  }

  /// A reachable cycle of pending calls over (element, entry state) with a Büchi visit.
  template <class Frames>
  std::optional<Counterexample> descent(const Frames& frames) const {
    using Node = std::tuple<int, State, bool>;
    for (const auto& f : frames) {
      std::map<Node, std::vector<int>> seen{{{f.element, f.q1, false}, {}}};
      std::deque<Node> work{{f.element, f.q1, false}};
      while (!work.empty()) {
        auto [e, q1, flag] = work.front();
        work.pop_front();
        auto base = seen[{e, q1, flag}];
        for (const auto& [n, w] : search({{ProductNode{e, component(e).initial, q1, flag}, {}}}, false))
          for (const auto& c : moves(n).calls) {
            Node nx{c.element, c.q1, c.seen};
            if (seen.count(nx)) continue;
            auto word = base;
            word.insert(word.end(), w.begin(), w.end());
            word.push_back(c.sigma);
            seen[nx] = std::move(word);
            work.push_back(nx);
          }
      }
      if (auto it = seen.find({f.element, f.q1, true}); it != seen.end()) {
        std::ostringstream os;
        os << "pending calls return to element " << f.element + 1 << " in automaton state "
           << ix_.automaton().states[f.q1];
        return Counterexample{CounterexampleKind::PendingDescent, f.word, it->second, os.str()};
      }
    }
    return std::nullopt;
  }

  const Composition& comp_;
  const Library& lib_;
  NwbaIndex ix_;
  std::vector<std::vector<std::map<CallSummary, std::vector<int>>>> summ_;
};

/// Whether some maximal computation of the composition (a terminated finite one
/// or an infinite one) induces a nested word accepted by the automaton.
inline std::optional<Counterexample> model_check(const Composition& comp, const Library& lib, const Nwba& a) {
  return ModelChecker(comp, lib, a).run();
}

struct BruteForceResult {
  std::optional<Composition> witness;
  int max_elements = 0;
  long long candidates = 0;
};

/// Calls fn on every composition with at most k elements whose elements are all
/// reachable from the root, numbered in breadth-first order of first use. Every
/// composition behaves like exactly one of these. Stops when fn returns false.
inline void enumerate_compositions(const Library& lib, int k, const std::function<bool(const Composition&)>& fn) {
  const int n_comp = static_cast<int>(lib.components.size());
  Composition c;
  bool stop = false;
  // slot = element * n_c + direction; elements [0, size) exist.
  std::function<void(int)> fill = [&](int slot) {
    if (stop) return;
    int e = slot / lib.n_c, j = slot % lib.n_c;
    if (e == c.size()) {
      if (!fn(c)) stop = true;
      return;
    }
    for (int target = 0; target < c.size() && !stop; ++target) {
      c.elements[e].interface[j] = target;
      fill(slot + 1);
    }
    if (c.size() < k)
      for (int label = 0; label < n_comp && !stop; ++label) {
        c.elements[e].interface[j] = c.size();
        c.elements.push_back(Element{label, std::vector<int>(lib.n_c, 0)});
        fill(slot + 1);
        c.elements.pop_back();
      }
  };
  for (int label = 0; label < n_comp && !stop; ++label) {
    c.elements = {Element{label, std::vector<int>(lib.n_c, 0)}};
    fill(0);
  }
}

/// First composition (in enumeration order) with at most k elements none of whose
/// computations is accepted by `bad` (the automaton for the negated specification).
inline BruteForceResult brute_force_realizable(const Library& lib, const Nwba& bad, int k) {
  BruteForceResult r;
  r.max_elements = k;
  enumerate_compositions(lib, k, [&](const Composition& c) {
    ++r.candidates;
    if (model_check(c, lib, bad)) return true;
    r.witness = c;
    return false;
  });
  return r;
}

}  // namespace nwsynth
