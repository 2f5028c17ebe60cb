#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "nwsynth/nwba.hpp"
#include "nwsynth/rlc.hpp"
#include "nwsynth/summary_graph.hpp"

namespace nwsynth {

enum class AbtKind { Root, CallCheck, PendingCheck };

/// CallCheck(q, σ, q', i, o, b): the called subtree can run from NWBA state q
/// (before the call letter, whose input is σ) and return through its i-th
/// return state, with δ_r reading caller output o and reaching q'. b = 1 asks
/// for a Büchi visit on the way. PendingCheck(q, σ, b): the called subtree
/// never returns and its computation is accepting.
struct AbtState {
  AbtKind kind = AbtKind::Root;
  State q = 0;
  int sigma = 0;
  State q2 = 0;
  int ret = 0;
  int out = 0;
  int b = 0;
  auto operator<=>(const AbtState&) const = default;
};

/// A positive Boolean formula over (direction, state) atoms is kept as its
/// list of minimal models; an atom is packed as direction * num_states + state.
using Model = std::vector<int>;

namespace detail {

inline bool subset_of(const Model& a, const Model& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

/// Inserts m into an antichain of minimal sets. Returns false when m is dominated.
inline bool insert_minimal(std::vector<Model>& chain, const Model& m) {
  for (const auto& x : chain)
    if (subset_of(x, m)) return false;
  std::erase_if(chain, [&](const Model& x) { return subset_of(m, x); });
  chain.push_back(m);
  return true;
}

inline Model with_atom(Model m, int atom) {
  auto it = std::lower_bound(m.begin(), m.end(), atom);
  if (it == m.end() || *it != atom) m.insert(it, atom);
  return m;
}

inline Model merge(const Model& a, const Model& b) {
  Model m;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
  return m;
}

}  // namespace detail

class Abt {
 public:
  Abt(const Library& lib, const Nwba& a) : lib_(&lib), ix_(std::make_shared<NwbaIndex>(align_alphabet(a, lib.alphabet))) {
    n_q_ = ix_->num_states();
    n_in_ = lib.num_inputs();
    n_out_ = static_cast<int>(lib.alphabet.outputs.size());
    n_r_ = lib.n_r;
    n_cc_ = 2 * n_q_ * n_q_ * n_r_ * n_in_ * n_out_;
    n_states_ = 1 + n_cc_ + 2 * n_q_ * n_in_;
    for (const auto& c : lib.components) graphs_.push_back(build_graph(c, lib, *ix_));
    compute_feasible();
    pending_ok_.assign(n_q_ * n_in_, false);
    for (const auto& c : lib.components)
      for (State q = 0; q < n_q_; ++q)
        for (int sigma = 0; sigma < n_in_; ++sigma)
          for (auto [q1, p] : ix_->calls(q, Letter{sigma, c.label[c.initial]}))
            if (ix_->hier_final(p)) pending_ok_[q * n_in_ + sigma] = true;
  }

  const Library& library() const { return *lib_; }
  const NwbaIndex& automaton() const { return *ix_; }
  const ConfigGraph& graph(int component) const { return graphs_[component]; }
  int num_states() const { return n_states_; }
  int num_directions() const { return lib_->n_c; }
  static constexpr int root() { return 0; }

  int id(const AbtState& s) const {
    switch (s.kind) {
      case AbtKind::Root: return 0;
      case AbtKind::CallCheck:
        return 1 + ((((s.q * n_in_ + s.sigma) * n_q_ + s.q2) * n_r_ + s.ret) * n_out_ + s.out) * 2 + s.b;
      case AbtKind::PendingCheck: return 1 + n_cc_ + (s.q * n_in_ + s.sigma) * 2 + s.b;
    }
    return -1;
  }

  AbtState state(int id) const {
    if (id == 0) return AbtState{};
    if (id <= n_cc_) {
      int r = id - 1;
      AbtState s{AbtKind::CallCheck};
      s.b = r % 2, r /= 2;
      s.out = r % n_out_, r /= n_out_;
      s.ret = r % n_r_, r /= n_r_;
      s.q2 = r % n_q_, r /= n_q_;
      s.sigma = r % n_in_, r /= n_in_;
      s.q = r;
      return s;
    }
    int r = id - 1 - n_cc_;
    AbtState s{AbtKind::PendingCheck};
    s.b = r % 2, r /= 2;
    s.sigma = r % n_in_;
    s.q = r / n_in_;
    return s;
  }

  /// Büchi acceptance: exactly the PendingCheck states with b = 1.
  bool accepting(int id) const {
    auto s = state(id);
    return s.kind == AbtKind::PendingCheck && s.b == 1;
  }

  int atom(int direction, int state) const { return direction * n_states_ + state; }
  int atom_direction(int atom) const { return atom / n_states_; }
  int atom_state(int atom) const { return atom % n_states_; }

  /// Whether some finite tree is accepted from a CallCheck state.
  bool feasible(int id) const { return feasible_[id]; }

  /// Minimal models of δ(state, component). Empty: false; {{}}: true.
  const std::vector<Model>& models(int state, int component) const {
    auto key = std::make_pair(state, component);
    if (auto it = models_.find(key); it != models_.end()) return it->second;
    return models_[key] = compute_models(state, component);
  }

  /// States reachable from Root through model atoms, in discovery order.
  std::vector<int> reachable_states() const {
    std::vector<int> order{root()};
    std::set<int> seen{root()};
    for (std::size_t k = 0; k < order.size(); ++k)
      for (int c = 0; c < static_cast<int>(lib_->components.size()); ++c)
        for (const auto& m : models(order[k], c))
          for (int at : m)
            if (seen.insert(atom_state(at)).second) order.push_back(atom_state(at));
    return order;
  }

 private:
  using Vertex = std::pair<int, int>;  // (graph vertex, mark)
  using Reach = std::map<Vertex, std::vector<Model>>;

  const Component& comp(int c) const { return lib_->components[c]; }

  int call_check(const Component& cc, const Config& call, const Config& reentry, int b) const {
    AbtState s{AbtKind::CallCheck, call.q, call.sigma, reentry.q, reentry.index, cc.label[cc.reentry[reentry.index]], b};
    return id(s);
  }

  /// Antichain search over (vertex, mark) from a start vertex. In marked mode a
  /// mark can be set once, on an accepting component edge or on a call edge
  /// (whose child then checks with b = 1).
  const Reach& search(int c, int start, int mark0, bool marked) const {
    auto key = std::make_tuple(c, start, mark0, marked);
    if (auto it = reach_.find(key); it != reach_.end()) return it->second;
    Reach r;
    const ConfigGraph& g = graphs_[c];
    const Component& cc = comp(c);
    std::vector<std::pair<Vertex, Model>> work;
    auto push = [&](Vertex v, Model m) {
      if (detail::insert_minimal(r[v], m)) work.emplace_back(v, std::move(m));
    };
    push({start, mark0}, {});
    while (!work.empty()) {
      auto [v, m] = std::move(work.back());
      work.pop_back();
      auto& chain = r[v];
      if (std::find(chain.begin(), chain.end(), m) == chain.end()) continue;
      Config cfg = g.config(v.first);
      if (cfg.kind == ConfigKind::Entry || cfg.kind == ConfigKind::Reentry) {
        for (int t : g.targets(v.first, false)) push({t, v.second}, m);
        if (marked && v.second == 0)
          for (int t : g.targets(v.first, true)) push({t, 1}, m);
      } else if (cfg.kind == ConfigKind::Call) {
        for (int mm = 0; mm < lib_->n_r; ++mm)
          for (State q2 = 0; q2 < n_q_; ++q2) {
            Config re{ConfigKind::Reentry, mm, 0, q2};
            int rv = g.id(re);
            int s0 = call_check(cc, cfg, re, 0);
            if (feasible_[s0]) push({rv, v.second}, detail::with_atom(m, atom(cfg.index, s0)));
            if (marked && v.second == 0) {
              int s1 = call_check(cc, cfg, re, 1);
              if (feasible_[s1]) push({rv, 1}, detail::with_atom(m, atom(cfg.index, s1)));
            }
          }
      }
    }
    return reach_[key] = std::move(r);
  }

  /// Boolean reachability with the current feasible set.
  std::set<Vertex> reach_bool(int c, int start, int mark0, bool marked) const {
    const ConfigGraph& g = graphs_[c];
    const Component& cc = comp(c);
    std::set<Vertex> seen{{start, mark0}};
    std::vector<Vertex> work{{start, mark0}};
    auto push = [&](Vertex v) {
      if (seen.insert(v).second) work.push_back(v);
    };
    while (!work.empty()) {
      Vertex v = work.back();
      work.pop_back();
      Config cfg = g.config(v.first);
      if (cfg.kind == ConfigKind::Entry || cfg.kind == ConfigKind::Reentry) {
        for (int t : g.targets(v.first, false)) push({t, v.second});
        if (marked && v.second == 0)
          for (int t : g.targets(v.first, true)) push({t, 1});
      } else if (cfg.kind == ConfigKind::Call) {
        for (int mm = 0; mm < lib_->n_r; ++mm)
          for (State q2 = 0; q2 < n_q_; ++q2) {
            Config re{ConfigKind::Reentry, mm, 0, q2};
            if (feasible_[call_check(cc, cfg, re, 0)]) push({g.id(re), v.second});
            if (marked && v.second == 0 && feasible_[call_check(cc, cfg, re, 1)]) push({g.id(re), 1});
          }
      }
    }
    return seen;
  }

  /// CallCheck acceptance needs a finite run, so the feasible CallCheck states
  /// form a least fixpoint over all components.
  void compute_feasible() {
    feasible_.assign(n_states_, false);
    const NwbaIndex& ix = *ix_;
    for (bool changed = true; changed;) {
      changed = false;
      for (int c = 0; c < static_cast<int>(lib_->components.size()); ++c) {
        const Component& cc = comp(c);
        const ConfigGraph& g = graphs_[c];
        for (State q = 0; q < n_q_; ++q)
          for (int sigma = 0; sigma < n_in_; ++sigma)
            for (auto [q1, p] : ix.calls(q, Letter{sigma, cc.label[cc.initial]}))
              for (int b = 0; b < 2; ++b) {
                auto reach = reach_bool(c, q1, b == 1 && ix.buchi(q1) ? 1 : 0, b == 1);
                for (auto [v, mark] : reach) {
                  Config x = g.config(v);
                  if (x.kind != ConfigKind::Exit) continue;
                  for (int o = 0; o < n_out_; ++o)
                    for (auto [pop, q3] : ix.returns(x.q, Letter{x.sigma, o})) {
                      if (pop != p || (b == 1 && mark == 0 && !ix.buchi(q3))) continue;
                      int s = id(AbtState{AbtKind::CallCheck, q, sigma, q3, x.index, o, b});
                      if (!feasible_[s]) feasible_[s] = changed = true;
                    }
                }
              }
      }
    }
  }

  /// δ1 ∨ δ2 ∨ δ3 from Entry(q1) of component c.
  void pending_body(int c, State q1, int mark0, int b, std::vector<Model>& out) const {
    const ConfigGraph& g = graphs_[c];
    const Reach& r0 = search(c, q1, 0, false);
    for (const auto& [v, chain] : r0) {
      Config x = g.config(v.first);
      if ((x.kind == ConfigKind::Entry || x.kind == ConfigKind::Reentry) && g.bottom(v.first))
        for (const auto& m : chain) detail::insert_minimal(out, m);
    }
    const Reach& rb = b == 1 ? search(c, q1, mark0, true) : r0;
    for (const auto& [v, chain] : rb) {
      Config x = g.config(v.first);
      if (x.kind != ConfigKind::Call || (b == 1 && v.second == 0) || !pending_ok_[x.q * n_in_ + x.sigma]) continue;
      for (int b2 = 0; b2 < 2; ++b2) {
        int child = id(AbtState{AbtKind::PendingCheck, x.q, x.sigma, 0, 0, 0, b2});
        for (const auto& m : chain) detail::insert_minimal(out, detail::with_atom(m, atom(x.index, child)));
      }
    }
    for (const auto& [v, stems] : r0) {
      const Reach& cyc = search(c, v.first, 0, true);
      auto it = cyc.find({v.first, 1});
      if (it == cyc.end()) continue;
      for (const auto& s : stems)
        for (const auto& m : it->second) detail::insert_minimal(out, detail::merge(s, m));
    }
  }

  std::vector<Model> compute_models(int sid, int c) const {
    const NwbaIndex& ix = *ix_;
    const Component& cc = comp(c);
    const ConfigGraph& g = graphs_[c];
    AbtState s = state(sid);
    std::vector<Model> out;
    if (s.kind == AbtKind::CallCheck && !feasible_[sid]) return out;
    if (s.kind == AbtKind::Root) {
      for (State q0 : ix.automaton().initial) {
        pending_body(c, q0, 0, 0, out);
        for (const auto& [v, chain] : search(c, q0, 0, false)) {
          Config x = g.config(v.first);
          if (x.kind != ConfigKind::Exit) continue;
          int o = cc.label[cc.returns[x.index]];
          bool ok = false;
          for (auto [p, q3] : ix.returns(x.q, Letter{x.sigma, o})) ok = ok || (ix.hier_initial(p) && ix.accepting(q3));
          if (ok)
            for (const auto& m : chain) detail::insert_minimal(out, m);
        }
      }
      return out;
    }
    for (auto [q1, p] : ix.calls(s.q, Letter{s.sigma, cc.label[cc.initial]})) {
      int mark0 = s.b == 1 && ix.buchi(q1) ? 1 : 0;
      if (s.kind == AbtKind::PendingCheck) {
        if (ix.hier_final(p)) pending_body(c, q1, mark0, s.b, out);
        continue;
      }
      for (const auto& [v, chain] : search(c, q1, mark0, s.b == 1)) {
        Config x = g.config(v.first);
        if (x.kind != ConfigKind::Exit || x.index != s.ret) continue;
        bool ok = false;
        for (auto [pop, q3] : ix.returns(x.q, Letter{x.sigma, s.out}))
          ok = ok || (pop == p && q3 == s.q2 && (s.b == 0 || v.second == 1 || ix.buchi(q3)));
        if (ok)
          for (const auto& m : chain) detail::insert_minimal(out, m);
      }
    }
    return out;
  }

  const Library* lib_;
  std::shared_ptr<NwbaIndex> ix_;
  int n_q_ = 0, n_in_ = 0, n_out_ = 0, n_r_ = 0, n_cc_ = 0, n_states_ = 0;
  std::vector<ConfigGraph> graphs_;
  std::vector<bool> feasible_;
  std::vector<bool> pending_ok_;  // some component can be called there with a symbol in Pf
  mutable std::map<std::tuple<int, int, int, bool>, Reach> reach_;
  mutable std::map<std::pair<int, int>, std::vector<Model>> models_;
};

inline Abt build_abt(const Library& lib, const Nwba& a) { return Abt(lib, a); }

/// Finite [n_C]-tree labeled by component indices. A node without children is
/// a cut-off point: evaluation that needs to descend below it is inconclusive.
struct FiniteTree {
  std::vector<int> label;
  std::vector<std::vector<int>> children;
};

inline FiniteTree finite_tree(const Composition& comp, const Library& lib, int depth) {
  FiniteTree t;
  std::vector<std::pair<int, int>> todo{{0, 0}};  // (element, depth)
  t.label.push_back(comp.elements[0].component);
  t.children.emplace_back();
  for (std::size_t k = 0; k < todo.size(); ++k) {
    auto [e, d] = todo[k];
    if (d == depth) continue;
    for (int j = 0; j < lib.n_c; ++j) {
      int child = comp.elements[e].interface[j];
      t.children[k].push_back(static_cast<int>(t.label.size()));
      t.label.push_back(comp.elements[child].component);
      t.children.emplace_back();
      todo.emplace_back(child, d + 1);
    }
  }
  return t;
}

enum class FiniteCheck { Accepted, Rejected, DepthExhausted };

/// Existential evaluation of the transition models on a finite tree: some
/// model whose atoms all hold at the corresponding children.
inline FiniteCheck run_finite_check(const Abt& abt, const FiniteTree& t, int state, int node = 0) {
  bool exhausted = false;
  for (const auto& m : abt.models(state, t.label[node])) {
    bool ok = true;
    for (int at : m) {
      if (t.children[node].empty()) {
        ok = false;
        exhausted = true;
        break;
      }
      auto r = run_finite_check(abt, t, abt.atom_state(at), t.children[node][abt.atom_direction(at)]);
      if (r != FiniteCheck::Accepted) {
        ok = false;
        exhausted = exhausted || r == FiniteCheck::DepthExhausted;
        break;
      }
    }
    if (ok) return FiniteCheck::Accepted;
  }
  return exhausted ? FiniteCheck::DepthExhausted : FiniteCheck::Rejected;
}

inline void dump_abt(std::ostream& os, const Abt& abt) {
  int counts[3] = {0, 0, 0};
  auto reach = abt.reachable_states();
  for (int s : reach) ++counts[static_cast<int>(abt.state(s).kind)];
  os << "abt: " << abt.num_states() << " states in the bound, " << reach.size() << " reachable (root "
     << counts[0] << ", call-check " << counts[1] << ", pending-check " << counts[2] << ")\n";
  const auto& lib = abt.library();
  for (int c = 0; c < static_cast<int>(lib.components.size()); ++c) {
    int sat = 0;
    for (int s : reach) sat += abt.models(s, c).empty() ? 0 : 1;
    os << "  " << lib.components[c].name << ": " << sat << " satisfiable transitions\n";
  }
}

}  // namespace nwsynth
