#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nwsynth/abt.hpp"
#include "nwsynth/game.hpp"
#include "nwsynth/io.hpp"
#include "nwsynth/nwtl.hpp"
#include "nwsynth/oracle.hpp"
#include "nwsynth/translate.hpp"

namespace nwsynth {

/// Minimal models of the dual of a formula given by its minimal models: the
/// minimal hitting sets. false ({}) and true ({{}}) swap.
inline std::vector<Model> minimal_hitting_sets(const std::vector<Model>& models) {
  std::vector<Model> hs{Model{}};
  for (const auto& m : models) {
    std::vector<Model> next;
    for (const auto& h : hs) {
      bool hit = false;
      for (int a : m)
        if (std::binary_search(h.begin(), h.end(), a)) hit = true;
      if (hit) {
        detail::insert_minimal(next, h);
        continue;
      }
      for (int a : m) detail::insert_minimal(next, detail::with_atom(h, a));
    }
    hs = std::move(next);
  }
  std::sort(hs.begin(), hs.end());
  return hs;
}

/// The dual automaton: co-Büchi, rejecting exactly where the ABT accepts, with
/// every transition formula dualized.
class Act {
 public:
  explicit Act(const Abt& abt) : abt_(&abt) {}

  const Abt& abt() const { return *abt_; }
  int num_states() const { return abt_->num_states(); }
  static constexpr int initial() { return Abt::root(); }
  bool rejecting(int s) const { return abt_->accepting(s); }

  const std::vector<Model>& models(int s, int component) const {
    auto key = std::make_pair(s, component);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    return cache_[key] = minimal_hitting_sets(abt_->models(s, component));
  }

 private:
  const Abt* abt_;
  mutable std::map<std::pair<int, int>, std::vector<Model>> cache_;
};

inline Act dualize(const Abt& abt) { return Act(abt); }

/// Obligations at one tree node: Act states with the number of rejecting
/// visits on the way there, sorted by state.
using Obligations = std::vector<std::pair<int, int>>;

namespace detail {

/// The atoms of a joint choice with their counts.
using JointChoice = std::map<int, int>;

inline bool dominates(const JointChoice& a, const JointChoice& b) {
  for (const auto& [atom, x] : a) {
    auto it = b.find(atom);
    if (it == b.end() || it->second < x) return false;
  }
  return true;
}

inline void insert_choice(std::vector<JointChoice>& chain, JointChoice c) {
  for (const auto& x : chain)
    if (dominates(x, c)) return;
  std::erase_if(chain, [&](const JointChoice& x) { return dominates(c, x); });
  chain.push_back(std::move(c));
}

/// Minimal ways to discharge every obligation at a node labelled `label`: one
/// dual model per obligation, merged per atom with the larger count. Choices
/// whose count would exceed k are dropped; with `counting` off counts stay 0.
inline std::vector<JointChoice> joint_choices(const Act& act, const Obligations& pos, int label, int k,
                                              bool counting) {
  const Abt& abt = act.abt();
  std::vector<JointChoice> choices{JointChoice{}};
  for (auto [s, n] : pos) {
    std::vector<JointChoice> next;
    for (const auto& h : act.models(s, label))
      for (const auto& ch : choices) {
        JointChoice merged = ch;
        bool ok = true;
        for (int atom : h) {
          int count = counting ? n + (act.rejecting(abt.atom_state(atom)) ? 1 : 0) : 0;
          if (count > k) ok = false;
          merged[atom] = std::max(merged[atom], count);
        }
        if (ok) insert_choice(next, std::move(merged));
      }
    choices = std::move(next);
    if (choices.empty()) break;
  }
  return choices;
}

inline std::vector<Obligations> split_by_direction(const Abt& abt, const JointChoice& ch) {
  std::vector<Obligations> split(abt.num_directions());
  for (const auto& [atom, n] : ch) split[abt.atom_direction(atom)].emplace_back(abt.atom_state(atom), n);
  for (auto& p : split) std::sort(p.begin(), p.end());
  return split;
}

}  // namespace detail

struct NbtMove {
  int label;
  std::vector<int> successors;  // obligation-set id per direction
};

/// Nondeterministic tree automaton for the Act with at most k rejecting visits
/// per run path. Copies of a state meeting at a node keep the larger count.
/// All its states are accepting: exceeding k removes the transition.
class Nbt {
 public:
  Nbt(const Act& act, int k) : act_(&act), k_(k) { intern(Obligations{{Act::initial(), 0}}); }

  int rank() const { return k_; }
  int num_states() const { return static_cast<int>(states_.size()); }
  const Obligations& obligations(int id) const { return states_[id]; }
  static constexpr int initial() { return 0; }
  bool accepting(int) const { return true; }

  const std::vector<NbtMove>& moves(int id) const {
    if (auto it = moves_.find(id); it != moves_.end()) return it->second;
    return moves_[id] = compute_moves(id);
  }

 private:
  int intern(const Obligations& p) const {
    auto [it, fresh] = ids_.emplace(p, static_cast<int>(states_.size()));
    if (fresh) states_.push_back(p);
    return it->second;
  }

  std::vector<NbtMove> compute_moves(int id) const {
    const Obligations pos = states_[id];
    const Abt& abt = act_->abt();
    std::vector<NbtMove> out;
    for (int c = 0; c < static_cast<int>(abt.library().components.size()); ++c)
      for (const auto& ch : detail::joint_choices(*act_, pos, c, k_, true)) {
        NbtMove m{c, {}};
        for (const auto& p : detail::split_by_direction(abt, ch)) m.successors.push_back(intern(p));
        out.push_back(std::move(m));
      }
    return out;
  }

  const Act* act_;
  int k_;
  mutable std::vector<Obligations> states_;
  mutable std::map<Obligations, int> ids_;
  mutable std::map<int, std::vector<NbtMove>> moves_;
};

/// Over-approximation of Act nonemptiness. The first player labels nodes and
/// discharges obligations as in the Nbt, without counts. The second player
/// picks a direction and may drop a pebble on one obligation, which then
/// follows a single run path; it wins if the pebble meets rejecting states
/// infinitely often. Losing this game means the Act accepts no tree.
struct PebbleResult {
  bool first_player_wins = true;
  bool exhausted = false;
  int positions = 0;
};

namespace detail {

/// Joint choices of a pebble position, each with the model picked for the
/// pebbled obligation (empty when no obligation carries the pebble).
inline std::vector<std::pair<JointChoice, Model>> pebble_choices(const Act& act, const Obligations& pos, int label,
                                                                 int pebble) {
  std::vector<std::pair<JointChoice, Model>> out;
  if (pebble < 0) {
    for (auto& ch : joint_choices(act, pos, label, 0, false)) out.emplace_back(std::move(ch), Model{});
    return out;
  }
  Obligations rest = pos;
  rest.erase(rest.begin() + pebble);
  auto others = joint_choices(act, rest, label, 0, false);
  for (const auto& h : act.models(pos[pebble].first, label))
    for (const auto& ch : others) {
      JointChoice merged = ch;
      for (int atom : h) merged[atom];
      bool dominated = false;
      for (const auto& [x, hx] : out)
        if (dominates(x, merged) && std::includes(h.begin(), h.end(), hx.begin(), hx.end())) dominated = true;
      if (dominated) continue;
      std::erase_if(out, [&](const auto& o) {
        return dominates(merged, o.first) && std::includes(o.second.begin(), o.second.end(), h.begin(), h.end());
      });
      out.emplace_back(std::move(merged), h);
    }
  return out;
}

}  // namespace detail

inline PebbleResult pebble_game(const Act& act, int max_positions = 200000) {
  const Abt& abt = act.abt();
  constexpr int kWaiting = -1, kRetired = -2;
  using Pos = std::pair<Obligations, int>;  // obligations and pebble (index or kWaiting/kRetired)
  std::map<Pos, int> ids;
  std::vector<Pos> order;
  auto intern = [&](Pos p) {
    auto [it, fresh] = ids.emplace(p, static_cast<int>(order.size()));
    if (fresh) order.push_back(std::move(p));
    return it->second;
  };
  intern({Obligations{{Act::initial(), 0}}, kWaiting});
  BuchiGame g;
  PebbleResult r;
  for (std::size_t v = 0; v < order.size(); ++v) {
    if (static_cast<int>(order.size()) > max_positions) {
      r.exhausted = true;
      r.positions = static_cast<int>(order.size());
      return r;
    }
    const Pos cur = order[v];
    const int pebble = cur.second;
    g.accepting.push_back(pebble >= 0 && act.rejecting(cur.first[pebble].first));
    std::vector<std::vector<int>> moves;
    for (int c = 0; c < static_cast<int>(abt.library().components.size()); ++c)
      for (const auto& [ch, h] : detail::pebble_choices(act, cur.first, c, pebble)) {
        auto split = detail::split_by_direction(abt, ch);
        std::vector<int> succ;
        for (int d = 0; d < abt.num_directions(); ++d) {
          const Obligations& next = split[d];
          if (pebble == kRetired) {
            succ.push_back(intern({next, kRetired}));
            continue;
          }
          if (pebble == kWaiting) {
            succ.push_back(intern({next, kWaiting}));
            for (int i = 0; i < static_cast<int>(next.size()); ++i) succ.push_back(intern({next, i}));
            continue;
          }
          bool moved = false;
          for (int atom : h)
            if (abt.atom_direction(atom) == d) {
              auto at = std::lower_bound(next.begin(), next.end(), std::make_pair(abt.atom_state(atom), 0));
              succ.push_back(intern({next, static_cast<int>(at - next.begin())}));
              moved = true;
            }
          if (!moved) succ.push_back(intern({next, kRetired}));
        }
        moves.push_back(std::move(succ));
      }
    g.moves.push_back(std::move(moves));
  }
  r.positions = static_cast<int>(order.size());
  r.first_player_wins = solve_cobuchi(g)[0];
  return r;
}

inline Nbt remove_alternation(const Act& act, int k) { return Nbt(act, k); }

struct Emptiness {
  bool empty = true;
  bool exhausted = false;  // the position limit was hit; no verdict
  std::optional<TreeTransducer> witness;
  int positions = 0;
};

/// Solves the emptiness game of the Nbt: the automaton picks a label and a
/// transition, the pathfinder a direction. A win yields the strategy as a tree
/// transducer over reachable positions.
inline Emptiness nbt_emptiness(const Nbt& nbt, int max_positions = 200000) {
  Emptiness r;
  BuchiGame g;
  for (int v = 0; v < nbt.num_states(); ++v) {
    if (nbt.num_states() > max_positions) {
      r.exhausted = true;
      r.positions = nbt.num_states();
      return r;
    }
    std::vector<std::vector<int>> ms;
    for (const auto& m : nbt.moves(v)) ms.push_back(m.successors);
    g.moves.push_back(std::move(ms));
  }
  g.accepting.assign(nbt.num_states(), false);
  for (int v = 0; v < nbt.num_states(); ++v) g.accepting[v] = nbt.accepting(v);
  r.positions = nbt.num_states();
  auto sol = solve_buchi(g);
  if (!sol.win[Nbt::initial()]) return r;
  r.empty = false;
  std::map<int, int> id{{Nbt::initial(), 0}};
  std::vector<int> order{Nbt::initial()};
  TreeTransducer t;
  std::vector<int> parent_label{-1};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& ms = nbt.moves(order[i]);
    int pick = sol.strategy[order[i]];
    // Without obligations every label wins; reuse the parent's so states can merge.
    if (nbt.obligations(order[i]).empty())
      for (int k = 0; k < static_cast<int>(ms.size()); ++k)
        if (ms[k].label == parent_label[i] && sol.win[ms[k].successors[0]]) pick = k;
    const NbtMove& m = ms[pick];
    t.label.push_back(m.label);
    std::vector<int> next;
    for (int s : m.successors) {
      auto [it, fresh] = id.emplace(s, static_cast<int>(order.size()));
      if (fresh) {
        order.push_back(s);
        parent_label.push_back(m.label);
      }
      next.push_back(it->second);
    }
    t.next.push_back(std::move(next));
  }
  r.witness = std::move(t);
  return r;
}

/// Merges states with the same label whose successors are pairwise merged.
inline TreeTransducer minimize(const TreeTransducer& t) {
  const int n = t.num_states();
  std::vector<int> cls = t.label;
  int classes = static_cast<int>(std::set<int>(cls.begin(), cls.end()).size());
  for (;;) {
    std::map<std::pair<int, std::vector<int>>, int> sig;
    std::vector<int> next(n);
    for (int q = 0; q < n; ++q) {
      std::vector<int> succ;
      for (int s : t.next[q]) succ.push_back(cls[s]);
      int fresh = static_cast<int>(sig.size());
      next[q] = sig.emplace(std::make_pair(cls[q], succ), fresh).first->second;
    }
    cls = std::move(next);
    if (static_cast<int>(sig.size()) == classes) break;
    classes = static_cast<int>(sig.size());
  }
  TreeTransducer m;
  m.initial = cls[t.initial];
  m.label.assign(classes, 0);
  m.next.assign(classes, {});
  for (int q = 0; q < n; ++q) {
    m.label[cls[q]] = t.label[q];
    m.next[cls[q]].clear();
    for (int s : t.next[q]) m.next[cls[q]].push_back(cls[s]);
  }
  return m;
}

enum class SynthesisStatus { Realizable, Unrealizable, UnknownUpToRank };

inline std::string to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::Realizable: return "realizable";
    case SynthesisStatus::Unrealizable: return "unrealizable";
    case SynthesisStatus::UnknownUpToRank: return "unknown_up_to_rank";
  }
  return "";
}

struct SynthesisOutcome {
  SynthesisStatus status = SynthesisStatus::UnknownUpToRank;
  int rank = 0;
  std::optional<Composition> composition;
  std::optional<TreeTransducer> transducer;
  int rank_bound = 0;  // 2 * reachable ABT states
  std::string note;
};

/// Realizability of the specification whose violations `bad` accepts.
inline SynthesisOutcome synthesize(const Library& lib, const Nwba& bad, int max_rank) {
  if (max_rank < 1) throw std::invalid_argument("max rank must be at least 1");
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(bad.alphabet.inputs) != sorted(lib.alphabet.inputs) ||
      sorted(bad.alphabet.outputs) != sorted(lib.alphabet.outputs))
    throw std::invalid_argument("alphabet mismatch between specification and library");
  Abt abt(lib, bad);
  Act act = dualize(abt);
  SynthesisOutcome out;
  out.rank_bound = 2 * static_cast<int>(abt.reachable_states().size());
  out.rank = max_rank;
  auto peb = pebble_game(act);
  if (!peb.exhausted && !peb.first_player_wins) {
    out.status = SynthesisStatus::Unrealizable;
    out.note = "every composition tree has a violating computation";
    return out;
  }
  std::vector<int> ranks;
  for (int k = 1; k < max_rank; k *= 2) ranks.push_back(k);
  ranks.push_back(max_rank);
  for (int k : ranks) {
    auto e = nbt_emptiness(remove_alternation(act, k));
    if (e.empty) continue;
    e.witness = minimize(*e.witness);
    Composition comp = composition_of_regular_tree(*e.witness, lib.n_c);
    if (auto cex = model_check(comp, lib, bad))
      throw std::logic_error("extracted composition fails the model checker: " + cex->sketch);
    out.status = SynthesisStatus::Realizable;
    out.rank = k;
    out.composition = std::move(comp);
    out.transducer = std::move(e.witness);
    return out;
  }
  out.note = "no witness up to rank " + std::to_string(max_rank) +
             "; completeness needs the theoretical bound, reported as rank_bound";
  return out;
}

inline SynthesisOutcome synthesize(const Library& lib, const Formula& phi, int max_rank) {
  return synthesize(lib, translate_nwtl(negate_collapsed(phi), lib.alphabet), max_rank);
}

inline Json transducer_to_json(const TreeTransducer& t, const Library& lib) {
  Json states = Json::array();
  for (int q = 0; q < t.num_states(); ++q) states.push_back({{"label", lib.components[t.label[q]].name}, {"next", t.next[q]}});
  return Json{{"initial", t.initial}, {"states", states}};
}

inline TreeTransducer transducer_from_json(const Json& j, const Library& lib) {
  TreeTransducer t;
  t.initial = j.at("initial").get<int>();
  for (const auto& s : j.at("states")) {
    int c = lib.find(s.at("label").get<std::string>());
    if (c < 0) throw std::invalid_argument("transducer: unknown component " + s.at("label").dump());
    t.label.push_back(c);
    t.next.push_back(s.at("next").get<std::vector<int>>());
  }
  for (const auto& row : t.next)
    for (int q : row)
      if (q < 0 || q >= t.num_states() || static_cast<int>(row.size()) != lib.n_c)
        throw std::invalid_argument("transducer: bad successor");
  if (t.initial < 0 || t.initial >= t.num_states()) throw std::invalid_argument("transducer: bad initial state");
  return t;
}

inline Json outcome_to_json(const SynthesisOutcome& o, const Library& lib) {
  Json j{{"status", to_string(o.status)}, {"rank", o.rank}};
  if (o.composition) j["composition"] = composition_to_json(*o.composition, lib);
  if (o.transducer) j["certificate"] = Json{{"transducer", transducer_to_json(*o.transducer, lib)}};
  j["rank_bound"] = o.rank_bound;
  if (!o.note.empty()) j["note"] = o.note;
  return j;
}

inline SynthesisOutcome outcome_from_json(const Json& j, const Library& lib) {
  SynthesisOutcome o;
  std::string s = j.at("status").get<std::string>();
  if (s == "realizable") o.status = SynthesisStatus::Realizable;
  else if (s == "unrealizable") o.status = SynthesisStatus::Unrealizable;
  else if (s == "unknown_up_to_rank") o.status = SynthesisStatus::UnknownUpToRank;
  else throw std::invalid_argument("outcome: unknown status " + s);
  o.rank = j.at("rank").get<int>();
  if (j.contains("composition")) o.composition = composition_from_json(j.at("composition"), lib);
  if (j.contains("certificate")) o.transducer = transducer_from_json(j.at("certificate").at("transducer"), lib);
  o.rank_bound = j.value("rank_bound", 0);
  o.note = j.value("note", "");
  return o;
}

}  // namespace nwsynth
