#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nwsynth/nwba.hpp"
#include "nwsynth/nwtl.hpp"

namespace nwsynth {

namespace detail {

/// Tableau state: truth values of every subformula at one position, plus
///  - one "bounded" bit per Until: the Until holds with a witness before the end
///    of the enclosing call frame; one per Since: the witness lies in the frame;
///  - m: the position is a matched call; g: per Until, the bounded bit at c+1;
///  - outer: the position lies on the top-level summary path from 1, where the
///    Büchi counter cycles through the Until obligations.
struct TabKey {
  std::array<std::uint64_t, 2> bits{};
  std::uint32_t g = 0;
  int counter = 0;
  bool m = false;
  bool outer = false;
  bool init = false;

  bool get(int b) const { return bits[b >> 6] >> (b & 63) & 1; }
  void set(int b, bool v) {
    auto mask = std::uint64_t{1} << (b & 63);
    bits[b >> 6] = v ? bits[b >> 6] | mask : bits[b >> 6] & ~mask;
  }
  bool gbit(int u) const { return g >> u & 1; }

  auto operator<=>(const TabKey&) const = default;
};

enum class Step { Int, PendingCall, MatchedCall, MatchedRet, UnmatchedRet };

class Tableau {
 public:
  explicit Tableau(const Formula& phi) {
    root_ = add(phi);
    nbits_ = static_cast<int>(nodes_.size() + untils_.size() + sinces_.size());
    if (nbits_ > 128 || untils_.size() > 32) throw std::invalid_argument("formula too large for the tableau");
    obligations_ = 2 * static_cast<int>(untils_.size());
  }

  int obligations() const { return obligations_; }

  /// Successor states of P on letter l for the given step; C is the matched call
  /// state for a matched return.
  std::vector<TabKey> successors(const TabKey& p, const TabKey* c, Letter l, Step k) const {
    std::vector<int> free;
    bool matched_call = k == Step::MatchedCall;
    bool is_call = matched_call || k == Step::PendingCall;
    bool is_ret = k == Step::MatchedRet || k == Step::UnmatchedRet;
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
      Op op = nodes_[i].op;
      if (op == Op::Next || op == Op::UntilSummary || (op == Op::NextMu && matched_call)) free.push_back(i);
    }
    for (int u = 0; u < static_cast<int>(untils_.size()); ++u) free.push_back(ub(u));
    int nfree_bits = static_cast<int>(free.size());
    int nguess = nfree_bits + (matched_call ? static_cast<int>(untils_.size()) : 0);
    std::vector<TabKey> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nguess); ++mask) {
      TabKey n;
      n.m = matched_call;
      for (int f = 0; f < nfree_bits; ++f) n.set(free[f], mask >> f & 1);
      if (matched_call) n.g = static_cast<std::uint32_t>(mask >> nfree_bits);
      bool prev_ok = !p.init;
      for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        const Node& nd = nodes_[i];
        switch (nd.op) {
          case Op::True: n.set(i, true); break;
          case Op::Call: n.set(i, is_call); break;
          case Op::Ret: n.set(i, is_ret); break;
          case Op::InputAtom: n.set(i, l.in == nd.symbol); break;
          case Op::OutputAtom: n.set(i, l.out == nd.symbol); break;
          case Op::Not: n.set(i, !n.get(nd.a)); break;
          case Op::Or: n.set(i, n.get(nd.a) || n.get(nd.b)); break;
          case Op::And: n.set(i, n.get(nd.a) && n.get(nd.b)); break;
          case Op::Prev: n.set(i, prev_ok && p.get(nd.a)); break;
          case Op::PrevMu: n.set(i, k == Step::MatchedRet && c->get(nd.a)); break;
          case Op::SinceSummary: {
            int sb = this->sb(nd.aux);
            bool inner = !p.init && !p.m && (p.get(nd.b) || p.get(sb));
            bool full, bounded;
            if (k == Step::MatchedRet) {
              full = c->get(nd.b) || c->get(i) || inner;
              bounded = c->get(nd.b) || c->get(sb) || inner;
            } else {
              full = prev_ok && (p.get(nd.b) || p.get(i));
              bounded = inner;
            }
            n.set(i, n.get(nd.a) && full);
            n.set(sb, n.get(nd.a) && bounded);
            break;
          }
          default: break;
        }
      }
      if (!p.init && !consistent(p, c, n, k)) continue;
      if (p.init && !n.get(root_)) continue;
      n.outer = k == Step::MatchedRet ? c->outer : (p.init || (!p.m && p.outer));
      if (n.outer) {
        int t = k == Step::MatchedRet ? c->counter : p.counter;
        if (t == obligations_) t = 0;
        while (t < obligations_ && !pending(n, t)) ++t;
        n.counter = t;
      }
      out.push_back(n);
    }
    return out;
  }

  bool accepting(const TabKey& n) const {
    if (n.init || n.m) return false;
    for (const Node& nd : nodes_)
      if (nd.op == Op::Next && n.get(nd.self)) return false;
    for (int u = 0; u < static_cast<int>(untils_.size()); ++u) {
      const Node& nd = nodes_[untils_[u]];
      if (n.get(nd.self) != n.get(nd.b) || n.get(ub(u)) != n.get(nd.b)) return false;
    }
    return true;
  }

  bool buchi(const TabKey& n) const { return !n.init && n.outer && n.counter == obligations_; }

 private:
  struct Node {
    Op op;
    int self = -1, a = -1, b = -1, symbol = -1, aux = -1;
  };

  int add(const Formula& f) {
    if (auto it = ids_.find(f); it != ids_.end()) return it->second;
    Node nd{f.op()};
    if (arity(f.op()) >= 1) nd.a = add(f.child(0));
    if (arity(f.op()) >= 2) nd.b = add(f.child(1));
    if (f.op() == Op::InputAtom || f.op() == Op::OutputAtom) nd.symbol = f.symbol();
    if (f.op() == Op::UntilSummary) {
      nd.aux = static_cast<int>(untils_.size());
      untils_.push_back(static_cast<int>(nodes_.size()));
    }
    if (f.op() == Op::SinceSummary) {
      nd.aux = static_cast<int>(sinces_.size());
      sinces_.push_back(static_cast<int>(nodes_.size()));
    }
    nd.self = static_cast<int>(nodes_.size());
    nodes_.push_back(nd);
    ids_.emplace(f, nd.self);
    return nd.self;
  }

  int ub(int u) const { return static_cast<int>(nodes_.size()) + u; }
  int sb(int s) const { return static_cast<int>(nodes_.size() + untils_.size()) + s; }

  bool pending(const TabKey& n, int t) const {
    int u = t / 2;
    const Node& nd = nodes_[untils_[u]];
    bool holds = t % 2 == 0 ? n.get(nd.self) : n.get(ub(u));
    return holds && !n.get(nd.b) && !(n.m && n.gbit(u));
  }

  bool consistent(const TabKey& p, const TabKey* c, const TabKey& n, Step k) const {
    for (const Node& nd : nodes_)
      if (nd.op == Op::Next && p.get(nd.self) != n.get(nd.a)) return false;
    if (p.m && k == Step::UnmatchedRet) return false;
    if (p.m && k != Step::MatchedRet) {
      for (int u = 0; u < static_cast<int>(untils_.size()); ++u)
        if (p.gbit(u) != n.get(ub(u))) return false;
    } else if (!p.m) {
      for (int u = 0; u < static_cast<int>(untils_.size()); ++u) {
        const Node& nd = nodes_[untils_[u]];
        bool a = p.get(nd.a), b = p.get(nd.b);
        if (p.get(nd.self) != (b || (a && n.get(nd.self)))) return false;
        if (p.get(ub(u)) != (b || (a && k != Step::MatchedRet && n.get(ub(u))))) return false;
      }
    } else if (p.g != 0) {
      return false;
    }
    if (k == Step::MatchedRet) {
      for (const Node& nd : nodes_)
        if (nd.op == Op::NextMu && c->get(nd.self) != n.get(nd.a)) return false;
      for (int u = 0; u < static_cast<int>(untils_.size()); ++u) {
        const Node& nd = nodes_[untils_[u]];
        bool a = c->get(nd.a), b = c->get(nd.b), g = c->gbit(u);
        if (c->get(nd.self) != (b || (a && (n.get(nd.self) || g)))) return false;
        if (c->get(ub(u)) != (b || (a && (n.get(ub(u)) || g)))) return false;
      }
    }
    return true;
  }

  std::vector<Node> nodes_;
  std::map<Formula, int> ids_;
  std::vector<int> untils_, sinces_;
  int root_ = 0;
  int nbits_ = 0;
  int obligations_ = 0;
};

}  // namespace detail

/// Tableau translation of an NWTL formula into an NWBA over Σ_I × Σ_O.
/// Finite words are accepted through `accepting`, ω-words through `buchi`.
inline Nwba translate_nwtl(const Formula& phi, const Alphabet& ab) {
  using detail::Step;
  using detail::TabKey;
  detail::Tableau tab(phi);
  constexpr int kTop = -1, kTopPending = -2;
  constexpr HierSymbol kBottom = 0, kPending = 1;

  std::vector<TabKey> keys;
  std::map<TabKey, State> ids;
  auto intern = [&](const TabKey& k) {
    auto [it, fresh] = ids.emplace(k, static_cast<State>(keys.size()));
    if (fresh) keys.push_back(k);
    return it->second;
  };
  TabKey init;
  init.init = true;
  intern(init);

  std::set<CallTransition> dc;
  std::set<InternalTransition> di;
  std::set<ReturnTransition> dr;
  // Matched-call states are their own hierarchical symbols, offset by 2.
  auto sym = [](State s) { return static_cast<HierSymbol>(s + 2); };

  std::set<std::pair<int, State>> seen;
  std::vector<std::pair<int, State>> work;
  std::map<State, std::set<int>> frame_ctx;
  std::map<State, std::set<State>> after_return;
  auto visit = [&](int ctx, State s) {
    if (seen.insert({ctx, s}).second) work.emplace_back(ctx, s);
  };
  visit(kTop, 0);

  std::vector<Letter> letters;
  for (int i = 0; i < static_cast<int>(ab.num_letters()); ++i) letters.push_back(letter_at(ab, i));

  while (!work.empty()) {
    auto [ctx, s] = work.back();
    work.pop_back();
    TabKey p = keys[s];
    if (p.m && frame_ctx[s].insert(ctx).second)
      for (State n : after_return[s]) visit(ctx, n);
    int inner = p.m ? s : ctx;
    for (Letter l : letters) {
      for (const auto& nk : tab.successors(p, nullptr, l, Step::Int)) {
        State n = intern(nk);
        di.insert({s, l, n});
        visit(inner, n);
      }
      for (const auto& nk : tab.successors(p, nullptr, l, Step::MatchedCall)) {
        State n = intern(nk);
        dc.insert({s, l, n, sym(n)});
        visit(inner, n);
      }
      if (inner == kTop || inner == kTopPending) {
        for (const auto& nk : tab.successors(p, nullptr, l, Step::PendingCall)) {
          State n = intern(nk);
          dc.insert({s, l, n, kPending});
          visit(kTopPending, n);
        }
      }
      if (inner == kTop) {
        for (const auto& nk : tab.successors(p, nullptr, l, Step::UnmatchedRet)) {
          State n = intern(nk);
          dr.insert({s, kBottom, l, n});
          visit(kTop, n);
        }
      }
      if (inner >= 0) {
        State cs = inner;
        TabKey c = keys[cs];
        for (const auto& nk : tab.successors(p, &c, l, Step::MatchedRet)) {
          State n = intern(nk);
          dr.insert({s, sym(cs), l, n});
          if (after_return[cs].insert(n).second)
            for (int c2 : frame_ctx[cs]) visit(c2, n);
        }
      }
    }
  }

  // Keep only states that can reach an accepting or Büchi state.
  int nq = static_cast<int>(keys.size());
  std::vector<std::vector<State>> rev(nq);
  for (const auto& t : dc) rev[t.to].push_back(t.from);
  for (const auto& t : di) rev[t.to].push_back(t.from);
  for (const auto& t : dr) rev[t.to].push_back(t.from);
  std::vector<bool> live(nq, false);
  std::vector<State> stack;
  for (State q = 0; q < nq; ++q)
    if (tab.accepting(keys[q]) || tab.buchi(keys[q])) {
      live[q] = true;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    State q = stack.back();
    stack.pop_back();
    for (State r : rev[q])
      if (!live[r]) {
        live[r] = true;
        stack.push_back(r);
      }
  }
  live[0] = true;

  Nwba a;
  a.alphabet = ab;
  a.letters = letters;
  std::vector<State> renum(nq, -1);
  for (State q = 0; q < nq; ++q)
    if (live[q]) {
      renum[q] = a.num_states();
      a.states.push_back("s" + std::to_string(renum[q]));
    }
  a.initial = {0};
  a.buchi.emplace();
  for (State q = 0; q < nq; ++q) {
    if (!live[q]) continue;
    if (tab.accepting(keys[q])) a.accepting.push_back(renum[q]);
    if (tab.buchi(keys[q])) a.buchi->push_back(renum[q]);
  }
  a.hier = {"bot", "pend"};
  a.hier_initial = {kBottom};
  a.hier_final = {kPending};
  std::vector<HierSymbol> hsym(nq, -1);
  for (State q = 0; q < nq; ++q)
    if (live[q] && keys[q].m) {
      hsym[q] = a.num_hier();
      a.hier.push_back("c" + std::to_string(renum[q]));
    }
  auto map_sym = [&](HierSymbol p) { return p < 2 ? p : hsym[p - 2]; };
  for (const auto& t : dc)
    if (live[t.from] && live[t.to] && map_sym(t.push) >= 0)
      a.delta_call.push_back({renum[t.from], t.letter, renum[t.to], map_sym(t.push)});
  for (const auto& t : di)
    if (live[t.from] && live[t.to]) a.delta_int.push_back({renum[t.from], t.letter, renum[t.to]});
  for (const auto& t : dr)
    if (live[t.from] && live[t.to] && map_sym(t.pop) >= 0)
      a.delta_ret.push_back({renum[t.from], map_sym(t.pop), t.letter, renum[t.to]});
  return a;
}

}  // namespace nwsynth
