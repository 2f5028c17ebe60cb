#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "nwsynth/nwba.hpp"
#include "nwsynth/rlc.hpp"

namespace nwsynth {

enum class ConfigKind { Entry, Call, Reentry, Exit, Bottom };

/// Vertex of G_C. `index` is j for Call, m for Reentry, i for Exit; `sigma` is
/// the input read at the boundary position (Call and Exit only).
struct Config {
  ConfigKind kind = ConfigKind::Bottom;
  int index = 0;
  int sigma = 0;
  State q = 0;
  auto operator<=>(const Config&) const = default;
};

inline std::string to_string(const Config& c) {
  auto s = [](int v) { return std::to_string(v); };
  switch (c.kind) {
    case ConfigKind::Entry: return "Entry(q" + s(c.q) + ")";
    case ConfigKind::Call: return "Call(" + s(c.index + 1) + ",a" + s(c.sigma) + ",q" + s(c.q) + ")";
    case ConfigKind::Reentry: return "Reentry(" + s(c.index + 1) + ",q" + s(c.q) + ")";
    case ConfigKind::Exit: return "Exit(" + s(c.index + 1) + ",a" + s(c.sigma) + ",q" + s(c.q) + ")";
    case ConfigKind::Bottom: return "Bottom";
  }
  return "?";
}

/// The configuration graph of one component against one NWBA. Vertices are
/// numbered densely: Entry, Reentry, Call, Exit, then Bottom. Call edges join
/// every Call vertex to every Reentry vertex and are left implicit.
class ConfigGraph {
 public:
  ConfigGraph(int n_q, int n_c, int n_r, int n_in) : n_q_(n_q), n_c_(n_c), n_r_(n_r), n_in_(n_in) {
    plain_.resize(num_sources());
    accepting_.resize(num_sources());
    bottom_.assign(num_sources(), false);
  }

  int num_states() const { return n_q_; }
  int n_c() const { return n_c_; }
  int n_r() const { return n_r_; }
  int n_in() const { return n_in_; }
  int num_sources() const { return n_q_ * (1 + n_r_); }
  int num_vertices() const { return num_sources() + n_q_ * n_in_ * (n_c_ + n_r_) + 1; }

  int id(const Config& c) const {
    switch (c.kind) {
      case ConfigKind::Entry: return c.q;
      case ConfigKind::Reentry: return n_q_ * (1 + c.index) + c.q;
      case ConfigKind::Call: return num_sources() + (c.index * n_in_ + c.sigma) * n_q_ + c.q;
      case ConfigKind::Exit: return num_sources() + ((n_c_ + c.index) * n_in_ + c.sigma) * n_q_ + c.q;
      case ConfigKind::Bottom: return num_vertices() - 1;
    }
    return -1;
  }

  Config config(int v) const {
    if (v == num_vertices() - 1) return Config{};
    if (v < n_q_) return Config{ConfigKind::Entry, 0, 0, v};
    if (v < num_sources()) return Config{ConfigKind::Reentry, v / n_q_ - 1, 0, v % n_q_};
    int r = v - num_sources();
    int q = r % n_q_, k = r / n_q_;
    int sigma = k % n_in_, slot = k / n_in_;
    if (slot < n_c_) return Config{ConfigKind::Call, slot, sigma, q};
    return Config{ConfigKind::Exit, slot - n_c_, sigma, q};
  }

  /// Component-edge targets of a source; `accepting` restricts to accepting edges.
  const std::set<int>& targets(int src, bool accepting) const { return accepting ? accepting_[src] : plain_[src]; }
  bool bottom(int src) const { return bottom_[src]; }

  /// Input word driving the component along the edge, ending with the boundary input.
  const std::vector<int>& witness(int src, int tgt, bool accepting) const {
    return witness_.at(std::make_tuple(src, tgt, accepting));
  }
  const std::vector<int>& bottom_witness_stem(int src) const { return bottom_stem_.at(src); }
  const std::vector<int>& bottom_witness_cycle(int src) const { return bottom_cycle_.at(src); }

  void add_edge(int src, int tgt, bool accepting, const std::vector<int>& word) {
    if (plain_[src].insert(tgt).second) witness_[{src, tgt, false}] = word;
    if (accepting && accepting_[src].insert(tgt).second) witness_[{src, tgt, true}] = word;
  }
  void set_bottom(int src, std::vector<int> stem, std::vector<int> cycle) {
    bottom_[src] = true;
    bottom_stem_[src] = std::move(stem);
    bottom_cycle_[src] = std::move(cycle);
  }

 private:
  int n_q_, n_c_, n_r_, n_in_;
  std::vector<std::set<int>> plain_, accepting_;
  std::vector<bool> bottom_;
  std::map<std::tuple<int, int, bool>, std::vector<int>> witness_;
  std::map<int, std::vector<int>> bottom_stem_, bottom_cycle_;
};

/// Builds G_C by exploring the product of the component's internal steps with
/// δ_int. An edge is accepting when a Büchi state is entered inside the segment.
inline ConfigGraph build_graph(const Component& c, const Library& lib, const NwbaIndex& ix) {
  int n_q = ix.num_states(), n_in = lib.num_inputs();
  ConfigGraph g(n_q, lib.n_c, lib.n_r, n_in);
  int n_s = c.num_states();
  auto node = [&](int s, State q, int f) { return (s * n_q + q) * 2 + f; };
  int n_nodes = n_s * n_q * 2;

  // Internal successors of product node (s, q, f): (input, node').
  auto internal_succ = [&](int s, State q, int f, auto&& fn) {
    for (int a = 0; a < n_in; ++a) {
      int t = c.delta[s][a];
      if (c.call_index(t) >= 0 || c.return_index(t) >= 0) continue;
      for (State q2 : ix.internals(q, Letter{a, c.label[t]})) fn(a, t, q2, f || ix.buchi(q2));
    }
  };

  for (int src = 0; src < g.num_sources(); ++src) {
    Config sc = g.config(src);
    int s0 = sc.kind == ConfigKind::Entry ? c.initial : c.reentry[sc.index];
    std::vector<int> parent(n_nodes, -2), via(n_nodes, -1);
    std::vector<int> order;
    int start = node(s0, sc.q, 0);
    parent[start] = -1;
    order.push_back(start);
    for (std::size_t k = 0; k < order.size(); ++k) {
      int n = order[k];
      int f = n % 2, q = (n / 2) % n_q, s = n / 2 / n_q;
      internal_succ(s, q, f, [&](int a, int t, State q2, int f2) {
        int m = node(t, q2, f2);
        if (parent[m] != -2) return;
        parent[m] = n;
        via[m] = a;
        order.push_back(m);
      });
    }
    auto word_to = [&](int n) {
      std::vector<int> w;
      for (; parent[n] >= 0; n = parent[n]) w.push_back(via[n]);
      std::reverse(w.begin(), w.end());
      return w;
    };
    for (int n : order) {
      int f = n % 2, q = (n / 2) % n_q, s = n / 2 / n_q;
      for (int a = 0; a < n_in; ++a) {
        int t = c.delta[s][a];
        Config tgt;
        if (int j = c.call_index(t); j >= 0) tgt = Config{ConfigKind::Call, j, a, q};
        else if (int i = c.return_index(t); i >= 0) tgt = Config{ConfigKind::Exit, i, a, q};
        else continue;
        auto w = word_to(n);
        w.push_back(a);
        g.add_edge(src, g.id(tgt), f == 1, w);
      }
    }
    // Büchi lasso among internal steps: a reachable node with a Büchi state
    // entered that can reach itself.
    for (int n : order) {
      int q = (n / 2) % n_q;
      if (n % 2 == 0 || !ix.buchi(q)) continue;
      std::vector<int> par(n_nodes, -2), v2(n_nodes, -1);
      std::vector<int> bfs{n};
      par[n] = -1;
      bool found = false;
      std::vector<int> cycle;
      for (std::size_t k = 0; k < bfs.size() && !found; ++k) {
        int u = bfs[k];
        int us = u / 2 / n_q, uq = (u / 2) % n_q;
        internal_succ(us, uq, 1, [&](int a, int t, State q2, int) {
          if (found) return;
          int m = node(t, q2, 1);
          if (m == n) {
            for (int x = u; par[x] >= 0; x = par[x]) cycle.push_back(v2[x]);
            std::reverse(cycle.begin(), cycle.end());
            cycle.push_back(a);
            found = true;
            return;
          }
          if (par[m] != -2) return;
          par[m] = u;
          v2[m] = a;
          bfs.push_back(m);
        });
      }
      if (found) {
        g.set_bottom(src, word_to(n), cycle);
        break;
      }
    }
  }
  return g;
}

/// Paths of G_C produced by enum_paths: vertex sequence and the index of the
/// marked edge (-1 when unmarked).
struct GraphPath {
  std::vector<int> vertices;
  int marked = -1;
};

/// Edges out of v: (target, may be marked). Component edges are markable when
/// accepting; call edges always; bottom edges never.
inline std::vector<std::pair<int, bool>> graph_successors(const ConfigGraph& g, int v) {
  std::vector<std::pair<int, bool>> out;
  Config c = g.config(v);
  if (c.kind == ConfigKind::Entry || c.kind == ConfigKind::Reentry) {
    for (int t : g.targets(v, false)) out.emplace_back(t, g.targets(v, true).count(t) > 0);
    if (g.bottom(v)) out.emplace_back(g.id(Config{}), false);
  } else if (c.kind == ConfigKind::Call) {
    for (int m = 0; m < g.n_r(); ++m)
      for (State q = 0; q < g.num_states(); ++q) out.emplace_back(g.id(Config{ConfigKind::Reentry, m, 0, q}), true);
  }
  return out;
}

/// Bounded path enumeration from `source`. With targets, yields the paths ending
/// in a target (with `mark`, exactly one markable edge is marked). With no
/// targets, yields ρ-paths: the last vertex occurs earlier and the marked edge
/// lies on the closing cycle. A path is pruned when an earlier one reached the
/// same vertex with the same marking state and the same set of call edges.
/// Returning false from `yield` stops the enumeration.
inline void enum_paths(const ConfigGraph& g, int source, const std::set<int>& targets, int bound, bool mark,
                       const std::function<bool(const GraphPath&)>& yield) {
  bool rho = targets.empty();
  if (rho) mark = true;
  using CallSet = std::set<std::pair<std::pair<int, int>, bool>>;
  std::map<std::tuple<int, int, CallSet>, int> shortest;
  GraphPath cur{{source}, -1};
  CallSet calls;
  bool stop = false;
  std::function<void()> dfs = [&] {
    if (stop) return;
    int v = cur.vertices.back();
    int len = static_cast<int>(cur.vertices.size()) - 1;
    if (!rho && targets.count(v) && len > 0 && (!mark || cur.marked >= 0)) {
      if (!yield(cur)) stop = true;
      return;
    }
    if (rho && len > 0 && cur.marked >= 0) {
      for (int k = 0; k < len; ++k)
        if (cur.vertices[k] == v && k <= cur.marked) {
          if (!yield(cur)) stop = true;
          return;
        }
    }
    if (len == bound) return;
    if (!rho) {
      auto [it, fresh] = shortest.try_emplace({v, cur.marked >= 0, calls}, len);
      if (!fresh && it->second <= len) return;
      it->second = len;
    }
    for (auto [t, markable] : graph_successors(g, v)) {
      bool is_call = g.config(v).kind == ConfigKind::Call;
      for (int m = 0; m < 2; ++m) {
        bool set_mark = m == 1;
        if (set_mark && (!mark || !markable || cur.marked >= 0)) continue;
        cur.vertices.push_back(t);
        if (set_mark) cur.marked = len;
        bool added = false;
        if (is_call) added = calls.insert({{v, t}, set_mark}).second;
        dfs();
        if (added) calls.erase({{v, t}, set_mark});
        if (set_mark) cur.marked = -1;
        cur.vertices.pop_back();
        if (stop) return;
      }
    }
  };
  dfs();
}

inline void dump_graph(std::ostream& os, const ConfigGraph& g, const std::string& name) {
  os << "graph " << name << ": " << g.num_vertices() << " vertices\n";
  for (int v = 0; v < g.num_sources(); ++v) {
    if (g.targets(v, false).empty() && !g.bottom(v)) continue;
    os << "  " << to_string(g.config(v)) << " ->";
    for (int t : g.targets(v, false)) os << " " << to_string(g.config(t)) << (g.targets(v, true).count(t) ? "*" : "");
    if (g.bottom(v)) os << " Bottom";
    os << "\n";
  }
}

}  // namespace nwsynth
