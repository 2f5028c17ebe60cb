#pragma once

#include <algorithm>
#include <vector>

namespace nwsynth {

/// Two-player game on a finite graph. At vertex v the first player picks one of
/// moves[v]; the second player then picks a vertex from that move. The first
/// player wins a play that visits accepting vertices infinitely often; a
/// vertex without moves is lost.
struct BuchiGame {
  std::vector<bool> accepting;
  std::vector<std::vector<std::vector<int>>> moves;

  int num_vertices() const { return static_cast<int>(accepting.size()); }
};

/// Winning region and a memoryless winning strategy (index into moves[v], -1
/// outside the region).
struct GameSolution {
  std::vector<bool> win;
  std::vector<int> strategy;
};

namespace detail {

inline bool all_in(const std::vector<int>& succ, const std::vector<bool>& set) {
  for (int v : succ)
    if (!set[v]) return false;
  return true;
}

}  // namespace detail

/// Greatest fixpoint Z = μY. (Acc ∩ CPre(Z)) ∪ CPre(Y).
inline GameSolution solve_buchi(const BuchiGame& g) {
  const int n = g.num_vertices();
  std::vector<bool> z(n, true);
  std::vector<int> strategy(n, -1);
  for (;;) {
    std::vector<bool> y(n, false);
    std::fill(strategy.begin(), strategy.end(), -1);
    for (bool grew = true; grew;) {
      grew = false;
      std::vector<bool> next = y;
      for (int v = 0; v < n; ++v) {
        if (y[v] || !z[v]) continue;
        for (int m = 0; m < static_cast<int>(g.moves[v].size()); ++m) {
          const auto& succ = g.moves[v][m];
          if (detail::all_in(succ, y) || (g.accepting[v] && detail::all_in(succ, z))) {
            next[v] = true;
            strategy[v] = m;
            grew = true;
            break;
          }
        }
      }
      y = std::move(next);
    }
    if (y == z) return GameSolution{z, strategy};
    z = std::move(y);
  }
}

/// Winning region of the first player when the objective is to visit the
/// `accepting` vertices only finitely often: μZ. νY. (¬Acc ∩ CPre(Y)) ∪ CPre(Z).
inline std::vector<bool> solve_cobuchi(const BuchiGame& g) {
  const int n = g.num_vertices();
  auto cpre = [&](int v, const std::vector<bool>& set) {
    for (const auto& succ : g.moves[v])
      if (detail::all_in(succ, set)) return true;
    return false;
  };
  std::vector<bool> z(n, false);
  for (;;) {
    std::vector<bool> y(n, true);
    for (bool shrank = true; shrank;) {
      shrank = false;
      std::vector<bool> next(n, false);
      for (int v = 0; v < n; ++v) next[v] = (!g.accepting[v] && cpre(v, y)) || cpre(v, z);
      if (next != y) shrank = true;
      y = std::move(next);
    }
    if (y == z) return z;
    z = std::move(y);
  }
}

}  // namespace nwsynth
