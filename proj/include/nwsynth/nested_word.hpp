#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nwsynth/alphabet.hpp"

namespace nwsynth {

using Position = int;  // 1-based
using PositionSet = std::set<Position>;
using PairSet = std::set<std::pair<Position, Position>>;

/// Which of the three matching conditions failed, with the witnessing pair.
///   1: a matched pair is not (call, ret) or is not ordered
///   2: the relation is not injective in one coordinate
///   3: a call/return pair encloses no matching edge (crossing or unmatched inside)
struct MatchingViolation {
  int rule = 0;
  std::pair<Position, Position> witness;

  bool operator==(const MatchingViolation&) const = default;
};

/// Checks the three matching conditions on [1, n]. Returns std::nullopt when valid.
/// Throws std::out_of_range if any position lies outside 1..n.
inline std::optional<MatchingViolation> validate_matching(int n, const PositionSet& calls,
                                                          const PositionSet& rets,
                                                          const PairSet& mu) {
  auto in_range = [n](Position p) { return p >= 1 && p <= n; };
  for (Position p : calls)
    if (!in_range(p)) throw std::out_of_range("call position " + std::to_string(p) + " out of range");
  for (Position p : rets)
    if (!in_range(p)) throw std::out_of_range("return position " + std::to_string(p) + " out of range");
  for (auto [i, j] : mu)
    if (!in_range(i) || !in_range(j))
      throw std::out_of_range("matched pair (" + std::to_string(i) + "," + std::to_string(j) +
                              ") out of range");

  for (auto [i, j] : mu)
    if (!calls.count(i) || !rets.count(j) || !(i < j)) return MatchingViolation{1, {i, j}};

  std::vector<Position> right(n + 1, 0), left(n + 1, 0);
  for (auto [i, j] : mu) {
    if (right[i] != 0) return MatchingViolation{2, {i, j}};
    if (left[j] != 0) return MatchingViolation{2, {i, j}};
    right[i] = j;
    left[j] = i;
  }

  for (Position i : calls) {
    for (Position j : rets) {
      if (j < i) continue;
      bool found = false;
      for (Position k = i; k <= j && !found; ++k) found = right[i] == k || left[j] == k;
      if (!found) return MatchingViolation{3, {i, j}};
    }
  }
  return std::nullopt;
}

/// A finite nested word: letters plus a validated matching. Immutable after construction.
class NestedWord {
 public:
  NestedWord() = default;

  /// Throws std::invalid_argument on a matching violation.
  NestedWord(std::vector<Letter> letters, const PositionSet& calls, const PositionSet& rets,
             const PairSet& mu)
      : letters_(std::move(letters)) {
    int n = size();
    if (auto v = validate_matching(n, calls, rets, mu))
      throw std::invalid_argument("matching violates condition " + std::to_string(v->rule) +
                                  " at (" + std::to_string(v->witness.first) + "," +
                                  std::to_string(v->witness.second) + ")");
    tags_.assign(n + 1, Tag::Int);
    match_.assign(n + 1, 0);
    for (Position p : calls) tags_[p] = Tag::Call;
    for (Position p : rets) tags_[p] = Tag::Ret;
    for (auto [i, j] : mu) {
      match_[i] = j;
      match_[j] = i;
    }
  }

  int size() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }

  const Letter& letter(Position i) const { return letters_.at(i - 1); }
  const std::vector<Letter>& letters() const { return letters_; }
  Tag tag(Position i) const { return tags_.at(i); }
  bool is_call(Position i) const { return tag(i) == Tag::Call; }
  bool is_ret(Position i) const { return tag(i) == Tag::Ret; }
  bool is_internal(Position i) const { return tag(i) == Tag::Int; }

  /// r(i) for a matched call, c(i) for a matched return, 0 otherwise.
  Position partner(Position i) const { return match_.at(i); }
  bool is_matched_call(Position i) const { return is_call(i) && partner(i) != 0; }
  bool is_matched_ret(Position i) const { return is_ret(i) && partner(i) != 0; }
  bool is_pending_call(Position i) const { return is_call(i) && partner(i) == 0; }

  PositionSet calls() const { return collect(Tag::Call); }
  PositionSet rets() const { return collect(Tag::Ret); }
  PairSet mu() const {
    PairSet out;
    for (Position i = 1; i <= size(); ++i)
      if (is_matched_call(i)) out.emplace(i, match_[i]);
    return out;
  }

  bool operator==(const NestedWord& o) const {
    return letters_ == o.letters_ && tags_ == o.tags_ && match_ == o.match_;
  }

 private:
  PositionSet collect(Tag t) const {
    PositionSet out;
    for (Position i = 1; i <= size(); ++i)
      if (tags_[i] == t) out.insert(i);
    return out;
  }

  std::vector<Letter> letters_;
  std::vector<Tag> tags_{Tag::Int};   // index 0 unused
  std::vector<Position> match_{0};    // index 0 unused
};

/// Matches every return to the most recent unmatched call; returns with an empty
/// stack stay unmatched and leftover calls stay pending.
inline NestedWord build_nested_word(const std::vector<std::pair<Letter, Tag>>& tagged) {
  std::vector<Letter> letters;
  PositionSet calls, rets;
  PairSet mu;
  std::vector<Position> stack;
  Position pos = 0;
  for (const auto& [letter, tag] : tagged) {
    ++pos;
    letters.push_back(letter);
    if (tag == Tag::Call) {
      calls.insert(pos);
      stack.push_back(pos);
    } else if (tag == Tag::Ret) {
      rets.insert(pos);
      if (!stack.empty()) {
        mu.emplace(stack.back(), pos);
        stack.pop_back();
      }
    }
  }
  return NestedWord(std::move(letters), calls, rets, mu);
}

/// The summary path from i to j: jump from a matched call to its return whenever
/// that return is not beyond j, otherwise step by one.
inline std::vector<Position> summary_path(const NestedWord& w, Position i, Position j) {
  if (i < 1 || j > w.size() || i > j)
    throw std::out_of_range("summary_path requires 1 <= i <= j <= |w|");
  std::vector<Position> path{i};
  Position p = i;
  while (p < j) {
    Position r = w.is_matched_call(p) ? w.partner(p) : 0;
    p = (r != 0 && r <= j) ? r : p + 1;
    path.push_back(p);
  }
  return path;
}

/// Positions i..j re-indexed from 1. Pairs leaving the window are cut: calls become
/// pending, returns become unmatched. Empty when j < i.
inline NestedWord substructure(const NestedWord& w, Position i, Position j) {
  if (j < i) return NestedWord{};
  if (i < 1 || j > w.size()) throw std::out_of_range("substructure window out of range");
  std::vector<Letter> letters;
  PositionSet calls, rets;
  PairSet mu;
  for (Position p = i; p <= j; ++p) {
    Position q = p - i + 1;
    letters.push_back(w.letter(p));
    if (w.is_call(p)) calls.insert(q);
    if (w.is_ret(p)) rets.insert(q);
    if (w.is_matched_call(p) && w.partner(p) <= j) mu.emplace(q, w.partner(p) - i + 1);
  }
  return NestedWord(std::move(letters), calls, rets, mu);
}

}  // namespace nwsynth
