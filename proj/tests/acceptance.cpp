// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "claim_oracle.hpp"
#include "corpus.hpp"
#include "nwsynth/solver.hpp"
#include "test_util.hpp"

using namespace nwsynth;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void collect_ops(const Formula& f, std::set<Op>& ops) {
  ops.insert(f.op());
  for (const auto& k : f.children()) collect_ops(k, ops);
}

int formula_depth(const Formula& f) {
  int d = 0;
  for (const auto& k : f.children()) d = std::max(d, formula_depth(k));
  bool temporal = f.op() == Op::Next || f.op() == Op::NextMu || f.op() == Op::Prev || f.op() == Op::PrevMu ||
                  f.op() == Op::UntilSummary || f.op() == Op::SinceSummary;
  return d + (temporal ? 1 : 0);
}

Verdict translator_agreement() {
  auto t0 = Clock::now();
  Alphabet ab{{"a"}, {"x", "y"}};
  const auto& corpus = testing::formula_corpus();
  std::set<Op> ops;
  int too_deep = 0;
  long words = 0, disagreements = 0;
  std::string first;
  for (const auto& text : corpus) {
    Formula f = parse_formula(text, ab);
    collect_ops(f, ops);
    if (formula_depth(f) > 3) ++too_deep;
    NwbaIndex ix(translate_nwtl(f, ab));
    for (int n = 1; n <= 6; ++n)
      testing::for_each_nested_word(n, 1, 2, [&](const NestedWord& w) {
        ++words;
        if (accepts_finite(ix, w) != eval(w, 1, f)) {
          if (disagreements++ == 0) first = text;
        }
      });
  }
  double secs = seconds_since(t0);
  const int all_ops = static_cast<int>(Op::SinceSummary) + 1;
  std::ostringstream os;
  os << corpus.size() << " formulas, " << ops.size() << "/" << all_ops << " operators, " << too_deep
     << " deeper than 3, " << words << " (formula, word) pairs, " << disagreements << " disagreements";
  if (disagreements) os << " (first: " << first << ")";
  os << ", " << secs << " s";
  return {corpus.size() >= 25 && static_cast<int>(ops.size()) == all_ops && too_deep == 0 && disagreements == 0 &&
              secs < 600,
          os.str()};
}

Library random_library(std::mt19937& rng, int n_r) {
  Library lib;
  lib.alphabet = Alphabet{{"a", "b"}, {"x", "y"}};
  lib.n_c = 1;
  lib.n_r = n_r;
  for (int k = 0; k < 2; ++k) {
    Component c;
    c.name = "C" + std::to_string(k);
    c.states = {"s0", "s1", "c", "r1", "r2"};
    c.initial = 0;
    c.reentry.clear();
    for (int m = 0; m < n_r; ++m) c.reentry.push_back(static_cast<int>(rng() % 2));
    c.calls = {2};
    c.returns = {3, 4};
    c.delta.assign(5, std::vector<int>(2));
    for (auto& row : c.delta)
      for (int& t : row) t = static_cast<int>(rng() % 5);
    for (int s = 0; s < 5; ++s) c.label.push_back(static_cast<int>(rng() % 2));
    lib.components.push_back(std::move(c));
  }
  return lib;
}

Nwba random_nwba(std::mt19937& rng, const Alphabet& ab, int n_q) {
  Nwba a;
  a.alphabet = ab;
  for (int i = 0; i < 4; ++i) a.letters.push_back(letter_at(ab, i));
  for (int q = 0; q < n_q; ++q) a.states.push_back("q" + std::to_string(q));
  auto q = [&] { return static_cast<State>(rng() % n_q); };
  auto l = [&] { return letter_at(ab, static_cast<int>(rng() % 4)); };
  a.initial = {q()};
  a.accepting = {q()};
  a.buchi = std::vector<State>{q()};
  a.hier = {"p0", "p1"};
  a.hier_initial = {0};
  a.hier_final = {static_cast<HierSymbol>(rng() % 2)};
  for (int k = 0; k < 4 * n_q; ++k) {
    a.delta_call.push_back({q(), l(), q(), static_cast<HierSymbol>(rng() % 2)});
    a.delta_int.push_back({q(), l(), q()});
    a.delta_ret.push_back({q(), static_cast<HierSymbol>(rng() % 2), l(), q()});
  }
  return a;
}

Verdict state_count_bound() {
  std::mt19937 rng(5);
  int trials = 0, violations = 0, max_states = 0;
  for (int n_q = 2; n_q <= 4; ++n_q)
    for (int n_r = 1; n_r <= 2; ++n_r)
      for (int t = 0; t < 10; ++t) {
        Library lib = random_library(rng, n_r);
        Nwba a = random_nwba(rng, lib.alphabet, n_q);
        Abt abt(lib, a);
        const int n_in = lib.num_inputs(), n_out = static_cast<int>(lib.alphabet.outputs.size());
        const int bound = 1 + 2 * n_q * n_q * n_r * n_in * n_out + 2 * n_q * n_in;
        const int reachable = static_cast<int>(abt.reachable_states().size());
        if (abt.num_states() > bound || reachable > bound) ++violations;
        max_states = std::max(max_states, abt.num_states());
        ++trials;
      }
  std::ostringstream os;
  os << trials << " automata, " << violations << " over the bound, largest state space " << max_states;
  return {violations == 0 && trials > 0, os.str()};
}

Verdict matching_suites() {
  std::mt19937 rng(7);
  int invalid_built = 0;
  for (int t = 0; t < 10000; ++t) {
    int len = 1 + static_cast<int>(rng() % 12);
    auto w = build_nested_word(testing::random_tagged(rng, len, 1, 2));
    if (validate_matching(w.size(), w.calls(), w.rets(), w.mu())) ++invalid_built;
  }
  int mutations = 0, wrong_rule = 0, missed = 0;
  int per_rule[4] = {0, 0, 0, 0};
  while (mutations < 10000) {
    int len = 2 + static_cast<int>(rng() % 11);
    auto w = build_nested_word(testing::random_tagged(rng, len, 1, 2));
    PositionSet calls = w.calls(), rets = w.rets();
    PairSet mu = w.mu();
    std::vector<std::pair<Position, Position>> pairs(mu.begin(), mu.end());
    const int rule = 1 + static_cast<int>(rng() % 3);
    auto pick = [&](const auto& v) { return v[rng() % v.size()]; };
    if (rule == 1) {
      // A pair whose first position is not a call, or that is not ordered.
      std::vector<Position> non_calls;
      for (Position p = 1; p <= w.size(); ++p)
        if (!calls.count(p)) non_calls.push_back(p);
      if (!pairs.empty() && (non_calls.empty() || rng() % 2)) {
        auto [i, j] = pick(pairs);
        mu.emplace(j, i);
      } else if (!non_calls.empty()) {
        mu.emplace(pick(non_calls), 1 + static_cast<int>(rng() % w.size()));
      } else {
        continue;
      }
    } else if (rule == 2) {
      // A second partner for a matched call or a matched return.
      std::vector<std::pair<Position, Position>> extra;
      for (auto [i, j] : pairs) {
        for (Position r : rets)
          if (r > i && r != j) extra.emplace_back(i, r);
        for (Position c : calls)
          if (c < j && c != i) extra.emplace_back(c, j);
      }
      if (extra.empty()) continue;
      mu.insert(pick(extra));
    } else {
      // Drop a matched pair, or cross two nested ones.
      if (pairs.empty()) continue;
      std::vector<std::pair<int, int>> nested;
      for (int x = 0; x < static_cast<int>(pairs.size()); ++x)
        for (int y = 0; y < static_cast<int>(pairs.size()); ++y)
          if (pairs[x].first < pairs[y].first && pairs[y].second < pairs[x].second) nested.emplace_back(x, y);
      if (!nested.empty() && rng() % 2) {
        auto [x, y] = pick(nested);
        mu.erase(pairs[x]);
        mu.erase(pairs[y]);
        mu.emplace(pairs[x].first, pairs[y].second);
        mu.emplace(pairs[y].first, pairs[x].second);
      } else {
        mu.erase(pick(pairs));
      }
    }
    auto v = validate_matching(w.size(), calls, rets, mu);
    ++mutations;
    ++per_rule[rule];
    if (!v)
      ++missed;
    else if (v->rule != rule)
      ++wrong_rule;
  }
  std::ostringstream os;
  os << "10000 built words, " << invalid_built << " invalid; " << mutations << " mutations (" << per_rule[1] << "/"
     << per_rule[2] << "/" << per_rule[3] << " by rule), " << missed << " undetected, " << wrong_rule
     << " with the wrong rule";
  return {invalid_built == 0 && missed == 0 && wrong_rule == 0, os.str()};
}

struct Instance {
  std::string name, spec;
  Library lib;
  Formula phi;
  Nwba bad;
  SynthesisOutcome outcome;
  double synth_seconds = 0;
};

const std::vector<Instance>& instances() {
  static const std::vector<Instance> all = [] {
    const std::string root = NWSYNTH_FIXTURES_DIR;
    std::vector<Instance> out;
    for (const auto& j : read_json_file(root + "/instances.json")) {
      Instance in;
      in.name = j.at("name").get<std::string>();
      in.spec = j.at("spec").get<std::string>();
      in.lib = library_from_json(read_json_file(root + "/" + j.at("library").get<std::string>()));
      in.phi = parse_formula(in.spec, in.lib.alphabet);
      in.bad = translate_nwtl(negate_collapsed(in.phi), in.lib.alphabet);
      auto t0 = Clock::now();
      in.outcome = synthesize(in.lib, in.bad, 8);
      in.synth_seconds = seconds_since(t0);
      out.push_back(std::move(in));
    }
    return out;
  }();
  return all;
}

Verdict synthesis_soundness() {
  int realizable = 0, unsound = 0;
  std::string first;
  for (const auto& in : instances()) {
    if (in.outcome.status != SynthesisStatus::Realizable) continue;
    ++realizable;
    if (model_check(*in.outcome.composition, in.lib, in.bad)) {
      if (unsound++ == 0) first = in.name;
    }
  }
  std::ostringstream os;
  os << instances().size() << " instances, " << realizable << " realizable, " << unsound << " with a counterexample";
  if (unsound) os << " (first: " << first << ")";
  return {realizable > 0 && unsound == 0, os.str()};
}

bool small_library(const Library& lib) {
  if (lib.components.size() > 3 || lib.n_c < 1 || lib.n_c > 2 || lib.n_r < 1 || lib.n_r > 2) return false;
  for (const auto& c : lib.components)
    if (c.states.size() > 5) return false;
  return true;
}

Verdict realizability_cross_check() {
  int agree = 0, disagree = 0, oversized = 0, realizable = 0;
  double slowest = 0;
  std::string first;
  for (const auto& in : instances()) {
    auto t0 = Clock::now();
    int witness_k = 0;
    for (int k = 1; k <= 4 && !witness_k; ++k)
      if (brute_force_realizable(in.lib, in.bad, k).witness) witness_k = k;
    slowest = std::max(slowest, seconds_since(t0) + in.synth_seconds);
    if (!small_library(in.lib)) ++oversized;
    bool synth = in.outcome.status == SynthesisStatus::Realizable;
    realizable += synth;
    if (synth == (witness_k > 0)) {
      ++agree;
    } else if (disagree++ == 0) {
      first = in.name + " (brute force " + (witness_k ? "found" : "no") + " witness, synthesis " +
              to_string(in.outcome.status) + ")";
    }
  }
  std::ostringstream os;
  os << agree << " of " << instances().size() << " instances agree, " << realizable << " realizable, " << oversized
     << " outside the size limits, slowest instance " << slowest << " s";
  if (disagree) os << "; first disagreement: " << first;
  return {instances().size() >= 15 && disagree == 0 && oversized == 0, os.str()};
}

// Gs applied to a formula without temporal operators.
bool safety_shaped(const std::string& spec) {
  return spec.rfind("Gs ", 0) == 0 && spec.find_first_of("XYUSFG", 2) == std::string::npos;
}

Verdict extraction_round_trip() {
  int witnesses = 0, tree_mismatch = 0, checked_specs = 0, traces = 0, violations = 0;
  std::string first;
  for (const auto& in : instances()) {
    if (in.outcome.status != SynthesisStatus::Realizable) continue;
    ++witnesses;
    const TreeTransducer& t = *in.outcome.transducer;
    Composition comp = composition_of_regular_tree(t, in.lib.n_c);
    for (int d = 0; d <= 4; ++d) {
      std::vector<int> labels;
      for (const auto& node : composition_tree(comp, in.lib, d)) labels.push_back(node.component);
      if (labels != unfold(t, in.lib.n_c, d)) {
        if (tree_mismatch++ == 0) first = in.name + " at depth " + std::to_string(d);
      }
    }
    if (!safety_shaped(in.spec)) continue;
    ++checked_specs;
    const int n_in = in.lib.num_inputs();
    for (int len = 1; len <= 8; ++len) {
      int total = 1;
      for (int i = 0; i < len; ++i) total *= n_in;
      for (int code = 0; code < total; ++code) {
        std::vector<int> input;
        for (int i = 0, c = code; i < len; ++i, c /= n_in) input.push_back(c % n_in);
        auto sim = simulate(comp, in.lib, input);
        if (sim.word.empty()) continue;
        ++traces;
        if (!eval(sim.word, 1, in.phi)) {
          if (violations++ == 0 && first.empty()) first = in.name + " violated";
        }
      }
    }
  }
  std::ostringstream os;
  os << witnesses << " witness trees, " << tree_mismatch << " unfolding mismatches, " << traces
     << " traces checked on " << checked_specs << " safety specs, " << violations << " violations";
  if (!first.empty()) os << " (first: " << first << ")";
  return {witnesses > 0 && checked_specs > 0 && tree_mismatch == 0 && violations == 0, os.str()};
}

Verdict finite_check_agreement() {
  const int depth = 3;
  long compared = 0, accepted = 0, disagreements = 0;
  int pairs = 0;
  std::string first;
  for (const auto& in : instances()) {
    if (in.lib.components.size() > 2) continue;
    NwbaIndex ix(align_alphabet(in.bad, in.lib.alphabet));
    Abt abt(in.lib, in.bad);
    enumerate_compositions(in.lib, 2, [&](const Composition& comp) {
      ++pairs;
      auto tree = finite_tree(comp, in.lib, depth);
      auto brute = testing::brute_call_checks(in.lib, ix, comp, depth, 10);
      std::optional<std::set<std::tuple<State, int, State, int, int, int>>> deep;
      for (int sid = 0; sid < abt.num_states(); ++sid) {
        AbtState s = abt.state(sid);
        if (s.kind != AbtKind::CallCheck) continue;
        ++compared;
        bool ok = run_finite_check(abt, tree, sid) == FiniteCheck::Accepted;
        bool found = brute.count(testing::call_check_key(s)) > 0;
        accepted += ok;
        if (ok && !found) {
          if (!deep) deep = testing::brute_call_checks(in.lib, ix, comp, 100, 14);
          found = deep->count(testing::call_check_key(s)) > 0;
          if (found) continue;
        }
        if (ok != found && disagreements++ == 0) first = in.name + " state " + std::to_string(sid);
      }
      return true;
    });
  }
  std::ostringstream os;
  os << pairs << " (spec, composition) pairs, " << compared << " CallCheck states, " << accepted << " accepted, "
     << disagreements << " disagreements";
  if (disagreements) os << " (first: " << first << ")";
  return {compared > 0 && accepted > 0 && disagreements == 0, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"translator agrees with evaluator", translator_agreement},
      {"synthesis soundness", synthesis_soundness},
      {"realizability cross-check", realizability_cross_check},
      {"extraction round-trip", extraction_round_trip},
      {"ABT state-count bound", state_count_bound},
      {"finite check agrees with computations", finite_check_agreement},
      {"matching suites", matching_suites},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("criterion %zu %s: %s (%s; %.2f s)\n", i + 1, criteria[i].first.c_str(), v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
