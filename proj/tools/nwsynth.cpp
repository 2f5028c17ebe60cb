#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "nwsynth/solver.hpp"

using namespace nwsynth;

namespace {

constexpr int kExitError = 1;
constexpr int kExitCounterexample = 2;
constexpr int kExitUnrealizable = 3;
constexpr int kExitUnknown = 4;

struct Spec {
  std::optional<Formula> formula;
  std::optional<Nwba> bad;  // automaton of the forbidden behaviors
};

/// Runs a loader and prefixes its errors with the file name.
template <class F>
auto from_file(const std::string& path, F&& load) {
  try {
    return load(read_json_file(path));
  } catch (const std::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

/// Parses a formula file; with `open`, atoms extend the alphabet instead of being checked against it.
Formula formula_from_file(const std::string& path, Alphabet& ab, bool open) {
  try {
    std::string text = read_text_file(path);
    return open ? parse_formula_open(text, ab) : parse_formula(text, ab);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

bool is_json_path(const std::string& path) { return path.size() >= 5 && path.substr(path.size() - 5) == ".json"; }

/// A formula file, or an NWBA file (.json) accepting exactly the violations.
Spec load_spec(const std::string& path, Alphabet ab) {
  Spec s;
  if (is_json_path(path)) {
    s.bad = from_file(path, [](const Json& j) { return nwba_from_json(j); });
    auto report = check_automaton(*s.bad);
    if (!report.valid()) throw std::invalid_argument(path + ": " + report.defects.front());
  } else {
    s.formula = formula_from_file(path, ab, false);
  }
  return s;
}

Nwba bad_automaton(const Spec& s, const Alphabet& ab) {
  if (s.bad) return *s.bad;
  return translate_nwtl(negate_collapsed(*s.formula), ab);
}

Library load_library(const std::string& path) {
  Library lib = from_file(path, [](const Json& j) { return library_from_json(j); });
  auto defects = validate(lib);
  if (!defects.empty()) throw std::invalid_argument(path + ": " + defects.front());
  return lib;
}

Composition load_composition(const std::string& path, const Library& lib) {
  Composition c = from_file(path, [&](const Json& j) { return composition_from_json(j, lib); });
  auto defects = validate(c, lib);
  if (!defects.empty()) throw std::invalid_argument(path + ": " + defects.front());
  return c;
}

/// "aab" when every input name is one character, otherwise comma or space separated names.
std::vector<int> parse_inputs(const std::string& text, const Alphabet& ab) {
  std::vector<int> out;
  bool single = std::all_of(ab.inputs.begin(), ab.inputs.end(), [](const std::string& s) { return s.size() == 1; });
  if (single && text.find_first_of(", ") == std::string::npos) {
    for (char ch : text) out.push_back(ab.require_input(std::string(1, ch)));
    return out;
  }
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) out.push_back(ab.require_input(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

void write_json(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

std::string inputs_to_string(const std::vector<int>& in, const Alphabet& ab) {
  std::string s;
  for (std::size_t i = 0; i < in.size(); ++i) s += (i ? " " : "") + ab.inputs[in[i]];
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesis of recursive component compositions from nested-word specifications"};
  app.require_subcommand(1);
  int max_rank = 8;
  int max_elements = 4;
  bool want_graph = false, want_abt = false;
  unsigned seed = 0;

  std::string lib_path, spec_path, comp_path, out_path, trace_path, nwba_path, input;
  int random_length = 0;

  auto* synth = app.add_subcommand("synth", "Synthesize a composition or report unrealizability");
  synth->add_option("library", lib_path, "Library file")->required()->check(CLI::ExistingFile);
  synth->add_option("spec", spec_path, "Formula file, or NWBA file (.json) of forbidden behaviors")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("-o,--out", out_path, "Outcome file (default: standard output)");
  synth->add_option("--max-rank", max_rank, "Largest rank tried")->check(CLI::PositiveNumber);
  synth->add_option("--max-elements", max_elements, "Brute-force cross-check up to this many elements (0: off)")
      ->check(CLI::NonNegativeNumber);
  synth->add_flag("--dump-graph", want_graph, "Print the summary graph of every component to standard error");
  synth->add_flag("--dump-abt", want_abt, "Print an automaton summary to standard error");

  auto* check = app.add_subcommand("check", "Model-check a composition against a specification");
  check->add_option("library", lib_path, "Library file")->required()->check(CLI::ExistingFile);
  check->add_option("composition", comp_path, "Composition file")->required()->check(CLI::ExistingFile);
  check->add_option("spec", spec_path, "Formula file, or NWBA file (.json) of forbidden behaviors")
      ->required()
      ->check(CLI::ExistingFile);

  auto* sim = app.add_subcommand("simulate", "Print the trace of a composition on an input word");
  sim->add_option("library", lib_path, "Library file")->required()->check(CLI::ExistingFile);
  sim->add_option("composition", comp_path, "Composition file")->required()->check(CLI::ExistingFile);
  auto* in_opt = sim->add_option("--input", input, "Input word, e.g. aab");
  sim->add_option("--random", random_length, "Random input word of this length")->excludes(in_opt);
  sim->add_option("--seed", seed, "Seed for --random");

  auto* tr = app.add_subcommand("translate", "Translate a formula into an NWBA");
  tr->add_option("spec", spec_path, "Formula file")->required()->check(CLI::ExistingFile);
  tr->add_option("--library", lib_path, "Take the alphabet from this library")->check(CLI::ExistingFile);

  auto* ev = app.add_subcommand("eval", "Evaluate a formula at the first position of a trace");
  ev->add_option("trace", trace_path, "Trace file")->required()->check(CLI::ExistingFile);
  ev->add_option("spec", spec_path, "Formula file")->required()->check(CLI::ExistingFile);

  auto* val = app.add_subcommand("validate", "Validate a library, and optionally a composition or NWBA");
  val->add_option("library", lib_path, "Library file")->required()->check(CLI::ExistingFile);
  val->add_option("--composition", comp_path, "Composition file")->check(CLI::ExistingFile);
  val->add_option("--nwba", nwba_path, "NWBA file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*synth) {
      Library lib = load_library(lib_path);
      Nwba bad = bad_automaton(load_spec(spec_path, lib.alphabet), lib.alphabet);
      if (want_graph) {
        NwbaIndex ix(align_alphabet(bad, lib.alphabet));
        for (const auto& c : lib.components) dump_graph(std::cerr, build_graph(c, lib, ix), c.name);
      }
      if (want_abt) dump_abt(std::cerr, build_abt(lib, bad));
      SynthesisOutcome o = synthesize(lib, bad, max_rank);
      Json j = outcome_to_json(o, lib);
      if (max_elements > 0) {
        auto r = brute_force_realizable(lib, bad, max_elements);
        j["brute_force"] = Json{{"max_elements", max_elements},
                                {"witness", r.witness ? composition_to_json(*r.witness, lib) : Json(nullptr)}};
      }
      outcome_from_json(j, lib);
      write_json(j, out_path);
      switch (o.status) {
        case SynthesisStatus::Realizable: return 0;
        case SynthesisStatus::Unrealizable: return kExitUnrealizable;
        case SynthesisStatus::UnknownUpToRank: return kExitUnknown;
      }
    }
    if (*check) {
      Library lib = load_library(lib_path);
      Composition comp = load_composition(comp_path, lib);
      Nwba bad = bad_automaton(load_spec(spec_path, lib.alphabet), lib.alphabet);
      auto cex = model_check(comp, lib, bad);
      if (!cex) {
        std::cout << "empty\n";
        return 0;
      }
      std::cout << "counterexample: " << to_string(cex->kind) << "\n"
                << "stem: " << inputs_to_string(cex->stem, lib.alphabet) << "\n";
      if (!cex->cycle.empty()) std::cout << "cycle: " << inputs_to_string(cex->cycle, lib.alphabet) << "\n";
      std::cout << "sketch: " << cex->sketch << "\n";
      return kExitCounterexample;
    }
    if (*sim) {
      Library lib = load_library(lib_path);
      Composition comp = load_composition(comp_path, lib);
      std::vector<int> word;
      if (random_length > 0) {
        std::mt19937 rng(seed);
        std::uniform_int_distribution<int> pick(0, lib.num_inputs() - 1);
        for (int i = 0; i < random_length; ++i) word.push_back(pick(rng));
      } else {
        word = parse_inputs(input, lib.alphabet);
      }
      auto s = simulate(comp, lib, word);
      Json j = trace_to_json(s.word, lib.alphabet);
      j["terminated"] = s.terminated;
      write_json(j, "");
      return 0;
    }
    if (*tr) {
      Alphabet ab;
      if (!lib_path.empty()) ab = load_library(lib_path).alphabet;
      Formula f = formula_from_file(spec_path, ab, lib_path.empty());
      write_json(nwba_to_json(translate_nwtl(f, ab)), "");
      return 0;
    }
    if (*ev) {
      Alphabet ab;
      Formula f = formula_from_file(spec_path, ab, true);
      NestedWord w = from_file(trace_path, [&](const Json& j) { return trace_from_json(j, ab, true); });
      if (w.empty()) throw std::invalid_argument(trace_path + ": empty trace");
      std::cout << (eval(w, 1, f) ? "true" : "false") << "\n";
      return 0;
    }
    if (*val) {
      std::vector<std::string> defects;
      Library lib = from_file(lib_path, [](const Json& j) { return library_from_json(j); });
      for (const auto& d : validate(lib)) defects.push_back(lib_path + ": " + d);
      if (!comp_path.empty() && defects.empty())
        for (const auto& d : validate(from_file(comp_path, [&](const Json& j) { return composition_from_json(j, lib); }), lib))
          defects.push_back(comp_path + ": " + d);
      if (!nwba_path.empty()) {
        auto report = check_automaton(from_file(nwba_path, [](const Json& j) { return nwba_from_json(j); }));
        for (const auto& d : report.defects) defects.push_back(nwba_path + ": " + d);
        for (const auto& w : report.warnings) std::cerr << nwba_path << ": warning: " << w << "\n";
      }
      for (const auto& d : defects) std::cerr << d << "\n";
      if (!defects.empty()) return kExitError;
      std::cout << "valid\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
