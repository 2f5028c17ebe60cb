#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nwsynth/nested_word.hpp"
#include "nwsynth/nwba.hpp"
#include "nwsynth/rlc.hpp"

namespace nwsynth {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json letter_to_json(const Alphabet& ab, Letter l) {
  return Json{{"in", ab.inputs.at(l.in)}, {"out", ab.outputs.at(l.out)}};
}

/// With `extend`, unknown symbols are added to the alphabet; otherwise they are an error.
inline Letter letter_from_json(const Json& j, Alphabet& ab, bool extend) {
  auto in = j.at("in").get<std::string>(), out = j.at("out").get<std::string>();
  if (extend) return Letter{ab.add_input(in), ab.add_output(out)};
  return Letter{ab.require_input(in), ab.require_output(out)};
}

// ---- traces ----

inline Json trace_to_json(const NestedWord& w, const Alphabet& ab) {
  Json pos = Json::array();
  for (Position i = 1; i <= w.size(); ++i) {
    Json p = letter_to_json(ab, w.letter(i));
    p["tag"] = tag_name(w.tag(i));
    p["match"] = w.partner(i) ? Json(w.partner(i)) : Json(nullptr);
    pos.push_back(std::move(p));
  }
  return Json{{"positions", std::move(pos)}};
}

inline NestedWord trace_from_json(const Json& j, Alphabet& ab, bool extend) {
  std::vector<Letter> letters;
  PositionSet calls, rets;
  PairSet mu;
  const Json& pos = j.at("positions");
  int n = static_cast<int>(pos.size());
  std::vector<int> match(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    const Json& p = pos[i - 1];
    letters.push_back(letter_from_json(p, ab, extend));
    Tag t = parse_tag(p.at("tag").get<std::string>());
    if (t == Tag::Call) calls.insert(i);
    if (t == Tag::Ret) rets.insert(i);
    if (p.contains("match") && !p["match"].is_null()) match[i] = p["match"].get<int>();
  }
  for (int i = 1; i <= n; ++i) {
    int m = match[i];
    if (m == 0) continue;
    if (m < 1 || m > n || match[m] != i) throw std::invalid_argument("position " + std::to_string(i) + ": match is not symmetric");
    if (i < m) mu.insert({i, m});
    else mu.insert({m, i});
  }
  return NestedWord(std::move(letters), calls, rets, mu);
}

// ---- automata ----

inline Json nwba_to_json(const Nwba& a) {
  auto names = [](const std::vector<std::string>& all, const std::vector<int>& ids) {
    Json v = Json::array();
    for (int i : ids) v.push_back(all.at(i));
    return v;
  };
  Json j;
  j["inputs"] = a.alphabet.inputs;
  j["outputs"] = a.alphabet.outputs;
  j["letters"] = Json::array();
  for (Letter l : a.letters) j["letters"].push_back(letter_to_json(a.alphabet, l));
  j["states"] = a.states;
  j["initial"] = names(a.states, a.initial);
  j["accepting"] = names(a.states, a.accepting);
  if (a.buchi) j["accepting_infinite"] = names(a.states, *a.buchi);
  j["hier"] = a.hier;
  j["hier_initial"] = names(a.hier, a.hier_initial);
  j["hier_final"] = names(a.hier, a.hier_final);
  j["delta_call"] = Json::array();
  for (const auto& t : a.delta_call)
    j["delta_call"].push_back({a.states[t.from], letter_to_json(a.alphabet, t.letter), a.states[t.to], a.hier[t.push]});
  j["delta_int"] = Json::array();
  for (const auto& t : a.delta_int)
    j["delta_int"].push_back({a.states[t.from], letter_to_json(a.alphabet, t.letter), a.states[t.to]});
  j["delta_ret"] = Json::array();
  for (const auto& t : a.delta_ret)
    j["delta_ret"].push_back({a.states[t.from], a.hier[t.pop], letter_to_json(a.alphabet, t.letter), a.states[t.to]});
  return j;
}

/// Unknown state or symbol names in transitions are kept as out-of-range
/// indices so that check_automaton reports them as defects.
inline Nwba nwba_from_json(const Json& j) {
  Nwba a;
  if (j.contains("inputs")) a.alphabet.inputs = j["inputs"].get<std::vector<std::string>>();
  if (j.contains("outputs")) a.alphabet.outputs = j["outputs"].get<std::vector<std::string>>();
  for (const auto& l : j.at("letters")) a.letters.push_back(letter_from_json(l, a.alphabet, true));
  a.states = j.at("states").get<std::vector<std::string>>();
  a.hier = j.value("hier", std::vector<std::string>{});
  std::map<std::string, int> qid, pid;
  for (int i = 0; i < a.num_states(); ++i) qid.emplace(a.states[i], i);
  for (int i = 0; i < a.num_hier(); ++i) pid.emplace(a.hier[i], i);
  auto q = [&](const Json& v) {
    auto it = qid.find(v.get<std::string>());
    return it == qid.end() ? a.num_states() : it->second;
  };
  auto p = [&](const Json& v) {
    auto it = pid.find(v.get<std::string>());
    return it == pid.end() ? a.num_hier() : it->second;
  };
  auto states = [&](const char* key) {
    std::vector<State> v;
    if (j.contains(key))
      for (const auto& s : j[key]) v.push_back(q(s));
    return v;
  };
  auto symbols = [&](const char* key) {
    std::vector<HierSymbol> v;
    if (j.contains(key))
      for (const auto& s : j[key]) v.push_back(p(s));
    return v;
  };
  a.initial = states("initial");
  a.accepting = states("accepting");
  if (j.contains("accepting_infinite")) a.buchi = states("accepting_infinite");
  a.hier_initial = symbols("hier_initial");
  a.hier_final = symbols("hier_final");
  // Transition letters must come from the declared letters; anything else
  // still extends the alphabet so the defect is reported, not thrown.
  for (const auto& t : j.value("delta_call", Json::array()))
    a.delta_call.push_back({q(t.at(0)), letter_from_json(t.at(1), a.alphabet, true), q(t.at(2)), p(t.at(3))});
  for (const auto& t : j.value("delta_int", Json::array()))
    a.delta_int.push_back({q(t.at(0)), letter_from_json(t.at(1), a.alphabet, true), q(t.at(2))});
  for (const auto& t : j.value("delta_ret", Json::array()))
    a.delta_ret.push_back({q(t.at(0)), p(t.at(1)), letter_from_json(t.at(2), a.alphabet, true), q(t.at(3))});
  return a;
}

// ---- libraries and compositions ----

inline Json library_to_json(const Library& lib) {
  Json j;
  j["sigma_in"] = lib.alphabet.inputs;
  j["sigma_out"] = lib.alphabet.outputs;
  j["n_c"] = lib.n_c;
  j["n_r"] = lib.n_r;
  j["components"] = Json::array();
  for (const auto& c : lib.components) {
    auto names = [&](const std::vector<int>& v) {
      Json a = Json::array();
      for (int s : v) a.push_back(c.states.at(s));
      return a;
    };
    Json jc;
    jc["name"] = c.name;
    jc["states"] = c.states;
    jc["initial"] = c.states.at(c.initial);
    jc["reentry"] = names(c.reentry);
    jc["calls"] = names(c.calls);
    jc["returns"] = names(c.returns);
    Json delta = Json::object(), labels = Json::object();
    for (int s = 0; s < c.num_states(); ++s) {
      Json row = Json::object();
      for (int a = 0; a < lib.num_inputs(); ++a) row[lib.alphabet.inputs[a]] = c.states.at(c.delta[s][a]);
      delta[c.states[s]] = std::move(row);
      labels[c.states[s]] = lib.alphabet.outputs.at(c.label[s]);
    }
    jc["delta"] = std::move(delta);
    jc["labels"] = std::move(labels);
    j["components"].push_back(std::move(jc));
  }
  return j;
}

/// Unknown names become -1 so that validate() reports them.
inline Library library_from_json(const Json& j) {
  Library lib;
  lib.alphabet.inputs = j.at("sigma_in").get<std::vector<std::string>>();
  lib.alphabet.outputs = j.at("sigma_out").get<std::vector<std::string>>();
  lib.n_c = j.at("n_c").get<int>();
  lib.n_r = j.at("n_r").get<int>();
  for (const auto& jc : j.at("components")) {
    Component c;
    c.name = jc.at("name").get<std::string>();
    c.states = jc.at("states").get<std::vector<std::string>>();
    std::map<std::string, int> id;
    for (int i = 0; i < c.num_states(); ++i) id.emplace(c.states[i], i);
    auto state = [&](const Json& v) {
      auto it = id.find(v.get<std::string>());
      return it == id.end() ? -1 : it->second;
    };
    auto list = [&](const char* key) {
      std::vector<int> v;
      for (const auto& s : jc.value(key, Json::array())) v.push_back(state(s));
      return v;
    };
    c.initial = state(jc.at("initial"));
    c.reentry = list("reentry");
    c.calls = list("calls");
    c.returns = list("returns");
    c.delta.assign(c.num_states(), std::vector<int>(lib.num_inputs(), -1));
    c.label.assign(c.num_states(), -1);
    for (const auto& [s, row] : jc.at("delta").items()) {
      auto it = id.find(s);
      if (it == id.end()) continue;
      for (const auto& [a, t] : row.items()) {
        int ai = lib.alphabet.input_index(a);
        if (ai >= 0) c.delta[it->second][ai] = state(t);
      }
    }
    for (const auto& [s, o] : jc.at("labels").items()) {
      auto it = id.find(s);
      if (it != id.end()) c.label[it->second] = lib.alphabet.output_index(o.get<std::string>());
    }
    lib.components.push_back(std::move(c));
  }
  return lib;
}

inline Json composition_to_json(const Composition& comp, const Library& lib) {
  Json els = Json::array();
  for (const auto& e : comp.elements) {
    Json iface = Json::array();
    for (int t : e.interface) iface.push_back(t + 1);
    els.push_back({{"component", lib.components.at(e.component).name}, {"interface", std::move(iface)}});
  }
  return Json{{"elements", std::move(els)}};
}

inline Composition composition_from_json(const Json& j, const Library& lib) {
  Composition comp;
  for (const auto& je : j.at("elements")) {
    Element e;
    e.component = lib.find(je.at("component").get<std::string>());
    for (const auto& t : je.value("interface", Json::array())) e.interface.push_back(t.get<int>() - 1);
    comp.elements.push_back(std::move(e));
  }
  return comp;
}

}  // namespace nwsynth
