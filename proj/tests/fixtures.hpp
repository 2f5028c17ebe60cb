#pragma once

#include <string>

#include "nwsynth/io.hpp"

namespace nwsynth::testing {

/// One component that reads a forever and outputs x; its call and return
/// states are unreachable.
inline Library loop_library() {
  return library_from_json(Json::parse(R"({
    "sigma_in": ["a"], "sigma_out": ["x", "y"], "n_c": 1, "n_r": 1,
    "components": [{
      "name": "LOOP", "states": ["s0", "c", "r"], "initial": "s0",
      "reentry": ["s0"], "calls": ["c"], "returns": ["r"],
      "delta": {"s0": {"a": "s0"}, "c": {"a": "s0"}, "r": {"a": "s0"}},
      "labels": {"s0": "x", "c": "x", "r": "x"}
    }]
  })"));
}

inline Composition loop_composition() { return Composition{{Element{0, {0}}}}; }

/// CALLER calls CALLEE on its first step; CALLEE returns at once; CALLER
/// resumes at e1 and returns on the next step.
inline Library caller_callee_library() {
  return library_from_json(Json::parse(R"({
    "sigma_in": ["a"], "sigma_out": ["x", "y"], "n_c": 1, "n_r": 1,
    "components": [{
      "name": "CALLER", "states": ["s0", "c1", "e1", "r1"], "initial": "s0",
      "reentry": ["e1"], "calls": ["c1"], "returns": ["r1"],
      "delta": {"s0": {"a": "c1"}, "c1": {"a": "s0"}, "e1": {"a": "r1"}, "r1": {"a": "s0"}},
      "labels": {"s0": "x", "c1": "x", "e1": "y", "r1": "x"}
    }, {
      "name": "CALLEE", "states": ["s0", "c1", "e1", "r1"], "initial": "s0",
      "reentry": ["e1"], "calls": ["c1"], "returns": ["r1"],
      "delta": {"s0": {"a": "r1"}, "c1": {"a": "s0"}, "e1": {"a": "s0"}, "r1": {"a": "s0"}},
      "labels": {"s0": "y", "c1": "y", "e1": "y", "r1": "y"}
    }]
  })"));
}

inline Composition caller_callee_composition() { return Composition{{Element{0, {1}}, Element{1, {1}}}}; }

}  // namespace nwsynth::testing
