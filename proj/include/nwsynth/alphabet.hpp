#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nwsynth {

/// Input/output alphabets shared by specifications, automata and components.
/// Symbols are referred to by their index in the respective vector.
struct Alphabet {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  int input_index(std::string_view name) const { return find(inputs, name); }
  int output_index(std::string_view name) const { return find(outputs, name); }

  int require_input(std::string_view name) const {
    int i = input_index(name);
    if (i < 0) throw std::invalid_argument("unknown input symbol '" + std::string(name) + "'");
    return i;
  }
  int require_output(std::string_view name) const {
    int o = output_index(name);
    if (o < 0) throw std::invalid_argument("unknown output symbol '" + std::string(name) + "'");
    return o;
  }

  // Adds the symbol if absent; returns its index.
  int add_input(std::string_view name) { return add(inputs, name); }
  int add_output(std::string_view name) { return add(outputs, name); }

  std::size_t num_letters() const { return inputs.size() * outputs.size(); }

  bool operator==(const Alphabet&) const = default;

 private:
  static int find(const std::vector<std::string>& v, std::string_view name) {
    auto it = std::find(v.begin(), v.end(), name);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
  }
  static int add(std::vector<std::string>& v, std::string_view name) {
    int i = find(v, name);
    if (i >= 0) return i;
    v.emplace_back(name);
    return static_cast<int>(v.size()) - 1;
  }
};

/// One position of a computation: the input read and the output produced.
struct Letter {
  int in = 0;
  int out = 0;

  auto operator<=>(const Letter&) const = default;
};

/// Dense index of a letter in Σ_I × Σ_O.
inline int letter_index(const Alphabet& ab, Letter l) {
  return l.in * static_cast<int>(ab.outputs.size()) + l.out;
}

inline Letter letter_at(const Alphabet& ab, int index) {
  int n = static_cast<int>(ab.outputs.size());
  return Letter{index / n, index % n};
}

enum class Tag { Call, Ret, Int };

inline const char* tag_name(Tag t) {
  switch (t) {
    case Tag::Call: return "call";
    case Tag::Ret: return "ret";
    case Tag::Int: return "int";
  }
  return "?";
}

inline Tag parse_tag(std::string_view s) {
  if (s == "call") return Tag::Call;
  if (s == "ret") return Tag::Ret;
  if (s == "int") return Tag::Int;
  throw std::invalid_argument("unknown tag '" + std::string(s) + "'");
}

}  // namespace nwsynth
