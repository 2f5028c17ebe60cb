#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nwsynth/alphabet.hpp"
#include "nwsynth/nested_word.hpp"

namespace nwsynth {

enum class Op {
  True,
  Call,
  Ret,
  InputAtom,
  OutputAtom,
  Not,
  Or,
  And,
  Next,
  NextMu,
  Prev,
  PrevMu,
  UntilSummary,
  SinceSummary,
};

inline int arity(Op op) {
  switch (op) {
    case Op::True:
    case Op::Call:
    case Op::Ret:
    case Op::InputAtom:
    case Op::OutputAtom: return 0;
    case Op::Not:
    case Op::Next:
    case Op::NextMu:
    case Op::Prev:
    case Op::PrevMu: return 1;
    default: return 2;
  }
}

/// Immutable NWTL formula; a cheap shared handle to an AST node.
class Formula {
  struct Node {
    Op op;
    int symbol = -1;  // atom index into Σ_I or Σ_O
    std::string name;  // atom name, for printing
    std::vector<Formula> kids;
  };

 public:
  Formula() : Formula(Op::True) {}

  static Formula top() { return Formula(Op::True); }
  static Formula call() { return Formula(Op::Call); }
  static Formula ret() { return Formula(Op::Ret); }
  static Formula input(int symbol, std::string name) { return atom(Op::InputAtom, symbol, std::move(name)); }
  static Formula output(int symbol, std::string name) { return atom(Op::OutputAtom, symbol, std::move(name)); }
  static Formula make(Op op, std::vector<Formula> kids) {
    if (static_cast<int>(kids.size()) != arity(op)) throw std::invalid_argument("arity mismatch");
    return Formula(std::make_shared<const Node>(Node{op, -1, {}, std::move(kids)}));
  }
  static Formula negate(Formula a) { return make(Op::Not, {std::move(a)}); }
  static Formula disj(Formula a, Formula b) { return make(Op::Or, {std::move(a), std::move(b)}); }
  static Formula conj(Formula a, Formula b) { return make(Op::And, {std::move(a), std::move(b)}); }
  static Formula next(Formula a) { return make(Op::Next, {std::move(a)}); }
  static Formula next_mu(Formula a) { return make(Op::NextMu, {std::move(a)}); }
  static Formula prev(Formula a) { return make(Op::Prev, {std::move(a)}); }
  static Formula prev_mu(Formula a) { return make(Op::PrevMu, {std::move(a)}); }
  static Formula until(Formula a, Formula b) { return make(Op::UntilSummary, {std::move(a), std::move(b)}); }
  static Formula since(Formula a, Formula b) { return make(Op::SinceSummary, {std::move(a), std::move(b)}); }

  Op op() const { return node_->op; }
  int symbol() const { return node_->symbol; }
  const std::string& name() const { return node_->name; }
  const Formula& child(int k = 0) const { return node_->kids.at(k); }
  const std::vector<Formula>& children() const { return node_->kids; }
  const void* id() const { return node_.get(); }

  /// Number of AST nodes.
  int size() const {
    int n = 1;
    for (const auto& k : node_->kids) n += k.size();
    return n;
  }

  friend int compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return 0;
    if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
    if (a.symbol() != b.symbol()) return a.symbol() < b.symbol() ? -1 : 1;
    for (std::size_t k = 0; k < a.children().size(); ++k)
      if (int c = compare(a.child(k), b.child(k))) return c;
    return 0;
  }
  bool operator==(const Formula& o) const { return compare(*this, o) == 0; }
  bool operator<(const Formula& o) const { return compare(*this, o) < 0; }

 private:
  explicit Formula(Op op) : node_(std::make_shared<const Node>(Node{op, -1, {}, {}})) {}
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula atom(Op op, int symbol, std::string name) {
    return Formula(std::make_shared<const Node>(Node{op, symbol, std::move(name), {}}));
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Concrete syntax

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset(offset) {}
  std::size_t offset;
};

namespace detail {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Alphabet* ab, Alphabet* open)
      : text_(text), ab_(ab), open_(open) {}

  Formula parse() {
    advance();
    Formula f = parse_or();
    if (tok_.kind != Kind::End) fail("unexpected token '" + tok_.text + "'");
    return f;
  }

 private:
  enum class Kind { End, Ident, In, Out, Bang, LParen, RParen, Amp, Bar };
  struct Token {
    Kind kind = Kind::End;
    std::string text;
    std::size_t offset = 0;
  };

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_.offset); }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    tok_ = Token{Kind::End, {}, pos_};
    if (pos_ >= text_.size()) return;
    char c = text_[pos_];
    auto single = [&](Kind k) {
      tok_.kind = k;
      tok_.text = std::string(1, c);
      ++pos_;
    };
    switch (c) {
      case '!': return single(Kind::Bang);
      case '(': return single(Kind::LParen);
      case ')': return single(Kind::RParen);
      case '&': return single(Kind::Amp);
      case '|': return single(Kind::Bar);
      default: break;
    }
    if (!ident_char(c)) throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    std::string word(text_.substr(start, pos_ - start));
    if ((word == "in" || word == "out") && pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      std::size_t id_start = pos_;
      while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
      if (pos_ == id_start) throw ParseError("missing symbol after '" + word + ":'", id_start);
      tok_.kind = word == "in" ? Kind::In : Kind::Out;
      tok_.text = std::string(text_.substr(id_start, pos_ - id_start));
      return;
    }
    tok_.kind = Kind::Ident;
    tok_.text = std::move(word);
  }

  bool at_ident(std::string_view w) const { return tok_.kind == Kind::Ident && tok_.text == w; }

  Formula parse_or() {
    Formula f = parse_and();
    while (tok_.kind == Kind::Bar) {
      advance();
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (tok_.kind == Kind::Amp) {
      advance();
      f = Formula::conj(f, parse_until());
    }
    return f;
  }

  Formula parse_until() {
    Formula f = parse_unary();
    if (at_ident("Us")) {
      advance();
      return Formula::until(f, parse_until());
    }
    if (at_ident("Ss")) {
      advance();
      return Formula::since(f, parse_until());
    }
    return f;
  }

  Formula parse_unary() {
    switch (tok_.kind) {
      case Kind::Bang: advance(); return Formula::negate(parse_unary());
      case Kind::LParen: {
        advance();
        Formula f = parse_or();
        if (tok_.kind != Kind::RParen) fail("expected ')'");
        advance();
        return f;
      }
      case Kind::In: {
        int idx = resolve(tok_.text, true);
        Formula f = Formula::input(idx, tok_.text);
        advance();
        return f;
      }
      case Kind::Out: {
        int idx = resolve(tok_.text, false);
        Formula f = Formula::output(idx, tok_.text);
        advance();
        return f;
      }
      case Kind::Ident: break;
      default: fail(tok_.kind == Kind::End ? "unexpected end of input" : "unexpected token '" + tok_.text + "'");
    }
    std::string w = tok_.text;
    if (w == "true") { advance(); return Formula::top(); }
    if (w == "call") { advance(); return Formula::call(); }
    if (w == "ret") { advance(); return Formula::ret(); }
    if (w == "X") { advance(); return Formula::next(parse_unary()); }
    if (w == "Xmu") { advance(); return Formula::next_mu(parse_unary()); }
    if (w == "Y") { advance(); return Formula::prev(parse_unary()); }
    if (w == "Ymu") { advance(); return Formula::prev_mu(parse_unary()); }
    if (w == "Fs") { advance(); return Formula::until(Formula::top(), parse_unary()); }
    if (w == "Gs") {
      advance();
      return Formula::negate(Formula::until(Formula::top(), Formula::negate(parse_unary())));
    }
    fail("unexpected identifier '" + w + "'");
  }

  int resolve(const std::string& name, bool input) {
    if (open_) return input ? open_->add_input(name) : open_->add_output(name);
    int idx = input ? ab_->input_index(name) : ab_->output_index(name);
    if (idx < 0) fail(std::string("unknown ") + (input ? "input" : "output") + " symbol '" + name + "'");
    return idx;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token tok_;
  const Alphabet* ab_;
  Alphabet* open_;
};

}  // namespace detail

/// Parses a formula; atoms must belong to the given alphabet.
inline Formula parse_formula(std::string_view text, const Alphabet& ab) {
  return detail::FormulaParser(text, &ab, nullptr).parse();
}

/// Parses a formula, adding unknown atom symbols to the alphabet.
inline Formula parse_formula_open(std::string_view text, Alphabet& ab) {
  return detail::FormulaParser(text, nullptr, &ab).parse();
}

inline std::string to_string(const Formula& f) {
  auto operand = [](const Formula& g) {
    std::string s = to_string(g);
    return arity(g.op()) == 2 ? "(" + s + ")" : s;
  };
  switch (f.op()) {
    case Op::True: return "true";
    case Op::Call: return "call";
    case Op::Ret: return "ret";
    case Op::InputAtom: return "in:" + f.name();
    case Op::OutputAtom: return "out:" + f.name();
    case Op::Not: return "!" + operand(f.child());
    case Op::Next: return "X " + operand(f.child());
    case Op::NextMu: return "Xmu " + operand(f.child());
    case Op::Prev: return "Y " + operand(f.child());
    case Op::PrevMu: return "Ymu " + operand(f.child());
    case Op::Or: return operand(f.child(0)) + " | " + operand(f.child(1));
    case Op::And: return operand(f.child(0)) + " & " + operand(f.child(1));
    case Op::UntilSummary: return operand(f.child(0)) + " Us " + operand(f.child(1));
    case Op::SinceSummary: return operand(f.child(0)) + " Ss " + operand(f.child(1));
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Semantics on finite nested words

namespace detail {

class Evaluator {
 public:
  explicit Evaluator(const NestedWord& w) : w_(w) {}

  const std::vector<char>& table(const Formula& f) {
    auto it = memo_.find(f.id());
    if (it != memo_.end()) return it->second;
    std::vector<char> t = compute(f);
    return memo_.emplace(f.id(), std::move(t)).first->second;
  }

 private:
  std::vector<char> compute(const Formula& f) {
    int n = w_.size();
    std::vector<char> t(n + 1, 0);
    switch (f.op()) {
      case Op::True:
        for (int i = 1; i <= n; ++i) t[i] = 1;
        break;
      case Op::Call:
        for (int i = 1; i <= n; ++i) t[i] = w_.is_call(i);
        break;
      case Op::Ret:
        for (int i = 1; i <= n; ++i) t[i] = w_.is_ret(i);
        break;
      case Op::InputAtom:
        for (int i = 1; i <= n; ++i) t[i] = w_.letter(i).in == f.symbol();
        break;
      case Op::OutputAtom:
        for (int i = 1; i <= n; ++i) t[i] = w_.letter(i).out == f.symbol();
        break;
      case Op::Not: {
        const auto& a = table(f.child());
        for (int i = 1; i <= n; ++i) t[i] = !a[i];
        break;
      }
      case Op::Or: {
        const auto& a = table(f.child(0));
        const auto& b = table(f.child(1));
        for (int i = 1; i <= n; ++i) t[i] = a[i] || b[i];
        break;
      }
      case Op::And: {
        const auto& a = table(f.child(0));
        const auto& b = table(f.child(1));
        for (int i = 1; i <= n; ++i) t[i] = a[i] && b[i];
        break;
      }
      case Op::Next: {
        const auto& a = table(f.child());
        for (int i = 1; i < n; ++i) t[i] = a[i + 1];
        break;
      }
      case Op::Prev: {
        const auto& a = table(f.child());
        for (int i = 2; i <= n; ++i) t[i] = a[i - 1];
        break;
      }
      case Op::NextMu: {
        const auto& a = table(f.child());
        for (int i = 1; i <= n; ++i) t[i] = w_.is_matched_call(i) && a[w_.partner(i)];
        break;
      }
      case Op::PrevMu: {
        const auto& a = table(f.child());
        for (int i = 1; i <= n; ++i) t[i] = w_.is_matched_ret(i) && a[w_.partner(i)];
        break;
      }
      case Op::UntilSummary: {
        const auto& a = table(f.child(0));
        const auto& b = table(f.child(1));
        for (int i = 1; i <= n; ++i) {
          for (int j = i; j <= n && !t[i]; ++j) {
            if (!b[j]) continue;
            auto path = summary_path(w_, i, j);
            bool ok = true;
            for (std::size_t p = 0; p + 1 < path.size() && ok; ++p) ok = a[path[p]];
            t[i] = ok;
          }
        }
        break;
      }
      case Op::SinceSummary: {
        const auto& a = table(f.child(0));
        const auto& b = table(f.child(1));
        for (int i = 1; i <= n; ++i) {
          for (int j = 1; j < i && !t[i]; ++j) {
            if (!b[j]) continue;
            auto path = summary_path(w_, j, i);
            bool ok = true;
            for (std::size_t p = 1; p < path.size() && ok; ++p) ok = a[path[p]];
            t[i] = ok;
          }
        }
        break;
      }
    }
    return t;
  }

  const NestedWord& w_;
  std::map<const void*, std::vector<char>> memo_;
};

}  // namespace detail

/// (w, i) |= f on a finite nested word. Operators whose target position does not
/// exist evaluate to false.
inline bool eval(const NestedWord& w, Position i, const Formula& f) {
  if (i < 1 || i > w.size()) throw std::out_of_range("eval position out of range");
  detail::Evaluator ev(w);
  return ev.table(f)[i];
}

/// Truth table of f over all positions of w (index 0 unused).
inline std::vector<char> eval_all(const NestedWord& w, const Formula& f) {
  detail::Evaluator ev(w);
  return ev.table(f);
}

// ---------------------------------------------------------------------------
// Closure

/// Negation with double negation collapsed.
inline Formula negate_collapsed(const Formula& f) {
  return f.op() == Op::Not ? f.child() : Formula::negate(f);
}

inline Formula strip_double_negation(Formula f) {
  while (f.op() == Op::Not && f.child().op() == Op::Not) f = f.child().child();
  return f;
}

/// Subformulas of f and their negations, plus call/ret and their negations.
inline std::set<Formula> closure(const Formula& f) {
  std::set<Formula> out;
  auto add = [&](const Formula& g) {
    Formula h = strip_double_negation(g);
    out.insert(h);
    out.insert(negate_collapsed(h));
  };
  add(Formula::call());
  add(Formula::ret());
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    add(g);
    for (const auto& k : g.children()) stack.push_back(k);
  }
  return out;
}

}  // namespace nwsynth
