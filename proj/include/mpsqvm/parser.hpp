#pragma once

// Reader and writer for the `.qk` kernel language:
//
//   __qpu__ NAME(AcceleratorBuffer b, double p0, ...) {
//     H 0
//     RZ(p0) 1          # angle is a literal or a declared parameter
//     CNOT 0 1
//     OTHER(b, 0.25)    # call to a previously defined kernel
//     MEASURE 0 [0]
//   }
//
// Newlines are ordinary whitespace; `#` starts a comment running to the end
// of the line.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "mpsqvm/errors.hpp"
#include "mpsqvm/ir.hpp"

namespace mpsqvm {

struct SourceUnit {
  std::string text;
  std::vector<CompositeInstruction> kernels;

  const CompositeInstruction* find(std::string_view name) const {
    for (const auto& k : kernels) {
      if (k.name == name) return &k;
    }
    return nullptr;
  }

  const CompositeInstruction& kernel(std::string_view name) const {
    if (const auto* k = find(name)) return *k;
    throw Error("no kernel named '" + std::string(name) + "'");
  }

  /// Structural equality over the kernels; the source text is not compared.
  friend bool operator==(const SourceUnit& a, const SourceUnit& b) { return a.kernels == b.kernels; }
};

namespace detail {

enum class TokenKind { Ident, Number, LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma, End };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

inline std::string_view describe(TokenKind k) {
  switch (k) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({TokenKind::End, {}, line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    const std::size_t start = pos_, line = line_, col = col_;
    const char c = peek();
    auto single = [&](TokenKind k) {
      advance();
      return Token{k, src_.substr(start, 1), line, col};
    };
    switch (c) {
      case '(': return single(TokenKind::LParen);
      case ')': return single(TokenKind::RParen);
      case '{': return single(TokenKind::LBrace);
      case '}': return single(TokenKind::RBrace);
      case '[': return single(TokenKind::LBracket);
      case ']': return single(TokenKind::RBracket);
      case ',': return single(TokenKind::Comma);
      default: break;
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(peek())) advance();
      return {TokenKind::Ident, src_.substr(start, pos_ - start), line, col};
    }
    if (is_digit(c) || c == '.' || c == '-' || c == '+') return number(start, line, col);
    throw ParseError(std::string("unexpected character ") + printable(c), line, col);
  }

  // [+-]? (digits [. digits?] | . digits) ([eE] [+-]? digits)?
  Token number(std::size_t start, std::size_t line, std::size_t col) {
    if (peek() == '-' || peek() == '+') advance();
    std::size_t mantissa_digits = 0;
    while (is_digit(peek())) {
      advance();
      ++mantissa_digits;
    }
    if (peek() == '.') {
      advance();
      while (is_digit(peek())) {
        advance();
        ++mantissa_digits;
      }
    }
    if (mantissa_digits == 0) throw ParseError("malformed number", line, col);
    if (peek() == 'e' || peek() == 'E') {
      advance();
      if (peek() == '-' || peek() == '+') advance();
      if (!is_digit(peek())) throw ParseError("malformed exponent", line_, col_);
      while (is_digit(peek())) advance();
    }
    if (is_ident_char(peek()) || peek() == '.') {
      throw ParseError("malformed number", line, col);
    }
    return {TokenKind::Number, src_.substr(start, pos_ - start), line, col};
  }

  static std::string printable(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x20 && u < 0x7f) return std::string("'") + c + "'";
    static constexpr char hex[] = "0123456789abcdef";
    return std::string("0x") + hex[u >> 4] + hex[u & 0xf];
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(Lexer(src).run()) {}

  std::vector<CompositeInstruction> run() {
    std::vector<CompositeInstruction> kernels;
    while (peek().kind != TokenKind::End) {
      CompositeInstruction k = kernel(kernels);
      for (const auto& existing : kernels) {
        if (existing.name == k.name) {
          throw ParseError("duplicate kernel name '" + k.name + "'", name_token_.line,
                           name_token_.column);
        }
      }
      kernels.push_back(std::move(k));
    }
    return kernels;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }

  const Token& take() {
    const Token& t = tokens_[pos_];
    if (t.kind != TokenKind::End) ++pos_;
    return t;
  }

  [[noreturn]] static void fail(const std::string& what, const Token& at) {
    throw ParseError(what, at.line, at.column);
  }

  const Token& expect(TokenKind k) {
    const Token& t = take();
    if (t.kind != k) {
      fail("expected " + std::string(describe(k)) + ", found " + found(t), t);
    }
    return t;
  }

  void expect_word(std::string_view word) {
    const Token& t = take();
    if (t.kind != TokenKind::Ident || t.text != word) {
      fail("expected '" + std::string(word) + "', found " + found(t), t);
    }
  }

  static std::string found(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    return "'" + std::string(t.text) + "'";
  }

  CompositeInstruction kernel(const std::vector<CompositeInstruction>& defined) {
    expect_word("__qpu__");
    name_token_ = expect(TokenKind::Ident);
    CompositeInstruction k;
    k.name = std::string(name_token_.text);
    expect(TokenKind::LParen);
    expect_word("AcceleratorBuffer");
    const Token& buffer = expect(TokenKind::Ident);
    while (peek().kind == TokenKind::Comma) {
      take();
      expect_word("double");
      const Token& p = expect(TokenKind::Ident);
      std::string name(p.text);
      if (name == buffer.text ||
          std::find(k.formal_params.begin(), k.formal_params.end(), name) != k.formal_params.end()) {
        fail("duplicate parameter name '" + name + "'", p);
      }
      k.formal_params.push_back(std::move(name));
    }
    expect(TokenKind::RParen);
    expect(TokenKind::LBrace);
    while (peek().kind != TokenKind::RBrace) {
      if (peek().kind == TokenKind::End) fail("unterminated kernel '" + k.name + "'", peek());
      statement(k, defined);
    }
    take();
    return k;
  }

  void statement(CompositeInstruction& k, const std::vector<CompositeInstruction>& defined) {
    const Token& head = expect(TokenKind::Ident);
    const auto kind = gate_from_name(head.text);
    if (!kind) {
      if (peek().kind != TokenKind::LParen) fail("unknown gate '" + std::string(head.text) + "'", head);
      k.add(call(head, k, defined));
      return;
    }
    Instruction inst;
    inst.kind = *kind;
    if (gate_param_count(*kind) > 0) {
      expect(TokenKind::LParen);
      inst.params.push_back(expression(k));
      expect(TokenKind::RParen);
    } else if (peek().kind == TokenKind::LParen) {
      fail(std::string(gate_name(*kind)) + " takes no angle parameter", peek());
    }
    for (std::size_t i = 0; i < gate_arity(*kind); ++i) inst.qubits.push_back(index(expect(TokenKind::Number)));
    if (inst.qubits.size() == 2 && inst.qubits[0] == inst.qubits[1]) {
      fail(std::string(gate_name(*kind)) + " qubits must be distinct", head);
    }
    if (*kind == GateKind::MEASURE && peek().kind == TokenKind::LBracket) {
      take();
      inst.classical_target = index(expect(TokenKind::Number));
      expect(TokenKind::RBracket);
    }
    k.add(std::move(inst));
  }

  CompositeInstruction call(const Token& head, const CompositeInstruction& caller,
                            const std::vector<CompositeInstruction>& defined) {
    const CompositeInstruction* callee = nullptr;
    for (const auto& d : defined) {
      if (d.name == head.text) callee = &d;
    }
    if (!callee) fail("call to undefined kernel '" + std::string(head.text) + "'", head);
    expect(TokenKind::LParen);
    expect(TokenKind::Ident);  // buffer, ignored
    std::vector<Parameter> args;
    while (peek().kind == TokenKind::Comma) {
      take();
      args.push_back(expression(caller));
    }
    expect(TokenKind::RParen);
    if (args.size() != callee->formal_params.size()) {
      fail("kernel '" + callee->name + "' expects " + std::to_string(callee->formal_params.size()) +
               " argument(s), got " + std::to_string(args.size()),
           head);
    }
    CompositeInstruction child = *callee;
    child.args = std::move(args);
    return child;
  }

  Parameter expression(const CompositeInstruction& k) {
    const Token& t = take();
    if (t.kind == TokenKind::Number) {
      double v = 0.0;
      const char* first = t.text.data();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, t.text.data() + t.text.size(), v);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail("number out of range", t);
      return Parameter(v);
    }
    if (t.kind == TokenKind::Ident) {
      std::string name(t.text);
      if (std::find(k.formal_params.begin(), k.formal_params.end(), name) == k.formal_params.end()) {
        fail("unknown parameter '" + name + "'", t);
      }
      return Parameter(std::move(name));
    }
    fail("expected number or parameter name, found " + found(t), t);
  }

  static std::size_t index(const Token& t) {
    for (char c : t.text) {
      if (c < '0' || c > '9') fail("expected a non-negative integer index, found '" + std::string(t.text) + "'", t);
    }
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) fail("index out of range", t);
    return v;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Token name_token_{TokenKind::End, {}, 0, 0};
};

inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, ptr);
  // Keep literals recognisable as reals.
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

inline std::string format_parameter(const Parameter& p) {
  return p.is_bound() ? format_number(p.value()) : p.name();
}

inline void unparse_kernel(const CompositeInstruction& k, std::string& out) {
  // The buffer name is not kept in the IR; pick one no parameter uses.
  std::string buffer = "b";
  while (std::find(k.formal_params.begin(), k.formal_params.end(), buffer) != k.formal_params.end()) buffer += "_";
  out += "__qpu__ " + k.name + "(AcceleratorBuffer " + buffer;
  for (const auto& p : k.formal_params) out += ", double " + p;
  out += ") {\n";
  for (const Node& child : k.children) {
    out += "  ";
    if (const auto* inst = std::get_if<Instruction>(&child)) {
      out += gate_name(inst->kind);
      if (!inst->params.empty()) out += "(" + format_parameter(inst->params[0]) + ")";
      for (std::size_t q : inst->qubits) out += " " + std::to_string(q);
      if (inst->classical_target) out += " [" + std::to_string(*inst->classical_target) + "]";
    } else {
      const CompositeInstruction& call = *std::get<Box<CompositeInstruction>>(child);
      out += call.name + "(" + buffer;
      for (const auto& a : call.args) out += ", " + format_parameter(a);
      out += ")";
    }
    out += "\n";
  }
  out += "}\n";
}

}  // namespace detail

/// Parses zero or more kernels. Throws ParseError carrying line and column.
inline SourceUnit parse(std::string_view text) {
  SourceUnit unit;
  unit.kernels = detail::Parser(text).run();
  unit.text = std::string(text);
  return unit;
}

/// Canonical source text; parse(unparse(u)) == u.
inline std::string unparse(const SourceUnit& unit) {
  std::string out;
  for (std::size_t i = 0; i < unit.kernels.size(); ++i) {
    if (i) out += "\n";
    detail::unparse_kernel(unit.kernels[i], out);
  }
  return out;
}

}  // namespace mpsqvm
