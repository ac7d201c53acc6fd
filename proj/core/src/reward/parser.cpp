#include "archie/reward/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <set>
#include <string>

#include "archie/common/error.hpp"

namespace archie::reward {
namespace {

enum class Tok {
  kIdent,
  kNumber,
  kLParen,
  kRParen,
  kComma,
  kColon,
  kPlus,
  kMinus,
  kStar,
  kLt,
  kLe,
  kGt,
  kGe,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (ident_start(c)) {
        t.kind = Tok::kIdent;
        t.text = identifier();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        t.kind = Tok::kNumber;
        t.text = number_text();
        t.number = std::strtod(t.text.c_str(), nullptr);
      } else {
        t.kind = punct(c, t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ErrorCode::kSyntax, msg, line_, col_);
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

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string identifier() {
    std::string out;
    for (;;) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) {
        out += src_[pos_];
        advance();
      }
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' && ident_start(src_[pos_ + 1])) {
        out += '.';
        advance();
        continue;
      }
      return out;
    }
  }

  std::string number_text() {
    std::string out;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        out += src_[pos_];
        advance();
      }
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      out += '.';
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      out += 'e';
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        out += src_[pos_];
        advance();
      }
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        fail("malformed exponent in numeric literal");
      }
      digits();
    }
    if (pos_ < src_.size() && ident_start(src_[pos_])) fail("malformed numeric literal");
    return out;
  }

  Tok punct(char c, Token& t) {
    t.text = std::string(1, c);
    advance();
    switch (c) {
      case '(': return Tok::kLParen;
      case ')': return Tok::kRParen;
      case ',': return Tok::kComma;
      case ':': return Tok::kColon;
      case '+': return Tok::kPlus;
      case '-': return Tok::kMinus;
      case '*': return Tok::kStar;
      case '<':
      case '>': {
        const bool eq = pos_ < src_.size() && src_[pos_] == '=';
        if (eq) {
          t.text += '=';
          advance();
        }
        if (c == '<') return eq ? Tok::kLe : Tok::kLt;
        return eq ? Tok::kGe : Tok::kGt;
      }
      default:
        --col_;
        fail(std::string("unexpected character '") + c + "'");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Words that can never name a variable. Function names are only special when
// followed by '(' so that `component dist: ...` stays legal.
bool reserved_word(std::string_view w) {
  return w == "and" || w == "or" || w == "not" || w == "component" || w == "success" ||
         w == "failure";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  RewardSpec spec() {
    RewardSpec out;
    std::set<std::string> names;
    while (is_word("component")) {
      take();
      const Token name = expect(Tok::kIdent, "component name");
      if (name.text.find('.') != std::string::npos) {
        fail_at(name, "component names cannot contain '.'");
      }
      if (reserved_word(name.text)) fail_at(name, "'" + name.text + "' is a reserved word");
      if (!names.insert(name.text).second) {
        throw ParseError(ErrorCode::kDuplicateComponent,
                         "duplicate component name '" + name.text + "'", name.line, name.column);
      }
      expect(Tok::kColon, "':' after component name");
      out.components.push_back({name.text, expr()});
    }
    if (!is_word("success")) {
      if (peek().kind == Tok::kEnd || is_word("failure")) {
        throw ParseError(ErrorCode::kMissingSuccess, "program has no 'success:' block",
                         peek().line, peek().column);
      }
      fail_at(peek(), "expected 'component' or 'success:', found '" + peek().text + "'");
    }
    if (out.components.empty()) fail_at(peek(), "program needs at least one component");
    take();
    expect(Tok::kColon, "':' after success");
    out.success.expr = expr();
    if (is_word("failure")) {
      take();
      expect(Tok::kColon, "':' after failure");
      out.failure = Classifier{expr()};
    }
    if (peek().kind != Tok::kEnd) {
      if (is_word("component")) fail_at(peek(), "components must precede the success block");
      if (is_word("success")) fail_at(peek(), "duplicate success block");
      if (is_word("failure")) fail_at(peek(), "duplicate failure block");
      fail_at(peek(), "unexpected '" + peek().text + "' after end of expression");
    }
    return out;
  }

  Expr single_expr() {
    Expr e = expr();
    if (peek().kind != Tok::kEnd) fail_at(peek(), "trailing input '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is_word(std::string_view w) const {
    return peek().kind == Tok::kIdent && peek().text == w;
  }

  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
    throw ParseError(ErrorCode::kSyntax, msg, t.line, t.column);
  }

  Token expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      const std::string found = peek().kind == Tok::kEnd ? "end of input" : "'" + peek().text + "'";
      fail_at(peek(), std::string("expected ") + what + ", found " + found);
    }
    return take();
  }

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (is_word("or")) {
      take();
      lhs = Expr::binary(NodeKind::kOr, std::move(lhs), and_expr());
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (is_word("and")) {
      take();
      lhs = Expr::binary(NodeKind::kAnd, std::move(lhs), not_expr());
    }
    return lhs;
  }

  Expr not_expr() {
    if (is_word("not")) {
      take();
      return Expr::unary(NodeKind::kNot, not_expr());
    }
    return cmp_expr();
  }

  Expr cmp_expr() {
    Expr lhs = add_expr();
    CmpOp op;
    switch (peek().kind) {
      case Tok::kLt: op = CmpOp::kLt; break;
      case Tok::kLe: op = CmpOp::kLe; break;
      case Tok::kGt: op = CmpOp::kGt; break;
      case Tok::kGe: op = CmpOp::kGe; break;
      default: return lhs;
    }
    take();
    Expr out = Expr::compare(op, std::move(lhs), add_expr());
    switch (peek().kind) {
      case Tok::kLt:
      case Tok::kLe:
      case Tok::kGt:
      case Tok::kGe: fail_at(peek(), "comparisons do not chain; use 'and'");
      default: break;
    }
    return out;
  }

  Expr add_expr() {
    Expr lhs = mul_expr();
    for (;;) {
      if (peek().kind == Tok::kPlus) {
        take();
        lhs = Expr::binary(NodeKind::kAdd, std::move(lhs), mul_expr());
      } else if (peek().kind == Tok::kMinus) {
        take();
        lhs = Expr::binary(NodeKind::kSub, std::move(lhs), mul_expr());
      } else {
        return lhs;
      }
    }
  }

  Expr mul_expr() {
    Expr lhs = unary();
    while (peek().kind == Tok::kStar) {
      take();
      lhs = Expr::binary(NodeKind::kMul, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    if (peek().kind == Tok::kMinus) {
      take();
      return Expr::unary(NodeKind::kNeg, unary());
    }
    return primary();
  }

  std::vector<Expr> call_args(const Token& fn, std::size_t arity) {
    expect(Tok::kLParen, "'('");
    std::vector<Expr> args;
    if (peek().kind != Tok::kRParen) {
      args.push_back(expr());
      while (peek().kind == Tok::kComma) {
        take();
        args.push_back(expr());
      }
    }
    expect(Tok::kRParen, "')'");
    if (args.size() != arity) {
      fail_at(fn, fn.text + "() takes " + std::to_string(arity) + " arguments, got " +
                      std::to_string(args.size()));
    }
    return args;
  }

  PointRef point_ref() {
    PointRef p;
    if (peek().kind == Tok::kIdent) {
      const Token t = take();
      if (reserved_word(t.text)) fail_at(t, "'" + t.text + "' is a reserved word");
      p.group = t.text;
      return p;
    }
    if (peek().kind != Tok::kLParen) fail_at(peek(), "dist() operands are group names or (x, y) points");
    take();
    for (;;) {
      bool negative = false;
      if (peek().kind == Tok::kMinus) {
        take();
        negative = true;
      }
      const Token n = expect(Tok::kNumber, "number in point literal");
      p.coords.push_back(negative ? -n.number : n.number);
      if (peek().kind == Tok::kComma) {
        take();
        continue;
      }
      expect(Tok::kRParen, "')' closing point literal");
      return p;
    }
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber: return Expr::constant(take().number);
      case Tok::kLParen: {
        take();
        Expr inner = expr();
        expect(Tok::kRParen, "')'");
        return inner;
      }
      case Tok::kIdent: break;
      default: fail_at(t, t.kind == Tok::kEnd ? "expected expression, found end of input"
                                              : "expected expression, found '" + t.text + "'");
    }
    const bool call = peek(1).kind == Tok::kLParen;
    if (call) {
      const Token fn = take();
      if (fn.text == "min" || fn.text == "max") {
        auto args = call_args(fn, 2);
        return Expr::binary(fn.text == "min" ? NodeKind::kMin : NodeKind::kMax,
                            std::move(args[0]), std::move(args[1]));
      }
      if (fn.text == "abs") return Expr::unary(NodeKind::kAbs, std::move(call_args(fn, 1)[0]));
      if (fn.text == "clamp") {
        auto args = call_args(fn, 3);
        return Expr::clamp(std::move(args[0]), std::move(args[1]), std::move(args[2]));
      }
      if (fn.text == "dist") {
        expect(Tok::kLParen, "'('");
        PointRef a = point_ref();
        expect(Tok::kComma, "',' between dist() operands");
        PointRef b = point_ref();
        expect(Tok::kRParen, "')'");
        return Expr::dist(std::move(a), std::move(b));
      }
      fail_at(fn, "unknown function '" + fn.text + "'");
    }
    if (reserved_word(t.text)) fail_at(t, "'" + t.text + "' is a reserved word");
    return Expr::var(take().text);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

RewardSpec parse_reward_spec(std::string_view text) { return Parser(text).spec(); }

Expr parse_expr(std::string_view text) { return Parser(text).single_expr(); }

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  bool at_start = true;
  for (char c : name) {
    if (at_start) {
      if (!ident_start(c)) return false;
      at_start = false;
    } else if (c == '.') {
      at_start = true;
    } else if (!ident_char(c)) {
      return false;
    }
  }
  return !at_start && !reserved_word(name);
}

}  // namespace archie::reward
