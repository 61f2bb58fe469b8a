#include "rnav/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <sstream>

namespace rnav {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse_all() {
    skip();
    if (pos_ >= s_.size()) fail("empty expression");
    NodePtr e = expr();
    skip();
    if (pos_ < s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

  int arity = 0;

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static NodePtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

  static NodePtr binary(ExprNode::Op op, NodePtr a, NodePtr b) {
    ExprNode n;
    n.op = op;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make(std::move(n));
  }

  NodePtr expr() {
    NodePtr a = term();
    for (;;) {
      if (accept('+')) {
        a = binary(ExprNode::Op::kAdd, a, term());
      } else if (accept('-')) {
        a = binary(ExprNode::Op::kSub, a, term());
      } else {
        return a;
      }
    }
  }

  NodePtr term() {
    NodePtr a = unary();
    for (;;) {
      if (accept('*')) {
        a = binary(ExprNode::Op::kMul, a, unary());
      } else if (accept('/')) {
        a = binary(ExprNode::Op::kDiv, a, unary());
      } else {
        return a;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      ExprNode n;
      n.op = ExprNode::Op::kNeg;
      n.lhs = unary();
      return make(std::move(n));
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    const bool neg = accept('-');
    skip();
    const std::size_t at = pos_;
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("exponent must be an integer literal");
    long e = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      e = e * 10 + (s_[pos_++] - '0');
      if (e > 64) fail_at("exponent too large", at);
    }
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      fail("exponent must be an integer literal");
    ExprNode n;
    n.op = ExprNode::Op::kPow;
    n.index = static_cast<int>(neg ? -e : e);
    n.lhs = base;
    return make(std::move(n));
  }

  std::string identifier() {
    std::string id;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) id += s_[pos_++];
    return id;
  }

  int integer() {
    skip();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected an integer");
    int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_++] - '0');
      if (v > 1000) fail("index too large");
    }
    return v;
  }

  // block(i, j) -> 0-based inclusive range
  std::pair<int, int> block() {
    skip();
    const std::size_t at = pos_;
    if (identifier() != "block") fail_at("expected block(i, j)", at);
    expect('(');
    const int i = integer();
    expect(',');
    const int j = integer();
    expect(')');
    if (i < 1 || j < i) fail_at("block(i, j) needs 1 <= i <= j", at);
    arity = std::max(arity, j);
    return {i - 1, j - 1};
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t at = pos_;
      const std::string id = identifier();
      if (id.size() > 1 && id[0] == 'x' && id.find_first_not_of("0123456789", 1) == std::string::npos) {
        const int k = std::atoi(id.c_str() + 1);
        if (k < 1 || k > kMaxDim) fail_at("coordinate index out of range in '" + id + "'", at);
        arity = std::max(arity, k);
        ExprNode n;
        n.op = ExprNode::Op::kVar;
        n.index = k - 1;
        return make(std::move(n));
      }
      if (id == "sqrt" || id == "exp" || id == "log" || id == "sin" || id == "cos") {
        expect('(');
        ExprNode n;
        n.op = ExprNode::Op::kCall;
        n.fn = id;
        n.lhs = expr();
        if (accept(',')) fail_at("'" + id + "' takes one argument", at);
        expect(')');
        return make(std::move(n));
      }
      if (id == "dot") {
        expect('(');
        const auto [b0, b1] = block();
        expect(',');
        const auto [c0, c1] = block();
        if (accept(',')) fail_at("'dot' takes two arguments", at);
        expect(')');
        if (b1 - b0 != c1 - c0) fail_at("dot() of blocks with different lengths", at);
        ExprNode n;
        n.op = ExprNode::Op::kDot;
        n.b0 = b0;
        n.b1 = b1;
        n.c0 = c0;
        n.c1 = c1;
        return make(std::move(n));
      }
      if (id == "norm2") {
        expect('(');
        const auto [b0, b1] = block();
        if (accept(',')) fail_at("'norm2' takes one argument", at);
        expect(')');
        ExprNode n;
        n.op = ExprNode::Op::kNorm2;
        n.b0 = b0;
        n.b1 = b1;
        return make(std::move(n));
      }
      if (id == "block") fail_at("block() is only valid inside dot() or norm2()", at);
      fail_at("unknown identifier '" + id + "'", at);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    const std::string tok = s_.substr(start, pos_ - start);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.find('.') != tok.rfind('.')) fail_at("malformed number '" + tok + "'", start);
    if (!std::isfinite(v)) fail_at("number out of range '" + tok + "'", start);
    ExprNode n;
    n.op = ExprNode::Op::kNum;
    n.value = v;
    return make(std::move(n));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

void print_node(const ExprNode& n, std::ostringstream& os) {
  using Op = ExprNode::Op;
  auto bin = [&](const char* sym) {
    os << '(';
    print_node(*n.lhs, os);
    os << ' ' << sym << ' ';
    print_node(*n.rhs, os);
    os << ')';
  };
  switch (n.op) {
    case Op::kNum: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      os << buf;
      return;
    }
    case Op::kVar: os << 'x' << n.index + 1; return;
    case Op::kNeg:
      os << "(-";
      print_node(*n.lhs, os);
      os << ')';
      return;
    case Op::kAdd: bin("+"); return;
    case Op::kSub: bin("-"); return;
    case Op::kMul: bin("*"); return;
    case Op::kDiv: bin("/"); return;
    case Op::kPow:
      os << '(';
      print_node(*n.lhs, os);
      os << '^' << n.index << ')';
      return;
    case Op::kCall:
      os << n.fn << '(';
      print_node(*n.lhs, os);
      os << ')';
      return;
    case Op::kDot:
      os << "dot(block(" << n.b0 + 1 << ", " << n.b1 + 1 << "), block(" << n.c0 + 1 << ", " << n.c1 + 1 << "))";
      return;
    case Op::kNorm2: os << "norm2(block(" << n.b0 + 1 << ", " << n.b1 + 1 << "))"; return;
  }
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p(text);
  Expr e;
  e.root_ = p.parse_all();
  e.arity_ = p.arity;
  return e;
}

std::string Expr::print() const {
  std::ostringstream os;
  print_node(*root_, os);
  return os.str();
}

ScalarField Expr::to_field(int dim, std::string name) const {
  if (arity_ > dim) {
    std::ostringstream os;
    os << "expression references x" << arity_ << " but the domain has dimension " << dim;
    throw InvalidArgument(os.str());
  }
  Expr self = *this;
  return ScalarField::make(dim, [self](const auto& x) { return self.eval(x); }, name.empty() ? print() : name);
}

}  // namespace rnav
