#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rnav/field.hpp"

namespace rnav {

// Scalar expressions over chart/ambient coordinates x1..xn.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | xK | '(' expr ')' | fn '(' expr ')'
//            | 'dot' '(' block ',' block ')' | 'norm2' '(' block ')'
//   block   := 'block' '(' i ',' j ')'      coordinates x_i..x_j, 1-based
//   fn      := sqrt | exp | log | sin | cos
struct ExprNode {
  enum class Op { kNum, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall, kDot, kNorm2 };
  Op op = Op::kNum;
  double value = 0.0;           // kNum
  int index = 0;                // kVar (0-based), kPow exponent
  std::string fn;               // kCall
  int b0 = 0, b1 = 0, c0 = 0, c1 = 0;  // kDot / kNorm2 blocks (0-based, inclusive)
  std::shared_ptr<const ExprNode> lhs, rhs;
};

class Expr {
 public:
  // Throws ParseError with line and column.
  static Expr parse(const std::string& text);

  // Fully parenthesized; parse(print()) prints identically.
  std::string print() const;

  // Number of coordinates referenced (largest index, 1-based).
  int arity() const { return arity_; }

  template <class T>
  T eval(const Vec<T>& x) const {
    if (x.size() < arity_) throw InvalidArgument("expression needs at least " + std::to_string(arity_) + " coordinates");
    return eval_node(*root_, x);
  }

  // Field on R^dim; dim must cover every referenced coordinate.
  ScalarField to_field(int dim, std::string name = {}) const;

  const ExprNode& root() const { return *root_; }

 private:
  template <class T>
  static T eval_node(const ExprNode& n, const Vec<T>& x) {
    using Op = ExprNode::Op;
    switch (n.op) {
      case Op::kNum: return T(n.value);
      case Op::kVar: return x[n.index];
      case Op::kNeg: return -eval_node(*n.lhs, x);
      case Op::kAdd: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
      case Op::kSub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
      case Op::kMul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
      case Op::kDiv: return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
      case Op::kPow: return ipow(eval_node(*n.lhs, x), n.index);
      case Op::kCall: {
        const T a = eval_node(*n.lhs, x);
        if (n.fn == "sqrt") return sqrt(a);
        if (n.fn == "exp") return exp(a);
        if (n.fn == "log") return log(a);
        if (n.fn == "sin") return sin(a);
        return cos(a);
      }
      case Op::kDot: {
        T s(0.0);
        for (int k = 0; k <= n.b1 - n.b0; ++k) s += x[n.b0 + k] * x[n.c0 + k];
        return s;
      }
      case Op::kNorm2: {
        T s(0.0);
        for (int k = n.b0; k <= n.b1; ++k) s += x[k] * x[k];
        return s;
      }
    }
    return T(0.0);
  }

  std::shared_ptr<const ExprNode> root_;
  int arity_ = 0;
};

}  // namespace rnav
