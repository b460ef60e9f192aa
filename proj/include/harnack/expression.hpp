/* Copyright (C) 2026 The harnack-lab authors
 * This program is Licensed under the Apache License, Version 2.0
 * (the "License"); you may not use this file except in compliance
 * with the License. You may obtain a copy of the License at
 *   http://www.apache.org/licenses/LICENSE-2.0
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. See accompanying LICENSE file.
 */
/* expression.hpp - tiny arithmetic language over (t, x1, x2, u) used for
 * user supplied coefficients. Grammar:
 *   expr   := term (('+'|'-') term)*
 *   term   := unary (('*'|'/') unary)*
 *   unary  := '-' unary | atom
 *   atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"

namespace harnack {

struct ExprVars {
  double t = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double u = 0.0;
};

class Expression {
 public:
  Expression() = default;
  explicit Expression(const std::string& src) : src_(src) {
    Parser p{src, 0};
    root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size())
      throw ParseError("unexpected '" + std::string(1, src[p.pos]) +
                           "' in expression '" + src + "'",
                       0);
  }

  double operator()(const ExprVars& v) const { return eval(*root_, v); }
  double operator()(double t, double x1, double x2, double u) const {
    return eval(*root_, ExprVars{t, x1, x2, u});
  }
  const std::string& source() const { return src_; }
  bool empty() const { return !root_; }

 private:
  enum class Op { Num, T, X1, X2, U, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Abs, Min, Max };
  struct Node {
    Op op;
    double value = 0.0;
    std::vector<std::shared_ptr<const Node>> kids;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr make(Op op, std::vector<NodePtr> kids = {}, double v = 0.0) {
    return std::make_shared<const Node>(Node{op, v, std::move(kids)});
  }

  static double eval(const Node& n, const ExprVars& v) {
    switch (n.op) {
      case Op::Num: return n.value;
      case Op::T: return v.t;
      case Op::X1: return v.x1;
      case Op::X2: return v.x2;
      case Op::U: return v.u;
      case Op::Add: return eval(*n.kids[0], v) + eval(*n.kids[1], v);
      case Op::Sub: return eval(*n.kids[0], v) - eval(*n.kids[1], v);
      case Op::Mul: return eval(*n.kids[0], v) * eval(*n.kids[1], v);
      case Op::Div: return eval(*n.kids[0], v) / eval(*n.kids[1], v);
      case Op::Neg: return -eval(*n.kids[0], v);
      case Op::Sin: return std::sin(eval(*n.kids[0], v));
      case Op::Cos: return std::cos(eval(*n.kids[0], v));
      case Op::Exp: return std::exp(eval(*n.kids[0], v));
      case Op::Abs: return std::abs(eval(*n.kids[0], v));
      case Op::Min: return std::min(eval(*n.kids[0], v), eval(*n.kids[1], v));
      case Op::Max: return std::max(eval(*n.kids[0], v), eval(*n.kids[1], v));
    }
    return 0.0;
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw ParseError(what + " at offset " + std::to_string(pos) +
                           " in expression '" + s + "'",
                       0);
    }
    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr parse_expr() {
      NodePtr lhs = parse_term();
      for (;;) {
        if (eat('+')) lhs = make(Op::Add, {lhs, parse_term()});
        else if (eat('-')) lhs = make(Op::Sub, {lhs, parse_term()});
        else return lhs;
      }
    }
    NodePtr parse_term() {
      NodePtr lhs = parse_unary();
      for (;;) {
        if (eat('*')) lhs = make(Op::Mul, {lhs, parse_unary()});
        else if (eat('/')) lhs = make(Op::Div, {lhs, parse_unary()});
        else return lhs;
      }
    }
    NodePtr parse_unary() {
      if (eat('-')) return make(Op::Neg, {parse_unary()});
      if (eat('+')) return parse_unary();
      return parse_atom();
    }
    NodePtr parse_atom() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end");
      if (eat('(')) {
        NodePtr e = parse_expr();
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("bad number");
        pos += static_cast<std::size_t>(end - begin);
        return make(Op::Num, {}, v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
          ++pos;
        const std::string name = s.substr(start, pos - start);
        if (name == "t") return make(Op::T);
        if (name == "x" || name == "x1") return make(Op::X1);
        if (name == "x2") return make(Op::X2);
        if (name == "u") return make(Op::U);
        if (name == "pi") return make(Op::Num, {}, std::numbers::pi);
        Op op = Op::Num;
        int arity = 1;
        if (name == "sin") op = Op::Sin;
        else if (name == "cos") op = Op::Cos;
        else if (name == "exp") op = Op::Exp;
        else if (name == "abs") op = Op::Abs;
        else if (name == "min") { op = Op::Min; arity = 2; }
        else if (name == "max") { op = Op::Max; arity = 2; }
        else { pos = start; fail("unknown name '" + name + "'"); }
        if (!eat('(')) fail("expected '(' after " + name);
        std::vector<NodePtr> args{parse_expr()};
        while (eat(',')) args.push_back(parse_expr());
        if (!eat(')')) fail("expected ')'");
        if (static_cast<int>(args.size()) != arity)
          fail(name + " takes " + std::to_string(arity) + " argument(s)");
        return make(op, std::move(args));
      }
      fail("unexpected character");
    }
  };

  std::string src_;
  NodePtr root_;
};

// 'a; b; c' -> three expressions (one per noise channel).
inline std::vector<Expression> parse_expression_list(const std::string& src) {
  std::vector<Expression> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t semi = src.find(';', start);
    const std::string part = src.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
    out.emplace_back(part);
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return out;
}

}  // namespace harnack
