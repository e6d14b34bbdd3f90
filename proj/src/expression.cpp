#include "ineq/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "ineq/errors.hpp"

namespace ineq {

struct Expression::Node {
  enum class Kind { number, variable, negate, binary, call };
  Kind kind;
  double number = 0.0;
  int var_index = 0;
  char op = 0;
  std::string fn;
  std::vector<NodePtr> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::number;
  n->number = v;
  return n;
}
NodePtr make_variable(int idx) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::variable;
  n->var_index = idx;
  return n;
}
NodePtr make_negate(NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::negate;
  n->args = {std::move(a)};
  return n;
}
NodePtr make_binary(char op, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->op = op;
  n->args = {std::move(l), std::move(r)};
  return n;
}
NodePtr make_call(std::string fn, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::call;
  n->fn = std::move(fn);
  n->args = std::move(args);
  return n;
}

int call_arity(const std::string& fn) {
  if (fn == "exp" || fn == "log" || fn == "sin" || fn == "cos" || fn == "abs" ||
      fn == "sqrt")
    return 1;
  if (fn == "min" || fn == "max") return 2;
  return -1;
}

class Parser {
 public:
  Parser(const std::string& src, int arity) : src_(src), arity_(arity) {}

  NodePtr run() {
    if (src_.find_first_not_of(" \t\r\n") == std::string::npos)
      throw ParseError("empty expression", 0, "expression");
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError("trailing input", pos_, "end of input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      lhs = make_binary(c, std::move(lhs), term());
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      lhs = make_binary(c, std::move(lhs), unary());
    }
  }

  NodePtr unary() {
    if (consume('-')) return make_negate(unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (consume('^')) return make_binary('^', std::move(base), unary());
    return base;
  }

  NodePtr primary() {
    char c = peek();
    std::size_t at = pos_;
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!consume(')')) throw ParseError("unbalanced parenthesis", pos_, "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) throw ParseError("bad number", at, "number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make_number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        id += src_[pos_++];
      int nargs = call_arity(id);
      if (nargs > 0) {
        if (!consume('(')) throw ParseError("call needs arguments", pos_, "'('");
        std::vector<NodePtr> args;
        args.push_back(expr());
        while (static_cast<int>(args.size()) < nargs) {
          if (!consume(',')) throw ParseError("missing argument", pos_, "','");
          args.push_back(expr());
        }
        if (!consume(')')) throw ParseError("unbalanced call", pos_, "')'");
        return make_call(id, std::move(args));
      }
      return variable(id, at);
    }
    throw ParseError("unexpected character", at,
                     "number, variable, call or '('");
  }

  NodePtr variable(const std::string& id, std::size_t at) {
    if (id == "x") {
      if (arity_ != 1)
        throw ArityError("variable 'x' is only valid for arity 1");
      return make_variable(0);
    }
    if (id.size() >= 2 && id[0] == 'x') {
      for (std::size_t i = 1; i < id.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(id[i])))
          throw ParseError("unknown identifier '" + id + "'", at,
                           "variable or function name");
      int idx = std::atoi(id.c_str() + 1);
      if (idx < 1 || idx > arity_)
        throw ArityError("variable '" + id + "' outside arity " +
                         std::to_string(arity_));
      return make_variable(idx - 1);
    }
    throw ParseError("unknown identifier '" + id + "'", at,
                     "variable or function name");
  }

  const std::string& src_;
  int arity_;
  std::size_t pos_ = 0;
};

// Evaluation shares one code path for values and directional derivatives.
struct Dual {
  double v = 0.0, d = 0.0;
};

Dual dual_eval(const Node& n, std::span<const double> x, int dir) {
  switch (n.kind) {
    case Node::Kind::number:
      return {n.number, 0.0};
    case Node::Kind::variable:
      return {x[static_cast<std::size_t>(n.var_index)],
              n.var_index == dir ? 1.0 : 0.0};
    case Node::Kind::negate: {
      Dual a = dual_eval(*n.args[0], x, dir);
      return {-a.v, -a.d};
    }
    case Node::Kind::binary: {
      Dual l = dual_eval(*n.args[0], x, dir);
      Dual r = dual_eval(*n.args[1], x, dir);
      switch (n.op) {
        case '+':
          return {l.v + r.v, l.d + r.d};
        case '-':
          return {l.v - r.v, l.d - r.d};
        case '*':
          return {l.v * r.v, l.d * r.v + l.v * r.d};
        case '/':
          return {l.v / r.v, (l.d * r.v - l.v * r.d) / (r.v * r.v)};
        case '^': {
          double v = std::pow(l.v, r.v);
          if (r.d == 0.0) {
            double d = l.d == 0.0 ? 0.0 : r.v * std::pow(l.v, r.v - 1.0) * l.d;
            return {v, d};
          }
          return {v, v * (r.d * std::log(l.v) + r.v * l.d / l.v)};
        }
      }
      return {};
    }
    case Node::Kind::call: {
      Dual a = dual_eval(*n.args[0], x, dir);
      if (n.fn == "exp") {
        double e = std::exp(a.v);
        return {e, e * a.d};
      }
      if (n.fn == "log") return {std::log(a.v), a.d / a.v};
      if (n.fn == "sin") return {std::sin(a.v), std::cos(a.v) * a.d};
      if (n.fn == "cos") return {std::cos(a.v), -std::sin(a.v) * a.d};
      if (n.fn == "sqrt") {
        double s = std::sqrt(a.v);
        return {s, a.d / (2.0 * s)};
      }
      if (n.fn == "abs")
        return {std::abs(a.v), a.v > 0.0 ? a.d : (a.v < 0.0 ? -a.d : 0.0)};
      Dual b = dual_eval(*n.args[1], x, dir);
      if (n.fn == "min") return a.v <= b.v ? a : b;
      return a.v >= b.v ? a : b;  // max
    }
  }
  return {};
}

int node_prec(const Node& n) {
  switch (n.kind) {
    case Node::Kind::binary:
      if (n.op == '+' || n.op == '-') return 1;
      if (n.op == '*' || n.op == '/') return 2;
      return 4;  // '^'
    case Node::Kind::negate:
      return 3;
    default:
      return 5;
  }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int parent_prec, bool needs_paren_on_tie,
                 std::string& out) {
  bool paren = node_prec(child) < parent_prec ||
               (needs_paren_on_tie && node_prec(child) == parent_prec);
  if (paren) out += '(';
  print_node(child, out);
  if (paren) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::number: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", n.number);
      out += buf;
      return;
    }
    case Node::Kind::variable:
      out += "x" + std::to_string(n.var_index + 1);
      return;
    case Node::Kind::negate:
      out += '-';
      print_child(*n.args[0], 3, false, out);
      return;
    case Node::Kind::binary: {
      int prec = node_prec(n);
      if (n.op == '^') {
        // Right-associative: parenthesize a '^' (or tighter-tie) left child.
        print_child(*n.args[0], prec, true, out);
        out += '^';
        print_child(*n.args[1], prec, false, out);
        return;
      }
      bool tie_right = n.op == '-' || n.op == '/';
      print_child(*n.args[0], prec, false, out);
      out += ' ';
      out += n.op;
      out += ' ';
      print_child(*n.args[1], prec, tie_right, out);
      return;
    }
    case Node::Kind::call: {
      out += n.fn;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace

Expression::Expression(NodePtr root, int arity, std::string source)
    : root_(std::move(root)), arity_(arity), source_(std::move(source)) {}

double Expression::value(std::span<const double> x) const {
  return dual_eval(*root_, x, -1).v;
}

std::vector<double> Expression::gradient(std::span<const double> x) const {
  std::vector<double> g(static_cast<std::size_t>(arity_));
  for (int j = 0; j < arity_; ++j) g[j] = dual_eval(*root_, x, j).d;
  return g;
}

Expression parse_expression(const std::string& src, int arity) {
  if (arity < 1) throw DomainError("expression arity must be >= 1");
  Parser p(src, arity);
  return Expression(p.run(), arity, src);
}

std::string print_expression(const Expression& e) {
  std::string out;
  print_node(*e.root(), out);
  return out;
}

TestFunction expression_fn(const Expression& e) {
  TestFunction f;
  f.arity = e.arity();
  f.label = print_expression(e);
  f.eval = [e](std::span<const double> x) { return e.value(x); };
  f.gradient = [e](std::span<const double> x) { return e.gradient(x); };
  return f;
}

TestFunction parse_fn(const std::string& src, int arity) {
  return expression_fn(parse_expression(src, arity));
}

}  // namespace ineq
