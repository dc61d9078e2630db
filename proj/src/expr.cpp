#include "hcl/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>

namespace hcl {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Sqrt, Sin, Cos, Tan, Atan, Tanh, Abs };

struct Expr::Node {
  Op op = Op::Const;
  double c = 0.0;  // constant value or variable index
  int a = -1, b = -1;
  bool constant = false;
};

namespace {

struct FuncName {
  std::string_view name;
  Op op;
};
constexpr FuncName kFuncs[] = {{"exp", Op::Exp},   {"log", Op::Log},   {"sqrt", Op::Sqrt},
                               {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},
                               {"atan", Op::Atan}, {"tanh", Op::Tanh}, {"abs", Op::Abs}};

class Parser {
 public:
  Parser(std::string_view s, const std::vector<std::string>& names, std::vector<Expr::Node>& out)
      : s_(s), names_(names), out_(out) {}

  int parse() {
    const int r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("expression: " + what + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) +
                     "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char ch) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }
  int push(Expr::Node n) {
    if (n.op != Op::Const && n.op != Op::Var) {
      n.constant = out_[static_cast<std::size_t>(n.a)].constant &&
                   (n.b < 0 || out_[static_cast<std::size_t>(n.b)].constant);
    } else {
      n.constant = n.op == Op::Const;
    }
    out_.push_back(n);
    return static_cast<int>(out_.size()) - 1;
  }
  int binary(Op op, int a, int b) { return push({op, 0.0, a, b, false}); }

  int expr() {
    int lhs = term();
    for (;;) {
      if (eat('+')) lhs = binary(Op::Add, lhs, term());
      else if (eat('-')) lhs = binary(Op::Sub, lhs, term());
      else return lhs;
    }
  }
  int term() {
    int lhs = unary();
    for (;;) {
      if (eat('*')) lhs = binary(Op::Mul, lhs, unary());
      else if (eat('/')) lhs = binary(Op::Div, lhs, unary());
      else return lhs;
    }
  }
  int unary() {
    if (eat('-')) return push({Op::Neg, 0.0, unary(), -1, false});
    if (eat('+')) return unary();
    return power();
  }
  int power() {
    const int base = primary();
    if (eat('^')) return binary(Op::Pow, base, unary());
    return base;
  }
  int primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char ch = s_[pos_];
    if (eat('(')) {
      const int r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string_view id = s_.substr(start, pos_ - start);
      for (const auto& f : kFuncs) {
        if (f.name == id) {
          if (!eat('(')) fail("expected '(' after " + std::string(id));
          const int arg = expr();
          if (!eat(')')) fail("expected ')'");
          return push({f.op, 0.0, arg, -1, false});
        }
      }
      if (id == "pi") return push({Op::Const, std::numbers::pi, -1, -1, true});
      for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == id) return push({Op::Var, static_cast<double>(i), -1, -1, false});
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(id) + "'");
    }
    fail("unexpected '" + std::string(1, ch) + "'");
  }
  int number() {
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
    const std::string tok(s_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail("bad number '" + tok + "'");
      return push({Op::Const, v, -1, -1, true});
    } catch (const std::logic_error&) {
      fail("bad number '" + tok + "'");
    }
  }

  std::string_view s_;
  const std::vector<std::string>& names_;
  std::vector<Expr::Node>& out_;
  std::size_t pos_ = 0;
};

double eval_value(const std::vector<Expr::Node>& nodes, int i, std::span<const double> x) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::Const: return n.c;
    case Op::Var: return x[static_cast<std::size_t>(n.c)];
    default: break;
  }
  const double a = eval_value(nodes, n.a, x);
  switch (n.op) {
    case Op::Add: return a + eval_value(nodes, n.b, x);
    case Op::Sub: return a - eval_value(nodes, n.b, x);
    case Op::Mul: return a * eval_value(nodes, n.b, x);
    case Op::Div: return a / eval_value(nodes, n.b, x);
    case Op::Pow: return std::pow(a, eval_value(nodes, n.b, x));
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Log: return std::log(a);
    case Op::Sqrt: return std::sqrt(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Tan: return std::tan(a);
    case Op::Atan: return std::atan(a);
    case Op::Tanh: return std::tanh(a);
    case Op::Abs: return std::abs(a);
    default: return 0.0;
  }
}

Jet constant_jet(double v, int n) { return {v, Vec(static_cast<std::size_t>(n), 0.0), SymMatrix(n)}; }

// f(u) with f' = d1, f'' = d2.
Jet chain(const Jet& u, double f, double d1, double d2) {
  Jet r{f, u.grad, d1 * u.hess};
  for (auto& g : r.grad) g *= d1;
  if (d2 != 0.0) r.hess += d2 * SymMatrix::outer(u.grad);
  return r;
}

Jet product(const Jet& a, const Jet& b) {
  Jet r{a.value * b.value, a.grad, b.value * a.hess + a.value * b.hess};
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
  r.hess += 2.0 * SymMatrix::sym_outer(a.grad, b.grad);
  return r;
}

Jet eval_jet(const std::vector<Expr::Node>& nodes, int i, std::span<const double> x) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  const int dim = static_cast<int>(x.size());
  if (n.constant) return constant_jet(eval_value(nodes, i, x), dim);
  if (n.op == Op::Var) {
    Jet r = constant_jet(x[static_cast<std::size_t>(n.c)], dim);
    r.grad[static_cast<std::size_t>(n.c)] = 1.0;
    return r;
  }
  Jet a = eval_jet(nodes, n.a, x);
  const double u = a.value;
  switch (n.op) {
    case Op::Add:
    case Op::Sub: {
      const Jet b = eval_jet(nodes, n.b, x);
      const double s = n.op == Op::Add ? 1.0 : -1.0;
      a.value += s * b.value;
      for (std::size_t k = 0; k < a.grad.size(); ++k) a.grad[k] += s * b.grad[k];
      a.hess += s * b.hess;
      return a;
    }
    case Op::Mul: return product(a, eval_jet(nodes, n.b, x));
    case Op::Div: {
      const Jet b = eval_jet(nodes, n.b, x);
      const double v = b.value;
      return product(a, chain(b, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)));
    }
    case Op::Pow: {
      const auto& bn = nodes[static_cast<std::size_t>(n.b)];
      if (bn.constant) {
        const double c = eval_value(nodes, n.b, x);
        if (c == 0.0) return constant_jet(1.0, dim);
        if (c == 1.0) return a;
        const double d2 = c == 2.0 ? 2.0 : c * (c - 1.0) * std::pow(u, c - 2.0);
        return chain(a, std::pow(u, c), c * std::pow(u, c - 1.0), d2);
      }
      // a^b = exp(b log a)
      const Jet lg = chain(a, std::log(u), 1.0 / u, -1.0 / (u * u));
      const Jet e = product(eval_jet(nodes, n.b, x), lg);
      const double ev = std::exp(e.value);
      return chain(e, ev, ev, ev);
    }
    case Op::Neg: return chain(a, -u, -1.0, 0.0);
    case Op::Exp: {
      const double e = std::exp(u);
      return chain(a, e, e, e);
    }
    case Op::Log: return chain(a, std::log(u), 1.0 / u, -1.0 / (u * u));
    case Op::Sqrt: {
      const double s = std::sqrt(u);
      return chain(a, s, 0.5 / s, -0.25 / (s * u));
    }
    case Op::Sin: return chain(a, std::sin(u), std::cos(u), -std::sin(u));
    case Op::Cos: return chain(a, std::cos(u), -std::sin(u), -std::cos(u));
    case Op::Tan: {
      const double t = std::tan(u), s = 1.0 + t * t;
      return chain(a, t, s, 2.0 * t * s);
    }
    case Op::Atan: {
      const double q = 1.0 / (1.0 + u * u);
      return chain(a, std::atan(u), q, -2.0 * u * q * q);
    }
    case Op::Tanh: {
      const double t = std::tanh(u), s = 1.0 - t * t;
      return chain(a, t, s, -2.0 * t * s);
    }
    case Op::Abs: {
      const double sg = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
      return chain(a, std::abs(u), sg, 0.0);
    }
    default: return a;
  }
}

}  // namespace

Expr Expr::parse(std::string_view text, int n) {
  if (n < 1 || n > 8) throw InputError("expression: dimension must be in 1..8");
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  Expr e = parse(text, names);
  return e;
}

Expr Expr::parse(std::string_view text, std::vector<std::string> names) {
  // x, y, z as aliases are resolved by rewriting the names table
  std::vector<std::string> lookup = names;
  const bool indexed = !names.empty() && names[0] == "x0";
  if (indexed) {
    const char* alias[] = {"x", "y", "z"};
    for (std::size_t i = 0; i < names.size() && i < 3; ++i) lookup.push_back(alias[i]);
  }
  auto nodes = std::make_shared<std::vector<Node>>();
  Parser p(text, lookup, *nodes);
  const int root = p.parse();
  if (indexed) {
    for (auto& node : *nodes) {
      if (node.op == Op::Var && node.c >= static_cast<double>(names.size())) node.c -= static_cast<double>(names.size());
    }
  }
  Expr e;
  e.text_ = std::string(text);
  e.names_ = std::move(names);
  e.nodes_ = std::move(nodes);
  e.root_ = root;
  return e;
}

double Expr::value(std::span<const double> x) const {
  if (!nodes_) throw InputError("expression: empty");
  if (x.size() != names_.size()) throw InputError("expression: wrong number of arguments");
  return eval_value(*nodes_, root_, x);
}

Jet Expr::jet(std::span<const double> x) const {
  if (!nodes_) throw InputError("expression: empty");
  if (x.size() != names_.size()) throw InputError("expression: wrong number of arguments");
  return eval_jet(*nodes_, root_, x);
}

}  // namespace hcl
