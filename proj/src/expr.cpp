#include "kundt/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace kundt::expr {

struct Expr::Node {
  NodeKind kind;
  Func func = Func::Exp;
  double num = 0.0;
  std::string sym;
  std::vector<Expr> children;
};

const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Sqrt: return "sqrt";
    case Func::Arctan: return "arctan";
    case Func::Arctanh: return "arctanh";
  }
  return "?";
}

namespace {

const std::map<std::string, Func, std::less<>>& function_table() {
  static const std::map<std::string, Func, std::less<>> table = {
      {"exp", Func::Exp},     {"ln", Func::Ln},       {"sin", Func::Sin},
      {"cos", Func::Cos},     {"tan", Func::Tan},     {"sinh", Func::Sinh},
      {"cosh", Func::Cosh},   {"tanh", Func::Tanh},   {"sqrt", Func::Sqrt},
      {"arctan", Func::Arctan}, {"arctanh", Func::Arctanh},
  };
  return table;
}

}  // namespace

Expr Expr::make(NodeKind kind, Func f, double num, std::string sym,
                std::vector<Expr> children) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->func = f;
  node->num = num;
  node->sym = std::move(sym);
  node->children = std::move(children);
  return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr::Expr(double value) { *this = make(NodeKind::Number, Func::Exp, value, {}, {}); }

Expr Expr::number(double value) { return Expr(value); }

Expr Expr::symbol(std::string name) {
  return make(NodeKind::Symbol, Func::Exp, 0.0, std::move(name), {});
}

NodeKind Expr::kind() const { return node_->kind; }
bool Expr::is_number() const { return node_->kind == NodeKind::Number; }
bool Expr::is_number(double value) const {
  return is_number() && node_->num == value;
}
double Expr::number_value() const {
  assert(is_number());
  return node_->num;
}
bool Expr::is_symbol() const { return node_->kind == NodeKind::Symbol; }
const std::string& Expr::symbol_name() const { return node_->sym; }
Func Expr::func() const { return node_->func; }
const Expr& Expr::child(int i) const { return node_->children[i]; }
int Expr::child_count() const { return static_cast<int>(node_->children.size()); }

bool Expr::same_tree(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (node_->kind != other.node_->kind) return false;
  switch (node_->kind) {
    case NodeKind::Number:
      return node_->num == other.node_->num;
    case NodeKind::Symbol:
      return node_->sym == other.node_->sym;
    case NodeKind::Apply:
      if (node_->func != other.node_->func) return false;
      break;
    default:
      break;
  }
  if (node_->children.size() != other.node_->children.size()) return false;
  for (std::size_t i = 0; i < node_->children.size(); ++i)
    if (!node_->children[i].same_tree(other.node_->children[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Folding constructors

Expr operator-(const Expr& a) {
  if (a.is_number()) return Expr(-a.number_value());
  if (a.kind() == NodeKind::Neg) return a.child(0);
  return Expr::make(NodeKind::Neg, Func::Exp, 0.0, {}, {a});
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_number(0.0)) return b;
  if (b.is_number(0.0)) return a;
  if (a.is_number() && b.is_number()) return Expr(a.number_value() + b.number_value());
  if (b.kind() == NodeKind::Neg) return a - b.child(0);
  return Expr::make(NodeKind::Add, Func::Exp, 0.0, {}, {a, b});
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_number(0.0)) return a;
  if (a.is_number() && b.is_number()) return Expr(a.number_value() - b.number_value());
  if (a.is_number(0.0)) return -b;
  if (b.kind() == NodeKind::Neg) return a + b.child(0);
  if (a.same_tree(b)) return Expr(0.0);
  return Expr::make(NodeKind::Sub, Func::Exp, 0.0, {}, {a, b});
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_number(0.0) || b.is_number(0.0)) return Expr(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  if (a.is_number() && b.is_number()) return Expr(a.number_value() * b.number_value());
  if (a.is_number(-1.0)) return -b;
  if (b.is_number(-1.0)) return -a;
  // collect constants through nested products
  if (a.is_number() && b.kind() == NodeKind::Mul && b.child(0).is_number())
    return Expr(a.number_value() * b.child(0).number_value()) * b.child(1);
  if (b.is_number() && a.kind() == NodeKind::Mul && a.child(0).is_number())
    return Expr(a.child(0).number_value() * b.number_value()) * a.child(1);
  return Expr::make(NodeKind::Mul, Func::Exp, 0.0, {}, {a, b});
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_number(0.0) && !b.is_number(0.0)) return Expr(0.0);
  if (b.is_number(1.0)) return a;
  if (a.is_number() && b.is_number() && b.number_value() != 0.0)
    return Expr(a.number_value() / b.number_value());
  if (b.is_number(-1.0)) return -a;
  return Expr::make(NodeKind::Div, Func::Exp, 0.0, {}, {a, b});
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_number(0.0)) return Expr(1.0);
  if (exponent.is_number(1.0)) return base;
  if (base.is_number(1.0)) return Expr(1.0);
  if (base.is_number() && exponent.is_number()) {
    double v = std::pow(base.number_value(), exponent.number_value());
    if (std::isfinite(v)) return Expr(v);
  }
  return Expr::make(NodeKind::Pow, Func::Exp, 0.0, {}, {base, exponent});
}

Expr apply(Func f, const Expr& arg) {
  if (arg.is_number()) {
    double x = arg.number_value();
    double v = 0.0;
    bool ok = true;
    switch (f) {
      case Func::Exp: v = std::exp(x); break;
      case Func::Ln: ok = x > 0.0; v = ok ? std::log(x) : 0.0; break;
      case Func::Sin: v = std::sin(x); break;
      case Func::Cos: v = std::cos(x); break;
      case Func::Tan: v = std::tan(x); break;
      case Func::Sinh: v = std::sinh(x); break;
      case Func::Cosh: v = std::cosh(x); break;
      case Func::Tanh: v = std::tanh(x); break;
      case Func::Sqrt: ok = x >= 0.0; v = ok ? std::sqrt(x) : 0.0; break;
      case Func::Arctan: v = std::atan(x); break;
      case Func::Arctanh: ok = std::fabs(x) < 1.0; v = ok ? std::atanh(x) : 0.0; break;
    }
    if (ok && std::isfinite(v)) return Expr(v);
  }
  return Expr::make(NodeKind::Apply, f, 0.0, {}, {arg});
}

// ---------------------------------------------------------------------------
// Differentiation

Expr Expr::diff(const std::string& sym) const {
  switch (kind()) {
    case NodeKind::Number:
      return Expr(0.0);
    case NodeKind::Symbol:
      return Expr(node_->sym == sym ? 1.0 : 0.0);
    case NodeKind::Neg:
      return -child(0).diff(sym);
    case NodeKind::Add:
      return child(0).diff(sym) + child(1).diff(sym);
    case NodeKind::Sub:
      return child(0).diff(sym) - child(1).diff(sym);
    case NodeKind::Mul:
      return child(0).diff(sym) * child(1) + child(0) * child(1).diff(sym);
    case NodeKind::Div: {
      const Expr& a = child(0);
      const Expr& b = child(1);
      return (a.diff(sym) * b - a * b.diff(sym)) / (b * b);
    }
    case NodeKind::Pow: {
      const Expr& f = child(0);
      const Expr& g = child(1);
      Expr fp = f.diff(sym);
      if (g.is_number()) {
        double n = g.number_value();
        return Expr(n) * pow(f, Expr(n - 1.0)) * fp;
      }
      Expr gp = g.diff(sym);
      // (f^g)' = f^g (g' ln f + g f'/f); zero branches fold away.
      return pow(f, g) * (gp * ln(f) + g * fp / f);
    }
    case NodeKind::Apply: {
      const Expr& u = child(0);
      Expr up = u.diff(sym);
      if (up.is_number(0.0)) return Expr(0.0);
      switch (func()) {
        case Func::Exp: return exp(u) * up;
        case Func::Ln: return up / u;
        case Func::Sin: return cos(u) * up;
        case Func::Cos: return -sin(u) * up;
        case Func::Tan: return up / (cos(u) * cos(u));
        case Func::Sinh: return cosh(u) * up;
        case Func::Cosh: return sinh(u) * up;
        case Func::Tanh: return up / (cosh(u) * cosh(u));
        case Func::Sqrt: return up / (Expr(2.0) * sqrt(u));
        case Func::Arctan: return up / (Expr(1.0) + u * u);
        case Func::Arctanh: return up / (Expr(1.0) - u * u);
      }
      return Expr(0.0);
    }
  }
  return Expr(0.0);
}

Expr differentiate(const Expr& e, const std::string& sym) { return e.diff(sym); }

// ---------------------------------------------------------------------------
// Substitution

Expr Expr::substitute(const std::map<std::string, Expr>& subs) const {
  switch (kind()) {
    case NodeKind::Number:
      return *this;
    case NodeKind::Symbol: {
      auto it = subs.find(node_->sym);
      return it == subs.end() ? *this : it->second;
    }
    case NodeKind::Neg:
      return -child(0).substitute(subs);
    case NodeKind::Add:
      return child(0).substitute(subs) + child(1).substitute(subs);
    case NodeKind::Sub:
      return child(0).substitute(subs) - child(1).substitute(subs);
    case NodeKind::Mul:
      return child(0).substitute(subs) * child(1).substitute(subs);
    case NodeKind::Div:
      return child(0).substitute(subs) / child(1).substitute(subs);
    case NodeKind::Pow:
      return pow(child(0).substitute(subs), child(1).substitute(subs));
    case NodeKind::Apply:
      return apply(func(), child(0).substitute(subs));
  }
  return *this;
}

Expr Expr::substitute(const std::string& sym, const Expr& replacement) const {
  return substitute(std::map<std::string, Expr>{{sym, replacement}});
}

// ---------------------------------------------------------------------------
// Evaluation

double Bindings::get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end())
    throw EvalError("unbound symbol '" + name + "'");
  return it->second;
}

double Expr::eval(const Bindings& b) const {
  switch (kind()) {
    case NodeKind::Number:
      return node_->num;
    case NodeKind::Symbol:
      return b.get(node_->sym);
    case NodeKind::Neg:
      return -child(0).eval(b);
    case NodeKind::Add:
      return child(0).eval(b) + child(1).eval(b);
    case NodeKind::Sub:
      return child(0).eval(b) - child(1).eval(b);
    case NodeKind::Mul:
      return child(0).eval(b) * child(1).eval(b);
    case NodeKind::Div: {
      double den = child(1).eval(b);
      if (den == 0.0)
        throw EvalError("division by zero in '" + str() + "'");
      return child(0).eval(b) / den;
    }
    case NodeKind::Pow: {
      double base = child(0).eval(b);
      double e = child(1).eval(b);
      if (base == 0.0 && e < 0.0)
        throw EvalError("zero raised to negative power in '" + str() + "'");
      if (base < 0.0 && e != std::floor(e))
        throw EvalError("negative base with non-integer exponent in '" + str() + "'");
      return std::pow(base, e);
    }
    case NodeKind::Apply: {
      double x = child(0).eval(b);
      switch (func()) {
        case Func::Exp: return std::exp(x);
        case Func::Ln:
          if (x <= 0.0) throw EvalError("ln of non-positive value in '" + str() + "'");
          return std::log(x);
        case Func::Sin: return std::sin(x);
        case Func::Cos: return std::cos(x);
        case Func::Tan: return std::tan(x);
        case Func::Sinh: return std::sinh(x);
        case Func::Cosh: return std::cosh(x);
        case Func::Tanh: return std::tanh(x);
        case Func::Sqrt:
          if (x < 0.0) throw EvalError("sqrt of negative value in '" + str() + "'");
          return std::sqrt(x);
        case Func::Arctan: return std::atan(x);
        case Func::Arctanh:
          if (std::fabs(x) >= 1.0)
            throw EvalError("arctanh argument out of (-1,1) in '" + str() + "'");
          return std::atanh(x);
      }
      return 0.0;
    }
  }
  return 0.0;
}

double evaluate(const Expr& e, const Bindings& b) { return e.eval(b); }

// ---------------------------------------------------------------------------
// Symbol collection

namespace {
void collect_symbols(const Expr& e, std::set<std::string>& out) {
  if (e.is_symbol()) {
    out.insert(e.symbol_name());
    return;
  }
  for (int i = 0; i < e.child_count(); ++i) collect_symbols(e.child(i), out);
}
}  // namespace

std::set<std::string> Expr::symbols() const {
  std::set<std::string> out;
  collect_symbols(*this, out);
  return out;
}

bool Expr::depends_on(const std::string& sym) const {
  if (is_symbol()) return node_->sym == sym;
  for (int i = 0; i < child_count(); ++i)
    if (child(i).depends_on(sym)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Printer (minimal parentheses, shortest round-trip numbers)

namespace {

// Precedence: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    case NodeKind::Number:
      return e.number_value() < 0.0 ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void print_rec(const Expr& e, std::string& out, int parent_prec) {
  int prec = precedence(e);
  bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (e.kind()) {
    case NodeKind::Number:
      out += format_number(e.number_value());
      break;
    case NodeKind::Symbol:
      out += e.symbol_name();
      break;
    case NodeKind::Neg:
      out += '-';
      print_rec(e.child(0), out, 4);
      break;
    case NodeKind::Add:
      print_rec(e.child(0), out, 1);
      out += " + ";
      print_rec(e.child(1), out, 2);
      break;
    case NodeKind::Sub:
      print_rec(e.child(0), out, 1);
      out += " - ";
      print_rec(e.child(1), out, 2);
      break;
    case NodeKind::Mul:
      print_rec(e.child(0), out, 2);
      out += '*';
      print_rec(e.child(1), out, 3);
      break;
    case NodeKind::Div:
      print_rec(e.child(0), out, 2);
      out += '/';
      print_rec(e.child(1), out, 3);
      break;
    case NodeKind::Pow:
      print_rec(e.child(0), out, 5);
      out += '^';
      print_rec(e.child(1), out, 4);
      break;
    case NodeKind::Apply:
      out += func_name(e.func());
      out += '(';
      print_rec(e.child(0), out, 0);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print_rec(*this, out, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Simplify: rebuild through the folding constructors plus power merging.

namespace {

// x^a * x^b -> x^(a+b) for numeric a, b (implicit exponent 1).
bool as_power(const Expr& e, Expr& base, double& expo) {
  if (e.kind() == NodeKind::Pow && e.child(1).is_number()) {
    base = e.child(0);
    expo = e.child(1).number_value();
    return true;
  }
  base = e;
  expo = 1.0;
  return true;
}

Expr merge_powers(const Expr& a, const Expr& b) {
  Expr ba(0.0), bb(0.0);
  double ea = 0.0, eb = 0.0;
  as_power(a, ba, ea);
  as_power(b, bb, eb);
  if (ba.same_tree(bb) && !ba.is_number())
    return pow(ba, Expr(ea + eb));
  return a * b;
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Number:
    case NodeKind::Symbol:
      return e;
    case NodeKind::Neg:
      return -simplify(e.child(0));
    case NodeKind::Add:
      return simplify(e.child(0)) + simplify(e.child(1));
    case NodeKind::Sub:
      return simplify(e.child(0)) - simplify(e.child(1));
    case NodeKind::Mul:
      return merge_powers(simplify(e.child(0)), simplify(e.child(1)));
    case NodeKind::Div:
      return simplify(e.child(0)) / simplify(e.child(1));
    case NodeKind::Pow:
      return pow(simplify(e.child(0)), simplify(e.child(1)));
    case NodeKind::Apply:
      return apply(e.func(), simplify(e.child(0)));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over the infix grammar.

namespace {

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> allowed)
      : src_(src), allowed_(allowed) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError("unexpected character '" + std::string(1, src_[pos_]) +
                           "' at offset " + std::to_string(pos_),
                       pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      if (eat('+')) e = e + parse_term();
      else if (eat('-')) e = e - parse_term();
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (eat('*')) e = e * parse_unary();
      else if (eat('/')) e = e / parse_unary();
      else return e;
    }
  }

  Expr parse_unary() {
    if (eat('-')) return -parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (eat('^')) return pow(base, parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError("unexpected end of expression", pos_);
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!eat(')'))
        throw ParseError("missing ')' at offset " + std::to_string(pos_), pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                         std::to_string(pos_),
                     pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    std::string tmp(src_.substr(pos_, std::min<std::size_t>(64, src_.size() - pos_)));
    double v = std::strtod(tmp.c_str(), &end);
    if (end == tmp.c_str())
      throw ParseError("malformed number at offset " + std::to_string(start), start);
    pos_ += static_cast<std::size_t>(end - tmp.c_str());
    (void)begin;
    return Expr(v);
  }

  Expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    auto& funcs = function_table();
    auto it = funcs.find(name);
    if (it != funcs.end()) {
      if (!eat('('))
        throw ParseError("function '" + name + "' requires '(' at offset " +
                             std::to_string(pos_),
                         pos_);
      Expr arg = parse_sum();
      if (!eat(')'))
        throw ParseError("missing ')' after argument of '" + name + "'", pos_);
      return apply(it->second, arg);
    }
    if (std::find(allowed_.begin(), allowed_.end(), name) == allowed_.end())
      throw ParseError("unknown identifier '" + name + "' at offset " +
                           std::to_string(start),
                       start);
    return Expr::symbol(name);
  }

  std::string_view src_;
  std::span<const std::string> allowed_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src, std::span<const std::string> allowed_symbols) {
  return Parser(src, allowed_symbols).parse();
}

Expr parse_expr(std::string_view src, const std::vector<std::string>& allowed_symbols) {
  return parse_expr(src, std::span<const std::string>(allowed_symbols));
}

std::vector<Expr> taylor_coefficients(const Expr& e, const std::string& sym,
                                      int max_order) {
  std::vector<Expr> out;
  Expr cur = e;
  double fact = 1.0;
  for (int k = 0; k <= max_order; ++k) {
    if (k > 0) {
      cur = simplify(cur.diff(sym));
      fact *= k;
    }
    out.push_back(simplify(cur.substitute(sym, Expr(0.0)) / Expr(fact)));
  }
  return out;
}

}  // namespace kundt::expr
