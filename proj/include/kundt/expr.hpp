#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kundt::expr {

// Unary functions supported by the expression grammar.
enum class Func {
  Exp,
  Ln,
  Sin,
  Cos,
  Tan,
  Sinh,
  Cosh,
  Tanh,
  Sqrt,
  Arctan,
  Arctanh,
};

const char* func_name(Func f);

enum class NodeKind {
  Number,
  Symbol,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Apply,
};

class Bindings;

// Immutable closed-form scalar expression over named symbols.
// Construction folds the obvious identities (0+x, 1*x, constant
// subtrees) so derivative trees stay small.  Copies are O(1).
class Expr {
 public:
  Expr() : Expr(0.0) {}
  Expr(double value);
  Expr(int value) : Expr(static_cast<double>(value)) {}

  static Expr number(double value);
  static Expr symbol(std::string name);

  NodeKind kind() const;
  bool is_number() const;
  bool is_number(double value) const;
  double number_value() const;
  bool is_symbol() const;
  const std::string& symbol_name() const;
  Func func() const;
  const Expr& child(int i) const;
  int child_count() const;

  bool same_tree(const Expr& other) const;

  // Exact symbolic derivative with respect to one symbol.
  Expr diff(const std::string& sym) const;

  // Simultaneous substitution of symbols by expressions.
  Expr substitute(const std::map<std::string, Expr>& subs) const;
  Expr substitute(const std::string& sym, const Expr& replacement) const;

  double eval(const Bindings& b) const;

  std::set<std::string> symbols() const;
  bool depends_on(const std::string& sym) const;

  std::string str() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(NodeKind kind, Func f, double num, std::string sym,
                   std::vector<Expr> children);

  std::shared_ptr<const Node> node_;

  friend Expr operator+(const Expr&, const Expr&);
  friend Expr operator-(const Expr&, const Expr&);
  friend Expr operator*(const Expr&, const Expr&);
  friend Expr operator/(const Expr&, const Expr&);
  friend Expr operator-(const Expr&);
  friend Expr pow(const Expr&, const Expr&);
  friend Expr apply(Func, const Expr&);
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
inline Expr operator+(const Expr& a) { return a; }

inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }
inline Expr& operator/=(Expr& a, const Expr& b) { return a = a / b; }

// Structural equality (same tree), not symbolic equivalence.
inline bool operator==(const Expr& a, const Expr& b) { return a.same_tree(b); }
inline bool operator!=(const Expr& a, const Expr& b) { return !a.same_tree(b); }

Expr pow(const Expr& base, const Expr& exponent);
inline Expr pow(const Expr& base, double e) { return pow(base, Expr(e)); }
inline Expr pow(const Expr& base, int e) { return pow(base, Expr(e)); }
Expr apply(Func f, const Expr& arg);

inline Expr exp(const Expr& a) { return apply(Func::Exp, a); }
inline Expr ln(const Expr& a) { return apply(Func::Ln, a); }
inline Expr sin(const Expr& a) { return apply(Func::Sin, a); }
inline Expr cos(const Expr& a) { return apply(Func::Cos, a); }
inline Expr tan(const Expr& a) { return apply(Func::Tan, a); }
inline Expr sinh(const Expr& a) { return apply(Func::Sinh, a); }
inline Expr cosh(const Expr& a) { return apply(Func::Cosh, a); }
inline Expr tanh(const Expr& a) { return apply(Func::Tanh, a); }
inline Expr sqrt(const Expr& a) { return apply(Func::Sqrt, a); }
inline Expr arctan(const Expr& a) { return apply(Func::Arctan, a); }
inline Expr arctanh(const Expr& a) { return apply(Func::Arctanh, a); }

// symbol -> value map used during numeric evaluation.
class Bindings {
 public:
  Bindings() = default;
  Bindings(std::initializer_list<std::pair<const std::string, double>> init)
      : values_(init) {}

  void set(const std::string& name, double value) { values_[name] = value; }
  bool has(const std::string& name) const { return values_.count(name) > 0; }
  double get(const std::string& name) const;

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  std::map<std::string, double> values_;
};

struct ParseError : std::runtime_error {
  ParseError(std::string msg, std::size_t offset_)
      : std::runtime_error(std::move(msg)), offset(offset_) {}
  std::size_t offset;
};

struct EvalError : std::runtime_error {
  explicit EvalError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Parses the infix grammar: + - * / ^ (right assoc), name(expr),
// parentheses, unary minus, decimal/scientific reals.  Every identifier
// must appear in `allowed_symbols` or be one of the known functions.
Expr parse_expr(std::string_view src, std::span<const std::string> allowed_symbols);
Expr parse_expr(std::string_view src, const std::vector<std::string>& allowed_symbols);

// Numeric-equivalence-preserving cleanup: constant folding, 0/1
// identities and power merging.  No trig identities.
Expr simplify(const Expr& e);

// Free functions mirroring the member operations.
Expr differentiate(const Expr& e, const std::string& sym);
double evaluate(const Expr& e, const Bindings& b);

// Coefficients of a polynomial-in-sym expression (Taylor at sym = 0);
// exact when e is polynomial in sym of degree <= max_order.
std::vector<Expr> taylor_coefficients(const Expr& e, const std::string& sym,
                                      int max_order);

}  // namespace kundt::expr
