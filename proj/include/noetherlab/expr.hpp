#ifndef NOETHERLAB_EXPR_HPP
#define NOETHERLAB_EXPR_HPP

// Scalar expression trees over coordinates and parameters, with
// second-order forward-mode differentiation.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace noetherlab {

using Binding = std::map<std::string, double>;

/// Raised by parse_expression. Offset is a byte index into the input text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string message, std::string token);

  std::size_t offset() const { return offset_; }
  const std::string& message() const { return message_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t offset_;
  std::string message_;
  std::string token_;
};

/// A binding did not cover a free name of the expression.
class UnboundNameError : public std::runtime_error {
 public:
  explicit UnboundNameError(std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A non-smooth primitive was differentiated at its singular point.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NameKind { coordinate, parameter };

/// Names an expression may refer to. Coordinates are the differentiation
/// candidates; parameters are late-bound constants.
struct NameSet {
  std::vector<std::string> coordinates;
  std::vector<std::string> parameters;

  bool contains(const std::string& name) const;
  NameKind kind_of(const std::string& name) const;
};

enum class UnaryOp { neg, sin, cos, sinh, cosh, exp, log, sqrt, abs };
enum class BinaryOp { add, sub, mul, div, pow };

const char* to_string(UnaryOp op);
const char* to_string(BinaryOp op);

struct ExprNode;

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  Expr();  // the literal 0

  static Expr literal(double value);
  static Expr variable(std::string name, NameKind kind = NameKind::coordinate);
  static Expr unary(UnaryOp op, Expr arg);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  const ExprNode& node() const { return *node_; }
  Expr lhs() const;  // operand of unary nodes
  Expr rhs() const;

  /// Names of all variables and parameters occurring in the tree.
  std::set<std::string> free_names() const;
  std::set<std::string> free_variables() const;
  std::set<std::string> free_parameters() const;

  /// Fully parenthesized infix form; parsing it back yields the same tree.
  std::string to_string() const;

  bool structurally_equal(const Expr& other) const;

  /// True when no coordinate appears (parameters are allowed).
  bool is_constant_in(const std::vector<std::string>& coordinates) const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;

  friend struct ExprAccess;
};

struct ExprNode {
  enum class Kind { literal, variable, unary, binary };
  Kind kind = Kind::literal;
  double value = 0.0;
  std::string name;
  NameKind name_kind = NameKind::coordinate;
  UnaryOp unary_op = UnaryOp::neg;
  BinaryOp binary_op = BinaryOp::add;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Parses infix text. Precedence: ^ (right assoc) > unary minus > * / > + -.
/// Calls: sin cos sinh cosh exp log sqrt abs, and r() which expands to
/// sqrt(a^2+b^2+c^2) over the coordinates when there are exactly three.
Expr parse_expression(const std::string& text, const NameSet& names);

double eval(const Expr& expr, const Binding& binding);

inline bool is_valid(double value) {
  return value == value && value - value == 0.0;  // finite
}

/// Value, gradient and Hessian of a scalar with respect to an ordered list
/// of variables. The Hessian is kept as its packed upper triangle.
class SecondOrderJet {
 public:
  SecondOrderJet() = default;
  explicit SecondOrderJet(std::size_t dim, double value = 0.0, bool with_hessian = true);

  std::size_t dim() const { return gradient_.size(); }
  bool has_hessian() const { return !hessian_.empty() || dim() == 0; }

  double value() const { return value_; }
  double& value() { return value_; }
  std::span<const double> gradient() const { return gradient_; }
  std::span<double> gradient() { return gradient_; }
  double gradient(std::size_t i) const { return gradient_[i]; }

  double hessian(std::size_t i, std::size_t j) const { return hessian_[packed(i, j)]; }
  void set_hessian(std::size_t i, std::size_t j, double v) { hessian_[packed(i, j)] = v; }
  std::span<const double> packed_hessian() const { return hessian_; }

  static SecondOrderJet seed(std::size_t dim, std::size_t index, double value,
                             bool with_hessian = true);

  friend SecondOrderJet operator+(const SecondOrderJet& a, const SecondOrderJet& b);
  friend SecondOrderJet operator-(const SecondOrderJet& a, const SecondOrderJet& b);
  friend SecondOrderJet operator*(const SecondOrderJet& a, const SecondOrderJet& b);
  friend SecondOrderJet operator/(const SecondOrderJet& a, const SecondOrderJet& b);
  friend SecondOrderJet operator-(const SecondOrderJet& a);

  /// f(u) given f(u0), f'(u0), f''(u0).
  SecondOrderJet chain(double f, double df, double d2f) const;

  bool is_constant() const;

 private:
  std::size_t packed(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    const std::size_t n = dim();
    return i * n - i * (i + 1) / 2 + j;
  }

  double value_ = 0.0;
  std::vector<double> gradient_;
  std::vector<double> hessian_;
};

/// Differentiates expr with respect to vars at point. Names outside vars are
/// looked up in params. With with_hessian=false only the gradient is carried.
SecondOrderJet jet2(const Expr& expr, std::span<const std::string> vars,
                    std::span<const double> point, const Binding& params,
                    bool with_hessian = true);

}  // namespace noetherlab

#endif  // NOETHERLAB_EXPR_HPP
