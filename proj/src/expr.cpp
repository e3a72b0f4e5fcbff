#include "noetherlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace noetherlab {

ParseError::ParseError(std::size_t offset, std::string message, std::string token)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + message +
                         (token.empty() ? std::string() : " near '" + token + "'")),
      offset_(offset),
      message_(std::move(message)),
      token_(std::move(token)) {}

UnboundNameError::UnboundNameError(std::string name)
    : std::runtime_error("no binding for '" + name + "'"), name_(std::move(name)) {}

bool NameSet::contains(const std::string& name) const {
  return std::find(coordinates.begin(), coordinates.end(), name) != coordinates.end() ||
         std::find(parameters.begin(), parameters.end(), name) != parameters.end();
}

NameKind NameSet::kind_of(const std::string& name) const {
  if (std::find(coordinates.begin(), coordinates.end(), name) != coordinates.end())
    return NameKind::coordinate;
  return NameKind::parameter;
}

const char* to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "-";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::sinh: return "sinh";
    case UnaryOp::cosh: return "cosh";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::abs: return "abs";
  }
  return "?";
}

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::pow: return "^";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Tree construction

struct ExprAccess {
  static Expr wrap(std::shared_ptr<const ExprNode> node) { return Expr(std::move(node)); }
  static const std::shared_ptr<const ExprNode>& ptr(const Expr& e) { return e.node_; }
};

namespace {

std::shared_ptr<const ExprNode> zero_node() {
  static const auto zero = std::make_shared<const ExprNode>();
  return zero;
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::lhs() const { return node_->lhs ? Expr(node_->lhs) : Expr(); }
Expr Expr::rhs() const { return node_->rhs ? Expr(node_->rhs) : Expr(); }

Expr Expr::literal(double value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::literal;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name, NameKind kind) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::variable;
  n->name = std::move(name);
  n->name_kind = kind;
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr arg) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::unary;
  n->unary_op = op;
  n->lhs = arg.node_;
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::binary;
  n->binary_op = op;
  n->lhs = lhs.node_;
  n->rhs = rhs.node_;
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(UnaryOp::neg, a); }

namespace {

void collect_names(const ExprNode& n, std::set<std::string>& out, int which) {
  switch (n.kind) {
    case ExprNode::Kind::literal: return;
    case ExprNode::Kind::variable:
      if (which == 0 || (which == 1 && n.name_kind == NameKind::coordinate) ||
          (which == 2 && n.name_kind == NameKind::parameter))
        out.insert(n.name);
      return;
    case ExprNode::Kind::unary: collect_names(*n.lhs, out, which); return;
    case ExprNode::Kind::binary:
      collect_names(*n.lhs, out, which);
      collect_names(*n.rhs, out, which);
      return;
  }
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprNode::Kind::literal: return a.value == b.value;
    case ExprNode::Kind::variable: return a.name == b.name && a.name_kind == b.name_kind;
    case ExprNode::Kind::unary: return a.unary_op == b.unary_op && equal_nodes(*a.lhs, *b.lhs);
    case ExprNode::Kind::binary:
      return a.binary_op == b.binary_op && equal_nodes(*a.lhs, *b.lhs) &&
             equal_nodes(*a.rhs, *b.rhs);
  }
  return false;
}

std::string format_literal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0) return "(" + s + ")";
  return s;
}

void print(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::literal: out += format_literal(n.value); return;
    case ExprNode::Kind::variable: out += n.name; return;
    case ExprNode::Kind::unary:
      if (n.unary_op == UnaryOp::neg) {
        out += "(-";
        print(*n.lhs, out);
        out += ")";
      } else {
        out += to_string(n.unary_op);
        out += "(";
        print(*n.lhs, out);
        out += ")";
      }
      return;
    case ExprNode::Kind::binary:
      out += "(";
      print(*n.lhs, out);
      out += to_string(n.binary_op);
      print(*n.rhs, out);
      out += ")";
      return;
  }
}

}  // namespace

std::set<std::string> Expr::free_names() const {
  std::set<std::string> out;
  collect_names(*node_, out, 0);
  return out;
}

std::set<std::string> Expr::free_variables() const {
  std::set<std::string> out;
  collect_names(*node_, out, 1);
  return out;
}

std::set<std::string> Expr::free_parameters() const {
  std::set<std::string> out;
  collect_names(*node_, out, 2);
  return out;
}

std::string Expr::to_string() const {
  std::string out;
  print(*node_, out);
  return out;
}

bool Expr::structurally_equal(const Expr& other) const { return equal_nodes(*node_, *other.node_); }

bool Expr::is_constant_in(const std::vector<std::string>& coordinates) const {
  for (const auto& name : free_names())
    if (std::find(coordinates.begin(), coordinates.end(), name) != coordinates.end()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  enum class Type { number, name, op, lparen, rparen, comma, end } type;
  std::string text;
  std::size_t offset;
  double number = 0.0;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = i;
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
        ++i;
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
          i = j;
          while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
      }
      const std::string lexeme = text.substr(start, i - start);
      char* end = nullptr;
      const double v = std::strtod(lexeme.c_str(), &end);
      if (end != lexeme.c_str() + lexeme.size())
        throw ParseError(start, "malformed number", lexeme);
      out.push_back({Token::Type::number, lexeme, start, v});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
      out.push_back({Token::Type::name, text.substr(start, i - start), start});
      continue;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        out.push_back({Token::Type::op, std::string(1, c), i});
        break;
      case '(': out.push_back({Token::Type::lparen, "(", i}); break;
      case ')': out.push_back({Token::Type::rparen, ")", i}); break;
      case ',': out.push_back({Token::Type::comma, ",", i}); break;
      default: throw ParseError(i, "unexpected character", std::string(1, c));
    }
    ++i;
  }
  out.push_back({Token::Type::end, "", text.size()});
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, const NameSet& names)
      : tokens_(tokenize(text)), names_(names), length_(text.size()) {}

  Expr parse() {
    Expr e = parse_sum();
    if (peek().type != Token::Type::end) fail("unexpected token");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    const std::size_t offset = std::min(t.offset, length_ == 0 ? 0 : length_ - 1);
    throw ParseError(offset, message, t.text);
  }

  bool is_op(char c) const { return peek().type == Token::Type::op && peek().text[0] == c; }

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (is_op('+') || is_op('-')) {
      const char op = advance().text[0];
      Expr rhs = parse_product();
      lhs = Expr::binary(op == '+' ? BinaryOp::add : BinaryOp::sub, lhs, rhs);
    }
    return lhs;
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    while (is_op('*') || is_op('/')) {
      const char op = advance().text[0];
      Expr rhs = parse_unary();
      lhs = Expr::binary(op == '*' ? BinaryOp::mul : BinaryOp::div, lhs, rhs);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (is_op('-')) {
      advance();
      return Expr::unary(UnaryOp::neg, parse_unary());
    }
    if (is_op('+')) {
      advance();
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (is_op('^')) {
      advance();
      // right-associative; the exponent may carry its own sign
      return Expr::binary(BinaryOp::pow, base, parse_unary());
    }
    return base;
  }

  void expect(Token::Type type, const char* what) {
    if (peek().type != type) fail(std::string("expected ") + what);
    advance();
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.type) {
      case Token::Type::number:
        advance();
        return Expr::literal(t.number);
      case Token::Type::lparen: {
        advance();
        Expr inner = parse_sum();
        expect(Token::Type::rparen, "')'");
        return inner;
      }
      case Token::Type::name: {
        const std::string name = t.text;
        if (tokens_[pos_ + 1].type == Token::Type::lparen) return parse_call();
        if (!names_.contains(name)) fail("unknown name");
        advance();
        return Expr::variable(name, names_.kind_of(name));
      }
      default: fail("expected a number, name or '('");
    }
  }

  Expr parse_call() {
    const Token name_token = advance();
    advance();  // '('
    const std::string& fn = name_token.text;
    if (fn == "r") {
      if (peek().type != Token::Type::rparen) fail("r() takes no arguments");
      advance();
      if (names_.coordinates.size() != 3) {
        throw ParseError(name_token.offset, "r() needs exactly three coordinates", fn);
      }
      Expr sum;
      for (std::size_t i = 0; i < 3; ++i) {
        Expr sq = Expr::binary(BinaryOp::pow, Expr::variable(names_.coordinates[i]),
                               Expr::literal(2.0));
        sum = i == 0 ? sq : Expr::binary(BinaryOp::add, sum, sq);
      }
      return Expr::unary(UnaryOp::sqrt, sum);
    }
    static const std::pair<const char*, UnaryOp> table[] = {
        {"sin", UnaryOp::sin},   {"cos", UnaryOp::cos}, {"sinh", UnaryOp::sinh},
        {"cosh", UnaryOp::cosh}, {"exp", UnaryOp::exp}, {"log", UnaryOp::log},
        {"sqrt", UnaryOp::sqrt}, {"abs", UnaryOp::abs}};
    for (const auto& [label, op] : table) {
      if (fn == label) {
        Expr arg = parse_sum();
        expect(Token::Type::rparen, "')'");
        return Expr::unary(op, arg);
      }
    }
    throw ParseError(name_token.offset, "unknown function", fn);
  }

  std::vector<Token> tokens_;
  const NameSet& names_;
  std::size_t length_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(const std::string& text, const NameSet& names) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ParseError(0, "empty expression", "");
  return Parser(text, names).parse();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double apply(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::neg: return -x;
    case UnaryOp::sin: return std::sin(x);
    case UnaryOp::cos: return std::cos(x);
    case UnaryOp::sinh: return std::sinh(x);
    case UnaryOp::cosh: return std::cosh(x);
    case UnaryOp::exp: return std::exp(x);
    case UnaryOp::log: return std::log(x);
    case UnaryOp::sqrt: return std::sqrt(x);
    case UnaryOp::abs: return std::abs(x);
  }
  return 0.0;
}

double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
    case BinaryOp::pow: return std::pow(a, b);
  }
  return 0.0;
}

double eval_node(const ExprNode& n, const Binding& binding) {
  switch (n.kind) {
    case ExprNode::Kind::literal: return n.value;
    case ExprNode::Kind::variable: {
      auto it = binding.find(n.name);
      if (it == binding.end()) throw UnboundNameError(n.name);
      return it->second;
    }
    case ExprNode::Kind::unary: return apply(n.unary_op, eval_node(*n.lhs, binding));
    case ExprNode::Kind::binary:
      return apply(n.binary_op, eval_node(*n.lhs, binding), eval_node(*n.rhs, binding));
  }
  return 0.0;
}

}  // namespace

double eval(const Expr& expr, const Binding& binding) { return eval_node(expr.node(), binding); }

// ---------------------------------------------------------------------------
// Jets

SecondOrderJet::SecondOrderJet(std::size_t dim, double value, bool with_hessian)
    : value_(value), gradient_(dim, 0.0), hessian_(with_hessian ? dim * (dim + 1) / 2 : 0, 0.0) {}

SecondOrderJet SecondOrderJet::seed(std::size_t dim, std::size_t index, double value,
                                    bool with_hessian) {
  SecondOrderJet j(dim, value, with_hessian);
  j.gradient_[index] = 1.0;
  return j;
}

bool SecondOrderJet::is_constant() const {
  for (double g : gradient_)
    if (g != 0.0) return false;
  for (double h : hessian_)
    if (h != 0.0) return false;
  return true;
}

SecondOrderJet operator+(const SecondOrderJet& a, const SecondOrderJet& b) {
  SecondOrderJet r = a;
  r.value_ += b.value_;
  for (std::size_t i = 0; i < r.gradient_.size(); ++i) r.gradient_[i] += b.gradient_[i];
  for (std::size_t i = 0; i < r.hessian_.size(); ++i) r.hessian_[i] += b.hessian_[i];
  return r;
}

SecondOrderJet operator-(const SecondOrderJet& a, const SecondOrderJet& b) {
  SecondOrderJet r = a;
  r.value_ -= b.value_;
  for (std::size_t i = 0; i < r.gradient_.size(); ++i) r.gradient_[i] -= b.gradient_[i];
  for (std::size_t i = 0; i < r.hessian_.size(); ++i) r.hessian_[i] -= b.hessian_[i];
  return r;
}

SecondOrderJet operator-(const SecondOrderJet& a) {
  SecondOrderJet r = a;
  r.value_ = -r.value_;
  for (double& g : r.gradient_) g = -g;
  for (double& h : r.hessian_) h = -h;
  return r;
}

SecondOrderJet operator*(const SecondOrderJet& a, const SecondOrderJet& b) {
  const std::size_t n = a.dim();
  SecondOrderJet r(n, a.value_ * b.value_, !a.hessian_.empty());
  for (std::size_t i = 0; i < n; ++i)
    r.gradient_[i] = a.value_ * b.gradient_[i] + b.value_ * a.gradient_[i];
  if (!r.hessian_.empty()) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j, ++k)
        r.hessian_[k] = a.value_ * b.hessian_[k] + b.value_ * a.hessian_[k] +
                        a.gradient_[i] * b.gradient_[j] + a.gradient_[j] * b.gradient_[i];
  }
  return r;
}

SecondOrderJet SecondOrderJet::chain(double f, double df, double d2f) const {
  const std::size_t n = dim();
  SecondOrderJet r(n, f, !hessian_.empty());
  for (std::size_t i = 0; i < n; ++i) r.gradient_[i] = df * gradient_[i];
  if (!r.hessian_.empty()) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j, ++k)
        r.hessian_[k] = df * hessian_[k] + d2f * gradient_[i] * gradient_[j];
  }
  return r;
}

SecondOrderJet operator/(const SecondOrderJet& a, const SecondOrderJet& b) {
  const double v = b.value_;
  return a * b.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

namespace {

struct JetContext {
  std::span<const std::string> vars;
  std::span<const double> point;
  const Binding& params;
  bool with_hessian;

  SecondOrderJet constant(double v) const { return SecondOrderJet(vars.size(), v, with_hessian); }
};

SecondOrderJet jet_unary(UnaryOp op, const SecondOrderJet& u) {
  const double x = u.value();
  switch (op) {
    case UnaryOp::neg: return -u;
    case UnaryOp::sin: return u.chain(std::sin(x), std::cos(x), -std::sin(x));
    case UnaryOp::cos: return u.chain(std::cos(x), -std::sin(x), -std::cos(x));
    case UnaryOp::sinh: return u.chain(std::sinh(x), std::cosh(x), std::sinh(x));
    case UnaryOp::cosh: return u.chain(std::cosh(x), std::sinh(x), std::cosh(x));
    case UnaryOp::exp: {
      const double e = std::exp(x);
      return u.chain(e, e, e);
    }
    case UnaryOp::log: return u.chain(std::log(x), 1.0 / x, -1.0 / (x * x));
    case UnaryOp::sqrt: {
      if (x == 0.0) throw DomainError("sqrt is not differentiable at 0");
      const double s = std::sqrt(x);
      return u.chain(s, 0.5 / s, -0.25 / (s * x));
    }
    case UnaryOp::abs: {
      if (x == 0.0) throw DomainError("abs is not differentiable at 0");
      const double sign = x > 0 ? 1.0 : -1.0;
      return u.chain(std::abs(x), sign, 0.0);
    }
  }
  return u;
}

SecondOrderJet jet_pow(const SecondOrderJet& base, const SecondOrderJet& exponent) {
  const double x = base.value();
  if (exponent.is_constant()) {
    const double c = exponent.value();
    if (c == 0.0) return base.chain(1.0, 0.0, 0.0);
    if (c == 1.0) return base;
    const bool integral = c == std::floor(c);
    if (x == 0.0 && (!integral || c < 2.0)) throw DomainError("^ is not differentiable at base 0");
    const double d1 = c * std::pow(x, c - 1.0);
    const double d2 = c * (c - 1.0) * (c == 2.0 ? 1.0 : std::pow(x, c - 2.0));
    return base.chain(std::pow(x, c), d1, d2);
  }
  if (x <= 0.0) throw DomainError("^ with a variable exponent needs a positive base");
  return jet_unary(UnaryOp::exp, exponent * jet_unary(UnaryOp::log, base));
}

SecondOrderJet jet_node(const ExprNode& n, const JetContext& ctx) {
  switch (n.kind) {
    case ExprNode::Kind::literal: return ctx.constant(n.value);
    case ExprNode::Kind::variable: {
      for (std::size_t i = 0; i < ctx.vars.size(); ++i)
        if (ctx.vars[i] == n.name)
          return SecondOrderJet::seed(ctx.vars.size(), i, ctx.point[i], ctx.with_hessian);
      auto it = ctx.params.find(n.name);
      if (it == ctx.params.end()) throw UnboundNameError(n.name);
      return ctx.constant(it->second);
    }
    case ExprNode::Kind::unary: return jet_unary(n.unary_op, jet_node(*n.lhs, ctx));
    case ExprNode::Kind::binary: {
      SecondOrderJet a = jet_node(*n.lhs, ctx);
      SecondOrderJet b = jet_node(*n.rhs, ctx);
      switch (n.binary_op) {
        case BinaryOp::add: return a + b;
        case BinaryOp::sub: return a - b;
        case BinaryOp::mul: return a * b;
        case BinaryOp::div: return a / b;
        case BinaryOp::pow: return jet_pow(a, b);
      }
    }
  }
  return ctx.constant(0.0);
}

}  // namespace

SecondOrderJet jet2(const Expr& expr, std::span<const std::string> vars,
                    std::span<const double> point, const Binding& params, bool with_hessian) {
  if (vars.size() != point.size())
    throw std::invalid_argument("jet2: point dimension does not match variable count");
  return jet_node(expr.node(), JetContext{vars, point, params, with_hessian});
}

}  // namespace noetherlab
