#include "cornerlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cornerlab {

// ---------------------------------------------------------------------------
// Function1D helpers

Eigen::VectorXd Function1D::derivatives(double x, int order) const {
  const Taylor<double> t = taylor(x, order);
  Eigen::VectorXd d(order + 1);
  for (int k = 0; k <= order; ++k)
    d(k) = k < t.valid ? t.derivative(k) : std::numeric_limits<double>::quiet_NaN();
  return d;
}

LinearCombination::LinearCombination(ScalarFn base, std::vector<double> weights,
                                     std::vector<ScalarFn> terms)
    : base_(std::move(base)), weights_(std::move(weights)), terms_(std::move(terms)) {
  if (weights_.size() != terms_.size())
    throw std::invalid_argument("LinearCombination: weight/term count mismatch");
}

double LinearCombination::value(double x) const {
  double v = base_->value(x);
  for (std::size_t i = 0; i < terms_.size(); ++i) v += weights_[i] * terms_[i]->value(x);
  return v;
}

Taylor<double> LinearCombination::taylor(double x, int order) const {
  Taylor<double> t = base_->taylor(x, order);
  for (std::size_t i = 0; i < terms_.size(); ++i) t = t + weights_[i] * terms_[i]->taylor(x, order);
  return t;
}

SobolevIndex LinearCombination::regularity() const {
  SobolevIndex r = base_->regularity();
  for (const auto& t : terms_) r = min(r, t->regularity());
  return r;
}

std::string LinearCombination::describe() const {
  std::ostringstream os;
  os << base_->describe();
  for (std::size_t i = 0; i < terms_.size(); ++i)
    os << " + (" << weights_[i] << ")*(" << terms_[i]->describe() << ")";
  return os.str();
}

Taylor<double> Rescaled::taylor(double x, int order) const {
  Taylor<double> t = inner_->taylor(scale_ * x, order);
  double f = 1.0;
  for (int k = 0; k <= order; ++k) {
    t.c(k) *= f;
    f *= scale_;
  }
  return t;
}

std::string Rescaled::describe() const {
  std::ostringstream os;
  os << "(" << inner_->describe() << ")@(" << scale_ << "*x)";
  return os.str();
}

ScalarFn constant_function(double c) {
  return std::make_shared<LambdaFunction>(
      [c](double) { return c; },
      [c](double, int order) { return Taylor<double>::constant(c, order); },
      SobolevIndex::smooth(), std::to_string(c));
}

ScalarFn zero_function() { return constant_function(0.0); }

// ---------------------------------------------------------------------------
// Smooth cutoff

namespace {

double flat_exp(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

Taylor<double> flat_exp(const Taylor<double>& s) {
  if (s.c(0) <= 0.0) {
    Taylor<double> z(s.order());
    z.valid = s.valid;
    return z;
  }
  const Taylor<double> one = Taylor<double>::constant(1.0, s.order());
  return exp(-(one / s));
}

}  // namespace

double smooth_cutoff(double v, double a, double b) {
  if (v <= a) return 1.0;
  if (v >= b) return 0.0;
  const double s = (b - v) / (b - a);
  const double f0 = flat_exp(s), f1 = flat_exp(1.0 - s);
  return f0 / (f0 + f1);
}

Taylor<double> smooth_cutoff(const Taylor<double>& v, double a, double b) {
  const int n = v.order();
  if (v.c(0) <= a || v.c(0) >= b) {
    Taylor<double> t = Taylor<double>::constant(v.c(0) <= a ? 1.0 : 0.0, n);
    t.valid = v.valid;
    return t;
  }
  Taylor<double> s = v;
  s.c = -v.c / (b - a);
  s.c(0) = (b - v.c(0)) / (b - a);
  Taylor<double> one_minus = -s;
  one_minus.c(0) += 1.0;
  const Taylor<double> f0 = flat_exp(s), f1 = flat_exp(one_minus);
  return f0 / (f0 + f1);
}

// ---------------------------------------------------------------------------
// Expression nodes

struct Expr::Node {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Sin, Cos, Sqrt, Log, Eta, Step };
  Kind kind;
  double number = 0.0;  // constant value or exponent
  double a = 0.0, b = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = Node::Kind;

NodePtr make(Kind k, NodePtr l = nullptr, NodePtr r = nullptr, double number = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  n->number = number;
  return n;
}

bool depends_on_variable(const NodePtr& n) {
  if (!n) return false;
  if (n->kind == Kind::Var) return true;
  return depends_on_variable(n->lhs) || depends_on_variable(n->rhs);
}

double eval(const Node& n, double x) {
  switch (n.kind) {
    case Kind::Const: return n.number;
    case Kind::Var: return x;
    case Kind::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Kind::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Kind::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Kind::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Kind::Neg: return -eval(*n.lhs, x);
    case Kind::Pow: {
      const double base = eval(*n.lhs, x);
      if (base == 0.0 && n.number < 0.0) return std::numeric_limits<double>::infinity();
      return std::pow(base, n.number);
    }
    case Kind::Exp: return std::exp(eval(*n.lhs, x));
    case Kind::Sin: return std::sin(eval(*n.lhs, x));
    case Kind::Cos: return std::cos(eval(*n.lhs, x));
    case Kind::Sqrt: return std::sqrt(eval(*n.lhs, x));
    case Kind::Log: return std::log(eval(*n.lhs, x));
    case Kind::Eta: return smooth_cutoff(eval(*n.lhs, x), n.a, n.b);
    case Kind::Step: return eval(*n.lhs, x) < n.a ? 1.0 : 0.0;
  }
  return 0.0;
}

Taylor<double> series(const Node& n, double x, int order) {
  switch (n.kind) {
    case Kind::Const: return Taylor<double>::constant(n.number, order);
    case Kind::Var: return Taylor<double>::variable(x, order);
    case Kind::Add: return series(*n.lhs, x, order) + series(*n.rhs, x, order);
    case Kind::Sub: return series(*n.lhs, x, order) - series(*n.rhs, x, order);
    case Kind::Mul: return series(*n.lhs, x, order) * series(*n.rhs, x, order);
    case Kind::Div: return series(*n.lhs, x, order) / series(*n.rhs, x, order);
    case Kind::Neg: return -series(*n.lhs, x, order);
    case Kind::Pow: {
      const Taylor<double> base = series(*n.lhs, x, order);
      const double p = n.number;
      const bool integral = p >= 0.0 && std::floor(p) == p;
      if (!integral && base.c(0) == 0.0) {
        // Leading behaviour c * y^p: derivatives below p vanish, above p blow up.
        Taylor<double> t(order);
        if (p > 0.0) {
          t.valid = std::min(base.valid, static_cast<int>(std::floor(p)) + 1);
        } else {
          t.c(0) = std::numeric_limits<double>::infinity();
          t.valid = 0;
        }
        return t;
      }
      return pow(base, p);
    }
    case Kind::Exp: return exp(series(*n.lhs, x, order));
    case Kind::Sin: return sincos(series(*n.lhs, x, order)).first;
    case Kind::Cos: return sincos(series(*n.lhs, x, order)).second;
    case Kind::Sqrt: {
      const Taylor<double> base = series(*n.lhs, x, order);
      if (base.c(0) == 0.0) {
        Taylor<double> t(order);
        t.valid = std::min(base.valid, 1);
        return t;
      }
      return pow(base, 0.5);
    }
    case Kind::Log: return log(series(*n.lhs, x, order));
    case Kind::Eta: return smooth_cutoff(series(*n.lhs, x, order), n.a, n.b);
    case Kind::Step: {
      const Taylor<double> arg = series(*n.lhs, x, order);
      Taylor<double> t = Taylor<double>::constant(arg.c(0) < n.a ? 1.0 : 0.0, order);
      t.valid = arg.c(0) == n.a ? 0 : arg.valid;
      return t;
    }
  }
  return Taylor<double>(order);
}

SobolevIndex regularity_of(const Node& n) {
  switch (n.kind) {
    case Kind::Const:
    case Kind::Var: return SobolevIndex::smooth();
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: return min(regularity_of(*n.lhs), regularity_of(*n.rhs));
    case Kind::Pow: {
      const SobolevIndex inner = regularity_of(*n.lhs);
      const double p = n.number;
      if (p >= 0.0 && std::floor(p) == p) return inner;
      // Singularities are only tracked at the origin of the half-line.
      if (eval(*n.lhs, 0.0) == 0.0) return min(inner, SobolevIndex::below(p + 0.5));
      return inner;
    }
    case Kind::Sqrt: {
      const SobolevIndex inner = regularity_of(*n.lhs);
      if (eval(*n.lhs, 0.0) == 0.0) return min(inner, SobolevIndex::below(1.0));
      return inner;
    }
    case Kind::Neg:
    case Kind::Exp:
    case Kind::Sin:
    case Kind::Cos:
    case Kind::Log:
    case Kind::Eta: return regularity_of(*n.lhs);
    case Kind::Step: return min(regularity_of(*n.lhs), SobolevIndex::below(0.5));
  }
  return SobolevIndex::smooth();
}

class Parser {
 public:
  Parser(std::string_view text, std::string variable) : text_(text), var_(std::move(variable)) {}

  NodePtr parse() {
    NodePtr n = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression '" << text_ << "': " << what << " at position " << pos_;
    throw std::invalid_argument(os.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, lhs, term());
      else if (accept('-')) lhs = make(Kind::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Kind::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) {
      NodePtr exponent = unary();
      if (depends_on_variable(exponent)) fail("exponent must be constant");
      return make(Kind::Pow, base, nullptr, eval(*exponent, 0.0));
    }
    return base;
  }

  double constant_argument() {
    NodePtr n = expression();
    if (depends_on_variable(n)) fail("cutoff parameters must be constant");
    return eval(*n, 0.0);
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr n = expression();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::Const, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      if (name == var_) return make(Kind::Var);
      if (name == "pi") return make(Kind::Const, nullptr, nullptr, std::numbers::pi);
      if (name == "e") return make(Kind::Const, nullptr, nullptr, std::numbers::e);
      return call(name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr call(const std::string& name) {
    expect('(');
    NodePtr arg = expression();
    NodePtr result;
    if (name == "exp") result = make(Kind::Exp, arg);
    else if (name == "sin") result = make(Kind::Sin, arg);
    else if (name == "cos") result = make(Kind::Cos, arg);
    else if (name == "sqrt") result = make(Kind::Sqrt, arg);
    else if (name == "log") result = make(Kind::Log, arg);
    else if (name == "eta") {
      expect(',');
      const double a = constant_argument();
      expect(',');
      const double b = constant_argument();
      if (!(b > a)) fail("eta requires a < b");
      auto n = std::make_shared<Node>();
      n->kind = Kind::Eta;
      n->lhs = arg;
      n->a = a;
      n->b = b;
      result = n;
    } else if (name == "step") {
      expect(',');
      auto n = std::make_shared<Node>();
      n->kind = Kind::Step;
      n->lhs = arg;
      n->a = constant_argument();
      result = n;
    } else {
      fail("unknown identifier '" + name + "'");
    }
    expect(')');
    return result;
  }

  std::string_view text_;
  std::string var_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view text, std::string variable) {
  Parser p(text, variable);
  return Expr(p.parse(), std::string(text), std::move(variable));
}

double Expr::value(double x) const { return eval(*root_, x); }

Taylor<double> Expr::taylor(double x, int order) const { return series(*root_, x, order); }

SobolevIndex Expr::regularity() const { return regularity_of(*root_); }

ScalarFn parse_function(std::string_view text, std::string variable) {
  return std::make_shared<Expr>(Expr::parse(text, std::move(variable)));
}

}  // namespace cornerlab
