#ifndef HAMCERT_EXPR_HPP
#define HAMCERT_EXPR_HPP

/*
 * Scalar expression parser and evaluator.
 *
 * Grammar (precedence high to low: ^  unary-  * /  + -, all binary
 * operators left-associative):
 *
 *   expression := term { ('+'|'-') term }
 *   term       := unary { ('*'|'/') unary }
 *   unary      := '-' unary | power
 *   power      := primary { '^' exponent }
 *   exponent   := '-' exponent | primary
 *   primary    := NUMBER | VARIABLE | FUNC '(' expression ')' | '(' expression ')'
 *   FUNC       := sin | cos | exp | abs | sqrt
 *
 * The variable set is configurable per parse; nonlinearities use (t,u,v),
 * kernel branches use (t,s). Expressions are immutable after parsing and
 * evaluation is reentrant.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hamcert {

class ParseError : public std::runtime_error {
public:
  ParseError(std::string msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
  std::size_t position;
};

class EvalError : public std::runtime_error {
public:
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

class Expression {
public:
  Expression() = default;

  static Expression parse(std::string_view source) {
    static const std::vector<std::string> tuv = {"t", "u", "v"};
    return parse(source, tuv);
  }

  static Expression parse(std::string_view source, const std::vector<std::string>& variables) {
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
      throw ParseError("empty expression", 0);
    Parser p{source, 0, variables};
    Expression e;
    e.vars_ = variables;
    e.source_ = std::string(source);
    e.root_ = p.parse_expression(e.nodes_);
    p.skip_ws();
    if (p.pos != source.size())
      throw ParseError("unexpected trailing input", p.pos);
    return e;
  }

  static Expression constant(double value) {
    Expression e;
    e.nodes_.push_back(Node{Op::Constant, -1, -1, -1, value});
    e.root_ = 0;
    e.source_ = format_number(value);
    return e;
  }

  bool empty() const { return nodes_.empty(); }

  double operator()(double x0, double x1 = 0.0, double x2 = 0.0) const {
    if (nodes_.size() <= 128) {
      std::array<double, 128> buf;
      return eval_into(buf.data(), x0, x1, x2);
    }
    std::vector<double> buf(nodes_.size());
    return eval_into(buf.data(), x0, x1, x2);
  }

  /// Source text as given by the user (kept verbatim for reports).
  const std::string& source() const { return source_; }

  /// Canonical printed form; parse(str()) evaluates identically.
  std::string str() const { return print_node(root_, 0); }

  bool uses_variable(int index) const {
    for (const Node& n : nodes_)
      if (n.op == Op::Variable && n.var == index) return true;
    return false;
  }

  // Structural composition, used to build difference expressions for
  // domination checks (e.g. f - f_lower, g_star - abs(g)).
  friend Expression operator-(const Expression& a, const Expression& b) {
    return combine(Op::Sub, a, b);
  }
  friend Expression abs(const Expression& a) {
    Expression e = a;
    e.nodes_.push_back(Node{Op::Abs, -1, e.root_, -1, 0.0});
    e.root_ = static_cast<int>(e.nodes_.size()) - 1;
    e.source_ = "abs(" + a.source_ + ")";
    return e;
  }

private:
  enum class Op : std::uint8_t {
    Constant, Variable, Neg, Sin, Cos, Exp, Abs, Sqrt, Add, Sub, Mul, Div, Pow
  };

  struct Node {
    Op op;
    std::int8_t var;  // variable index for Op::Variable
    std::int32_t a, b;
    double value;
  };

  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::string> vars_;
  std::string source_;

  double eval_into(double* vals, double x0, double x1, double x2) const {
    const double xs[3] = {x0, x1, x2};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      double r;
      switch (n.op) {
        case Op::Constant: r = n.value; break;
        case Op::Variable: r = xs[n.var]; break;
        case Op::Neg:  r = -vals[n.a]; break;
        case Op::Sin:  r = std::sin(vals[n.a]); break;
        case Op::Cos:  r = std::cos(vals[n.a]); break;
        case Op::Exp:  r = std::exp(vals[n.a]); break;
        case Op::Abs:  r = std::fabs(vals[n.a]); break;
        case Op::Sqrt:
          if (vals[n.a] < 0.0) throw EvalError("sqrt of negative value");
          r = std::sqrt(vals[n.a]);
          break;
        case Op::Add: r = vals[n.a] + vals[n.b]; break;
        case Op::Sub: r = vals[n.a] - vals[n.b]; break;
        case Op::Mul: r = vals[n.a] * vals[n.b]; break;
        case Op::Div:
          if (vals[n.b] == 0.0) throw EvalError("division by zero");
          r = vals[n.a] / vals[n.b];
          break;
        case Op::Pow: {
          const double base = vals[n.a], ex = vals[n.b];
          if (base == 0.0 && ex < 0.0) throw EvalError("zero raised to a negative power");
          if (base < 0.0 && ex != std::nearbyint(ex))
            throw EvalError("fractional power of a negative base");
          r = std::pow(base, ex);
          break;
        }
      }
      if (!std::isfinite(r)) throw EvalError("non-finite value in evaluation");
      vals[i] = r;
    }
    return vals[root_];
  }

  // ---- printing ----

  static std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

  static int precedence(Op op) {
    switch (op) {
      case Op::Add: case Op::Sub: return 1;
      case Op::Mul: case Op::Div: return 2;
      case Op::Neg: return 3;
      case Op::Pow: return 4;
      default: return 5;
    }
  }

  int effective_precedence(int idx) const {
    const Node& n = nodes_[idx];
    if (n.op == Op::Constant && n.value < 0) return precedence(Op::Neg);
    return precedence(n.op);
  }

  std::string print_node(int idx, int) const {
    const Node& n = nodes_[idx];
    const int prec = precedence(n.op);
    auto child = [&](int c, bool paren_on_equal) {
      std::string s = print_node(c, 0);
      const int cp = effective_precedence(c);
      if (cp < prec || (cp == prec && paren_on_equal)) return "(" + s + ")";
      return s;
    };
    switch (n.op) {
      case Op::Constant: return format_number(n.value);
      case Op::Variable: return vars_[n.var];
      case Op::Neg: {
        std::string s = print_node(n.a, 0);
        if (effective_precedence(n.a) < prec) s = "(" + s + ")";
        return "-" + s;
      }
      case Op::Sin:  return "sin(" + print_node(n.a, 0) + ")";
      case Op::Cos:  return "cos(" + print_node(n.a, 0) + ")";
      case Op::Exp:  return "exp(" + print_node(n.a, 0) + ")";
      case Op::Abs:  return "abs(" + print_node(n.a, 0) + ")";
      case Op::Sqrt: return "sqrt(" + print_node(n.a, 0) + ")";
      case Op::Add: return child(n.a, false) + "+" + child(n.b, true);
      case Op::Sub: return child(n.a, false) + "-" + child(n.b, true);
      case Op::Mul: return child(n.a, false) + "*" + child(n.b, true);
      case Op::Div: return child(n.a, false) + "/" + child(n.b, true);
      case Op::Pow: return child(n.a, false) + "^" + child(n.b, true);
    }
    return {};
  }

  // ---- parsing ----

  struct Parser {
    std::string_view src;
    std::size_t pos;
    const std::vector<std::string>& vars;

    void skip_ws() {
      while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' ||
                                  src[pos] == '\n' || src[pos] == '\r'))
        ++pos;
    }

    bool accept(char c) {
      skip_ws();
      if (pos < src.size() && src[pos] == c) { ++pos; return true; }
      return false;
    }

    void expect(char c) {
      skip_ws();
      if (pos >= src.size() || src[pos] != c)
        throw ParseError(std::string("expected '") + c + "'", pos);
      ++pos;
    }

    static int push(std::vector<Node>& out, Node n) {
      out.push_back(n);
      return static_cast<int>(out.size()) - 1;
    }

    int parse_expression(std::vector<Node>& out) {
      int lhs = parse_term(out);
      for (;;) {
        if (accept('+')) lhs = push(out, {Op::Add, -1, lhs, parse_term(out), 0});
        else if (accept('-')) lhs = push(out, {Op::Sub, -1, lhs, parse_term(out), 0});
        else return lhs;
      }
    }

    int parse_term(std::vector<Node>& out) {
      int lhs = parse_unary(out);
      for (;;) {
        if (accept('*')) lhs = push(out, {Op::Mul, -1, lhs, parse_unary(out), 0});
        else if (accept('/')) lhs = push(out, {Op::Div, -1, lhs, parse_unary(out), 0});
        else return lhs;
      }
    }

    int parse_unary(std::vector<Node>& out) {
      if (accept('-')) return push(out, {Op::Neg, -1, parse_unary(out), -1, 0});
      return parse_power(out);
    }

    int parse_power(std::vector<Node>& out) {
      int lhs = parse_primary(out);
      while (accept('^'))
        lhs = push(out, {Op::Pow, -1, lhs, parse_exponent(out), 0});
      return lhs;
    }

    int parse_exponent(std::vector<Node>& out) {
      if (accept('-')) return push(out, {Op::Neg, -1, parse_exponent(out), -1, 0});
      return parse_primary(out);
    }

    int parse_primary(std::vector<Node>& out) {
      skip_ws();
      if (pos >= src.size()) throw ParseError("unexpected end of input", pos);
      const char c = src[pos];
      if (c == '(') {
        ++pos;
        int e = parse_expression(out);
        expect(')');
        return e;
      }
      if ((c >= '0' && c <= '9') || c == '.') return parse_number(out);
      if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier(out);
      throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }

    int parse_number(std::vector<Node>& out) {
      const std::size_t start = pos;
      while (pos < src.size() && ((src[pos] >= '0' && src[pos] <= '9') || src[pos] == '.'))
        ++pos;
      if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
        std::size_t e = pos + 1;
        if (e < src.size() && (src[e] == '+' || src[e] == '-')) ++e;
        if (e < src.size() && src[e] >= '0' && src[e] <= '9') {
          pos = e;
          while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') ++pos;
        }
      }
      const std::string text(src.substr(start, pos - start));
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size())
        throw ParseError("malformed number '" + text + "'", start);
      return push(out, {Op::Constant, -1, -1, -1, v});
    }

    int parse_identifier(std::vector<Node>& out) {
      const std::size_t start = pos;
      while (pos < src.size() && std::isalnum(static_cast<unsigned char>(src[pos]))) ++pos;
      const std::string_view name = src.substr(start, pos - start);
      skip_ws();
      const bool call = pos < src.size() && src[pos] == '(';
      if (call) {
        Op op;
        if (name == "sin") op = Op::Sin;
        else if (name == "cos") op = Op::Cos;
        else if (name == "exp") op = Op::Exp;
        else if (name == "abs") op = Op::Abs;
        else if (name == "sqrt") op = Op::Sqrt;
        else throw ParseError("unknown function '" + std::string(name) + "'", start);
        ++pos;  // '('
        int arg = parse_expression(out);
        expect(')');
        return push(out, {op, -1, arg, -1, 0});
      }
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (name == vars[i])
          return push(out, {Op::Variable, static_cast<std::int8_t>(i), -1, -1, 0});
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
  };

  static Expression combine(Op op, const Expression& a, const Expression& b) {
    Expression e = a;
    const int shift = static_cast<int>(e.nodes_.size());
    for (Node n : b.nodes_) {
      if (n.op != Op::Constant && n.op != Op::Variable) {
        n.a += shift;
        if (n.b >= 0) n.b += shift;
      }
      e.nodes_.push_back(n);
    }
    const int rb = b.root_ + shift;
    e.nodes_.push_back(Node{op, -1, e.root_, rb, 0.0});
    e.root_ = static_cast<int>(e.nodes_.size()) - 1;
    e.source_ = "(" + a.source_ + ")-(" + b.source_ + ")";
    if (e.vars_.empty()) e.vars_ = b.vars_;
    return e;
  }
};

inline double evaluate(const Expression& e, double t, double u = 0.0, double v = 0.0) {
  return e(t, u, v);
}

// ---------------------------------------------------------------------------
// Empirical bounds of an expression over a box, by dense tensor sampling with
// local refinement around the extremal samples. Non-rigorous by construction;
// certificates record the policy that produced a bound.
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool valid() const { return lo <= hi; }
};

struct Box3 {
  Interval t, u, v;
  bool valid() const { return t.valid() && u.valid() && v.valid(); }
};

struct SamplingPolicy {
  int samples_per_axis = 64;
  int refine_rounds = 2;
};

struct BoundReport {
  double lower = 0.0, upper = 0.0;
  std::array<double, 3> argmin{}, argmax{};
  long samples = 0;
};

namespace detail {
inline void linspace(double lo, double hi, int k, std::vector<double>& out) {
  out.clear();
  if (hi <= lo || k <= 1) { out.push_back(lo); return; }
  for (int i = 0; i < k; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / (k - 1));
}
}  // namespace detail

inline BoundReport bound_on_box(const Expression& e, const Box3& box,
                                const SamplingPolicy& policy = {}) {
  if (!box.valid()) throw std::invalid_argument("bound_on_box: invalid box");
  if (policy.samples_per_axis < 1) throw std::invalid_argument("bound_on_box: bad policy");

  BoundReport rep;
  rep.lower = std::numeric_limits<double>::infinity();
  rep.upper = -std::numeric_limits<double>::infinity();

  std::vector<double> ts, us, vs;
  auto scan = [&](const Box3& b, int k) {
    detail::linspace(b.t.lo, b.t.hi, k, ts);
    detail::linspace(b.u.lo, b.u.hi, k, us);
    detail::linspace(b.v.lo, b.v.hi, k, vs);
    for (double t : ts)
      for (double u : us)
        for (double v : vs) {
          double val;
          try {
            val = e(t, u, v);
          } catch (const EvalError& err) {
            char w[128];
            std::snprintf(w, sizeof(w), " at (t=%.12g, u=%.12g, v=%.12g)", t, u, v);
            throw EvalError(std::string(err.what()) + w);
          }
          ++rep.samples;
          if (val < rep.lower) { rep.lower = val; rep.argmin = {t, u, v}; }
          if (val > rep.upper) { rep.upper = val; rep.argmax = {t, u, v}; }
        }
  };

  scan(box, policy.samples_per_axis);

  auto cell_around = [&](const std::array<double, 3>& at, const Box3& within,
                         double frac) {
    auto sub = [&](double x, const Interval& iv) {
      const double h = (iv.hi - iv.lo) * frac;
      return Interval{std::max(iv.lo, x - h), std::min(iv.hi, x + h)};
    };
    return Box3{sub(at[0], within.t), sub(at[1], within.u), sub(at[2], within.v)};
  };

  const int k = policy.samples_per_axis;
  double frac = (k > 1) ? 1.0 / (k - 1) : 0.5;
  for (int round = 0; round < policy.refine_rounds; ++round) {
    scan(cell_around(rep.argmin, box, frac), k);
    scan(cell_around(rep.argmax, box, frac), k);
    frac /= (k > 1) ? (k - 1) / 2.0 : 2.0;
  }
  return rep;
}

}  // namespace hamcert

#endif  // HAMCERT_EXPR_HPP
