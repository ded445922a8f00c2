#include "cusplab/observable.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cusplab/quadrature.hpp"

namespace cusplab::observable {

enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Var { Curve, R, Theta, X, Y };
enum class Func { Sin, Cos, Exp, Abs, Sqrt, Min2, Max2 };

struct Node {
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string literal;  // source spelling of numbers and constants
  Var var = Var::R;
  Func func = Func::Sin;
  std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

struct FuncInfo {
  const char* name;
  Func func;
  int arity;
};
constexpr FuncInfo kFuncs[] = {{"sin", Func::Sin, 1},   {"cos", Func::Cos, 1},   {"exp", Func::Exp, 1},
                               {"abs", Func::Abs, 1},   {"sqrt", Func::Sqrt, 1}, {"min2", Func::Min2, 2},
                               {"max2", Func::Max2, 2}};

struct VarInfo {
  const char* name;
  Var var;
};
constexpr VarInfo kVars[] = {{"curve", Var::Curve}, {"r", Var::R}, {"theta", Var::Theta}, {"x", Var::X}, {"y", Var::Y}};

NodePtr make(Kind k, std::vector<NodePtr> kids = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids = std::move(kids);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("syntax error at offset " + std::to_string(pos_) + ": " + msg, pos_);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Kind::Add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Kind::Sub, {lhs, term()});
      else
        return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Kind::Mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Kind::Div, {lhs, unary()});
      else
        return lhs;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, {unary()});
    return factor();
  }
  NodePtr factor() {
    NodePtr b = base();
    if (accept('^')) {
      const bool negative = accept('-');
      skip();
      NodePtr e = number();
      if (!e) fail("exponent must be a number");
      if (negative) e = make(Kind::Neg, {e});
      return make(Kind::Pow, {b, e});
    }
    return b;
  }
  NodePtr number() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ > start) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    if (pos_ == start) return nullptr;
    const std::string lit(s_.substr(start, pos_ - start));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
    if (ec != std::errc() || ptr != lit.data() + lit.size()) {
      pos_ = start;
      fail("malformed number '" + lit + "'");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = v;
    n->literal = lit;
    return n;
  }
  NodePtr base() {
    skip();
    if (pos_ >= s_.size()) fail("expected operand");
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (NodePtr n = number()) return n;
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start) fail("expected operand");
    const std::string_view id = s_.substr(start, pos_ - start);
    for (const auto& f : kFuncs) {
      if (id != f.name) continue;
      expect('(');
      auto call = std::make_shared<Node>();
      call->kind = Kind::Call;
      call->func = f.func;
      call->kids.push_back(expr());
      for (int i = 1; i < f.arity; ++i) {
        expect(',');
        call->kids.push_back(expr());
      }
      expect(')');
      return call;
    }
    for (const auto& v : kVars) {
      if (id != v.name) continue;
      auto n = std::make_shared<Node>();
      n->kind = Kind::Var;
      n->var = v.var;
      return n;
    }
    if (id == "pi") {
      auto n = std::make_shared<Node>();
      n->kind = Kind::Number;
      n->value = std::numbers::pi;
      n->literal = "pi";
      return n;
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(id) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, const EvalPoint& p) {
  switch (n.kind) {
    case Kind::Number:
      return n.value;
    case Kind::Var:
      switch (n.var) {
        case Var::Curve:
          return p.curve;
        case Var::R:
          return p.r;
        case Var::Theta:
          return p.theta;
        case Var::X:
          return p.x;
        case Var::Y:
          return p.y;
      }
      return 0.0;
    case Kind::Neg:
      return -eval(*n.kids[0], p);
    case Kind::Add:
      return eval(*n.kids[0], p) + eval(*n.kids[1], p);
    case Kind::Sub:
      return eval(*n.kids[0], p) - eval(*n.kids[1], p);
    case Kind::Mul:
      return eval(*n.kids[0], p) * eval(*n.kids[1], p);
    case Kind::Div:
      return eval(*n.kids[0], p) / eval(*n.kids[1], p);
    case Kind::Pow:
      return std::pow(eval(*n.kids[0], p), eval(*n.kids[1], p));
    case Kind::Call: {
      const double a = eval(*n.kids[0], p);
      switch (n.func) {
        case Func::Sin:
          return std::sin(a);
        case Func::Cos:
          return std::cos(a);
        case Func::Exp:
          return std::exp(a);
        case Func::Abs:
          return std::fabs(a);
        case Func::Sqrt:
          return std::sqrt(a);
        case Func::Min2:
          return std::min(a, eval(*n.kids[1], p));
        case Func::Max2:
          return std::max(a, eval(*n.kids[1], p));
      }
    }
  }
  return 0.0;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print(const Node& n, std::ostream& os);

void print_wrapped(const Node& n, bool wrap, std::ostream& os) {
  if (wrap) os << '(';
  print(n, os);
  if (wrap) os << ')';
}

void print(const Node& n, std::ostream& os) {
  const int prec = precedence(n);
  switch (n.kind) {
    case Kind::Number:
      if (!n.literal.empty()) {
        os << n.literal;
      } else {
        std::ostringstream tmp;
        tmp.precision(17);
        tmp << n.value;
        os << tmp.str();
      }
      return;
    case Kind::Var:
      for (const auto& v : kVars)
        if (v.var == n.var) os << v.name;
      return;
    case Kind::Neg:
      os << '-';
      print_wrapped(*n.kids[0], precedence(*n.kids[0]) < prec, os);
      return;
    case Kind::Pow:
      print_wrapped(*n.kids[0], precedence(*n.kids[0]) < 5, os);
      os << '^';
      print(*n.kids[1], os);
      return;
    case Kind::Call:
      for (const auto& f : kFuncs)
        if (f.func == n.func) os << f.name;
      os << '(';
      print(*n.kids[0], os);
      for (std::size_t i = 1; i < n.kids.size(); ++i) {
        os << ", ";
        print(*n.kids[i], os);
      }
      os << ')';
      return;
    default: {
      const char op = n.kind == Kind::Add ? '+' : n.kind == Kind::Sub ? '-' : n.kind == Kind::Mul ? '*' : '/';
      print_wrapped(*n.kids[0], precedence(*n.kids[0]) < prec, os);
      os << ' ' << op << ' ';
      print_wrapped(*n.kids[1], precedence(*n.kids[1]) <= prec, os);
    }
  }
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t offset) : InputError(what), offset_(offset) {}

EvalPoint point_of(const billiard::CollisionRecord& rec) {
  return {static_cast<double>(rec.point.curve) + 1.0, rec.point.r, rec.point.theta, rec.position.x, rec.position.y};
}

Observable Observable::parse(std::string_view text, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("declared Hoelder exponent must lie in (0,1]");
  Observable o;
  o.root_ = Parser(text).parse();
  o.eta_ = eta;
  return o;
}

double Observable::raw(const EvalPoint& p) const { return eval(*root_, p); }

std::string Observable::to_string() const {
  std::ostringstream os;
  print(*root_, os);
  return os.str();
}

Observable Observable::with_adjustment(double mean, double stderr_) const {
  Observable o = *this;
  o.mean_adjustment_ = mean;
  o.mean_stderr_ = stderr_;
  return o;
}

Observable center_observable(const Observable& obs, const billiard::TableGeometry& geom, std::uint64_t seed,
                             std::size_t n) {
  if (n < 1000) throw InputError("centering needs at least 1000 samples");
  const auto pts = billiard::sample_invariant(geom, seed, n);
  CompensatedSum sum, sum_sq;
  std::vector<double> vals;
  vals.reserve(n);
  for (const auto& p : pts) {
    const auto bp = geom.boundary_point(p.curve, p.r);
    const double v = obs.raw({static_cast<double>(p.curve) + 1.0, p.r, p.theta, bp.position.x, bp.position.y});
    if (!std::isfinite(v)) throw InputError("observable is not finite on phase space");
    vals.push_back(v);
    sum.add(v);
  }
  const double mean = sum.value() / static_cast<double>(n);
  for (double v : vals) sum_sq.add((v - mean) * (v - mean));
  const double var = sum_sq.value() / static_cast<double>(n - 1);
  return obs.with_adjustment(mean, std::sqrt(var / static_cast<double>(n)));
}

Observable center_observable_quadrature(const Observable& obs, const billiard::TableGeometry& geom,
                                        double abs_tol) {
  CompensatedSum total;
  double err = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto curve = static_cast<billiard::Curve>(c);
    const auto range = geom.range(curve);
    double inner_err = 0.0;
    const auto outer = integrate(
        [&](double r) {
          const auto bp = geom.boundary_point(curve, r);
          const auto q = integrate(
              [&](double t) {
                const double v = obs.raw({c + 1.0, r, t, bp.position.x, bp.position.y});
                if (!std::isfinite(v)) throw InputError("observable is not finite on phase space");
                return v * std::sin(t);
              },
              0.0, std::numbers::pi, abs_tol * 0.1);
          inner_err = std::max(inner_err, q.error);
          return q.value;
        },
        range.r0, range.r1, abs_tol);
    total.add(outer.value);
    err += outer.error + inner_err * (range.r1 - range.r0);
  }
  const double norm = 2.0 * geom.perimeter();
  return obs.with_adjustment(total.value() / norm, err / norm);
}

}  // namespace cusplab::observable
