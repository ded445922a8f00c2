#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "cusplab/billiard.hpp"
#include "cusplab/errors.hpp"

namespace cusplab::observable {

// Point at which an observable is evaluated; curve is 1, 2, 3 for
// Gamma1, Gamma2, Gamma3.
struct EvalPoint {
  double curve = 3.0;
  double r = 0.0;
  double theta = 0.0;
  double x = 0.0;
  double y = 0.0;
};

EvalPoint point_of(const billiard::CollisionRecord& rec);

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct Node;

// Expression over (curve, r, theta, x, y):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := base ('^' ['-'] number)?
//   base   := number | ident | func '(' expr (',' expr)? ')' | '(' expr ')'
// with ident in {r, theta, x, y, curve, pi} and func in
// {sin, cos, exp, abs, sqrt, min2, max2}; min2/max2 take two arguments.
class Observable {
 public:
  // Throws ParseError (with the offending offset) on malformed text.
  static Observable parse(std::string_view text, double eta = 1.0);

  // Value with the recorded mean adjustment subtracted.
  double operator()(const EvalPoint& p) const { return raw(p) - mean_adjustment_; }
  double operator()(const billiard::CollisionRecord& rec) const { return (*this)(point_of(rec)); }
  double raw(const EvalPoint& p) const;

  // Canonical text; parsing it yields the same tree.
  std::string to_string() const;

  double eta() const { return eta_; }
  double mean_adjustment() const { return mean_adjustment_; }
  double mean_stderr() const { return mean_stderr_; }
  Observable with_adjustment(double mean, double stderr_) const;

 private:
  std::shared_ptr<const Node> root_;
  double eta_ = 1.0;
  double mean_adjustment_ = 0.0;
  double mean_stderr_ = 0.0;
};

// Subtracts the Monte-Carlo mean over the invariant measure; n >= 1000.
// Throws InputError if the observable is not finite on phase space.
Observable center_observable(const Observable& obs, const billiard::TableGeometry& geom, std::uint64_t seed,
                             std::size_t n);

// Deterministic mu-mean by nested adaptive quadrature of
// (2|dQ|)^{-1} int int v sin(theta) dtheta dr; the error estimate is returned
// as the standard error.
Observable center_observable_quadrature(const Observable& obs, const billiard::TableGeometry& geom,
                                        double abs_tol = 1e-11);

}  // namespace cusplab::observable
