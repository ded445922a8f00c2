#include "cusplab/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>

#include "cusplab/errors.hpp"
#include "cusplab/quadrature.hpp"
#include "cusplab/rng.hpp"
#include "cusplab/stable.hpp"

namespace cusplab::billiard {

using std::numbers::pi;

namespace {

constexpr std::size_t kTablePanels = 4096;

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
Vec2 normal_of(Vec2 tangent) { return {tangent.y, -tangent.x}; }

// Five-point Gauss-Legendre on [a,b].
template <class F>
double gauss5(F f, double a, double b) {
  static constexpr double x[5] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640,
                                  -0.9061798459386640};
  static constexpr double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                  0.2369268850561891, 0.2369268850561891};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += w[i] * f(c + h * x[i]);
  return s * h;
}

Vec2 cusp_tangent(Curve c, double x, double beta) {
  const double slope = std::pow(x, beta - 1.0);
  const double norm = std::hypot(1.0, slope);
  return c == Gamma1 ? Vec2{1.0 / norm, slope / norm} : Vec2{-1.0 / norm, slope / norm};
}

Vec2 tangent_at(const TableGeometry& g, Curve c, Vec2 p) {
  if (c == Gamma3) {
    const double psi = std::atan2(p.y, p.x - g.arc_center());
    return {-std::sin(psi), std::cos(psi)};
  }
  return cusp_tangent(c, std::max(p.x, 0.0), g.beta());
}

// First t > 0 at which the ray p + t v leaves the table through
// sigma*y = x^beta/beta (sigma = +1 upper curve, -1 lower), or nothing.
// G(t) = x(t)^beta/beta - sigma y(t) is convex in t and positive inside.
std::optional<long double> cusp_hit(double beta, double s_max, Vec2 p, Vec2 v, double sigma, double reach) {
  using ld = long double;
  const ld b = beta;
  const ld px = p.x, py = p.y, vx = v.x, vy = v.y, sg = sigma;
  ld t_end;
  if (vx > 0)
    t_end = (s_max - px) / vx;
  else if (vx < 0)
    t_end = -px / vx;
  else
    t_end = reach;
  if (!(t_end > 0)) return std::nullopt;
  auto xat = [&](ld t) { return std::max<ld>(px + t * vx, 0.0L); };
  auto G = [&](ld t) { return std::pow(xat(t), b) / b - sg * (py + t * vy); };
  auto dG = [&](ld t) { return vx * std::pow(xat(t), b - 1) - sg * vy; };
  if (!(G(0) > 0) || dG(0) >= 0) return std::nullopt;
  ld t_min;
  if (dG(t_end) <= 0) {
    t_min = t_end;
  } else {
    const ld xs = std::pow(sg * vy / vx, 1 / (b - 1));
    t_min = std::clamp<ld>((xs - px) / vx, 0, t_end);
  }
  if (G(t_min) > 0) return std::nullopt;
  // Newton from the left is monotone for a convex decreasing function.
  ld t = 0;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const ld g = G(t);
    if (g <= 0) {
      converged = true;
      break;
    }
    const ld step = -g / dG(t);
    if (!(step > 0) || t + step > t_min) break;
    if (step <= 1e-19L * (1 + t)) {
      t += step;
      converged = true;
      break;
    }
    t += step;
  }
  if (!converged) {
    ld lo = t, hi = t_min;
    for (int it = 0; it < 200 && hi - lo > 1e-19L * (1 + hi); ++it) {
      const ld mid = 0.5L * (lo + hi);
      (G(mid) > 0 ? lo : hi) = mid;
    }
    t = hi;
  }
  return t;
}

std::optional<double> arc_hit(const TableGeometry& g, Vec2 p, Vec2 v) {
  const Vec2 w{p.x - g.arc_center(), p.y};
  const double b = dot(v, w);
  const double cc = dot(w, w) - g.arc_radius() * g.arc_radius();
  const double disc = b * b - cc;
  if (b >= 0.0 || disc <= 0.0) return std::nullopt;
  const double t = cc / (-b + std::sqrt(disc));
  if (!(t > 0.0)) return std::nullopt;
  const double y = p.y + t * v.y;
  const double x = p.x + t * v.x;
  if (std::fabs(y) > g.corner_height() * (1.0 + 1e-12) || x > g.s_max() + 1e-12) return std::nullopt;
  return t;
}

CollisionRecord reflect(const TableGeometry& g, Curve c, Vec2 hit, Vec2 v_in, double flight, const Tolerances& tol) {
  CollisionRecord rec;
  rec.position = hit;
  rec.flight = flight;
  const Vec2 tau = tangent_at(g, c, hit);
  const Vec2 n = normal_of(tau);
  const double vn = dot(v_in, n);
  Vec2 out{v_in.x - 2.0 * vn * n.x, v_in.y - 2.0 * vn * n.y};
  const double len = std::hypot(out.x, out.y);
  out = {out.x / len, out.y / len};
  rec.velocity = out;
  rec.point.curve = c;
  rec.point.r = g.r_of(c, hit);
  rec.point.theta = std::atan2(dot(out, n), dot(out, tau));
  rec.in_X = c == Gamma3;
  rec.depth = c == Gamma3 ? g.s_max() : hit.x;
  if (rec.point.theta < tol.grazing || rec.point.theta > pi - tol.grazing) rec.flags |= kFlagGrazing;
  return rec;
}

}  // namespace

TableGeometry TableGeometry::build(double beta, double s_max, double arc_radius) {
  if (!(beta > 2.0) || !std::isfinite(beta)) throw InputError("flatness exponent beta must exceed 2");
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw InputError("s_max must be positive");
  TableGeometry g;
  g.beta_ = beta;
  g.s_max_ = s_max;
  g.radius_ = arc_radius;
  g.height_ = std::pow(s_max, beta) / beta;
  if (!(arc_radius > g.height_) || !std::isfinite(arc_radius))
    throw InputError("closing arc radius must exceed the corner height s_max^beta/beta");
  g.center_ = s_max + std::sqrt(arc_radius * arc_radius - g.height_ * g.height_);
  if (!(g.center_ - arc_radius > 0.0)) throw InputError("closing arc reaches the cusp: boundary self-intersects");
  g.psi0_ = pi - std::asin(g.height_ / arc_radius);

  // Arc-length table of Gamma1.
  g.dx_ = s_max / static_cast<double>(kTablePanels);
  g.table_.assign(kTablePanels + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t k = 0; k < kTablePanels; ++k) {
    const double a = g.dx_ * static_cast<double>(k);
    acc.add(integrate([&](double x) { return g.integrand(x); }, a, a + g.dx_, 1e-16, 200).value);
    g.table_[k + 1] = acc.value();
  }
  g.cusp_length_ = g.table_.back();
  const double arc_len = arc_radius * 2.0 * std::asin(g.height_ / arc_radius);
  g.ranges_[Gamma1] = {0.0, g.cusp_length_};
  g.ranges_[Gamma3] = {g.cusp_length_, g.cusp_length_ + arc_len};
  g.ranges_[Gamma2] = {g.cusp_length_ + arc_len, 2.0 * g.cusp_length_ + arc_len};
  g.perimeter_ = g.ranges_[Gamma2].r1;

  // The arc interior must stay strictly between the cusp curves.
  const int probes = 10000;
  for (int i = 1; i < probes; ++i) {
    const double psi = g.psi0_ + (2.0 * (pi - g.psi0_)) * i / probes;
    const double x = g.center_ + arc_radius * std::cos(psi);
    const double y = arc_radius * std::sin(psi);
    if (!(x > 0.0) || !(std::fabs(y) < std::pow(x, beta) / beta))
      throw InputError("closing arc crosses the cusp curves: boundary self-intersects");
  }
  const double angle = g.corner_angle();
  if (!(angle > 1e-6)) throw InputError("zero-angle corner between the closing arc and the cusp curves");
  return g;
}

double TableGeometry::integrand(double x) const { return std::sqrt(1.0 + std::pow(x, 2.0 * beta_ - 2.0)); }

double TableGeometry::corner_angle() const {
  const Vec2 t1 = cusp_tangent(Gamma1, s_max_, beta_);
  const Vec2 t3{-std::sin(psi0_), std::cos(psi0_)};
  return std::acos(std::clamp(-dot(t1, t3), -1.0, 1.0));
}

double TableGeometry::cusp_arc_length(double x) const {
  x = std::clamp(x, 0.0, s_max_);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(x / dx_), kTablePanels - 1);
  const double xk = dx_ * static_cast<double>(k);
  return table_[k] + gauss5([&](double u) { return integrand(u); }, xk, x);
}

double TableGeometry::cusp_abscissa(double s) const {
  s = std::clamp(s, 0.0, cusp_length_);
  const auto it = std::upper_bound(table_.begin(), table_.end(), s);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - table_.begin() - 1, 0)),
                                       kTablePanels - 1);
  const double xk = dx_ * static_cast<double>(k);
  double x = xk + (s - table_[k]) / integrand(xk);
  for (int it2 = 0; it2 < 20; ++it2) {
    const double step = (table_[k] + gauss5([&](double u) { return integrand(u); }, xk, x) - s) / integrand(x);
    x -= step;
    if (std::fabs(step) <= 1e-17 * (1.0 + x)) break;
  }
  return std::clamp(x, 0.0, s_max_);
}

Curve TableGeometry::curve_at(double r) const {
  if (r < ranges_[Gamma3].r0) return Gamma1;
  if (r < ranges_[Gamma2].r0) return Gamma3;
  return Gamma2;
}

BoundaryPoint TableGeometry::boundary_point(Curve c, double r) const {
  const CurveRange rg = ranges_[c];
  const double slack = 1e-12 * (1.0 + perimeter_);
  if (!(r >= rg.r0 - slack && r <= rg.r1 + slack)) throw InputError("arc length outside the curve's range");
  r = std::clamp(r, rg.r0, rg.r1);
  BoundaryPoint bp;
  if (c == Gamma3) {
    const double psi = psi0_ + (r - rg.r0) / radius_;
    bp.position = {center_ + radius_ * std::cos(psi), radius_ * std::sin(psi)};
    bp.tangent = {-std::sin(psi), std::cos(psi)};
    bp.curvature = 1.0 / radius_;
    return bp;
  }
  const double x = cusp_abscissa(c == Gamma1 ? r : perimeter_ - r);
  const double h = std::pow(x, beta_) / beta_;
  bp.position = {x, c == Gamma1 ? h : -h};
  bp.tangent = cusp_tangent(c, x, beta_);
  const double slope = std::pow(x, beta_ - 1.0);
  bp.curvature = (beta_ - 1.0) * std::pow(x, beta_ - 2.0) / std::pow(1.0 + slope * slope, 1.5);
  return bp;
}

double TableGeometry::r_of(Curve c, Vec2 p) const {
  switch (c) {
    case Gamma1:
      return cusp_arc_length(p.x);
    case Gamma2:
      return perimeter_ - cusp_arc_length(p.x);
    case Gamma3: {
      double psi = std::atan2(p.y, p.x - center_);
      if (psi < 0.0) psi += 2.0 * pi;
      return std::clamp(ranges_[Gamma3].r0 + radius_ * (psi - psi0_), ranges_[Gamma3].r0, ranges_[Gamma3].r1);
    }
  }
  throw InputError("unknown curve");
}

CollisionRecord state_of(const TableGeometry& g, const PhasePoint& p) {
  const BoundaryPoint bp = g.boundary_point(p.curve, p.r);
  const Vec2 n = normal_of(bp.tangent);
  CollisionRecord rec;
  rec.point = p;
  rec.position = bp.position;
  rec.velocity = {std::cos(p.theta) * bp.tangent.x + std::sin(p.theta) * n.x,
                  std::cos(p.theta) * bp.tangent.y + std::sin(p.theta) * n.y};
  rec.in_X = p.curve == Gamma3;
  rec.depth = p.curve == Gamma3 ? g.s_max() : bp.position.x;
  return rec;
}

CollisionRecord advance(const TableGeometry& g, const CollisionRecord& from, const Tolerances& tol) {
  const Vec2 p = from.position, v = from.velocity;
  const double reach = 4.0 * (g.arc_center() + g.arc_radius());
  double best = std::numeric_limits<double>::infinity();
  Curve hit_curve = Gamma3;
  Vec2 hit{};
  for (Curve c : {Gamma1, Gamma2}) {
    if (c == from.point.curve) continue;  // a dispersing curve is never hit twice in a row
    const auto t = cusp_hit(g.beta(), g.s_max(), p, v, c == Gamma1 ? 1.0 : -1.0, reach);
    if (t && static_cast<double>(*t) < best) {
      best = static_cast<double>(*t);
      hit_curve = c;
      const long double x = std::clamp<long double>(p.x + *t * v.x, 0.0L, g.s_max());
      const double h = static_cast<double>(std::pow(x, static_cast<long double>(g.beta())) / g.beta());
      hit = {static_cast<double>(x), c == Gamma1 ? h : -h};
    }
  }
  if (from.point.curve != Gamma3) {
    if (const auto t = arc_hit(g, p, v); t && *t < best) {
      best = *t;
      hit_curve = Gamma3;
      const Vec2 q{p.x + *t * v.x - g.arc_center(), p.y + *t * v.y};
      const double len = std::hypot(q.x, q.y);
      hit = {g.arc_center() + g.arc_radius() * q.x / len, g.arc_radius() * q.y / len};
    }
  }
  if (!std::isfinite(best)) {
    CollisionRecord fail = from;
    fail.flags |= kFlagRootFailure;
    return fail;
  }
  return reflect(g, hit_curve, hit, v, best, tol);
}

CollisionRecord collision_map(const TableGeometry& g, const PhasePoint& p, const Tolerances& tol) {
  if (!(p.theta > 0.0 && p.theta < pi)) throw InputError("grazing or out-of-range collision angle");
  const CollisionRecord next = advance(g, state_of(g, p), tol);
  if (next.flags & kFlagRootFailure) throw NumericalError("no boundary intersection found along the ray");
  return next;
}

PhasePoint time_reversal(const PhasePoint& p) { return {p.curve, p.r, pi - p.theta}; }

double reflection_residual(const TableGeometry& g, const CollisionRecord& before, const CollisionRecord& after) {
  const Vec2 tau = tangent_at(g, after.point.curve, after.position);
  const Vec2 n = normal_of(tau);
  return std::max(std::fabs(dot(after.velocity, tau) - dot(before.velocity, tau)),
                  std::fabs(dot(after.velocity, n) + dot(before.velocity, n)));
}

double boundary_residual(const TableGeometry& g, const CollisionRecord& rec) {
  const Vec2 p = rec.position;
  double on_curve;
  if (rec.point.curve == Gamma3) {
    on_curve = std::fabs(std::hypot(p.x - g.arc_center(), p.y) - g.arc_radius());
  } else {
    const double h = std::pow(std::max(p.x, 0.0), g.beta()) / g.beta();
    on_curve = std::fabs(p.y - (rec.point.curve == Gamma1 ? h : -h));
  }
  const Vec2 q = g.boundary_point(rec.point.curve, rec.point.r).position;
  return std::max(on_curve, std::hypot(q.x - p.x, q.y - p.y));
}

std::vector<PhasePoint> sample_invariant(const TableGeometry& g, std::uint64_t seed, std::size_t n) {
  Philox rng(seed);
  std::vector<PhasePoint> out(n);
  for (auto& p : out) {
    const double r = g.perimeter() * rng.uniform();
    const double theta = std::acos(1.0 - 2.0 * rng.uniform());
    p = {g.curve_at(r), r, theta};
  }
  return out;
}

std::vector<PhasePoint> sample_invariant_X(const TableGeometry& g, std::uint64_t seed, std::size_t n) {
  Philox rng(seed);
  const CurveRange rg = g.range(Gamma3);
  std::vector<PhasePoint> out(n);
  for (auto& p : out) {
    const double r = rg.r0 + (rg.r1 - rg.r0) * rng.uniform();
    const double theta = std::acos(1.0 - 2.0 * rng.uniform());
    p = {Gamma3, r, theta};
  }
  return out;
}

Excursion first_return_from(const TableGeometry& g, const CollisionRecord& start, const Tolerances& tol,
                            bool keep_records) {
  Excursion ex;
  CollisionRecord cur = start;
  for (std::size_t k = 1; k <= tol.excursion_cap; ++k) {
    CollisionRecord next = advance(g, cur, tol);
    if (keep_records) ex.records.push_back(next);
    ex.last = next;
    if (next.flags != kFlagNone) {
      ex.flags = next.flags;
      ex.phi = k;
      return ex;
    }
    if (next.in_X) {
      ex.phi = k;
      return ex;
    }
    cur = next;
  }
  ex.flags |= kFlagCapExceeded;
  ex.phi = tol.excursion_cap;
  return ex;
}

Excursion first_return(const TableGeometry& g, const PhasePoint& p, const Tolerances& tol, bool keep_records) {
  if (p.curve != Gamma3) throw InputError("first return needs a starting point on the closing arc");
  if (!(p.theta > 0.0 && p.theta < pi)) throw InputError("grazing or out-of-range collision angle");
  return first_return_from(g, state_of(g, p), tol, keep_records);
}

InvarianceReport measure_invariance_check(const TableGeometry& g, std::uint64_t seed, std::size_t n) {
  if (n == 0) throw InputError("invariance check needs n >= 1");
  const auto pts = sample_invariant(g, seed, n);
  std::vector<double> thetas, rs;
  thetas.reserve(n);
  rs.reserve(n);
  InvarianceReport rep;
  rep.n = n;
  for (const auto& p : pts) {
    if (!(p.theta > 0.0 && p.theta < pi)) {
      ++rep.failures;
      continue;
    }
    const CollisionRecord next = advance(g, state_of(g, p));
    if (next.flags & kFlagRootFailure) {
      ++rep.failures;
      continue;
    }
    thetas.push_back(next.point.theta);
    rs.push_back(next.point.r);
  }
  if (thetas.empty()) throw NumericalError("every collision failed in the invariance check");
  rep.ks_theta = stable::ks_statistic(thetas, [](double t) { return 0.5 * (1.0 - std::cos(t)); });
  const double perim = g.perimeter();
  rep.ks_r = stable::ks_statistic(rs, [perim](double r) { return std::clamp(r / perim, 0.0, 1.0); });
  return rep;
}

void write_orbit_csv(std::ostream& os, const std::vector<CollisionRecord>& orbit) {
  os << "step,curve,r,theta,x,y,in_X,flags\n" << std::setprecision(17);
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const auto& c = orbit[i];
    os << i << ',' << static_cast<int>(c.point.curve) + 1 << ',' << c.point.r << ',' << c.point.theta << ','
       << c.position.x << ',' << c.position.y << ',' << (c.in_X ? 1 : 0) << ',' << c.flags << '\n';
  }
}

}  // namespace cusplab::billiard
