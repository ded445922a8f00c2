#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cusplab::billiard {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Gamma1 = {(s, s^beta/beta)}, Gamma2 = {(s, -s^beta/beta)}, Gamma3 = closing arc.
enum Curve : int { Gamma1 = 0, Gamma2 = 1, Gamma3 = 2 };

struct BoundaryPoint {
  Vec2 position;
  Vec2 tangent;  // unit tangent along increasing r
  double curvature = 0.0;
};

struct CurveRange {
  double r0 = 0.0;
  double r1 = 0.0;
};

// Cusp table: the region {0 < x, |y| < x^beta/beta} outside the disc of
// radius arc_radius centred on the x-axis through (s_max, +-s_max^beta/beta).
// The boundary is traversed clockwise (the table on the right): Gamma1 from
// the cusp to the upper corner, the arc down to the lower corner, Gamma2 back
// to the cusp. Arc length r starts at the cusp.
class TableGeometry {
 public:
  // Throws InputError if the parameters do not give a simple dispersing table.
  static TableGeometry build(double beta, double s_max, double arc_radius);

  double beta() const { return beta_; }
  double alpha() const { return beta_ / (beta_ - 1.0); }
  double s_max() const { return s_max_; }
  double arc_radius() const { return radius_; }
  double arc_center() const { return center_; }
  double corner_height() const { return height_; }
  double perimeter() const { return perimeter_; }
  CurveRange range(Curve c) const { return ranges_[c]; }
  double cusp_curve_length() const { return cusp_length_; }
  double arc_length() const { return ranges_[Gamma3].r1 - ranges_[Gamma3].r0; }

  Curve curve_at(double r) const;
  BoundaryPoint boundary_point(Curve c, double r) const;

  // Arc length along Gamma1 from the cusp to abscissa x, and its inverse.
  double cusp_arc_length(double x) const;
  double cusp_abscissa(double s) const;
  // r of a point assumed to lie on curve c.
  double r_of(Curve c, Vec2 p) const;

  // Angle between the curves meeting at the two corners, in radians.
  double corner_angle() const;

 private:
  TableGeometry() = default;
  double integrand(double x) const;

  double beta_ = 3.0, s_max_ = 1.0, radius_ = 1.0;
  double center_ = 0.0, height_ = 0.0, psi0_ = 0.0;
  double cusp_length_ = 0.0, perimeter_ = 0.0;
  std::array<CurveRange, 3> ranges_{};
  // Cumulative arc length of Gamma1 on a uniform abscissa grid.
  std::vector<double> table_;
  double dx_ = 0.0;
};

struct PhasePoint {
  Curve curve = Gamma3;
  double r = 0.0;
  double theta = 0.0;  // clockwise from the tangent, in [0, pi]
};

enum RecordFlags : unsigned {
  kFlagNone = 0,
  kFlagGrazing = 1u << 0,
  kFlagRootFailure = 1u << 1,
  kFlagCapExceeded = 1u << 2,
};

struct CollisionRecord {
  PhasePoint point;
  Vec2 position;
  Vec2 velocity;  // outgoing unit velocity
  double flight = 0.0;
  bool in_X = false;
  double depth = 0.0;  // abscissa of the collision on the cusp curves, s_max on the arc
  unsigned flags = kFlagNone;
};

struct Tolerances {
  double grazing = 1e-12;
  std::size_t excursion_cap = 10'000'000;
};

// Outgoing state at a phase point.
CollisionRecord state_of(const TableGeometry& g, const PhasePoint& p);
// One step of the collision map from a full state (avoids r round-trips).
CollisionRecord advance(const TableGeometry& g, const CollisionRecord& from, const Tolerances& tol = {});
// Throws InputError on grazing input; NumericalError if no boundary hit is found.
CollisionRecord collision_map(const TableGeometry& g, const PhasePoint& p, const Tolerances& tol = {});

PhasePoint time_reversal(const PhasePoint& p);

// |angle of incidence - angle of reflection| relative to the tangent at the hit.
double reflection_residual(const TableGeometry& g, const CollisionRecord& before, const CollisionRecord& after);
// Distance of the recorded position from the curve it claims to lie on.
double boundary_residual(const TableGeometry& g, const CollisionRecord& rec);

std::vector<PhasePoint> sample_invariant(const TableGeometry& g, std::uint64_t seed, std::size_t n);
// Draws from mu restricted to X (the arc), normalized.
std::vector<PhasePoint> sample_invariant_X(const TableGeometry& g, std::uint64_t seed, std::size_t n);

struct Excursion {
  std::size_t phi = 0;
  std::vector<CollisionRecord> records;  // T p, ..., T^phi p
  CollisionRecord last;                  // T^phi p, kept even without records
  unsigned flags = kFlagNone;
  bool ok() const { return flags == kFlagNone; }
};

// Throws InputError unless p lies on the arc. Failures inside the excursion
// are reported through flags rather than exceptions.
Excursion first_return(const TableGeometry& g, const PhasePoint& p, const Tolerances& tol = {},
                       bool keep_records = true);
Excursion first_return_from(const TableGeometry& g, const CollisionRecord& start, const Tolerances& tol = {},
                            bool keep_records = true);

struct InvarianceReport {
  std::size_t n = 0;
  double ks_theta = 0.0;
  double ks_r = 0.0;
  std::size_t failures = 0;
};

InvarianceReport measure_invariance_check(const TableGeometry& g, std::uint64_t seed, std::size_t n);

void write_orbit_csv(std::ostream& os, const std::vector<CollisionRecord>& orbit);

}  // namespace cusplab::billiard
