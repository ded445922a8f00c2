#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cusplab/billiard.hpp"
#include "cusplab/observable.hpp"

namespace cusplab::analysis {

// Tabulated I_v(s) = 1/2 int_0^s {v(r', t) + v(r'', pi - t)} (sin t)^{1/alpha} dt
// alongside I_1 and Psi = I_1 / I_1(pi). Here r' is the cusp end of the curve
// whose tangent points into the cusp (Gamma2 under the clockwise orientation)
// and r'' the cusp end of Gamma1, so that t runs from 0 to pi along a cusp
// excursion.
struct IvProfile {
  double alpha = 1.5;
  std::vector<double> s;
  std::vector<double> iv;
  std::vector<double> i1;
  std::vector<double> psi;
  double error_bound = 0.0;
  // Integrand of I_v (without the weight) as a function of the angle.
  std::function<double(double)> cusp_trace;

  double iv_at(double s) const;
  double i1_at(double s) const;
  double psi_at(double s) const;
  // I = I_v(pi) / I_1(pi).
  double slope() const { return iv.back() / i1.back(); }
};

// Builds a profile from an explicit cusp trace t -> 1/2 {v(r',t) + v(r'',pi-t)}.
IvProfile iv_profile_from_trace(std::function<double(double)> trace, double alpha, std::size_t gridsize);
IvProfile iv_profile(const observable::Observable& obs, const billiard::TableGeometry& geom, double alpha,
                     std::size_t gridsize = 1025);

// Throws InputError unless 0 <= u <= 1.
double psi_inverse(const IvProfile& profile, double u);

enum class ConvergenceClass { M1, M2_only, neither, degenerate };
std::string to_string(ConvergenceClass c);

// tol < 0 selects 1e-6 * max |I_v|.
ConvergenceClass classify_convergence(const IvProfile& profile, double tol = -1.0);

// Partial sums v_0 = 0, v_l = sum_{j<l} v(T^j x) for l = 1..phi, started at
// `start` (on the arc) with `ex` the records T x, ..., T^phi x.
std::vector<double> excursion_sums(const observable::Observable& obs, const billiard::CollisionRecord& start,
                                   const billiard::Excursion& ex);
double induced_V(const observable::Observable& obs, const billiard::CollisionRecord& start,
                 const billiard::Excursion& ex);

// phi I_1(pi)^{-1} I_v(Psi^{-1}(ell/phi)); throws InputError unless 0 <= ell <= phi.
double excursion_shape_prediction(const IvProfile& profile, std::size_t phi, std::size_t ell);
// The prediction for every ell = 0..phi, interpolated from the tabulated profile.
std::vector<double> excursion_shape_curve(const IvProfile& profile, std::size_t phi);

// M1 over partial sums v_1..v_phi: min(max drop, max rise).
double diag_M1(std::span<const double> sums);
// M2 over partial sums v_0..v_phi (v_0 = 0, v_phi = V): max - min - |V|.
double diag_M2(std::span<const double> sums, double V);
// The two-term definition as a minimum of sums, for cross-checking.
double diag_M2_definition(std::span<const double> sums, double V);

enum class Diagnostic { M1, M2, phi };

struct DiagStatistic {
  double value = 0.0;  // n^{-1/alpha} max_{j<=n} diagnostic
  double max_raw = 0.0;
  std::size_t flagged = 0;
};

// Simulates n consecutive first returns from a start drawn from mu_X.
DiagStatistic max_diag_statistic(const billiard::TableGeometry& geom, const observable::Observable& obs,
                                 Diagnostic which, std::size_t n, double alpha, std::uint64_t seed);

void write_profile_csv(std::ostream& os, const IvProfile& profile);

}  // namespace cusplab::analysis
