#include "cusplab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "cusplab/errors.hpp"
#include "cusplab/quadrature.hpp"
#include "cusplab/rng.hpp"

namespace cusplab::analysis {

using std::numbers::pi;

namespace {

std::size_t node_below(const std::vector<double>& grid, double s) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), s);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - grid.begin() - 1, 0));
  return std::min(k, grid.size() - 2);
}

double weight(double t, double alpha) { return std::pow(std::max(std::sin(t), 0.0), 1.0 / alpha); }

}  // namespace

double IvProfile::iv_at(double x) const {
  const std::size_t k = node_below(s, x);
  return iv[k] + integrate([&](double t) { return cusp_trace(t) * weight(t, alpha); }, s[k], x, 1e-13).value;
}

double IvProfile::i1_at(double x) const {
  const std::size_t k = node_below(s, x);
  return i1[k] + integrate([&](double t) { return weight(t, alpha); }, s[k], x, 1e-13).value;
}

double IvProfile::psi_at(double x) const {
  if (x >= pi) return 1.0;
  if (x <= 0.0) return 0.0;
  return i1_at(x) / i1.back();
}

IvProfile iv_profile_from_trace(std::function<double(double)> trace, double alpha, std::size_t gridsize) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw InputError("alpha must lie in (1,2)");
  if (gridsize < 2) throw InputError("profile grid needs at least two nodes");
  IvProfile p;
  p.alpha = alpha;
  p.cusp_trace = std::move(trace);
  p.s.resize(gridsize);
  p.iv.assign(gridsize, 0.0);
  p.i1.assign(gridsize, 0.0);
  p.psi.assign(gridsize, 0.0);
  for (std::size_t k = 0; k < gridsize; ++k) p.s[k] = pi * static_cast<double>(k) / static_cast<double>(gridsize - 1);
  p.s.back() = pi;
  const double panel_tol = 1e-10 / static_cast<double>(gridsize);
  CompensatedSum acc_v, acc_1;
  for (std::size_t k = 0; k + 1 < gridsize; ++k) {
    const auto rv = integrate([&](double t) { return p.cusp_trace(t) * weight(t, alpha); }, p.s[k], p.s[k + 1],
                              panel_tol, 4000);
    const auto r1 = integrate([&](double t) { return weight(t, alpha); }, p.s[k], p.s[k + 1], panel_tol, 4000);
    acc_v.add(rv.value);
    acc_1.add(r1.value);
    p.iv[k + 1] = acc_v.value();
    p.i1[k + 1] = acc_1.value();
    p.error_bound += rv.error + r1.error;
  }
  for (std::size_t k = 0; k < gridsize; ++k) p.psi[k] = p.i1[k] / p.i1.back();
  p.psi.front() = 0.0;
  p.psi.back() = 1.0;
  for (std::size_t k = 1; k < gridsize; ++k)
    if (!(p.i1[k] > p.i1[k - 1])) throw NumericalError("I_1 failed to be strictly increasing on the grid");
  return p;
}

IvProfile iv_profile(const observable::Observable& obs, const billiard::TableGeometry& geom, double alpha,
                     std::size_t gridsize) {
  // The cusp is the point (0,0): r = 0 on Gamma1 and r = |dQ| on Gamma2.
  // With theta clockwise from the tangent of a clockwise-traversed boundary,
  // an orbit enters the cusp at theta ~ 0 on Gamma2 (whose tangent points
  // into the cusp) and at theta ~ pi on Gamma1, and leaves the other way
  // round; the trace is oriented so that t sweeps 0 -> pi along an excursion.
  const double perimeter = geom.perimeter();
  auto trace = [obs, perimeter](double t) {
    const observable::EvalPoint inward{2.0, perimeter, t, 0.0, 0.0};
    const observable::EvalPoint outward{1.0, 0.0, pi - t, 0.0, 0.0};
    return 0.5 * (obs(inward) + obs(outward));
  };
  return iv_profile_from_trace(trace, alpha, gridsize);
}

double psi_inverse(const IvProfile& profile, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw InputError("psi_inverse needs u in [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return pi;
  const std::size_t k = node_below(profile.psi, u);
  double lo = profile.s[k], hi = profile.s[k + 1];
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (profile.psi_at(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string to_string(ConvergenceClass c) {
  switch (c) {
    case ConvergenceClass::M1:
      return "M1";
    case ConvergenceClass::M2_only:
      return "M2_only";
    case ConvergenceClass::neither:
      return "neither";
    case ConvergenceClass::degenerate:
      return "degenerate";
  }
  return "unknown";
}

ConvergenceClass classify_convergence(const IvProfile& profile, double tol) {
  double scale = 0.0;
  for (double v : profile.iv) scale = std::max(scale, std::fabs(v));
  if (tol < 0.0) tol = 1e-6 * scale;
  const double end = profile.iv.back();
  if (std::fabs(end) <= tol) return ConvergenceClass::degenerate;
  const double sign = end > 0.0 ? 1.0 : -1.0;
  bool monotone = true;
  bool corridor = true;
  for (std::size_t k = 0; k < profile.iv.size(); ++k) {
    const double v = sign * profile.iv[k];
    if (k > 0 && v < sign * profile.iv[k - 1] - tol) monotone = false;
    if (v < -tol || v > sign * end + tol) corridor = false;
  }
  if (monotone) return ConvergenceClass::M1;
  return corridor ? ConvergenceClass::M2_only : ConvergenceClass::neither;
}

std::vector<double> excursion_sums(const observable::Observable& obs, const billiard::CollisionRecord& start,
                                   const billiard::Excursion& ex) {
  if (ex.records.size() < ex.phi) throw InputError("excursion records were not kept");
  std::vector<double> sums;
  sums.reserve(ex.phi + 1);
  sums.push_back(0.0);
  CompensatedSum acc;
  acc.add(obs(start));
  sums.push_back(acc.value());
  for (std::size_t l = 1; l < ex.phi; ++l) {
    acc.add(obs(ex.records[l - 1]));
    sums.push_back(acc.value());
  }
  return sums;
}

double induced_V(const observable::Observable& obs, const billiard::CollisionRecord& start,
                 const billiard::Excursion& ex) {
  return excursion_sums(obs, start, ex).back();
}

double excursion_shape_prediction(const IvProfile& profile, std::size_t phi, std::size_t ell) {
  if (phi == 0 || ell > phi) throw InputError("excursion index out of range");
  if (ell == 0) return 0.0;
  const double f = static_cast<double>(phi);
  if (ell == phi) return f * profile.slope();
  return f / profile.i1.back() * profile.iv_at(psi_inverse(profile, static_cast<double>(ell) / f));
}

std::vector<double> excursion_shape_curve(const IvProfile& profile, std::size_t phi) {
  if (phi == 0) throw InputError("excursion length must be positive");
  const double f = static_cast<double>(phi);
  std::vector<double> out(phi + 1, 0.0);
  for (std::size_t ell = 1; ell < phi; ++ell) {
    const double u = static_cast<double>(ell) / f;
    const std::size_t k = node_below(profile.psi, u);
    const double w = (u - profile.psi[k]) / (profile.psi[k + 1] - profile.psi[k]);
    out[ell] = f / profile.i1.back() * (profile.iv[k] + w * (profile.iv[k + 1] - profile.iv[k]));
  }
  out[phi] = f * profile.slope();
  return out;
}

double diag_M1(std::span<const double> sums) {
  if (sums.empty()) throw InputError("diagnostic needs a nonempty excursion");
  double hi = sums[0], lo = sums[0], drop = 0.0, rise = 0.0;
  for (double v : sums) {
    hi = std::max(hi, v);
    lo = std::min(lo, v);
    drop = std::max(drop, hi - v);
    rise = std::max(rise, v - lo);
  }
  return std::min(drop, rise);
}

double diag_M2(std::span<const double> sums, double V) {
  if (sums.empty()) throw InputError("diagnostic needs a nonempty excursion");
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  return *hi - *lo - std::fabs(V);
}

double diag_M2_definition(std::span<const double> sums, double V) {
  if (sums.empty()) throw InputError("diagnostic needs a nonempty excursion");
  double neg = -sums[0], over = sums[0] - V, pos = sums[0], under = V - sums[0];
  for (double v : sums) {
    neg = std::max(neg, -v);
    over = std::max(over, v - V);
    pos = std::max(pos, v);
    under = std::max(under, V - v);
  }
  return std::min(neg + over, pos + under);
}

DiagStatistic max_diag_statistic(const billiard::TableGeometry& geom, const observable::Observable& obs,
                                 Diagnostic which, std::size_t n, double alpha, std::uint64_t seed) {
  if (n == 0) throw InputError("statistic needs n >= 1");
  if (!(alpha > 1.0 && alpha < 2.0)) throw InputError("alpha must lie in (1,2)");
  DiagStatistic out;
  std::uint64_t restart = 0;
  auto fresh = [&] {
    const auto p = billiard::sample_invariant_X(geom, Philox::derive(seed, restart++), 1).front();
    return billiard::state_of(geom, p);
  };
  billiard::CollisionRecord cur = fresh();
  const bool need_records = which != Diagnostic::phi;
  for (std::size_t j = 0; j < n; ++j) {
    const billiard::Excursion ex = billiard::first_return_from(geom, cur, {}, need_records);
    if (!ex.ok()) {
      ++out.flagged;
      cur = fresh();
      continue;
    }
    double d;
    if (which == Diagnostic::phi) {
      d = static_cast<double>(ex.phi);
    } else {
      const auto sums = excursion_sums(obs, cur, ex);
      d = which == Diagnostic::M1 ? diag_M1(std::span<const double>(sums).subspan(1)) : diag_M2(sums, sums.back());
    }
    out.max_raw = std::max(out.max_raw, d);
    cur = ex.last;
  }
  out.value = out.max_raw / std::pow(static_cast<double>(n), 1.0 / alpha);
  return out;
}

void write_profile_csv(std::ostream& os, const IvProfile& profile) {
  os << "s,I_v,I_1,Psi\n" << std::setprecision(17);
  for (std::size_t k = 0; k < profile.s.size(); ++k)
    os << profile.s[k] << ',' << profile.iv[k] << ',' << profile.i1[k] << ',' << profile.psi[k] << '\n';
}

}  // namespace cusplab::analysis
