#include <cmath>
#include <numbers>
#include <sstream>

#include "cusplab/analysis.hpp"
#include "cusplab/billiard.hpp"
#include "cusplab/errors.hpp"
#include "cusplab/observable.hpp"
#include "cusplab/rng.hpp"
#include "doctest.h"

using namespace cusplab;
using namespace cusplab::analysis;
using std::numbers::pi;

namespace {

const billiard::TableGeometry& table() {
  static const auto g = billiard::TableGeometry::build(3.0, 1.0, 1.0);
  return g;
}

// min(max drop, max rise) over ordered pairs, clamped at zero.
double brute_M1(const std::vector<double>& v) {
  double drop = 0.0, rise = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      drop = std::max(drop, v[i] - v[j]);
      rise = std::max(rise, v[j] - v[i]);
    }
  return std::min(drop, rise);
}

}  // namespace

TEST_CASE("profile of trivial observables") {
  const auto& g = table();
  const auto zero = iv_profile(observable::Observable::parse("0"), g, 1.5);
  for (double v : zero.iv) CHECK(v == 0.0);
  CHECK(classify_convergence(zero) == ConvergenceClass::degenerate);
  const auto one = iv_profile(observable::Observable::parse("1"), g, 1.5);
  const double i1 = std::sqrt(pi) * std::tgamma(5.0 / 6.0) / std::tgamma(4.0 / 3.0);
  CHECK(one.i1.back() == doctest::Approx(i1).epsilon(1e-10));
  CHECK(one.iv.back() == doctest::Approx(i1).epsilon(1e-10));
  CHECK(one.iv.front() == 0.0);
  CHECK(one.psi.front() == 0.0);
  CHECK(one.psi.back() == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t k = 1; k < one.i1.size(); ++k) CHECK(one.i1[k] > one.i1[k - 1]);
  CHECK(one.slope() == doctest::Approx(1.0));
}

TEST_CASE("odd cancellation gives a vanishing profile") {
  // v = u(theta) on Gamma1 and -u(pi - theta) on Gamma2 with u = cos(2 theta) + theta.
  const auto obs = observable::Observable::parse(
      "(2 - curve)*(3 - curve)/2*(cos(2*theta) + theta) - (curve - 1)*(3 - curve)*(cos(2*(pi - theta)) + pi - theta)");
  const auto p = iv_profile(obs, table(), 1.5, 257);
  for (double v : p.iv) CHECK(std::fabs(v) < 1e-12);
}

TEST_CASE("Psi inverse") {
  const auto p = iv_profile_from_trace([](double) { return 1.0; }, 1.5, 1025);
  CHECK(psi_inverse(p, 0.0) == 0.0);
  CHECK(psi_inverse(p, 1.0) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(psi_inverse(p, 0.5) == doctest::Approx(pi / 2).epsilon(1e-9));
  for (int k = 0; k <= 100; ++k) {
    const double u = k / 100.0;
    CHECK(std::fabs(p.psi_at(psi_inverse(p, u)) - u) < 1e-8);
  }
  CHECK_THROWS_AS((void)psi_inverse(p, 1.5), InputError);
  CHECK_THROWS_AS((void)psi_inverse(p, -0.1), InputError);
}

TEST_CASE("classification of crafted traces") {
  auto classify = [](std::function<double(double)> f) {
    return classify_convergence(iv_profile_from_trace(std::move(f), 1.5, 1025));
  };
  CHECK(classify([](double t) { return 1.0 + 0.5 * std::cos(t); }) == ConvergenceClass::M1);
  CHECK(classify([](double t) { return 0.3 + std::sin(3 * t); }) == ConvergenceClass::M2_only);
  CHECK(classify([](double t) { return 0.02 + std::sin(3 * t); }) == ConvergenceClass::neither);
  CHECK(classify([](double t) { return -1.0 - 0.5 * std::cos(t); }) == ConvergenceClass::M1);
  CHECK(classify([](double) { return 0.0; }) == ConvergenceClass::degenerate);
  CHECK(to_string(ConvergenceClass::M2_only) == "M2_only");
}

TEST_CASE("crafted billiard observables classify as intended") {
  const auto& g = table();
  auto cls = [&](const char* s) {
    const auto obs = observable::center_observable_quadrature(observable::Observable::parse(s), g);
    return classify_convergence(iv_profile(obs, g, 1.5));
  };
  CHECK(cls("1 + 0.5*cos(theta) - 1.587*x") == ConvergenceClass::M1);
  CHECK(cls("0.3 + sin(3*theta) - 0.476*x") == ConvergenceClass::M2_only);
  CHECK(cls("0.02 + sin(3*theta) - 0.0317*x") == ConvergenceClass::neither);
}

TEST_CASE("excursion sums and shape prediction") {
  const auto& g = table();
  const auto c = observable::Observable::parse("0.75");
  for (const auto& p : billiard::sample_invariant_X(g, 4, 50)) {
    const auto start = billiard::state_of(g, p);
    const auto ex = billiard::first_return_from(g, start);
    const auto sums = excursion_sums(c, start, ex);
    REQUIRE(sums.size() == ex.phi + 1);
    CHECK(sums.front() == 0.0);
    CHECK(sums[1] == 0.75);
    CHECK(sums.back() == doctest::Approx(0.75 * static_cast<double>(ex.phi)));
    CHECK(induced_V(c, start, ex) == sums.back());
  }
  const auto prof = iv_profile_from_trace([](double t) { return 0.3 + std::sin(3 * t); }, 1.5, 1025);
  for (std::size_t phi : {1u, 7u, 1000u}) {
    CHECK(excursion_shape_prediction(prof, phi, 0) == 0.0);
    CHECK(excursion_shape_prediction(prof, phi, phi) == doctest::Approx(phi * prof.slope()).epsilon(1e-12));
    const auto curve = excursion_shape_curve(prof, phi);
    CHECK(curve.size() == phi + 1);
    CHECK(curve.front() == 0.0);
    CHECK(curve.back() == doctest::Approx(phi * prof.slope()).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)excursion_shape_prediction(prof, 5, 6), InputError);
}

TEST_CASE("deep excursion follows the predicted shape") {
  const auto& g = table();
  const auto obs = observable::Observable::parse("cos(theta)*(2 - curve)*(3 - curve)/2 + 0.25");
  const auto prof = iv_profile(obs, g, 1.5, 2049);
  const double psi0 = pi - std::asin(g.corner_height() / g.arc_radius());
  const double r_mid = g.range(billiard::Gamma3).r0 + g.arc_radius() * (pi - psi0);
  const auto start = billiard::state_of(g, {billiard::Gamma3, r_mid, pi / 2 + 1e-4});
  const auto ex = billiard::first_return_from(g, start);
  REQUIRE(ex.ok());
  const auto sums = excursion_sums(obs, start, ex);
  const auto pred = excursion_shape_curve(prof, ex.phi);
  double err = 0.0, scale = 0.0;
  for (std::size_t l = 0; l <= ex.phi; ++l) {
    err = std::max(err, std::fabs(sums[l] - pred[l]));
    scale = std::max(scale, std::fabs(pred[l]));
  }
  CHECK(err < 0.05 * scale);
}

TEST_CASE("M1 diagnostic") {
  CHECK(diag_M1(std::vector<double>{0, 1, -1, 2}) == 2.0);
  CHECK(diag_M1(std::vector<double>{0, 1, 1, 2, 5}) == 0.0);
  CHECK(diag_M1(std::vector<double>{3}) == 0.0);
  Philox rng(6);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> v(1 + static_cast<std::size_t>(rng.uniform() * 12));
    for (double& x : v) x = std::round(rng.uniform() * 16 - 8) / 4;
    CHECK(diag_M1(v) == brute_M1(v));
  }
}

TEST_CASE("M2 diagnostic") {
  CHECK(diag_M2(std::vector<double>{0, 2, -1, 1}, 1.0) == 2.0);
  CHECK(diag_M2(std::vector<double>{0, 0.5, 0.2, 1}, 1.0) == 0.0);
  CHECK(diag_M2(std::vector<double>{0, -0.5, -0.2, -1}, -1.0) == 0.0);
  Philox rng(8);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> v(2 + static_cast<std::size_t>(rng.uniform() * 12));
    v[0] = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) v[k] = v[k - 1] + std::round(rng.uniform() * 16 - 8) / 8;
    CHECK(diag_M2(v, v.back()) == diag_M2_definition(v, v.back()));
    CHECK(diag_M2(v, v.back()) >= 0.0);
  }
}

TEST_CASE("max diagnostic statistic") {
  const auto& g = table();
  const auto obs = observable::center_observable_quadrature(observable::Observable::parse("1 + 0.5*cos(theta) - 1.587*x"), g);
  const auto phi = max_diag_statistic(g, obs, Diagnostic::phi, 1000, 1.5, 3);
  CHECK(phi.flagged == 0);
  CHECK(phi.max_raw >= 2.0);
  CHECK(phi.value == doctest::Approx(phi.max_raw / 100.0));
  const auto again = max_diag_statistic(g, obs, Diagnostic::phi, 1000, 1.5, 3);
  CHECK(again.value == phi.value);
  const auto m2 = max_diag_statistic(g, obs, Diagnostic::M2, 1000, 1.5, 3);
  CHECK(m2.value >= 0.0);
}

TEST_CASE("profile csv") {
  const auto p = iv_profile_from_trace([](double) { return 1.0; }, 1.5, 5);
  std::ostringstream os;
  write_profile_csv(os, p);
  const std::string s = os.str();
  CHECK(s.rfind("s,I_v,I_1,Psi\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 6);
}
