#include <cmath>
#include <numbers>
#include <set>

#include "cusplab/quadrature.hpp"
#include "cusplab/rng.hpp"
#include "doctest.h"

using cusplab::Philox;

TEST_CASE("philox is deterministic per seed and stream") {
  Philox a(42), b(42), c(42, 1), d(43);
  bool differ_stream = false, differ_seed = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    differ_stream |= x != c();
    differ_seed |= x != d();
  }
  CHECK(differ_stream);
  CHECK(differ_seed);
}

TEST_CASE("uniform lies in the open unit interval with the right mean") {
  Philox rng(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("derived seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(Philox::derive(1, i));
  CHECK(seen.size() == 10000);
  CHECK(Philox::derive(1, 5) == Philox::derive(1, 5));
}

TEST_CASE("adaptive quadrature integrates smooth and endpoint-singular integrands") {
  const auto q = cusplab::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(q.value == doctest::Approx(2.0).epsilon(1e-13));
  const auto r = cusplab::integrate([](double x) { return std::pow(std::sin(x), 2.0 / 3.0); }, 0.0, std::numbers::pi, 1e-10);
  // int_0^pi sin^{2/3} = sqrt(pi) Gamma(5/6) / Gamma(4/3)
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi) * std::tgamma(5.0 / 6.0) / std::tgamma(4.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("compensated sum recovers small addends") {
  cusplab::CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}
