#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cusplab/rng.hpp"

namespace cusplab::stable {

// Totally right-skewed alpha-stable law G with characteristic function
//   E exp(iuG) = exp{-|u|^alpha sigma^alpha (1 - i sgn(u) tan(pi alpha / 2))},
// i.e. the S1 parametrization with skewness +1 and zero shift. The
// Chambers-Mallows-Stuck sampler below is written directly in S1, so no
// conversion is needed between sampler and characteristic function.
struct StableParams {
  double alpha = 1.5;
  double sigma = 1.0;

  // Throws InputError unless 1 < alpha < 2 and sigma > 0.
  static StableParams make(double alpha, double sigma);
  // sigma from sigma^alpha.
  static StableParams from_sigma_alpha(double alpha, double sigma_alpha);
  void validate() const;
};

[[nodiscard]] std::complex<double> cf(const StableParams& p, double u);

// Gamma on the whole real line minus the non-positive integers; negative
// arguments go through the reflection formula.
[[nodiscard]] double gamma_fn(double x);

// sigma^alpha = (beta |dQ| 2^{alpha-1})^{-1} I_v(pi)^alpha Gamma(1-alpha) cos(pi alpha/2),
// alpha = beta/(beta-1).
[[nodiscard]] double sigma_alpha_from_geometry(double beta, double perimeter, double iv_pi);

double draw(const StableParams& p, Philox& rng);
[[nodiscard]] std::vector<double> sample(const StableParams& p, std::uint64_t seed, std::size_t n);

// Gil-Pelaez inversion. Throws NumericalError if the integral does not converge.
[[nodiscard]] double cdf(const StableParams& p, double x);

// Kolmogorov-Smirnov statistics.
[[nodiscard]] double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
[[nodiscard]] double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Hill tail-index estimate from the top k positive order statistics.
[[nodiscard]] double hill_estimator(std::span<const double> samples, std::size_t k);

// Fits sigma of a centred totally skewed law by minimizing the KS distance.
[[nodiscard]] StableParams fit_sigma(std::span<const double> samples, double alpha);

}  // namespace cusplab::stable
