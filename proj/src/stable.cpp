#include "cusplab/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cusplab/errors.hpp"
#include "cusplab/quadrature.hpp"

namespace cusplab::stable {

using std::numbers::pi;

StableParams StableParams::make(double alpha, double sigma) {
  StableParams p{alpha, sigma};
  p.validate();
  return p;
}

StableParams StableParams::from_sigma_alpha(double alpha, double sigma_alpha) {
  if (!(sigma_alpha > 0.0)) throw InputError("sigma^alpha must be positive");
  return make(alpha, std::pow(sigma_alpha, 1.0 / alpha));
}

void StableParams::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0)) throw InputError("stable index alpha must lie in (1,2)");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("stable scale sigma must be positive");
}

std::complex<double> cf(const StableParams& p, double u) {
  if (u == 0.0) return {1.0, 0.0};
  const double scale = std::pow(std::fabs(u), p.alpha) * std::pow(p.sigma, p.alpha);
  const double sgn = u > 0.0 ? 1.0 : -1.0;
  const std::complex<double> exponent(-scale, scale * sgn * std::tan(pi * p.alpha / 2.0));
  return std::exp(exponent);
}

double gamma_fn(double x) {
  if (x > 0.0) return std::tgamma(x);
  if (x == std::floor(x)) throw InputError("Gamma has poles at non-positive integers");
  // Gamma(x) Gamma(1-x) = pi / sin(pi x)
  return pi / (std::sin(pi * x) * std::tgamma(1.0 - x));
}

double sigma_alpha_from_geometry(double beta, double perimeter, double iv_pi) {
  if (!(beta > 2.0)) throw InputError("flatness exponent beta must exceed 2");
  if (!(perimeter > 0.0) || !(iv_pi > 0.0)) throw InputError("perimeter and I_v(pi) must be positive");
  const double alpha = beta / (beta - 1.0);
  const double value = std::pow(iv_pi, alpha) * gamma_fn(1.0 - alpha) * std::cos(pi * alpha / 2.0) /
                       (beta * perimeter * std::pow(2.0, alpha - 1.0));
  if (!(value > 0.0)) throw NumericalError("sigma^alpha evaluated non-positive");
  return value;
}

double draw(const StableParams& p, Philox& rng) {
  const double a = p.alpha;
  const double zeta = -std::tan(pi * a / 2.0);
  const double xi = std::atan(-zeta) / a;
  const double scale = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * a));
  const double v = pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double x = scale * std::sin(a * (v + xi)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + xi)) / w, (1.0 - a) / a);
  return p.sigma * x;
}

std::vector<double> sample(const StableParams& p, std::uint64_t seed, std::size_t n) {
  p.validate();
  Philox rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = draw(p, rng);
  return out;
}

double cdf(const StableParams& p, double x) {
  p.validate();
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double z = x / p.sigma;
  const double a = p.alpha;
  const double k = std::tan(pi * a / 2.0);
  // exp(-u^a) < 1e-17 beyond the cutoff.
  const double cutoff = std::pow(40.0, 1.0 / a);
  auto integrand = [&](double u) {
    if (u == 0.0) return 0.0;
    const double ua = std::pow(u, a);
    return std::exp(-ua) * std::sin(k * ua - u * z) / u;
  };
  const double width = std::min(cutoff, pi / (std::fabs(z) + 1.0));
  const int panels = static_cast<int>(std::ceil(cutoff / width));
  CompensatedSum sum;
  for (int i = 0; i < panels; ++i) {
    const double lo = cutoff * i / panels;
    const double hi = cutoff * (i + 1) / panels;
    sum.add(integrate(integrand, lo, hi, 1e-11 / panels, 400).value);
  }
  const double value = 0.5 - sum.value() / pi;
  return std::clamp(value, 0.0, 1.0);
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf_fn) {
  if (samples.empty()) throw InputError("KS statistic needs at least one sample");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf_fn(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("two-sample KS needs nonempty samples");
  std::vector<double> xa(a.begin(), a.end());
  std::vector<double> xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double t = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == t) ++i;
    while (j < xb.size() && xb[j] == t) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

double hill_estimator(std::span<const double> samples, std::size_t k) {
  std::vector<double> pos;
  pos.reserve(samples.size());
  for (double x : samples)
    if (x > 0.0) pos.push_back(x);
  if (k < 1 || k >= pos.size()) throw InputError("Hill estimator needs 1 <= k < number of positive samples");
  std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k), pos.end(), std::greater<>());
  const double threshold = pos[k];
  CompensatedSum sum;
  for (std::size_t i = 0; i < k; ++i) sum.add(std::log(pos[i] / threshold));
  const double mean = sum.value() / static_cast<double>(k);
  if (!(mean > 0.0)) throw InputError("Hill estimator: top order statistics have zero log-spacing");
  return 1.0 / mean;
}

StableParams fit_sigma(std::span<const double> samples, double alpha) {
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  // Thin to at most 2000 order statistics for the objective.
  std::vector<double> grid;
  const std::size_t stride = std::max<std::size_t>(1, xs.size() / 2000);
  for (std::size_t i = 0; i < xs.size(); i += stride) grid.push_back(xs[i]);
  auto objective = [&](double log_sigma) {
    const StableParams p = StableParams::make(alpha, std::exp(log_sigma));
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); i += stride) {
      const double f = cdf(p, xs[i]);
      d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
  };
  // Golden-section search on log sigma.
  const double iqr = xs[xs.size() * 3 / 4] - xs[xs.size() / 4];
  double lo = std::log(std::max(iqr, 1e-12)) - 3.0;
  double hi = lo + 6.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = objective(x2);
    }
  }
  return StableParams::make(alpha, std::exp(0.5 * (lo + hi)));
}

}  // namespace cusplab::stable
