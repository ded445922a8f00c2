#include "cusplab/intermittent.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "cusplab/errors.hpp"
#include "cusplab/parallel.hpp"
#include "cusplab/quadrature.hpp"
#include "cusplab/stable.hpp"

namespace cusplab::intermittent {

namespace {

using ld = long double;

constexpr double kDeep = 1e-12;

// One step on a long double state; the power is taken in extended precision
// close to the neutral fixed point, where double arithmetic would stall.
ld step(const IntermittentMap& m, ld x) {
  const double gamma = 1.0 / m.alpha;
  const double coef = m.variant == Variant::markov ? std::pow(2.0, gamma) : m.b;
  if (m.variant == Variant::markov && x >= 0.5L) return 2 * x - 1;
  ld y;
  if (x < kDeep)
    y = x * (1 + coef * std::pow(x, static_cast<ld>(gamma)));
  else
    y = x * (1 + coef * std::pow(static_cast<double>(x), gamma));
  if (m.variant == Variant::markov) return std::min<ld>(y, std::nextafter(1.0L, 0.0L));
  return y - std::floor(y);
}

bool in_X(ld x) { return x >= 0.5L; }

}  // namespace

IntermittentMap IntermittentMap::markov(double alpha) {
  IntermittentMap m{alpha, 1.0, Variant::markov};
  m.validate();
  return m;
}

IntermittentMap IntermittentMap::afn(double alpha, double b) {
  IntermittentMap m{alpha, b, Variant::afn};
  m.validate();
  return m;
}

void IntermittentMap::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0)) throw InputError("intermittent map index alpha must lie in (1,2)");
  if (variant == Variant::afn && !(b > 0.0)) throw InputError("AFN branch coefficient b must be positive");
}

Variant parse_variant(const std::string& name) {
  if (name == "markov" || name == "lsv") return Variant::markov;
  if (name == "afn") return Variant::afn;
  throw InputError("unknown map variant '" + name + "'");
}

double map_step(const IntermittentMap& m, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw InputError("map argument must lie in [0,1)");
  return static_cast<double>(step(m, x));
}

Return first_return_interval(const IntermittentMap& m, double x, std::size_t cap, bool keep_orbit) {
  if (!(x >= 0.5 && x < 1.0)) throw InputError("first return needs a start in X = [1/2, 1)");
  Return r;
  ld cur = x;
  for (std::size_t k = 1; k <= cap; ++k) {
    cur = step(m, cur);
    if (in_X(cur)) {
      r.phi = k;
      r.landing = static_cast<double>(cur);
      return r;
    }
    if (keep_orbit) r.orbit.push_back(static_cast<double>(cur));
  }
  r.phi = cap;
  r.capped = true;
  r.landing = static_cast<double>(cur);
  return r;
}

std::size_t lap_number(std::span<const std::size_t> return_times, std::size_t n) {
  std::size_t tau = 0;
  for (std::size_t k = 0; k < return_times.size(); ++k) {
    if (return_times[k] == 0) throw InputError("return times must be at least 1");
    if (tau + return_times[k] > n) return k;
    tau += return_times[k];
  }
  throw InputError("return times do not extend beyond n");
}

double sample_start_X(const IntermittentMap& m, Philox& rng, std::size_t burn_in) {
  ld x = rng.uniform();
  for (std::size_t k = 0; k < burn_in; ++k) x = step(m, x);
  for (std::size_t k = 0; k < 100'000'000 && !in_X(x); ++k) x = step(m, x);
  if (!in_X(x)) throw NumericalError("orbit failed to enter X during burn-in");
  return static_cast<double>(std::min<ld>(x, std::nextafter(1.0L, 0.0L)));
}

InducingReport inducing_equivalence_check(const IntermittentMap& m, const std::function<double(double)>& obs,
                                          std::size_t n, std::size_t replicas, std::uint64_t seed,
                                          const InducingOptions& opt) {
  m.validate();
  if (n == 0 || replicas == 0) throw InputError("inducing check needs n >= 1 and replicas >= 1");
  InducingReport rep;
  rep.n = n;
  rep.replicas = replicas;

  // Mean of obs under the invariant measure, from long orbits.
  std::vector<double> partial(opt.centering_orbits);
  parallel_for(opt.centering_orbits, opt.workers, [&](std::size_t k) {
    Philox rng(Philox::derive(seed, 4 * replicas + k));
    ld x = sample_start_X(m, rng, opt.burn_in);
    CompensatedSum s;
    for (std::size_t j = 0; j < opt.centering_length; ++j) {
      s.add(obs(static_cast<double>(x)));
      x = step(m, x);
    }
    partial[k] = s.value();
  });
  CompensatedSum total;
  for (double p : partial) total.add(p);
  const double mean = total.value() / static_cast<double>(opt.centering_orbits * opt.centering_length);
  rep.mean_adjustment = mean;
  const double bn = std::pow(static_cast<double>(n), 1.0 / m.alpha);

  // Full dynamics: V_n from mu_X starts; return times recorded up to the
  // first return beyond n.
  std::vector<std::vector<std::size_t>> returns(replicas);
  rep.full_sample.assign(replicas, 0.0);
  std::vector<char> capped(replicas, 0);
  parallel_for(replicas, opt.workers, [&](std::size_t i) {
    Philox rng(Philox::derive(seed, 2 * i));
    ld x = sample_start_X(m, rng, opt.burn_in);
    CompensatedSum s;
    std::size_t last = 0;
    for (std::size_t j = 0; j < n; ++j) {
      s.add(obs(static_cast<double>(x)) - mean);
      x = step(m, x);
      if (in_X(x)) {
        returns[i].push_back(j + 1 - last);
        last = j + 1;
      }
    }
    std::size_t j = n;
    if (last == n) {
      x = step(m, x);
      ++j;
    }
    for (; !in_X(x) && j < n + 100'000'000; ++j) x = step(m, x);
    if (!in_X(x)) {
      capped[i] = 1;
      return;
    }
    returns[i].push_back(j - last);
    rep.full_sample[i] = s.value() / bn;
  });

  std::size_t steps = 0, count = 0;
  std::vector<double> all_returns;
  for (std::size_t i = 0; i < replicas; ++i) {
    if (capped[i]) {
      ++rep.capped;
      continue;
    }
    std::size_t tau = 0;
    for (std::size_t r : returns[i]) {
      tau += r;
      all_returns.push_back(static_cast<double>(r));
    }
    steps += tau;
    count += returns[i].size();
    const std::size_t N = lap_number(returns[i], n);
    std::size_t tau_N = 0;
    for (std::size_t k = 0; k < N; ++k) tau_N += returns[i][k];
    ++rep.lap_checks;
    if (!(tau_N <= n && n < tau_N + returns[i][N])) ++rep.lap_violations;
  }
  if (count == 0) throw NumericalError("no returns observed in the full-dynamics sample");
  rep.tau_bar_hat = static_cast<double>(steps) / static_cast<double>(count);
  const std::size_t k_hill = std::max<std::size_t>(
      10, static_cast<std::size_t>(std::pow(static_cast<double>(all_returns.size()), 2.0 / 3.0)));
  if (k_hill < all_returns.size()) rep.tail_index_hat = stable::hill_estimator(all_returns, k_hill);

  // Induced dynamics: [n / tau_bar] returns from independent mu_X starts.
  rep.induced_steps = static_cast<std::size_t>(std::floor(static_cast<double>(n) / rep.tau_bar_hat));
  rep.induced_sample.assign(replicas, 0.0);
  parallel_for(replicas, opt.workers, [&](std::size_t i) {
    Philox rng(Philox::derive(seed, 2 * i + 1));
    ld x = sample_start_X(m, rng, opt.burn_in);
    CompensatedSum s;
    for (std::size_t k = 0; k < rep.induced_steps; ++k) {
      do {
        s.add(obs(static_cast<double>(x)) - mean);
        x = step(m, x);
      } while (!in_X(x));
    }
    rep.induced_sample[i] = s.value() / bn;
  });

  std::vector<double> a, b;
  for (std::size_t i = 0; i < replicas; ++i) {
    if (capped[i]) continue;
    a.push_back(rep.full_sample[i]);
    b.push_back(rep.induced_sample[i]);
  }
  rep.ks_two_sample = stable::ks_two_sample(a, b);
  return rep;
}

std::string to_json(const InducingReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "cusplab.inducing.v1";
  j["n"] = r.n;
  j["replicas"] = r.replicas;
  j["ks_two_sample"] = r.ks_two_sample;
  j["tau_bar_hat"] = r.tau_bar_hat;
  j["tail_index_hat"] = r.tail_index_hat;
  j["mean_adjustment"] = r.mean_adjustment;
  j["induced_steps"] = r.induced_steps;
  j["lap_checks"] = r.lap_checks;
  j["lap_violations"] = r.lap_violations;
  j["capped"] = r.capped;
  return j.dump(2);
}

LapRate lap_rate_check(const IntermittentMap& m, std::size_t n, std::size_t orbits, std::size_t chain_returns,
                       std::uint64_t seed, std::size_t workers) {
  m.validate();
  if (n == 0 || orbits == 0 || chain_returns == 0) throw InputError("lap rate check needs positive sizes");
  LapRate out;
  out.n = n;
  out.orbits = orbits;
  out.chain_returns = chain_returns;
  std::vector<double> rate(orbits);
  std::vector<std::size_t> bad(orbits, 0);
  parallel_for(orbits, workers, [&](std::size_t i) {
    Philox rng(Philox::derive(seed, i));
    double x = sample_start_X(m, rng);
    std::vector<std::size_t> times;
    std::size_t tau = 0;
    while (tau <= n) {
      const auto r = first_return_interval(m, x, 100'000'000, false);
      if (r.capped) throw NumericalError("return time cap exceeded in lap count");
      times.push_back(r.phi);
      tau += r.phi;
      x = r.landing;
    }
    const std::size_t N = lap_number(times, n);
    std::size_t tau_N = 0;
    for (std::size_t k = 0; k < N; ++k) tau_N += times[k];
    if (!(tau_N <= n && n < tau_N + times[N])) bad[i] = 1;
    rate[i] = static_cast<double>(N) / static_cast<double>(n);
  });
  CompensatedSum r;
  for (double v : rate) r.add(v);
  out.laps_per_step = r.value() / static_cast<double>(orbits);
  for (auto b : bad) out.lap_violations += b;
  Philox rng(Philox::derive(seed, orbits));
  double x = sample_start_X(m, rng);
  CompensatedSum total;
  for (std::size_t k = 0; k < chain_returns; ++k) {
    const auto ret = first_return_interval(m, x, 100'000'000, false);
    if (ret.capped) throw NumericalError("return time cap exceeded in lap count");
    total.add(static_cast<double>(ret.phi));
    x = ret.landing;
  }
  out.tau_bar_hat = total.value() / static_cast<double>(chain_returns);
  return out;
}

}  // namespace cusplab::intermittent
