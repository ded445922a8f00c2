#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cusplab/rng.hpp"

namespace cusplab::intermittent {

enum class Variant { markov, afn };

// markov: Tx = x(1 + 2^{1/alpha} x^{1/alpha}) on [0,1/2), 2x - 1 on [1/2,1).
// afn:    Tx = x(1 + b x^{1/alpha}) mod 1.
struct IntermittentMap {
  double alpha = 1.5;
  double b = 1.3;
  Variant variant = Variant::markov;

  static IntermittentMap markov(double alpha);
  static IntermittentMap afn(double alpha, double b = 1.3);
  void validate() const;
};

Variant parse_variant(const std::string& name);

// Throws InputError unless 0 <= x < 1.
double map_step(const IntermittentMap& m, double x);

struct Return {
  std::size_t phi = 0;
  double landing = 0.0;       // T^phi x, back in X = [1/2, 1)
  std::vector<double> orbit;  // T x, ..., T^{phi-1} x (all in [0,1/2))
  bool capped = false;
};

// Throws InputError unless 1/2 <= x < 1.
Return first_return_interval(const IntermittentMap& m, double x, std::size_t cap = 100'000'000, bool keep_orbit = true);

// N_n with tau_{N_n} <= n < tau_{N_n + 1}; throws InputError if the return
// times do not reach beyond n.
std::size_t lap_number(std::span<const std::size_t> return_times, std::size_t n);

// Draw approximately from mu_X: burn-in from a uniform start, then run on
// until the orbit enters X.
double sample_start_X(const IntermittentMap& m, Philox& rng, std::size_t burn_in = 1000);

struct InducingReport {
  std::size_t n = 0;
  std::size_t replicas = 0;
  double ks_two_sample = 0.0;
  double tau_bar_hat = 0.0;
  double tail_index_hat = 0.0;
  double mean_adjustment = 0.0;
  std::size_t induced_steps = 0;  // [n / tau_bar]
  std::size_t lap_checks = 0;
  std::size_t lap_violations = 0;
  std::size_t capped = 0;
  std::vector<double> full_sample;     // b_n^{-1} V_n
  std::vector<double> induced_sample;  // b_n^{-1} V^Y_{[n/tau_bar]}
};

struct InducingOptions {
  std::size_t workers = 1;
  std::size_t burn_in = 1000;
  std::size_t centering_orbits = 64;
  std::size_t centering_length = 200'000;
};

// obs is evaluated at points of [0,1]; it is centered numerically first.
InducingReport inducing_equivalence_check(const IntermittentMap& m, const std::function<double(double)>& obs,
                                          std::size_t n, std::size_t replicas, std::uint64_t seed,
                                          const InducingOptions& opt = {});

std::string to_json(const InducingReport& r);

struct LapRate {
  std::size_t n = 0;
  std::size_t orbits = 0;
  double laps_per_step = 0.0;  // mean N_n / n over the orbits
  double tau_bar_hat = 0.0;    // mean return time over an independent chain
  std::size_t chain_returns = 0;
  std::size_t lap_violations = 0;
};

// Lap counts N_n of `orbits` independent mu_X orbits against 1 / tau_bar,
// with tau_bar estimated from `chain_returns` consecutive returns.
LapRate lap_rate_check(const IntermittentMap& m, std::size_t n, std::size_t orbits, std::size_t chain_returns,
                       std::uint64_t seed, std::size_t workers = 1);

}  // namespace cusplab::intermittent
