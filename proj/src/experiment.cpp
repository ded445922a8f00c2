#include "cusplab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

#include "cusplab/analysis.hpp"
#include "cusplab/billiard.hpp"
#include "cusplab/errors.hpp"
#include "cusplab/intermittent.hpp"
#include "cusplab/observable.hpp"
#include "cusplab/parallel.hpp"
#include "cusplab/paths.hpp"
#include "cusplab/quadrature.hpp"
#include "cusplab/report.hpp"
#include "cusplab/rng.hpp"
#include "cusplab/stable.hpp"

namespace cusplab::experiment {

namespace fs = std::filesystem;

namespace {

// Stream tags for sub-seed derivation.
enum Stream : std::uint64_t { kCenter = 1, kReplica = 2, kDiag = 3, kSup = 4, kTail = 5, kSupReturns = 6 };

std::uint64_t stream_seed(std::uint64_t seed, Stream s, std::uint64_t level) {
  return Philox::derive(Philox::derive(seed, s), level);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::logic_error&) {
    throw InputError("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long d = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::logic_error&) {
    throw InputError("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Json summary(const std::vector<double>& v) {
  Json j;
  j["median"] = median(v);
  j["values"] = v;
  return j;
}

// Samples and diagnostics of one system behind a common interface, so the
// same pipeline runs on the billiard and on the interval maps.
class System {
 public:
  virtual ~System() = default;
  virtual double alpha() const = 0;
  // v_n = sum_{j<n} v(T^j x) from a start drawn by `seed`; partial sums kept
  // when requested. Counts censored restarts.
  virtual double birkhoff(std::size_t n, std::uint64_t seed, std::vector<double>* sums, std::size_t& restarts) const = 0;
  // Partial sums v_0..v_phi over consecutive excursions from a mu_X start.
  virtual analysis::DiagStatistic diagnostic(analysis::Diagnostic which, std::size_t n, std::uint64_t seed) const = 0;
  // Consecutive return times from a mu_X start.
  virtual std::vector<double> returns(std::size_t count, std::uint64_t seed, std::size_t& flagged) const = 0;
  virtual double phi_bar_exact() const { return std::nan(""); }
};

class BilliardSystem : public System {
 public:
  BilliardSystem(const ExperimentConfig& cfg, const observable::Observable& obs)
      : geom_(billiard::TableGeometry::build(cfg.beta, cfg.s_max, cfg.arc_radius)), obs_(obs) {
    tol_.grazing = cfg.grazing_tol;
    tol_.excursion_cap = cfg.excursion_cap;
  }
  const billiard::TableGeometry& geom() const { return geom_; }
  double alpha() const override { return geom_.alpha(); }
  double phi_bar_exact() const override { return geom_.perimeter() / geom_.arc_length(); }

  double birkhoff(std::size_t n, std::uint64_t seed, std::vector<double>* sums, std::size_t& restarts) const override {
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
      const auto p = billiard::sample_invariant(geom_, Philox::derive(seed, attempt), 1).front();
      if (!(p.theta > 0.0 && p.theta < std::numbers::pi)) {
        ++restarts;
        continue;
      }
      billiard::CollisionRecord state = billiard::state_of(geom_, p);
      CompensatedSum s;
      if (sums) sums->clear();
      bool ok = true;
      for (std::size_t j = 0; j < n; ++j) {
        s.add(obs_(state));
        if (sums) sums->push_back(s.value());
        if (j + 1 < n) {
          state = billiard::advance(geom_, state, tol_);
          if (state.flags != billiard::kFlagNone) {
            ok = false;
            break;
          }
        }
      }
      if (ok) return s.value();
      ++restarts;
    }
    throw NumericalError("too many censored orbits in a single replica");
  }

  analysis::DiagStatistic diagnostic(analysis::Diagnostic which, std::size_t n, std::uint64_t seed) const override {
    return analysis::max_diag_statistic(geom_, obs_, which, n, alpha(), seed);
  }

  std::vector<double> returns(std::size_t count, std::uint64_t seed, std::size_t& flagged) const override {
    std::vector<double> out;
    out.reserve(count);
    std::uint64_t restart = 0;
    auto fresh = [&] {
      return billiard::state_of(geom_, billiard::sample_invariant_X(geom_, Philox::derive(seed, restart++), 1).front());
    };
    billiard::CollisionRecord cur = fresh();
    while (out.size() < count) {
      const auto ex = billiard::first_return_from(geom_, cur, tol_, false);
      if (!ex.ok()) {
        ++flagged;
        cur = fresh();
        continue;
      }
      out.push_back(static_cast<double>(ex.phi));
      cur = ex.last;
    }
    return out;
  }

 private:
  billiard::TableGeometry geom_;
  observable::Observable obs_;
  billiard::Tolerances tol_;
};

class IntervalSystem : public System {
 public:
  IntervalSystem(const intermittent::IntermittentMap& m, const observable::Observable& obs, double mean,
                 std::size_t cap)
      : map_(m), obs_(obs), mean_(mean), cap_(cap) {}
  double alpha() const override { return map_.alpha; }
  double value(double x) const { return obs_.raw({0.0, x, 0.0, x, 0.0}) - mean_; }

  double birkhoff(std::size_t n, std::uint64_t seed, std::vector<double>* sums, std::size_t& /*restarts*/) const override {
    Philox rng(seed);
    double x = intermittent::sample_start_X(map_, rng);
    CompensatedSum s;
    if (sums) sums->clear();
    std::size_t j = 0;
    // Walk excursion by excursion so the extended-precision orbit is used.
    while (j < n) {
      s.add(value(x));
      if (sums) sums->push_back(s.value());
      ++j;
      const auto r = intermittent::first_return_interval(map_, x, cap_, true);
      for (std::size_t k = 0; k < r.orbit.size() && j < n; ++k, ++j) {
        s.add(value(r.orbit[k]));
        if (sums) sums->push_back(s.value());
      }
      x = r.landing;
    }
    return s.value();
  }

  analysis::DiagStatistic diagnostic(analysis::Diagnostic which, std::size_t n, std::uint64_t seed) const override {
    analysis::DiagStatistic out;
    Philox rng(seed);
    double x = intermittent::sample_start_X(map_, rng);
    std::vector<double> sums;
    for (std::size_t j = 0; j < n; ++j) {
      const auto r = intermittent::first_return_interval(map_, x, cap_, which != analysis::Diagnostic::phi);
      if (r.capped) {
        ++out.flagged;
        x = intermittent::sample_start_X(map_, rng);
        continue;
      }
      double d;
      if (which == analysis::Diagnostic::phi) {
        d = static_cast<double>(r.phi);
      } else {
        sums.assign(1, 0.0);
        CompensatedSum s;
        s.add(value(x));
        sums.push_back(s.value());
        for (double y : r.orbit) {
          s.add(value(y));
          sums.push_back(s.value());
        }
        d = which == analysis::Diagnostic::M1 ? analysis::diag_M1(std::span<const double>(sums).subspan(1))
                                              : analysis::diag_M2(sums, sums.back());
      }
      out.max_raw = std::max(out.max_raw, d);
      x = r.landing;
    }
    out.value = out.max_raw / std::pow(static_cast<double>(n), 1.0 / alpha());
    return out;
  }

  std::vector<double> returns(std::size_t count, std::uint64_t seed, std::size_t& flagged) const override {
    Philox rng(seed);
    double x = intermittent::sample_start_X(map_, rng);
    std::vector<double> out;
    out.reserve(count);
    while (out.size() < count) {
      const auto r = intermittent::first_return_interval(map_, x, cap_, false);
      if (r.capped) {
        ++flagged;
        x = intermittent::sample_start_X(map_, rng);
        continue;
      }
      out.push_back(static_cast<double>(r.phi));
      x = r.landing;
    }
    return out;
  }

 private:
  intermittent::IntermittentMap map_;
  observable::Observable obs_;
  double mean_;
  std::size_t cap_;
};

double interval_mean(const intermittent::IntermittentMap& m, const observable::Observable& obs, std::uint64_t seed,
                     std::size_t samples, std::size_t workers) {
  const std::size_t orbits = 16;
  const std::size_t length = std::max<std::size_t>(1000, samples / orbits);
  std::vector<double> part(orbits);
  parallel_for(orbits, workers, [&](std::size_t k) {
    Philox rng(Philox::derive(seed, k));
    double x = intermittent::sample_start_X(m, rng);
    CompensatedSum s;
    std::size_t j = 0;
    while (j < length) {
      s.add(obs.raw({0.0, x, 0.0, x, 0.0}));
      ++j;
      const auto r = intermittent::first_return_interval(m, x, 100'000'000, true);
      for (std::size_t i = 0; i < r.orbit.size() && j < length; ++i, ++j) s.add(obs.raw({0.0, r.orbit[i], 0.0, r.orbit[i], 0.0}));
      x = r.landing;
    }
    part[k] = s.value();
  });
  CompensatedSum total;
  for (double p : part) total.add(p);
  return total.value() / static_cast<double>(orbits * length);
}

// Tail constant c in P(phi > t) ~ c t^{-alpha} from the top order statistics.
double tail_constant(std::vector<double> phis, double alpha) {
  if (phis.size() < 100) return std::nan("");
  std::sort(phis.begin(), phis.end(), std::greater<>());
  const auto k = static_cast<std::size_t>(std::pow(static_cast<double>(phis.size()), 2.0 / 3.0));
  return static_cast<double>(k) / static_cast<double>(phis.size()) * std::pow(phis[k], alpha);
}

std::string level_name(std::size_t n) { return "n" + std::to_string(n); }

std::string samples_csv(const std::vector<std::size_t>& ns, const std::vector<std::vector<double>>& samples) {
  std::ostringstream os;
  os << "n,replica,value\n";
  for (std::size_t k = 0; k < samples.size(); ++k)
    for (std::size_t i = 0; i < samples[k].size(); ++i)
      os << ns[k] << ',' << i << ',' << report::format_double(samples[k][i]) << '\n';
  return os.str();
}

void write_json(const fs::path& path, const Json& j) { report::write_file(path, j.dump(2) + "\n"); }

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = {
      "system",       "beta",     "s_max",   "arc_radius", "alpha",     "b",          "observable",
      "eta",          "n_schedule", "replicas", "seed",     "output_dir", "workers",  "excursion_cap",
      "grazing_tol",  "gridsize", "centering_samples", "paths_kept", "diag_seeds", "tail_returns"};
  return k;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "system") {
    if (v != "billiard" && v != "lsv" && v != "afn") throw InputError("system must be billiard, lsv or afn");
    system = v;
  } else if (key == "beta") {
    beta = parse_double(key, v);
  } else if (key == "s_max") {
    s_max = parse_double(key, v);
  } else if (key == "arc_radius") {
    arc_radius = parse_double(key, v);
  } else if (key == "alpha") {
    alpha = parse_double(key, v);
  } else if (key == "b") {
    b = parse_double(key, v);
  } else if (key == "observable") {
    observable = v;
  } else if (key == "eta") {
    eta = parse_double(key, v);
  } else if (key == "n_schedule") {
    n_schedule.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) n_schedule.push_back(parse_uint(key, trim(item)));
  } else if (key == "replicas") {
    replicas = parse_uint(key, v);
  } else if (key == "seed") {
    seed = parse_uint(key, v);
  } else if (key == "output_dir") {
    output_dir = v;
  } else if (key == "workers") {
    workers = parse_uint(key, v);
  } else if (key == "excursion_cap") {
    excursion_cap = parse_uint(key, v);
  } else if (key == "grazing_tol") {
    grazing_tol = parse_double(key, v);
  } else if (key == "gridsize") {
    gridsize = parse_uint(key, v);
  } else if (key == "centering_samples") {
    centering_samples = parse_uint(key, v);
  } else if (key == "paths_kept") {
    paths_kept = parse_uint(key, v);
  } else if (key == "diag_seeds") {
    diag_seeds = parse_uint(key, v);
  } else if (key == "tail_returns") {
    tail_returns = parse_uint(key, v);
  } else {
    throw InputError("unknown config key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + " is not 'key = value'");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

void ExperimentConfig::validate() const {
  if (system == "billiard") {
    if (!(beta > 2.0)) throw InputError("beta must exceed 2");
    const double derived = beta / (beta - 1.0);
    if (alpha && std::fabs(*alpha - derived) > 1e-12 * derived)
      throw InputError("alpha is derived from beta as beta/(beta-1) = " + report::format_double(derived) +
                       "; the configured alpha " + report::format_double(*alpha) + " disagrees");
  } else {
    const double a = alpha.value_or(1.5);
    if (!(a > 1.0 && a < 2.0)) throw InputError("alpha must lie in (1,2)");
    if (system == "afn" && !(b > 0.0)) throw InputError("b must be positive");
  }
  if (n_schedule.empty()) throw InputError("n_schedule must not be empty");
  for (std::size_t i = 0; i < n_schedule.size(); ++i) {
    if (n_schedule[i] == 0) throw InputError("n_schedule entries must be positive");
    if (i > 0 && n_schedule[i] <= n_schedule[i - 1]) throw InputError("n_schedule must be strictly increasing");
  }
  if (replicas == 0) throw InputError("replicas must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("eta must lie in (0,1]");
  if (gridsize < 2) throw InputError("gridsize must be at least 2");
  if (diag_seeds == 0) throw InputError("diag_seeds must be positive");
  if (!(grazing_tol >= 0.0)) throw InputError("grazing_tol must be non-negative");
}

double ExperimentConfig::alpha_value() const {
  return system == "billiard" ? beta / (beta - 1.0) : alpha.value_or(1.5);
}

std::size_t ExperimentConfig::worker_count() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["system"] = system;
  if (system == "billiard") {
    j["beta"] = beta;
    j["s_max"] = s_max;
    j["arc_radius"] = arc_radius;
  } else {
    j["b"] = b;
  }
  j["alpha"] = alpha_value();
  j["observable"] = observable;
  j["eta"] = eta;
  j["n_schedule"] = n_schedule;
  j["replicas"] = replicas;
  j["seed"] = seed;
  j["excursion_cap"] = excursion_cap;
  j["grazing_tol"] = grazing_tol;
  j["gridsize"] = gridsize;
  j["centering_samples"] = centering_samples;
  j["paths_kept"] = paths_kept;
  j["diag_seeds"] = diag_seeds;
  j["tail_returns"] = tail_returns;
  return j;
}

namespace {

struct Setup {
  std::unique_ptr<System> system;
  observable::Observable obs;
  Json info;
  std::optional<analysis::IvProfile> profile;
  analysis::ConvergenceClass verdict = analysis::ConvergenceClass::degenerate;
  bool has_verdict = false;
};

Setup make_system(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  Setup s;
  const auto parsed = observable::Observable::parse(cfg.observable, cfg.eta);
  const std::size_t workers = cfg.worker_count();
  if (cfg.system == "billiard") {
    const auto geom = billiard::TableGeometry::build(cfg.beta, cfg.s_max, cfg.arc_radius);
    s.obs = observable::center_observable_quadrature(parsed, geom);
    const auto mc = observable::center_observable(parsed, geom, stream_seed(cfg.seed, kCenter, 0),
                                                  std::max<std::size_t>(cfg.centering_samples, 1000));
    s.info["mean_monte_carlo"] = {{"value", mc.mean_adjustment()}, {"stderr", mc.mean_stderr()}};
    auto profile = analysis::iv_profile(s.obs, geom, geom.alpha(), cfg.gridsize);
    s.verdict = analysis::classify_convergence(profile);
    s.has_verdict = true;
    s.info["perimeter"] = geom.perimeter();
    s.info["arc_length"] = geom.arc_length();
    s.info["phi_bar_kac"] = geom.perimeter() / geom.arc_length();
    s.info["I_v_pi"] = profile.iv.back();
    s.info["I1_pi"] = profile.i1.back();
    s.info["I"] = profile.slope();
    s.info["profile_error_bound"] = profile.error_bound;
    s.info["verdict"] = analysis::to_string(s.verdict);
    std::ostringstream csv;
    analysis::write_profile_csv(csv, profile);
    report::write_file(out / "profile.csv", csv.str());
    report::Series iv{"I_v", {}, false}, i1{"I_1", {}, false};
    for (std::size_t k = 0; k < profile.s.size(); ++k) {
      iv.points.emplace_back(profile.s[k], profile.iv[k]);
      i1.points.emplace_back(profile.s[k], profile.i1[k]);
    }
    report::write_file(out / "profile.svg", report::svg_chart("cusp profile", "s", "I(s)", {iv, i1}));
    s.profile = std::move(profile);
    s.system = std::make_unique<BilliardSystem>(cfg, s.obs);
  } else {
    const auto m = cfg.system == "afn" ? intermittent::IntermittentMap::afn(cfg.alpha_value(), cfg.b)
                                       : intermittent::IntermittentMap::markov(cfg.alpha_value());
    const double mean =
        interval_mean(m, parsed, stream_seed(cfg.seed, kCenter, 0), std::max<std::size_t>(cfg.centering_samples, 1000), workers);
    s.obs = parsed.with_adjustment(mean, std::nan(""));
    s.system = std::make_unique<IntervalSystem>(m, s.obs, mean, cfg.excursion_cap);
    s.info["verdict"] = "not_applicable";
  }
  s.info["observable"] = {{"text", cfg.observable},
                          {"canonical", s.obs.to_string()},
                          {"eta", s.obs.eta()},
                          {"mean_adjustment", s.obs.mean_adjustment()}};
  if (std::isfinite(s.obs.mean_stderr())) s.info["observable"]["mean_stderr"] = s.obs.mean_stderr();
  return s;
}

Json base_report(const std::string& schema, const ExperimentConfig& cfg) {
  Json j;
  j["schema"] = schema;
  j["config"] = cfg.to_json();
  j["seed"] = cfg.seed;
  j["tolerances"] = {{"grazing", cfg.grazing_tol}, {"excursion_cap", cfg.excursion_cap}};
  return j;
}

}  // namespace

Json run_wip_experiment(const ExperimentConfig& cfg) {
  const fs::path out(cfg.output_dir);
  Setup setup = make_system(cfg, out);
  const std::size_t workers = cfg.worker_count();
  const double alpha = setup.system->alpha();
  Json rep = base_report("cusplab.wip.v1", cfg);
  rep["system"] = setup.info;

  if (setup.has_verdict && setup.verdict == analysis::ConvergenceClass::degenerate) {
    rep["short_circuit"] = "I_v(pi) vanishes within tolerance: the stable limit is degenerate, nothing to simulate";
    write_json(out / "wip_report.json", rep);
    return rep;
  }

  // Prediction inputs.
  std::size_t tail_flagged = 0;
  const auto phis = setup.system->returns(cfg.tail_returns, stream_seed(cfg.seed, kTail, 0), tail_flagged);
  CompensatedSum phi_sum;
  for (double p : phis) phi_sum.add(p);
  const double phi_bar_hat = phi_sum.value() / static_cast<double>(phis.size());
  const double c_phi = tail_constant(phis, alpha);
  const double g_factor = stable::gamma_fn(1.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0);
  Json pred;
  pred["phi_bar_hat"] = phi_bar_hat;
  pred["tail_constant_phi_hat"] = c_phi;
  pred["tail_index_phi_hat"] =
      stable::hill_estimator(phis, static_cast<std::size_t>(std::pow(static_cast<double>(phis.size()), 2.0 / 3.0)));
  pred["tail_flagged"] = tail_flagged;

  double sign = 1.0;
  std::optional<stable::StableParams> geometric, induced;
  if (setup.profile) {
    const auto& pr = *setup.profile;
    sign = pr.iv.back() >= 0.0 ? 1.0 : -1.0;
    const double sa = stable::sigma_alpha_from_geometry(cfg.beta, setup.info["perimeter"].get<double>(), std::fabs(pr.iv.back()));
    geometric = stable::StableParams::from_sigma_alpha(alpha, sa);
    pred["sigma_alpha_geometric"] = sa;
    const double phi_bar = setup.system->phi_bar_exact();
    const double s31 = std::pow(std::fabs(pr.slope()), alpha) * c_phi * g_factor / phi_bar;
    if (s31 > 0.0 && std::isfinite(s31)) {
      induced = stable::StableParams::from_sigma_alpha(alpha, s31);
      pred["sigma_alpha_induced"] = s31;
    }
  }
  rep["prediction"] = pred;
  auto cdf_of = [sign](const stable::StableParams& p) {
    return [p, sign](double x) { return sign > 0 ? stable::cdf(p, x) : 1.0 - stable::cdf(p, -x); };
  };

  Json levels = Json::array();
  std::vector<std::vector<double>> all_samples;
  std::vector<std::size_t> done_ns;
  try {
    for (std::size_t li = 0; li < cfg.n_schedule.size(); ++li) {
      const std::size_t n = cfg.n_schedule[li];
      const double bn = std::pow(static_cast<double>(n), 1.0 / alpha);
      std::vector<double> sample(cfg.replicas);
      std::vector<std::size_t> restarts(cfg.replicas, 0);
      const std::size_t kept = std::min(cfg.paths_kept, cfg.replicas);
      std::vector<std::vector<double>> kept_sums(kept);
      parallel_for(cfg.replicas, workers, [&](std::size_t i) {
        std::vector<double>* sums = i < kept ? &kept_sums[i] : nullptr;
        sample[i] = setup.system->birkhoff(n, Philox::derive(stream_seed(cfg.seed, kReplica, li), i), sums, restarts[i]) / bn;
      });
      Json level;
      level["n"] = n;
      std::size_t censored = 0;
      for (auto r : restarts) censored += r;
      level["censored_restarts"] = censored;
      level["sample_median"] = median(sample);
      if (geometric) level["ks_geometric"] = stable::ks_statistic(sample, cdf_of(*geometric));
      if (induced) level["ks_induced"] = stable::ks_statistic(sample, cdf_of(*induced));
      if (!setup.profile) {
        std::vector<double> flipped = sample;
        const double med = median(sample);
        const double mean = [&] {
          CompensatedSum s;
          for (double v : sample) s.add(v);
          return s.value() / static_cast<double>(sample.size());
        }();
        // Skewness direction: a right-skewed law has mean above median.
        const double dir = mean >= med ? 1.0 : -1.0;
        for (double& v : flipped) v *= dir;
        const auto fitted = stable::fit_sigma(flipped, alpha);
        level["sigma_fitted"] = fitted.sigma;
        level["skew_direction"] = dir;
        level["ks_fitted"] = stable::ks_statistic(flipped, [&](double x) { return stable::cdf(fitted, x); });
      }
      // Diagnostics over independent seeds.
      Json diag;
      for (auto [which, name] : {std::pair{analysis::Diagnostic::M1, "M1"}, std::pair{analysis::Diagnostic::M2, "M2"},
                                 std::pair{analysis::Diagnostic::phi, "phi"}}) {
        std::vector<double> vals(cfg.diag_seeds);
        std::vector<std::size_t> flagged(cfg.diag_seeds);
        parallel_for(cfg.diag_seeds, workers, [&](std::size_t k) {
          const auto st = setup.system->diagnostic(
              which, n, Philox::derive(stream_seed(cfg.seed, kDiag, li), 3 * k + static_cast<std::size_t>(which)));
          vals[k] = st.value;
          flagged[k] = st.flagged;
        });
        diag[name] = summary(vals);
        std::size_t f = 0;
        for (auto x : flagged) f += x;
        diag[name]["flagged"] = f;
      }
      level["diagnostics"] = diag;
      // Paths.
      std::vector<report::Series> series;
      for (std::size_t i = 0; i < kept; ++i) {
        const auto path = paths::path_from_sums(kept_sums[i], n, bn);
        std::ostringstream csv;
        paths::write_csv(csv, path);
        report::write_file(out / "paths" / (level_name(n) + "_r" + std::to_string(i) + ".csv"), csv.str());
        series.push_back(report::step_series("replica " + std::to_string(i), path));
      }
      if (!series.empty())
        report::write_file(out / ("paths_" + level_name(n) + ".svg"),
                           report::svg_chart("W_n paths, n = " + std::to_string(n), "t", "W_n(t)", series));
      levels.push_back(level);
      all_samples.push_back(std::move(sample));
      done_ns.push_back(n);
    }
  } catch (const std::exception& e) {
    if (done_ns.empty()) throw;
    Json partial = rep;
    partial["levels"] = levels;
    partial["error"] = e.what();
    write_json(out / "wip_partial.json", partial);
    report::write_file(out / "samples.csv", samples_csv(done_ns, all_samples));
    throw PartialResults(std::string("run aborted after ") + std::to_string(done_ns.size()) + " level(s): " + e.what());
  }
  rep["levels"] = levels;
  report::write_file(out / "samples.csv", samples_csv(done_ns, all_samples));
  write_json(out / "wip_report.json", rep);
  return rep;
}

Json run_supremum_check(const ExperimentConfig& cfg) {
  const fs::path out(cfg.output_dir);
  Setup setup = make_system(cfg, out);
  const std::size_t workers = cfg.worker_count();
  const double alpha = setup.system->alpha();
  Json rep = base_report("cusplab.sup.v1", cfg);
  rep["system"] = setup.info;
  std::size_t tail_flagged = 0;
  const auto pilot = setup.system->returns(cfg.tail_returns, stream_seed(cfg.seed, kTail, 0), tail_flagged);
  double phi_bar = setup.system->phi_bar_exact();
  if (!std::isfinite(phi_bar)) {
    CompensatedSum s;
    for (double p : pilot) s.add(p);
    phi_bar = s.value() / static_cast<double>(pilot.size());
  }
  rep["phi_bar"] = phi_bar;
  Json levels = Json::array();
  std::vector<double> prev_w, prev_a;
  for (std::size_t li = 0; li < cfg.n_schedule.size(); ++li) {
    const std::size_t n = cfg.n_schedule[li];
    const double bn = std::pow(static_cast<double>(n), 1.0 / alpha);
    std::vector<double> sup_w(cfg.replicas), sup_a(cfg.replicas);
    std::vector<std::size_t> restarts(cfg.replicas, 0), flagged(cfg.replicas, 0);
    parallel_for(cfg.replicas, workers, [&](std::size_t i) {
      std::vector<double> sums;
      setup.system->birkhoff(n, Philox::derive(stream_seed(cfg.seed, kSup, li), i), &sums, restarts[i]);
      double best = 0.0;
      for (double s : sums) best = std::max(best, s);
      sup_w[i] = best / bn;
      const auto phis = setup.system->returns(n, Philox::derive(stream_seed(cfg.seed, kSupReturns, li), i), flagged[i]);
      CompensatedSum acc;
      double top = 0.0;
      for (double p : phis) {
        acc.add(p - phi_bar);
        top = std::max(top, acc.value());
      }
      sup_a[i] = top / bn;
    });
    Json level;
    level["n"] = n;
    level["sup_W_median"] = median(sup_w);
    level["sup_A_median"] = median(sup_a);
    if (!prev_w.empty()) {
      level["ks_W_vs_previous"] = stable::ks_two_sample(sup_w, prev_w);
      level["ks_A_vs_previous"] = stable::ks_two_sample(sup_a, prev_a);
    }
    std::size_t r = 0, f = 0;
    for (auto x : restarts) r += x;
    for (auto x : flagged) f += x;
    level["censored_restarts"] = r;
    level["flagged_returns"] = f;
    levels.push_back(level);
    prev_w = std::move(sup_w);
    prev_a = std::move(sup_a);
  }
  rep["levels"] = levels;
  write_json(out / "sup_report.json", rep);
  return rep;
}

MetricExample parse_metric_example(const std::string& name) {
  if (name == "j1_example") return MetricExample::j1_example;
  if (name == "m1_example") return MetricExample::m1_example;
  if (name == "m2_example") return MetricExample::m2_example;
  if (name == "figure_c") return MetricExample::figure_c;
  throw InputError("unknown metric example '" + name + "'");
}

std::string to_string(MetricExample e) {
  switch (e) {
    case MetricExample::j1_example:
      return "j1_example";
    case MetricExample::m1_example:
      return "m1_example";
    case MetricExample::m2_example:
      return "m2_example";
    case MetricExample::figure_c:
      return "figure_c";
  }
  return "unknown";
}

Json run_metric_demo(MetricExample which, const std::vector<std::size_t>& n_list, std::size_t refinement) {
  paths::StepPath limit;
  limit.times = {0.5};
  limit.values = {0.0, 1.0};
  Json rep;
  rep["schema"] = "cusplab.metric_demo.v1";
  rep["example"] = to_string(which);
  rep["refinement"] = refinement;
  switch (which) {
    case MetricExample::j1_example:
      rep["expected"] = "J1, M1 and M2 distances all tend to 0";
      break;
    case MetricExample::m1_example:
      rep["expected"] = "M1 and M2 distances tend to 0; J1 stays bounded below";
      break;
    case MetricExample::m2_example:
      rep["expected"] = "only the M2 distance tends to 0";
      break;
    case MetricExample::figure_c:
      rep["expected"] = "no distance tends to 0";
      break;
  }
  Json levels = Json::array();
  for (std::size_t n : n_list) {
    if (n < 3) throw InputError("metric demo needs n >= 3");
    const double h = 1.0 / static_cast<double>(n);
    const double a_n = 1.0 + h;
    paths::StepPath g;
    switch (which) {
      case MetricExample::j1_example:
        g.times = {0.5 - h};
        g.values = {0.0, a_n};
        break;
      case MetricExample::m1_example:
        g.times = {0.5 - h, 0.5};
        g.values = {0.0, 0.75, a_n};
        break;
      case MetricExample::m2_example:
        g.times = {0.5 - h, 0.5, 0.5 + h};
        g.values = {0.0, 0.75, 1.0 / 3.0, a_n};
        break;
      case MetricExample::figure_c:
        g.times = {0.5 - h, 0.5};
        g.values = {0.0, 1.25, a_n};
        break;
    }
    const auto m1 = paths::dist_M1_bracket(g, limit, refinement);
    Json level;
    level["n"] = n;
    level["uniform"] = paths::dist_uniform(g, limit);
    level["J1"] = paths::dist_J1(g, limit);
    level["M1"] = m1.upper;
    level["M1_lower"] = m1.lower;
    level["mesh"] = m1.upper - m1.lower;
    level["M2"] = paths::dist_M2(g, limit);
    level["M2_max_norm"] = paths::dist_M2(g, limit, paths::PlaneNorm::Max);
    levels.push_back(level);
  }
  rep["levels"] = levels;
  return rep;
}

}  // namespace cusplab::experiment
