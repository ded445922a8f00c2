#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cusplab/billiard.hpp"
#include "cusplab/errors.hpp"
#include "cusplab/experiment.hpp"
#include "cusplab/intermittent.hpp"
#include "cusplab/observable.hpp"
#include "cusplab/report.hpp"
#include "cusplab/stable.hpp"

namespace {

using namespace cusplab;
using experiment::Json;

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kPartial = 4 };

// Config file plus one flag per config key; flags override the file.
struct ConfigOptions {
  std::string file;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key = value configuration file");
    for (const auto& key : experiment::ExperimentConfig::keys()) {
      overrides[key];
      app->add_option("--" + key, overrides[key], "override config key '" + key + "'");
    }
  }

  experiment::ExperimentConfig load(const CLI::App* app) const {
    auto cfg = file.empty() ? experiment::ExperimentConfig{} : experiment::ExperimentConfig::from_file(file);
    for (const auto& [key, value] : overrides)
      if (app->count("--" + key) > 0) cfg.set(key, value);
    cfg.validate();
    return cfg;
  }
};

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    report::write_file(out, text);
}

Json table_json(const billiard::TableGeometry& g) {
  Json j;
  j["schema"] = "cusplab.table.v1";
  j["beta"] = g.beta();
  j["alpha"] = g.alpha();
  j["s_max"] = g.s_max();
  j["arc_radius"] = g.arc_radius();
  j["arc_center"] = g.arc_center();
  j["corner_height"] = g.corner_height();
  j["corner_angle"] = g.corner_angle();
  j["cusp_curve_length"] = g.cusp_curve_length();
  j["arc_length"] = g.arc_length();
  j["perimeter"] = g.perimeter();
  j["phi_bar_kac"] = g.perimeter() / g.arc_length();
  return j;
}

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::logic_error&) {
      throw InputError("not a number in " + path + ": '" + tok + "'");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cusplab: limit laws for billiards with flat cusps"};
  app.require_subcommand(1);

  // table
  double beta = 3.0, s_max = 1.0, radius = 1.0;
  std::string out;
  auto* table = app.add_subcommand("table", "build and validate a cusp table");
  table->add_option("--beta", beta, "cusp exponent (> 2)");
  table->add_option("--s_max", s_max, "cusp length");
  table->add_option("--arc_radius", radius, "radius of the closing arc");
  table->add_option("--out", out, "JSON output file (default stdout)");

  // orbit
  std::size_t steps = 1000;
  std::uint64_t seed = 1;
  std::optional<double> r0, theta0;
  auto* orbit = app.add_subcommand("orbit", "iterate the collision map and write the orbit as CSV");
  orbit->add_option("--beta", beta);
  orbit->add_option("--s_max", s_max);
  orbit->add_option("--arc_radius", radius);
  orbit->add_option("--steps", steps, "number of collisions");
  orbit->add_option("--seed", seed, "seed for a start drawn from the invariant measure");
  orbit->add_option("--r", r0, "start arc length (with --theta)");
  orbit->add_option("--theta", theta0, "start angle in (0, pi)");
  orbit->add_option("--out", out, "CSV output file (default stdout)");

  ConfigOptions wip_opts, sup_opts;
  auto* wip = app.add_subcommand("wip", "stable-law and WIP experiment");
  wip_opts.attach(wip);
  auto* sup = app.add_subcommand("sup-check", "law of the supremum across the n schedule");
  sup_opts.attach(sup);

  // metric-demo
  std::string example = "j1_example";
  std::vector<std::size_t> n_list{10, 100, 1000};
  std::size_t refinement = 4000;
  auto* demo = app.add_subcommand("metric-demo", "Skorokhod distances on indicator-function families");
  demo->add_option("--example", example, "j1_example | m1_example | m2_example | figure_c");
  demo->add_option("--n", n_list, "family indices")->delimiter(',');
  demo->add_option("--refinement", refinement, "M1 grid refinement");
  demo->add_option("--out", out, "JSON output file (default stdout)");

  // inducing-check
  std::string variant = "lsv", obs_text = "cos(pi*x)";
  double alpha = 1.5, b = 1.3;
  std::size_t n = 10000, replicas = 10000, workers = 0, lap_n = 0;
  auto* induce = app.add_subcommand("inducing-check", "full versus induced Birkhoff sums on an interval map");
  induce->add_option("--system", variant, "lsv | afn");
  induce->add_option("--alpha", alpha, "tail index in (1,2)");
  induce->add_option("--b", b, "AFN branch parameter");
  induce->add_option("--observable", obs_text, "expression in x");
  induce->add_option("--n", n);
  induce->add_option("--replicas", replicas);
  induce->add_option("--seed", seed);
  induce->add_option("--workers", workers, "0 selects hardware concurrency");
  induce->add_option("--lap_n", lap_n, "also compare N_n/n with 1/tau_bar at this n");
  induce->add_option("--out", out, "JSON output file (default stdout)");

  // stable
  double sigma = 1.0, x = 0.0;
  std::string file;
  auto* st = app.add_subcommand("stable", "totally skewed stable laws");
  st->require_subcommand(1);
  auto* st_sample = st->add_subcommand("sample", "print samples, one per line");
  auto* st_cdf = st->add_subcommand("cdf", "print F(x)");
  auto* st_ks = st->add_subcommand("ks", "KS distance of a sample file to the law");
  for (auto* c : {st_sample, st_cdf, st_ks}) {
    c->add_option("--alpha", alpha, "index in (1,2)");
    c->add_option("--sigma", sigma, "scale");
  }
  st_sample->add_option("--n", n);
  st_sample->add_option("--seed", seed);
  st_cdf->add_option("--x", x);
  st_ks->add_option("--file", file, "whitespace-separated sample")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*table) {
      emit(table_json(billiard::TableGeometry::build(beta, s_max, radius)), out);
    } else if (*orbit) {
      const auto g = billiard::TableGeometry::build(beta, s_max, radius);
      billiard::PhasePoint start;
      if (r0 || theta0) {
        if (!(r0 && theta0)) throw InputError("--r and --theta must be given together");
        start.r = *r0;
        start.theta = *theta0;
        start.curve = g.curve_at(*r0);
      } else {
        start = billiard::sample_invariant(g, seed, 1).front();
      }
      std::vector<billiard::CollisionRecord> recs{billiard::state_of(g, start)};
      for (std::size_t k = 0; k < steps; ++k) {
        auto next = billiard::advance(g, recs.back());
        recs.push_back(next);
        if (next.flags != billiard::kFlagNone) break;
      }
      std::ostringstream os;
      billiard::write_orbit_csv(os, recs);
      if (out.empty())
        std::cout << os.str();
      else
        report::write_file(out, os.str());
      if (recs.back().flags != billiard::kFlagNone) {
        std::cerr << "orbit stopped after " << recs.size() - 1 << " collisions (flags " << recs.back().flags << ")\n";
        return kNumerical;
      }
    } else if (*wip) {
      const auto rep = experiment::run_wip_experiment(wip_opts.load(wip));
      std::cout << rep.dump(2) << "\n";
    } else if (*sup) {
      const auto rep = experiment::run_supremum_check(sup_opts.load(sup));
      std::cout << rep.dump(2) << "\n";
    } else if (*demo) {
      emit(experiment::run_metric_demo(experiment::parse_metric_example(example), n_list, refinement), out);
    } else if (*induce) {
      const auto map = intermittent::parse_variant(variant) == intermittent::Variant::afn
                           ? intermittent::IntermittentMap::afn(alpha, b)
                           : intermittent::IntermittentMap::markov(alpha);
      const auto obs = observable::Observable::parse(obs_text);
      intermittent::InducingOptions opt;
      opt.workers = workers > 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
      const auto rep = intermittent::inducing_equivalence_check(
          map, [&](double y) { return obs.raw({0.0, y, 0.0, y, 0.0}); }, n, replicas, seed, opt);
      auto j = Json::parse(intermittent::to_json(rep));
      if (lap_n > 0) {
        const auto lr = intermittent::lap_rate_check(map, lap_n, 64, 1'000'000, seed, opt.workers);
        j["lap_rate"] = {{"n", lr.n},
                         {"orbits", lr.orbits},
                         {"laps_per_step", lr.laps_per_step},
                         {"tau_bar_hat", lr.tau_bar_hat},
                         {"relative_error", std::fabs(lr.laps_per_step * lr.tau_bar_hat - 1.0)},
                         {"lap_violations", lr.lap_violations}};
      }
      emit(j, out);
    } else if (*st_sample) {
      const auto p = stable::StableParams::make(alpha, sigma);
      std::ostringstream os;
      for (double v : stable::sample(p, seed, n)) os << report::format_double(v) << '\n';
      std::cout << os.str();
    } else if (*st_cdf) {
      std::cout << report::format_double(stable::cdf(stable::StableParams::make(alpha, sigma), x)) << '\n';
    } else if (*st_ks) {
      const auto p = stable::StableParams::make(alpha, sigma);
      const auto v = read_numbers(file);
      std::cout << report::format_double(stable::ks_statistic(v, [&](double y) { return stable::cdf(p, y); })) << '\n';
    }
  } catch (const experiment::PartialResults& e) {
    std::cerr << "partial results: " << e.what() << '\n';
    return kPartial;
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
