#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cusplab::experiment {

using Json = nlohmann::ordered_json;

// Raised when a run fails after some results were written; a manifest of
// the completed part is left in the output directory.
class PartialResults : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string system = "billiard";  // billiard | lsv | afn
  double beta = 3.0;
  double s_max = 1.0;
  double arc_radius = 1.0;
  std::optional<double> alpha;  // derived for billiards; required range (1,2) for maps
  double b = 1.3;
  std::string observable = "1 + 0.5*cos(theta) - 1.587*x";
  double eta = 1.0;
  std::vector<std::size_t> n_schedule{1000, 10000};
  std::size_t replicas = 200;
  std::uint64_t seed = 1;
  std::string output_dir = "cusplab_out";
  std::size_t workers = 0;  // 0: hardware concurrency
  std::size_t excursion_cap = 10'000'000;
  double grazing_tol = 1e-12;
  std::size_t gridsize = 1025;
  std::size_t centering_samples = 200'000;
  std::size_t paths_kept = 4;
  std::size_t diag_seeds = 5;
  std::size_t tail_returns = 200'000;

  static const std::vector<std::string>& keys();
  // Throws InputError on unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_text(const std::string& text);
  // Throws InputError; for billiards a user alpha must equal beta/(beta-1).
  void validate() const;
  double alpha_value() const;
  std::size_t worker_count() const;
  // Experiment-defining fields only (worker count and output location excluded).
  Json to_json() const;
};

// Each run writes its files to cfg.output_dir and returns the JSON report.
Json run_wip_experiment(const ExperimentConfig& cfg);
Json run_supremum_check(const ExperimentConfig& cfg);

enum class MetricExample { j1_example, m1_example, m2_example, figure_c };
MetricExample parse_metric_example(const std::string& name);
std::string to_string(MetricExample e);
Json run_metric_demo(MetricExample which, const std::vector<std::size_t>& n_list, std::size_t refinement = 4000);

}  // namespace cusplab::experiment
