#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cusplab::paths {

// Right-continuous step function on [a,b]: values[0] on [a, times[0]),
// values[i] on [times[i-1], times[i]), values.back() on [times.back(), b].
// A jump time equal to b changes the value at the single point b.
struct StepPath {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> times;
  std::vector<double> values{0.0};

  static StepPath constant(double value, double a = 0.0, double b = 1.0);
  // Throws InputError on invalid layout.
  void validate() const;

  [[nodiscard]] double at(double t) const;
  [[nodiscard]] double left_limit(double t) const;
  [[nodiscard]] std::size_t jump_count() const { return times.size(); }
  // Removes zero-height jumps.
  [[nodiscard]] StepPath simplified() const;
  [[nodiscard]] StepPath restricted(double lo, double hi) const;
  [[nodiscard]] double min_value() const;
  [[nodiscard]] double max_value() const;

  bool operator==(const StepPath&) const = default;
};

struct Vertex {
  double t = 0.0;
  double s = 0.0;
  bool operator==(const Vertex&) const = default;
};

// Completed graph as an ordered polyline; consecutive vertices form either a
// horizontal plateau or a vertical jump segment.
struct CompletedGraph {
  std::vector<Vertex> vertices;
};

// W_n(t) = partial_sums[floor(n t) - 1] / norm with the empty sum before the
// first jump; partial_sums[k-1] is the sum of the first k increments.
[[nodiscard]] StepPath path_from_sums(std::span<const double> partial_sums, std::size_t n, double norm);

[[nodiscard]] CompletedGraph completed_graph(const StepPath& p);
[[nodiscard]] StepPath path_from_graph(const CompletedGraph& g);

[[nodiscard]] double dist_uniform(const StepPath& p1, const StepPath& p2);

enum class PlaneNorm { L1, Max };

// Hausdorff distance between completed graphs, by default under |dt| + |ds|.
// PlaneNorm::Max uses max(|dt|, |ds|), the norm in which dist_M1 and dist_J1
// measure, so that d_M2 <= d_M1 <= d_J1 holds as metrics.
[[nodiscard]] double dist_M2(const StepPath& p1, const StepPath& p2, PlaneNorm norm = PlaneNorm::L1);

// Certified bracket for an infimum-type distance.
struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  double value() const { return upper; }
};

// Frechet-type distance between completed graphs with cost
// max(|dt|, |ds|), by dynamic programming over monotone correspondences of
// discretized graphs. Throws InputError if refinement < jump count.
[[nodiscard]] Bracket dist_M1_bracket(const StepPath& p1, const StepPath& p2, std::size_t refinement);
[[nodiscard]] double dist_M1(const StepPath& p1, const StepPath& p2, std::size_t refinement);

// Exact J1 distance inf_lambda max(|g2 o lambda - g1|, |lambda - id|) for step paths.
[[nodiscard]] Bracket dist_J1_bracket(const StepPath& p1, const StepPath& p2, std::size_t refinement = 0);
[[nodiscard]] double dist_J1(const StepPath& p1, const StepPath& p2, std::size_t refinement = 0);

struct Flattening {
  StepPath flattened;
  double bound = 0.0;
  double A = 0.0;
  double B = 0.0;
};

[[nodiscard]] Flattening flatten_endpoints(const StepPath& p, double a, double b);

[[nodiscard]] double sup_process(const StepPath& p, double t);
// Running supremum as a path.
[[nodiscard]] StepPath sup_path(const StepPath& p);

// CSV rows "time,value": each row gives the level from that time on; the
// first row is at the domain start and the last row at the domain end.
void write_csv(std::ostream& os, const StepPath& p);
[[nodiscard]] StepPath read_csv(std::istream& is);

}  // namespace cusplab::paths
