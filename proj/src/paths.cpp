#include "cusplab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cusplab/errors.hpp"

namespace cusplab::paths {

namespace {

constexpr double kDomainTol = 1e-12;

void require_same_domain(const StepPath& p1, const StepPath& p2) {
  p1.validate();
  p2.validate();
  if (std::fabs(p1.a - p2.a) > kDomainTol || std::fabs(p1.b - p2.b) > kDomainTol)
    throw InputError("paths are defined on different domains");
}

struct Box {
  double t_lo, t_hi, s_lo, s_hi;
};

double gap(double z, double lo, double hi) { return std::max({lo - z, 0.0, z - hi}); }

std::vector<Box> boxes_of(const CompletedGraph& g) {
  std::vector<Box> out;
  const auto& v = g.vertices;
  if (v.size() == 1) out.push_back({v[0].t, v[0].t, v[0].s, v[0].s});
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    out.push_back({std::min(v[i].t, v[i + 1].t), std::max(v[i].t, v[i + 1].t), std::min(v[i].s, v[i + 1].s),
                   std::max(v[i].s, v[i + 1].s)});
  return out;
}

// True if every point of each box in `from` lies within distance r of the
// union of `to`. Boxes are degenerate in at least one coordinate.
bool covered(const std::vector<Box>& from, const std::vector<Box>& to, double r, PlaneNorm norm) {
  std::vector<std::pair<double, double>> cover;
  for (const Box& seg : from) {
    const bool vertical = seg.t_lo == seg.t_hi;
    const double z0 = vertical ? seg.s_lo : seg.t_lo;
    const double z1 = vertical ? seg.s_hi : seg.t_hi;
    cover.clear();
    // Boxes of `to` are ordered in t; skip those beyond reach in time.
    auto first = std::lower_bound(to.begin(), to.end(), seg.t_lo - r,
                                  [](const Box& b, double t) { return b.t_hi < t; });
    for (auto it = first; it != to.end() && it->t_lo <= seg.t_hi + r; ++it) {
      const double fixed = vertical ? gap(seg.t_lo, it->t_lo, it->t_hi) : gap(seg.s_lo, it->s_lo, it->s_hi);
      const double slack = norm == PlaneNorm::L1 ? r - fixed : (fixed <= r ? r : -1.0);
      if (slack < 0.0) continue;
      const double lo = (vertical ? it->s_lo : it->t_lo) - slack;
      const double hi = (vertical ? it->s_hi : it->t_hi) + slack;
      if (hi < z0 || lo > z1) continue;
      cover.emplace_back(lo, hi);
    }
    std::sort(cover.begin(), cover.end());
    double reach = z0;
    bool started = false;
    for (const auto& [lo, hi] : cover) {
      if (lo > reach) break;
      reach = std::max(reach, hi);
      started = true;
      if (reach >= z1) break;
    }
    if (!started || reach < z1) return false;
  }
  return true;
}

// Points along the completed graph with consecutive spacing at most h in the
// max-norm; returns the realised mesh through `mesh`.
std::vector<Vertex> discretize(const CompletedGraph& g, double h, double& mesh) {
  std::vector<Vertex> out{g.vertices.front()};
  for (std::size_t i = 0; i + 1 < g.vertices.size(); ++i) {
    const Vertex p = g.vertices[i];
    const Vertex q = g.vertices[i + 1];
    const double len = std::max(std::fabs(q.t - p.t), std::fabs(q.s - p.s));
    const std::size_t pieces = h > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h))) : 1;
    for (std::size_t k = 1; k <= pieces; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(pieces);
      out.push_back({k == pieces ? q.t : p.t + u * (q.t - p.t), k == pieces ? q.s : p.s + u * (q.s - p.s)});
    }
    mesh = std::max(mesh, len / static_cast<double>(pieces));
  }
  return out;
}

double graph_length(const CompletedGraph& g) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < g.vertices.size(); ++i)
    total += std::max(std::fabs(g.vertices[i + 1].t - g.vertices[i].t), std::fabs(g.vertices[i + 1].s - g.vertices[i].s));
  return total;
}

// Interval of reals with explicit endpoint inclusion.
struct Span {
  double lo, hi;
  bool lo_in, hi_in;
  bool empty() const { return lo > hi || (lo == hi && !(lo_in && hi_in)); }
};

Span intersect(const Span& x, const Span& y) {
  Span r{};
  if (x.lo > y.lo) {
    r.lo = x.lo;
    r.lo_in = x.lo_in;
  } else if (y.lo > x.lo) {
    r.lo = y.lo;
    r.lo_in = y.lo_in;
  } else {
    r.lo = x.lo;
    r.lo_in = x.lo_in && y.lo_in;
  }
  if (x.hi < y.hi) {
    r.hi = x.hi;
    r.hi_in = x.hi_in;
  } else if (y.hi < x.hi) {
    r.hi = y.hi;
    r.hi_in = y.hi_in;
  } else {
    r.hi = x.hi;
    r.hi_in = x.hi_in && y.hi_in;
  }
  return r;
}

// Decides whether some increasing homeomorphism lambda of [a,b] achieves
// |g2 o lambda - g1| <= eps and |lambda - id| <= eps. The composed path has
// the levels of g2 with jump times sigma_j = lambda^{-1}(tau'_j); the reachable
// sets of sigma_j are propagated level by level.
bool j1_feasible(const StepPath& g1, const StepPath& g2, double eps) {
  const double a = g1.a, b = g1.b;
  const std::size_t m = g1.times.size();
  auto runs_for = [&](double level) {
    std::vector<Span> runs;
    for (std::size_t i = 0; i <= m; ++i) {
      if (std::fabs(g1.values[i] - level) > eps) continue;
      const double lo = i == 0 ? a : g1.times[i - 1];
      const bool last = i == m;
      const double hi = last ? b : g1.times[i];
      if (!runs.empty() && runs.back().hi == lo && !runs.back().hi_in) {
        runs.back().hi = hi;
        runs.back().hi_in = last;
      } else {
        runs.push_back({lo, hi, true, last});
      }
    }
    return runs;
  };
  std::vector<Span> reach{{a, a, true, true}};
  const std::size_t k = g2.times.size();
  for (std::size_t j = 0; j <= k; ++j) {
    const auto runs = runs_for(g2.values[j]);
    if (j == k) {
      for (const Span& run : runs) {
        if (!run.hi_in) continue;
        for (const Span& f : reach)
          if (!intersect(f, run).empty()) return true;
      }
      return false;
    }
    const double tau = g2.times[j];
    Span window = tau >= b ? Span{b, b, true, true} : Span{tau - eps, tau + eps, true, true};
    if (tau < b) {
      if (window.lo <= a) window = {a, window.hi, false, window.hi_in};
      if (window.hi >= b) window = {window.lo, b, window.lo_in, false};
    }
    std::vector<Span> next;
    for (const Span& run : runs) {
      double x_star = std::numeric_limits<double>::infinity();
      for (const Span& f : reach) {
        const Span hit = intersect(f, run);
        if (!hit.empty()) x_star = std::min(x_star, hit.lo);
      }
      if (!std::isfinite(x_star)) continue;
      const Span y = intersect(Span{x_star, run.hi, false, true}, window);
      if (!y.empty()) next.push_back(y);
    }
    if (next.empty()) return false;
    reach = std::move(next);
  }
  return false;
}

}  // namespace

StepPath StepPath::constant(double value, double a, double b) {
  StepPath p;
  p.a = a;
  p.b = b;
  p.values = {value};
  p.validate();
  return p;
}

void StepPath::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || a > b) throw InputError("path domain must be a finite interval [a,b]");
  if (values.size() != times.size() + 1) throw InputError("path needs exactly one more level than jumps");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > a && times[i] <= b)) throw InputError("jump times must lie in (a,b]");
    if (i > 0 && !(times[i] > times[i - 1])) throw InputError("jump times must be strictly increasing");
  }
  for (double v : values)
    if (!std::isfinite(v)) throw InputError("path levels must be finite");
}

double StepPath::at(double t) const {
  const auto idx = std::upper_bound(times.begin(), times.end(), t) - times.begin();
  return values[static_cast<std::size_t>(idx)];
}

double StepPath::left_limit(double t) const {
  const auto idx = std::lower_bound(times.begin(), times.end(), t) - times.begin();
  return values[static_cast<std::size_t>(idx)];
}

StepPath StepPath::simplified() const {
  StepPath out;
  out.a = a;
  out.b = b;
  out.values = {values.front()};
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i + 1] == out.values.back()) continue;
    out.times.push_back(times[i]);
    out.values.push_back(values[i + 1]);
  }
  return out;
}

StepPath StepPath::restricted(double lo, double hi) const {
  if (!(lo >= a && hi <= b && lo <= hi)) throw InputError("restriction interval must lie inside the path domain");
  StepPath out;
  out.a = lo;
  out.b = hi;
  out.values = {at(lo)};
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] > lo && times[i] <= hi) {
      out.times.push_back(times[i]);
      out.values.push_back(values[i + 1]);
    }
  }
  return out;
}

double StepPath::min_value() const { return *std::min_element(values.begin(), values.end()); }
double StepPath::max_value() const { return *std::max_element(values.begin(), values.end()); }

StepPath path_from_sums(std::span<const double> partial_sums, std::size_t n, double norm) {
  if (n == 0) throw InputError("path_from_sums needs n >= 1");
  if (partial_sums.size() < n) throw InputError("path_from_sums needs at least n partial sums");
  if (!(norm > 0.0)) throw InputError("normalisation must be positive");
  StepPath p;
  p.values = {0.0};
  for (std::size_t k = 1; k <= n; ++k) {
    p.times.push_back(static_cast<double>(k) / static_cast<double>(n));
    p.values.push_back(partial_sums[k - 1] / norm);
  }
  return p.simplified();
}

CompletedGraph completed_graph(const StepPath& p) {
  p.validate();
  const StepPath q = p.simplified();
  CompletedGraph g;
  g.vertices.push_back({q.a, q.values.front()});
  for (std::size_t i = 0; i < q.times.size(); ++i) {
    g.vertices.push_back({q.times[i], q.values[i]});
    g.vertices.push_back({q.times[i], q.values[i + 1]});
  }
  const Vertex end{q.b, q.values.back()};
  if (!(g.vertices.back() == end)) g.vertices.push_back(end);
  return g;
}

StepPath path_from_graph(const CompletedGraph& g) {
  if (g.vertices.empty()) throw InputError("completed graph has no vertices");
  StepPath p;
  p.a = g.vertices.front().t;
  p.b = g.vertices.back().t;
  p.values = {g.vertices.front().s};
  for (std::size_t i = 0; i + 1 < g.vertices.size(); ++i) {
    const Vertex u = g.vertices[i], v = g.vertices[i + 1];
    if (u.t == v.t && u.s != v.s) {
      p.times.push_back(u.t);
      p.values.push_back(v.s);
    }
  }
  p.validate();
  return p.simplified();
}

double dist_uniform(const StepPath& p1, const StepPath& p2) {
  require_same_domain(p1, p2);
  double d = std::fabs(p1.at(p1.a) - p2.at(p1.a));
  for (double t : p1.times) d = std::max(d, std::fabs(p1.at(t) - p2.at(t)));
  for (double t : p2.times) d = std::max(d, std::fabs(p1.at(t) - p2.at(t)));
  return d;
}

double dist_M2(const StepPath& p1, const StepPath& p2, PlaneNorm norm) {
  require_same_domain(p1, p2);
  const auto g1 = boxes_of(completed_graph(p1));
  const auto g2 = boxes_of(completed_graph(p2));
  auto ok = [&](double r) { return covered(g1, g2, r, norm) && covered(g2, g1, r, norm); };
  if (ok(0.0)) return 0.0;
  const double span_s = std::max(p1.max_value(), p2.max_value()) - std::min(p1.min_value(), p2.min_value());
  double lo = 0.0;
  double hi = span_s + (p1.b - p1.a);
  while (!ok(hi)) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

Bracket dist_M1_bracket(const StepPath& p1, const StepPath& p2, std::size_t refinement) {
  require_same_domain(p1, p2);
  const StepPath q1 = p1.simplified(), q2 = p2.simplified();
  if (refinement < std::max(q1.jump_count(), q2.jump_count()))
    throw InputError("refinement is smaller than the number of jumps");
  const auto g1 = completed_graph(q1), g2 = completed_graph(q2);
  const double total = std::max(graph_length(g1), graph_length(g2));
  const double h = total / static_cast<double>(std::max<std::size_t>(refinement, 2) - 1);
  double mesh = 0.0;
  const auto v1 = discretize(g1, h, mesh);
  const auto v2 = discretize(g2, h, mesh);
  auto cost = [](const Vertex& x, const Vertex& y) { return std::max(std::fabs(x.t - y.t), std::fabs(x.s - y.s)); };
  // Discrete Frechet recursion with two rolling rows.
  std::vector<double> prev(v2.size()), cur(v2.size());
  for (std::size_t i = 0; i < v1.size(); ++i) {
    for (std::size_t j = 0; j < v2.size(); ++j) {
      const double c = cost(v1[i], v2[j]);
      double best;
      if (i == 0 && j == 0)
        best = c;
      else if (i == 0)
        best = cur[j - 1];
      else if (j == 0)
        best = prev[j];
      else
        best = std::min({prev[j - 1], prev[j], cur[j - 1]});
      cur[j] = std::max(c, best);
    }
    std::swap(prev, cur);
  }
  const double upper = prev.back();
  return {std::max(0.0, upper - mesh), upper};
}

double dist_M1(const StepPath& p1, const StepPath& p2, std::size_t refinement) {
  return dist_M1_bracket(p1, p2, refinement).value();
}

Bracket dist_J1_bracket(const StepPath& p1, const StepPath& p2, std::size_t /*refinement*/) {
  require_same_domain(p1, p2);
  const StepPath g1 = p1.simplified(), g2 = p2.simplified();
  if (j1_feasible(g1, g2, 0.0)) return {0.0, 0.0};
  double lo = 0.0;
  double hi = dist_uniform(g1, g2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (j1_feasible(g1, g2, mid) ? hi : lo) = mid;
  }
  return {lo, hi};
}

double dist_J1(const StepPath& p1, const StepPath& p2, std::size_t refinement) {
  return dist_J1_bracket(p1, p2, refinement).value();
}

Flattening flatten_endpoints(const StepPath& p, double a, double b) {
  p.validate();
  if (!(a < b)) throw InputError("flattening needs a < b");
  const StepPath q = p.restricted(a, b);
  const double ga = q.at(a), gb = q.at(b);
  double below_a = 0.0, above_b = 0.0, above_a = 0.0, below_b = 0.0;
  for (double v : q.values) {
    below_a = std::max(below_a, ga - v);
    above_b = std::max(above_b, v - gb);
    above_a = std::max(above_a, v - ga);
    below_b = std::max(below_b, gb - v);
  }
  Flattening out;
  out.A = below_a + above_b;
  out.B = above_a + below_b;
  out.bound = (b - a) + std::min(out.A, out.B);
  out.flattened.a = a;
  out.flattened.b = b;
  out.flattened.values = {ga};
  if (gb != ga) {
    out.flattened.times = {b};
    out.flattened.values.push_back(gb);
  }
  return out;
}

double sup_process(const StepPath& p, double t) {
  p.validate();
  if (!(t >= p.a && t <= p.b)) throw InputError("time outside the path domain");
  const auto idx = static_cast<std::size_t>(std::upper_bound(p.times.begin(), p.times.end(), t) - p.times.begin());
  return *std::max_element(p.values.begin(), p.values.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
}

StepPath sup_path(const StepPath& p) {
  p.validate();
  StepPath out = p;
  for (std::size_t i = 1; i < out.values.size(); ++i) out.values[i] = std::max(out.values[i], out.values[i - 1]);
  return out.simplified();
}

void write_csv(std::ostream& os, const StepPath& p) {
  p.validate();
  os << "time,value\n" << std::setprecision(17);
  os << p.a << ',' << p.values.front() << '\n';
  for (std::size_t i = 0; i < p.times.size(); ++i) os << p.times[i] << ',' << p.values[i + 1] << '\n';
  if ((p.times.empty() && p.b > p.a) || (!p.times.empty() && p.times.back() < p.b))
    os << p.b << ',' << p.values.back() << '\n';
}

StepPath read_csv(std::istream& is) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("path CSV row needs two columns: " + line);
    try {
      const double t = std::stod(line.substr(0, comma));
      const double v = std::stod(line.substr(comma + 1));
      rows.emplace_back(t, v);
    } catch (const std::logic_error&) {
      if (rows.empty() && line.rfind("time", 0) == 0) continue;
      throw InputError("malformed path CSV row: " + line);
    }
  }
  if (rows.size() < 2) throw InputError("path CSV needs rows at the domain start and end");
  StepPath p;
  p.a = rows.front().first;
  p.b = rows.back().first;
  p.values = {rows.front().second};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    p.times.push_back(rows[i].first);
    p.values.push_back(rows[i].second);
  }
  p.validate();
  return p.simplified();
}

}  // namespace cusplab::paths
