#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cusplab/paths.hpp"
#include "cusplab/rng.hpp"

namespace testing {

inline cusplab::paths::StepPath make_path(std::vector<double> times, std::vector<double> values) {
  cusplab::paths::StepPath p;
  p.times = std::move(times);
  p.values = std::move(values);
  return p;
}

// Random step path on [0,1] with up to max_jumps jumps; values on a coarse
// grid so that ties and repeated levels occur.
inline cusplab::paths::StepPath random_path(cusplab::Philox& rng, int max_jumps = 6) {
  const int k = static_cast<int>(rng.uniform() * (max_jumps + 1));
  std::vector<double> t;
  for (int i = 0; i < k; ++i) t.push_back(std::round((0.02 + 0.96 * rng.uniform()) * 64.0) / 64.0);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::vector<double> v;
  for (std::size_t i = 0; i <= t.size(); ++i) v.push_back(std::round((rng.uniform() * 4.0 - 2.0) * 8.0) / 8.0);
  return make_path(t, v);
}

}  // namespace testing
