#pragma once

#include <functional>

namespace cusplab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws NumericalError when the
// requested absolute tolerance is not met within `max_intervals` subdivisions.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, int max_intervals = 2000);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace cusplab
