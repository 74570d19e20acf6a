#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace toric {

/// Neumaier-compensated running sum; order-dependent but deterministic.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Worker count from TORIC_NUM_THREADS (default 1).
std::size_t num_threads();

/// Runs body(i) for i in [0, n) on up to num_threads() workers. Each index
/// is handled exactly once; callers write results by index and reduce
/// serially so the output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace toric
