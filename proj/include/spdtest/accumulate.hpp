#ifndef SPDTEST_ACCUMULATE_HPP
#define SPDTEST_ACCUMULATE_HPP

#include <cmath>

namespace spdtest {

/// Neumaier compensated summation. The statistic differences nearly-equal
/// sums of O(n^2) terms, so plain accumulation would leak the cancellation
/// error into the result.
class NeumaierSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
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

}  // namespace spdtest

#endif  // SPDTEST_ACCUMULATE_HPP
