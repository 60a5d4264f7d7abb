#ifndef SPDTEST_SAMPLE_HPP
#define SPDTEST_SAMPLE_HPP

#include <cstddef>
#include <vector>

#include "spdtest/spd.hpp"

namespace spdtest {

/// Ordered collection of validated SPD/PSD matrices of a common dimension;
/// one of the two samples fed to the test.
class MatrixSample {
  public:
    MatrixSample() = default;
    explicit MatrixSample(std::vector<SpdMatrix> items);

    void push_back(SpdMatrix m);

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    std::size_t dim() const { return dim_; }

    const SpdMatrix& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<SpdMatrix>& items() const { return items_; }

  private:
    std::size_t dim_ = 0;
    std::vector<SpdMatrix> items_;
};

/// Covariance estimator divisor: n-1 (the default everywhere) or n.
enum class CovDivisor { NMinusOne, N };

/// Centered sample covariance of row vectors, validated as PSD;
/// covariances of few observations are rank-deficient, which is all the
/// statistic needs.
SpdMatrix covariance_matrix(const std::vector<std::vector<double>>& obs, std::size_t d,
                            CovDivisor divisor = CovDivisor::NMinusOne);

}  // namespace spdtest

#endif  // SPDTEST_SAMPLE_HPP
