#include "spdtest/sample.hpp"

#include <string>

namespace spdtest {

MatrixSample::MatrixSample(std::vector<SpdMatrix> items) {
    for (auto& m : items) push_back(std::move(m));
    items_.shrink_to_fit();
}

void MatrixSample::push_back(SpdMatrix m) {
    if (items_.empty()) {
        dim_ = m.dim();
    } else if (m.dim() != dim_) {
        throw DimensionMismatchError("MatrixSample: element is " + std::to_string(m.dim()) +
                                     "-dim, sample is " + std::to_string(dim_) + "-dim");
    }
    items_.push_back(std::move(m));
}

SpdMatrix covariance_matrix(const std::vector<std::vector<double>>& obs, std::size_t d,
                            CovDivisor divisor) {
    const std::size_t n = obs.size();
    if (n < 2) throw InvalidShapeError("covariance_matrix: needs at least 2 observations");
    for (const auto& x : obs)
        if (x.size() != d)
            throw DimensionMismatchError("covariance_matrix: observation dimension mismatch");
    std::vector<double> mean(d, 0.0);
    for (const auto& x : obs)
        for (std::size_t i = 0; i < d; ++i) mean[i] += x[i];
    for (double& m : mean) m /= static_cast<double>(n);

    const double denom =
        static_cast<double>(divisor == CovDivisor::NMinusOne ? n - 1 : n);
    Matrix c(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (const auto& x : obs) s += (x[i] - mean[i]) * (x[j] - mean[j]);
            s /= denom;
            c(i, j) = s;
            c(j, i) = s;
        }
    return validate_spd(c, Definiteness::Psd);
}

}  // namespace spdtest
