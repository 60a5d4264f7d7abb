#ifndef SPDTEST_STATISTIC_HPP
#define SPDTEST_STATISTIC_HPP

#include "spdtest/ncw_laplace.hpp"
#include "spdtest/sample.hpp"

namespace spdtest {

/// Two-sample statistic value: the raw integral L and its
/// n1*n2/(n1+n2) scaling (the form tabulated for percentiles).
struct StatisticValue {
    double raw = 0.0;
    double scaled = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Kernel Psi(Xi, Xj; Yk, Yl) =
///   L(Xi+Xj) + L(Yk+Yl)
///   - 1/2 [L(Xi+Yk) + L(Xi+Yl) + L(Xj+Yk) + L(Xj+Yl)],
/// with L the NCW-measure Laplace transform. The cross terms are grouped
/// per X element so that swapping (Xi,Xj) or (Yk,Yl) is exact in floating
/// point, not just up to roundoff.
double kernel_psi(const SpdMatrix& xi, const SpdMatrix& xj, const SpdMatrix& yk,
                  const SpdMatrix& yl, const NcwParams& params);

/// Quadruple-sum form (1/(n1^2 n2^2)) sum_ijkl Psi. O(n^4) transform
/// evaluations; exists as the independent oracle for statistic_fast and is
/// meant for small samples only.
StatisticValue statistic_reference(const MatrixSample& x, const MatrixSample& y,
                                   const NcwParams& params);

/// Expanded form
///   (1/n1^2) sum_ij L(Xi+Xj) + (1/n2^2) sum_kl L(Yk+Yl)
///   - (2/(n1 n2)) sum_ik L(Xi+Yk),
/// the production path: O(n1^2 + n2^2 + n1*n2) transform evaluations with
/// the same-sample blocks halved by symmetry.
///
/// Summation is compensated and runs in a canonical order (elements sorted
/// lexicographically, index-lexicographic accumulation, sample roles
/// ordered deterministically), so permuting elements within a sample or
/// swapping the two samples reproduces the value bit for bit.
StatisticValue statistic_fast(const MatrixSample& x, const MatrixSample& y,
                              const NcwParams& params);

/// (n1*n2/(n1+n2)) * raw.
double scaled_statistic(const StatisticValue& v);

}  // namespace spdtest

#endif  // SPDTEST_STATISTIC_HPP
