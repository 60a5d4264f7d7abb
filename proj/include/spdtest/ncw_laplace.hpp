#ifndef SPDTEST_NCW_LAPLACE_HPP
#define SPDTEST_NCW_LAPLACE_HPP

#include <cstddef>
#include <vector>

#include "spdtest/matrix.hpp"
#include "spdtest/sample.hpp"
#include "spdtest/spd.hpp"

namespace spdtest {

/// Parameters of the noncentral Wishart weight measure: exponent nu > 0,
/// strict-PD covariance sigma and PSD noncentrality omega, all of one
/// dimension d. nu is the exponent of the determinant term; the Gaussian
/// construction realizes the measure with 2*nu summands.
struct NcwParams {
    NcwParams(double nu, SpdMatrix sigma, SpdMatrix omega);

    std::size_t dim() const { return sigma.dim(); }

    double nu;
    SpdMatrix sigma;
    SpdMatrix omega;
};

/// Closed-form Laplace transform of the NCW measure,
///
///   L(S) = exp(-tr(S (I + 2*Sigma*S)^{-1} omega)) / det(I + 2*Sigma*S)^nu,
///
/// the transform implied by the Gaussian construction (E exp(-y^T S y)
/// for y ~ N(m, Sigma), summed over the 2*nu construction vectors),
/// evaluated without forming an inverse or a raw determinant. With
/// G = chol(Sigma) the identities det(I + 2*Sigma*S) = det(I + 2*G^T S G)
/// and (I + 2*G G^T S)^{-1} = I - 2 G (I + 2*G^T S G)^{-1} G^T S reduce
/// everything to one small Cholesky plus triangular solves on symmetric
/// PD matrices, for arbitrary (non-commuting) Sigma and S.
///
/// This is the hot inner loop of the statistic: per-element congruence
/// products are prepared once per sample and pair sums reuse them.
/// Instances carry scratch buffers, so share one per thread, not across.
class LaplaceTransform {
  public:
    explicit LaplaceTransform(const NcwParams& params);

    /// Per-element precomputation; pair sums are linear in all fields.
    struct Prepared {
        std::vector<double> ptilde;    // G^T A G
        std::vector<double> rg;        // A G
        std::vector<double> omega_rg;  // omega A G
        double tr_omega = 0.0;         // tr(A omega)
    };

    std::size_t dim() const { return dim_; }
    const NcwParams& params() const { return params_; }

    Prepared prepare(const Matrix& a) const;
    Prepared prepare(const SpdMatrix& a) const { return prepare(a.entries()); }

    /// L(A + B) from two prepared elements.
    double pair_value(const Prepared& a, const Prepared& b) const;

    /// L(S) for a single symmetric PSD argument.
    double value(const Matrix& s) const;

  private:
    double eval(const double* p, const double* r, const double* w, double tr_omega) const;

    NcwParams params_;
    std::size_t dim_;
    bool identity_sigma_;  // exact identity: congruence products collapse
    bool zero_omega_;
    Matrix g_;  // chol(sigma), lower

    // scratch (one evaluation deep; see class comment)
    mutable std::vector<double> m_ws_, rt_ws_, wt_ws_, psum_, rsum_, wsum_;
};

/// Eq.-form transform value for a single PSD argument (pure wrapper).
double ncw_laplace(const SpdMatrix& s, const NcwParams& params);

/// Empirical Laplace transform (1/n) sum_k exp(-tr(T X_k)).
double empirical_laplace(const MatrixSample& sample, const SpdMatrix& t);

}  // namespace spdtest

#endif  // SPDTEST_NCW_LAPLACE_HPP
