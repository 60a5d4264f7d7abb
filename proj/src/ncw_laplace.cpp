#include "spdtest/ncw_laplace.hpp"

#include <cmath>
#include <string>

#include "spdtest/accumulate.hpp"

namespace spdtest {

namespace {

bool is_exact_identity(const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != (i == j ? 1.0 : 0.0)) return false;
    return true;
}

bool is_zero(const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) return false;
    return true;
}

}  // namespace

NcwParams::NcwParams(double nu_, SpdMatrix sigma_, SpdMatrix omega_)
    : nu(nu_), sigma(std::move(sigma_)), omega(std::move(omega_)) {
    if (!(nu > 0.0))
        throw InvalidShapeError("NcwParams: nu must be positive, got " +
                                std::to_string(nu));
    if (!sigma.strict_pd())
        throw NotPositiveDefiniteError("NcwParams: sigma must be strict-PD");
    if (sigma.dim() != omega.dim())
        throw DimensionMismatchError("NcwParams: sigma is " + std::to_string(sigma.dim()) +
                                     "-dim but omega is " + std::to_string(omega.dim()));
}

LaplaceTransform::LaplaceTransform(const NcwParams& params)
    : params_(params),
      dim_(params.dim()),
      identity_sigma_(is_exact_identity(params.sigma.entries())),
      zero_omega_(is_zero(params.omega.entries())),
      g_(cholesky(params.sigma).lower),
      m_ws_(dim_ * dim_),
      rt_ws_(dim_ * dim_),
      wt_ws_(dim_ * dim_),
      psum_(dim_ * dim_),
      rsum_(dim_ * dim_),
      wsum_(dim_ * dim_) {}

LaplaceTransform::Prepared LaplaceTransform::prepare(const Matrix& a) const {
    if (a.rows() != dim_ || a.cols() != dim_)
        throw DimensionMismatchError("LaplaceTransform: argument is " +
                                     std::to_string(a.rows()) + "x" +
                                     std::to_string(a.cols()) + ", measure dimension is " +
                                     std::to_string(dim_));
    Prepared p;
    const Matrix& omega = params_.omega.entries();
    p.tr_omega = trace_product(a, omega);

    Matrix ag = identity_sigma_ ? a : matmul(a, g_);
    if (identity_sigma_) {
        p.ptilde.assign(a.data(), a.data() + dim_ * dim_);
    } else {
        Matrix gtag = matmul(g_.transposed(), ag);
        p.ptilde.assign(gtag.data(), gtag.data() + dim_ * dim_);
    }
    if (!zero_omega_) {
        Matrix wag = matmul(omega, ag);
        p.rg.assign(ag.data(), ag.data() + dim_ * dim_);
        p.omega_rg.assign(wag.data(), wag.data() + dim_ * dim_);
    }
    return p;
}

double LaplaceTransform::eval(const double* p, const double* r, const double* w,
                              double tr_omega) const {
    const std::size_t d = dim_;
    double* m = m_ws_.data();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            m[i * d + j] = (i == j ? 1.0 : 0.0) + 2.0 * p[i * d + j];

    // I + 2*PSD has eigenvalues >= 1; a pivot at or below zero means the
    // inputs were already broken (overflow, NaN).
    if (!cholesky_in_place(m, d, 0.0))
        throw PivotFailureError("ncw_laplace: Cholesky breakdown on I + 2*G^T*S*G");

    double diag_prod = 1.0;
    for (std::size_t i = 0; i < d; ++i) diag_prod *= m[i * d + i];
    const double log_det = 2.0 * std::log(diag_prod);

    double exponent = -params_.nu * log_det;
    if (!zero_omega_) {
        // tr(S (I+2*Sigma*S)^{-1} omega) = tr(S omega) - 2 tr(M^{-1} R^T W)
        // with R = S G, W = omega S G, M = I + 2 G^T S G; the last trace is
        // the Frobenius product of the forward solves L^{-1}R^T and L^{-1}W^T.
        double* rt = rt_ws_.data();
        double* wt = wt_ws_.data();
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                rt[j * d + i] = r[i * d + j];
                wt[j * d + i] = w[i * d + j];
            }
        forward_solve_in_place(m, d, rt, d);
        forward_solve_in_place(m, d, wt, d);
        double t2 = 0.0;
        for (std::size_t k = 0; k < d * d; ++k) t2 += rt[k] * wt[k];
        exponent += -tr_omega + 2.0 * t2;
    }
    const double v = std::exp(exponent);
    return v < 1.0 ? v : 1.0;
}

double LaplaceTransform::pair_value(const Prepared& a, const Prepared& b) const {
    const std::size_t n = dim_ * dim_;
    for (std::size_t k = 0; k < n; ++k) psum_[k] = a.ptilde[k] + b.ptilde[k];
    if (zero_omega_) return eval(psum_.data(), nullptr, nullptr, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        rsum_[k] = a.rg[k] + b.rg[k];
        wsum_[k] = a.omega_rg[k] + b.omega_rg[k];
    }
    return eval(psum_.data(), rsum_.data(), wsum_.data(), a.tr_omega + b.tr_omega);
}

double LaplaceTransform::value(const Matrix& s) const {
    Prepared p = prepare(s);
    return eval(p.ptilde.data(), zero_omega_ ? nullptr : p.rg.data(),
                zero_omega_ ? nullptr : p.omega_rg.data(), p.tr_omega);
}

double ncw_laplace(const SpdMatrix& s, const NcwParams& params) {
    if (s.dim() != params.dim())
        throw DimensionMismatchError("ncw_laplace: argument dimension " +
                                     std::to_string(s.dim()) + " != measure dimension " +
                                     std::to_string(params.dim()));
    return LaplaceTransform(params).value(s.entries());
}

double empirical_laplace(const MatrixSample& sample, const SpdMatrix& t) {
    if (sample.empty()) throw EmptySampleError("empirical_laplace: empty sample");
    if (sample.dim() != t.dim())
        throw DimensionMismatchError("empirical_laplace: sample dimension " +
                                     std::to_string(sample.dim()) + " != argument dimension " +
                                     std::to_string(t.dim()));
    NeumaierSum acc;
    for (std::size_t k = 0; k < sample.size(); ++k)
        acc.add(std::exp(-trace_product(t.entries(), sample[k].entries())));
    return acc.value() / static_cast<double>(sample.size());
}

}  // namespace spdtest
