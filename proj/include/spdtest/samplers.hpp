#ifndef SPDTEST_SAMPLERS_HPP
#define SPDTEST_SAMPLERS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "spdtest/rng.hpp"
#include "spdtest/sample.hpp"
#include "spdtest/spd.hpp"

namespace spdtest {

/// Multivariate normal draw: mean + L*z with L = chol(sigma).
std::vector<double> sample_mvn(const std::vector<double>& mean, const SpdMatrix& sigma,
                               RngStream& rng);

/// Wishart in the rate parameterization
///   f(X) ~ (det X)^(a - (d+1)/2) * exp(-tr(Sigma X)),
/// realized as (1/2) C W C^T with C C^T = Sigma^{-1} and W a standard
/// Bartlett Wishart with 2a degrees of freedom. E[X] = a * Sigma^{-1}.
/// Requires a > (d-1)/2.
SpdMatrix sample_wishart_rate(double a, const SpdMatrix& sigma, RngStream& rng);

/// Classical Wishart W_d(df, Sigma): E[X] = df * Sigma. Requires df > d-1.
SpdMatrix sample_std_wishart(double df, const SpdMatrix& sigma, RngStream& rng);

/// Inverse Wishart with the (1/2)-convention density
///   f(X) ~ exp(-tr(Sigma X^{-1})/2) / (det X)^((a+d+1)/2),
/// i.e. the inverse of a classical Wishart(a, Sigma^{-1}).
/// E[X] = Sigma/(a-d-1) when a > d+1; sampling needs a > d-1.
SpdMatrix sample_inv_wishart(double a, const SpdMatrix& sigma, RngStream& rng);

/// Centered sample covariance (divisor nobs-1) of nobs iid uniform [0,1]^d
/// vectors. PSD; rank-deficient when nobs <= d.
SpdMatrix sample_cov_uniform(std::size_t d, std::size_t nobs, RngStream& rng);

/// Centered sample covariance of nobs iid multivariate-t vectors
/// z / sqrt(u/df), z ~ N(0, sigma), u ~ chi^2_df.
SpdMatrix sample_cov_t(double df, const SpdMatrix& sigma, std::size_t nobs,
                       RngStream& rng);

/// Noncentral Wishart by the Gaussian construction: sum of two_nu outer
/// products y_i y_i^T with y_i ~ N(means[i], sigma). The implied
/// noncentrality is omega = sum_i m_i m_i^T. Monte Carlo oracle for the
/// closed-form transform.
SpdMatrix sample_ncw(unsigned two_nu, const SpdMatrix& sigma,
                     const std::vector<std::vector<double>>& means, RngStream& rng);

enum class ScenarioKind {
    WishartRate,
    InvWishart,
    CovUniform,
    CovT,
    ScaledStdWishart,
    Ncw,
};

/// Declarative description of one matrix distribution from the power study.
struct ScenarioSpec {
    std::string name;
    ScenarioKind kind = ScenarioKind::WishartRate;
    std::size_t dim = 0;
    double shape = 0.0;         // a / df / two_nu, per kind
    SpdMatrix scale;            // Sigma (ignored by CovUniform)
    std::size_t nobs = 0;       // observations per covariance draw (cmu/cmt)
    double scale_factor = 1.0;  // ScaledStdWishart multiplier
    std::vector<std::vector<double>> means;  // Ncw only

    static ScenarioSpec wishart_rate(std::string name, double a, SpdMatrix sigma);
    static ScenarioSpec inv_wishart(std::string name, double a, SpdMatrix sigma);
    /// nobs defaults to d, the convention of the power tables.
    static ScenarioSpec cov_uniform(std::string name, std::size_t d, std::size_t nobs = 0);
    static ScenarioSpec cov_t(std::string name, double df, SpdMatrix sigma,
                              std::size_t nobs = 0);
    static ScenarioSpec scaled_std_wishart(std::string name, double df, SpdMatrix sigma,
                                           double factor);
    static ScenarioSpec ncw(std::string name, unsigned two_nu, SpdMatrix sigma,
                            std::vector<std::vector<double>> means);
};

/// Throws InvalidShapeError (or a dimension error) when the parameters are
/// not admissible for the kind.
void validate_scenario(const ScenarioSpec& spec);

SpdMatrix sample_scenario(const ScenarioSpec& spec, RngStream& rng);

MatrixSample draw_sample(const ScenarioSpec& spec, std::size_t n, RngStream& rng);

}  // namespace spdtest

#endif  // SPDTEST_SAMPLERS_HPP
