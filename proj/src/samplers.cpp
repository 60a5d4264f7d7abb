#include "spdtest/samplers.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace spdtest {

namespace {

/// B * B^T with the upper triangle mirrored from the lower, so the result
/// is exactly symmetric.
Matrix aat(const Matrix& b) {
    const std::size_t d = b.rows();
    Matrix c(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < b.cols(); ++k) s += b(i, k) * b(j, k);
            c(i, j) = s;
            c(j, i) = s;
        }
    return c;
}

/// Bartlett factor of a standard Wishart(df, I_d): lower triangular, chi
/// distributed diagonal (df, df-1, ...), standard normal subdiagonal.
/// Draw order is row by row, subdiagonal entries before the diagonal.
Matrix bartlett_lower(double df, std::size_t d, RngStream& rng) {
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < i; ++j) a(i, j) = rng.normal();
        a(i, i) = std::sqrt(rng.chi_square(df - static_cast<double>(i)));
    }
    return a;
}

/// Draws from a.s.-PD matrix laws are strict-PD up to floating point;
/// rare numerically rank-deficient draws (nearly parallel construction
/// vectors, extreme tails) degrade to the PSD flag instead of aborting.
SpdMatrix validate_draw(const Matrix& m) {
    try {
        return validate_spd(m, Definiteness::StrictPd);
    } catch (const NotPositiveDefiniteError&) {
        return validate_spd(m, Definiteness::Psd);
    }
}

}  // namespace

std::vector<double> sample_mvn(const std::vector<double>& mean, const SpdMatrix& sigma,
                               RngStream& rng) {
    const std::size_t d = sigma.dim();
    if (mean.size() != d)
        throw DimensionMismatchError("sample_mvn: mean has " + std::to_string(mean.size()) +
                                     " entries, sigma is " + std::to_string(d) + "-dim");
    const CholeskyFactor f = cholesky(sigma);
    std::vector<double> z(d);
    for (double& v : z) v = rng.normal();
    std::vector<double> y(mean);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= i; ++j) y[i] += f.lower(i, j) * z[j];
    return y;
}

SpdMatrix sample_std_wishart(double df, const SpdMatrix& sigma, RngStream& rng) {
    const std::size_t d = sigma.dim();
    if (!(df > static_cast<double>(d) - 1.0))
        throw InvalidShapeError("sample_std_wishart: df must exceed d-1, got " +
                                std::to_string(df));
    const CholeskyFactor f = cholesky(sigma);
    const Matrix b = matmul(f.lower, bartlett_lower(df, d, rng));
    return validate_draw(aat(b));
}

SpdMatrix sample_wishart_rate(double a, const SpdMatrix& sigma, RngStream& rng) {
    const std::size_t d = sigma.dim();
    if (!(a > 0.5 * (static_cast<double>(d) - 1.0)))
        throw InvalidShapeError("sample_wishart_rate: shape must exceed (d-1)/2, got " +
                                std::to_string(a));
    const CholeskyFactor f = cholesky(sigma);
    // C = L^{-T} satisfies C C^T = Sigma^{-1}; X = (1/2) (C A)(C A)^T
    Matrix z = bartlett_lower(2.0 * a, d, rng);
    backward_solve_in_place(f.lower.data(), d, z.data(), d);
    Matrix x = aat(z);
    x *= 0.5;
    return validate_draw(x);
}

SpdMatrix sample_inv_wishart(double a, const SpdMatrix& sigma, RngStream& rng) {
    const std::size_t d = sigma.dim();
    if (!(a > static_cast<double>(d) - 1.0))
        throw InvalidShapeError("sample_inv_wishart: shape must exceed d-1, got " +
                                std::to_string(a));
    const CholeskyFactor f = cholesky(sigma);
    // W = (C A)(C A)^T ~ Wishart(a, Sigma^{-1}) with C = L^{-T}; then
    // X = W^{-1} = (L A^{-T})(L A^{-T})^T without forming W.
    const Matrix bart = bartlett_lower(a, d, rng);
    Matrix z = Matrix::identity(d);
    backward_solve_in_place(bart.data(), d, z.data(), d);  // z = A^{-T}
    if (!z.all_finite())
        throw PivotFailureError("sample_inv_wishart: singular Bartlett factor");
    return validate_draw(aat(matmul(f.lower, z)));
}

SpdMatrix sample_cov_uniform(std::size_t d, std::size_t nobs, RngStream& rng) {
    if (d == 0) throw DimensionMismatchError("sample_cov_uniform: d must be positive");
    if (nobs < 2)
        throw InvalidShapeError("sample_cov_uniform: nobs must be at least 2, got " +
                                std::to_string(nobs));
    std::vector<std::vector<double>> obs(nobs, std::vector<double>(d));
    for (auto& x : obs)
        for (double& v : x) v = rng.uniform01();
    return covariance_matrix(obs, d);
}

SpdMatrix sample_cov_t(double df, const SpdMatrix& sigma, std::size_t nobs,
                       RngStream& rng) {
    const std::size_t d = sigma.dim();
    if (!(df > 0.0))
        throw InvalidShapeError("sample_cov_t: df must be positive, got " +
                                std::to_string(df));
    if (nobs < 2)
        throw InvalidShapeError("sample_cov_t: nobs must be at least 2, got " +
                                std::to_string(nobs));
    const CholeskyFactor f = cholesky(sigma);
    std::vector<std::vector<double>> obs(nobs, std::vector<double>(d));
    std::vector<double> z(d);
    for (auto& x : obs) {
        for (double& v : z) v = rng.normal();
        const double u = rng.chi_square(df);
        const double scale = std::sqrt(df / u);
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += f.lower(i, j) * z[j];
            x[i] = s * scale;
        }
    }
    return covariance_matrix(obs, d);
}

SpdMatrix sample_ncw(unsigned two_nu, const SpdMatrix& sigma,
                     const std::vector<std::vector<double>>& means, RngStream& rng) {
    const std::size_t d = sigma.dim();
    if (two_nu == 0) throw InvalidShapeError("sample_ncw: two_nu must be at least 1");
    if (means.size() != two_nu)
        throw DimensionMismatchError("sample_ncw: expected " + std::to_string(two_nu) +
                                     " mean vectors, got " + std::to_string(means.size()));
    for (const auto& m : means)
        if (m.size() != d)
            throw DimensionMismatchError("sample_ncw: mean vector dimension mismatch");

    Matrix x(d, d);
    for (unsigned i = 0; i < two_nu; ++i) {
        const std::vector<double> y = sample_mvn(means[i], sigma, rng);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c <= r; ++c) {
                const double v = y[r] * y[c];
                x(r, c) += v;
                if (c != r) x(c, r) += v;
            }
    }
    // rank bound two_nu: strict is only possible with enough summands
    return two_nu >= d ? validate_draw(x) : validate_spd(x, Definiteness::Psd);
}

ScenarioSpec ScenarioSpec::wishart_rate(std::string name, double a, SpdMatrix sigma) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.kind = ScenarioKind::WishartRate;
    s.dim = sigma.dim();
    s.shape = a;
    s.scale = std::move(sigma);
    validate_scenario(s);
    return s;
}

ScenarioSpec ScenarioSpec::inv_wishart(std::string name, double a, SpdMatrix sigma) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.kind = ScenarioKind::InvWishart;
    s.dim = sigma.dim();
    s.shape = a;
    s.scale = std::move(sigma);
    validate_scenario(s);
    return s;
}

ScenarioSpec ScenarioSpec::cov_uniform(std::string name, std::size_t d, std::size_t nobs) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.kind = ScenarioKind::CovUniform;
    s.dim = d;
    s.nobs = nobs == 0 ? d : nobs;
    validate_scenario(s);
    return s;
}

ScenarioSpec ScenarioSpec::cov_t(std::string name, double df, SpdMatrix sigma,
                                 std::size_t nobs) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.kind = ScenarioKind::CovT;
    s.dim = sigma.dim();
    s.shape = df;
    s.scale = std::move(sigma);
    s.nobs = nobs == 0 ? s.dim : nobs;
    validate_scenario(s);
    return s;
}

ScenarioSpec ScenarioSpec::scaled_std_wishart(std::string name, double df, SpdMatrix sigma,
                                              double factor) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.kind = ScenarioKind::ScaledStdWishart;
    s.dim = sigma.dim();
    s.shape = df;
    s.scale = std::move(sigma);
    s.scale_factor = factor;
    validate_scenario(s);
    return s;
}

ScenarioSpec ScenarioSpec::ncw(std::string name, unsigned two_nu, SpdMatrix sigma,
                               std::vector<std::vector<double>> means) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.kind = ScenarioKind::Ncw;
    s.dim = sigma.dim();
    s.shape = static_cast<double>(two_nu);
    s.scale = std::move(sigma);
    s.means = std::move(means);
    validate_scenario(s);
    return s;
}

void validate_scenario(const ScenarioSpec& spec) {
    if (spec.dim == 0)
        throw InvalidShapeError("scenario '" + spec.name + "': dimension must be positive");
    const double d = static_cast<double>(spec.dim);
    const bool needs_scale = spec.kind != ScenarioKind::CovUniform;
    if (needs_scale && spec.scale.dim() != spec.dim)
        throw DimensionMismatchError("scenario '" + spec.name + "': scale matrix is " +
                                     std::to_string(spec.scale.dim()) + "-dim, expected " +
                                     std::to_string(spec.dim));
    switch (spec.kind) {
        case ScenarioKind::WishartRate:
            if (!(spec.shape > 0.5 * (d - 1.0)))
                throw InvalidShapeError("scenario '" + spec.name +
                                        "': shape must exceed (d-1)/2");
            break;
        case ScenarioKind::InvWishart:
            if (!(spec.shape > d - 1.0))
                throw InvalidShapeError("scenario '" + spec.name +
                                        "': shape must exceed d-1");
            break;
        case ScenarioKind::CovUniform:
        case ScenarioKind::CovT:
            if (spec.nobs < 2)
                throw InvalidShapeError("scenario '" + spec.name +
                                        "': nobs must be at least 2");
            if (spec.kind == ScenarioKind::CovT && !(spec.shape > 0.0))
                throw InvalidShapeError("scenario '" + spec.name +
                                        "': df must be positive");
            break;
        case ScenarioKind::ScaledStdWishart:
            if (!(spec.shape > d - 1.0))
                throw InvalidShapeError("scenario '" + spec.name +
                                        "': df must exceed d-1");
            if (!(spec.scale_factor > 0.0))
                throw InvalidShapeError("scenario '" + spec.name +
                                        "': scale factor must be positive");
            break;
        case ScenarioKind::Ncw: {
            const double two_nu = spec.shape;
            if (!(two_nu >= 1.0) || two_nu != std::floor(two_nu))
                throw InvalidShapeError("scenario '" + spec.name +
                                        "': two_nu must be a positive integer");
            if (spec.means.size() != static_cast<std::size_t>(two_nu))
                throw DimensionMismatchError("scenario '" + spec.name + "': expected " +
                                             std::to_string(static_cast<std::size_t>(two_nu)) +
                                             " mean vectors");
            for (const auto& m : spec.means)
                if (m.size() != spec.dim)
                    throw DimensionMismatchError("scenario '" + spec.name +
                                                 "': mean vector dimension mismatch");
            break;
        }
    }
}

SpdMatrix sample_scenario(const ScenarioSpec& spec, RngStream& rng) {
    switch (spec.kind) {
        case ScenarioKind::WishartRate:
            return sample_wishart_rate(spec.shape, spec.scale, rng);
        case ScenarioKind::InvWishart:
            return sample_inv_wishart(spec.shape, spec.scale, rng);
        case ScenarioKind::CovUniform:
            return sample_cov_uniform(spec.dim, spec.nobs, rng);
        case ScenarioKind::CovT:
            return sample_cov_t(spec.shape, spec.scale, spec.nobs, rng);
        case ScenarioKind::ScaledStdWishart: {
            const SpdMatrix w = sample_std_wishart(spec.shape, spec.scale, rng);
            Matrix scaled = w.entries();
            scaled *= spec.scale_factor;
            return validate_draw(scaled);
        }
        case ScenarioKind::Ncw:
            return sample_ncw(static_cast<unsigned>(spec.shape), spec.scale, spec.means,
                              rng);
    }
    throw InvalidShapeError("sample_scenario: unknown kind");
}

MatrixSample draw_sample(const ScenarioSpec& spec, std::size_t n, RngStream& rng) {
    if (n == 0) throw EmptySampleError("draw_sample: requested zero draws");
    MatrixSample out;
    for (std::size_t k = 0; k < n; ++k) out.push_back(sample_scenario(spec, rng));
    return out;
}

}  // namespace spdtest
