#include "spdtest/spd.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace spdtest {

namespace {

double max_diagonal(const Matrix& m) {
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) d = std::max(d, m(i, i));
    return d;
}

Matrix symmetrized(const Matrix& m) {
    Matrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

// Cholesky attempt on a copy; nullopt on pivot failure.
std::optional<Matrix> try_cholesky(const Matrix& sym, double pivot_floor) {
    Matrix work = sym;
    if (!cholesky_in_place(work.data(), work.rows(), pivot_floor))
        return std::nullopt;
    // zero the strict upper triangle so the factor is a genuine lower matrix
    for (std::size_t i = 0; i < work.rows(); ++i)
        for (std::size_t j = i + 1; j < work.cols(); ++j) work(i, j) = 0.0;
    return work;
}

}  // namespace

bool cholesky_in_place(double* a, std::size_t dim, double pivot_floor) {
    for (std::size_t j = 0; j < dim; ++j) {
        double d = a[j * dim + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * dim + k] * a[j * dim + k];
        if (!(d > pivot_floor)) return false;  // also rejects NaN
        const double ljj = std::sqrt(d);
        a[j * dim + j] = ljj;
        for (std::size_t i = j + 1; i < dim; ++i) {
            double s = a[i * dim + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * dim + k] * a[j * dim + k];
            a[i * dim + j] = s / ljj;
        }
    }
    return true;
}

void forward_solve_in_place(const double* lower, std::size_t dim, double* b,
                            std::size_t ncols) {
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t c = 0; c < ncols; ++c) {
            double s = b[i * ncols + c];
            for (std::size_t k = 0; k < i; ++k)
                s -= lower[i * dim + k] * b[k * ncols + c];
            b[i * ncols + c] = s / lower[i * dim + i];
        }
    }
}

void backward_solve_in_place(const double* lower, std::size_t dim, double* b,
                             std::size_t ncols) {
    for (std::size_t ii = dim; ii-- > 0;) {
        for (std::size_t c = 0; c < ncols; ++c) {
            double s = b[ii * ncols + c];
            for (std::size_t k = ii + 1; k < dim; ++k)
                s -= lower[k * dim + ii] * b[k * ncols + c];
            b[ii * ncols + c] = s / lower[ii * dim + ii];
        }
    }
}

SpdMatrix validate_spd(const Matrix& m, Definiteness mode, const ToleranceSet& tol) {
    if (!m.square())
        throw DimensionMismatchError("validate_spd: matrix is not square (" +
                                     std::to_string(m.rows()) + "x" +
                                     std::to_string(m.cols()) + ")");
    if (m.rows() == 0) throw DimensionMismatchError("validate_spd: empty matrix");
    if (!m.all_finite()) throw NotFiniteError("validate_spd: non-finite entry");

    double asym = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            asym = std::max(asym, std::fabs(m(i, j) - m(j, i)));
    if (asym > tol.sym_tol * std::max(1.0, m.max_abs()))
        throw NotSymmetricError("validate_spd: asymmetry " + std::to_string(asym) +
                                " beyond tolerance");

    Matrix sym = symmetrized(m);
    const double max_diag = max_diagonal(sym);

    if (mode == Definiteness::StrictPd) {
        if (!try_cholesky(sym, tol.pivot_tol * std::max(max_diag, 0.0)))
            throw NotPositiveDefiniteError("validate_spd: Cholesky pivot failure");
    } else {
        const double shift = tol.psd_tol * std::max(1.0, max_diag);
        Matrix probe = sym;
        for (std::size_t i = 0; i < probe.rows(); ++i) probe(i, i) += shift;
        if (!try_cholesky(probe, 0.0))
            throw NotPsdError("validate_spd: shifted Cholesky probe failed");
    }
    return SpdMatrix(std::move(sym), mode);
}

SpdMatrix SpdMatrix::identity(std::size_t dim) {
    return validate_spd(Matrix::identity(dim), Definiteness::StrictPd);
}

SpdMatrix SpdMatrix::scaled_identity(std::size_t dim, double c) {
    return validate_spd(c * Matrix::identity(dim),
                        c > 0.0 ? Definiteness::StrictPd : Definiteness::Psd);
}

CholeskyFactor cholesky(const SpdMatrix& m, const ToleranceSet& tol) {
    if (!m.strict_pd())
        throw NotPositiveDefiniteError("cholesky: requires a strict-PD matrix");
    auto lower =
        try_cholesky(m.entries(), tol.pivot_tol * std::max(max_diagonal(m.entries()), 0.0));
    if (!lower) throw PivotFailureError("cholesky: pivot failure");
    return CholeskyFactor{m.dim(), std::move(*lower)};
}

double logdet(const SpdMatrix& m, const ToleranceSet& tol) {
    const CholeskyFactor f = cholesky(m, tol);
    double s = 0.0;
    for (std::size_t i = 0; i < f.dim; ++i) s += std::log(f.lower(i, i));
    return 2.0 * s;
}

Matrix solve_spd(const SpdMatrix& m, const Matrix& b, const ToleranceSet& tol) {
    if (b.rows() != m.dim())
        throw DimensionMismatchError("solve_spd: right-hand side has " +
                                     std::to_string(b.rows()) + " rows, expected " +
                                     std::to_string(m.dim()));
    const CholeskyFactor f = cholesky(m, tol);
    Matrix x = b;
    forward_solve_in_place(f.lower.data(), f.dim, x.data(), x.cols());
    backward_solve_in_place(f.lower.data(), f.dim, x.data(), x.cols());
    return x;
}

}  // namespace spdtest
