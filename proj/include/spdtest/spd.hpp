#ifndef SPDTEST_SPD_HPP
#define SPDTEST_SPD_HPP

#include <cstddef>
#include <optional>

#include "spdtest/matrix.hpp"

namespace spdtest {

/// Tolerances used by validation and factorization. All values are
/// relative; see validate_spd for the exact scaling.
struct ToleranceSet {
    double sym_tol = 1e-8;    // symmetry: max|M-M^T| <= sym_tol * max(1, max|entry|)
    double pivot_tol = 1e-12; // Cholesky pivot floor, scaled by max diagonal
    double psd_tol = 1e-8;    // PSD probe shift, scaled by max(1, max diagonal)
    double recon_tol = 1e-10; // L*L^T reconstruction (tests)
    double solve_tol = 1e-10; // solve residual (tests)
};

enum class Definiteness { StrictPd, Psd };

/// Validated symmetric positive (semi)definite matrix. Construction goes
/// through validate_spd (or the trusted samplers), so entries are always
/// exactly symmetric and the flag reflects a passed Cholesky probe.
class SpdMatrix {
  public:
    SpdMatrix() = default;

    static SpdMatrix identity(std::size_t dim);
    /// c*I_d; strict for c > 0, psd for c == 0. Negative c is rejected.
    static SpdMatrix scaled_identity(std::size_t dim, double c);

    std::size_t dim() const { return entries_.rows(); }
    const Matrix& entries() const { return entries_; }
    Definiteness definiteness() const { return definiteness_; }
    bool strict_pd() const { return definiteness_ == Definiteness::StrictPd; }

    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

    friend bool operator==(const SpdMatrix& a, const SpdMatrix& b) {
        return a.entries_ == b.entries_ && a.definiteness_ == b.definiteness_;
    }

  private:
    friend SpdMatrix validate_spd(const Matrix&, Definiteness, const ToleranceSet&);
    SpdMatrix(Matrix entries, Definiteness d)
        : entries_(std::move(entries)), definiteness_(d) {}

    Matrix entries_;
    Definiteness definiteness_ = Definiteness::Psd;
};

/// Lower-triangular Cholesky factor L with L*L^T equal to the source.
struct CholeskyFactor {
    std::size_t dim = 0;
    Matrix lower;
};

/// Check symmetry, symmetrize as (M+M^T)/2 and probe definiteness.
///
/// Strict mode requires a Cholesky with every pivot above
/// pivot_tol * max-diagonal; psd mode factors M + shift*I with
/// shift = psd_tol * max(1, max-diagonal), which accepts exactly the
/// matrices whose eigenvalue estimates are >= -shift (the zero matrix
/// included).
SpdMatrix validate_spd(const Matrix& m, Definiteness mode,
                       const ToleranceSet& tol = ToleranceSet{});

CholeskyFactor cholesky(const SpdMatrix& m, const ToleranceSet& tol = ToleranceSet{});

/// log det(M) = 2 * sum_i log L_ii through the Cholesky factor.
double logdet(const SpdMatrix& m, const ToleranceSet& tol = ToleranceSet{});

/// Solve M * X = B for strict-PD M via two triangular solves.
Matrix solve_spd(const SpdMatrix& m, const Matrix& b,
                 const ToleranceSet& tol = ToleranceSet{});

// --- low-level kernels (shared with the transform hot path) ---

/// In-place lower Cholesky of the symmetric matrix stored in `a`
/// (row-major, dim x dim); only the lower triangle of the result is
/// meaningful. Returns false when a pivot falls at or below pivot_floor
/// (an absolute threshold).
bool cholesky_in_place(double* a, std::size_t dim, double pivot_floor);

/// Forward substitution: overwrite B (dim x ncols, row-major) with L^{-1} B.
void forward_solve_in_place(const double* lower, std::size_t dim, double* b,
                            std::size_t ncols);

/// Back substitution with L^T: overwrite B with L^{-T} B.
void backward_solve_in_place(const double* lower, std::size_t dim, double* b,
                             std::size_t ncols);

}  // namespace spdtest

#endif  // SPDTEST_SPD_HPP
