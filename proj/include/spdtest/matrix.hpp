#ifndef SPDTEST_MATRIX_HPP
#define SPDTEST_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "spdtest/errors.hpp"

namespace spdtest {

/// Dense real matrix, row-major. Sized for the small dimensions this
/// library works with (d is 2 or 3 in practice); no blocking, no views.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    /// Build from nested braces: Matrix{{1,2},{3,4}}.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool all_finite() const;
    double max_abs() const;

    Matrix transposed() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator*=(double s);

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix matmul(const Matrix& a, const Matrix& b);

/// tr(A*B) without forming the product; symmetric in its arguments.
double trace_product(const Matrix& a, const Matrix& b);

double trace(const Matrix& a);

/// Lexicographic order on (rows, cols, entries); used to fix canonical
/// summation orders.
int compare_entries(const Matrix& a, const Matrix& b);

}  // namespace spdtest

#endif  // SPDTEST_MATRIX_HPP
