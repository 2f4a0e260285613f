#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace imblab {

/// Dense row-major matrix of doubles. The only matrix type in the project;
/// covariance handling (symmetry checks, shrinkage, Cholesky) lives here too.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static DenseMatrix identity(std::size_t n, double scale = 1.0);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool is_symmetric(double rel_tol = 1e-9) const;
    void symmetrize();

    /// In-place shrinkage A += eps*I.
    void add_diagonal(double eps);

    bool operator==(const DenseMatrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Small vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
std::vector<double> subtract(std::span<const double> a, std::span<const double> b);

/// w^T A w for square A.
double quadratic_form(const DenseMatrix& a, std::span<const double> w);

/// y = A x  (A: m x n, x: n) -> m.
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);

/// Lower-triangular Cholesky factor of a symmetric PSD matrix.
/// Semidefinite directions (pivot ~ 0) produce zero columns; a pivot more
/// negative than -tol*scale throws std::invalid_argument.
DenseMatrix cholesky_psd(const DenseMatrix& a, double tol = 1e-8);

}  // namespace imblab
