#include "imblab/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace imblab {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n, double scale) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
    return m;
}

bool DenseMatrix::is_symmetric(double rel_tol) const {
    if (rows_ != cols_) return false;
    double scale = 0.0;
    for (double v : data_) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return true;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > rel_tol * scale) return false;
    return true;
}

void DenseMatrix::symmetrize() {
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j) {
            double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
            (*this)(i, j) = v;
            (*this)(j, i) = v;
        }
}

void DenseMatrix::add_diagonal(double eps) {
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) (*this)(i, i) += eps;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> subtract(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

double quadratic_form(const DenseMatrix& a, std::span<const double> w) {
    if (a.rows() != a.cols() || a.rows() != w.size())
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += a(i, j) * w[j];
        s += w[i] * row;
    }
    return s;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

DenseMatrix cholesky_psd(const DenseMatrix& a, double tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cholesky_psd: matrix not square");
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
    if (scale == 0.0) scale = 1.0;

    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d < -tol * scale)
            throw std::invalid_argument("cholesky_psd: matrix is not positive semidefinite");
        if (d <= 0.0) {
            // semidefinite direction: zero column
            continue;
        }
        double lj = std::sqrt(d);
        l(j, j) = lj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / lj;
        }
    }
    return l;
}

}  // namespace imblab
