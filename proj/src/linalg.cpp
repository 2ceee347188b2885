#include "pdmp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pdmp {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

DenseMatrix DenseMatrix::identity(std::size_t n)
{
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_rows(std::size_t rows, std::size_t cols, std::span<const double> row_major)
{
    if (row_major.size() != rows * cols)
        throw std::invalid_argument("DenseMatrix: expected " + std::to_string(rows * cols) + " entries, got " +
                                    std::to_string(row_major.size()));
    DenseMatrix m(rows, cols);
    std::copy(row_major.begin(), row_major.end(), m.data_.begin());
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag)
{
    DenseMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

void DenseMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    for (std::size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
}

Vec DenseMatrix::multiply(std::span<const double> x) const
{
    Vec y(rows_);
    multiply(x, y);
    return y;
}

void DenseMatrix::multiply_transposed(std::span<const double> x, std::span<double> y) const
{
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) y[j] += (*this)(i, j) * x[i];
}

double DenseMatrix::bilinear(std::span<const double> x, std::span<const double> y) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += x[i] * dot(row(i), y);
    return s;
}

bool DenseMatrix::is_symmetric(double rel_tol) const
{
    if (rows_ != cols_) return false;
    double scale = 0.0;
    for (double a : data_) scale = std::max(scale, std::abs(a));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > rel_tol * scale) return false;
    return true;
}

SymmetricEigen jacobi_eigen(const DenseMatrix& input, double tol, int max_sweeps)
{
    const std::size_t n = input.rows();
    if (n != input.cols()) throw std::invalid_argument("jacobi_eigen: matrix is not square");

    DenseMatrix a = input;
    DenseMatrix q = DenseMatrix::identity(n);

    double total = 0.0;
    for (double x : a.data()) total += x * x;
    const double threshold = tol * std::sqrt(total);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > threshold) {
        if (sweep++ >= max_sweeps) throw std::runtime_error("jacobi_eigen: no convergence");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apr = a(p, r);
                if (apr == 0.0) continue;
                // rotation angle that annihilates a(p, r)
                const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akr = a(k, r);
                    a(k, p) = c * akp - s * akr;
                    a(k, r) = s * akp + c * akr;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double ark = a(r, k);
                    a(p, k) = c * apk - s * ark;
                    a(r, k) = s * apk + c * ark;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double qkp = q(k, p);
                    const double qkr = q(k, r);
                    q(k, p) = c * qkp - s * qkr;
                    q(k, r) = s * qkp + c * qkr;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymmetricEigen out;
    out.sweeps = sweep;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = q(k, order[j]);
    }
    return out;
}

}  // namespace pdmp
