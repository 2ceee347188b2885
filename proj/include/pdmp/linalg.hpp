#ifndef PDMP_LINALG_HPP
#define PDMP_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace pdmp {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Row-major dense matrix for the small problems (d <= a few dozen) that
/// appear in potentials and flows.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(std::size_t rows, std::size_t cols, std::span<const double> row_major);
    static DenseMatrix diagonal(std::span<const double> diag);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const { return data_; }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    Vec multiply(std::span<const double> x) const;
    /// y = A^T x
    void multiply_transposed(std::span<const double> x, std::span<double> y) const;

    /// x^T A y
    double bilinear(std::span<const double> x, std::span<const double> y) const;

    bool is_symmetric(double rel_tol) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

struct SymmetricEigen {
    Vec values;            // ascending
    DenseMatrix vectors;   // column j is the eigenvector for values[j]
    int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `tol` times the Frobenius norm of the input.
SymmetricEigen jacobi_eigen(const DenseMatrix& a, double tol = 1e-12, int max_sweeps = 100);

}  // namespace pdmp

#endif  // PDMP_LINALG_HPP
