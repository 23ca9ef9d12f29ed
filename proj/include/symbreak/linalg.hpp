#pragma once

#include <cstddef>
#include <vector>

namespace symbreak {

// Dense row-major matrix of doubles. Small and allocation-honest; all the
// numerics in this project are either tiny (N <= 9 reduced systems) or
// moderate (kd <= a few thousand dense Hessians).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    double* row(std::size_t i) { return a_.data() + i * cols_; }
    const double* row(std::size_t i) const { return a_.data() + i * cols_; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    std::vector<double>& raw() { return a_; }
    const std::vector<double>& raw() const { return a_; }

    Matrix transposed() const;

    double frobenius_norm() const;
    double max_abs() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

double dot(const double* x, const double* y, std::size_t n);
double norm2(const double* x, std::size_t n);

struct SymEig {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j is the eigenvector for values[j]
};

// Eigendecomposition of a symmetric matrix: Householder tridiagonalization
// followed by implicit-shift QL. The input is symmetrized first to absorb
// roundoff-level asymmetry.
SymEig sym_eig(const Matrix& a, bool want_vectors = true);

// Solve a x = b by LU with partial pivoting. Throws convergence_error when a
// pivot collapses. cond1_estimate, when non-null, receives a 1-norm condition
// estimate.
std::vector<double> lu_solve(Matrix a, std::vector<double> b, double* cond1_estimate = nullptr);

// Least squares min ||a x - b||_2 via Householder QR (a.rows() >= a.cols()).
// cond_estimate, when non-null, receives |r_00|/|r_min| of the R factor.
std::vector<double> lstsq(const Matrix& a, const std::vector<double>& b,
                          double* cond_estimate = nullptr);

}  // namespace symbreak
