// Dense real-matrix kernel: product, Kronecker product, inversion,
// unitarity test and the entrywise sign map used by the decoders.
// Everything here is small (<= a few thousand entries) and row-major.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wbe {

// Thrown by invert() when an elimination pivot falls below threshold.
struct singular_matrix_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);  // zero-filled
    Matrix(int rows, int cols, std::vector<double> entries);

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return e_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return e_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return e_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> e_;
};

Matrix mat_mul(const Matrix& a, const Matrix& b);
std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x);
Matrix transpose(const Matrix& a);

// Block (i,j) of the result is a(i,j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

// Gauss-Jordan with partial pivoting; pivot threshold 1e-12.
Matrix invert(const Matrix& a);

// True iff the max-entry deviation of q^T q from the identity is <= tol.
bool is_unitary(const Matrix& q, double tol);

// Componentwise sign; zero maps to +1.
std::vector<double> sign_vec(const std::vector<double>& z);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace wbe
