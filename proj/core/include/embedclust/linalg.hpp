#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace embedclust {

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) {
    return data[i * cols + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  std::span<double> row(std::size_t i) {
    return {data.data() + i * cols, cols};
  }

  static Matrix identity(std::size_t n);

  bool operator==(const Matrix&) const = default;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Eigenvalues sorted descending; eigenvector columns aligned and unit-norm.
struct EigenResult {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. The input must be
// square and symmetric within 1e-9. Converges when the off-diagonal Frobenius
// norm drops below 1e-12 relative to the matrix norm; gives up after 100
// sweeps with a ConvergenceError carrying the residual.
EigenResult sym_eig(const Matrix& s);

}  // namespace embedclust
