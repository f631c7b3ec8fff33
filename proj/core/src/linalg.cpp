#include "embedclust/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "embedclust/error.hpp"

namespace embedclust {

namespace {

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

double off_diagonal_frobenius(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (i != j) {
        acc += a(i, j) * a(i, j);
      }
    }
  }
  return std::sqrt(acc);
}

double frobenius(const Matrix& a) {
  double acc = 0.0;
  for (double v : a.data) {
    acc += v * v;
  }
  return std::sqrt(acc);
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul: cannot multiply " + shape_of(a) + " by " +
                     shape_of(b));
  }
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) {
        continue;
      }
      for (std::size_t j = 0; j < b.cols; ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      out(j, i) = m(i, j);
    }
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: length mismatch, " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("squared_distance: length mismatch, " +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

EigenResult sym_eig(const Matrix& s) {
  if (s.rows != s.cols) {
    throw ValidationError("sym_eig: matrix is " +
                          std::to_string(s.rows) + "x" +
                          std::to_string(s.cols) + ", expected square");
  }
  const std::size_t n = s.rows;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = std::max(1.0, std::abs(s(i, j)) + std::abs(s(j, i)));
      if (std::abs(s(i, j) - s(j, i)) > 1e-9 * scale) {
        throw ValidationError("sym_eig: matrix is not symmetric at (" +
                              std::to_string(i) + "," + std::to_string(j) +
                              ")");
      }
    }
  }

  Matrix a = s;
  // Force exact symmetry so rotations stay consistent.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  Matrix v = Matrix::identity(n);

  const double tol = 1e-12 * std::max(frobenius(a), 1e-300);
  constexpr std::size_t kMaxSweeps = 100;

  bool converged = false;
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_frobenius(a) <= tol) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) {
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                             : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_diagonal_frobenius(a) > tol) {
    throw ConvergenceError(
        "sym_eig: no convergence after " + std::to_string(kMaxSweeps) +
        " sweeps, off-diagonal residual " +
        std::to_string(off_diagonal_frobenius(a)));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x) > a(y, y);
  });

  EigenResult result;
  result.eigenvalues.resize(n);
  result.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    result.eigenvalues[j] = a(src, src);
    double colnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      colnorm += v(i, src) * v(i, src);
    }
    colnorm = std::sqrt(colnorm);
    for (std::size_t i = 0; i < n; ++i) {
      result.eigenvectors(i, j) = v(i, src) / colnorm;
    }
  }
  return result;
}

}  // namespace embedclust
