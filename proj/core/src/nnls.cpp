#include "ehpf/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "ehpf/error.hpp"

namespace ehpf {

namespace {

// Least squares restricted to the columns in `passive`; other entries are 0.
Vector restricted_solve(const Matrix& a, const Vector& b,
                        const std::vector<bool>& passive) {
  std::vector<Index> cols;
  for (std::size_t j = 0; j < passive.size(); ++j) {
    if (passive[j]) cols.push_back(static_cast<Index>(j));
  }
  Vector z = Vector::Zero(a.cols());
  if (cols.empty()) return z;
  Matrix sub(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    sub.col(static_cast<Index>(k)) = a.col(cols[k]);
  }
  const Vector zs = sub.colPivHouseholderQr().solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    z[cols[k]] = zs[static_cast<Index>(k)];
  }
  return z;
}

}  // namespace

NnlsResult nnls(const Matrix& a, const Vector& b, const std::vector<bool>& free,
                int max_iterations) {
  const Index n = a.cols();
  if (a.rows() != b.size()) {
    throw DimensionMismatch("nnls: A rows differ from b length");
  }
  if (!free.empty() && static_cast<Index>(free.size()) != n) {
    throw DimensionMismatch("nnls: free mask length differs from A columns");
  }
  auto is_free = [&free](Index j) {
    return !free.empty() && free[static_cast<std::size_t>(j)];
  };
  if (max_iterations <= 0) max_iterations = 3 * static_cast<int>(n) + 10;

  const double scale =
      std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max<Index>(n, a.rows())) * scale *
                     scale;

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  for (Index j = 0; j < n; ++j) passive[static_cast<std::size_t>(j)] = is_free(j);

  NnlsResult result;
  Vector x = restricted_solve(a, b, passive);

  for (int iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Vector w = a.transpose() * (b - a * x);
    Index best = -1;
    double best_w = tol;
    for (Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) continue;
      if (w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) {
      result.converged = true;
      break;
    }
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner <= n; ++inner) {
      Vector z = restricted_solve(a, b, passive);
      double alpha = 1.0;
      bool blocked = false;
      for (Index j = 0; j < n; ++j) {
        if (!passive[static_cast<std::size_t>(j)] || is_free(j)) continue;
        if (z[j] <= 0.0) {
          const double denom = x[j] - z[j];
          const double step = denom > 0.0 ? x[j] / denom : 0.0;
          if (!blocked || step < alpha) alpha = step;
          blocked = true;
        }
      }
      if (!blocked) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      const double x_tol = 1e-14 * std::max(1.0, x.cwiseAbs().maxCoeff());
      for (Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && !is_free(j) &&
            x[j] <= x_tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
  }

  result.x = std::move(x);
  result.residual_norm = (a * result.x - b).norm();
  return result;
}

}  // namespace ehpf
