#include "barrier.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include "ehpf/error.hpp"

namespace ehpf::detail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Barrier-augmented objective t f(x) + sum log(h - G x); -inf off-domain.
double augmented_value(const BarrierProblem& prob, const Vector& x, double t,
                       Evaluation& scratch) {
  const Vector slack = prob.h - prob.g * x;
  if ((slack.array() <= 0.0).any()) return kNegInf;
  if (!prob.objective(x, false, scratch)) return kNegInf;
  if (!std::isfinite(scratch.value)) return kNegInf;
  return t * scratch.value + slack.array().log().sum();
}

}  // namespace

BarrierResult maximize_with_barrier(const BarrierProblem& prob, Vector x0,
                                    const BarrierOptions& opt) {
  const Index n = x0.size();
  const Index m = prob.g.rows();
  const Index p = prob.a.rows();
  if (prob.g.cols() != n || prob.h.size() != m ||
      (p > 0 && (prob.a.cols() != n || prob.b.size() != p))) {
    throw DimensionMismatch("barrier: constraint shapes do not match x0");
  }

  BarrierResult result;
  result.x = std::move(x0);
  double t = opt.initial_t;
  Evaluation eval;
  Evaluation scratch;

  // Orthonormal basis Z of ker A. Steps dx = Z dz keep A x = b exactly,
  // which a full KKT solve fails to do once t makes H badly scaled.
  Matrix z;
  if (p > 0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(prob.a.transpose());
    const Index rank = qr.rank();
    const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    z = q.rightCols(n - rank);
  } else {
    z = Matrix::Identity(n, n);
  }
  if (z.cols() == 0) {
    result.t = t;
    result.converged = true;
    return result;
  }

  while (true) {
    // Centering: Newton on t f(x) + sum log(h - G x) restricted to A x = b.
    for (int inner = 0; inner < opt.max_centering_iterations &&
                        result.newton_iterations < opt.max_newton_iterations;
         ++inner) {
      ++result.newton_iterations;
      const Vector& x = result.x;
      if (!prob.objective(x, true, eval)) {
        throw Error("barrier: iterate left the objective domain");
      }
      const Vector inv_slack = (prob.h - prob.g * x).cwiseInverse();
      const Vector grad =
          t * eval.gradient - prob.g.transpose() * inv_slack;
      const Matrix hess =
          t * eval.hessian - prob.g.transpose() *
                                 inv_slack.cwiseAbs2().asDiagonal() * prob.g;

      const Matrix reduced = -(z.transpose() * hess * z);
      const Vector reduced_grad = z.transpose() * grad;
      Vector dz = reduced.ldlt().solve(reduced_grad);
      if (!dz.allFinite()) dz = reduced.fullPivLu().solve(reduced_grad);
      const Vector dx = z * dz;
      if (!dx.allFinite()) break;

      const double decrement_sq = -dx.dot(hess * dx);
      if (!(decrement_sq > 2.0 * opt.newton_tolerance)) break;

      const double slope = grad.dot(dx);
      const double base = augmented_value(prob, x, t, scratch);
      double step = 1.0;
      bool accepted = false;
      bool noise_limited = false;
      while (step > 1e-14) {
        const Vector trial = x + step * dx;
        const double value = augmented_value(prob, trial, t, scratch);
        if (std::isfinite(value)) {
          if (value >= base + opt.armijo * step * slope) {
            accepted = true;
          } else if (decrement_sq < 1e-6 &&
                     value >= base - 1e-13 * (1.0 + std::abs(base))) {
            // Round-off dominates once the predicted gain is tiny. Take the
            // step but end this centering, since further steps cannot make
            // measurable progress.
            accepted = true;
            noise_limited = true;
          }
        }
        if (accepted) {
          result.x = trial;
          break;
        }
        step *= opt.step_shrink;
      }
      if (!accepted || noise_limited) break;
    }

    result.t = t;
    if (static_cast<double>(m) / t < opt.gap_tolerance) {
      result.converged = true;
      break;
    }
    if (result.newton_iterations >= opt.max_newton_iterations) break;
    t *= opt.t_growth;
  }
  return result;
}

}  // namespace ehpf::detail
