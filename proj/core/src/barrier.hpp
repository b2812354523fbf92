#pragma once

// Dense log-barrier method for small concave maximization problems with
// linear constraints:
//
//   maximize f(x)  subject to  G x <= h,  A x = b.
//
// Each centering step runs equality-constrained Newton on
// t f(x) + sum log(h - G x) with a backtracking line search that keeps the
// iterate strictly feasible. Both convex subproblems of the scheduler are
// of this shape and have at most a few hundred variables.

#include <functional>

#include "ehpf/model.hpp"

namespace ehpf::detail {

struct Evaluation {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

/// Evaluates f at x. Returns false when x is outside the domain of f. The
/// gradient and Hessian are only required when `derivatives` is true.
using Objective =
    std::function<bool(const Vector& x, bool derivatives, Evaluation& out)>;

struct BarrierProblem {
  Objective objective;
  Matrix g;
  Vector h;
  Matrix a;  // may have zero rows
  Vector b;
};

struct BarrierOptions {
  /// Stop once the duality gap bound m / t falls below this (units of f).
  double gap_tolerance = 1e-11;
  double initial_t = 1.0;
  double t_growth = 10.0;
  /// Total Newton iteration budget across all centering steps.
  int max_newton_iterations = 10000;
  /// Newton iterations per centering step before t is increased anyway.
  int max_centering_iterations = 200;
  /// Backtracking factor in (0, 1).
  double step_shrink = 0.5;
  double armijo = 0.01;
  double newton_tolerance = 1e-12;
};

struct BarrierResult {
  Vector x;
  double t = 0.0;
  int newton_iterations = 0;
  bool converged = false;
};

/// x0 must satisfy A x0 = b and G x0 < h strictly.
BarrierResult maximize_with_barrier(const BarrierProblem& problem, Vector x0,
                                    const BarrierOptions& options);

}  // namespace ehpf::detail
