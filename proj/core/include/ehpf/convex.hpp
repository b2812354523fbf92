#pragma once

// Convex block subproblems of the joint power/time allocation and the block
// coordinate descent (BCD) driver that alternates them.
//
// With the time shares fixed the utility is strictly concave in the powers
// (power subproblem, energy causality constraints). With the powers fixed it
// is concave in the shares (time subproblem, per-slot time limits). Each
// solver returns its iterate together with a KKT certificate computed
// independently of the method used to find it.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ehpf/model.hpp"

namespace ehpf {

struct SolverConfig {
  double tol_kkt = 1e-6;
  double tol_utility = 1e-8;
  int max_inner_iters = 10000;
  int max_bcd_rounds = 200;
  /// Backtracking factor of the Newton line search.
  double step_shrink = 0.5;

  /// Throws InvalidArgument unless every field is positive and
  /// step_shrink is in (0, 1).
  void validate() const;
};

/// KKT certificate of a candidate solution of one subproblem.
///
/// All residuals are dimensionless: stationarity is relative to the largest
/// gradient entry, complementarity to gradient times variable scale (T for
/// shares, mean harvest power for powers), primal violation to the
/// variable scale.
///
/// Power subproblem: lambda[t] prices the energy constraint through slot t,
/// mu[t] the nonnegativity of p_t. Time subproblem: lambda[t] prices the
/// time limit of slot t; mu holds tau_nt >= 0 multipliers in slot-major
/// order (index t * N + n) followed by the N minimum-share multipliers.
struct KktResidual {
  double stationarity_max = 0.0;
  double complementarity_max = 0.0;
  double primal_violation_max = 0.0;
  Vector lambda;
  Vector mu;

  double max_residual() const;
  bool certified(double tol) const { return max_residual() <= tol; }
};

struct Multipliers {
  Vector lambda;
  Vector mu;
};

struct PowerSolution {
  Vector powers;
  KktResidual kkt;
  int iterations = 0;
  /// False when the iteration budget ran out or the certificate exceeds
  /// tol_kkt; powers then hold the best iterate found.
  bool converged = false;
};

struct TimeSolution {
  Matrix shares;
  KktResidual kkt;
  int iterations = 0;
  bool converged = false;
};

/// Maximizes utility over powers for fixed shares subject to p >= 0 and
/// cumulative energy causality.
///
/// Throws DimensionMismatch, InvalidArgument for shares that break the
/// per-slot time limit or nonnegativity, and DegenerateProblem when some
/// user has no time in any slot that can carry power.
PowerSolution solve_power(const Instance& inst, const Matrix& shares,
                          const SolverConfig& cfg = {});

/// Maximizes utility over shares for fixed powers subject to tau >= 0,
/// per-slot time limits and the minimum share per user.
///
/// Throws DimensionMismatch, InvalidArgument when every power is zero or
/// negative, and InfeasibleInput when the powers break energy causality.
TimeSolution solve_time(const Instance& inst, const Vector& powers,
                        const SolverConfig& cfg = {});

/// Gradient of the utility (log2 units) with respect to the powers and to
/// the shares. Throw DegenerateProblem when a user receives zero bits.
Vector utility_gradient_powers(const Instance& inst, const Matrix& shares,
                               const Vector& powers);
Matrix utility_gradient_shares(const Instance& inst, const Vector& powers,
                               const Matrix& shares);

/// Certificate for a candidate power vector. Multipliers are recovered by
/// nonnegative least squares on the stationarity equations over the active
/// constraints unless supplied. Throws InfeasibleInput when the candidate is
/// not primal feasible to within 1e-6 relative.
KktResidual kkt_residual_power(const Instance& inst, const Matrix& shares,
                               const Vector& powers,
                               const std::optional<Multipliers>& given = {});

KktResidual kkt_residual_time(const Instance& inst, const Vector& powers,
                              const Matrix& shares,
                              const std::optional<Multipliers>& given = {});

struct BcdTrace {
  /// utilities[0] is the initial schedule, entry r the schedule after round r.
  std::vector<double> utilities;
  /// Utility after the time half-step of each round.
  std::vector<double> half_step_utilities;
  int rounds_used = 0;
  bool converged = false;
  /// Subsolver nonconvergence and rejected half-steps.
  std::vector<std::string> warnings;
};

struct BcdResult {
  Schedule schedule;
  BcdTrace trace;
};

/// Called after every accepted or rejected half-step with the current
/// schedule. half is 0 for the time step and 1 for the power step.
using BcdObserver =
    std::function<void(int round, int half, const Schedule& current)>;

/// Alternates solve_time and solve_power from a feasible start until a
/// round gains less than tol_utility or max_bcd_rounds is reached. A
/// half-step that would lower the utility is rejected, so the trace is
/// nondecreasing.
///
/// Throws InfeasibleInput when init violates any constraint.
BcdResult bcd(const Instance& inst, const Schedule& init,
              const SolverConfig& cfg = {}, const BcdObserver& observer = {});

}  // namespace ehpf
