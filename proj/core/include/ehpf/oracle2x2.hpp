#pragma once

// Closed-form optimal time allocation for two users and two slots with the
// powers fixed, and a checker for the KKT system it is derived from.
//
// With Gamma_n = R_n2 / R_n1 (how much user n gains from slot 2 over slot
// 1), the lower-power ("weak") slot always belongs to a single user and the
// higher-power ("strong") slot is split so that the marginal log-utility of
// both users is equal.

#include <optional>

#include "ehpf/model.hpp"

namespace ehpf {

enum class Relation { kLess, kEqual, kGreater };

const char* to_string(Relation r);

struct TwoByTwoCase {
  /// p1 vs p2.
  Relation power_relation = Relation::kEqual;
  /// Gamma_1 vs Gamma_2.
  Relation gamma_relation = Relation::kEqual;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  /// Row of the closed-form table, 1..12 in table order (p1 < p2 block
  /// first; equal-Gamma blocks take two rows each).
  int table_row = 0;
  /// Users x slots.
  Matrix tau_star;
  double utility_star = 0.0;
  /// Second listed optimum of an equal-Gamma row.
  std::optional<Matrix> alternative_tau;
  std::optional<double> alternative_utility;
};

/// Throws DimensionMismatch unless N = K = 2 and powers has two entries,
/// InvalidArgument unless both powers are positive and finite.
TwoByTwoCase optimal_2x2(const Instance& inst, const Vector& powers);

/// Utility of a table row as its closed form, evaluated at the given rates
/// (users x slots) and slot length. Throws InvalidArgument for rows outside
/// 1..12.
double table_row_utility(int row, const Matrix& rates, double slot_length);

/// Largest violation of each KKT condition of the 2x2 time subproblem.
///
/// Multipliers are reconstructed from the point: the time-limit price of
/// slot t is the mean marginal utility of the users holding time in it, the
/// nonnegativity multiplier of an idle user is the gap to that price, and
/// the minimum-share multipliers are zero. Marginal terms are divided by the
/// largest marginal utility; products with shares are further divided by T.
struct KktCheck2x2 {
  double stationarity = 0.0;
  double dual_feasibility = 0.0;
  double nonnegativity = 0.0;
  double min_share = 0.0;
  double time_limit = 0.0;
  double share_complementarity = 0.0;
  double min_share_complementarity = 0.0;
  /// User-1 nonnegativity slackness as restated for the reduced system.
  double reduced_slackness = 0.0;
  /// (marginal_1 - marginal_2 + mu_1t)(T - tau_1t) per slot.
  double reduced_split = 0.0;
  bool passed = false;

  double max_violation() const;
};

/// Throws InfeasibleInput when shares break nonnegativity, the per-slot
/// time limit or the minimum share by more than 1e-6 relative to T, and
/// DimensionMismatch / InvalidArgument as optimal_2x2.
KktCheck2x2 kkt_check_2x2(const Instance& inst, const Vector& powers,
                          const Matrix& shares, double tol);

}  // namespace ehpf
