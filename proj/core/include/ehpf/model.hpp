#pragma once

// Domain types for a proportionally fair energy-harvesting broadcast
// downlink: one transmitter, N users with fixed channel gains, and a frame of
// K equal-length slots with an energy harvest at the start of every slot.
//
// Conventions used throughout the library:
//   * powers are indexed by slot, shares (time allocations) are an N x K
//     matrix with users as rows and slots as columns;
//   * utility is the sum over users of log2(bits delivered in the frame);
//   * units are SI: Hz, W/Hz, s, J, W, bits.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ehpf {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Physical problem for one frame.
///
/// Immutable after construction. The constructor validates every invariant:
/// at least one slot and one user, nonnegative harvests with a positive
/// total, finite positive normalized gains, and 0 < epsilon_share < T / N.
class Instance {
 public:
  struct Params {
    double bandwidth_hz = 1000.0;
    double noise_density = 1e-6;
    double slot_length = 10.0;
    std::vector<double> harvests;
    std::vector<double> path_loss_db;
    /// Minimum frame share per user; defaults to 1e-9 * slot_length.
    std::optional<double> epsilon_share;

    bool operator==(const Params&) const = default;
  };

  explicit Instance(Params params);

  double bandwidth_hz() const noexcept { return params_.bandwidth_hz; }
  double noise_density() const noexcept { return params_.noise_density; }
  double slot_length() const noexcept { return params_.slot_length; }
  double epsilon_share() const noexcept { return epsilon_; }

  Index num_slots() const noexcept { return harvests_.size(); }
  Index num_users() const noexcept { return path_loss_db_.size(); }

  const Vector& harvests() const noexcept { return harvests_; }
  const Vector& path_loss_db() const noexcept { return path_loss_db_; }
  /// g_n = 10^(-PL_n / 10).
  const Vector& gains() const noexcept { return gains_; }
  /// L_n = g_n / (N0 W), the SNR per watt of transmit power.
  const Vector& normalized_gains() const noexcept { return normalized_gains_; }

  /// Running sums of the harvests; entry t is the energy available through slot t.
  const Vector& cumulative_harvest() const noexcept { return cumulative_; }
  double total_harvest() const noexcept { return cumulative_[cumulative_.size() - 1]; }

  const Params& params() const noexcept { return params_; }

  bool operator==(const Instance& other) const { return params_ == other.params_; }

 private:
  Params params_;
  double epsilon_;
  Vector harvests_;
  Vector path_loss_db_;
  Vector gains_;
  Vector normalized_gains_;
  Vector cumulative_;
};

/// Power level per slot plus the per-user time shares of every slot.
class Schedule {
 public:
  /// Throws DimensionMismatch when shares.cols() != powers.size() and
  /// InvalidArgument on non-finite entries.
  Schedule(Vector powers, Matrix shares);

  const Vector& powers() const noexcept { return powers_; }
  const Matrix& shares() const noexcept { return shares_; }
  Index num_slots() const noexcept { return powers_.size(); }
  Index num_users() const noexcept { return shares_.rows(); }

 private:
  Vector powers_;
  Matrix shares_;
};

/// Throws DimensionMismatch unless the schedule is N x K for this instance.
void require_matching(const Instance& inst, const Schedule& sched);

/// Achievable rates R_nt = W log2(1 + L_n p_t), users x slots, in bits/s.
struct RateMatrix {
  Matrix rates;

  double operator()(Index user, Index slot) const { return rates(user, slot); }
};

RateMatrix rate_matrix(const Instance& inst, const Vector& powers);

enum class Constraint {
  kNonnegativity,
  kTimeLimit,
  kMinShare,
  kEnergyCausality,
};

const char* to_string(Constraint c);

/// One violated constraint. user is -1 for constraints that are not per
/// user, slot is -1 for constraints that are not per slot.
struct Violation {
  Constraint constraint;
  Index user = -1;
  Index slot = -1;
  double magnitude = 0.0;

  std::string describe() const;
};

/// Absolute tolerances used by the feasibility checker.
struct Tolerances {
  double zero = 1e-12;
  double time = 1e-8;
  double energy = 1e-9;

  /// zero = 1e-12, time = 1e-9 T, energy = 1e-9 * total harvest.
  static Tolerances for_instance(const Instance& inst);
};

std::vector<Violation> check_feasibility(const Instance& inst,
                                         const Schedule& sched);
std::vector<Violation> check_feasibility(const Instance& inst,
                                         const Schedule& sched,
                                         const Tolerances& tol);

/// Everything needed to rank one schedule.
struct ScoreReport {
  /// Sum of per-user utilities; -inf when any user receives zero bits.
  double utility = 0.0;
  Vector per_user_bits;
  Vector per_user_utility;
  double total_bits = 0.0;
  /// Jain's index of per_user_bits; empty when every user gets zero bits.
  std::optional<double> jain_fi;
  std::vector<Violation> violations;

  bool feasible() const noexcept { return violations.empty(); }
};

/// Bits per user over the frame, sum_t tau_nt R_nt.
Vector user_bits(const Instance& inst, const Schedule& sched);

/// sum_n log2(bits_n); -inf if any user gets nothing.
double utility(const Instance& inst, const Schedule& sched);

ScoreReport score(const Instance& inst, const Schedule& sched);

/// (sum x)^2 / (N sum x^2). Empty when all entries are zero.
std::optional<double> jain_index(std::span<const double> values);
std::optional<double> jain_index(const Vector& values);

/// 100 (value - baseline) / |baseline|. Throws UndefinedBaseline when the
/// baseline is zero or not finite.
double improvement_pct(double value, double baseline);

}  // namespace ehpf
