#pragma once

// Constructive schedulers: the spend-what-you-get baseline with TDMA time
// sharing, PTF (proportional time fair) and ProNTO (power nondecreasing,
// time ordered). PTF and ProNTO share the nondecreasing power staircase of
// virtual_harvests and differ only in how they hand out slots.

#include <vector>

#include "ehpf/model.hpp"

namespace ehpf {

enum class TdmaMode {
  /// Slot t belongs wholly to user t mod N.
  kRoundRobin,
  /// Every user gets T / N of every slot.
  kEqualShare,
};

const char* to_string(TdmaMode mode);

/// Users sorted best channel first (gain descending, ties by lower index).
struct UserPriority {
  std::vector<Index> order;
};

UserPriority user_priority(const Instance& inst);

/// How PTF normalizes the bits a slot would carry for a user.
enum class PtfBeta {
  /// beta_n = B_nt / (bits delivered to n in slots before t + B_nt).
  kDelivered,
  /// beta_n = B_nt / sum_{i <= t} B_ni, with B_ni the bits n would get from
  /// the whole of slot i. Independent of earlier assignments.
  kPotential,
};

const char* to_string(PtfBeta beta);

struct PtfOptions {
  PtfBeta beta = PtfBeta::kDelivered;
  /// Grant every user left without time epsilon_share seconds, taken from
  /// the owner of the starved user's best-rate slot.
  bool min_share = false;
};

/// PTF bookkeeping after deciding slot t.
///
/// cumulative_b holds, per user, the running sum that normalizes beta:
/// potential bits through slot t for PtfBeta::kPotential, delivered bits
/// through slot t for PtfBeta::kDelivered. current_beta is the beta vector
/// used to pick the owner of slot t.
struct BetaState {
  Vector cumulative_b;
  Vector current_beta;
  Index owner = -1;
};

/// p_t = E_t / T with TDMA time sharing. Always feasible.
Schedule sg_tdma(const Instance& inst, TdmaMode mode = TdmaMode::kRoundRobin);

/// Staircase powers; slot 1 to the user with the highest rate, every later
/// slot wholly to the user with the largest beta. Ties go to the best
/// channel among the tied users, then to the lower index. May leave a user
/// without time (utility -inf) unless options.min_share is set.
///
/// When trace is non-null it receives one BetaState per slot.
Schedule ptf(const Instance& inst, const PtfOptions& options = {},
             std::vector<BetaState>* trace = nullptr);

/// Staircase powers; users in priority order receive consecutive blocks of
/// floor(K / N) slots from slot 1, the first K mod N users one slot more.
///
/// Throws InvalidArgument when K < N.
Schedule pronto(const Instance& inst);

/// Gives every user with zero total share epsilon_share seconds of its
/// best-rate slot, taken from that slot's largest holder. Users whose
/// best-rate slot carries no power are left alone.
Schedule repair_min_share(const Instance& inst, const Schedule& sched);

}  // namespace ehpf
