#pragma once

#include <vector>

#include "ehpf/model.hpp"

namespace ehpf {

/// Harvest vector after deferring energy forward until the per-slot spend is
/// nondecreasing. Invariants:
///   * virtual_e[t] / T is nondecreasing in t;
///   * every prefix sum of virtual_e is at most the matching prefix sum of the
///     real harvests (energy only ever moves later in time);
///   * the totals agree.
struct VirtualHarvests {
  Vector virtual_e;
  /// Slots (0-based) at which the induced power strictly increases.
  std::vector<Index> segment_boundaries;

  Vector powers(double slot_length) const { return virtual_e / slot_length; }
};

/// Minimal-mean staircase of the harvests.
///
/// Starting at slot s, the segment end e is the longest end among those that
/// minimize mean(E[s..e]); every slot in the segment receives that mean and
/// the construction restarts at e + 1. This is the fixed point of repeatedly
/// equalizing adjacent slots whose power decreases, computed in O(K) by
/// pooling adjacent violators.
VirtualHarvests virtual_harvests(const Instance& inst);
VirtualHarvests virtual_harvests(const Vector& harvests);

/// A permutation of slot indices: new slot j holds old slot order[j].
struct SlotPermutation {
  std::vector<Index> order;

  bool is_identity() const;
  Vector apply(const Vector& per_slot) const;
  /// Permutes columns.
  Matrix apply(const Matrix& per_user_per_slot) const;
};

struct SortedSchedule {
  Schedule schedule;
  SlotPermutation permutation;
  /// Energy causality of the permuted schedule. Sorting can break it.
  bool feasible;
};

/// Stable sort of the slots into nondecreasing power, moving each user's
/// share with its slot. Every user's bits, hence the utility, are unchanged
/// up to floating-point reassociation.
SortedSchedule sort_schedule_nondecreasing(const Instance& inst,
                                           const Schedule& sched);

}  // namespace ehpf
