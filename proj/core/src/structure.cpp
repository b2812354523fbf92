#include "ehpf/structure.hpp"

#include <algorithm>
#include <numeric>

#include "ehpf/error.hpp"

namespace ehpf {

VirtualHarvests virtual_harvests(const Instance& inst) {
  return virtual_harvests(inst.harvests());
}

VirtualHarvests virtual_harvests(const Vector& harvests) {
  struct Segment {
    Index begin;
    Index length;
    double energy;

    double mean() const { return energy / static_cast<double>(length); }
  };

  std::vector<Segment> stack;
  stack.reserve(static_cast<std::size_t>(harvests.size()));
  for (Index t = 0; t < harvests.size(); ++t) {
    Segment seg{t, 1, harvests[t]};
    // Merge while the previous level is not strictly below this one; equal
    // means are pooled so each segment is as long as possible.
    while (!stack.empty() &&
           stack.back().energy * static_cast<double>(seg.length) >=
               seg.energy * static_cast<double>(stack.back().length)) {
      const Segment prev = stack.back();
      stack.pop_back();
      seg = Segment{prev.begin, prev.length + seg.length,
                    prev.energy + seg.energy};
    }
    stack.push_back(seg);
  }

  VirtualHarvests out;
  out.virtual_e.resize(harvests.size());
  for (const Segment& seg : stack) {
    out.virtual_e.segment(seg.begin, seg.length).setConstant(seg.mean());
    if (seg.begin > 0) out.segment_boundaries.push_back(seg.begin);
  }
  return out;
}

bool SlotPermutation::is_identity() const {
  for (std::size_t j = 0; j < order.size(); ++j) {
    if (order[j] != static_cast<Index>(j)) return false;
  }
  return true;
}

Vector SlotPermutation::apply(const Vector& per_slot) const {
  if (per_slot.size() != static_cast<Index>(order.size())) {
    throw DimensionMismatch("permutation length differs from vector length");
  }
  Vector out(per_slot.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    out[static_cast<Index>(j)] = per_slot[order[j]];
  }
  return out;
}

Matrix SlotPermutation::apply(const Matrix& per_user_per_slot) const {
  if (per_user_per_slot.cols() != static_cast<Index>(order.size())) {
    throw DimensionMismatch("permutation length differs from column count");
  }
  Matrix out(per_user_per_slot.rows(), per_user_per_slot.cols());
  for (std::size_t j = 0; j < order.size(); ++j) {
    out.col(static_cast<Index>(j)) = per_user_per_slot.col(order[j]);
  }
  return out;
}

SortedSchedule sort_schedule_nondecreasing(const Instance& inst,
                                           const Schedule& sched) {
  require_matching(inst, sched);
  const Vector& p = sched.powers();

  SlotPermutation perm;
  perm.order.resize(static_cast<std::size_t>(p.size()));
  std::iota(perm.order.begin(), perm.order.end(), Index{0});
  std::stable_sort(perm.order.begin(), perm.order.end(),
                   [&p](Index a, Index b) { return p[a] < p[b]; });

  Schedule sorted(perm.apply(p), perm.apply(sched.shares()));

  const auto tol = Tolerances::for_instance(inst);
  bool feasible = true;
  for (const Violation& v : check_feasibility(inst, sorted, tol)) {
    if (v.constraint == Constraint::kEnergyCausality) {
      feasible = false;
      break;
    }
  }
  return SortedSchedule{std::move(sorted), std::move(perm), feasible};
}

}  // namespace ehpf
