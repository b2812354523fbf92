#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. Each is deliberately naive.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ehpf/model.hpp"

namespace ehpf::testing {

/// Best utility over the grid tau_11, tau_12 in {0, T/steps, ..., T} with
/// tau_2t = T - tau_1t. The utility is concave in tau_12 for fixed tau_11,
/// so each inner scan stops once it turns down.
struct GridResult {
  double utility = -std::numeric_limits<double>::infinity();
  double tau11 = 0.0;
  double tau12 = 0.0;
};

inline GridResult grid_search_2x2(const Instance& inst, const Vector& powers,
                                  int steps = 2000) {
  const Matrix r = rate_matrix(inst, powers).rates;
  const double t = inst.slot_length();
  GridResult best;
  for (int i = 0; i <= steps; ++i) {
    const double t11 = t * i / steps;
    const double a1 = t11 * r(0, 0);
    const double a2 = (t - t11) * r(1, 0);
    double prev = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= steps; ++j) {
      const double t12 = t * j / steps;
      const double u =
          std::log2(a1 + t12 * r(0, 1)) + std::log2(a2 + (t - t12) * r(1, 1));
      if (u > best.utility) best = {u, t11, t12};
      if (u < prev) break;
      prev = u;
    }
  }
  return best;
}

/// One sweep of the local deferral step: whenever slot t spends more than
/// slot t + 1, move energy forward until the two are equal.
inline std::vector<double> deferral_sweep(std::vector<double> e) {
  for (std::size_t t = 0; t + 1 < e.size(); ++t) {
    if (e[t] > e[t + 1]) {
      const double mean = 0.5 * (e[t] + e[t + 1]);
      e[t] = mean;
      e[t + 1] = mean;
    }
  }
  return e;
}

/// Every nondecreasing allocation of `total` units over k slots whose
/// prefix sums stay within `cap` (cap[t] = units available through t).
inline void enumerate_staircases(
    const std::vector<long>& cap, long total,
    std::vector<std::vector<long>>& out) {
  const std::size_t k = cap.size();
  std::vector<long> v(k, 0);
  // Depth-first over slots with v[t] >= v[t-1].
  auto rec = [&](auto&& self, std::size_t t, long used, long lo) -> void {
    if (t + 1 == k) {
      const long last = total - used;
      if (last >= lo && used + last <= cap[t]) {
        v[t] = last;
        out.push_back(v);
      }
      return;
    }
    const std::size_t left = k - t;
    for (long x = lo; used + x <= cap[t] && used + x * static_cast<long>(left) <= total;
         ++x) {
      v[t] = x;
      self(self, t + 1, used + x, x);
    }
  };
  rec(rec, 0, 0, 0);
}

}  // namespace ehpf::testing
