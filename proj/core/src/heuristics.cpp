#include "ehpf/heuristics.hpp"

#include <algorithm>
#include <numeric>

#include "ehpf/error.hpp"
#include "ehpf/structure.hpp"

namespace ehpf {

namespace {

// Values within this relative distance of the maximum count as tied.
constexpr double kTieTolerance = 1e-12;

// Index of the largest value; ties go to the best channel, then the lowest
// index.
Index pick_owner(const Vector& values, const Vector& gains) {
  const double top = values.maxCoeff();
  const double cut = top - kTieTolerance * std::abs(top);
  Index best = -1;
  for (Index n = 0; n < values.size(); ++n) {
    if (values[n] < cut) continue;
    if (best < 0 || gains[n] > gains[best]) best = n;
  }
  return best;
}

Vector staircase_powers(const Instance& inst) {
  return virtual_harvests(inst).powers(inst.slot_length());
}

}  // namespace

const char* to_string(TdmaMode mode) {
  switch (mode) {
    case TdmaMode::kRoundRobin:
      return "round-robin";
    case TdmaMode::kEqualShare:
      return "equal-share";
  }
  return "?";
}

const char* to_string(PtfBeta beta) {
  switch (beta) {
    case PtfBeta::kDelivered:
      return "delivered";
    case PtfBeta::kPotential:
      return "potential";
  }
  return "?";
}

UserPriority user_priority(const Instance& inst) {
  UserPriority out;
  out.order.resize(static_cast<std::size_t>(inst.num_users()));
  std::iota(out.order.begin(), out.order.end(), Index{0});
  const Vector& g = inst.gains();
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&g](Index a, Index b) { return g[a] > g[b]; });
  return out;
}

Schedule sg_tdma(const Instance& inst, TdmaMode mode) {
  const Index n_users = inst.num_users();
  const Index k = inst.num_slots();
  const double slot = inst.slot_length();
  Vector powers = inst.harvests() / slot;
  Matrix shares;
  if (mode == TdmaMode::kEqualShare) {
    shares = Matrix::Constant(n_users, k, slot / static_cast<double>(n_users));
  } else {
    shares = Matrix::Zero(n_users, k);
    for (Index t = 0; t < k; ++t) shares(t % n_users, t) = slot;
  }
  return Schedule(std::move(powers), std::move(shares));
}

Schedule ptf(const Instance& inst, const PtfOptions& options,
             std::vector<BetaState>* trace) {
  const Index n_users = inst.num_users();
  const Index k = inst.num_slots();
  const double slot = inst.slot_length();
  Vector powers = staircase_powers(inst);
  const Matrix bits = rate_matrix(inst, powers).rates * slot;
  const Vector& gains = inst.gains();

  Matrix shares = Matrix::Zero(n_users, k);
  Vector running = Vector::Zero(n_users);
  if (trace) trace->clear();

  for (Index t = 0; t < k; ++t) {
    const Vector b = bits.col(t);
    Vector beta(n_users);
    Index owner;
    if (t == 0) {
      // Nothing to normalize against yet; the highest rate wins.
      beta = Vector::Ones(n_users);
      owner = pick_owner(b, gains);
    } else {
      const Vector denom = running + b;
      for (Index n = 0; n < n_users; ++n) {
        beta[n] = denom[n] > 0.0 ? b[n] / denom[n] : 0.0;
      }
      owner = pick_owner(beta, gains);
    }
    shares(owner, t) = slot;
    if (options.beta == PtfBeta::kPotential) {
      running += b;
    } else {
      running[owner] += b[owner];
    }
    if (trace) trace->push_back(BetaState{running, beta, owner});
  }

  Schedule out(std::move(powers), std::move(shares));
  if (options.min_share) return repair_min_share(inst, out);
  return out;
}

Schedule pronto(const Instance& inst) {
  const Index n_users = inst.num_users();
  const Index k = inst.num_slots();
  if (k < n_users) {
    throw InvalidArgument("pronto: K < N (" + std::to_string(k) + " slots, " +
                          std::to_string(n_users) + " users)");
  }
  const double slot = inst.slot_length();
  const Index base = (k - k % n_users) / n_users;
  const Index extra = k % n_users;

  Matrix shares = Matrix::Zero(n_users, k);
  const UserPriority priority = user_priority(inst);
  Index next = 0;
  for (std::size_t i = 0; i < priority.order.size(); ++i) {
    const Index size = base + (static_cast<Index>(i) < extra ? 1 : 0);
    shares.row(priority.order[i]).segment(next, size).setConstant(slot);
    next += size;
  }
  return Schedule(staircase_powers(inst), std::move(shares));
}

Schedule repair_min_share(const Instance& inst, const Schedule& sched) {
  require_matching(inst, sched);
  const double eps = inst.epsilon_share();
  const Matrix rates = rate_matrix(inst, sched.powers()).rates;
  Matrix shares = sched.shares();
  for (Index n = 0; n < shares.rows(); ++n) {
    if (shares.row(n).sum() > 0.0) continue;
    Index best_slot = 0;
    rates.row(n).maxCoeff(&best_slot);
    if (!(rates(n, best_slot) > 0.0)) continue;
    Index holder = 0;
    const double held = shares.col(best_slot).maxCoeff(&holder);
    if (held <= eps) continue;
    shares(holder, best_slot) -= eps;
    shares(n, best_slot) += eps;
  }
  return Schedule(sched.powers(), std::move(shares));
}

}  // namespace ehpf
