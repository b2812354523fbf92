#include "ehpf/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ehpf/error.hpp"

namespace ehpf {

namespace {

bool all_finite(const Eigen::Ref<const Matrix>& m) {
  return m.array().isFinite().all();
}

}  // namespace

Instance::Instance(Params params) : params_(std::move(params)) {
  const auto& p = params_;
  if (!(p.bandwidth_hz > 0.0) || !std::isfinite(p.bandwidth_hz)) {
    throw InvalidArgument("bandwidth must be positive and finite");
  }
  if (!(p.noise_density > 0.0) || !std::isfinite(p.noise_density)) {
    throw InvalidArgument("noise density must be positive and finite");
  }
  if (!(p.slot_length > 0.0) || !std::isfinite(p.slot_length)) {
    throw InvalidArgument("slot length must be positive and finite");
  }
  if (p.harvests.empty()) throw InvalidArgument("need at least one slot");
  if (p.path_loss_db.empty()) throw InvalidArgument("need at least one user");

  const auto k = static_cast<Index>(p.harvests.size());
  const auto n = static_cast<Index>(p.path_loss_db.size());

  harvests_ = Eigen::Map<const Vector>(p.harvests.data(), k);
  path_loss_db_ = Eigen::Map<const Vector>(p.path_loss_db.data(), n);

  if (!all_finite(harvests_) || (harvests_.array() < 0.0).any()) {
    throw InvalidArgument("harvests must be finite and nonnegative");
  }
  if (!(harvests_.maxCoeff() > 0.0)) {
    throw InvalidArgument("at least one harvest must be positive");
  }
  if (!all_finite(path_loss_db_)) {
    throw InvalidArgument("path losses must be finite");
  }

  gains_ = path_loss_db_.unaryExpr(
      [](double db) { return std::pow(10.0, -db / 10.0); });
  normalized_gains_ = gains_ / (p.noise_density * p.bandwidth_hz);
  for (Index i = 0; i < n; ++i) {
    const double l = normalized_gains_[i];
    if (!(l > 0.0) || !std::isfinite(l)) {
      std::ostringstream os;
      os << "normalized gain of user " << i + 1 << " is not positive and finite";
      throw InvalidArgument(os.str());
    }
  }

  epsilon_ = p.epsilon_share.value_or(1e-9 * p.slot_length);
  if (!(epsilon_ > 0.0) || !(epsilon_ < p.slot_length / static_cast<double>(n))) {
    throw InvalidArgument("epsilon_share must satisfy 0 < epsilon < T / N");
  }

  cumulative_.resize(k);
  double running = 0.0;
  for (Index t = 0; t < k; ++t) {
    running += harvests_[t];
    cumulative_[t] = running;
  }
}

Schedule::Schedule(Vector powers, Matrix shares)
    : powers_(std::move(powers)), shares_(std::move(shares)) {
  if (shares_.cols() != powers_.size()) {
    std::ostringstream os;
    os << "schedule has " << powers_.size() << " powers but " << shares_.cols()
       << " share columns";
    throw DimensionMismatch(os.str());
  }
  if (!all_finite(powers_) || !all_finite(shares_)) {
    throw InvalidArgument("schedule entries must be finite");
  }
}

void require_matching(const Instance& inst, const Schedule& sched) {
  if (sched.num_slots() != inst.num_slots() ||
      sched.num_users() != inst.num_users()) {
    std::ostringstream os;
    os << "schedule is " << sched.num_users() << "x" << sched.num_slots()
       << " but the instance has " << inst.num_users() << " users and "
       << inst.num_slots() << " slots";
    throw DimensionMismatch(os.str());
  }
}

RateMatrix rate_matrix(const Instance& inst, const Vector& powers) {
  if (powers.size() != inst.num_slots()) {
    throw DimensionMismatch("power vector length differs from slot count");
  }
  if (!all_finite(powers)) throw InvalidArgument("powers must be finite");
  if ((powers.array() < 0.0).any()) {
    throw InvalidArgument("powers must be nonnegative");
  }
  const auto& l = inst.normalized_gains();
  const double scale = inst.bandwidth_hz() / std::numbers::ln2;
  RateMatrix out{Matrix(inst.num_users(), inst.num_slots())};
  for (Index t = 0; t < powers.size(); ++t) {
    for (Index n = 0; n < l.size(); ++n) {
      out.rates(n, t) = scale * std::log1p(l[n] * powers[t]);
    }
  }
  return out;
}

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::kNonnegativity: return "nonnegativity";
    case Constraint::kTimeLimit: return "time-limit";
    case Constraint::kMinShare: return "min-share";
    case Constraint::kEnergyCausality: return "energy-causality";
  }
  return "unknown";
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << to_string(constraint);
  if (user >= 0) os << " user=" << user + 1;
  if (slot >= 0) os << " slot=" << slot + 1;
  os << " magnitude=" << magnitude;
  return os.str();
}

Tolerances Tolerances::for_instance(const Instance& inst) {
  return Tolerances{1e-12, 1e-9 * inst.slot_length(),
                    1e-9 * inst.total_harvest()};
}

std::vector<Violation> check_feasibility(const Instance& inst,
                                         const Schedule& sched) {
  return check_feasibility(inst, sched, Tolerances::for_instance(inst));
}

std::vector<Violation> check_feasibility(const Instance& inst,
                                         const Schedule& sched,
                                         const Tolerances& tol) {
  require_matching(inst, sched);
  std::vector<Violation> out;
  const auto& p = sched.powers();
  const auto& tau = sched.shares();
  const double slot = inst.slot_length();

  for (Index t = 0; t < p.size(); ++t) {
    if (p[t] < -tol.zero) {
      out.push_back({Constraint::kNonnegativity, -1, t, -p[t]});
    }
  }
  for (Index t = 0; t < tau.cols(); ++t) {
    for (Index n = 0; n < tau.rows(); ++n) {
      if (tau(n, t) < -tol.zero) {
        out.push_back({Constraint::kNonnegativity, n, t, -tau(n, t)});
      }
    }
  }
  for (Index t = 0; t < tau.cols(); ++t) {
    const double excess = tau.col(t).sum() - slot;
    if (std::abs(excess) > tol.time) {
      out.push_back({Constraint::kTimeLimit, -1, t, std::abs(excess)});
    }
  }
  for (Index n = 0; n < tau.rows(); ++n) {
    const double total = tau.row(n).sum();
    if (total < inst.epsilon_share() - tol.zero) {
      out.push_back(
          {Constraint::kMinShare, n, -1, inst.epsilon_share() - total});
    }
  }
  const auto& available = inst.cumulative_harvest();
  double spent = 0.0;
  for (Index t = 0; t < p.size(); ++t) {
    spent += p[t] * slot;
    const double excess = spent - available[t];
    if (excess > tol.energy) {
      out.push_back({Constraint::kEnergyCausality, -1, t, excess});
    }
  }
  return out;
}

Vector user_bits(const Instance& inst, const Schedule& sched) {
  require_matching(inst, sched);
  const RateMatrix r = rate_matrix(inst, sched.powers().cwiseMax(0.0));
  return sched.shares().cwiseProduct(r.rates).rowwise().sum();
}

namespace {

double log2_bits(double bits) {
  return bits > 0.0 ? std::log2(bits)
                    : -std::numeric_limits<double>::infinity();
}

}  // namespace

double utility(const Instance& inst, const Schedule& sched) {
  const Vector bits = user_bits(inst, sched);
  double u = 0.0;
  for (Index n = 0; n < bits.size(); ++n) u += log2_bits(bits[n]);
  return u;
}

ScoreReport score(const Instance& inst, const Schedule& sched) {
  ScoreReport report;
  report.per_user_bits = user_bits(inst, sched);
  report.per_user_utility = report.per_user_bits.unaryExpr(&log2_bits);
  report.utility = report.per_user_utility.sum();
  report.total_bits = report.per_user_bits.sum();
  report.jain_fi = jain_index(report.per_user_bits);
  report.violations = check_feasibility(inst, sched);
  return report;
}

std::optional<double> jain_index(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : values) {
    sum += x;
    sum_sq += x * x;
  }
  if (!(sum_sq > 0.0)) return std::nullopt;
  return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

std::optional<double> jain_index(const Vector& values) {
  return jain_index(std::span<const double>(values.data(), values.size()));
}

double improvement_pct(double value, double baseline) {
  if (!std::isfinite(baseline) || baseline == 0.0) {
    throw UndefinedBaseline("improvement baseline must be finite and nonzero");
  }
  return 100.0 * (value - baseline) / std::abs(baseline);
}

}  // namespace ehpf
