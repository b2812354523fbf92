#include "ehpf/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "barrier.hpp"
#include "ehpf/error.hpp"
#include "ehpf/nnls.hpp"
#include "ehpf/structure.hpp"

namespace ehpf {

void SolverConfig::validate() const {
  if (!(tol_kkt > 0.0) || !(tol_utility > 0.0)) {
    throw InvalidArgument("solver tolerances must be positive");
  }
  if (max_inner_iters <= 0 || max_bcd_rounds <= 0) {
    throw InvalidArgument("solver iteration limits must be positive");
  }
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
    throw InvalidArgument("step_shrink must lie in (0, 1)");
  }
}

double KktResidual::max_residual() const {
  return std::max({stationarity_max, complementarity_max, primal_violation_max});
}

namespace {

constexpr double kPrimalTolerance = 1e-6;
constexpr double kActiveTolerance = 1e-7;
constexpr double kGapTolerance = 1e-11;

// Linear constraints of a subproblem at a candidate point, in the form
// A x = b (eq_residual = A x - b) and G x <= h (slack = h - G x).
struct LinearSystem {
  Matrix eq;
  Vector eq_residual;
  Matrix ineq;
  Vector slack;
};

KktResidual certify(const Vector& grad, const LinearSystem& sys, double scale,
                    const std::optional<Multipliers>& given,
                    Index lambda_rows_in_ineq) {
  // lambda_rows_in_ineq > 0 means the leading inequality rows are reported
  // as lambda (the power subproblem has no equalities).
  const Index n_eq = sys.eq.rows();
  const Index n_in = sys.ineq.rows();

  KktResidual out;
  double primal = 0.0;
  for (Index i = 0; i < n_in; ++i) primal = std::max(primal, -sys.slack[i]);
  for (Index i = 0; i < n_eq; ++i) {
    primal = std::max(primal, std::abs(sys.eq_residual[i]));
  }
  out.primal_violation_max = primal / scale;
  if (out.primal_violation_max > kPrimalTolerance) {
    std::ostringstream os;
    os << "candidate violates the constraints by " << out.primal_violation_max
       << " (relative)";
    throw InfeasibleInput(os.str());
  }

  Vector eq_mult = Vector::Zero(n_eq);
  Vector in_mult = Vector::Zero(n_in);
  if (given) {
    const Index n_lambda = lambda_rows_in_ineq > 0 ? lambda_rows_in_ineq : n_eq;
    const Index n_mu = n_in - (lambda_rows_in_ineq > 0 ? lambda_rows_in_ineq : 0);
    if (given->lambda.size() != n_lambda || given->mu.size() != n_mu) {
      throw DimensionMismatch("supplied multipliers have the wrong length");
    }
    if ((given->mu.array() < 0.0).any() ||
        (lambda_rows_in_ineq > 0 && (given->lambda.array() < 0.0).any())) {
      throw InvalidArgument("inequality multipliers must be nonnegative");
    }
    if (lambda_rows_in_ineq > 0) {
      in_mult << given->lambda, given->mu;
    } else {
      eq_mult = given->lambda;
      in_mult = given->mu;
    }
  } else {
    std::vector<Index> active;
    for (Index i = 0; i < n_in; ++i) {
      if (sys.slack[i] <= kActiveTolerance * scale) active.push_back(i);
    }
    const Index cols = n_eq + static_cast<Index>(active.size());
    Matrix design(grad.size(), cols);
    std::vector<bool> free(static_cast<std::size_t>(cols), false);
    for (Index i = 0; i < n_eq; ++i) {
      design.col(i) = sys.eq.row(i).transpose();
      free[static_cast<std::size_t>(i)] = true;
    }
    for (std::size_t k = 0; k < active.size(); ++k) {
      design.col(n_eq + static_cast<Index>(k)) =
          sys.ineq.row(active[k]).transpose();
    }
    const NnlsResult fit = nnls(design, grad, free);
    eq_mult = fit.x.head(n_eq);
    for (std::size_t k = 0; k < active.size(); ++k) {
      in_mult[active[k]] = fit.x[n_eq + static_cast<Index>(k)];
    }
  }

  const double grad_scale = std::max(grad.cwiseAbs().maxCoeff(), 1e-300);
  Vector r = grad;
  if (n_eq > 0) r -= sys.eq.transpose() * eq_mult;
  if (n_in > 0) r -= sys.ineq.transpose() * in_mult;
  out.stationarity_max = r.cwiseAbs().maxCoeff() / grad_scale;

  double comp = 0.0;
  for (Index i = 0; i < n_in; ++i) {
    comp = std::max(comp, in_mult[i] * std::max(sys.slack[i], 0.0));
  }
  out.complementarity_max = comp / (grad_scale * scale);

  if (lambda_rows_in_ineq > 0) {
    out.lambda = in_mult.head(lambda_rows_in_ineq);
    out.mu = in_mult.tail(n_in - lambda_rows_in_ineq);
  } else {
    out.lambda = eq_mult;
    out.mu = in_mult;
  }
  return out;
}

double mean_power(const Instance& inst) {
  return inst.total_harvest() /
         (static_cast<double>(inst.num_slots()) * inst.slot_length());
}

// Nonnegativity and the per-slot time limit, shared by solve_power and
// kkt_residual_power.
void require_valid_shares(const Instance& inst, const Matrix& shares) {
  if (shares.rows() != inst.num_users() || shares.cols() != inst.num_slots()) {
    throw DimensionMismatch("share matrix must be users x slots");
  }
  if (!shares.allFinite()) throw InvalidArgument("shares must be finite");
  const auto tol = Tolerances::for_instance(inst);
  if ((shares.array() < -tol.zero).any()) {
    throw InvalidArgument("shares must be nonnegative");
  }
  for (Index t = 0; t < shares.cols(); ++t) {
    if (std::abs(shares.col(t).sum() - inst.slot_length()) > tol.time) {
      std::ostringstream os;
      os << "shares of slot " << t + 1 << " do not sum to the slot length";
      throw InvalidArgument(os.str());
    }
  }
}

void require_valid_powers(const Instance& inst, const Vector& powers) {
  if (powers.size() != inst.num_slots()) {
    throw DimensionMismatch("power vector length differs from slot count");
  }
  if (!powers.allFinite()) throw InvalidArgument("powers must be finite");
  const auto tol = Tolerances::for_instance(inst);
  if ((powers.array() < -tol.zero).any()) {
    throw InvalidArgument("powers must be nonnegative");
  }
}

// Gradient of the utility (log2 units) with respect to the powers.
Vector power_gradient(const Instance& inst, const Matrix& shares,
                      const Vector& powers) {
  const Vector& l = inst.normalized_gains();
  const double w = inst.bandwidth_hz();
  const Vector bits =
      shares.cwiseProduct(rate_matrix(inst, powers.cwiseMax(0.0)).rates)
          .rowwise()
          .sum();
  Vector grad = Vector::Zero(powers.size());
  for (Index n = 0; n < shares.rows(); ++n) {
    if (!(bits[n] > 0.0)) {
      throw DegenerateProblem("a user receives zero bits; gradient undefined");
    }
    for (Index t = 0; t < powers.size(); ++t) {
      const double d_bits = shares(n, t) * w * l[n] /
                            ((1.0 + l[n] * std::max(powers[t], 0.0)) *
                             std::numbers::ln2);
      grad[t] += d_bits / (bits[n] * std::numbers::ln2);
    }
  }
  return grad;
}

LinearSystem power_constraints(const Instance& inst, const Vector& powers) {
  const Index k = inst.num_slots();
  LinearSystem sys;
  sys.eq.resize(0, k);
  sys.eq_residual.resize(0);
  sys.ineq = Matrix::Zero(2 * k, k);
  sys.slack.resize(2 * k);
  const Vector& available = inst.cumulative_harvest();
  double spent = 0.0;
  for (Index t = 0; t < k; ++t) {
    sys.ineq.row(t).head(t + 1).setOnes();
    spent += powers[t];
    sys.slack[t] = available[t] / inst.slot_length() - spent;
    sys.ineq(k + t, t) = -1.0;
    sys.slack[k + t] = powers[t];
  }
  return sys;
}

Matrix time_gradient(const Instance& inst, const Vector& powers,
                     const Matrix& shares) {
  const Matrix rates = rate_matrix(inst, powers).rates;
  const Vector bits = shares.cwiseProduct(rates).rowwise().sum();
  Matrix grad(shares.rows(), shares.cols());
  for (Index n = 0; n < shares.rows(); ++n) {
    if (!(bits[n] > 0.0)) {
      throw DegenerateProblem("a user receives zero bits; gradient undefined");
    }
    grad.row(n) = rates.row(n) / (bits[n] * std::numbers::ln2);
  }
  return grad;
}

// Variable index of tau_nt in the flattened slot-major vector.
Index flat(Index n, Index t, Index users) { return t * users + n; }

LinearSystem time_constraints(const Instance& inst, const Matrix& shares) {
  const Index n_users = shares.rows();
  const Index k = shares.cols();
  const Index dim = n_users * k;
  LinearSystem sys;
  sys.eq = Matrix::Zero(k, dim);
  sys.eq_residual.resize(k);
  for (Index t = 0; t < k; ++t) {
    for (Index n = 0; n < n_users; ++n) sys.eq(t, flat(n, t, n_users)) = 1.0;
    sys.eq_residual[t] = shares.col(t).sum() - inst.slot_length();
  }
  sys.ineq = Matrix::Zero(dim + n_users, dim);
  sys.slack.resize(dim + n_users);
  for (Index t = 0; t < k; ++t) {
    for (Index n = 0; n < n_users; ++n) {
      const Index i = flat(n, t, n_users);
      sys.ineq(i, i) = -1.0;
      sys.slack[i] = shares(n, t);
    }
  }
  for (Index n = 0; n < n_users; ++n) {
    for (Index t = 0; t < k; ++t) sys.ineq(dim + n, flat(n, t, n_users)) = -1.0;
    sys.slack[dim + n] = shares.row(n).sum() - inst.epsilon_share();
  }
  return sys;
}

Vector flatten(const Matrix& shares) {
  Vector out(shares.size());
  for (Index t = 0; t < shares.cols(); ++t) {
    out.segment(t * shares.rows(), shares.rows()) = shares.col(t);
  }
  return out;
}

}  // namespace

Vector utility_gradient_powers(const Instance& inst, const Matrix& shares,
                               const Vector& powers) {
  require_valid_shares(inst, shares);
  if (powers.size() != inst.num_slots()) {
    throw DimensionMismatch("powers length differs from the number of slots");
  }
  return power_gradient(inst, shares, powers);
}

Matrix utility_gradient_shares(const Instance& inst, const Vector& powers,
                               const Matrix& shares) {
  if (shares.rows() != inst.num_users() || shares.cols() != inst.num_slots()) {
    throw DimensionMismatch("shares must be users x slots");
  }
  return time_gradient(inst, powers, shares);
}

KktResidual kkt_residual_power(const Instance& inst, const Matrix& shares,
                               const Vector& powers,
                               const std::optional<Multipliers>& given) {
  require_valid_shares(inst, shares);
  require_valid_powers(inst, powers);
  const LinearSystem sys = power_constraints(inst, powers);
  const Vector grad = power_gradient(inst, shares, powers);
  return certify(grad, sys, mean_power(inst), given, inst.num_slots());
}

KktResidual kkt_residual_time(const Instance& inst, const Vector& powers,
                              const Matrix& shares,
                              const std::optional<Multipliers>& given) {
  require_valid_powers(inst, powers);
  if (shares.rows() != inst.num_users() || shares.cols() != inst.num_slots()) {
    throw DimensionMismatch("share matrix must be users x slots");
  }
  const LinearSystem sys = time_constraints(inst, shares);
  const Vector grad = flatten(time_gradient(inst, powers, shares));
  return certify(grad, sys, inst.slot_length(), given, 0);
}

PowerSolution solve_power(const Instance& inst, const Matrix& shares,
                          const SolverConfig& cfg) {
  cfg.validate();
  require_valid_shares(inst, shares);
  const Index k = inst.num_slots();
  const Index n_users = inst.num_users();
  const double slot = inst.slot_length();
  const Vector& available = inst.cumulative_harvest();

  // Slots before the first harvest can carry no power.
  Index first = 0;
  while (first < k && !(available[first] > 0.0)) ++first;
  const Index free_slots = k - first;

  const Matrix w = shares.cwiseMax(0.0) / slot;
  for (Index n = 0; n < n_users; ++n) {
    if (!(w.row(n).sum() > 0.0)) {
      std::ostringstream os;
      os << "user " << n + 1 << " has no time in any slot";
      throw DegenerateProblem(os.str());
    }
    if (!(w.row(n).tail(free_slots).sum() > 0.0)) {
      std::ostringstream os;
      os << "user " << n + 1 << " only has time in slots that cannot carry power";
      throw DegenerateProblem(os.str());
    }
  }

  // Work in q = p / p_ref so the variables are O(1).
  const double p_ref = mean_power(inst);
  const Vector c = inst.normalized_gains() * p_ref;
  const Matrix wf = w.rightCols(free_slots);

  detail::BarrierProblem prob;
  prob.objective = [&](const Vector& q, bool derivs, detail::Evaluation& ev) {
    ev.value = 0.0;
    if (derivs) {
      ev.gradient = Vector::Zero(free_slots);
      ev.hessian = Matrix::Zero(free_slots, free_slots);
    }
    Vector d(free_slots);
    for (Index n = 0; n < n_users; ++n) {
      double a = 0.0;
      for (Index t = 0; t < free_slots; ++t) {
        if (1.0 + c[n] * q[t] <= 0.0) return false;
        a += wf(n, t) * std::log1p(c[n] * q[t]);
      }
      if (!(a > 0.0)) return false;
      ev.value += std::log(a);
      if (!derivs) continue;
      for (Index t = 0; t < free_slots; ++t) {
        d[t] = wf(n, t) * c[n] / (1.0 + c[n] * q[t]);
      }
      ev.gradient += d / a;
      ev.hessian -= d * d.transpose() / (a * a);
      for (Index t = 0; t < free_slots; ++t) {
        const double z = c[n] / (1.0 + c[n] * q[t]);
        ev.hessian(t, t) -= wf(n, t) * z * z / a;
      }
    }
    return true;
  };
  prob.g = Matrix::Zero(2 * free_slots, free_slots);
  prob.h = Vector::Zero(2 * free_slots);
  for (Index t = 0; t < free_slots; ++t) {
    prob.g.row(t).head(t + 1).setOnes();
    prob.h[t] = available[first + t] / (slot * p_ref);
    prob.g(free_slots + t, t) = -1.0;
  }
  prob.a.resize(0, free_slots);
  prob.b.resize(0);

  const Vector staircase = virtual_harvests(inst).virtual_e;
  const Vector q0 = 0.5 * staircase.tail(free_slots) / (slot * p_ref);

  detail::BarrierOptions opt;
  opt.gap_tolerance = kGapTolerance;
  opt.max_newton_iterations = cfg.max_inner_iters;
  opt.step_shrink = cfg.step_shrink;
  const detail::BarrierResult br = detail::maximize_with_barrier(prob, q0, opt);

  PowerSolution out;
  out.powers = Vector::Zero(k);
  out.powers.tail(free_slots) = br.x * p_ref;
  out.iterations = br.newton_iterations;
  out.kkt = kkt_residual_power(inst, shares, out.powers);
  out.converged = br.converged && out.kkt.certified(cfg.tol_kkt);
  return out;
}

TimeSolution solve_time(const Instance& inst, const Vector& powers,
                        const SolverConfig& cfg) {
  cfg.validate();
  require_valid_powers(inst, powers);
  if (!(powers.maxCoeff() > 0.0)) {
    throw InvalidArgument("at least one power must be positive");
  }
  {
    const auto tol = Tolerances::for_instance(inst);
    const Vector& available = inst.cumulative_harvest();
    double spent = 0.0;
    for (Index t = 0; t < powers.size(); ++t) {
      spent += powers[t] * inst.slot_length();
      if (spent - available[t] > tol.energy) {
        std::ostringstream os;
        os << "powers break energy causality at slot " << t + 1;
        throw InfeasibleInput(os.str());
      }
    }
  }

  const Index n_users = inst.num_users();
  const Index k = inst.num_slots();
  const double slot = inst.slot_length();

  TimeSolution out;
  if (n_users == 1) {
    out.shares = Matrix::Constant(1, k, slot);
    out.kkt = kkt_residual_time(inst, powers, out.shares);
    out.converged = out.kkt.certified(cfg.tol_kkt);
    return out;
  }

  // Work in x = tau / T with rates scaled to a unit maximum.
  const Matrix rates = rate_matrix(inst, powers).rates;
  const Matrix r = rates / rates.maxCoeff();
  const Index dim = n_users * k;

  detail::BarrierProblem prob;
  prob.objective = [&](const Vector& x, bool derivs, detail::Evaluation& ev) {
    ev.value = 0.0;
    if (derivs) {
      ev.gradient = Vector::Zero(dim);
      ev.hessian = Matrix::Zero(dim, dim);
    }
    for (Index n = 0; n < n_users; ++n) {
      double a = 0.0;
      for (Index t = 0; t < k; ++t) a += r(n, t) * x[flat(n, t, n_users)];
      if (!(a > 0.0)) return false;
      ev.value += std::log(a);
      if (!derivs) continue;
      for (Index t = 0; t < k; ++t) {
        const Index i = flat(n, t, n_users);
        ev.gradient[i] = r(n, t) / a;
        for (Index s = 0; s < k; ++s) {
          ev.hessian(i, flat(n, s, n_users)) = -r(n, t) * r(n, s) / (a * a);
        }
      }
    }
    return true;
  };
  prob.g = Matrix::Zero(dim + n_users, dim);
  prob.h = Vector::Zero(dim + n_users);
  for (Index i = 0; i < dim; ++i) prob.g(i, i) = -1.0;
  for (Index n = 0; n < n_users; ++n) {
    for (Index t = 0; t < k; ++t) prob.g(dim + n, flat(n, t, n_users)) = -1.0;
    prob.h[dim + n] = -inst.epsilon_share() / slot;
  }
  prob.a = Matrix::Zero(k, dim);
  prob.b = Vector::Ones(k);
  for (Index t = 0; t < k; ++t) {
    for (Index n = 0; n < n_users; ++n) prob.a(t, flat(n, t, n_users)) = 1.0;
  }

  const Vector x0 = Vector::Constant(dim, 1.0 / static_cast<double>(n_users));

  detail::BarrierOptions opt;
  opt.gap_tolerance = kGapTolerance;
  opt.max_newton_iterations = cfg.max_inner_iters;
  opt.step_shrink = cfg.step_shrink;
  const detail::BarrierResult br = detail::maximize_with_barrier(prob, x0, opt);

  out.shares.resize(n_users, k);
  for (Index t = 0; t < k; ++t) {
    Vector column = br.x.segment(t * n_users, n_users).cwiseMax(0.0);
    out.shares.col(t) = column * (slot / column.sum());
  }
  out.iterations = br.newton_iterations;
  out.kkt = kkt_residual_time(inst, powers, out.shares);
  out.converged = br.converged && out.kkt.certified(cfg.tol_kkt);
  return out;
}

namespace {
// Relative utility change below which a rejected half-step is round-off.
constexpr double kUtilityNoise = 1e-12;
}  // namespace

BcdResult bcd(const Instance& inst, const Schedule& init,
              const SolverConfig& cfg, const BcdObserver& observer) {
  cfg.validate();
  require_matching(inst, init);
  const auto violations = check_feasibility(inst, init);
  if (!violations.empty()) {
    throw InfeasibleInput("BCD start is infeasible: " +
                          violations.front().describe());
  }

  Vector powers = init.powers();
  Matrix shares = init.shares();
  double current = utility(inst, init);

  BcdTrace trace;
  trace.utilities.push_back(current);

  auto warn = [&trace](int round, const char* what, const std::string& detail) {
    std::ostringstream os;
    os << "round " << round << ": " << what;
    if (!detail.empty()) os << " (" << detail << ")";
    trace.warnings.push_back(os.str());
  };
  auto residual_text = [](const KktResidual& kkt) {
    std::ostringstream os;
    os << "kkt residual " << kkt.max_residual();
    return os.str();
  };

  for (int round = 1; round <= cfg.max_bcd_rounds; ++round) {
    trace.rounds_used = round;
    const double start = current;

    TimeSolution ts = solve_time(inst, powers, cfg);
    if (!ts.converged) {
      warn(round, "time subproblem did not converge", residual_text(ts.kkt));
    }
    const double after_time = utility(inst, Schedule(powers, ts.shares));
    if (after_time >= current) {
      shares = std::move(ts.shares);
      current = after_time;
    } else if (current - after_time > kUtilityNoise * (1.0 + std::abs(current))) {
      warn(round, "time step rejected: utility would decrease", "");
    }
    trace.half_step_utilities.push_back(current);
    if (observer) observer(round, 0, Schedule(powers, shares));

    PowerSolution ps = solve_power(inst, shares, cfg);
    if (!ps.converged) {
      warn(round, "power subproblem did not converge", residual_text(ps.kkt));
    }
    const double after_power = utility(inst, Schedule(ps.powers, shares));
    if (after_power >= current) {
      powers = std::move(ps.powers);
      current = after_power;
    } else if (current - after_power > kUtilityNoise * (1.0 + std::abs(current))) {
      warn(round, "power step rejected: utility would decrease", "");
    }
    trace.utilities.push_back(current);
    if (observer) observer(round, 1, Schedule(powers, shares));

    if (current - start < cfg.tol_utility) {
      trace.converged = true;
      break;
    }
  }

  return BcdResult{Schedule(std::move(powers), std::move(shares)),
                   std::move(trace)};
}

}  // namespace ehpf
