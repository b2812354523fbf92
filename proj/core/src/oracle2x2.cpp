#include "ehpf/oracle2x2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ehpf/error.hpp"

namespace ehpf {

namespace {

constexpr double kRelationTolerance = 1e-12;

Relation compare(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (std::abs(a - b) <= kRelationTolerance * scale) return Relation::kEqual;
  return a < b ? Relation::kLess : Relation::kGreater;
}

void require_2x2(const Instance& inst, const Vector& powers) {
  if (inst.num_users() != 2 || inst.num_slots() != 2) {
    throw DimensionMismatch("oracle2x2: needs exactly two users and two slots");
  }
  if (powers.size() != 2) {
    throw DimensionMismatch("oracle2x2: needs two powers");
  }
  if (!(powers.array() > 0.0).all() || !powers.allFinite()) {
    throw InvalidArgument(
        "oracle2x2: both powers must be positive and finite");
  }
}

Matrix make_tau(double t11, double t12, double t21, double t22) {
  Matrix tau(2, 2);
  tau << t11, t12, t21, t22;
  return tau;
}

// Optimal shares of a table row. Rows 2/3, 6/7 and 10/11 are the two
// optima listed for equal Gammas.
Matrix table_row_tau(int row, double g1, double g2, double t) {
  const double h = 0.5 * t;
  switch (row) {
    case 1:
    case 2:
      return make_tau(t, h * (1.0 - 1.0 / g1), 0.0, h * (1.0 + 1.0 / g1));
    case 3:
    case 4:
      return make_tau(0.0, h * (1.0 + 1.0 / g2), t, h * (1.0 - 1.0 / g2));
    case 5:
    case 6:
      return make_tau(t, 0.0, 0.0, t);
    case 7:
    case 8:
      return make_tau(0.0, t, t, 0.0);
    case 9:
      return make_tau(h * (1.0 + g2), 0.0, h * (1.0 - g2), t);
    case 10:
      return make_tau(h * (1.0 - g2), t, h * (1.0 + g2), 0.0);
    case 11:
      return make_tau(h * (1.0 + g1), 0.0, h * (1.0 - g1), t);
    case 12:
      return make_tau(h * (1.0 - g1), t, h * (1.0 + g1), 0.0);
    default:
      throw InvalidArgument("oracle2x2: table row must be in 1..12");
  }
}

int first_row(Relation power, Relation gamma) {
  const int block = power == Relation::kLess ? 0 : power == Relation::kEqual ? 4 : 8;
  const int offset =
      gamma == Relation::kLess ? 1 : gamma == Relation::kEqual ? 2 : 4;
  return block + offset;
}

}  // namespace

const char* to_string(Relation r) {
  switch (r) {
    case Relation::kLess:
      return "<";
    case Relation::kEqual:
      return "=";
    case Relation::kGreater:
      return ">";
  }
  return "?";
}

double table_row_utility(int row, const Matrix& r, double t) {
  const double r11 = r(0, 0), r12 = r(0, 1), r21 = r(1, 0), r22 = r(1, 1);
  const double half = 2.0 * std::log2(0.5 * t);
  const double full = 2.0 * std::log2(t);
  switch (row) {
    case 1:
      return std::log2(r22 / r12 * (r11 + r12) * (r11 + r12)) + half;
    case 2:
    case 3:
    case 10:
    case 11:
      return std::log2((r11 + r12) * (r21 + r22)) + half;
    case 4:
      return std::log2(r12 / r22 * (r21 + r22) * (r21 + r22)) + half;
    case 5:
    case 6:
    case 7:
      return std::log2(r11 * r22) + full;
    case 8:
      return std::log2(r12 * r21) + full;
    case 9:
      return std::log2(r11 / r21 * (r21 + r22) * (r21 + r22)) + half;
    case 12:
      return std::log2(r21 / r11 * (r11 + r12) * (r11 + r12)) + half;
    default:
      throw InvalidArgument("oracle2x2: table row must be in 1..12");
  }
}

TwoByTwoCase optimal_2x2(const Instance& inst, const Vector& powers) {
  require_2x2(inst, powers);
  const Matrix r = rate_matrix(inst, powers).rates;
  const double t = inst.slot_length();

  TwoByTwoCase out;
  out.gamma1 = r(0, 1) / r(0, 0);
  out.gamma2 = r(1, 1) / r(1, 0);
  out.power_relation = compare(powers[0], powers[1]);
  // Equal powers give Gamma_n = 1 for both users exactly in theory; do not
  // let rounding in the rates pick a strict row.
  out.gamma_relation = out.power_relation == Relation::kEqual
                           ? Relation::kEqual
                           : compare(out.gamma1, out.gamma2);
  out.table_row = first_row(out.power_relation, out.gamma_relation);
  out.tau_star = table_row_tau(out.table_row, out.gamma1, out.gamma2, t);
  out.utility_star = table_row_utility(out.table_row, r, t);
  if (out.gamma_relation == Relation::kEqual) {
    const int alt = out.table_row + 1;
    out.alternative_tau = table_row_tau(alt, out.gamma1, out.gamma2, t);
    out.alternative_utility = table_row_utility(alt, r, t);
  }
  return out;
}

double KktCheck2x2::max_violation() const {
  return std::max({stationarity, dual_feasibility, nonnegativity, min_share,
                   time_limit, share_complementarity,
                   min_share_complementarity, reduced_slackness,
                   reduced_split});
}

KktCheck2x2 kkt_check_2x2(const Instance& inst, const Vector& powers,
                          const Matrix& shares, double tol) {
  require_2x2(inst, powers);
  if (shares.rows() != 2 || shares.cols() != 2) {
    throw DimensionMismatch("oracle2x2: shares must be 2 x 2");
  }
  const double t = inst.slot_length();
  const double eps = inst.epsilon_share();

  KktCheck2x2 out;
  out.nonnegativity = std::max(0.0, -shares.minCoeff()) / t;
  for (Index n = 0; n < 2; ++n) {
    out.min_share =
        std::max(out.min_share, std::max(0.0, eps - shares.row(n).sum()) / t);
  }
  for (Index s = 0; s < 2; ++s) {
    out.time_limit =
        std::max(out.time_limit, std::abs(shares.col(s).sum() - t) / t);
  }
  if (std::max({out.nonnegativity, out.min_share, out.time_limit}) > 1e-6) {
    throw InfeasibleInput("oracle2x2: shares are not feasible");
  }

  const Matrix r = rate_matrix(inst, powers).rates;
  const Vector a = (shares.array() * r.array()).rowwise().sum();
  Matrix marginal(2, 2);
  for (Index n = 0; n < 2; ++n) {
    marginal.row(n) = r.row(n) / (a[n] * std::numbers::ln2);
  }
  const double scale = marginal.maxCoeff();
  const double holds = 1e-9 * t;

  Matrix mu = Matrix::Zero(2, 2);
  for (Index s = 0; s < 2; ++s) {
    double lambda = 0.0;
    int holders = 0;
    for (Index n = 0; n < 2; ++n) {
      if (shares(n, s) > holds) {
        lambda += marginal(n, s);
        ++holders;
      }
    }
    lambda /= holders;
    for (Index n = 0; n < 2; ++n) {
      if (shares(n, s) > holds) {
        out.stationarity = std::max(
            out.stationarity, std::abs(marginal(n, s) - lambda) / scale);
      } else {
        mu(n, s) = lambda - marginal(n, s);
        out.dual_feasibility =
            std::max(out.dual_feasibility, std::max(0.0, -mu(n, s)) / scale);
      }
      out.share_complementarity =
          std::max(out.share_complementarity,
                   std::abs(mu(n, s) * shares(n, s)) / (scale * t));
    }
    out.reduced_slackness = std::max(
        out.reduced_slackness, std::abs(mu(0, s) * shares(0, s)) / (scale * t));
    out.reduced_split = std::max(
        out.reduced_split,
        std::abs((marginal(0, s) - marginal(1, s) + mu(0, s)) *
                 (t - shares(0, s))) /
            (scale * t));
  }
  out.passed = out.max_violation() <= tol;
  return out;
}

}  // namespace ehpf
