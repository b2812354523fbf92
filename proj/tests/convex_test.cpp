#include "ehpf/convex.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ehpf/error.hpp"
#include "ehpf/heuristics.hpp"
#include "ehpf/structure.hpp"
#include "oracles.hpp"

namespace ehpf {
namespace {

Vector vec(std::vector<double> v) {
  return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Instance make(std::vector<double> e, std::vector<double> pl = {19, 22}) {
  Instance::Params p;
  p.harvests = std::move(e);
  p.path_loss_db = std::move(pl);
  return Instance(p);
}

TEST(SolvePower, TableRowOne) {
  const Instance inst = make({0.5, 50});
  const PowerSolution s = solve_power(inst, mat2(10, 4.4129, 0, 5.5871));
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.powers[0], 0.05, 1e-4);
  EXPECT_NEAR(s.powers[1], 5.0, 1e-4);
  EXPECT_LE(s.kkt.max_residual(), 1e-6);
}

TEST(SolvePower, DecreasingHarvests) {
  const Instance inst = make({50, 0.5});
  const PowerSolution s = solve_power(inst, mat2(10, 0.2428, 0, 9.7572));
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.powers[0], 2.2993, 1e-3);
  EXPECT_NEAR(s.powers[1], 2.7507, 1e-3);
}

TEST(SolvePower, SingleSlotSpendsEverything) {
  const Instance inst = make({7}, {15});
  const PowerSolution s = solve_power(inst, Matrix::Constant(1, 1, 10));
  EXPECT_NEAR(s.powers[0], 0.7, 1e-8);
}

TEST(SolvePower, UniqueFromAnyShares) {
  const Instance inst = make({20, 100, 1, 1, 1, 70, 100, 1, 10, 40});
  const Schedule init = sg_tdma(inst, TdmaMode::kEqualShare);
  const PowerSolution a = solve_power(inst, init.shares());
  const PowerSolution b = solve_power(inst, init.shares(), {.tol_kkt = 1e-8});
  EXPECT_TRUE(a.converged);
  EXPECT_NEAR(utility(inst, Schedule(a.powers, init.shares())),
              utility(inst, Schedule(b.powers, init.shares())), 1e-5);
  EXPECT_TRUE(check_feasibility(inst, Schedule(a.powers, init.shares())).empty());
}

TEST(SolvePower, DegenerateShares) {
  const Instance inst = make({1, 1});
  EXPECT_THROW(solve_power(inst, mat2(10, 10, 0, 0)), DegenerateProblem);
  EXPECT_THROW(solve_power(inst, mat2(10, 10, 1, 0)), InvalidArgument);
  EXPECT_THROW(solve_power(inst, Matrix::Constant(2, 3, 5)), DimensionMismatch);
}

TEST(SolveTime, TableRowOne) {
  const Instance inst = make({0.5, 50});
  const TimeSolution s = solve_time(inst, vec({0.05, 5}));
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.shares(0, 0), 10.0, 1e-3);
  EXPECT_NEAR(s.shares(0, 1), 4.4129, 1e-3);
  EXPECT_NEAR(s.shares(1, 1), 5.5871, 1e-3);
  EXPECT_NEAR(utility(inst, Schedule(vec({0.05, 5}), s.shares)), 29.8094, 1e-4);
}

TEST(SolveTime, DecreasingHarvestRow) {
  const Instance inst = make({50, 0.5});
  const TimeSolution s = solve_time(inst, vec({2.2993, 2.7507}));
  EXPECT_NEAR(s.shares(0, 1), 0.2431, 1e-3);
  EXPECT_NEAR(s.shares(1, 1), 9.7569, 1e-3);
}

TEST(SolveTime, SingleUserTakesTheFrame) {
  const Instance inst = make({1, 2, 3}, {20});
  const TimeSolution s = solve_time(inst, vec({0.1, 0.2, 0.3}));
  EXPECT_TRUE(s.shares.isApprox(Matrix::Constant(1, 3, 10), 1e-9));
}

TEST(SolveTime, SlotSumsAndMinimumShare) {
  const Instance inst = make({73, 65, 9, 19, 40, 37, 22, 84, 39, 67, 81, 100},
                             {19, 22, 25, 28, 31});
  const Vector p = virtual_harvests(inst).powers(inst.slot_length());
  const TimeSolution s = solve_time(inst, p);
  EXPECT_TRUE(s.converged);
  for (Index t = 0; t < s.shares.cols(); ++t) {
    EXPECT_NEAR(s.shares.col(t).sum(), 10.0, 1e-8);
  }
  EXPECT_GE(s.shares.rowwise().sum().minCoeff(), inst.epsilon_share() * (1 - 1e-6));
}

TEST(SolveTime, Errors) {
  const Instance inst = make({0.5, 50});
  EXPECT_THROW(solve_time(inst, vec({0, 0})), InvalidArgument);
  EXPECT_THROW(solve_time(inst, vec({5, 0.05})), InfeasibleInput);
  EXPECT_THROW(solve_time(inst, vec({1})), DimensionMismatch);
}

TEST(SolveTime, MatchesGridSearch) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = make({1 + 99 * u(rng), 1 + 99 * u(rng)},
                               {5 + 30 * u(rng), 5 + 30 * u(rng)});
    const Vector p = virtual_harvests(inst).powers(inst.slot_length());
    const TimeSolution s = solve_time(inst, p);
    const double mine = utility(inst, Schedule(p, s.shares));
    const double grid = testing::grid_search_2x2(inst, p).utility;
    EXPECT_GE(mine, grid - 1e-9);
    EXPECT_NEAR(mine, grid, 1e-3);
  }
}

TEST(Kkt, CertifiesTableRowOne) {
  const Instance inst = make({0.5, 50});
  const Vector p = solve_power(inst, mat2(10, 4.4129, 0, 5.5871)).powers;
  const Matrix tau = solve_time(inst, p).shares;
  EXPECT_LE(kkt_residual_time(inst, p, tau).max_residual(), 1e-6);
  EXPECT_LE(kkt_residual_power(inst, tau, p).max_residual(), 1e-6);
}

TEST(Kkt, PerturbedSharesFail) {
  const Instance inst = make({0.5, 50});
  const Vector p = vec({0.05, 5});
  Matrix tau = solve_time(inst, p).shares;
  tau(0, 1) += 0.5;
  tau(1, 1) -= 0.5;
  const KktResidual r = kkt_residual_time(inst, p, tau);
  EXPECT_GT(r.stationarity_max, 1e-6);
  EXPECT_FALSE(r.certified(1e-6));
}

TEST(Kkt, SingleUserFullFrame) {
  const Instance inst = make({3, 4}, {10});
  const Matrix tau = Matrix::Constant(1, 2, 10);
  const Vector p = solve_power(inst, tau).powers;
  EXPECT_LE(kkt_residual_time(inst, p, tau).max_residual(), 1e-6);
  EXPECT_LE(kkt_residual_power(inst, tau, p).max_residual(), 1e-6);
}

TEST(Kkt, RejectsInfeasiblePoint) {
  const Instance inst = make({0.5, 50});
  EXPECT_THROW(kkt_residual_power(inst, mat2(10, 5, 0, 5), vec({5, 0.05})),
               InfeasibleInput);
  EXPECT_THROW(kkt_residual_time(inst, vec({0.05, 5}), mat2(10, 6, 0, 5)),
               InfeasibleInput);
}

// Central differences of the utility against the analytic gradients.
TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(u(rng) * 6);
    const int n = 1 + static_cast<int>(u(rng) * 4);
    Instance::Params prm;
    for (int i = 0; i < k; ++i) prm.harvests.push_back(1 + 99 * u(rng));
    for (int i = 0; i < n; ++i) prm.path_loss_db.push_back(5 + 30 * u(rng));
    const Instance inst(prm);
    Vector p(k);
    Matrix tau(n, k);
    for (int t = 0; t < k; ++t) {
      p[t] = 0.1 + 10 * u(rng);
      for (int i = 0; i < n; ++i) tau(i, t) = 0.1 + u(rng);
      tau.col(t) *= 10 / tau.col(t).sum();
    }
    const Vector gp = utility_gradient_powers(inst, tau, p);
    const Matrix gt = utility_gradient_shares(inst, p, tau);
    auto f = [&](const Vector& pp, const Matrix& tt) {
      return utility(inst, Schedule(pp, tt));
    };
    for (int t = 0; t < k; ++t) {
      const double h = 1e-5 * p[t];
      Vector hi = p, lo = p;
      hi[t] += h;
      lo[t] -= h;
      const double fd = (f(hi, tau) - f(lo, tau)) / (2 * h);
      EXPECT_NEAR(fd, gp[t], 1e-5 * std::abs(gp[t])) << "trial " << trial;
      for (int i = 0; i < n; ++i) {
        const double ht = 1e-5 * tau(i, t);
        Matrix thi = tau, tlo = tau;
        thi(i, t) += ht;
        tlo(i, t) -= ht;
        const double fdt = (f(p, thi) - f(p, tlo)) / (2 * ht);
        EXPECT_NEAR(fdt, gt(i, t), 1e-5 * std::abs(gt(i, t)));
      }
    }
  }
}

TEST(Bcd, SixtyTwentyRow) {
  const Instance inst = make({60, 20}, {1, 4});
  const BcdResult r = bcd(inst, sg_tdma(inst));
  EXPECT_TRUE(r.trace.converged);
  EXPECT_NEAR(utility(inst, r.schedule), 33.5272, 1e-3);
  const Vector p = sort_schedule_nondecreasing(inst, r.schedule).schedule.powers();
  EXPECT_NEAR(p[0], 3.8238, 1e-3);
  EXPECT_NEAR(p[1], 4.1762, 1e-3);
  EXPECT_TRUE(check_feasibility(inst, r.schedule).empty());
}

TEST(Bcd, MonotoneTraces) {
  const std::vector<std::vector<double>> harvests = {
      {73, 65, 9, 19, 40, 37, 22, 84, 39, 67, 81, 100},
      {20, 100, 1, 1, 1, 70, 100, 1, 10, 40},
      {90, 2, 0.5, 0.1, 0.3, 0.7, 40, 60}};
  for (const auto& e : harvests) {
    for (int n = 2; n <= 5; ++n) {
      std::vector<double> pl;
      for (int i = 0; i < n; ++i) pl.push_back(19 + 3 * i);
      const Instance inst = make(e, pl);
      const BcdResult r = bcd(inst, sg_tdma(inst));
      const auto& us = r.trace.utilities;
      ASSERT_EQ(static_cast<int>(us.size()), r.trace.rounds_used + 1);
      for (std::size_t i = 1; i < us.size(); ++i) EXPECT_GE(us[i], us[i - 1]);
      for (std::size_t i = 0; i < r.trace.half_step_utilities.size(); ++i) {
        EXPECT_GE(r.trace.half_step_utilities[i], us[i]);
        EXPECT_LE(r.trace.half_step_utilities[i], us[i + 1]);
      }
      EXPECT_TRUE(check_feasibility(inst, r.schedule).empty());
    }
  }
}

TEST(Bcd, Deterministic) {
  const Instance inst = make({20, 100, 1, 1, 1, 70, 100, 1, 10, 40}, {19, 22, 25});
  const BcdResult a = bcd(inst, sg_tdma(inst));
  const BcdResult b = bcd(inst, sg_tdma(inst));
  EXPECT_EQ(a.schedule.powers(), b.schedule.powers());
  EXPECT_EQ(a.schedule.shares(), b.schedule.shares());
}

TEST(Bcd, FixedPointConvergesQuickly) {
  const Instance inst = make({0.5, 50});
  const BcdResult first = bcd(inst, sg_tdma(inst));
  const BcdResult again = bcd(inst, first.schedule);
  EXPECT_LE(again.trace.rounds_used, 2);
  EXPECT_TRUE(again.trace.converged);
  EXPECT_LT(utility(inst, again.schedule) - utility(inst, first.schedule), 1e-8);
}

TEST(Bcd, ObserverSeesEveryHalfStep) {
  const Instance inst = make({0.5, 50});
  int calls = 0;
  const BcdResult r = bcd(inst, sg_tdma(inst), {},
                          [&](int, int, const Schedule&) { ++calls; });
  EXPECT_EQ(calls, 2 * r.trace.rounds_used);
}

TEST(Bcd, RejectsInfeasibleInit) {
  const Instance inst = make({0.5, 50});
  EXPECT_THROW(bcd(inst, Schedule(vec({5, 0.05}), mat2(5, 5, 5, 5))),
               InfeasibleInput);
  EXPECT_THROW(bcd(inst, Schedule(vec({0.05, 5}), mat2(5, 5, 5, 6))),
               InfeasibleInput);
}

TEST(SolverConfig, Validate) {
  EXPECT_NO_THROW(SolverConfig{}.validate());
  EXPECT_THROW((SolverConfig{.tol_kkt = 0}).validate(), InvalidArgument);
  EXPECT_THROW((SolverConfig{.max_bcd_rounds = 0}).validate(), InvalidArgument);
  EXPECT_THROW((SolverConfig{.step_shrink = 1}).validate(), InvalidArgument);
}

}  // namespace
}  // namespace ehpf
