#include "ehpf/model.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "ehpf/error.hpp"

namespace ehpf {
namespace {

Instance two_by_two(std::vector<double> e = {0.5, 50},
                    std::vector<double> pl = {19, 22}) {
  Instance::Params p;
  p.harvests = std::move(e);
  p.path_loss_db = std::move(pl);
  return Instance(p);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(Instance, DerivesGains) {
  const Instance inst = two_by_two();
  EXPECT_NEAR(inst.gains()[0], std::pow(10.0, -1.9), 1e-15);
  EXPECT_NEAR(inst.normalized_gains()[0], 12.589254117941673, 1e-9);
  EXPECT_NEAR(inst.normalized_gains()[1], 6.309573444801933, 1e-9);
  EXPECT_DOUBLE_EQ(inst.epsilon_share(), 1e-8);
  EXPECT_DOUBLE_EQ(inst.total_harvest(), 50.5);
  EXPECT_DOUBLE_EQ(inst.cumulative_harvest()[0], 0.5);
}

TEST(Instance, RejectsBadParameters) {
  Instance::Params p;
  p.harvests = {1, 2};
  p.path_loss_db = {19};
  EXPECT_NO_THROW(Instance{p});

  auto bad = p;
  bad.harvests = {0, 0};
  EXPECT_THROW(Instance{bad}, InvalidArgument);
  bad = p;
  bad.harvests = {-1, 2};
  EXPECT_THROW(Instance{bad}, InvalidArgument);
  bad = p;
  bad.harvests.clear();
  EXPECT_THROW(Instance{bad}, InvalidArgument);
  bad = p;
  bad.path_loss_db.clear();
  EXPECT_THROW(Instance{bad}, InvalidArgument);
  bad = p;
  bad.bandwidth_hz = 0;
  EXPECT_THROW(Instance{bad}, InvalidArgument);
  bad = p;
  bad.epsilon_share = 10.0;  // must stay below T / N
  EXPECT_THROW(Instance{bad}, InvalidArgument);
  bad = p;
  bad.path_loss_db = {std::numeric_limits<double>::infinity()};
  EXPECT_THROW(Instance{bad}, InvalidArgument);
}

TEST(Schedule, ChecksShapeAndFiniteness) {
  EXPECT_THROW(Schedule(vec({1, 2}), Matrix::Zero(2, 3)), DimensionMismatch);
  Matrix nan_shares = Matrix::Zero(2, 2);
  nan_shares(0, 0) = std::nan("");
  EXPECT_THROW(Schedule(vec({1, 2}), nan_shares), InvalidArgument);
  EXPECT_THROW(require_matching(two_by_two(),
                                Schedule(vec({1, 2, 3}), Matrix::Zero(2, 3))),
               DimensionMismatch);
}

TEST(RateMatrix, MatchesHandValues) {
  const Instance inst = two_by_two();
  const RateMatrix r = rate_matrix(inst, vec({0.05, 5}));
  EXPECT_NEAR(r(0, 1), 5998.8, 0.05);
  EXPECT_NEAR(r(1, 0), 395.5, 0.1);
  EXPECT_NEAR(r(0, 1), 1000.0 * std::log2(1.0 + 12.589254117941673 * 5.0), 1e-9);
}

TEST(RateMatrix, ZeroPowerGivesZeroRate) {
  const RateMatrix r = rate_matrix(two_by_two(), vec({0, 5}));
  EXPECT_EQ(r(0, 0), 0.0);
  EXPECT_EQ(r(1, 0), 0.0);
  EXPECT_GT(r(1, 1), 0.0);
}

TEST(RateMatrix, RejectsBadPowers) {
  EXPECT_THROW(rate_matrix(two_by_two(), vec({1})), DimensionMismatch);
  EXPECT_THROW(rate_matrix(two_by_two(), vec({-1, 1})), InvalidArgument);
}

TEST(RateMatrix, MonotoneInPowerAndGain) {
  const Instance inst = two_by_two({1, 1}, {10, 20});
  double prev = 0.0;
  for (double p = 0.01; p < 100; p *= 1.7) {
    const RateMatrix r = rate_matrix(inst, vec({p, p}));
    EXPECT_GT(r(0, 0), prev);
    EXPECT_GT(r(0, 0), r(1, 0));
    prev = r(0, 0);
  }
}

TEST(Score, TableTwoFirstRow) {
  const Instance inst = two_by_two();
  const ScoreReport rep =
      score(inst, Schedule(vec({0.05, 5}), mat2(10, 4.4129, 0, 5.5871)));
  EXPECT_NEAR(rep.utility, 29.8094, 1e-4);
  EXPECT_TRUE(rep.feasible());
  EXPECT_NEAR(rep.utility, rep.per_user_utility.sum(), 1e-12);
  EXPECT_NEAR(rep.total_bits, rep.per_user_bits.sum(), 1e-6);
}

TEST(Score, ZeroBitsUserGivesSentinel) {
  const Instance inst = two_by_two({10, 10}, {19, 19});
  const ScoreReport rep =
      score(inst, Schedule(vec({1, 1}), mat2(10, 10, 0, 0)));
  EXPECT_EQ(rep.utility, -std::numeric_limits<double>::infinity());
  ASSERT_TRUE(rep.jain_fi.has_value());
  EXPECT_DOUBLE_EQ(*rep.jain_fi, 0.5);
}

TEST(Score, EqualBitsGiveUnitJain) {
  const Instance inst = two_by_two({10, 10}, {19, 19});
  const ScoreReport rep = score(inst, Schedule(vec({1, 1}), mat2(10, 0, 0, 10)));
  EXPECT_NEAR(*rep.jain_fi, 1.0, 1e-15);
}

TEST(Score, IsPure) {
  const Instance inst = two_by_two();
  const Schedule s(vec({0.05, 5}), mat2(10, 4, 0, 6));
  const ScoreReport a = score(inst, s);
  const ScoreReport b = score(inst, s);
  EXPECT_EQ(a.utility, b.utility);
  EXPECT_EQ(a.total_bits, b.total_bits);
  EXPECT_EQ(a.per_user_bits, b.per_user_bits);
}

TEST(Score, UtilityIsSumOfSingleUserUtilities) {
  const Instance both = two_by_two({3, 7}, {13, 16});
  const Schedule s(vec({0.3, 0.7}), mat2(6, 2, 4, 8));
  const double joint = utility(both, s);
  double sum = 0.0;
  for (Index n = 0; n < 2; ++n) {
    Instance::Params p = both.params();
    p.path_loss_db = {p.path_loss_db[static_cast<std::size_t>(n)]};
    Matrix row = s.shares().row(n);
    // One user with the same row; the extra share is not a concern for
    // utility, only for feasibility.
    sum += utility(Instance(p), Schedule(s.powers(), row));
  }
  EXPECT_NEAR(joint, sum, 1e-12);
}

TEST(Jain, BoundsAndEmpty) {
  EXPECT_FALSE(jain_index(std::vector<double>{0, 0, 0}).has_value());
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(5);
    for (auto& v : x) v = u(rng);
    const double fi = *jain_index(x);
    EXPECT_GE(fi, 0.2 - 1e-12);
    EXPECT_LE(fi, 1.0 + 1e-12);
  }
}

TEST(Feasibility, SpendWhatYouGetIsCausal) {
  const Instance inst = two_by_two({0.5, 50});
  EXPECT_TRUE(
      check_feasibility(inst, Schedule(vec({0.05, 5}), mat2(3, 9, 7, 1))).empty());
}

TEST(Feasibility, ReportsCausalityViolation) {
  const Instance inst = two_by_two({0.5, 50});
  const auto v = check_feasibility(inst, Schedule(vec({5, 0.05}), mat2(10, 0, 0, 10)));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].constraint, Constraint::kEnergyCausality);
  EXPECT_EQ(v[0].slot, 0);
  EXPECT_NEAR(v[0].magnitude, 49.5, 1e-12);
}

TEST(Feasibility, ReportsTimeLimitViolation) {
  const Instance inst = two_by_two({0.5, 50});
  const auto v = check_feasibility(inst, Schedule(vec({0.05, 5}), mat2(6, 5, 5, 5)));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].constraint, Constraint::kTimeLimit);
  EXPECT_NEAR(v[0].magnitude, 1.0, 1e-12);
}

TEST(Feasibility, ReportsMinShareAndNegativity) {
  const Instance inst = two_by_two({0.5, 50});
  auto v = check_feasibility(inst, Schedule(vec({0.05, 5}), mat2(10, 10, 0, 0)));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].constraint, Constraint::kMinShare);
  EXPECT_EQ(v[0].user, 1);

  v = check_feasibility(inst, Schedule(vec({0.05, 5}), mat2(11, 5, -1, 5)));
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].constraint, Constraint::kNonnegativity);
}

// Direct re-evaluation of the constraint set for the fuzz test.
bool feasible_by_hand(const Instance& inst, const Schedule& s) {
  const double t = inst.slot_length();
  const Tolerances tol = Tolerances::for_instance(inst);
  double spent = 0.0, harvested = 0.0;
  for (Index k = 0; k < s.num_slots(); ++k) {
    if (s.powers()[k] < -tol.zero) return false;
    double col = 0.0;
    for (Index n = 0; n < s.num_users(); ++n) {
      if (s.shares()(n, k) < -tol.zero) return false;
      col += s.shares()(n, k);
    }
    if (std::abs(col - t) > tol.time) return false;
    spent += s.powers()[k] * t;
    harvested += inst.harvests()[k];
    if (spent > harvested + tol.energy) return false;
  }
  for (Index n = 0; n < s.num_users(); ++n) {
    if (s.shares().row(n).sum() < inst.epsilon_share()) return false;
  }
  return true;
}

TEST(Feasibility, AgreesWithDirectEvaluation) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  int feasible_seen = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(u(rng) * 4);
    const int n = 1 + static_cast<int>(u(rng) * 3);
    Instance::Params p;
    for (int i = 0; i < k; ++i) p.harvests.push_back(std::floor(u(rng) * 5));
    p.harvests[0] += 1;
    for (int i = 0; i < n; ++i) p.path_loss_db.push_back(10 + 10 * u(rng));
    const Instance inst(p);
    Vector powers(k);
    Matrix shares(n, k);
    for (int t = 0; t < k; ++t) {
      // Mostly causal, sometimes over budget.
      powers[t] = inst.harvests()[t] / 10.0 * (u(rng) < 0.8 ? u(rng) : 1.5);
      double left = 10.0;
      for (int i = 0; i < n; ++i) {
        shares(i, t) = i + 1 == n ? left : left * u(rng);
        left -= shares(i, t);
      }
      if (u(rng) < 0.1) shares(0, t) += 0.5;
      if (u(rng) < 0.05) shares(n - 1, t) = -0.1;
    }
    const Schedule s(powers, shares);
    const bool expected = feasible_by_hand(inst, s);
    feasible_seen += expected;
    EXPECT_EQ(check_feasibility(inst, s).empty(), expected) << "trial " << trial;
  }
  EXPECT_GT(feasible_seen, 100);
}

TEST(Improvement, Examples) {
  EXPECT_NEAR(improvement_pct(29.8094, 29.7587), 0.17, 0.005);
  EXPECT_DOUBLE_EQ(improvement_pct(3.5, 3.5), 0.0);
  EXPECT_DOUBLE_EQ(improvement_pct(150, 100), 50.0);
  EXPECT_DOUBLE_EQ(improvement_pct(-50, -100), 50.0);
  EXPECT_THROW(improvement_pct(1, 0), UndefinedBaseline);
  EXPECT_THROW(improvement_pct(1, -std::numeric_limits<double>::infinity()),
               UndefinedBaseline);
}

}  // namespace
}  // namespace ehpf
