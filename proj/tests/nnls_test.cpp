#include "ehpf/nnls.hpp"

#include <random>

#include <gtest/gtest.h>

#include "ehpf/error.hpp"

namespace ehpf {
namespace {

TEST(Nnls, InteriorSolutionIsLeastSquares) {
  Matrix a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  Vector b(3);
  b << 1, 2, 3;
  const NnlsResult r = nnls(a, b);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], 2.0, 1e-12);
  EXPECT_NEAR(r.residual_norm, 0.0, 1e-12);
}

TEST(Nnls, ClampsNegativeComponent) {
  Matrix a = Matrix::Identity(2, 2);
  Vector b(2);
  b << 1, -1;
  const NnlsResult r = nnls(a, b);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_EQ(r.x[1], 0.0);
}

TEST(Nnls, FreeVariablesMayBeNegative) {
  Matrix a = Matrix::Identity(2, 2);
  Vector b(2);
  b << 1, -1;
  const NnlsResult r = nnls(a, b, {false, true});
  EXPECT_NEAR(r.x[1], -1.0, 1e-12);
}

TEST(Nnls, OptimalityConditionsOnRandomProblems) {
  std::mt19937 rng(23);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    Matrix a(8, 5);
    Vector b(8);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    for (Index i = 0; i < b.size(); ++i) b[i] = g(rng);
    const NnlsResult r = nnls(a, b);
    ASSERT_TRUE(r.converged);
    const Vector w = a.transpose() * (b - a * r.x);
    for (Index j = 0; j < 5; ++j) {
      EXPECT_GE(r.x[j], 0.0);
      // Gradient vanishes on the support and points outward elsewhere.
      if (r.x[j] > 0) {
        EXPECT_NEAR(w[j], 0.0, 1e-9);
      } else {
        EXPECT_LE(w[j], 1e-9);
      }
    }
  }
}

TEST(Nnls, RejectsMismatch) {
  EXPECT_THROW(nnls(Matrix::Zero(2, 2), Vector::Zero(3)), DimensionMismatch);
  EXPECT_THROW(nnls(Matrix::Zero(2, 2), Vector::Zero(2), {true}),
               DimensionMismatch);
}

}  // namespace
}  // namespace ehpf
