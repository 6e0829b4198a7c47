#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gbtsvm/numerics.hpp"
#include "test_support.hpp"

namespace {

using gbt::BoxQP;
using gbt::Error;
using gbt::ErrorKind;
using gbt::Index;
using gbt::kInf;

// Determinant by Laplace expansion along the first row.
double cofactor_det(const Eigen::MatrixXd& a) {
  const Index k = a.rows();
  if (k == 0) return 1.0;
  double det = 0.0;
  for (Index j = 0; j < k; ++j) {
    Eigen::MatrixXd minor(k - 1, k - 1);
    for (Index r = 1; r < k; ++r) {
      Index c2 = 0;
      for (Index c = 0; c < k; ++c) {
        if (c != j) minor(r - 1, c2++) = a(r, c);
      }
    }
    det += (j % 2 == 0 ? 1.0 : -1.0) * a(0, j) * cofactor_det(minor);
  }
  return det;
}

// Inverse as adjugate / determinant.
Eigen::MatrixXd cofactor_inverse(const Eigen::MatrixXd& a) {
  const Index k = a.rows();
  const double det = cofactor_det(a);
  Eigen::MatrixXd inv(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      Eigen::MatrixXd minor(k - 1, k - 1);
      Index r2 = 0;
      for (Index r = 0; r < k; ++r) {
        if (r == i) continue;
        Index c2 = 0;
        for (Index c = 0; c < k; ++c) {
          if (c != j) minor(r2, c2++) = a(r, c);
        }
        ++r2;
      }
      inv(j, i) = ((i + j) % 2 == 0 ? 1.0 : -1.0) * cofactor_det(minor) / det;
    }
  }
  return inv;
}

// Coefficients of det(lambda I - A), highest degree first (Faddeev-LeVerrier).
std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a) {
  const Index k = a.rows();
  std::vector<double> coeff{1.0};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  double c = 1.0;
  for (Index step = 1; step <= k; ++step) {
    m = a * m + c * Eigen::MatrixXd::Identity(k, k);
    c = -(a * m).trace() / static_cast<double>(step);
    coeff.push_back(c);
  }
  return coeff;
}

// Largest root: Newton from above the Gershgorin bound converges
// monotonically for a polynomial with only real roots.
double largest_root(const std::vector<double>& coeff, double start) {
  double x = start;
  for (int it = 0; it < 500; ++it) {
    double p = 0.0, dp = 0.0;
    for (double c : coeff) {
      dp = dp * x + p;
      p = p * x + c;
    }
    if (dp == 0.0) break;
    const double next = x - p / dp;
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

BoxQP one_dim(double lo, double hi) {
  BoxQP p;
  p.Q = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.c = Eigen::VectorXd::Constant(1, -1.0);
  p.lower = Eigen::VectorXd::Constant(1, lo);
  p.upper = Eigen::VectorXd::Constant(1, hi);
  return p;
}

BoxQP random_qp(Index k, std::mt19937_64& rng, bool mixed_free) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BoxQP p;
  const Index rank = std::max<Index>(1, k - static_cast<Index>(u(rng) * 3.0));
  p.Q = gbt::testing::random_psd(k, rank, rng);
  p.Q.diagonal().array() += 1e-3;  // strictly convex so the optimum is unique
  p.c = gbt::testing::random_matrix(k, 1, rng).col(0) * 2.0;
  p.lower.resize(k);
  p.upper.resize(k);
  for (Index i = 0; i < k; ++i) {
    if (mixed_free && u(rng) < 0.3) {
      p.lower(i) = -kInf;
      p.upper(i) = kInf;
    } else {
      p.lower(i) = u(rng) < 0.5 ? 0.0 : -u(rng);
      p.upper(i) = p.lower(i) + 0.2 + u(rng);
    }
  }
  return p;
}

TEST(SolveSpd, IdentityReturnsRhs) {
  const Eigen::MatrixXd b = Eigen::MatrixXd::Random(3, 2);
  EXPECT_TRUE(gbt::solve_spd(Eigen::MatrixXd::Identity(3, 3), b).isApprox(b, 1e-15));
}

TEST(SolveSpd, ScaledIdentityHalves) {
  const Eigen::VectorXd b = Eigen::VectorXd::Random(4);
  const Eigen::MatrixXd x = gbt::solve_spd(2.0 * Eigen::MatrixXd::Identity(4, 4), b);
  EXPECT_TRUE(x.col(0).isApprox(b / 2.0, 1e-15));
}

TEST(SolveSpd, MatchesCofactorInverse) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index k = 1 + trial % 5;
    Eigen::MatrixXd a = gbt::testing::random_psd(k, k, rng);
    a.diagonal().array() += 0.5;
    const Eigen::MatrixXd b = gbt::testing::random_matrix(k, 3, rng);
    const Eigen::MatrixXd x = gbt::solve_spd(a, b);
    const Eigen::MatrixXd oracle = cofactor_inverse(a) * b;
    EXPECT_LE((x - oracle).norm() / std::max(1.0, oracle.norm()), 1e-8) << "k=" << k;
    EXPECT_LE((a * x - b).norm() / std::max(1.0, b.norm()), 1e-8);
  }
}

TEST(SolveSpd, IndefiniteMatrixIsRejected) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2, 1;
  try {
    gbt::solve_spd(a, Eigen::VectorXd::Ones(2));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_positive_definite);
  }
}

TEST(SolveSpd, CounterCountsCalls) {
  const auto before = gbt::spd_solve_count();
  gbt::solve_spd(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2));
  EXPECT_EQ(gbt::spd_solve_count(), before + 1);
}

TEST(BoxQp, InteriorOptimum) {
  const auto s = gbt::solve_box_qp(one_dim(0.0, 10.0));
  EXPECT_NEAR(s.x(0), 1.0, 1e-12);
  EXPECT_LE(s.kkt_residual, 1e-8);
}

TEST(BoxQp, ClippedOptimumAtUpperBound) {
  const auto s = gbt::solve_box_qp(one_dim(0.0, 0.5));
  EXPECT_DOUBLE_EQ(s.x(0), 0.5);
  EXPECT_EQ(s.kkt_residual, 0.0);
}

TEST(BoxQp, FreeCoordinateMovesUnclipped) {
  const auto s = gbt::solve_box_qp(one_dim(-kInf, kInf));
  EXPECT_NEAR(s.x(0), 1.0, 1e-12);
}

TEST(BoxQp, MatchesActiveSetOracleOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int seed = 0; seed < 100; ++seed) {
    const BoxQP p = random_qp(6, rng, seed % 2 == 1);
    const auto oracle = gbt::active_set_oracle(p);
    gbt::SolverConfig cfg;
    cfg.max_sweeps = 200000;
    const auto s = gbt::solve_box_qp(p, cfg);
    EXPECT_NEAR(s.objective, oracle.objective, 1e-6) << "seed " << seed;
    EXPECT_LE(s.objective, oracle.objective + 1e-6);
    EXPECT_LE(s.kkt_residual, 10.0 * cfg.tolerance);
    EXPECT_TRUE(((s.x - p.lower).array() >= 0.0).all());
    EXPECT_TRUE(((p.upper - s.x).array() >= 0.0).all());
  }
}

TEST(BoxQp, ShuffledOrderReachesTheSameOptimum) {
  std::mt19937_64 rng(5);
  for (int seed = 0; seed < 20; ++seed) {
    const BoxQP p = random_qp(8, rng, true);
    gbt::SolverConfig cfg;
    cfg.max_sweeps = 200000;
    const auto a = gbt::solve_box_qp(p, cfg, gbt::SweepOrder::cyclic);
    const auto b = gbt::solve_box_qp(p, cfg, gbt::SweepOrder::shuffled, 99);
    EXPECT_NEAR(a.objective, b.objective, 1e-9);
  }
}

TEST(BoxQp, ObjectiveNeverIncreasesAcrossSweeps) {
  std::mt19937_64 rng(7);
  for (double omega : {0.5, 1.0, 1.5, 1.9}) {
    for (int seed = 0; seed < 10; ++seed) {
      const BoxQP p = random_qp(10, rng, seed % 2 == 0);
      gbt::SolverConfig cfg;
      cfg.omega = omega;
      cfg.max_sweeps = 200000;
      double prev = p.objective(Eigen::VectorXd::Zero(10).cwiseMax(p.lower).cwiseMin(p.upper));
      gbt::solve_box_qp(p, cfg, gbt::SweepOrder::cyclic, 0, 0.0, [&](int sweep, double obj) {
        EXPECT_LE(obj, prev + 1e-12) << "omega " << omega << " sweep " << sweep;
        prev = obj;
      });
    }
  }
}

TEST(BoxQp, NonPositiveDiagonalIsRejected) {
  BoxQP p = one_dim(0.0, 1.0);
  p.Q(0, 0) = 0.0;
  try {
    gbt::solve_box_qp(p);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::indefinite_diagonal);
  }
}

TEST(BoxQp, SweepCapRaisesConvergenceErrorWithIterate) {
  std::mt19937_64 rng(3);
  BoxQP p = random_qp(8, rng, true);
  p.Q = gbt::testing::random_psd(8, 2, rng);
  p.Q.diagonal().array() += 1e-9;
  gbt::SolverConfig cfg;
  cfg.max_sweeps = 2;
  cfg.tolerance = 1e-14;
  try {
    gbt::solve_box_qp(p, cfg);
    FAIL() << "expected an error";
  } catch (const gbt::PartialResultError<gbt::QPSolution>& e) {
    EXPECT_EQ(e.kind(), ErrorKind::convergence);
    EXPECT_EQ(e.partial().iterations, 2);
    EXPECT_EQ(e.partial().x.size(), 8);
  }
}

TEST(BoxQp, AsymmetricMatrixIsRejected) {
  BoxQP p;
  p.Q = Eigen::MatrixXd::Identity(2, 2);
  p.Q(0, 1) = 0.5;
  p.c = Eigen::VectorXd::Zero(2);
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(gbt::solve_box_qp(p), Error);
}

TEST(BoxQp, JitterIsRecorded) {
  const auto s = gbt::solve_box_qp(one_dim(0.0, 10.0), {}, gbt::SweepOrder::cyclic, 0, 1e-6);
  EXPECT_EQ(s.jitter, 1e-6);
  EXPECT_NEAR(s.x(0), 1.0 / (1.0 + 1e-6), 1e-12);
}

TEST(ActiveSetOracle, OneDimensionalExamples) {
  EXPECT_NEAR(gbt::active_set_oracle(one_dim(0.0, 10.0)).x(0), 1.0, 1e-14);
  EXPECT_NEAR(gbt::active_set_oracle(one_dim(0.0, 0.5)).x(0), 0.5, 1e-14);
}

TEST(ActiveSetOracle, UnconstrainedIsNewtonStep) {
  std::mt19937_64 rng(9);
  BoxQP p;
  p.Q = gbt::testing::random_psd(4, 4, rng);
  p.Q.diagonal().array() += 1.0;
  p.c = Eigen::VectorXd::Random(4);
  p.lower = Eigen::VectorXd::Constant(4, -kInf);
  p.upper = Eigen::VectorXd::Constant(4, kInf);
  const auto s = gbt::active_set_oracle(p);
  EXPECT_TRUE(s.x.isApprox(-p.Q.ldlt().solve(p.c), 1e-10));
}

TEST(ActiveSetOracle, PositiveGradientStaysAtOrigin) {
  BoxQP p;
  p.Q = Eigen::MatrixXd::Identity(2, 2);
  p.c = Eigen::VectorXd::Ones(2);
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Ones(2);
  EXPECT_TRUE(gbt::active_set_oracle(p).x.isZero(0.0));
}

TEST(ActiveSetOracle, RefusesLargeProblems) {
  BoxQP p;
  p.Q = Eigen::MatrixXd::Identity(13, 13);
  p.c = Eigen::VectorXd::Zero(13);
  p.lower = Eigen::VectorXd::Zero(13);
  p.upper = Eigen::VectorXd::Ones(13);
  EXPECT_THROW(gbt::active_set_oracle(p), Error);
}

TEST(LargestEigenvalue, Diagonal) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 3.0;
  EXPECT_NEAR(gbt::largest_eigenvalue(a), 3.0, 1e-10);
}

TEST(LargestEigenvalue, Identity) {
  EXPECT_NEAR(gbt::largest_eigenvalue(Eigen::MatrixXd::Identity(5, 5)), 1.0, 1e-10);
}

TEST(LargestEigenvalue, MatchesCharacteristicPolynomialRoot) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd a = gbt::testing::random_matrix(4, 4, rng);
    a = 0.5 * (a + a.transpose()).eval();
    const double bound = a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    const double oracle = largest_root(characteristic_polynomial(a), bound);
    EXPECT_NEAR(gbt::largest_eigenvalue(a), oracle, 1e-8) << a;
  }
}

TEST(LargestEigenvalue, NegativeDefiniteAndOppositePairs) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -4.0;
  EXPECT_NEAR(gbt::largest_eigenvalue(a), -1.0, 1e-10);
  Eigen::MatrixXd b(2, 2);
  b << 0, 2, 2, 0;  // eigenvalues +-2
  EXPECT_NEAR(gbt::largest_eigenvalue(b), 2.0, 1e-10);
}

TEST(LargestEigenvalue, ZeroMatrix) {
  EXPECT_EQ(gbt::largest_eigenvalue(Eigen::MatrixXd::Zero(3, 3)), 0.0);
}

}  // namespace
