#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qwalk/caratheodory.hpp"
#include "qwalk/generating.hpp"
#include "qwalk/limit_measures.hpp"
#include "qwalk/path_oracle.hpp"

using namespace qwalk;

namespace {

const double kPi = std::numbers::pi;

// Σ_{n≤N} Ξ(x, n) zⁿ from engine passage weights.
Mat2 engine_series(const WalkConfig& config, std::int64_t x, cplx z, int N) {
  Mat2 acc = Mat2::zero();
  cplx zn = 1.0;
  for (int n = 0; n <= N; ++n) {
    if (std::abs(x) <= n) acc += zn * xi_row_via_engine(n, config)[x + n];
    zn *= z;
  }
  return acc;
}

std::vector<cplx> random_disk_points(std::mt19937& rng, int count, double rmax = 0.999) {
  std::uniform_real_distribution<double> r(0.0, 1.0), t(0.0, 2.0 * kPi);
  std::vector<cplx> out;
  for (int i = 0; i < count; ++i) out.push_back(std::polar(rmax * std::sqrt(r(rng)), t(rng)));
  return out;
}

}  // namespace

TEST(EvalBoundary, ZeroPoint) {
  const BoundaryValues v = eval_boundary(phase_defect::config(1.0), 0.0);
  EXPECT_EQ(std::abs(v.f_plus), 0.0);
  EXPECT_EQ(std::abs(v.f_minus), 0.0);
  EXPECT_EQ(std::abs(v.lambda_plus), 0.0);
  EXPECT_EQ(std::abs(v.lambda_minus), 0.0);
}

TEST(EvalBoundary, HadamardHalfQuadratics) {
  const WalkConfig c = WalkConfig::homogeneous(hadamard());
  const QuadraticResiduals r = quadratic_residuals(c, eval_boundary(c, 0.5));
  EXPECT_LT(r.plus, 1e-12);
  EXPECT_LT(r.minus, 1e-12);
}

TEST(EvalBoundary, QuadraticsAndBranchOnRandomPoints) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const WalkConfig c(oracle::random_family_coin(rng), oracle::random_family_coin(rng));
    for (cplx z : random_disk_points(rng, 200)) {
      const BoundaryValues v = eval_boundary(c, z);
      const QuadraticResiduals r = quadratic_residuals(c, v);
      EXPECT_LE(r.plus, 1e-10);
      EXPECT_LE(r.minus, 1e-10);
      EXPECT_LT(std::abs(v.lambda_plus), 1.0);
      EXPECT_LT(std::abs(v.lambda_minus), 1.0);
    }
  }
}

TEST(EvalBoundary, SmallZLimit) {
  const WalkConfig c = phase_defect::config(2.0);
  const BoundaryValues v = eval_boundary(c, cplx(1e-6, 1e-6));
  EXPECT_LT(std::abs(v.f_plus), 1e-5);
  EXPECT_LT(std::abs(v.f_minus), 1e-5);
}

TEST(EvalBoundary, OutsideDiskNeedsRadialLimit) {
  EXPECT_THROW(eval_boundary(phase_defect::config(1.0), 1.0), BranchAmbiguity);
  EXPECT_THROW(eval_boundary(phase_defect::config(1.0), cplx(0.0, 2.0)), BranchAmbiguity);
}

TEST(EvalBoundary, RadialContinuityProperty) {
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> t(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 6; ++trial) {
    const WalkConfig c(oracle::random_family_coin(rng), oracle::random_family_coin(rng));
    const double theta = t(rng);
    BoundaryValues prev = eval_boundary(c, 0.0);
    for (int k = 1; k < 1000; ++k) {
      const BoundaryValues v = eval_boundary(c, std::polar(k * 1e-3, theta));
      EXPECT_LE(std::abs(v.f_plus - prev.f_plus), 1e-2) << "theta " << theta << " t " << k;
      EXPECT_LE(std::abs(v.f_minus - prev.f_minus), 1e-2);
      EXPECT_LE(std::abs(v.lambda_plus - prev.lambda_plus), 1e-2);
      EXPECT_LE(std::abs(v.lambda_minus - prev.lambda_minus), 1e-2);
      prev = v;
    }
  }
}

TEST(EvalBoundary, LambdaRatiosMatchEngineSeries) {
  // Deep in the bulk Ξ̃_{x+1} = λ̃⁺ Ξ̃ₓ (x ≥ 2) and Ξ̃_{x-1} = λ̃⁻ Ξ̃ₓ (x ≤ -2).
  std::mt19937 rng(33);
  for (int trial = 0; trial < 3; ++trial) {
    const WalkConfig c(oracle::random_family_coin(rng), oracle::random_family_coin(rng));
    const cplx z = std::polar(0.3, 0.4 + trial);
    const BoundaryValues v = eval_boundary(c, z);
    const int N = 60;
    const Mat2 r2 = engine_series(c, 2, z, N), r3 = engine_series(c, 3, z, N);
    const Mat2 l2 = engine_series(c, -2, z, N), l3 = engine_series(c, -3, z, N);
    EXPECT_LE(max_abs_diff(v.lambda_plus * r2, r3), 1e-13);
    EXPECT_LE(max_abs_diff(v.lambda_minus * l2, l3), 1e-13);
  }
}

TEST(EvalBoundary, RadialLimitMatchesInteriorApproach) {
  std::mt19937 rng(34);
  for (int trial = 0; trial < 4; ++trial) {
    const WalkConfig c(oracle::random_family_coin(rng), oracle::random_family_coin(rng));
    const cplx root_det = std::sqrt(c.bulk().det());
    for (double theta : {0.3, 1.1, 1.9, 2.6, 3.5, 4.4, 5.2, 6.0}) {
      const BoundaryValues lim = eval_boundary_limit(c, theta);
      const BoundaryValues in = eval_boundary(c, (1.0 - 1e-9) * std::polar(1.0, theta) / root_det);
      EXPECT_LE(std::abs(lim.f_plus - in.f_plus), 1e-3) << theta;
      EXPECT_LE(std::abs(lim.f_minus - in.f_minus), 1e-3) << theta;
      EXPECT_LE(std::abs(lim.lambda_plus - in.lambda_plus), 1e-3) << theta;
      EXPECT_LE(std::abs(lim.lambda_minus - in.lambda_minus), 1e-3) << theta;
      const QuadraticResiduals r = quadratic_residuals(c, lim);
      EXPECT_LE(r.plus, 1e-10);
      EXPECT_LE(r.minus, 1e-10);
    }
  }
}

TEST(EvalBoundary, UnitModulusOnContinuousSpectrum) {
  // |cos θ| < |a| is the band where the limits have modulus one.
  const WalkConfig c = phase_defect::config(kPi);
  const double abs_a = std::abs(c.bulk().a());
  for (double theta = 0.01; theta < 2.0 * kPi; theta += 0.013) {
    const BoundaryValues v = eval_boundary_limit(c, theta);
    if (std::abs(std::cos(theta)) < abs_a - 1e-6) {
      EXPECT_NEAR(std::abs(v.lambda_plus), 1.0, 1e-10) << theta;
      EXPECT_NEAR(std::abs(v.lambda_minus), 1.0, 1e-10) << theta;
    } else if (std::abs(std::cos(theta)) > abs_a + 1e-6) {
      EXPECT_LT(std::abs(v.lambda_plus), 1.0) << theta;
      EXPECT_LT(std::abs(v.lambda_minus), 1.0) << theta;
    }
  }
}

TEST(CgmvSqrtLimit, SquaresToDiscriminant) {
  for (double abs_a : {0.3, 1.0 / std::numbers::sqrt2, 0.9})
    for (double theta = 0.05; theta < 2.0 * kPi; theta += 0.1) {
      const cplx w = std::polar(1.0, theta);
      const cplx s = cgmv_sqrt_limit(theta, abs_a);
      const cplx disc = (w + 1.0 / w) * (w + 1.0 / w) - 4.0 * abs_a * abs_a;
      EXPECT_LE(std::abs(s * s - disc), 1e-12);
      const cplx inside = (0.999999 * w + 1.0 / (0.999999 * w));
      const cplx approach = std::sqrt(inside * inside - 4.0 * abs_a * abs_a);
      EXPECT_LE(std::min(std::abs(approach - s), std::abs(approach + s)), 1e-2);
    }
}

TEST(Xi0Generating, ZeroIsIdentity) {
  EXPECT_LE(max_abs_diff(xi0_generating(phase_defect::config(2.0), 0.0), Mat2::identity()), 0.0);
}

TEST(Xi0Generating, TaylorMatchesEngine) {
  const WalkConfig c = phase_defect::config(kPi);
  const std::vector<Mat2> coeffs =
      taylor_coefficients([&](cplx z) { return xi0_generating(c, z); }, 20);
  for (int n = 0; n <= 20; ++n)
    EXPECT_LE(max_abs_diff(coeffs[n], xi_via_engine(0, n, c).weight), 1e-10) << n;
}

TEST(XiXGenerating, TaylorMatchesEngineForGeneralCoins) {
  std::mt19937 rng(35);
  for (int trial = 0; trial < 3; ++trial) {
    const WalkConfig c(oracle::random_unitary(rng), oracle::random_unitary(rng));
    for (int x = -3; x <= 3; ++x) {
      const std::vector<Mat2> coeffs =
          taylor_coefficients([&](cplx z) { return xi_x_generating(c, x, z); }, 20);
      for (int n = 0; n <= 20; ++n)
        EXPECT_LE(max_abs_diff(coeffs[n], xi_via_engine(x, n, c).weight), 1e-10)
            << "x " << x << " n " << n;
    }
  }
}

TEST(XiXGenerating, ShiftedDefectField) {
  const WalkConfig c = phase_defect::config(2.0).shifted(1);
  const std::vector<Mat2> coeffs =
      taylor_coefficients([&](cplx z) { return xi_x_generating(c, 1, z); }, 16);
  for (int n = 0; n <= 16; ++n)
    EXPECT_LE(max_abs_diff(coeffs[n], xi_via_engine(1, n, c).weight), 1e-10) << n;
}

TEST(XiXGenerating, OffsiteEntriesAreRankOne) {
  const WalkConfig c = phase_defect::config(1.3);
  for (int x : {-2, -1, 1, 2})
    EXPECT_LE(std::abs(xi_x_generating(c, x, cplx(0.2, 0.3)).det()), 1e-14);
}

TEST(TaylorCoefficients, Preconditions) {
  const auto fn = [](cplx) { return Mat2::identity(); };
  EXPECT_THROW(taylor_coefficients(fn, -1), PreconditionError);
  EXPECT_THROW(taylor_coefficients(fn, 256), PreconditionError);
}

TEST(Xi0Generating, TypeTwoClosedForm) {
  const cplx b(0.5, 0.5);
  const WalkConfig c = type_two_config(b);
  for (cplx z : {cplx(0.5, 0.0), cplx(0.0, 0.4), cplx(-0.3, 0.3), cplx(0.1, -0.7)})
    EXPECT_LE(std::abs(xi0_generating(c, z).a - type_two_xi0_closed_form<cplx>(b, z)), 1e-13)
        << z;
}

TEST(FindPoles, OmegaPiHadamard) {
  const PoleSet p = find_poles(phase_defect::config(kPi));
  ASSERT_TRUE(p.localized());
  EXPECT_NEAR(p.m, -0.5, 1e-15);
  EXPECT_NEAR(p.gamma, kPi / 4, 1e-14);
  const cplx wp = cplx(3.0, 1.0) / std::sqrt(10.0);
  EXPECT_LE(std::abs(p.points[0] - wp), 1e-14);
  EXPECT_LE(std::abs(p.points[1] + wp), 1e-14);
  EXPECT_LE(std::abs(p.points[2] - std::conj(wp)), 1e-14);
  EXPECT_LE(std::abs(p.points[3] + std::conj(wp)), 1e-14);
}

TEST(FindPoles, NoDefectMeansNoPoles) {
  const WalkConfig c = phase_defect::config(0.0);
  const PoleSet p = find_poles(c);
  EXPECT_FALSE(p.localized());
  EXPECT_NEAR(p.m, std::norm(c.bulk().c()), 1e-15);
}

TEST(FindPoles, DeterminantMismatch) {
  const WalkConfig c(CoinMatrix(Mat2{0.6, 0.8, -0.8, 0.6}), hadamard());
  EXPECT_THROW(find_poles(c), DeterminantMismatch);
}

TEST(FindPoles, Lambda0VanishesAtPoles) {
  for (int k = 1; k < 16; ++k) {
    const WalkConfig c = phase_defect::config(k * kPi / 8);
    const PoleSet p = find_poles(c);
    ASSERT_TRUE(p.localized()) << k;
    for (cplx w : p.points) EXPECT_LE(std::abs(lambda0_limit(c, w)), 1e-8) << k << ' ' << w;
  }
}

TEST(FindPoles, GeneralBulkCoins) {
  std::mt19937 rng(36);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 20; ++trial) {
    const WalkConfig c(make_coin(CoinAngles(angle(rng), angle(rng))),
                       make_coin(CoinAngles(angle(rng), angle(rng))));
    const PoleSet p = find_poles(c);
    if (!p.localized()) continue;
    for (cplx w : p.points) EXPECT_LE(std::abs(lambda0_limit(c, w)), 1e-8);
  }
}

TEST(Caratheodory, ZeroPointIsExact) {
  const CaratheodoryReport semi = caratheodory_semi_infinite(cplx(0.5, 0.5), 0.0, 60);
  EXPECT_EQ(semi.residual, 0.0);
  const CaratheodoryReport full =
      caratheodory_doubly_infinite(CoinAngles(0.0, kPi), CoinAngles(0.0, 0.0), 0.0, 60);
  EXPECT_EQ(full.residual, 0.0);
  EXPECT_LE(max_abs_diff(full.series, Mat2{1.0, 0.0, 0.0, 1.0}), 0.0);
}

TEST(Caratheodory, TypeTwoHalfBelowTail) {
  const CaratheodoryReport r = caratheodory_semi_infinite(cplx(0.5, 0.5), 0.5, 60);
  EXPECT_LE(r.residual, 2.0 * r.tail_bound);
}

TEST(Caratheodory, DoublePrecisionAgreesToRounding) {
  for (cplx z : {cplx(0.4, 0.0), cplx(0.0, 0.4), cplx(-0.3, 0.3)}) {
    EXPECT_LE(caratheodory_semi_infinite<cplx>(cplx(0.3, -0.6), z, 60).residual, 1e-14);
    EXPECT_LE(caratheodory_doubly_infinite<cplx>(CoinAngles(0.0, 2.0), CoinAngles(0.5, 1.5), z, 60)
                  .residual,
              1e-14);
  }
}

TEST(Caratheodory, QuadPrecisionBelowTailForRandomCoins) {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 3; ++trial) {
    const CoinAngles defect(angle(rng), angle(rng)), bulk(angle(rng), angle(rng));
    const CaratheodoryReport r = caratheodory_doubly_infinite(defect, bulk, cplx(0.3, -0.3), 60);
    EXPECT_LE(r.residual, 2.0 * r.tail_bound);
  }
}

TEST(Caratheodory, Preconditions) {
  EXPECT_THROW(caratheodory_semi_infinite(cplx(0.5, 0.5), 0.9, 60), PreconditionError);
  EXPECT_THROW(caratheodory_semi_infinite(cplx(0.5, 0.5), 0.4, -1), PreconditionError);
  EXPECT_THROW(type_two_config(cplx(1.0, 0.0)), PreconditionError);
}
