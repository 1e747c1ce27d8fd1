#include <gtest/gtest.h>

#include <numbers>

#include "qwalk/stationary.hpp"

using namespace qwalk;

namespace {

const double kPi = std::numbers::pi;

const double kOmegas[] = {kPi / 4, kPi / 2, 2.0, kPi, 4.0, 7 * kPi / 4};

double eigen_residual(const SpinorField& e, const WalkConfig& config, cplx eta) {
  const SpinorField next = step(e, config);
  double worst = 0.0;
  for (std::int64_t x = e.lo() + 1; x <= e.hi() - 1; ++x) {
    const Spinor a = next.at(x), b = e.at(x);
    worst = std::max({worst, std::abs(a[0] - eta * b[0]), std::abs(a[1] - eta * b[1])});
  }
  return worst;
}

}  // namespace

TEST(Eigenvalues, OmegaPi) {
  for (const auto& [s, t] : kBranches)
    EXPECT_LE(std::abs(eigenvalue(kPi, s, t) - cplx(s, 3.0 * t) / std::sqrt(10.0)), 1e-15);
}

TEST(Eigenvalues, OmegaHalfPi) {
  for (const auto& [s, t] : kBranches)
    EXPECT_LE(std::abs(eigenvalue(kPi / 2, s, t) -
                       cplx(s * std::numbers::sqrt2, 2.0 * t) / std::sqrt(6.0)),
              1e-15);
}

TEST(Eigenvalues, UnitModulusAndSignChecks) {
  for (double omega = 0.0; omega < 2 * kPi; omega += 0.01)
    for (cplx eta : eigenvalues(omega)) EXPECT_NEAR(std::abs(eta), 1.0, 1e-12);
  EXPECT_THROW(eigenvalue(1.0, 0, 1), PreconditionError);
  EXPECT_THROW(eigenvalue(1.0, 1, 2), PreconditionError);
}

TEST(DecayRoot, SolvesQuadraticInsideDisk) {
  for (double omega = 0.05; omega < 2 * kPi - 0.05; omega += 0.05)
    for (cplx eta : eigenvalues(omega)) {
      const cplx g = decay_root(eta);
      const cplx h = g * g + std::numbers::sqrt2 * (eta - 1.0 / eta) * g - 1.0;
      EXPECT_LE(std::abs(h), 1e-12);
      EXPECT_LT(std::abs(g), 1.0);
      EXPECT_NEAR(std::abs(g), 1.0 / std::sqrt(3.0 - 2.0 * std::cos(omega)), 1e-12);
    }
  EXPECT_THROW(decay_root(eigenvalue(0.0, 1, 1)), BranchAmbiguity);
}

TEST(MakeEigenData, RejectsVanishingDefect) {
  EXPECT_THROW(make_eigen_data(0.0, 1, 1), PreconditionError);
  EXPECT_THROW(make_eigen_data(2 * kPi, 1, 1), PreconditionError);
  EXPECT_THROW(orthogonal_initial_state(0.0), PreconditionError);
}

TEST(BuildEigenvector, ResidualOnInterior) {
  for (double omega : kOmegas) {
    const WalkConfig config = phase_defect::config(omega);
    for (const auto& [s, t] : kBranches) {
      const EigenData d = make_eigen_data(omega, s, t);
      EXPECT_LE(eigen_residual(build_eigenvector(d, 200), config, d.eta), 1e-12)
          << omega << ' ' << s << ' ' << t;
    }
  }
}

TEST(BuildEigenvector, CoefficientStructureAndDecay) {
  const EigenData d = make_eigen_data(kPi / 2, 1, -1, cplx(0.3, 0.4));
  const SpinorField e = build_eigenvector(d, 40);
  EXPECT_EQ(e.at(0)[0], d.phi_L0);
  EXPECT_EQ(e.at(0)[1], d.phi_R0);
  const double ratio = 1.0 / std::sqrt(3.0);
  for (std::int64_t j = 1; j < 40; ++j) {
    EXPECT_NEAR(std::abs(e.at(j + 1)[0] / e.at(j)[0]), ratio, 1e-12);
    EXPECT_NEAR(std::abs(e.at(-j - 1)[1] / e.at(-j)[1]), ratio, 1e-12);
    // Right of the origin both chiralities follow -γ, left of it +γ.
    EXPECT_LE(std::abs(e.at(j + 1)[1] / e.at(j)[1] + d.gamma_root), 1e-12);
    EXPECT_LE(std::abs(e.at(-j - 1)[0] / e.at(-j)[0] - d.gamma_root), 1e-12);
  }
}

TEST(BuildEigenvector, WrongOriginRatioIsNotAnEigenvector) {
  const double omega = kPi;
  const WalkConfig config = phase_defect::config(omega);
  EigenData d = make_eigen_data(omega, 1, 1);
  d.phi_R0 *= cplx(0.0, 1.0);
  EXPECT_GT(eigen_residual(build_eigenvector(d, 50), config, d.eta), 1e-3);
}

TEST(StationaryState, MatchesBuiltEigenvector) {
  for (double omega : kOmegas)
    for (const auto& [s, t] : kBranches) {
      const EigenData d = make_eigen_data(omega, s, t);
      const SpinorField a = stationary_state(omega, s, t, d.phi_L0, d.phi_R0, 30);
      const SpinorField b = build_eigenvector(d, 30);
      for (std::int64_t x = -30; x <= 30; ++x) {
        EXPECT_LE(std::abs(a.at(x)[0] - b.at(x)[0]), 1e-12) << omega << ' ' << x;
        EXPECT_LE(std::abs(a.at(x)[1] - b.at(x)[1]), 1e-12) << omega << ' ' << x;
      }
    }
}

TEST(StationaryState, FreeRatioKeepsMeasureFormButNotEigen) {
  const double omega = 2.0;
  const SpinorField st = stationary_state(omega, -1, 1, cplx(0.1, 0.2), cplx(-0.5, 0.3), 30);
  const Measure mu = measure(st);
  for (std::int64_t x = -30; x <= 30; ++x)
    EXPECT_NEAR(mu.at(x), stationary_mass(omega, cplx(0.1, 0.2), cplx(-0.5, 0.3), x), 1e-14);
  EXPECT_GT(eigen_residual(st, phase_defect::config(omega), eigenvalue(omega, -1, 1)), 1e-3);
}

TEST(StationaryMeasure, HadamardUniform) {
  const double c = 0.37;
  const cplx phi = std::sqrt(c / 2);
  const Measure mu = stationary_measure(0.0, phi, phi * cplx(0.0, 1.0), 100);
  for (std::int64_t x = -100; x <= 100; ++x) EXPECT_NEAR(mu.at(x), c, 1e-15);
  for (const auto& [s, t] : kBranches) {
    const Measure m2 = measure(stationary_state(0.0, s, t, phi, -phi, 50));
    for (std::int64_t x = -50; x <= 50; ++x) EXPECT_NEAR(m2.at(x), c, 1e-14);
  }
}

TEST(StationaryMeasure, OmegaPiValues) {
  const double p = std::sqrt(0.16);
  EXPECT_NEAR(stationary_mass(kPi, p, p, 0), 0.32, 1e-15);
  EXPECT_NEAR(stationary_mass(kPi, p, p, 1), 0.192, 1e-15);
  EXPECT_NEAR(stationary_mass(kPi, p, p, -1), 0.192, 1e-15);
}

TEST(StationaryMeasure, InvariantUnderEvolution) {
  for (double omega : kOmegas) {
    const WalkConfig config = phase_defect::config(omega);
    for (const auto& [s, t] : kBranches) {
      const EigenData d = make_eigen_data(omega, s, t);
      const SpinorField e = build_eigenvector(d, 200);
      const Measure evolved = measure(evolve(e, config, 50));
      for (std::int64_t x = -150; x <= 150; ++x)
        EXPECT_NEAR(evolved.at(x), stationary_mass(omega, d.phi_L0, d.phi_R0, x), 1e-10);
    }
  }
}

TEST(StationaryMeasure, FixedPointOfTimeAveraging) {
  const double omega = 2.0;
  const WalkConfig config = phase_defect::config(omega);
  const EigenData d = make_eigen_data(omega, 1, -1);
  const Measure avg = time_average(build_eigenvector(d, 200), config, 40);
  for (std::int64_t x = -160; x <= 160; ++x)
    EXPECT_NEAR(avg.at(x), stationary_mass(omega, d.phi_L0, d.phi_R0, x), 1e-10);
}

TEST(StationaryMeasure, TotalMassConvergesGeometrically) {
  const double omega = kPi / 2;
  const cplx l(0.6, 0.0), r(0.0, 0.8);
  const double q = 1.0 / (3.0 - 2.0 * std::cos(omega));
  const double limit = 1.0 + 2.0 * (2.0 - std::cos(omega)) * (0.36 + 0.64) * q / (1.0 - q);
  for (std::int64_t X : {5, 10, 20, 40}) {
    const double total = stationary_measure(omega, l, r, X).total();
    EXPECT_NEAR(limit - total, 2.0 * (2.0 - std::cos(omega)) * std::pow(q, X + 1) / (1.0 - q),
                1e-12);
  }
}

TEST(ChiralityTimeAvg, Values) {
  const auto [l, r] = chirality_time_avg_at_origin(kPi);
  EXPECT_NEAR(l, 0.16, 1e-15);
  EXPECT_NEAR(r, 0.16, 1e-15);
  const auto [l0, r0] = chirality_time_avg_at_origin(0.0);
  EXPECT_EQ(l0, 0.0);
  EXPECT_EQ(r0, 0.0);
  for (double omega : kOmegas) {
    const auto [a, b] = chirality_time_avg_at_origin(omega);
    EXPECT_NEAR(a + b, time_avg_limit(phase_defect::config(omega), CoinState::symmetric(), 0),
                1e-15);
  }
}

TEST(ChiralityTimeAvg, MatchesEngine) {
  const TimeAverage avg = time_average_resolved(SpinorField::localized(0, CoinState::symmetric()),
                                                phase_defect::config(2.0), 5000);
  const auto [l, r] = chirality_time_avg_at_origin(2.0);
  EXPECT_NEAR(avg.left.at(0), l, 0.02);
  EXPECT_NEAR(avg.right.at(0), r, 0.02);
}

TEST(MatchTimeAverage, ClosedFormIdentity) {
  for (double omega : kOmegas) EXPECT_LE(match_time_average(omega).max_deviation, 1e-12) << omega;
  const MatchReport zero = match_time_average(0.0);
  EXPECT_EQ(zero.max_deviation, 0.0);
  EXPECT_EQ(zero.phi_L2, 0.0);
}

TEST(MatchTimeAverage, SpectralDecompositionOracle) {
  // μ̄∞(x) = Σ_η |⟨e_η, ψ⟩|² ‖e_η(x)‖² / ‖e_η‖⁴ over the four eigenvectors.
  const CoinState psi = CoinState::symmetric();
  for (double omega : kOmegas) {
    SpinorField start(-200, 200);
    start.set(0, psi.spinor());
    std::vector<SpinorField> vecs;
    for (const auto& [s, t] : kBranches) vecs.push_back(build_eigenvector(make_eigen_data(omega, s, t)));
    const WalkConfig config = phase_defect::config(omega);
    for (std::int64_t x = -20; x <= 20; ++x) {
      double mu = 0.0;
      for (const SpinorField& e : vecs) {
        const double n2 = e.norm2();
        const Spinor v = e.at(x);
        mu += std::norm(e.inner(start)) * (std::norm(v[0]) + std::norm(v[1])) / (n2 * n2);
      }
      EXPECT_NEAR(mu, time_avg_limit(config, psi, x), 1e-12) << omega << ' ' << x;
    }
  }
}

TEST(MassPoints, OmegaPi) {
  const MassPointReport r = mass_points_check(kPi);
  EXPECT_FALSE(r.skipped);
  EXPECT_LE(r.max_deviation, 1e-10);
  const cplx rotated = cplx(0.0, 1.0) * cplx(3.0, 1.0) / std::sqrt(10.0);
  EXPECT_LE(std::abs(rotated - cplx(-1.0, 3.0) / std::sqrt(10.0)), 1e-15);
  EXPECT_LE(std::abs(rotated - eigenvalue(kPi, -1, 1)), 1e-15);
}

TEST(MassPoints, GridAndSkip) {
  for (double omega : kOmegas) EXPECT_LE(mass_points_check(omega).max_deviation, 1e-10) << omega;
  EXPECT_TRUE(mass_points_check(0.0).skipped);
}

TEST(OrthogonalInitialState, OrthogonalToEigenvectors) {
  for (double omega : {kPi / 2, kPi}) {
    const SpinorField v = orthogonal_initial_state(omega);
    EXPECT_NEAR(v.norm2(), 1.0, 1e-12);
    for (const auto& [s, t] : kBranches) {
      SpinorField e = build_eigenvector(make_eigen_data(omega, s, t));
      EXPECT_LE(std::abs(e.inner(v)) / std::sqrt(e.norm2()), 1e-10);
    }
  }
}

TEST(OrthogonalInitialState, AvoidsLocalization) {
  const double omega = kPi;
  const WalkConfig config = phase_defect::config(omega);
  const Measure orth = time_average(orthogonal_initial_state(omega), config, 2000);
  EXPECT_LE(orth.at(0), 0.01);
  const Measure generic =
      time_average(SpinorField::localized(0, CoinState::symmetric()), config, 2000);
  EXPECT_NEAR(generic.at(0), 0.32, 0.02);
}
