#pragma once

// The ten end-to-end verification criteria. Each runner returns one result
// made of named checks; a criterion passes when all of its checks do.

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qwalk/caratheodory.hpp"
#include "qwalk/generating.hpp"
#include "qwalk/limit_measures.hpp"
#include "qwalk/path_oracle.hpp"
#include "qwalk/stationary.hpp"
#include "qwalk/walk.hpp"

namespace qwalk::acceptance {

struct Check {
  std::string label;
  double target = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool pass() const {
    for (const Check& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }

  /// The check closest to (or furthest past) its tolerance.
  const Check& worst() const {
    std::size_t best = 0;
    double score = -1.0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const Check& c = checks[i];
      const double s = c.pass ? std::abs(c.measured - c.target) / c.tolerance
                              : std::numeric_limits<double>::infinity();
      if (s > score) {
        score = s;
        best = i;
      }
    }
    return checks[best];
  }
};

/// |measured - target| ≤ tolerance.
inline Check near(std::string label, double target, double measured, double tolerance) {
  return {std::move(label), target, measured, tolerance,
          std::abs(measured - target) <= tolerance};
}

/// measured ≤ bound (reported with target 0).
inline Check below(std::string label, double measured, double bound) {
  return {std::move(label), 0.0, measured, bound, measured <= bound};
}

inline constexpr std::uint32_t kSeed = 20240917u;

inline CoinMatrix random_coin(std::mt19937& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  return make_coin(CoinAngles(angle(rng), angle(rng)));
}

inline CoinState random_state(std::mt19937& rng) {
  std::normal_distribution<double> g;
  const cplx a(g(rng), g(rng)), b(g(rng), g(rng));
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return CoinState(a / n, b / n);
}

namespace detail {

inline std::vector<WalkConfig> oracle_configs() {
  const double pi = std::numbers::pi;
  std::mt19937 rng(kSeed);
  std::vector<CoinMatrix> bulks{hadamard()};
  for (int i = 0; i < 3; ++i) bulks.push_back(random_coin(rng));
  std::vector<WalkConfig> out;
  for (double omega : {0.0, pi / 4, pi / 2, pi})
    for (const CoinMatrix& bulk : bulks) out.emplace_back(make_coin(CoinAngles(0.0, omega)), bulk);
  return out;
}

template <class F>
CriterionResult timed(int id, std::string name, F&& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  body(r.checks);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline void add_runtime(CriterionResult& r, double limit) {
  r.checks.push_back(below("runtime seconds", r.seconds, limit));
}

}  // namespace detail

inline CriterionResult oracle_equivalence() {
  CriterionResult r = detail::timed(1, "oracle", [](std::vector<Check>& checks) {
    double worst = 0.0;
    for (const WalkConfig& config : detail::oracle_configs())
      for (std::int64_t n = 0; n <= 12; ++n) {
        const std::vector<Mat2> row = xi_row_via_engine(n, config);
        for (std::int64_t x = -n; x <= n; ++x) {
          const Mat2 brute = enumerate_xi(x, n, config).weight;
          worst = std::max(worst, max_abs_diff(brute, row[static_cast<std::size_t>(x + n)]));
        }
      }
    checks.push_back(below("max |enumerate_xi - engine|", worst, 1e-12));
  });
  detail::add_runtime(r, 10.0);
  return r;
}

inline CriterionResult generating_series() {
  CriterionResult r = detail::timed(2, "series", [](std::vector<Check>& checks) {
    double series = 0.0;
    for (const WalkConfig& config : detail::oracle_configs()) {
      std::vector<std::vector<Mat2>> rows;
      for (std::int64_t n = 0; n <= 20; ++n) rows.push_back(xi_row_via_engine(n, config));
      for (std::int64_t x = -3; x <= 3; ++x) {
        const std::vector<Mat2> coeffs =
            taylor_coefficients([&](cplx z) { return xi_x_generating(config, x, z); }, 20);
        for (std::int64_t n = 0; n <= 20; ++n) {
          const Mat2 engine = std::abs(x) <= n ? rows[n][static_cast<std::size_t>(x + n)]
                                               : Mat2::zero();
          series = std::max(series, max_abs_diff(coeffs[n], engine));
        }
      }
    }
    checks.push_back(below("max |Taylor coefficient - engine|", series, 1e-10));

    std::mt19937 rng(kSeed + 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::vector<WalkConfig> configs = detail::oracle_configs();
    double residual = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const WalkConfig& config = configs[static_cast<std::size_t>(i) % configs.size()];
      const cplx z = std::polar(0.999 * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
      const QuadraticResiduals q = quadratic_residuals(config, eval_boundary(config, z));
      residual = std::max({residual, q.plus, q.minus});
    }
    checks.push_back(below("max quadratic residual (1000 points)", residual, 1e-10));
  });
  detail::add_runtime(r, 10.0);
  return r;
}

inline CriterionResult localization_value() {
  CriterionResult r = detail::timed(3, "localization", [](std::vector<Check>& checks) {
    const TimeAverage avg = time_average_resolved(
        SpinorField::localized(0, CoinState::symmetric()), phase_defect::config(std::numbers::pi),
        5000);
    checks.push_back(near("mu_T(0)", 0.32, avg.total.at(0), 0.02));
    checks.push_back(near("mu_T(1)", 0.192, avg.total.at(1), 0.02));
    checks.push_back(near("mu_T(-1)", 0.192, avg.total.at(-1), 0.02));
  });
  detail::add_runtime(r, 60.0);
  return r;
}

inline CriterionResult no_defect_null() {
  return detail::timed(4, "null", [](std::vector<Check>& checks) {
    const Measure avg = time_average(SpinorField::localized(0, CoinState::symmetric()),
                                     phase_defect::config(0.0), 5000);
    checks.push_back(below("mu_T(0) without defect", avg.at(0), 0.02));
  });
}

inline CriterionResult weak_normalization() {
  return detail::timed(5, "normalization", [](std::vector<Check>& checks) {
    std::mt19937 rng(kSeed + 5);
    std::vector<CoinState> states{CoinState::symmetric()};
    for (int i = 0; i < 10; ++i) states.push_back(random_state(rng));
    double worst = 0.0;
    for (int k = 1; k <= 15; ++k) {
      const WalkConfig config = phase_defect::config(k * std::numbers::pi / 8);
      for (const CoinState& s : states) {
        const WeakLimitDensity d = weak_density(config, s);
        worst = std::max(worst, std::abs(d.atom_mass() + d.continuous_mass() - 1.0));
      }
    }
    checks.push_back(below("max |C + continuous mass - 1|", worst, 1e-6));
    const WeakLimitDensity pi_case =
        weak_density(phase_defect::config(std::numbers::pi), CoinState::symmetric());
    checks.push_back(near("C at omega=pi", 0.8, pi_case.atom_mass(), 1e-12));
    checks.push_back(near("continuous mass at omega=pi", 0.2, pi_case.continuous_mass(), 1e-6));
  });
}

inline const std::vector<double>& weak_test_points() {
  static const std::vector<double> points{-0.6, -0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4, 0.6};
  return points;
}

inline CriterionResult weak_convergence() {
  CriterionResult r = detail::timed(6, "weak", [](std::vector<Check>& checks) {
    const WalkConfig config = phase_defect::config(std::numbers::pi);
    const CoinState psi0 = CoinState::symmetric();
    const std::vector<double>& points = weak_test_points();
    const std::vector<double> empirical =
        rescaled_empirical_cdf(SpinorField::localized(0, psi0), config, 2000, points);
    const WeakLimitDensity d = weak_density(config, psi0);
    double sup = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      sup = std::max(sup, std::abs(empirical[i] - d.cdf(points[i])));
    checks.push_back(below("sup |empirical CDF - weak_cdf|", sup, 0.03));
  });
  detail::add_runtime(r, 30.0);
  return r;
}

inline CriterionResult stationary_suite() {
  return detail::timed(7, "stationary", [](std::vector<Check>& checks) {
    const std::int64_t W = kDefaultEigenWindow, steps = 50;
    double eigen = 0.0, invariance = 0.0, identity = 0.0;
    for (double omega : {std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi}) {
      const WalkConfig config = phase_defect::config(omega);
      for (const auto& [sigma, tau] : kBranches) {
        const EigenData d = make_eigen_data(omega, sigma, tau);
        const SpinorField e = build_eigenvector(d, W);
        const SpinorField next = step(e, config);
        for (std::int64_t x = -W + 1; x <= W - 1; ++x) {
          const Spinor a = next.at(x), b = e.at(x);
          eigen = std::max({eigen, std::abs(a[0] - d.eta * b[0]), std::abs(a[1] - d.eta * b[1])});
        }
        const Measure before = measure(e);
        const Measure after = measure(evolve(e, config, steps));
        for (std::int64_t x = -W + steps; x <= W - steps; ++x)
          invariance = std::max(invariance, std::abs(after.at(x) - before.at(x)));
      }
      identity = std::max(identity, match_time_average(omega, 50).max_deviation);
    }
    checks.push_back(below("eigen-equation residual", eigen, 1e-12));
    checks.push_back(below("stationary measure drift after 50 steps", invariance, 1e-10));
    checks.push_back(below("stationary vs time-averaged limit", identity, 1e-12));

    // Hadamard walk: |φᴸ|² = |φᴿ|² = 1/2 gives the uniform measure μ ≡ 1.
    const double s = 1.0 / std::numbers::sqrt2;
    double uniform = 0.0;
    for (const auto& [sigma, tau] : kBranches) {
      const SpinorField h = stationary_state(0.0, sigma, tau, s, cplx(0.0, -sigma * tau * s), W);
      const Measure mu = measure(evolve(h, phase_defect::config(0.0), steps));
      for (std::int64_t x = -W + steps; x <= W - steps; ++x)
        uniform = std::max({uniform, std::abs(mu.at(x) - 1.0),
                            std::abs(stationary_mass(0.0, s, cplx(0.0, s), x) - 1.0)});
    }
    checks.push_back(below("Hadamard uniform measure deviation", uniform, 1e-12));
  });
}

inline CriterionResult mass_point_identity() {
  return detail::timed(8, "mass-points", [](std::vector<Check>& checks) {
    for (double omega : {std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi}) {
      const MassPointReport rep = mass_points_check(omega);
      checks.push_back(below("set distance i*S vs E at omega=" + std::to_string(omega),
                             rep.skipped ? 1.0 : rep.max_deviation, 1e-10));
    }
  });
}

inline CriterionResult caratheodory_consistency() {
  return detail::timed(9, "caratheodory", [](std::vector<Check>& checks) {
    const int N = 60;
    const cplx b(0.5, 0.5);
    const CoinAngles defect(0.0, std::numbers::pi), bulk(0.0, 0.0);
    for (const cplx z : {cplx(0.4, 0.0), cplx(0.0, 0.4), cplx(-0.3, 0.3)}) {
      const double bound = 2.0 * std::pow(std::abs(z), N + 1) / (1.0 - std::abs(z));
      const std::string at = " z=(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")";
      checks.push_back(below("semi-infinite" + at, caratheodory_semi_infinite(b, z, N).residual,
                             bound));
      checks.push_back(below("doubly infinite" + at,
                             caratheodory_doubly_infinite(defect, bulk, z, N).residual, bound));
    }
  });
}

inline CriterionResult delocalization() {
  return detail::timed(10, "delocalization", [](std::vector<Check>& checks) {
    const double omega = std::numbers::pi;
    const WalkConfig config = phase_defect::config(omega);
    const Measure orth = time_average(orthogonal_initial_state(omega), config, 2000);
    const Measure generic =
        time_average(SpinorField::localized(0, CoinState::symmetric()), config, 2000);
    checks.push_back(below("orthogonal state mu_T(0)", orth.at(0), 0.01));
    checks.push_back(near("origin state mu_T(0)", 0.32, generic.at(0), 0.02));
  });
}

struct Criterion {
  int id;
  const char* name;
  CriterionResult (*run)();
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "oracle", oracle_equivalence},        {2, "series", generating_series},
      {3, "localization", localization_value},  {4, "null", no_defect_null},
      {5, "normalization", weak_normalization}, {6, "weak", weak_convergence},
      {7, "stationary", stationary_suite},      {8, "mass-points", mass_point_identity},
      {9, "caratheodory", caratheodory_consistency}, {10, "delocalization", delocalization}};
  return all;
}

/// Criterion by name or number; nullptr if unknown.
inline const Criterion* find_criterion(const std::string& key) {
  for (const Criterion& c : criteria())
    if (key == c.name || key == std::to_string(c.id)) return &c;
  return nullptr;
}

}  // namespace qwalk::acceptance
