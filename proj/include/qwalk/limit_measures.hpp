#pragma once

// Closed-form limit laws of the one-defect walk started at the origin: the
// time-averaged limit measure, the localized mass C, and the weak-limit
// density ρ(x) = C δ₀(x) + w(x) ballistic_density(x; |a|).

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "qwalk/walk.hpp"

namespace qwalk {

// |c|² - m below this counts as "no localization".
inline constexpr double kLocalizationTol = 1e-12;

/// Ballistic density √(1 - r²) / (π (1 - x²) √(r² - x²)) on (-r, r); +∞ at the
/// endpoints and 0 outside.
inline double ballistic_density(double x, double r) {
  if (!(r > 0.0 && r < 1.0)) throw PreconditionError("r", "need 0 < r < 1");
  const double ax = std::abs(x);
  if (ax > r) return 0.0;
  if (ax == r) return std::numeric_limits<double>::infinity();
  return std::sqrt(1.0 - r * r) / (std::numbers::pi * (1.0 - x * x) * std::sqrt(r * r - x * x));
}

struct DerivedParams {
  double m = 0.0;       // Re(c̄ c₀)
  double loc_c2 = 0.0;  // |c|²
  double loc_a2 = 0.0;  // |a|²
  double denom = 0.0;   // 1 - 2m + |c|²
  cplx delta;
  cplx delta0;

  bool localized() const { return loc_c2 - m > kLocalizationTol; }
};

inline DerivedParams derived_params(const WalkConfig& config) {
  if (config.defect_site() != 0)
    throw PreconditionError("config", "closed forms need the defect at the origin");
  if (!config.determinants_match())
    throw DeterminantMismatch("closed-form measures need det(U0) == det(U)");
  const CoinMatrix& u = config.bulk();
  const CoinMatrix& u0 = config.defect();
  DerivedParams p;
  p.m = (std::conj(u.c()) * u0.c()).real();
  p.loc_c2 = std::norm(u.c());
  p.loc_a2 = std::norm(u.a());
  p.denom = 1.0 - 2.0 * p.m + p.loc_c2;
  p.delta = u.det();
  p.delta0 = u0.det();
  return p;
}

namespace detail {

struct TimeAvgPieces {
  double origin = 0.0;  // μ̄(0)
  double scale = 0.0;   // |c|²(1-m) / ((|c|²-m²) D)
  double ratio = 0.0;   // |a|² / D
  double right = 0.0;   // side bracket, x ≥ 1
  double left = 0.0;    // side bracket, x ≤ -1
};

inline TimeAvgPieces time_avg_pieces(const WalkConfig& config, const CoinState& psi0) {
  const DerivedParams p = derived_params(config);
  TimeAvgPieces t;
  if (!p.localized()) return t;
  const double g = 2.0 * (p.loc_c2 - p.m) / p.denom;
  t.origin = 0.5 * g * g;
  t.scale = p.loc_c2 * (1.0 - p.m) / ((p.loc_c2 - p.m * p.m) * p.denom);
  t.ratio = p.loc_a2 / p.denom;
  const CoinMatrix& u = config.bulk();
  const CoinMatrix& u0 = config.defect();
  const double a2 = std::norm(psi0.alpha()), b2 = std::norm(psi0.beta());
  const double diag = 1.0 + std::norm(u0.c()) - 2.0 * p.m * p.m / p.loc_c2;
  const double cross = 2.0 * (psi0.alpha() * std::conj(psi0.beta()) * std::conj(u0.d()) *
                              (u0.c() - p.m / std::conj(u.c())))
                                 .real();
  t.right = diag * a2 + std::norm(u0.a()) * b2 + cross;
  t.left = diag * b2 + std::norm(u0.a()) * a2 - cross;
  return t;
}

}  // namespace detail

/// lim_T (1/T) Σ_{n<T} μₙ(x) for the walk started at δ₀ ⊗ ψ₀.
inline double time_avg_limit(const WalkConfig& config, const CoinState& psi0, std::int64_t x) {
  const detail::TimeAvgPieces t = detail::time_avg_pieces(config, psi0);
  if (x == 0) return t.origin;
  const double side = x > 0 ? t.right : t.left;
  return t.origin * t.scale * std::pow(t.ratio, static_cast<double>(std::abs(x) - 1)) * side;
}

/// C = Σₓ μ̄(x), summing the two geometric tails in closed form.
inline double localized_mass(const WalkConfig& config, const CoinState& psi0) {
  const detail::TimeAvgPieces t = detail::time_avg_pieces(config, psi0);
  if (t.origin == 0.0) return 0.0;
  return t.origin * (1.0 + t.scale * (t.right + t.left) / (1.0 - t.ratio));
}

/// Σ_{|x| ≤ X} μ̄(x), term by term.
inline double localized_mass_by_summation(const WalkConfig& config, const CoinState& psi0,
                                          std::int64_t X = 200) {
  double total = 0.0;
  for (std::int64_t x = -X; x <= X; ++x) total += time_avg_limit(config, psi0, x);
  return total;
}

/// Cross term in the linear part of w(x): 2Re(a₀α conj(b₀β)) for kDefect,
/// 2Re(aα conj(bβ)) for kBulk. Only kDefect matches the walk in general; the
/// two agree e.g. for the symmetric state at ω = π.
enum class DriftCoefficient { kDefect, kBulk };

/// ρ(x) = C δ₀(x) + w(x) ballistic_density(x; r), r = |a|.
class WeakLimitDensity {
 public:
  WeakLimitDensity(const WalkConfig& config, const CoinState& psi0,
                   DriftCoefficient drift = DriftCoefficient::kDefect)
      : params_(derived_params(config)), psi0_(psi0) {
    atom_ = localized_mass(config, psi0);
    radius_ = std::abs(config.bulk().a());
    const CoinMatrix& u = config.bulk();
    const CoinMatrix& u0 = config.defect();
    const cplx alpha = psi0.alpha(), beta = psi0.beta();
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    const double a02 = std::norm(u0.a());
    const double diag = 1.0 - 2.0 * params_.m + std::norm(u0.c());
    const double cross = 2.0 * (u0.a() * alpha * std::conj((u.b() - u0.b()) * beta)).real();
    gamma_right_ = a2 * diag + b2 * a02 + cross;
    gamma_left_ = b2 * diag + a2 * a02 - cross;
    const cplx ca = drift == DriftCoefficient::kDefect ? u0.a() : u.a();
    const cplx cb = drift == DriftCoefficient::kDefect ? u0.b() : u.b();
    slope_ = a02 * (a2 - b2) + 2.0 * (ca * alpha * std::conj(cb * beta)).real();
  }

  double atom_mass() const { return atom_; }
  double radius() const { return radius_; }
  const CoinState& psi0() const { return psi0_; }
  const DerivedParams& params() const { return params_; }

  double gamma(double x) const { return x >= 0.0 ? gamma_right_ : gamma_left_; }

  /// Rational weight w(x); exactly 0 at x = 0.
  double w(double x) const {
    if (x == 0.0) return 0.0;
    const double c2 = params_.loc_c2, m = params_.m;
    const double x2 = x * x;
    const double pre = c2 * x2 / ((c2 - m) * (c2 - m) + (c2 - m * m) * x2);
    return pre * (gamma(x) - slope_ * x);
  }

  /// Continuous part w(x) ballistic_density(x; r).
  double continuous(double x) const {
    const double f = ballistic_density(x, radius_);
    if (f == 0.0) return 0.0;
    return w(x) * f;
  }

  /// ∫_{lo}^{hi} w ballistic_density over [lo, hi] ∩ (-r, r), after x = r sin t.
  double integrate(double lo, double hi) const {
    const double r = radius_;
    lo = std::max(lo, -r);
    hi = std::min(hi, r);
    if (!(hi > lo)) return 0.0;
    const double t_lo = std::asin(std::clamp(lo / r, -1.0, 1.0));
    const double t_hi = std::asin(std::clamp(hi / r, -1.0, 1.0));
    const double k = std::sqrt(1.0 - r * r) / std::numbers::pi;
    const auto integrand = [&](double t) {
      const double s = std::sin(t);
      return w(r * s) * k / (1.0 - r * r * s * s);
    };
    return graded(integrand, t_lo, t_hi);
  }

  double continuous_mass() const { return integrate(-radius_, radius_); }

  /// P(Z ≤ y).
  double cdf(double y) const {
    if (!(y >= -1.0 && y <= 1.0)) throw PreconditionError("y", "must lie in [-1, 1]");
    return (y >= 0.0 ? atom_ : 0.0) + integrate(-radius_, y);
  }

 private:
  static constexpr int kLevels = 52;
  static constexpr int kSubpanels = 4;
  using Rule = boost::math::quadrature::gauss<double, 20>;

  // Composite Gauss-Legendre on [a, b] ⊂ [-π/2, π/2] over the dyadic levels
  // ±(π/2)[2^{-k-1}, 2^{-k}]. Near the localization threshold w ramps up over
  // a width ~ |c|² - m around t = 0, and the grading resolves it; t = 0 (the
  // branch switch of w) is always a panel boundary.
  template <class F>
  static double graded(const F& f, double a, double b) {
    const double half_pi = std::numbers::pi / 2;
    double total = 0.0;
    for (const double side : {-1.0, 1.0})
      for (int k = 0; k < kLevels; ++k) {
        const double outer = half_pi * std::ldexp(1.0, -k);
        const double inner = k + 1 == kLevels ? 0.0 : outer / 2;
        const double lo = std::max(a, side > 0 ? inner : -outer);
        const double hi = std::min(b, side > 0 ? outer : -inner);
        if (!(hi > lo)) continue;
        const double h = (hi - lo) / kSubpanels;
        for (int i = 0; i < kSubpanels; ++i)
          total += Rule::integrate(f, lo + i * h, lo + (i + 1) * h);
      }
    return total;
  }

  DerivedParams params_;
  CoinState psi0_;
  double atom_ = 0.0;
  double radius_ = 0.0;
  double gamma_right_ = 0.0;
  double gamma_left_ = 0.0;
  double slope_ = 0.0;
};

inline WeakLimitDensity weak_density(const WalkConfig& config, const CoinState& psi0,
                                     DriftCoefficient drift = DriftCoefficient::kDefect) {
  return WeakLimitDensity(config, psi0, drift);
}

inline double weak_cdf(const WeakLimitDensity& density, double y) { return density.cdf(y); }

/// Closed forms for Hadamard bulk, defect U(0, ω) and ψ₀ = ᵀ[1/√2, i/√2].
namespace phase_defect {

inline WalkConfig config(double omega) {
  return WalkConfig(make_coin(CoinAngles(0.0, omega)), hadamard());
}

inline bool localized(double omega) { return 1.0 - std::cos(omega) > kLocalizationTol; }

inline double time_avg(double omega, std::int64_t x) {
  if (!localized(omega)) return 0.0;
  const double cw = std::cos(omega), sw = std::sin(omega);
  const double g = (1.0 - cw) / (3.0 - 2.0 * cw);
  const double origin = 2.0 * g * g;
  if (x == 0) return origin;
  const double tilt = sw / (1.0 + sw * sw);
  const double side = x > 0 ? 1.0 + tilt : 1.0 - tilt;
  return origin * (2.0 - cw) / std::pow(3.0 - 2.0 * cw, static_cast<double>(std::abs(x))) * side;
}

/// Σₓ of time_avg: 2(1 - cos ω) / (3 - 2cos ω).
inline double atom_mass(double omega) {
  if (!localized(omega)) return 0.0;
  const double cw = std::cos(omega);
  return 2.0 * (1.0 - cw) / (3.0 - 2.0 * cw);
}

inline double weight(double omega, double x) {
  if (x == 0.0) return 0.0;
  const double cw = std::cos(omega), sw = std::sin(omega);
  const double sgn = x > 0.0 ? 1.0 : -1.0;
  const double num = (2.0 - cw + sgn * sw + sw * x) * x * x;
  return num / ((1.0 - cw) * (1.0 - cw) + (2.0 - cw * cw) * x * x);
}

}  // namespace phase_defect

}  // namespace qwalk
