#pragma once

// Generating functions Ξ̃ₓ(z) = Σₙ Ξ(x, n) zⁿ of the passage weights.
//
// Return-weight functions f̃⁺ₓ (excursions to the right of x) and f̃⁻ₓ
// (to the left) obey the continued fractions
//
//   f̃⁺ₓ = -(z² Δ_{x+1} / c_{x+1}) (1 - |a_{x+1}|² / (1 - c_{x+1} f̃⁺_{x+1}))
//   f̃⁻ₓ = -(z² Δ_{x-1} / b_{x-1}) (1 - |d_{x-1}|² / (1 - b_{x-1} f̃⁻_{x-1}))
//
// which close into a quadratic wherever the coin field is homogeneous. With
// u = 1 - c f̃⁺ = 1 - b f̃⁻ the quadratic is u² - (w² + 1) u + w²|a|² = 0 with
// w² = Δ z², so the bulk values need no square root of Δ. The two roots have
// λ̃ = z d / u of reciprocal modulus, so "|λ̃| < 1 inside the disk" picks the
// root of larger modulus pointwise.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <array>
#include <concepts>
#include <cstdint>
#include <vector>

#include "qwalk/walk.hpp"

namespace qwalk {

inline constexpr double kPoleTol = 1e-13;

/// Bulk boundary functions at one point. `w2` is Δ z².
struct BoundaryValues {
  cplx z;
  cplx w2;
  cplx f_plus;
  cplx f_minus;
  cplx lambda_plus;
  cplx lambda_minus;
};

/// Coin entries of a one-defect field over a complex type C; the single
/// non-bulk coin sits at `site`.
template <class C>
struct CoinField {
  BasicMat2<C> defect;
  BasicMat2<C> bulk;
  std::int64_t site = 0;

  const BasicMat2<C>& at(std::int64_t x) const { return x == site ? defect : bulk; }
  CoinField shifted(int by) const { return {defect, bulk, site + by}; }

  static CoinField from(const WalkConfig& config)
    requires std::same_as<C, cplx>
  {
    return {config.defect().matrix(), config.bulk().matrix(), config.defect_site()};
  }
};

namespace detail {

// Larger-modulus root of u² - (w² + 1) u + w² r² = 0, computed without
// cancellation.
template <class C, class R>
C bulk_u_root(const C& w2, const R& a2) {
  using std::abs;
  using std::sqrt;
  const C p = w2 + C(1.0);
  const C sq = sqrt(p * p - C(4.0) * w2 * C(a2));
  const C big1 = C(0.5) * (p + sq);
  const C big2 = C(0.5) * (p - sq);
  const C big = abs(big1) >= abs(big2) ? big1 : big2;
  if (abs(big) == 0) return big;
  const C small = w2 * C(a2) / big;
  const double gap = static_cast<double>(abs(big) - abs(small));
  if (gap <= 1e-14 * std::max(1.0, static_cast<double>(abs(big))))
    throw BranchAmbiguity("boundary root: both roots have equal modulus");
  return big;
}

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

/// Radial boundary value of √((w + w⁻¹)² - 4|a|²) at w = e^{iθ}, approached
/// from inside the disk.
inline cplx cgmv_sqrt_limit(double theta, double abs_a) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double a2 = abs_a * abs_a;
  if (abs_a <= std::abs(ct))
    return 2.0 * detail::sgn(ct) * std::sqrt(std::max(0.0, (1.0 - a2) - st * st));
  return cplx(0.0, -2.0 * detail::sgn(st) * std::sqrt(std::max(0.0, a2 - ct * ct)));
}

/// Generating functions of a walk at a fixed z (or a fixed radial limit on
/// the unit circle). Works for any single-defect field wherever the defect
/// sits, which covers both the walk and its coin-shifted copy.
template <class C>
class BasicGeneratingFunctions {
 public:
  using Matrix = BasicMat2<C>;
  using Vec = std::array<C, 2>;

  /// |z| < 1.
  static BasicGeneratingFunctions at(const CoinField<C>& field, const C& z) {
    using std::abs;
    using std::norm;
    if (!(abs(z) < 1))
      throw BranchAmbiguity("generating functions: |z| >= 1 needs an approach direction");
    const C w2 = field.bulk.det() * z * z;
    return BasicGeneratingFunctions(field, z, w2, detail::bulk_u_root(w2, norm(field.bulk.a)));
  }

  static BasicGeneratingFunctions at(const WalkConfig& config, cplx z)
    requires std::same_as<C, cplx>
  {
    return at(CoinField<C>::from(config), z);
  }

  /// Radial limit at w = Δ^{1/2} z = e^{iθ} (principal Δ^{1/2}).
  static BasicGeneratingFunctions radial_limit(const WalkConfig& config, double theta)
    requires std::same_as<C, cplx>
  {
    const Mat2& u = config.bulk().matrix();
    const cplx w = std::polar(1.0, theta);
    const cplx z = w / std::sqrt(u.det());
    const cplx s = cgmv_sqrt_limit(theta, std::abs(u.a));
    const cplx root = 0.5 * w * (2.0 * std::cos(theta) + s);
    return BasicGeneratingFunctions(CoinField<C>::from(config), z, w * w, root);
  }

  C z() const { return z_; }
  C w2() const { return w2_; }
  C bulk_f_plus() const { return f_bulk_plus_; }
  C bulk_f_minus() const { return f_bulk_minus_; }
  C bulk_lambda_plus() const { return z_ * field_.bulk.d / u_root_; }
  C bulk_lambda_minus() const { return z_ * field_.bulk.a / u_root_; }

  C f_plus(std::int64_t x) const {
    C f = f_bulk_plus_;
    for (std::int64_t y = field_.site; y > x; --y) f = plus_fraction(field_.at(y), f);
    return f;
  }

  C f_minus(std::int64_t x) const {
    C f = f_bulk_minus_;
    for (std::int64_t y = field_.site; y < x; ++y) f = minus_fraction(field_.at(y), f);
    return f;
  }

  C lambda_plus(std::int64_t x) const {
    const Matrix& u = field_.at(x);
    return z_ * u.d / (C(1.0) - u.c * f_plus(x));
  }

  C lambda_minus(std::int64_t x) const {
    const Matrix& u = field_.at(x);
    return z_ * u.a / (C(1.0) - u.b * f_minus(x));
  }

  /// Λ̃₀ = 1 - c₀f̃⁺₀ - b₀f̃⁻₀ - Δ₀f̃⁺₀f̃⁻₀.
  C lambda0() const {
    const Matrix& u0 = field_.at(0);
    const C fp = f_plus(0), fm = f_minus(0);
    return C(1.0) - u0.c * fp - u0.b * fm - u0.det() * fp * fm;
  }

  Matrix xi0() const {
    using std::abs;
    const C lam = lambda0();
    if (abs(lam) < kPoleTol) throw PoleHit("xi0: Lambda0 vanishes");
    const Matrix& u0 = field_.at(0);
    const C fp = f_plus(0), fm = f_minus(0);
    return (C(1.0) / lam) * Matrix{C(1.0) - u0.b * fm, u0.d * fp, u0.a * fm, C(1.0) - u0.c * fp};
  }

  /// Ξ̃ₓ. For x ≥ 1 it is λ̃⁺_{x-1}⋯λ̃⁺₁ ᵀ[λ̃⁺ₓ f̃⁺ₓ, z] [c₀, d₀] Ξ̃₀, and the
  /// mirror image with λ̃⁻ and [a₀, b₀] for x ≤ -1.
  Matrix xi(std::int64_t x) const {
    if (x == 0) return xi0();
    const Matrix& u0 = field_.at(0);
    const Matrix base = xi0();
    C prefactor(1.0);
    if (x > 0) {
      for (std::int64_t y = 1; y < x; ++y) prefactor *= lambda_plus(y);
      const Vec column{lambda_plus(x) * f_plus(x), z_};
      return prefactor * (outer(column, Vec{u0.c, u0.d}) * base);
    }
    for (std::int64_t y = x + 1; y <= -1; ++y) prefactor *= lambda_minus(y);
    const Vec column{z_, lambda_minus(x) * f_minus(x)};
    return prefactor * (outer(column, Vec{u0.a, u0.b}) * base);
  }

 private:
  BasicGeneratingFunctions(const CoinField<C>& field, C z, C w2, C u_root)
      : field_(field), z_(z), w2_(w2), u_root_(u_root) {
    f_bulk_plus_ = (C(1.0) - u_root) / field.bulk.c;
    f_bulk_minus_ = (C(1.0) - u_root) / field.bulk.b;
  }

  C plus_fraction(const Matrix& next, const C& f_next) const {
    using std::norm;
    return -(z_ * z_ * next.det() / next.c) *
           (C(1.0) - C(norm(next.a)) / (C(1.0) - next.c * f_next));
  }
  C minus_fraction(const Matrix& prev, const C& f_prev) const {
    using std::norm;
    return -(z_ * z_ * prev.det() / prev.b) *
           (C(1.0) - C(norm(prev.d)) / (C(1.0) - prev.b * f_prev));
  }

  CoinField<C> field_;
  C z_;
  C w2_;
  C u_root_;
  C f_bulk_plus_;
  C f_bulk_minus_;
};

using GeneratingFunctions = BasicGeneratingFunctions<cplx>;

inline BoundaryValues values_of(const GeneratingFunctions& gf) {
  return {gf.z(), gf.w2(), gf.bulk_f_plus(), gf.bulk_f_minus(), gf.bulk_lambda_plus(),
          gf.bulk_lambda_minus()};
}

inline BoundaryValues eval_boundary(const WalkConfig& config, cplx z) {
  return values_of(GeneratingFunctions::at(config, z));
}

/// Bulk values at the radial limit toward w = e^{iθ}.
inline BoundaryValues eval_boundary_limit(const WalkConfig& config, double theta) {
  return values_of(GeneratingFunctions::radial_limit(config, theta));
}

/// Residuals of the two quadratics the bulk functions satisfy:
/// f² + w(w - w⁻¹)/c f - w²(|c|/c)² and the f̃⁻ analogue with b.
struct QuadraticResiduals {
  double plus;
  double minus;
};

inline QuadraticResiduals quadratic_residuals(const WalkConfig& config, const BoundaryValues& v) {
  const CoinMatrix& u = config.bulk();
  // w(w - w⁻¹) = w² - 1.
  const cplx fp = v.f_plus, fm = v.f_minus;
  const cplx rp = fp * fp + (v.w2 - 1.0) / u.c() * fp - v.w2 * std::norm(u.c()) / (u.c() * u.c());
  const cplx rm = fm * fm + (v.w2 - 1.0) / u.b() * fm - v.w2 * std::norm(u.b()) / (u.b() * u.b());
  return {std::abs(rp), std::abs(rm)};
}

inline Mat2 xi0_generating(const WalkConfig& config, cplx z) {
  return GeneratingFunctions::at(config, z).xi0();
}

inline Mat2 xi_x_generating(const WalkConfig& config, std::int64_t x, cplx z) {
  return GeneratingFunctions::at(config, z).xi(x);
}

/// Taylor coefficients c₀..c_{n_max} of an analytic Mat2-valued function by
/// discrete Fourier inversion on the circle |z| = radius.
inline std::vector<Mat2> taylor_coefficients(const std::function<Mat2(cplx)>& fn, int n_max,
                                             double radius = 0.8, int samples = 256) {
  if (n_max < 0 || n_max >= samples)
    throw PreconditionError("n_max", "must lie in [0, samples)");
  std::vector<Mat2> values(static_cast<std::size_t>(samples));
  std::vector<cplx> nodes(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    nodes[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
    values[k] = fn(radius * nodes[k]);
  }
  std::vector<Mat2> coeffs(static_cast<std::size_t>(n_max + 1));
  for (int n = 0; n <= n_max; ++n) {
    Mat2 acc = Mat2::zero();
    for (int k = 0; k < samples; ++k) acc += std::pow(std::conj(nodes[k]), n) * values[k];
    coeffs[n] = (std::pow(radius, -n) / samples) * acc;
  }
  return coeffs;
}

// ---------------------------------------------------------------------------
// Unit-circle poles

struct PoleSet {
  /// Empty when |c|² ≤ m (no localization).
  std::vector<cplx> points;  // w₊, -w₊, w₋, -w₋ in the w = Δ^{1/2} z variable
  double gamma = 0.0;        // cos γ = -m/|c|
  double m = 0.0;

  bool localized() const { return !points.empty(); }
};

/// m = Re(c̄ c₀) for the bulk coefficient c and the defect coefficient c₀.
inline double localization_m(const WalkConfig& config) {
  return (std::conj(config.bulk().c()) * config.coin_at(0).c()).real();
}

inline PoleSet find_poles(const WalkConfig& config) {
  if (!config.determinants_match())
    throw DeterminantMismatch("find_poles: needs det(U0) == det(U)");
  PoleSet set;
  set.m = localization_m(config);
  const double abs_c = std::abs(config.bulk().c());
  if (!(abs_c * abs_c > set.m)) return set;
  set.gamma = std::acos(std::clamp(-set.m / abs_c, -1.0, 1.0));
  const cplx plus = 1.0 + abs_c * std::polar(1.0, set.gamma);
  const cplx minus = 1.0 + abs_c * std::polar(1.0, -set.gamma);
  const cplx wp = plus / std::abs(plus), wm = minus / std::abs(minus);
  set.points = {wp, -wp, wm, -wm};
  return set;
}

/// Λ̃₀ at the radial limit toward a unit-modulus w.
inline cplx lambda0_limit(const WalkConfig& config, cplx w) {
  return GeneratingFunctions::radial_limit(config, std::arg(w)).lambda0();
}

}  // namespace qwalk
