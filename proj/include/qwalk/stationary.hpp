#pragma once

// Eigenvectors and stationary measures for the Hadamard walk with defect coin
// U₀ = (1/√2)[[1, e^{iω}], [e^{-iω}, -1]] at the origin.
//
// Eigenvalues: η = (σ√(2 - cos²ω) + τ i (2 - cos ω)) / (√2 √(3 - 2cos ω)).
// Eigenvectors decay like γ^{|x|}, γ the root of z² + √2(η - 1/η) z - 1
// inside the unit disk.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "qwalk/generating.hpp"
#include "qwalk/limit_measures.hpp"

namespace qwalk {

inline constexpr std::int64_t kDefaultEigenWindow = 200;

namespace detail {

inline bool vanishing_defect(double omega) {
  return std::abs(std::remainder(omega, 2.0 * std::numbers::pi)) < 1e-12;
}

inline void check_sign(int s, const char* name) {
  if (s != 1 && s != -1) throw PreconditionError(name, "must be +1 or -1");
}

}  // namespace detail

inline cplx eigenvalue(double omega, int sigma, int tau) {
  detail::check_sign(sigma, "sigma");
  detail::check_sign(tau, "tau");
  const double cw = std::cos(omega);
  const double norm = std::numbers::sqrt2 * std::sqrt(3.0 - 2.0 * cw);
  return cplx(sigma * std::sqrt(2.0 - cw * cw), tau * (2.0 - cw)) / norm;
}

/// Branch pairs in the order (+,+), (+,-), (-,+), (-,-).
inline constexpr std::array<std::pair<int, int>, 4> kBranches{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

inline std::array<cplx, 4> eigenvalues(double omega) {
  std::array<cplx, 4> out;
  for (std::size_t i = 0; i < 4; ++i)
    out[i] = eigenvalue(omega, kBranches[i].first, kBranches[i].second);
  return out;
}

/// Root of h(z) = z² + √2(η - 1/η) z - 1 with |γ| < 1.
inline cplx decay_root(cplx eta) {
  const cplx p = std::numbers::sqrt2 * (eta - 1.0 / eta);
  const cplx sq = std::sqrt(p * p + 4.0);
  const cplx r1 = 0.5 * (-p + sq), r2 = 0.5 * (-p - sq);
  const cplx root = std::abs(r1) < std::abs(r2) ? r1 : r2;
  // A double root on the circle is only resolved to ~√ε by the discriminant.
  if (!(std::abs(root) < 1.0 - 1e-7))
    throw BranchAmbiguity("decay_root: no root strictly inside the unit disk");
  return root;
}

struct EigenData {
  double omega = 0.0;
  int sigma = 1;
  int tau = 1;
  cplx eta;
  cplx gamma_root;
  cplx phi_L0;
  cplx phi_R0;

  /// √2ηγ - 1, the denominator of the off-origin coefficients.
  cplx kappa() const { return std::numbers::sqrt2 * eta * gamma_root - 1.0; }
  // Nonzero coefficients C₁^{(L,+)}, C₂^{(L,-)}, C₁^{(R,+)}, C₂^{(R,-)}.
  cplx c1_left_plus() const { return phi_L0; }
  cplx c2_left_minus() const { return phi_R0 / kappa(); }
  cplx c1_right_plus() const { return -phi_L0 / kappa(); }
  cplx c2_right_minus() const { return phi_R0; }
};

/// Ψᴿ(0)/Ψᴸ(0) forced by the eigen-equation at the origin.
inline cplx origin_ratio(double omega, cplx eta, cplx gamma_root) {
  const cplx g = std::numbers::sqrt2 * eta * gamma_root;
  return std::polar(1.0, -omega) - g / (g - 1.0);
}

/// Eigen-data for one branch, normalised so that Ψᴸ(0) = phi_L0.
inline EigenData make_eigen_data(double omega, int sigma, int tau, cplx phi_L0 = 1.0) {
  if (detail::vanishing_defect(omega))
    throw PreconditionError("omega", "eigenvectors need omega outside 2*pi*Z");
  EigenData d;
  d.omega = omega;
  d.sigma = sigma;
  d.tau = tau;
  d.eta = eigenvalue(omega, sigma, tau);
  d.gamma_root = decay_root(d.eta);
  d.phi_L0 = phi_L0;
  d.phi_R0 = origin_ratio(omega, d.eta, d.gamma_root) * phi_L0;
  return d;
}

/// The eigenvector truncated to [-W, W].
inline SpinorField build_eigenvector(const EigenData& d, std::int64_t W = kDefaultEigenWindow) {
  if (W < 1) throw PreconditionError("window", "W must be >= 1");
  SpinorField f(-W, W);
  f.set(0, {d.phi_L0, d.phi_R0});
  cplx right = 1.0, left = 1.0;
  for (std::int64_t j = 1; j <= W; ++j) {
    right *= -d.gamma_root;
    left *= d.gamma_root;
    f.set(j, {d.c1_left_plus() * right, d.c1_right_plus() * right});
    f.set(-j, {d.c2_left_minus() * left, d.c2_right_minus() * left});
  }
  return f;
}

/// State (τi sgn(x)/√(3 - 2cos ω))^{|x|} × {φᴸ ᵀ[1, k]; ᵀ[φᴸ, φᴿ]; φᴿ ᵀ[-k, 1]}
/// with k = (1 - cos ω) - στi√(2 - cos²ω), on [-W, W]. Also defined at ω = 0.
inline SpinorField stationary_state(double omega, int sigma, int tau, cplx phi_L0, cplx phi_R0,
                                    std::int64_t W = kDefaultEigenWindow) {
  detail::check_sign(sigma, "sigma");
  detail::check_sign(tau, "tau");
  if (W < 1) throw PreconditionError("window", "W must be >= 1");
  const double cw = std::cos(omega);
  const cplx k((1.0 - cw), -sigma * tau * std::sqrt(2.0 - cw * cw));
  const cplx step(0.0, tau / std::sqrt(3.0 - 2.0 * cw));
  SpinorField f(-W, W);
  f.set(0, {phi_L0, phi_R0});
  cplx right = 1.0, left = 1.0;
  for (std::int64_t j = 1; j <= W; ++j) {
    right *= step;
    left *= -step;
    f.set(j, {phi_L0 * right, phi_L0 * k * right});
    f.set(-j, {-phi_R0 * k * left, phi_R0 * left});
  }
  return f;
}

/// (1/(3 - 2cos ω))^{|x|} × {2(2 - cos ω)|φᴸ|² (x ≥ 1); |φᴸ|² + |φᴿ|² (x = 0);
/// 2(2 - cos ω)|φᴿ|² (x ≤ -1)}.
inline double stationary_mass(double omega, cplx phi_L0, cplx phi_R0, std::int64_t x) {
  const double cw = std::cos(omega);
  if (x == 0) return std::norm(phi_L0) + std::norm(phi_R0);
  const double side = 2.0 * (2.0 - cw) * std::norm(x > 0 ? phi_L0 : phi_R0);
  return side * std::pow(1.0 / (3.0 - 2.0 * cw), static_cast<double>(std::abs(x)));
}

inline Measure stationary_measure(double omega, cplx phi_L0, cplx phi_R0,
                                  std::int64_t W = kDefaultEigenWindow) {
  std::vector<double> m;
  m.reserve(static_cast<std::size_t>(2 * W + 1));
  for (std::int64_t x = -W; x <= W; ++x) m.push_back(stationary_mass(omega, phi_L0, phi_R0, x));
  return Measure(-W, std::move(m));
}

/// Left and right chirality time averages at the origin for δ₀ ⊗ ᵀ[1/√2, i/√2]:
/// ((1 - cos ω)/(3 - 2cos ω))² (1 ± sin ω / (1 + sin²ω)).
inline std::pair<double, double> chirality_time_avg_at_origin(double omega) {
  if (detail::vanishing_defect(omega)) return {0.0, 0.0};
  const double cw = std::cos(omega), sw = std::sin(omega);
  const double g = (1.0 - cw) / (3.0 - 2.0 * cw);
  const double tilt = sw / (1.0 + sw * sw);
  return {g * g * (1.0 + tilt), g * g * (1.0 - tilt)};
}

struct MatchReport {
  double max_deviation = 0.0;
  std::int64_t worst_site = 0;
  double phi_L2 = 0.0;  // |φᴸ|² used
  double phi_R2 = 0.0;  // |φᴿ|² used
};

/// Stationary measure with |φᴸ|², |φᴿ|² set to the chirality time averages at
/// the origin, compared with the time-averaged limit measure for |x| ≤ X.
inline MatchReport match_time_average(double omega, std::int64_t X = 50) {
  const auto [l, r] = chirality_time_avg_at_origin(omega);
  MatchReport rep;
  rep.phi_L2 = l;
  rep.phi_R2 = r;
  const WalkConfig config = phase_defect::config(omega);
  const CoinState psi0 = CoinState::symmetric();
  for (std::int64_t x = -X; x <= X; ++x) {
    const double lhs = stationary_mass(omega, std::sqrt(l), std::sqrt(r), x);
    const double dev = std::abs(lhs - time_avg_limit(config, psi0, x));
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst_site = x;
    }
  }
  return rep;
}

struct MassPointReport {
  bool skipped = false;           // no poles (vanishing defect)
  double max_deviation = 0.0;     // best bijection between i·𝓢 and 𝓔
  std::array<cplx, 4> rotated{};  // i·w for w in 𝓢
  std::array<cplx, 4> eigen{};    // 𝓔 in kBranches order
};

/// Compares {i w : w ∈ 𝓢} with 𝓔 as unordered sets.
inline MassPointReport mass_points_check(double omega) {
  MassPointReport rep;
  const PoleSet poles = find_poles(phase_defect::config(omega));
  if (!poles.localized()) {
    rep.skipped = true;
    return rep;
  }
  rep.eigen = eigenvalues(omega);
  for (std::size_t i = 0; i < 4; ++i) rep.rotated[i] = cplx(0.0, 1.0) * poles.points[i];
  std::array<int, 4> perm{0, 1, 2, 3};
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(rep.rotated[i] - rep.eigen[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  rep.max_deviation = best;
  return rep;
}

/// δ₀ ⊗ ᵀ[1/√2, i/√2] with its projection onto the four truncated
/// eigenvectors removed, normalised. Supported on [-W, W].
inline SpinorField orthogonal_initial_state(double omega, std::int64_t W = kDefaultEigenWindow) {
  if (detail::vanishing_defect(omega))
    throw PreconditionError("omega", "eigenvectors need omega outside 2*pi*Z");
  std::vector<SpinorField> basis;
  const auto subtract = [](SpinorField& v, const SpinorField& e) {
    const cplx coef = e.inner(v);
    std::span<Spinor> a = v.amplitudes();
    std::span<const Spinor> b = e.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i][0] -= coef * b[i][0];
      a[i][1] -= coef * b[i][1];
    }
  };
  const auto normalise = [](SpinorField& v) {
    const double n = std::sqrt(v.norm2());
    for (Spinor& s : v.amplitudes()) {
      s[0] /= n;
      s[1] /= n;
    }
  };
  for (const auto& [sigma, tau] : kBranches) {
    SpinorField e = build_eigenvector(make_eigen_data(omega, sigma, tau), W);
    for (int pass = 0; pass < 2; ++pass)
      for (const SpinorField& b : basis) subtract(e, b);
    normalise(e);
    basis.push_back(std::move(e));
  }
  SpinorField v(-W, W);
  v.set(0, CoinState::symmetric().spinor());
  for (int pass = 0; pass < 2; ++pass)
    for (const SpinorField& b : basis) subtract(v, b);
  normalise(v);
  return v;
}

}  // namespace qwalk
