#pragma once

// Carathéodory-function identities linking the spectral series of the walk
// operator to the passage-weight generating functions:
//
//   semi-infinite:   (1 + conj F(z̄)) / 2 = Ξ̃₀(z)
//   doubly infinite: (I + conj F(z̄)) / 2 = [[⟨R|Ξ̃₀|R⟩, ⟨R|σΞ̃₁|L⟩],
//                                           [⟨L|Ξ̃₋₁|R⟩, ⟨L|σΞ̃₀|L⟩]]
//
// where σ moves every coin one site to the right. The series side is a
// truncation at N terms, so the residual is bounded by |z|^{N+1}/(1 - |z|).
// That bound drops below double rounding for moderate N, so the checks are
// templates and are run in quad precision by default.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "qwalk/generating.hpp"

namespace qwalk {

using quad_real = boost::multiprecision::cpp_bin_float_quad;
using quad_complex = boost::multiprecision::cpp_complex_quad;

template <class C>
C to_complex(cplx v) {
  return C(v.real(), v.imag());
}

/// Coin (1/√2)[[e^{iω}, e^{iω̃}], [e^{-iω̃}, -e^{-iω}]] evaluated in the
/// working precision of C.
template <class C>
BasicMat2<C> coin_from_angles(const CoinAngles& angles) {
  using std::polar;
  using std::sqrt;
  using R = decltype(C().real());
  const R s = R(1) / sqrt(R(2));
  const C e = polar(R(1), R(angles.omega()));
  const C et = polar(R(1), R(angles.omega_tilde()));
  using std::conj;
  return {C(s) * e, C(s) * et, C(s) * conj(et), -C(s) * conj(e)};
}

/// Type II field: reflector [[0,1],[1,0]] at the origin, [[ρ, b̄], [-b, ρ]]
/// elsewhere with ρ = √(1 - |b|²).
template <class C>
CoinField<C> type_two_field(cplx b) {
  if (!(std::abs(b) > 0.0 && std::abs(b) < 1.0))
    throw PreconditionError("b", "need 0 < |b| < 1");
  using std::conj;
  using std::norm;
  using std::sqrt;
  const C bb = to_complex<C>(b);
  const C rho = sqrt(C(1.0) - C(norm(bb)));
  return {{C(0.0), C(1.0), C(1.0), C(0.0)}, {rho, conj(bb), -bb, rho}, 0};
}

inline WalkConfig type_two_config(cplx b) {
  const CoinField<cplx> f = type_two_field<cplx>(b);
  return WalkConfig(CoinMatrix(f.defect, CoinMatrix::EntryPolicy::kAllowZero), CoinMatrix(f.bulk));
}

/// 2b / (2b - z{(z - z⁻¹) ± √((z - z⁻¹)² + 4|b|²)}), with the sign fixed by
/// the same root rule as the bulk functions (|1 - c f̃⁺| maximal, c = -b).
template <class C>
C type_two_xi0_closed_form(cplx b_in, const C& z) {
  using std::abs;
  using std::norm;
  using std::sqrt;
  const C b = to_complex<C>(b_in);
  const C t = z - C(1.0) / z;
  const C sq = sqrt(t * t + C(4.0) * C(norm(b)));
  C best_f(0.0);
  bool first = true;
  decltype(abs(b)) best = 0;
  for (const C& s : {sq, -sq}) {
    const C f = z / (C(2.0) * b) * (t + s);
    const auto modulus = abs(C(1.0) + b * f);
    if (first || modulus > best) {
      best = modulus;
      best_f = f;
      first = false;
    }
  }
  return C(1.0) / (C(1.0) - best_f);
}

namespace detail {

// Amplitudes on a fixed window [lo, lo + size) evolved by the walk rule. The
// window is wide enough that nothing reaches its edges within the run.
template <class C>
class WindowEvolution {
 public:
  WindowEvolution(const CoinField<C>& field, std::int64_t lo, std::int64_t hi)
      : field_(field), lo_(lo), amp_(static_cast<std::size_t>(hi - lo + 1)) {}

  void set(std::int64_t x, std::array<C, 2> v) { amp_[index(x)] = v; }
  const std::array<C, 2>& at(std::int64_t x) const { return amp_[index(x)]; }

  void step() {
    std::vector<std::array<C, 2>> next(amp_.size());
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      const BasicMat2<C>& u = field_.at(lo_ + static_cast<std::int64_t>(i));
      const std::array<C, 2>& s = amp_[i];
      if (i >= 1) next[i - 1][0] = u.a * s[0] + u.b * s[1];
      if (i + 1 < amp_.size()) next[i + 1][1] = u.c * s[0] + u.d * s[1];
    }
    amp_ = std::move(next);
  }

 private:
  std::size_t index(std::int64_t x) const { return static_cast<std::size_t>(x - lo_); }

  CoinField<C> field_;
  std::int64_t lo_;
  std::vector<std::array<C, 2>> amp_;
};

template <class C>
double to_double(const C& v) {
  return static_cast<double>(v);
}

template <class C>
Mat2 to_mat2(const BasicMat2<C>& m) {
  const auto cv = [](const C& v) { return cplx(to_double(v.real()), to_double(v.imag())); };
  return {cv(m.a), cv(m.b), cv(m.c), cv(m.d)};
}

template <class C>
double max_abs_diff(const BasicMat2<C>& x, const BasicMat2<C>& y) {
  using std::abs;
  double worst = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) worst = std::max(worst, to_double(abs(x(r, c) - y(r, c))));
  return worst;
}

inline void check_disk(cplx z) {
  if (!(std::abs(z) <= 0.6)) throw PreconditionError("z", "need |z| <= 0.6");
}

}  // namespace detail

struct CaratheodoryReport {
  double residual = 0.0;    // max over compared entries
  double tail_bound = 0.0;  // |z|^{N+1} / (1 - |z|)
  Mat2 series;              // truncated series Σ_{j≤N} zʲ (Uʲ)_{..}
  Mat2 generating;          // generating-function side
};

/// Semi-infinite identity for the Type II walk. F_N(ζ) = 1 + 2 Σ_{j≤N}
/// conj((Uʲ)_{0L,0L}) ζʲ; the generating side is checked against both the
/// general Ξ̃₀ and the Type II closed form, and `residual` is the worse.
template <class C = quad_complex>
CaratheodoryReport caratheodory_semi_infinite(cplx b, cplx z_in, int N) {
  detail::check_disk(z_in);
  if (N < 0) throw PreconditionError("N", "must be >= 0");
  const CoinField<C> field = type_two_field<C>(b);
  const C z = to_complex<C>(z_in);
  detail::WindowEvolution<C> walk(field, -N - 1, N + 1);
  walk.set(0, {C(1.0), C(0.0)});
  C series(0.0), zj(1.0);
  for (int j = 0; j <= N; ++j) {
    // Half-line dynamics: the reflector never sends mass to x < 0 from the
    // origin's left component, so the full-line run restricted to x ≥ 0 is
    // the Type II walk.
    series += walk.at(0)[0] * zj;
    zj *= z;
    walk.step();
  }
  const C lemma = BasicGeneratingFunctions<C>::at(field, z).xi0().a;
  const C closed = type_two_xi0_closed_form<C>(b, z);
  using std::abs;
  CaratheodoryReport r;
  r.series = detail::to_mat2(BasicMat2<C>{series, C(0.0), C(0.0), C(0.0)});
  r.generating = detail::to_mat2(BasicMat2<C>{lemma, C(0.0), C(0.0), C(0.0)});
  r.residual = std::max(detail::to_double(abs(series - lemma)),
                        detail::to_double(abs(series - closed)));
  r.tail_bound = std::pow(std::abs(z_in), N + 1) / (1.0 - std::abs(z_in));
  return r;
}

/// Doubly infinite identity. Series entries are the matrix elements
/// (Uʲ)_{0R,0R}, (Uʲ)_{0R,-1L}, (Uʲ)_{-1L,0R}, (Uʲ)_{-1L,-1L}; σΞ̃ comes from
/// the same generating functions on the shifted field.
template <class C = quad_complex>
CaratheodoryReport caratheodory_doubly_infinite(const CoinField<C>& field, cplx z_in, int N) {
  detail::check_disk(z_in);
  if (N < 0) throw PreconditionError("N", "must be >= 0");
  const C z = to_complex<C>(z_in);
  BasicMat2<C> series = BasicMat2<C>::zero();
  detail::WindowEvolution<C> from_right(field, -N - 2, N + 2);
  detail::WindowEvolution<C> from_left(field, -N - 2, N + 2);
  from_right.set(0, {C(0.0), C(1.0)});
  from_left.set(-1, {C(1.0), C(0.0)});
  C zj(1.0);
  for (int j = 0; j <= N; ++j) {
    series.a += from_right.at(0)[1] * zj;
    series.c += from_right.at(-1)[0] * zj;
    series.b += from_left.at(0)[1] * zj;
    series.d += from_left.at(-1)[0] * zj;
    zj *= z;
    from_right.step();
    from_left.step();
  }
  const auto gf = BasicGeneratingFunctions<C>::at(field, z);
  const auto shifted = BasicGeneratingFunctions<C>::at(field.shifted(1), z);
  const BasicMat2<C> generating{gf.xi0().d, shifted.xi(1).c, gf.xi(-1).b, shifted.xi0().a};
  CaratheodoryReport r;
  r.series = detail::to_mat2(series);
  r.generating = detail::to_mat2(generating);
  r.residual = detail::max_abs_diff(series, generating);
  r.tail_bound = std::pow(std::abs(z_in), N + 1) / (1.0 - std::abs(z_in));
  return r;
}

/// Convenience overload: the walk U₀(defect angles) at the origin, U(bulk
/// angles) elsewhere, with both coins built in the working precision.
template <class C = quad_complex>
CaratheodoryReport caratheodory_doubly_infinite(const CoinAngles& defect, const CoinAngles& bulk,
                                                cplx z, int N) {
  return caratheodory_doubly_infinite<C>(
      CoinField<C>{coin_from_angles<C>(defect), coin_from_angles<C>(bulk), 0}, z, N);
}

}  // namespace qwalk
