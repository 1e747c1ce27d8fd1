#pragma once

// 2x2 complex primitives, coin construction, and the move algebra used to
// express passage weights in the basis generated by the defect coin.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "qwalk/errors.hpp"

namespace qwalk {

using cplx = std::complex<double>;

inline constexpr double kUnitarityTol = 1e-12;

/// Two-component chirality amplitude ᵀ[left, right].
using Spinor = std::array<cplx, 2>;

/// General 2x2 matrix, row-major [[a, b], [c, d]], over a complex type C.
template <class C>
struct BasicMat2 {
  C a{}, b{}, c{}, d{};

  static constexpr BasicMat2 identity() { return {C(1.0), C(0.0), C(0.0), C(1.0)}; }
  static constexpr BasicMat2 zero() { return {}; }

  constexpr C det() const { return a * d - b * c; }
  BasicMat2 adjoint() const {
    using std::conj;
    return {conj(a), conj(c), conj(b), conj(d)};
  }
  BasicMat2 conj() const {
    using std::conj;
    return {conj(a), conj(b), conj(c), conj(d)};
  }

  /// Entry by (row, col) index in {0,1}².
  constexpr C operator()(int row, int col) const {
    return row == 0 ? (col == 0 ? a : b) : (col == 0 ? c : d);
  }

  bool is_finite() const {
    for (const C& v : {a, b, c, d})
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  friend constexpr BasicMat2 operator+(const BasicMat2& x, const BasicMat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend constexpr BasicMat2 operator-(const BasicMat2& x, const BasicMat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend constexpr BasicMat2 operator*(const BasicMat2& x, const BasicMat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend constexpr BasicMat2 operator*(const C& s, const BasicMat2& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
  friend constexpr std::array<C, 2> operator*(const BasicMat2& x, const std::array<C, 2>& v) {
    return {x.a * v[0] + x.b * v[1], x.c * v[0] + x.d * v[1]};
  }
  BasicMat2& operator+=(const BasicMat2& y) { return *this = *this + y; }
};

using Mat2 = BasicMat2<cplx>;

/// Outer product |u⟩⟨v| without conjugation (column times row).
template <class C>
constexpr BasicMat2<C> outer(const std::array<C, 2>& column, const std::array<C, 2>& row) {
  return {column[0] * row[0], column[0] * row[1], column[1] * row[0], column[1] * row[1]};
}

inline double max_abs_diff(const Mat2& x, const Mat2& y) {
  return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c),
                   std::abs(x.d - y.d)});
}

inline bool is_unitary(const Mat2& m, double tol = kUnitarityTol) {
  return max_abs_diff(m * m.adjoint(), Mat2::identity()) <= tol;
}

/// Angle pair (ω, ω̃) parametrising the coin family
/// (1/√2)[[e^{iω}, e^{iω̃}], [e^{-iω̃}, -e^{-iω}]]. Both angles in [0, 2π).
class CoinAngles {
 public:
  CoinAngles(double omega, double omega_tilde) : omega_(omega), omega_tilde_(omega_tilde) {
    check(omega, "omega");
    check(omega_tilde, "omega_tilde");
  }

  double omega() const { return omega_; }
  double omega_tilde() const { return omega_tilde_; }

 private:
  static void check(double v, const char* name) {
    if (!(v >= 0.0 && v < 2.0 * std::numbers::pi))
      throw PreconditionError(name, "angle must lie in [0, 2pi)");
  }
  double omega_;
  double omega_tilde_;
};

/// A unitary 2x2 coin. By default all four entries must be nonzero, which
/// the generating-function machinery and the P/Q/R/S basis rely on.
class CoinMatrix {
 public:
  enum class EntryPolicy { kNonZero, kAllowZero };

  explicit CoinMatrix(const Mat2& m, EntryPolicy policy = EntryPolicy::kNonZero) : m_(m) {
    if (!m.is_finite()) throw PreconditionError("coin", "non-finite entry");
    if (!is_unitary(m)) throw PreconditionError("coin", "matrix is not unitary");
    if (policy == EntryPolicy::kNonZero && !has_pqrs_basis())
      throw PreconditionError("coin", "a*b*c*d must be nonzero");
  }

  const Mat2& matrix() const { return m_; }
  cplx a() const { return m_.a; }
  cplx b() const { return m_.b; }
  cplx c() const { return m_.c; }
  cplx d() const { return m_.d; }
  cplx det() const { return m_.det(); }

  // False for coins with a vanishing entry, e.g. the Type II reflector.
  bool has_pqrs_basis() const {
    return m_.a != 0.0 && m_.b != 0.0 && m_.c != 0.0 && m_.d != 0.0;
  }

  friend bool operator==(const CoinMatrix& x, const CoinMatrix& y) {
    return x.m_.a == y.m_.a && x.m_.b == y.m_.b && x.m_.c == y.m_.c && x.m_.d == y.m_.d;
  }

 private:
  Mat2 m_;
};

inline CoinMatrix make_coin(const CoinAngles& angles) {
  const double s = 1.0 / std::numbers::sqrt2;
  const cplx e = std::polar(1.0, angles.omega());
  const cplx et = std::polar(1.0, angles.omega_tilde());
  return CoinMatrix(Mat2{s * e, s * et, s * std::conj(et), -s * std::conj(e)});
}

inline CoinMatrix hadamard() { return make_coin(CoinAngles(0.0, 0.0)); }

/// P keeps the upper row (left move), Q the lower row (right move).
struct MoveSplit {
  Mat2 p;
  Mat2 q;
};

inline MoveSplit split_pq(const CoinMatrix& coin) {
  const Mat2& m = coin.matrix();
  return {Mat2{m.a, m.b, 0.0, 0.0}, Mat2{0.0, 0.0, m.c, m.d}};
}

enum class Move { P, Q, R, S };

/// Dense form of a move operator built from `coin`:
/// P, Q as in split_pq; R = |L⟩⟨R|U; S = |R⟩⟨L|U.
inline Mat2 move_matrix(const CoinMatrix& coin, Move move) {
  const Mat2& m = coin.matrix();
  switch (move) {
    case Move::P: return {m.a, m.b, 0.0, 0.0};
    case Move::Q: return {0.0, 0.0, m.c, m.d};
    case Move::R: return {m.c, m.d, 0.0, 0.0};
    case Move::S: return {0.0, 0.0, m.a, m.b};
  }
  return Mat2::zero();
}

/// Coefficients of p·P0 + q·Q0 + r·R0 + s·S0 with the moves taken from the
/// defect coin U0.
struct PqrsWeight {
  cplx p{}, q{}, r{}, s{};

  friend PqrsWeight operator+(const PqrsWeight& x, const PqrsWeight& y) {
    return {x.p + y.p, x.q + y.q, x.r + y.r, x.s + y.s};
  }
  PqrsWeight& operator+=(const PqrsWeight& y) { return *this = *this + y; }

  cplx operator[](Move m) const {
    switch (m) {
      case Move::P: return p;
      case Move::Q: return q;
      case Move::R: return r;
      case Move::S: return s;
    }
    return {};
  }
  cplx& operator[](Move m) {
    switch (m) {
      case Move::P: return p;
      case Move::Q: return q;
      case Move::R: return r;
      default: return s;
    }
  }

  static PqrsWeight basis(Move m) {
    PqrsWeight w;
    w[m] = 1.0;
    return w;
  }
};

inline double max_abs_diff(const PqrsWeight& x, const PqrsWeight& y) {
  return std::max({std::abs(x.p - y.p), std::abs(x.q - y.q), std::abs(x.r - y.r),
                   std::abs(x.s - y.s)});
}

inline Mat2 to_dense(const PqrsWeight& w, const CoinMatrix& defect) {
  return w.p * move_matrix(defect, Move::P) + w.q * move_matrix(defect, Move::Q) +
         w.r * move_matrix(defect, Move::R) + w.s * move_matrix(defect, Move::S);
}

/// Solves weight = p·P0 + q·Q0 + r·R0 + s·S0. The top row of the weight is
/// p·(a0, b0) + r·(c0, d0); the bottom row is q·(c0, d0) + s·(a0, b0).
inline PqrsWeight pqrs_decompose(const Mat2& weight, const CoinMatrix& defect) {
  if (!defect.has_pqrs_basis())
    throw SingularBasis("pqrs_decompose: defect coin has a zero entry");
  const cplx a0 = defect.a(), b0 = defect.b(), c0 = defect.c(), d0 = defect.d();
  const cplx det = defect.det();
  PqrsWeight w;
  // [a0 c0; b0 d0] (p, r)ᵀ = (w11, w12)ᵀ
  w.p = (d0 * weight.a - c0 * weight.b) / det;
  w.r = (a0 * weight.b - b0 * weight.a) / det;
  // [c0 a0; d0 b0] (q, s)ᵀ = (w21, w22)ᵀ
  w.q = (b0 * weight.c - a0 * weight.d) / (-det);
  w.s = (c0 * weight.d - d0 * weight.c) / (-det);
  return w;
}

namespace detail {

struct TableEntry {
  cplx coefficient;
  Move target;
};

// Left multiplication of a defect-basis element by a move built from the
// coin at site x. Rows are the move, columns the basis element.
inline TableEntry move_table(const CoinMatrix& coin, Move move, Move basis) {
  const cplx a = coin.a(), b = coin.b(), c = coin.c(), d = coin.d();
  using M = Move;
  switch (move) {
    case M::P:
      switch (basis) {
        case M::P: return {a, M::P};
        case M::Q: return {b, M::R};
        case M::R: return {a, M::R};
        case M::S: return {b, M::P};
      }
      break;
    case M::Q:
      switch (basis) {
        case M::P: return {c, M::S};
        case M::Q: return {d, M::Q};
        case M::R: return {c, M::Q};
        case M::S: return {d, M::S};
      }
      break;
    case M::R:
      switch (basis) {
        // |L⟩⟨R|U_x · P0 keeps the upper row shape: c_x P0.
        case M::P: return {c, M::P};
        case M::Q: return {d, M::R};
        case M::R: return {c, M::R};
        case M::S: return {d, M::P};
      }
      break;
    case M::S:
      switch (basis) {
        case M::P: return {a, M::S};
        case M::Q: return {b, M::Q};
        case M::R: return {a, M::Q};
        case M::S: return {b, M::S};
      }
      break;
  }
  return {0.0, M::P};
}

}  // namespace detail

/// Applies the move `move` built from `coin_at_x` on the left of `weight`,
/// staying in the defect-coin basis.
inline PqrsWeight pqrs_left_multiply(const CoinMatrix& coin_at_x, Move move,
                                     const PqrsWeight& weight) {
  PqrsWeight out;
  for (Move basis : {Move::P, Move::Q, Move::R, Move::S}) {
    const auto [coef, target] = detail::move_table(coin_at_x, move, basis);
    out[target] += coef * weight[basis];
  }
  return out;
}

}  // namespace qwalk
