#pragma once

// Exact amplitude evolution of the one-defect walk on the integer line.
//
//   Ψₙ₊₁(x) = P_{x+1} Ψₙ(x+1) + Q_{x-1} Ψₙ(x-1)
//
// The lattice is a contiguous window that grows by one site on each side per
// step, so an n-step run costs O(n²) spinor updates in total.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qwalk/coin.hpp"

namespace qwalk {

/// Coin field that equals `bulk` everywhere except `defect` at `defect_site`.
class WalkConfig {
 public:
  WalkConfig(CoinMatrix defect, CoinMatrix bulk, int defect_site = 0)
      : defect_(defect), bulk_(bulk), defect_site_(defect_site) {}

  static WalkConfig homogeneous(const CoinMatrix& coin) { return WalkConfig(coin, coin); }

  const CoinMatrix& defect() const { return defect_; }
  const CoinMatrix& bulk() const { return bulk_; }
  int defect_site() const { return defect_site_; }

  const CoinMatrix& coin_at(std::int64_t x) const { return x == defect_site_ ? defect_ : bulk_; }

  /// Same coins, with every coin moved from site y to y + by.
  WalkConfig shifted(int by) const { return WalkConfig(defect_, bulk_, defect_site_ + by); }

  bool determinants_match(double tol = kUnitarityTol) const {
    return std::abs(defect_.det() - bulk_.det()) <= tol;
  }

 private:
  CoinMatrix defect_;
  CoinMatrix bulk_;
  int defect_site_;
};

/// Normalised initial chirality ᵀ[α, β].
class CoinState {
 public:
  CoinState(cplx alpha, cplx beta) : alpha_(alpha), beta_(beta) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1.0) > kUnitarityTol)
      throw PreconditionError("coin_state", "|alpha|^2 + |beta|^2 must equal 1");
  }

  /// ᵀ[1/√2, i/√2], the initial state with a symmetric Hadamard distribution.
  static CoinState symmetric() {
    const double s = 1.0 / std::numbers::sqrt2;
    return CoinState(s, cplx(0.0, s));
  }

  cplx alpha() const { return alpha_; }
  cplx beta() const { return beta_; }
  Spinor spinor() const { return {alpha_, beta_}; }

 private:
  cplx alpha_;
  cplx beta_;
};

enum class Chirality { L, R };

/// Nonnegative masses on the integer window [lo, hi].
class Measure {
 public:
  Measure() = default;
  Measure(std::int64_t lo, std::vector<double> mass) : lo_(lo), mass_(std::move(mass)) {}

  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return lo_ + static_cast<std::int64_t>(mass_.size()) - 1; }
  std::span<const double> masses() const { return mass_; }

  double at(std::int64_t x) const {
    if (x < lo_ || x > hi()) return 0.0;
    return mass_[static_cast<std::size_t>(x - lo_)];
  }

  double total() const {
    double t = 0.0;
    for (double m : mass_) t += m;
    return t;
  }

  /// True when no site carries positive mass.
  bool empty() const {
    for (double m : mass_)
      if (m > 0.0) return false;
    return true;
  }

 private:
  std::int64_t lo_ = 0;
  std::vector<double> mass_;
};

/// Amplitudes Ψ(x) = ᵀ[Ψᴸ(x), Ψᴿ(x)] on the window [lo, hi]; zero outside.
class SpinorField {
 public:
  SpinorField() = default;
  SpinorField(std::int64_t lo, std::int64_t hi, std::int64_t time_index = 0)
      : lo_(lo), amp_(static_cast<std::size_t>(hi - lo + 1)), time_(time_index) {
    if (hi < lo) throw PreconditionError("window", "hi must be >= lo");
  }

  /// δ_{x0} ⊗ ψ.
  static SpinorField localized(std::int64_t x0, const Spinor& psi) {
    SpinorField f(x0, x0);
    f.set(x0, psi);
    return f;
  }
  static SpinorField localized(std::int64_t x0, const CoinState& psi) {
    return localized(x0, psi.spinor());
  }

  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return lo_ + static_cast<std::int64_t>(amp_.size()) - 1; }
  std::int64_t time_index() const { return time_; }
  void set_time_index(std::int64_t t) { time_ = t; }

  bool contains(std::int64_t x) const { return x >= lo_ && x <= hi(); }

  Spinor at(std::int64_t x) const {
    if (!contains(x)) return {};
    return amp_[static_cast<std::size_t>(x - lo_)];
  }
  void set(std::int64_t x, const Spinor& s) {
    if (!contains(x)) throw PreconditionError("x", "outside the field window");
    amp_[static_cast<std::size_t>(x - lo_)] = s;
  }

  std::span<const Spinor> amplitudes() const { return amp_; }
  std::span<Spinor> amplitudes() { return amp_; }

  double norm2() const {
    double n = 0.0;
    for (const Spinor& s : amp_) n += std::norm(s[0]) + std::norm(s[1]);
    return n;
  }

  /// Σₓ ⟨this(x), other(x)⟩ with the conjugate on `this`.
  cplx inner(const SpinorField& other) const {
    cplx acc = 0.0;
    const std::int64_t lo = std::max(lo_, other.lo_);
    const std::int64_t hi = std::min(this->hi(), other.hi());
    for (std::int64_t x = lo; x <= hi; ++x) {
      const Spinor u = at(x), v = other.at(x);
      acc += std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1];
    }
    return acc;
  }

 private:
  std::int64_t lo_ = 0;
  std::vector<Spinor> amp_{Spinor{}};
  std::int64_t time_ = 0;
};

/// One application of the evolution operator. The window grows by one site
/// on each side and the time index advances by one.
inline SpinorField step(const SpinorField& state, const WalkConfig& config) {
  SpinorField next(state.lo() - 1, state.hi() + 1, state.time_index() + 1);
  std::span<Spinor> out = next.amplitudes();
  std::span<const Spinor> in = state.amplitudes();
  // Source site y = lo + i feeds the left component of y - 1 (out index i)
  // and the right component of y + 1 (out index i + 2).
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::int64_t y = state.lo() + static_cast<std::int64_t>(i);
    const Mat2& u = config.coin_at(y).matrix();
    const Spinor& s = in[i];
    out[i][0] = u.a * s[0] + u.b * s[1];
    out[i + 2][1] = u.c * s[0] + u.d * s[1];
  }
  return next;
}

/// Runs n steps, calling `visit(state)` on Ψ₀, Ψ₁, …, Ψₙ in order.
template <class Visitor>
SpinorField evolve_visit(const SpinorField& initial, const WalkConfig& config, std::int64_t n,
                         Visitor&& visit) {
  if (n < 0) throw PreconditionError("n", "must be >= 0");
  SpinorField state = initial;
  visit(static_cast<const SpinorField&>(state));
  for (std::int64_t k = 0; k < n; ++k) {
    state = step(state, config);
    visit(static_cast<const SpinorField&>(state));
  }
  return state;
}

inline SpinorField evolve(const SpinorField& initial, const WalkConfig& config, std::int64_t n) {
  return evolve_visit(initial, config, n, [](const SpinorField&) {});
}

inline Measure measure(const SpinorField& state) {
  std::vector<double> m;
  m.reserve(state.amplitudes().size());
  for (const Spinor& s : state.amplitudes()) m.push_back(std::norm(s[0]) + std::norm(s[1]));
  return Measure(state.lo(), std::move(m));
}

inline Measure chirality_measure(const SpinorField& state, Chirality side) {
  const int k = side == Chirality::L ? 0 : 1;
  std::vector<double> m;
  m.reserve(state.amplitudes().size());
  for (const Spinor& s : state.amplitudes()) m.push_back(std::norm(s[k]));
  return Measure(state.lo(), std::move(m));
}

/// Time averages of the total and chirality-resolved measures.
struct TimeAverage {
  Measure total;
  Measure left;
  Measure right;
};

/// (1/T) Σ_{n=0}^{T-1} μₙ, accumulated with running sums.
inline TimeAverage time_average_resolved(const SpinorField& initial, const WalkConfig& config,
                                         std::int64_t T) {
  if (T < 1) throw PreconditionError("T", "must be >= 1");
  const std::int64_t lo = initial.lo() - (T - 1);
  const std::int64_t hi = initial.hi() + (T - 1);
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> left(width, 0.0), right(width, 0.0);
  evolve_visit(initial, config, T - 1, [&](const SpinorField& s) {
    std::span<const Spinor> amp = s.amplitudes();
    const auto offset = static_cast<std::size_t>(s.lo() - lo);
    for (std::size_t i = 0; i < amp.size(); ++i) {
      left[offset + i] += std::norm(amp[i][0]);
      right[offset + i] += std::norm(amp[i][1]);
    }
  });
  std::vector<double> total(width);
  const double inv = 1.0 / static_cast<double>(T);
  for (std::size_t i = 0; i < width; ++i) {
    left[i] *= inv;
    right[i] *= inv;
    total[i] = left[i] + right[i];
  }
  return {Measure(lo, std::move(total)), Measure(lo, std::move(left)),
          Measure(lo, std::move(right))};
}

inline Measure time_average(const SpinorField& initial, const WalkConfig& config,
                            std::int64_t T) {
  return time_average_resolved(initial, config, T).total;
}

/// P(Xₙ/n ≤ y) for each query point, from the exact measure at time n. Mass
/// at site x is assigned to the point x/n.
inline std::vector<double> rescaled_empirical_cdf(const SpinorField& initial,
                                                  const WalkConfig& config, std::int64_t n,
                                                  std::span<const double> points) {
  if (n < 1) throw PreconditionError("n", "must be >= 1");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] >= -1.0 && points[i] <= 1.0))
      throw PreconditionError("points", "query points must lie in [-1, 1]");
    if (i > 0 && !(points[i] > points[i - 1]))
      throw PreconditionError("points", "query points must be strictly increasing");
  }
  const Measure mu = measure(evolve(initial, config, n));
  std::vector<double> out;
  out.reserve(points.size());
  double acc = 0.0;
  std::int64_t x = mu.lo();
  const auto nd = static_cast<double>(n);
  for (double y : points) {
    while (x <= mu.hi() && static_cast<double>(x) / nd <= y) acc += mu.at(x++);
    out.push_back(acc);
  }
  return out;
}

}  // namespace qwalk
