#pragma once

// Brute-force passage weights Ξ(x, n): the sum over every n-step path from
// the origin to x of the ordered product of move factors, the last step's
// factor leftmost. Exists to be obviously correct, not fast.

#include <cstdint>
#include <optional>

#include "qwalk/walk.hpp"

namespace qwalk {

inline constexpr int kDefaultMaxPathSteps = 16;

struct PassageWeight {
  std::int64_t x = 0;
  std::int64_t n = 0;
  Mat2 weight;
  // Filled by enumerate_xi when the defect coin admits the P/Q/R/S basis.
  std::optional<PqrsWeight> pqrs;
};

namespace detail {

// Calls visit(mask) for every n-bit mask with exactly k set bits
// (bit j set = step j moves right).
template <class Visitor>
void for_each_combination(int n, int k, Visitor&& visit) {
  if (k < 0 || k > n) return;
  if (k == 0) {
    visit(std::uint32_t{0});
    return;
  }
  std::uint32_t mask = (std::uint32_t{1} << k) - 1;
  const std::uint32_t limit = std::uint32_t{1} << n;
  while (mask < limit) {
    visit(mask);
    // Gosper's hack: next larger integer with the same popcount.
    const std::uint32_t low = mask & (~mask + 1);
    const std::uint32_t ripple = mask + low;
    mask = (((ripple ^ mask) >> 2) / low) | ripple;
  }
}

}  // namespace detail

/// Ξ(x, n) by explicit path enumeration. When the defect coin has no zero
/// entry, each path is also folded through the move algebra and the sum is
/// stored as a PqrsWeight (the first factor is a move at the origin, so it
/// starts as a basis element).
inline PassageWeight enumerate_xi(std::int64_t x, std::int64_t n, const WalkConfig& config,
                                  int n_max = kDefaultMaxPathSteps) {
  if (n < 0) throw PreconditionError("n", "must be >= 0");
  if (n > n_max) throw TooLarge("enumerate_xi: n exceeds the path-enumeration limit");
  PassageWeight out{x, n, Mat2::zero(), std::nullopt};
  const bool algebra = config.defect_site() == 0 && config.defect().has_pqrs_basis();
  if (algebra) out.pqrs = PqrsWeight{};
  if (std::abs(x) > n || (x + n) % 2 != 0) return out;
  if (n == 0) {
    out.weight = Mat2::identity();
    if (algebra) out.pqrs = pqrs_decompose(Mat2::identity(), config.defect());
    return out;
  }
  const int rights = static_cast<int>((n + x) / 2);
  const int steps = static_cast<int>(n);
  detail::for_each_combination(steps, rights, [&](std::uint32_t mask) {
    std::int64_t pos = 0;
    Mat2 product = Mat2::identity();
    PqrsWeight chain{};
    for (int j = 0; j < steps; ++j) {
      const bool right = (mask >> j) & 1u;
      const CoinMatrix& coin = config.coin_at(pos);
      const Move move = right ? Move::Q : Move::P;
      product = move_matrix(coin, move) * product;
      if (algebra)
        chain = j == 0 ? PqrsWeight::basis(move) : pqrs_left_multiply(coin, move, chain);
      pos += right ? 1 : -1;
    }
    out.weight += product;
    if (algebra) *out.pqrs += chain;
  });
  return out;
}

/// Ξ(x, n) from the engine: column k is Ψₙ(x) started from δ₀ ⊗ eₖ.
inline PassageWeight xi_via_engine(std::int64_t x, std::int64_t n, const WalkConfig& config) {
  const SpinorField left = evolve(SpinorField::localized(0, Spinor{1.0, 0.0}), config, n);
  const SpinorField right = evolve(SpinorField::localized(0, Spinor{0.0, 1.0}), config, n);
  const Spinor l = left.at(x), r = right.at(x);
  return {x, n, Mat2{l[0], r[0], l[1], r[1]}, std::nullopt};
}

/// All Ξ(x, n) for |x| ≤ n from a single pair of engine runs, indexed by x + n.
inline std::vector<Mat2> xi_row_via_engine(std::int64_t n, const WalkConfig& config) {
  const SpinorField left = evolve(SpinorField::localized(0, Spinor{1.0, 0.0}), config, n);
  const SpinorField right = evolve(SpinorField::localized(0, Spinor{0.0, 1.0}), config, n);
  std::vector<Mat2> row;
  row.reserve(static_cast<std::size_t>(2 * n + 1));
  for (std::int64_t x = -n; x <= n; ++x) {
    const Spinor l = left.at(x), r = right.at(x);
    row.push_back(Mat2{l[0], r[0], l[1], r[1]});
  }
  return row;
}

}  // namespace qwalk
