#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "groupmix/abelian.hpp"
#include "groupmix/errors.hpp"
#include "groupmix/int_matrix.hpp"

namespace groupmix {

/// left * A * right = diag(d1, d2, ...) with unimodular left/right and
/// d1 | d2 | ... (zeros last). Transforms are always accumulated so the
/// reconstruction identity can be tested.
struct SmithDecomposition {
  IntMatrix left;
  std::vector<BigInt> diag;  // length min(rows, cols), nonnegative
  IntMatrix right;
};

namespace detail {

struct SmithOverflow {};

// Guarded int64 ops for the hot kernel: any intermediate beyond 2^62 aborts
// the run, and the caller retries with arbitrary precision.
inline std::int64_t checked_fma(std::int64_t x, std::int64_t q, std::int64_t y) {
  __int128 v = static_cast<__int128>(x) - static_cast<__int128>(q) * y;
  if (v > (static_cast<__int128>(1) << 62) || v < -(static_cast<__int128>(1) << 62))
    throw SmithOverflow{};
  return static_cast<std::int64_t>(v);
}

template <typename T>
T abs_value(const T& x) {
  return x < 0 ? T(-x) : x;
}

/// Diagonal-only Smith elimination, in place. Pivot selection: smallest
/// magnitude nonzero entry of the active submatrix, which limits entry
/// blow-up. Returns the diagonal (length min(n, m)).
template <typename T>
std::vector<T> smith_diagonal_inplace(std::vector<T>& w, std::size_t n,
                                      std::size_t m) {
  constexpr bool guarded = std::is_same_v<T, std::int64_t>;
  auto at = [&w, m](std::size_t r, std::size_t c) -> T& { return w[r * m + c]; };
  const std::size_t steps = std::min(n, m);
  std::vector<T> diag(steps, T(0));
  for (std::size_t t = 0; t < steps; ++t) {
    // Find the smallest-magnitude nonzero entry.
    std::size_t pr = n, pc = m;
    T best(0);
    for (std::size_t r = t; r < n; ++r)
      for (std::size_t c = t; c < m; ++c) {
        const T& v = at(r, c);
        if (v == 0) continue;
        T a = abs_value(v);
        if (pr == n || a < best) {
          best = a;
          pr = r;
          pc = c;
          if (best == 1) goto found;
        }
      }
  found:
    if (pr == n) break;  // submatrix is zero
    if (pr != t)
      for (std::size_t c = t; c < m; ++c) std::swap(at(t, c), at(pr, c));
    if (pc != t)
      for (std::size_t r = t; r < n; ++r) std::swap(at(r, t), at(r, pc));

    for (;;) {
      bool dirty = false;
      // Clear the pivot column with row operations; a nonzero remainder
      // becomes the new, smaller pivot.
      for (std::size_t r = t + 1; r < n; ++r) {
        T& head = at(r, t);
        if (head == 0) continue;
        T q = head / at(t, t);
        if (q != 0) {
          for (std::size_t c = t; c < m; ++c) {
            if constexpr (guarded)
              at(r, c) = checked_fma(at(r, c), q, at(t, c));
            else
              at(r, c) -= q * at(t, c);
          }
        }
        if (head != 0) {
          for (std::size_t c = t; c < m; ++c) std::swap(at(t, c), at(r, c));
          dirty = true;
        }
      }
      if (dirty) continue;
      for (std::size_t c = t + 1; c < m; ++c) {
        T& head = at(t, c);
        if (head == 0) continue;
        T q = head / at(t, t);
        if (q != 0) {
          for (std::size_t r = t; r < n; ++r) {
            if constexpr (guarded)
              at(r, c) = checked_fma(at(r, c), q, at(r, t));
            else
              at(r, c) -= q * at(r, t);
          }
        }
        if (head != 0) {
          for (std::size_t r = t; r < n; ++r) std::swap(at(r, t), at(r, c));
          dirty = true;
        }
      }
      if (dirty) continue;
      // Pivot must divide the rest of the submatrix; absorb a bad row and
      // keep reducing.
      bool divisible = true;
      for (std::size_t r = t + 1; r < n && divisible; ++r)
        for (std::size_t c = t + 1; c < m; ++c)
          if (at(r, c) % at(t, t) != 0) {
            for (std::size_t cc = t; cc < m; ++cc) {
              if constexpr (guarded)
                at(t, cc) = checked_fma(at(t, cc), -1, at(r, cc));
              else
                at(t, cc) += at(r, cc);
            }
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    diag[t] = abs_value(at(t, t));
  }
  return diag;
}

}  // namespace detail

/// Fixed-width matrix used by the Monte-Carlo drivers; entries fit in int64
/// with the elimination kernel escalating to big integers on overflow.
struct I64Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> entries;

  I64Matrix() = default;
  I64Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0) {}
  std::int64_t& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  std::int64_t at(std::size_t r, std::size_t c) const {
    return entries[r * cols + c];
  }
};

/// Smith diagonal without transform accumulation.
inline std::vector<BigInt> smith_diagonal(const IntMatrix& a) {
  std::vector<BigInt> w = a.entries;
  return detail::smith_diagonal_inplace(w, a.rows, a.cols);
}

inline std::vector<BigInt> smith_diagonal(const I64Matrix& a) {
  std::vector<std::int64_t> w = a.entries;
  try {
    std::vector<std::int64_t> d =
        detail::smith_diagonal_inplace(w, a.rows, a.cols);
    return std::vector<BigInt>(d.begin(), d.end());
  } catch (const detail::SmithOverflow&) {
    std::vector<BigInt> big(a.entries.begin(), a.entries.end());
    return detail::smith_diagonal_inplace(big, a.rows, a.cols);
  }
}

/// Full decomposition with unimodular transforms. Same pivot strategy as the
/// diagonal-only kernel, duplicated here so the hot path stays branch-light.
inline SmithDecomposition smith_normal_form(const IntMatrix& a) {
  const std::size_t n = a.rows, m = a.cols;
  IntMatrix w = a;
  IntMatrix left = IntMatrix::identity(n);
  IntMatrix right = IntMatrix::identity(m);

  auto swap_rows = [&](std::size_t r1, std::size_t r2) {
    for (std::size_t c = 0; c < m; ++c) std::swap(w.at(r1, c), w.at(r2, c));
    for (std::size_t c = 0; c < n; ++c) std::swap(left.at(r1, c), left.at(r2, c));
  };
  auto swap_cols = [&](std::size_t c1, std::size_t c2) {
    for (std::size_t r = 0; r < n; ++r) std::swap(w.at(r, c1), w.at(r, c2));
    for (std::size_t r = 0; r < m; ++r) std::swap(right.at(r, c1), right.at(r, c2));
  };
  // row r1 -= q * row r2 / col c1 -= q * col c2, mirrored into the transforms
  auto row_sub = [&](std::size_t r1, const BigInt& q, std::size_t r2) {
    for (std::size_t c = 0; c < m; ++c) w.at(r1, c) -= q * w.at(r2, c);
    for (std::size_t c = 0; c < n; ++c) left.at(r1, c) -= q * left.at(r2, c);
  };
  auto col_sub = [&](std::size_t c1, const BigInt& q, std::size_t c2) {
    for (std::size_t r = 0; r < n; ++r) w.at(r, c1) -= q * w.at(r, c2);
    for (std::size_t r = 0; r < m; ++r) right.at(r, c1) -= q * right.at(r, c2);
  };

  const std::size_t steps = std::min(n, m);
  std::vector<BigInt> diag(steps, BigInt(0));
  for (std::size_t t = 0; t < steps; ++t) {
    std::size_t pr = n, pc = m;
    BigInt best;
    for (std::size_t r = t; r < n; ++r)
      for (std::size_t c = t; c < m; ++c) {
        if (w.at(r, c) == 0) continue;
        BigInt v = boost::multiprecision::abs(w.at(r, c));
        if (pr == n || v < best) {
          best = v;
          pr = r;
          pc = c;
        }
      }
    if (pr == n) break;
    if (pr != t) swap_rows(t, pr);
    if (pc != t) swap_cols(t, pc);

    for (;;) {
      bool dirty = false;
      for (std::size_t r = t + 1; r < n; ++r) {
        if (w.at(r, t) == 0) continue;
        BigInt q = w.at(r, t) / w.at(t, t);
        if (q != 0) row_sub(r, q, t);
        if (w.at(r, t) != 0) {
          swap_rows(t, r);
          dirty = true;
        }
      }
      if (dirty) continue;
      for (std::size_t c = t + 1; c < m; ++c) {
        if (w.at(t, c) == 0) continue;
        BigInt q = w.at(t, c) / w.at(t, t);
        if (q != 0) col_sub(c, q, t);
        if (w.at(t, c) != 0) {
          swap_cols(t, c);
          dirty = true;
        }
      }
      if (dirty) continue;
      bool divisible = true;
      for (std::size_t r = t + 1; r < n && divisible; ++r)
        for (std::size_t c = t + 1; c < m; ++c)
          if (w.at(r, c) % w.at(t, t) != 0) {
            row_sub(t, BigInt(-1), r);
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    if (w.at(t, t) < 0) {
      for (std::size_t c = 0; c < m; ++c) w.at(t, c) = -w.at(t, c);
      for (std::size_t c = 0; c < n; ++c) left.at(t, c) = -left.at(t, c);
    }
    diag[t] = w.at(t, t);
  }
  return SmithDecomposition{std::move(left), std::move(diag), std::move(right)};
}

/// coker(A) = Z^rows / A(Z^cols): invariant factors are the nontrivial Smith
/// diagonal entries, free rank counts the zero diagonal slots.
inline AbelianGroup cokernel_from_diag(std::size_t rows,
                                       const std::vector<BigInt>& diag) {
  std::size_t nonzero = 0;
  std::vector<BigInt> factors;
  for (const BigInt& d : diag)
    if (d != 0) {
      ++nonzero;
      if (d > 1) factors.push_back(d);
    }
  return AbelianGroup::canonical(rows - nonzero, std::move(factors));
}

inline AbelianGroup cokernel(const IntMatrix& a) {
  return cokernel_from_diag(a.rows, smith_diagonal(a));
}

/// coker(A) (x) Z/aZ, computed over Z as the cokernel of [A | aI]. One exact
/// code path; no pivoting over zero divisors.
inline AbelianGroup cokernel_mod(const IntMatrix& a, const BigInt& modulus) {
  if (modulus < 1) throw ExponentMismatchError("modulus must be positive");
  IntMatrix aug(a.rows, a.cols + a.rows);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t c = 0; c < a.cols; ++c) aug.at(r, c) = a.at(r, c);
    aug.at(r, a.cols + r) = modulus;
  }
  return cokernel_from_diag(aug.rows, smith_diagonal(aug));
}

/// Monte-Carlo kernel for coker(A) (x) Z/aZ. Computes the same lattice as
/// cokernel_mod([A | aI]) but keeps every entry reduced mod a throughout:
/// the active column lattice always contains a*Z^(rows), because the aI
/// columns put it there initially and row/column operations preserve it, so
/// adding multiples of a to entries never changes the quotient. Each cleared
/// pivot p then contributes a cyclic factor Z/gcd(p, a), and rows left with
/// no nonzero entries contribute Z/a. Entries stay below a^2 in magnitude,
/// so int64 arithmetic suffices at any matrix size. Cross-validated against
/// cokernel_mod in the test suite.
inline AbelianGroup cokernel_mod_fast(I64Matrix m, std::int64_t a) {
  if (a < 1) throw ExponentMismatchError("modulus must be positive");
  const std::size_t n = m.rows, cols = m.cols;
  auto at = [&m, cols](std::size_t r, std::size_t c) -> std::int64_t& {
    return m.entries[r * cols + c];
  };
  for (std::int64_t& e : m.entries) {
    e %= a;
    if (e < 0) e += a;
  }
  std::vector<BigInt> factors;
  factors.reserve(n);
  std::size_t t = 0;
  for (; t < n && t < cols; ++t) {
    // Smallest nonzero entry of the active submatrix as pivot.
    std::size_t pr = n, pc = cols;
    std::int64_t best = 0;
    for (std::size_t r = t; r < n; ++r)
      for (std::size_t c = t; c < cols; ++c) {
        const std::int64_t v = at(r, c);
        if (v == 0) continue;
        if (pr == n || v < best) {
          best = v;
          pr = r;
          pc = c;
          if (best == 1) goto pivot_found;
        }
      }
  pivot_found:
    if (pr == n) break;
    if (pr != t)
      for (std::size_t c = t; c < cols; ++c) std::swap(at(t, c), at(pr, c));
    if (pc != t)
      for (std::size_t r = t; r < n; ++r) std::swap(at(r, t), at(r, pc));
    for (;;) {
      bool dirty = false;
      for (std::size_t r = t + 1; r < n; ++r) {
        std::int64_t head = at(r, t);
        if (head == 0) continue;
        const std::int64_t q = head / at(t, t);
        for (std::size_t c = t; c < cols; ++c) {
          std::int64_t v = (at(r, c) - q * at(t, c)) % a;
          at(r, c) = v < 0 ? v + a : v;
        }
        if (at(r, t) != 0) {
          for (std::size_t c = t; c < cols; ++c) std::swap(at(t, c), at(r, c));
          dirty = true;
        }
      }
      if (dirty) continue;
      for (std::size_t c = t + 1; c < cols; ++c) {
        std::int64_t head = at(t, c);
        if (head == 0) continue;
        const std::int64_t q = head / at(t, t);
        // Column t is clear below row t here, so this column operation only
        // changes row t. A swap invalidates that, hence the restart.
        std::int64_t v = (head - q * at(t, t)) % a;
        at(t, c) = v < 0 ? v + a : v;
        if (at(t, c) != 0) {
          for (std::size_t r = t; r < n; ++r) std::swap(at(r, t), at(r, c));
          dirty = true;
          break;
        }
      }
      if (!dirty) break;
    }
    factors.emplace_back(std::gcd(at(t, t), a));
  }
  // Rows never reached by a pivot see only the implicit aI columns.
  for (std::size_t r = t; r < n; ++r) factors.emplace_back(a);
  return AbelianGroup::canonical(0, std::move(factors));
}

}  // namespace groupmix
