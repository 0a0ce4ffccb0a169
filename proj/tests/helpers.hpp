#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "groupmix/abelian.hpp"
#include "groupmix/group.hpp"
#include "groupmix/int_matrix.hpp"
#include "groupmix/rng.hpp"
#include "groupmix/spectral.hpp"

namespace oracle {

using groupmix::AbelianGroup;
using groupmix::BigInt;
using groupmix::Element;
using groupmix::FiniteGroup;
using groupmix::GroupPtr;

/// Brute-force subgroup enumeration: close every subset of G. Exponential;
/// only for |G| <= 8-ish.
inline std::set<std::vector<Element>> all_subgroups_bruteforce(const GroupPtr& g) {
  const std::size_t n = g->order();
  std::set<std::vector<Element>> found;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Element> gens;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) gens.push_back(static_cast<Element>(i));
    found.insert(groupmix::generated_subgroup(g, gens).elements);
  }
  return found;
}

/// Exhaustive surjection count: enumerate all homomorphisms A -> B by their
/// generator images and test whether the image generates B. Independent of
/// the Moebius-inversion path.
inline BigInt sur_count_bruteforce(const AbelianGroup& a, const AbelianGroup& b) {
  GroupPtr bg = groupmix::realize(b);
  const std::size_t order = bg->order();
  // Candidate images per generator of A: elements killed by the factor.
  std::vector<std::vector<Element>> candidates;
  for (const BigInt& d : a.invariant_factors) {
    std::vector<Element> c;
    for (Element x = 0; x < order; ++x) {
      Element y = 0;
      for (BigInt i = 0; i < d; ++i) y = bg->mul(y, x);
      if (y == 0) c.push_back(x);
    }
    candidates.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < a.free_rank; ++i) {
    std::vector<Element> c(order);
    for (Element x = 0; x < order; ++x) c[x] = x;
    candidates.push_back(std::move(c));
  }
  if (candidates.empty())
    return b.is_trivial() ? 1 : 0;
  BigInt count = 0;
  std::vector<std::size_t> idx(candidates.size(), 0);
  std::vector<Element> images(candidates.size());
  for (;;) {
    for (std::size_t i = 0; i < idx.size(); ++i) images[i] = candidates[i][idx[i]];
    if (groupmix::generated_subgroup(bg, images).order() == order) ++count;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == candidates[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return count;
}

/// Exhaustive automorphism count: invertible endomorphisms by generator
/// images.
inline BigInt aut_count_bruteforce(const AbelianGroup& b) {
  GroupPtr bg = groupmix::realize(b);
  const std::size_t order = bg->order();
  std::vector<std::vector<Element>> candidates;
  for (const BigInt& d : b.invariant_factors) {
    std::vector<Element> c;
    for (Element x = 0; x < order; ++x) {
      Element y = 0;
      for (BigInt i = 0; i < d; ++i) y = bg->mul(y, x);
      if (y == 0) c.push_back(x);
    }
    candidates.push_back(std::move(c));
  }
  if (candidates.empty()) return 1;
  // An endomorphism of a finite abelian group is bijective iff surjective.
  BigInt count = 0;
  std::vector<std::size_t> idx(candidates.size(), 0);
  std::vector<Element> images(candidates.size());
  for (;;) {
    for (std::size_t i = 0; i < idx.size(); ++i) images[i] = candidates[i][idx[i]];
    if (groupmix::generated_subgroup(bg, images).order() == order) ++count;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == candidates[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return count;
}

/// Eigenvalues of a symmetric matrix by inertia bisection in long double:
/// count_below(x) = negative pivots of the LDL^T factorization of B - xI
/// (Sylvester's law). Robust to multiplicity; independent of the one-sided
/// Jacobi kernel under test.
inline std::vector<double> symmetric_eigenvalues_bisection(
    const std::vector<long double>& b_in, std::size_t n) {
  auto count_below = [&](long double x) {
    std::vector<long double> m = b_in;
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] -= x;
    int negatives = 0;
    for (std::size_t k = 0; k < n; ++k) {
      long double piv = m[k * n + k];
      if (piv == 0.0L) piv = 1e-300L;  // nudge; callers bisect around it
      if (piv < 0) ++negatives;
      for (std::size_t i = k + 1; i < n; ++i) {
        const long double f = m[i * n + k] / piv;
        for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
      }
    }
    return negatives;
  };
  long double radius = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double row = 0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(b_in[i * n + j]);
    radius = std::max(radius, row);
  }
  radius += 1;
  std::vector<double> eigs;
  for (std::size_t k = 1; k <= n; ++k) {
    // k-th smallest eigenvalue: bisect on count_below.
    long double lo = -radius, hi = radius;
    for (int iter = 0; iter < 200; ++iter) {
      const long double mid = 0.5L * (lo + hi);
      if (count_below(mid) >= static_cast<int>(k))
        hi = mid;
      else
        lo = mid;
    }
    eigs.push_back(static_cast<double>(0.5L * (lo + hi)));
  }
  return eigs;
}

/// Singular values of a square matrix via the characteristic structure of
/// M^T M, computed with extended precision and inertia bisection.
inline std::vector<double> singular_values_bruteforce(
    const groupmix::DenseMatrix& m) {
  const std::size_t n = m.rows;
  std::vector<long double> b(n * n, 0.0L);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0;
      for (std::size_t k = 0; k < n; ++k)
        s += static_cast<long double>(m.entries[k * n + i]) *
             static_cast<long double>(m.entries[k * n + j]);
      b[i * n + j] = s;
    }
  std::vector<double> eigs = symmetric_eigenvalues_bisection(b, n);
  std::vector<double> sv;
  for (double e : eigs) sv.push_back(std::sqrt(std::max(0.0, e)));
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

inline groupmix::IntMatrix random_int_matrix(groupmix::Rng& rng, std::size_t rows,
                                             std::size_t cols, long long lo,
                                             long long hi) {
  groupmix::IntMatrix m(rows, cols);
  for (auto& e : m.entries)
    e = lo + static_cast<long long>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  return m;
}

/// All isomorphism classes of finite abelian groups of order 2..max_order.
inline std::vector<AbelianGroup> abelian_groups_up_to(long long max_order) {
  std::vector<AbelianGroup> out;
  out.push_back(AbelianGroup::trivial());
  for (long long n = 2; n <= max_order; ++n) {
    // Partitions per prime power, combined across primes.
    std::vector<AbelianGroup> classes{AbelianGroup::trivial()};
    for (const auto& [p, e] : groupmix::factorize(BigInt(n))) {
      std::vector<std::vector<int>> partitions;
      std::vector<int> stack;
      groupmix::detail::visit_partitions(
          e, e, stack,
          [&partitions](const std::vector<int>& lam) { partitions.push_back(lam); });
      std::vector<AbelianGroup> next;
      for (const AbelianGroup& g : classes)
        for (const auto& lam : partitions) {
          auto parts = groupmix::p_parts(g);
          parts.push_back(groupmix::PartitionType{p, lam});
          next.push_back(groupmix::from_p_parts(parts));
        }
      classes = std::move(next);
    }
    for (auto& g : classes) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace oracle
