#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "groupmix/errors.hpp"
#include "groupmix/group.hpp"
#include "groupmix/int_matrix.hpp"

namespace groupmix {

/// Finitely generated abelian group: free rank plus invariant-factor chain
/// d1 | d2 | ... | dk with every di >= 2 (canonical form, no unit factors).
struct AbelianGroup {
  std::size_t free_rank = 0;
  std::vector<BigInt> invariant_factors;

  bool is_finite() const { return free_rank == 0; }
  bool is_trivial() const { return free_rank == 0 && invariant_factors.empty(); }

  BigInt order() const {
    if (!is_finite()) throw BInfiniteError("order of an infinite group");
    BigInt o = 1;
    for (const BigInt& d : invariant_factors) o *= d;
    return o;
  }

  BigInt exponent() const {
    if (!is_finite()) throw BInfiniteError("exponent of an infinite group");
    return invariant_factors.empty() ? BigInt(1) : invariant_factors.back();
  }

  /// Canonical isomorphism-class key: "1" for the trivial group, otherwise
  /// the invariant factors joined by 'x', prefixed by the free part.
  std::string key() const {
    std::string out;
    if (free_rank > 0) out = "Z^" + std::to_string(free_rank);
    for (const BigInt& d : invariant_factors) {
      if (!out.empty()) out += "x";
      out += d.str();
    }
    return out.empty() ? "1" : out;
  }

  bool operator==(const AbelianGroup& o) const {
    return free_rank == o.free_rank && invariant_factors == o.invariant_factors;
  }
  bool operator<(const AbelianGroup& o) const {
    if (free_rank != o.free_rank) return free_rank < o.free_rank;
    return invariant_factors < o.invariant_factors;
  }

  /// Normalizes arbitrary cyclic factors into canonical form. Zero factors
  /// count toward the free rank; unit factors are dropped.
  static AbelianGroup canonical(std::size_t free_rank,
                                std::vector<BigInt> factors) {
    AbelianGroup g;
    g.free_rank = free_rank;
    std::vector<BigInt> d;
    for (BigInt& x : factors) {
      if (x < 0) x = -x;
      if (x == 0)
        ++g.free_rank;
      else if (x > 1)
        d.push_back(std::move(x));
    }
    // Pairwise gcd/lcm passes until the divisibility chain holds.
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
          if (d[j] % d[i] == 0) continue;
          BigInt g2 = boost::multiprecision::gcd(d[i], d[j]);
          BigInt l = d[i] / g2 * d[j];
          d[i] = std::move(g2);
          d[j] = std::move(l);
          changed = true;
        }
    }
    std::sort(d.begin(), d.end());
    d.erase(std::remove(d.begin(), d.end(), BigInt(1)), d.end());
    g.invariant_factors = std::move(d);
    return g;
  }

  static AbelianGroup trivial() { return AbelianGroup{}; }
  static AbelianGroup cyclic(const BigInt& n) {
    return canonical(0, {n});
  }
};

/// Abelian p-group as a partition: parts weakly decreasing, the group is the
/// direct sum of Z/p^{parts[i]}.
struct PartitionType {
  BigInt prime;
  std::vector<int> parts;

  BigInt order() const {
    int s = 0;
    for (int x : parts) s += x;
    return boost::multiprecision::pow(prime, s);
  }
};

// ---------------------------------------------------------------------------
// factorization helpers
// ---------------------------------------------------------------------------

inline std::vector<std::pair<BigInt, int>> factorize(BigInt n) {
  std::vector<std::pair<BigInt, int>> out;
  if (n < 0) n = -n;
  for (BigInt p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Number of prime factors counted with multiplicity.
inline int ell(const BigInt& d) {
  int s = 0;
  for (const auto& [p, e] : factorize(d)) s += e;
  return s;
}

/// The p-parts of a finite abelian group, as partitions.
inline std::vector<PartitionType> p_parts(const AbelianGroup& g) {
  if (!g.is_finite()) throw BInfiniteError("p-parts of an infinite group");
  std::map<BigInt, std::vector<int>> parts;
  for (const BigInt& d : g.invariant_factors)
    for (const auto& [p, e] : factorize(d)) parts[p].push_back(e);
  std::vector<PartitionType> out;
  for (auto& [p, lambda] : parts) {
    std::sort(lambda.begin(), lambda.end(), std::greater<int>());
    out.push_back(PartitionType{p, std::move(lambda)});
  }
  return out;
}

/// Rebuild an abelian group from p-parts (inverse of p_parts).
inline AbelianGroup from_p_parts(const std::vector<PartitionType>& parts) {
  std::size_t max_len = 0;
  for (const auto& pt : parts) max_len = std::max(max_len, pt.parts.size());
  std::vector<BigInt> factors(max_len, 1);
  // Align largest-with-largest so the divisibility chain comes out right.
  for (const auto& pt : parts)
    for (std::size_t i = 0; i < pt.parts.size(); ++i)
      factors[i] *= boost::multiprecision::pow(pt.prime, pt.parts[i]);
  std::reverse(factors.begin(), factors.end());
  return AbelianGroup::canonical(0, std::move(factors));
}

// ---------------------------------------------------------------------------
// hom / sur / aut counting
// ---------------------------------------------------------------------------

/// #Hom(A, B) = |B|^{free rank of A} * prod gcd(d_i, e_j) over cyclic factor
/// pairs.
inline BigInt hom_count(const AbelianGroup& a, const AbelianGroup& b) {
  if (!b.is_finite())
    throw BInfiniteError("hom counting needs a finite target");
  BigInt count = boost::multiprecision::pow(b.order(), static_cast<unsigned>(a.free_rank));
  for (const BigInt& d : a.invariant_factors)
    for (const BigInt& e : b.invariant_factors)
      count *= boost::multiprecision::gcd(d, e);
  return count;
}

/// |Aut| of an abelian p-group via the standard closed form
/// (with e_1 <= ... <= e_n the cyclic exponents):
///   prod_k (p^{d_k} - p^{k-1}) * prod_j p^{e_j (n - d_j)}
///   * prod_i p^{(e_i - 1)(n - c_i + 1)}
/// where d_k = max{l : e_l = e_k} and c_k = min{l : e_l = e_k}.
inline BigInt aut_order_p(const PartitionType& pt) {
  std::vector<int> e(pt.parts.rbegin(), pt.parts.rend());  // ascending
  const int n = static_cast<int>(e.size());
  if (n == 0) return 1;
  std::vector<int> dmax(n), cmin(n);
  for (int k = 0; k < n; ++k) {
    int d = k, c = k;
    while (d + 1 < n && e[d + 1] == e[k]) ++d;
    while (c - 1 >= 0 && e[c - 1] == e[k]) --c;
    dmax[k] = d + 1;  // 1-based
    cmin[k] = c + 1;
  }
  const BigInt& p = pt.prime;
  BigInt result = 1;
  for (int k = 1; k <= n; ++k)
    result *= boost::multiprecision::pow(p, dmax[k - 1]) -
              boost::multiprecision::pow(p, k - 1);
  for (int j = 1; j <= n; ++j)
    result *= boost::multiprecision::pow(p, e[j - 1] * (n - dmax[j - 1]));
  for (int i = 1; i <= n; ++i)
    result *= boost::multiprecision::pow(p, (e[i - 1] - 1) * (n - cmin[i - 1] + 1));
  return result;
}

inline BigInt aut_order(const AbelianGroup& b) {
  if (!b.is_finite()) throw BInfiniteError("aut order of an infinite group");
  BigInt result = 1;
  for (const PartitionType& pt : p_parts(b)) result *= aut_order_p(pt);
  return result;
}

// ---------------------------------------------------------------------------
// realizing small abelian groups as Cayley tables
// ---------------------------------------------------------------------------

inline GroupPtr realize(const AbelianGroup& g, std::size_t cap = 4096) {
  if (!g.is_finite()) throw BInfiniteError("cannot realize an infinite group");
  if (g.order() > cap) throw CapExceededError("group too large to realize");
  GroupPtr out = FiniteGroup::trivial();
  for (const BigInt& d : g.invariant_factors)
    out = FiniteGroup::product(out, FiniteGroup::cyclic(d.convert_to<std::size_t>()));
  return out;
}

/// Abelian invariants of a subgroup given by its element set inside an
/// abelian ambient group, recovered from p-torsion counts: the number of
/// elements killed by p^k determines the partition of the p-part.
inline AbelianGroup abelian_invariants(const GroupPtr& ambient,
                                       const std::vector<Element>& elements) {
  if (!ambient->is_abelian())
    throw GroupMismatchError("abelian invariants need an abelian group");
  const std::size_t n = elements.size();
  std::vector<PartitionType> parts;
  for (const auto& [p, e_max] : factorize(BigInt(n))) {
    const std::size_t pi = p.convert_to<std::size_t>();
    // counts[k] = #{x in H : p^k x = 0}
    std::vector<int> log_counts;
    std::vector<Element> powed(elements);
    int killed = 0;
    log_counts.push_back(0);  // k = 0: only the identity
    for (int k = 1; k <= e_max; ++k) {
      for (Element& x : powed) {
        Element y = 0;
        for (std::size_t i = 0; i < pi; ++i) y = ambient->mul(y, x);
        x = y;
      }
      killed = static_cast<int>(std::count(powed.begin(), powed.end(), Element{0}));
      int lc = 0;
      int c = killed;
      while (c > 1) {
        c /= static_cast<int>(pi);
        ++lc;
      }
      log_counts.push_back(lc);
    }
    // #parts >= k equals log_counts[k] - log_counts[k-1].
    std::vector<int> lambda;
    for (int k = 1; k < static_cast<int>(log_counts.size()); ++k) {
      int ge_k = log_counts[k] - log_counts[k - 1];
      while (static_cast<int>(lambda.size()) < ge_k) lambda.push_back(0);
      for (int i = 0; i < ge_k; ++i) lambda[i] = k;
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<int>());
    if (!lambda.empty()) parts.push_back(PartitionType{p, std::move(lambda)});
  }
  return from_p_parts(parts);
}

// ---------------------------------------------------------------------------
// surjection counting via Moebius inversion over the subgroup lattice
// ---------------------------------------------------------------------------

/// Precomputed data for counting surjections onto a fixed finite abelian B:
///   #Sur(A, B) = sum_{H <= B} mu(H, B) #Hom(A, H),
/// with mu the Moebius function of B's subgroup lattice.
class SurjectionCounter {
 public:
  explicit SurjectionCounter(const AbelianGroup& b, std::size_t cap = 256) {
    if (!b.is_finite()) throw BInfiniteError("surjection target must be finite");
    if (b.order() > cap)
      throw CapExceededError("surjection target exceeds lattice cap");
    GroupPtr g = realize(b);
    SubgroupLattice lat = subgroup_lattice(g, cap);
    const std::size_t m = lat.size();
    std::vector<BigInt> mu(m);
    // Subgroups are sorted by order, so the full group is last.
    mu[m - 1] = 1;
    for (std::size_t ii = m - 1; ii-- > 0;) {
      BigInt s = 0;
      for (std::size_t j = ii + 1; j < m; ++j)
        if (lat.leq[ii][j]) s += mu[j];
      mu[ii] = -s;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (mu[i] == 0) continue;
      terms_.emplace_back(mu[i],
                          abelian_invariants(g, lat.subgroups[i].elements));
    }
  }

  BigInt count(const AbelianGroup& a) const {
    BigInt s = 0;
    for (const auto& [mu, h] : terms_) s += mu * hom_count(a, h);
    return s;
  }

  const std::vector<std::pair<BigInt, AbelianGroup>>& terms() const {
    return terms_;
  }

 private:
  std::vector<std::pair<BigInt, AbelianGroup>> terms_;
};

inline BigInt sur_count(const AbelianGroup& a, const AbelianGroup& b,
                        std::size_t cap = 256) {
  return SurjectionCounter(b, cap).count(a);
}

// ---------------------------------------------------------------------------
// tensoring
// ---------------------------------------------------------------------------

/// A (x) Z/aZ: each Z/d becomes Z/gcd(d, a), each Z becomes Z/a.
inline AbelianGroup tensor_mod(const AbelianGroup& a, const BigInt& modulus) {
  if (modulus < 1) throw ExponentMismatchError("modulus must be positive");
  std::vector<BigInt> factors;
  for (std::size_t i = 0; i < a.free_rank; ++i) factors.push_back(modulus);
  for (const BigInt& d : a.invariant_factors)
    factors.push_back(boost::multiprecision::gcd(d, modulus));
  return AbelianGroup::canonical(0, std::move(factors));
}

// ---------------------------------------------------------------------------
// zeta and the lambda_u masses
// ---------------------------------------------------------------------------

/// Riemann zeta at integer k >= 2 by direct summation with an
/// Euler-Maclaurin tail; absolute error below 1e-15 for all k >= 2.
inline double zeta(int k) {
  if (k < 2) throw HypothesisViolatedError("zeta needs k >= 2");
  if (k > 60) return 1.0 + std::pow(2.0, -k);  // only the first tail term survives
  constexpr int kCut = 64;
  double s = 0;
  for (int j = kCut; j >= 1; --j) s += std::pow(static_cast<double>(j), -k);
  const double kk = static_cast<double>(k);
  const double a = kCut + 1;
  double tail = std::pow(a, 1.0 - kk) / (kk - 1.0) + 0.5 * std::pow(a, -kk);
  tail += kk / 12.0 * std::pow(a, -kk - 1.0);
  tail -= kk * (kk + 1.0) * (kk + 2.0) / 720.0 * std::pow(a, -kk - 3.0);
  tail += kk * (kk + 1.0) * (kk + 2.0) * (kk + 3.0) * (kk + 4.0) / 30240.0 *
          std::pow(a, -kk - 5.0);
  return s + tail;
}

/// prod_{k=u+1}^inf (1 - p^{-k}), truncated at k = 64. The dropped tail is
/// below 2^{-60} in relative terms since log prod_{k>64}(1-p^{-k}) is within
/// 2 p^{-65} of zero.
inline double truncated_euler_product(double p, int u) {
  double prod = 1.0;
  for (int k = u + 1; k <= 64; ++k) prod *= 1.0 - std::pow(p, -k);
  return prod;
}

/// P[A_p ~ B] under the universal distribution with index u:
///   |B|^{-u} |Aut B|^{-1} prod_{k=u+1}^inf (1 - p^{-k}).
inline double lambda_p_mass(const PartitionType& b, int u) {
  if (u < 0) throw HypothesisViolatedError("u must be nonnegative");
  const double p = b.prime.convert_to<double>();
  const double denom =
      boost::multiprecision::pow(b.order(), static_cast<unsigned>(u))
          .convert_to<double>() *
      aut_order_p(b).convert_to<double>();
  return truncated_euler_product(p, u) / denom;
}

/// lambda_u(B) = |B|^{-u} |Aut B|^{-1} prod_{k=u+1}^inf zeta(k)^{-1}
/// for u >= 1 and finite B.
inline double lambda_u_finite_mass(const AbelianGroup& b, int u) {
  if (u < 1) throw HypothesisViolatedError("finite lambda mass needs u >= 1");
  if (!b.is_finite()) throw BInfiniteError("finite lambda mass needs finite B");
  double prod = 1.0;
  for (int k = u + 1; k <= 64; ++k) prod /= zeta(k);
  const double denom =
      boost::multiprecision::pow(b.order(), static_cast<unsigned>(u))
          .convert_to<double>() *
      aut_order(b).convert_to<double>();
  return prod / denom;
}

namespace detail {

/// Visit all partitions of total size s (parts weakly decreasing).
template <typename Fn>
void visit_partitions(int s, int max_part, std::vector<int>& stack, Fn&& fn) {
  if (s == 0) {
    fn(stack);
    return;
  }
  for (int part = std::min(s, max_part); part >= 1; --part) {
    stack.push_back(part);
    visit_partitions(s - part, part, stack, fn);
    stack.pop_back();
  }
}

inline std::vector<int> truncate_partition(const std::vector<int>& lambda,
                                           int v) {
  std::vector<int> out;
  out.reserve(lambda.size());
  for (int x : lambda) out.push_back(std::min(x, v));
  return out;
}

}  // namespace detail

/// lambda_u(U_{a,H}) = P[Y (x) Z/aZ ~ H] for Y from the universal
/// distribution: the product over primes p | a of the total lambda_p mass of
/// p-groups whose truncation mod p^{v_p(a)} matches H_p.
///
/// Truncation certificate: partitions are enumerated in order of increasing
/// total size, accumulating the mass of *all* partitions seen so far. Since
/// the lambda_p masses of all finite p-groups sum to exactly 1, the mass not
/// yet enumerated is 1 - (accumulated total), which bounds the mass of any
/// not-yet-seen qualifying group. Enumeration stops once that complement is
/// below the requested tolerance, so the returned value has certified
/// truncation error <= tol.
inline double lambda_u_tensor_mass(const BigInt& a, const AbelianGroup& h,
                                   int u, double tol = 1e-9) {
  if (a < 1) throw ExponentMismatchError("modulus must be positive");
  if (!h.is_finite() || (h.exponent() != 1 && a % h.exponent() != 0))
    throw ExponentMismatchError("exponent of H must divide a");
  const auto a_factors = factorize(a);
  if (a_factors.empty()) return h.is_trivial() ? 1.0 : 0.0;  // a == 1
  std::map<BigInt, std::vector<int>> h_parts;
  for (const PartitionType& pt : p_parts(h)) h_parts[pt.prime] = pt.parts;

  const double per_prime_tol = tol / static_cast<double>(a_factors.size());
  double result = 1.0;
  for (const auto& [p, v] : a_factors) {
    const std::vector<int> target =
        h_parts.count(p) ? h_parts[p] : std::vector<int>{};
    double qualifying = 0.0;
    double total = 0.0;
    constexpr int kSizeCap = 80;
    int s = 0;
    for (; s <= kSizeCap; ++s) {
      std::vector<int> stack;
      detail::visit_partitions(s, s == 0 ? 1 : s, stack,
                               [&](const std::vector<int>& lambda) {
                                 const double m = lambda_p_mass(
                                     PartitionType{p, lambda}, u);
                                 total += m;
                                 if (detail::truncate_partition(lambda, v) ==
                                     target)
                                   qualifying += m;
                               });
      if (1.0 - total < per_prime_tol) break;
    }
    if (s > kSizeCap)
      throw CapExceededError("lambda tensor mass: tolerance unreachable");
    result *= qualifying;
  }
  return result;
}

/// All partitions of every size up to max_size, as p-groups of the given
/// prime. Used by normalization tests and distribution references.
inline std::vector<PartitionType> p_groups_up_to(const BigInt& p,
                                                 int max_size) {
  std::vector<PartitionType> out;
  for (int s = 0; s <= max_size; ++s) {
    std::vector<int> stack;
    detail::visit_partitions(s, s == 0 ? 1 : s, stack,
                             [&](const std::vector<int>& lambda) {
                               out.push_back(PartitionType{p, lambda});
                             });
  }
  return out;
}

/// All isomorphism classes of abelian groups with exponent dividing a and
/// p-rank at most max_rank.
inline std::vector<AbelianGroup> abelian_groups_exponent_dividing(
    const BigInt& a, int max_rank) {
  std::vector<AbelianGroup> out{AbelianGroup::trivial()};
  for (const auto& [p, v] : factorize(a)) {
    // partitions with parts <= v and length <= max_rank
    std::vector<std::vector<int>> local{{}};
    std::vector<int> stack;
    for (int s = 1; s <= v * max_rank; ++s)
      detail::visit_partitions(s, v, stack, [&](const std::vector<int>& lam) {
        if (static_cast<int>(lam.size()) <= max_rank) local.push_back(lam);
      });
    std::vector<AbelianGroup> next;
    for (const AbelianGroup& g : out)
      for (const std::vector<int>& lam : local) {
        if (lam.empty()) {
          next.push_back(g);
          continue;
        }
        std::vector<PartitionType> parts = p_parts(g);
        parts.push_back(PartitionType{p, lam});
        next.push_back(from_p_parts(parts));
      }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace groupmix
