#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "groupmix/balanced.hpp"
#include "groupmix/errors.hpp"
#include "groupmix/group.hpp"
#include "groupmix/measure.hpp"

namespace groupmix {

/// Homomorphism (Z/a)^n -> G on the standard generators, with G a small
/// abelian group realized as a Cayley table. images[j] is f(e_j).
struct HomMap {
  GroupPtr target;
  std::vector<Element> images;
  std::int64_t a = 2;

  std::size_t n() const { return images.size(); }

  void validate() const {
    for (Element x : images) {
      Element y = 0;
      for (std::int64_t i = 0; i < a; ++i) y = target->mul(y, x);
      if (y != 0)
        throw ConfigInvalidError("image order does not divide the modulus");
    }
  }
};

namespace detail {

/// x added k times (k >= 0) in the target group.
inline Element scalar_mul(const FiniteGroup& g, Element x, std::int64_t k) {
  Element y = 0;
  for (std::int64_t i = 0; i < k; ++i) y = g.mul(y, x);
  return y;
}

/// Span of the images outside the dropped blocks.
inline Subgroup span_outside(const HomMap& f, const Partition& p,
                             const std::vector<bool>& dropped) {
  std::vector<Element> gens;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    if (dropped[b]) continue;
    for (std::size_t j : p.blocks[b]) gens.push_back(f.images[j]);
  }
  return generated_subgroup(f.target, gens);
}

/// Visits all subsets sigma of the partition blocks with |union sigma|
/// strictly below the size limit; fn(dropped, union_size).
template <typename Fn>
void visit_block_subsets(const Partition& p, std::size_t size_limit,
                         std::vector<bool>& dropped, std::size_t b,
                         std::size_t union_size, Fn&& fn) {
  if (b == p.blocks.size()) {
    fn(dropped, union_size);
    return;
  }
  visit_block_subsets(p, size_limit, dropped, b + 1, union_size, fn);
  const std::size_t grown = union_size + p.blocks[b].size();
  if (grown < size_limit) {
    dropped[b] = true;
    visit_block_subsets(p, size_limit, dropped, b + 1, grown, fn);
    dropped[b] = false;
  }
}

}  // namespace detail

/// f is a P-code of distance w when every sigma subset of P with
/// |union sigma| < w leaves the remaining images generating all of G.
/// Vacuously true for w <= 0. Exhaustive over block subsets; #P is capped.
inline bool is_code(const HomMap& f, const Partition& p, double w) {
  if (p.ground_size != f.n())
    throw ConfigInvalidError("partition does not match the map arity");
  if (p.blocks.size() > 20)
    throw CapExceededError("code check capped at 20 partition blocks");
  if (w <= 0) return true;
  const std::size_t limit =
      static_cast<std::size_t>(std::ceil(w));  // |union| < w  <=>  < ceil(w) for integer sizes
  bool ok = true;
  std::vector<bool> dropped(p.blocks.size(), false);
  detail::visit_block_subsets(
      p, limit, dropped, 0, 0,
      [&](const std::vector<bool>& drop, std::size_t union_size) {
        if (!ok) return;
        if (static_cast<double>(union_size) >= w) return;
        if (detail::span_outside(f, p, drop).order() != f.target->order())
          ok = false;
      });
  return ok;
}

/// Largest w such that f is a P-code of distance w: the least |union sigma|
/// that breaks surjectivity (0 when f itself is not surjective).
inline std::size_t max_code_distance(const HomMap& f, const Partition& p) {
  if (p.blocks.size() > 20)
    throw CapExceededError("code check capped at 20 partition blocks");
  std::size_t best = f.n() + 1;
  std::vector<bool> dropped(p.blocks.size(), false);
  detail::visit_block_subsets(
      p, f.n() + 1, dropped, 0, 0,
      [&](const std::vector<bool>& drop, std::size_t union_size) {
        if (union_size >= best) return;
        if (detail::span_outside(f, p, drop).order() != f.target->order())
          best = union_size;
      });
  return best == f.n() + 1 ? f.n() : best;
}

/// (P, delta)-depth: the maximal D > 1 such that some sigma with
/// |union sigma| < ell(D) * delta * n has [G : f(V minus sigma)] = D, else 1.
/// When several (sigma, D) pairs qualify the numeric maximum D wins.
struct DepthReport {
  std::int64_t depth = 1;
  std::vector<std::size_t> witness;  // dropped block indices
  std::int64_t index = 1;            // [G : f(V minus witness)]
  int ell_depth = 0;                 // ell(depth)
};

inline DepthReport depth(const HomMap& f, const Partition& p, double delta) {
  if (p.ground_size != f.n())
    throw ConfigInvalidError("partition does not match the map arity");
  if (p.blocks.size() > 20)
    throw CapExceededError("depth is computed exhaustively; #P capped at 20");
  const double n = static_cast<double>(f.n());
  DepthReport best;
  std::vector<bool> dropped(p.blocks.size(), false);
  detail::visit_block_subsets(
      p, f.n() + 1, dropped, 0, 0,
      [&](const std::vector<bool>& drop, std::size_t union_size) {
        const Subgroup span = detail::span_outside(f, p, drop);
        const std::int64_t index =
            static_cast<std::int64_t>(f.target->order() / span.order());
        if (index <= best.depth) return;
        const int l = ell(BigInt(index));
        if (static_cast<double>(union_size) < l * delta * n) {
          best.depth = index;
          best.index = index;
          best.ell_depth = l;
          best.witness.clear();
          for (std::size_t b = 0; b < drop.size(); ++b)
            if (drop[b]) best.witness.push_back(b);
        }
      });
  if (best.depth == 1) {
    best.index = 1;
    best.ell_depth = 0;
  }
  return best;
}

// ---------------------------------------------------------------------------
// depth census against the counting bound
// ---------------------------------------------------------------------------

struct DepthCensusRow {
  std::int64_t depth = 1;
  std::size_t count = 0;
  double bound = 0.0;  // only for depth > 1
  bool within_bound = true;
};

inline double binomial(std::size_t n, long long k) {
  if (k < 0 || static_cast<std::size_t>(k) > n) return 0.0;
  double r = 1.0;
  for (long long i = 0; i < k; ++i)
    r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return r;
}

/// Exhaustive census of Hom((Z/a)^n, G) by depth, with the counting bound
///   K * C(n, ceil(l d n) - 1) * 2^{l d n} * |G|^n * D^{-n + l d n}
/// checked for each D > 1 (K = number of index-D subgroups, l = ell(D),
/// d = delta).
inline std::vector<DepthCensusRow> depth_census(std::size_t n, std::int64_t a,
                                                const GroupPtr& g,
                                                const Partition& p,
                                                double delta) {
  // Torsion subgroup G[a]: candidate generator images.
  std::vector<Element> torsion;
  for (Element x = 0; x < g->order(); ++x)
    if (detail::scalar_mul(*g, x, a) == 0) torsion.push_back(x);
  const double total = std::pow(static_cast<double>(torsion.size()),
                                static_cast<double>(n));
  if (total > 1e7)
    throw CapExceededError("depth census needs |Hom| <= 1e7");

  std::map<std::int64_t, std::size_t> tally;
  HomMap f{g, std::vector<Element>(n, 0), a};
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    for (std::size_t j = 0; j < n; ++j) f.images[j] = torsion[idx[j]];
    tally[depth(f, p, delta).depth] += 1;
    std::size_t k = 0;
    while (k < n && ++idx[k] == torsion.size()) idx[k++] = 0;
    if (k == n) break;
  }

  SubgroupLattice lat = subgroup_lattice(g);
  std::vector<DepthCensusRow> rows;
  for (const auto& [d, count] : tally) {
    DepthCensusRow row;
    row.depth = d;
    row.count = count;
    if (d > 1) {
      std::size_t subgroups_of_index = 0;
      for (const Subgroup& h : lat.subgroups)
        if (h.index() == static_cast<std::size_t>(d)) ++subgroups_of_index;
      const double l = ell(BigInt(d));
      const double ldn = l * delta * static_cast<double>(n);
      row.bound = static_cast<double>(subgroups_of_index) *
                  binomial(n, static_cast<long long>(std::ceil(ldn)) - 1) *
                  std::pow(2.0, ldn) *
                  std::pow(static_cast<double>(g->order()),
                           static_cast<double>(n)) *
                  std::pow(static_cast<double>(d),
                           -static_cast<double>(n) + ldn);
      row.within_bound = static_cast<double>(count) <= row.bound;
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// exact equidistribution against the walk bound
// ---------------------------------------------------------------------------

struct EquidistributionReport {
  double probability = 0.0;  // exact P[f(M) = targets]
  double gap = 0.0;          // |probability - |G|^{-r}|
  double bound = 0.0;        // N exp(-eps w / (l N a^2))
  std::size_t code_distance = 0;
  bool within_bound = false;
};

/// Exact image distribution of f applied to an n x r random matrix whose
/// row blocks are independent draws of the sampler: treats f(M) as a walk in
/// G^r, convolving one pushed block measure per row block.
inline EquidistributionReport equidistribution_gap(
    const HomMap& f, const Partition& row_partition,
    const BlockSampler& sampler, std::size_t r,
    const std::vector<Element>& targets, double epsilon) {
  if (targets.size() != r)
    throw ConfigInvalidError("target tuple must have one entry per column");
  const std::size_t w = max_code_distance(f, row_partition);
  if (w == 0)
    throw HypothesisViolatedError("map is not a code: not even surjective");

  // G^r with index g_1 |G|^{r-1} + ... + g_r.
  GroupPtr power = f.target;
  for (std::size_t i = 1; i < r; ++i) power = FiniteGroup::product(power, f.target);
  const std::size_t gsize = f.target->order();

  SignedMeasure acc = dirac(power, 0);
  for (const auto& block : row_partition.blocks) {
    SignedMeasure step{power, std::vector<double>(power->order(), 0.0)};
    enumerate_block(
        sampler, block.size(), r, f.a,
        [&](const std::vector<std::int64_t>& entries, double prob) {
          std::size_t index = 0;
          for (std::size_t c = 0; c < r; ++c) {
            Element y = 0;
            for (std::size_t bi = 0; bi < block.size(); ++bi)
              y = f.target->mul(
                  y, detail::scalar_mul(*f.target, f.images[block[bi]],
                                        entries[bi * r + c]));
            index = index * gsize + y;
          }
          step.weights[index] += prob;
        });
    acc = convolve(acc, step);
  }

  std::size_t target_index = 0;
  for (Element t : targets) target_index = target_index * gsize + t;

  EquidistributionReport rep;
  rep.probability = acc.weights[target_index];
  rep.gap = std::abs(rep.probability -
                     std::pow(static_cast<double>(gsize), -static_cast<double>(r)));
  const double subgroups =
      static_cast<double>(subgroup_lattice(f.target).size());
  const double l = static_cast<double>(row_partition.max_block());
  rep.code_distance = w;
  rep.bound = subgroups * std::exp(-epsilon * static_cast<double>(w) /
                                   (l * subgroups * static_cast<double>(f.a) *
                                    static_cast<double>(f.a)));
  rep.within_bound = rep.gap <= rep.bound + 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// multiplicative error combination
// ---------------------------------------------------------------------------

/// |prod (1 + x_i) - 1| together with the two-sided sandwich
///   sum min(0, x_i) <= prod - 1 <= 2 sum max(0, x_i),
/// valid when all x_i >= -1 and sum max(0, x_i) <= log 2.
struct ErrorCombination {
  double product_minus_one = 0.0;
  double abs_bound = 0.0;    // 2 sum |x_i|
  double lower_bound = 0.0;  // sum min(0, x_i)
  double upper_bound = 0.0;  // 2 sum max(0, x_i)
};

inline ErrorCombination error_combination(const std::vector<double>& xs) {
  double pos = 0.0, neg = 0.0, abs_sum = 0.0, prod = 1.0;
  for (double x : xs) {
    if (x < -1.0)
      throw HypothesisViolatedError("error terms must be at least -1");
    pos += std::max(0.0, x);
    neg += std::min(0.0, x);
    abs_sum += std::abs(x);
    prod *= 1.0 + x;
  }
  if (pos > std::log(2.0))
    throw HypothesisViolatedError("positive error mass exceeds log 2");
  ErrorCombination out;
  out.product_minus_one = prod - 1.0;
  out.abs_bound = 2.0 * abs_sum;
  out.lower_bound = neg;
  out.upper_bound = 2.0 * pos;
  return out;
}

}  // namespace groupmix
