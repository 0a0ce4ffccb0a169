#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groupmix/errors.hpp"
#include "groupmix/group.hpp"
#include "groupmix/measure.hpp"
#include "groupmix/rng.hpp"
#include "groupmix/spectral.hpp"

namespace groupmix {

/// Tower of surjections G = G_0 ->> G_1 ->> ... ->> G_k = {e} with the
/// composites Qtilde_j : G ->> G_j cached and kernels H_j = ker Q_j kept as
/// subgroups of G_{j-1}.
struct QuotientChain {
  GroupPtr base;
  std::vector<GroupPtr> groups;        // G_0 .. G_k
  std::vector<Homomorphism> maps;      // Q_j, index j-1
  std::vector<Homomorphism> composed;  // Qtilde_j, index j (composed[0] = id)
  std::vector<Subgroup> kernels;       // H_j <= G_{j-1}, index j-1

  std::size_t levels() const { return maps.size(); }
};

/// Builds the tower from a strictly ascending chain of normal subgroups of G
/// ending at G itself: G_j = G / K_j. Kernels of towers of surjections from
/// G are exactly such chains, so this loses no generality.
inline QuotientChain chain_from_ascending_normal(
    const GroupPtr& g, const std::vector<Subgroup>& ascending) {
  if (ascending.empty() || ascending.back().order() != g->order())
    throw NotGeneratingError("chain must end at the full group");
  QuotientChain chain;
  chain.base = g;
  chain.groups.push_back(g);
  chain.composed.push_back(Homomorphism::identity(g));
  for (std::size_t j = 0; j < ascending.size(); ++j) {
    const Subgroup& k = ascending[j];
    if (k.parent.get() != g.get())
      throw ChainMismatchError("chain subgroup has wrong parent");
    if (j > 0) {
      const Subgroup& prev = ascending[j - 1];
      if (prev.order() > k.order() ||
          !std::includes(k.elements.begin(), k.elements.end(),
                         prev.elements.begin(), prev.elements.end()))
        throw ChainMismatchError("chain subgroups must be ascending");
    }
    if (!is_normal(g, k))
      throw NotNormalError("chain subgroup is not normal in G");
    QuotientResult q = quotient(g, k);
    const GroupPtr& prev_group = chain.groups.back();
    const Homomorphism& prev_composed = chain.composed.back();
    // Q_j : G_{j-1} -> G_j via representatives of the previous quotient.
    std::vector<Element> step(prev_group->order());
    for (Element c = 0; c < prev_group->order(); ++c) {
      Element rep = 0;
      for (Element x = 0; x < g->order(); ++x)
        if (prev_composed.map[x] == c) {
          rep = x;
          break;
        }
      step[c] = q.projection.map[rep];
    }
    Homomorphism qj{prev_group, q.group, std::move(step), true};
    std::vector<Element> kernel_elems;
    for (Element c = 0; c < prev_group->order(); ++c)
      if (qj.map[c] == 0) kernel_elems.push_back(c);
    chain.kernels.push_back(Subgroup{prev_group, std::move(kernel_elems)});
    chain.maps.push_back(std::move(qj));
    chain.groups.push_back(q.group);
    chain.composed.push_back(q.projection);
  }
  return chain;
}

/// Time-inhomogeneous walk: ordered probability steps on one group.
struct WalkInstance {
  GroupPtr group;
  std::vector<SignedMeasure> steps;
};

inline void validate_walk(const WalkInstance& w) {
  for (const SignedMeasure& mu : w.steps) {
    if (mu.group.get() != w.group.get())
      throw GroupMismatchError("walk step lives on a different group");
    if (!mu.is_probability())
      throw GroupMismatchError("walk step is not a probability measure");
  }
}

/// ||mu_1 * ... * mu_n - pi||^2 folded left-to-right from the Dirac at e.
inline double exact_walk_distance(const WalkInstance& w) {
  validate_walk(w);
  SignedMeasure nu = dirac(w.group, 0);
  for (const SignedMeasure& mu : w.steps) nu = convolve(nu, mu);
  return l2_distance_sq(nu, uniform(w.group));
}

/// I_j = { i : <supp (Qtilde_{j-1})_* mu_i> = H_j }, exact set equality of
/// subgroups (not isomorphism). Levels are 0-based here: entry j holds I_{j+1}.
inline std::vector<std::vector<std::size_t>> classify_steps(
    const WalkInstance& w, const QuotientChain& chain) {
  if (chain.base.get() != w.group.get())
    throw ChainMismatchError("chain built over a different group");
  std::vector<std::vector<std::size_t>> classes(chain.levels());
  for (std::size_t j = 0; j < chain.levels(); ++j) {
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
      SignedMeasure pushed = pushforward(chain.composed[j], w.steps[i]);
      Subgroup gen = generated_subgroup(chain.groups[j], pushed.support());
      if (gen.elements == chain.kernels[j].elements) classes[j].push_back(i);
    }
  }
  return classes;
}

inline double infinite_bound() {
  return std::numeric_limits<double>::infinity();
}

/// Outcome of a bound evaluation. When some level has no classified step the
/// theorem gives no bound and rhs is the +infinity marker rather than an
/// error, so sweeps can record the instance and move on.
struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool feasible = false;
  std::vector<std::vector<std::size_t>> classification;      // per level
  std::vector<std::map<std::size_t, double>> per_step_sigma;  // per level
  std::vector<double> level_terms;
  // Filled by normal_family_bound: the subadditive bound (sum of sigma
  // products, squared) and its own step classification.
  std::optional<double> corollary_rhs;
  std::optional<bool> corollary_feasible;
};

/// The quotient-chain mixing bound
///   ||nu_n - pi||^2 <= sum_j (|G_{j-1}| - 1)/|G| * prod_{i in I_j} sigma_i^2
/// with sigma_i the second singular value of the pushed step's operator on
/// L^2(H_j). Levels with empty I_j make the instance infeasible.
inline BoundReport strong_walk_bound(const WalkInstance& w,
                                     const QuotientChain& chain) {
  validate_walk(w);
  BoundReport report;
  report.classification = classify_steps(w, chain);
  report.per_step_sigma.resize(chain.levels());
  report.feasible = true;
  for (const auto& cls : report.classification)
    if (cls.empty()) report.feasible = false;

  const double order_g = static_cast<double>(w.group->order());
  double rhs = 0.0;
  for (std::size_t j = 0; j < chain.levels(); ++j) {
    if (report.classification[j].empty()) {
      report.level_terms.push_back(infinite_bound());
      rhs = infinite_bound();
      continue;
    }
    RealizedSubgroup kernel = realize_subgroup(chain.kernels[j]);
    double prod_sq = 1.0;
    for (std::size_t i : report.classification[j]) {
      SignedMeasure pushed = pushforward(chain.composed[j], w.steps[i]);
      SignedMeasure on_kernel = restrict_to_subgroup(pushed, kernel);
      const double sigma =
          second_of(singular_values(convolution_matrix(on_kernel)));
      report.per_step_sigma[j][i] = sigma;
      prod_sq *= sigma * sigma;
    }
    const double term =
        (static_cast<double>(chain.groups[j]->order()) - 1.0) / order_g *
        prod_sq;
    report.level_terms.push_back(term);
    if (rhs != infinite_bound()) rhs += term;
  }
  report.rhs = report.feasible ? rhs : infinite_bound();
  report.lhs = exact_walk_distance(w);
  return report;
}

/// Subgroup-family form: given H_1, ..., H_k with the image of H_j normal in
/// G / H_1...H_{j-1} and the products ascending to G, constructs the chain
/// G -> G/H_1 -> G/H_1H_2 -> ... and evaluates the chain bound; additionally
/// reports the subadditive bound (sum over j of prod_{i in I_{H_j}} sigma_i,
/// squared), where step i joins I_{H_j} when <supp mu_i> = H_j in G itself
/// and sigma_i is taken on L^2(<supp mu_i>).
inline BoundReport normal_family_bound(const WalkInstance& w,
                                       const std::vector<Subgroup>& family) {
  validate_walk(w);
  const GroupPtr& g = w.group;
  if (family.empty()) throw NotGeneratingError("empty subgroup family");
  // K_j = H_1 ... H_j; normality of the image of H_j in G/K_{j-1} is
  // equivalent to K_j being normal in G (correspondence theorem), given
  // K_{j-1} normal by induction.
  std::vector<Subgroup> products;
  std::vector<Element> acc_gens;
  for (const Subgroup& h : family) {
    if (h.parent.get() != g.get())
      throw GroupMismatchError("family subgroup has wrong parent");
    acc_gens.insert(acc_gens.end(), h.elements.begin(), h.elements.end());
    Subgroup k = generated_subgroup(g, acc_gens);
    if (!is_normal(g, k))
      throw NotNormalInQuotientError(
          "image of family subgroup is not normal in the quotient");
    products.push_back(std::move(k));
  }
  if (products.back().order() != g->order())
    throw NotGeneratingError("family does not generate the group");

  // Drop repeated products (levels with trivial kernel contribute nothing).
  std::vector<Subgroup> ascending;
  std::vector<std::size_t> family_at_level;  // family index per chain level
  for (std::size_t j = 0; j < products.size(); ++j) {
    if (!ascending.empty() && ascending.back() == products[j]) continue;
    ascending.push_back(products[j]);
    family_at_level.push_back(j);
  }
  QuotientChain chain = chain_from_ascending_normal(g, ascending);
  BoundReport report = strong_walk_bound(w, chain);

  bool corollary_feasible = true;
  double sum = 0.0;
  for (const Subgroup& h : family) {
    std::vector<std::size_t> in_class;
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
      Subgroup gen = generated_subgroup(g, w.steps[i].support());
      if (gen == h) in_class.push_back(i);
    }
    if (in_class.empty()) {
      corollary_feasible = false;
      break;
    }
    double prod = 1.0;
    for (std::size_t i : in_class)
      prod *= second_singular_value(w.steps[i]).second_largest;
    sum += prod;
  }
  report.corollary_feasible = corollary_feasible;
  report.corollary_rhs = corollary_feasible ? sum * sum : infinite_bound();
  return report;
}

/// Greedy quotient-chain heuristic: repeatedly extend by the largest normal
/// subgroup strictly containing the current one. Non-canonical; when several
/// normal towers exist the choice of chain is genuinely a modeling input.
inline std::vector<Subgroup> greedy_normal_chain(const GroupPtr& g,
                                                 const SubgroupLattice& lat) {
  std::vector<std::size_t> normal;
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (is_normal(g, lat.subgroups[i])) normal.push_back(i);
  std::vector<Subgroup> chain;
  std::size_t current = 0;  // trivial subgroup is first (sorted by order)
  while (lat.subgroups[current].order() < g->order()) {
    // Largest proper normal extension of the current subgroup, else G.
    std::size_t best = lat.size() - 1;
    for (std::size_t i : normal) {
      if (i == current || !lat.leq[current][i]) continue;
      if (lat.subgroups[i].order() == g->order()) continue;
      if (lat.subgroups[best].order() == g->order() ||
          lat.subgroups[i].order() > lat.subgroups[best].order())
        best = i;
    }
    chain.push_back(lat.subgroups[best]);
    current = best;
  }
  return chain;
}

inline std::vector<Subgroup> greedy_normal_chain(const GroupPtr& g,
                                                 std::size_t cap = 256) {
  return greedy_normal_chain(g, subgroup_lattice(g, cap));
}

// ---------------------------------------------------------------------------
// golden instances from the worked examples
// ---------------------------------------------------------------------------

/// The three-step A5 walk with steps uniform on <(1 2 3)>, <(1 2 4)>,
/// <(1 2 5)>: each step mixes instantly on its own cyclic subgroup, yet the
/// product provably cannot reach permutations sending 3 to 4.
struct A5CounterexampleReport {
  double probability_3_to_4 = 0.0;   // exactly zero
  double uniform_reference = 0.0;    // 1/5 under the uniform distribution
  double walk_distance_sq = 0.0;     // strictly positive
  std::array<double, 3> step_sigmas{};  // all zero
};

inline A5CounterexampleReport a5_counterexample() {
  AlternatingGroup5 a5 = alternating_group_5();
  const std::vector<std::vector<int>> cycles = {{1, 2, 3}, {1, 2, 4}, {1, 2, 5}};
  WalkInstance w{a5.group, {}};
  A5CounterexampleReport rep;
  for (std::size_t s = 0; s < 3; ++s) {
    Subgroup h = generated_subgroup(a5.group, {a5_cycle(a5, cycles[s])});
    SignedMeasure mu = uniform_on(a5.group, h.elements);
    rep.step_sigmas[s] = second_singular_value(mu).second_largest;
    w.steps.push_back(std::move(mu));
  }
  SignedMeasure nu = dirac(a5.group, 0);
  for (const SignedMeasure& mu : w.steps) nu = convolve(nu, mu);
  for (Element g = 0; g < a5.group->order(); ++g) {
    if (a5.maps(g, 3, 4)) {
      rep.probability_3_to_4 += nu.weights[g];
      rep.uniform_reference += 1.0 / a5.group->order();
    }
  }
  rep.walk_distance_sq = l2_distance_sq(nu, uniform(a5.group));
  return rep;
}

inline double a5_counterexample_probability() {
  return a5_counterexample().probability_3_to_4;
}

/// Dihedral walk from the worked example: odd steps follow mu on <r>, even
/// steps flip with probability p. After 2k steps the exact distance squared
/// is bounded by sigma^k + |1-2p|^k.
struct DihedralGoldenRow {
  std::size_t n = 0;
  int k = 0;
  double p = 0.0;
  double sigma_odd = 0.0;       // second singular value of mu on <r>
  double sigma_even = 0.0;      // level-2 sigma, equals |1-2p|
  double lhs = 0.0;             // exact ||nu_{2k} - pi||^2
  double paper_bound = 0.0;     // sigma^k + |1-2p|^k
  double theorem_rhs = 0.0;     // the chain bound, tighter
  bool feasible = false;
};

inline DihedralGoldenRow dihedral_golden_instance(std::size_t n, int k,
                                                  double p) {
  GroupPtr g = FiniteGroup::dihedral(n);
  Subgroup rot = generated_subgroup(g, {1});
  QuotientChain chain =
      chain_from_ascending_normal(g, {rot, generated_subgroup(g, {1, static_cast<Element>(n)})});
  // mu on <r>: lazy step (e and r with equal mass) generates the rotations.
  SignedMeasure mu_odd{g, std::vector<double>(g->order(), 0.0)};
  mu_odd.weights[0] = 0.5;
  mu_odd.weights[1] = 0.5;
  SignedMeasure mu_even{g, std::vector<double>(g->order(), 0.0)};
  mu_even.weights[0] = 1.0 - p;
  mu_even.weights[n] = p;  // the reflection s
  WalkInstance w{g, {}};
  for (int i = 0; i < k; ++i) {
    w.steps.push_back(mu_odd);
    w.steps.push_back(mu_even);
  }
  BoundReport rep = strong_walk_bound(w, chain);
  DihedralGoldenRow row;
  row.n = n;
  row.k = k;
  row.p = p;
  row.sigma_odd = second_singular_value(mu_odd).second_largest;
  row.sigma_even = rep.per_step_sigma.size() > 1 && !rep.per_step_sigma[1].empty()
                       ? rep.per_step_sigma[1].begin()->second
                       : infinite_bound();
  row.lhs = rep.lhs;
  row.paper_bound = std::pow(row.sigma_odd, k) + std::pow(std::abs(1 - 2 * p), k);
  row.theorem_rhs = rep.rhs;
  row.feasible = rep.feasible;
  return row;
}

// ---------------------------------------------------------------------------
// randomized soundness suite
// ---------------------------------------------------------------------------

struct WalkSoundnessRow {
  std::string group_name;
  std::size_t steps = 0;
  std::size_t levels = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool feasible = false;
  bool pass = false;
};

namespace detail {

struct SuiteGroup {
  std::string name;
  GroupPtr group;
  SubgroupLattice lattice;
  std::vector<std::size_t> normal_indices;
};

inline std::vector<SuiteGroup> walk_suite_groups() {
  std::vector<std::pair<std::string, GroupPtr>> defs;
  defs.emplace_back("D6", FiniteGroup::dihedral(3));
  defs.emplace_back("D8", FiniteGroup::dihedral(4));
  defs.emplace_back("D12", FiniteGroup::dihedral(6));
  defs.emplace_back("Q8", FiniteGroup::quaternion());
  defs.emplace_back("Z12", FiniteGroup::cyclic(12));
  defs.emplace_back("Z2xZ2", FiniteGroup::product(FiniteGroup::cyclic(2),
                                                  FiniteGroup::cyclic(2)));
  defs.emplace_back("Z2xZ4", FiniteGroup::product(FiniteGroup::cyclic(2),
                                                  FiniteGroup::cyclic(4)));
  defs.emplace_back("Z3xZ3", FiniteGroup::product(FiniteGroup::cyclic(3),
                                                  FiniteGroup::cyclic(3)));
  defs.emplace_back("Z6xZ6", FiniteGroup::product(FiniteGroup::cyclic(6),
                                                  FiniteGroup::cyclic(6)));
  defs.emplace_back("Z2xZ2xZ2", FiniteGroup::product(
                                    FiniteGroup::product(FiniteGroup::cyclic(2),
                                                         FiniteGroup::cyclic(2)),
                                    FiniteGroup::cyclic(2)));
  std::vector<SuiteGroup> out;
  for (auto& [name, g] : defs) {
    SuiteGroup sg{name, g, subgroup_lattice(g), {}};
    for (std::size_t i = 0; i < sg.lattice.size(); ++i)
      if (is_normal(g, sg.lattice.subgroups[i])) sg.normal_indices.push_back(i);
    out.push_back(std::move(sg));
  }
  return out;
}

/// Random strictly ascending chain of normal subgroups ending at G.
inline std::vector<Subgroup> random_normal_chain(const SuiteGroup& sg, Rng& rng) {
  std::vector<Subgroup> chain;
  std::size_t current = 0;  // trivial
  while (sg.lattice.subgroups[current].order() < sg.group->order()) {
    std::vector<std::size_t> candidates;
    for (std::size_t i : sg.normal_indices)
      if (i != current && sg.lattice.leq[current][i]) candidates.push_back(i);
    const std::size_t pick = candidates[rng.below(candidates.size())];
    chain.push_back(sg.lattice.subgroups[pick]);
    current = pick;
  }
  return chain;
}

/// A step whose pushforward support generates the level kernel exactly:
/// choose a generating subset of H_j in G_{j-1}, lift each element to a
/// random preimage in G, and weight randomly.
inline SignedMeasure random_step_for_level(const GroupPtr& g,
                                           const QuotientChain& chain,
                                           std::size_t level, Rng& rng) {
  const Homomorphism& to_prev = chain.composed[level];
  const Subgroup& kernel = chain.kernels[level];
  const GroupPtr& prev = chain.groups[level];
  // Grow a generating set of the kernel.
  std::vector<Element> gens;
  for (;;) {
    Subgroup got = generated_subgroup(prev, gens);
    if (got.elements == kernel.elements) break;
    gens.push_back(kernel.elements[rng.below(kernel.elements.size())]);
  }
  if (gens.empty()) gens.push_back(0);
  // Occasionally make the support richer than a minimal generating set.
  if (rng.below(2) == 0)
    gens.push_back(kernel.elements[rng.below(kernel.elements.size())]);
  SignedMeasure mu{g, std::vector<double>(g->order(), 0.0)};
  double total = 0.0;
  for (Element target : gens) {
    std::vector<Element> fiber;
    for (Element x = 0; x < g->order(); ++x)
      if (to_prev.map[x] == target) fiber.push_back(x);
    const Element lift = fiber[rng.below(fiber.size())];
    const double wgt = 0.1 + 0.9 * rng.u01();
    mu.weights[lift] += wgt;
    total += wgt;
  }
  for (double& x : mu.weights) x /= total;
  return mu;
}

}  // namespace detail

/// Randomized soundness sweep for the chain bound: random groups, random
/// normal towers, random steps with supports forced onto kernel preimages,
/// plus occasional noise steps that belong to no level.
inline std::vector<WalkSoundnessRow> walk_soundness_suite(
    std::size_t instances, std::uint64_t seed, double tolerance = 1e-8) {
  static const std::vector<detail::SuiteGroup> pool = detail::walk_suite_groups();
  std::vector<WalkSoundnessRow> rows;
  rows.reserve(instances);
  for (std::size_t inst = 0; inst < instances; ++inst) {
    Rng rng(seed, 101, inst);
    const detail::SuiteGroup& sg = pool[rng.below(pool.size())];
    std::vector<Subgroup> ascending = detail::random_normal_chain(sg, rng);
    QuotientChain chain = chain_from_ascending_normal(sg.group, ascending);
    WalkInstance w{sg.group, {}};
    for (std::size_t level = 0; level < chain.levels(); ++level) {
      const std::size_t count = 1 + rng.below(3);
      for (std::size_t c = 0; c < count; ++c)
        w.steps.push_back(detail::random_step_for_level(sg.group, chain, level, rng));
    }
    const std::size_t noise = rng.below(3);
    for (std::size_t c = 0; c < noise; ++c)
      w.steps.push_back(dirac(sg.group, static_cast<Element>(rng.below(sg.group->order()))));
    // Shuffle step order; the bound must hold for any interleaving.
    for (std::size_t i = w.steps.size(); i > 1; --i)
      std::swap(w.steps[i - 1], w.steps[rng.below(i)]);
    BoundReport rep = strong_walk_bound(w, chain);
    WalkSoundnessRow row;
    row.group_name = sg.name;
    row.steps = w.steps.size();
    row.levels = chain.levels();
    row.lhs = rep.lhs;
    row.rhs = rep.rhs;
    row.feasible = rep.feasible;
    row.pass = !rep.feasible || rep.lhs <= rep.rhs + tolerance;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace groupmix
