#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "groupmix/errors.hpp"
#include "groupmix/group.hpp"

namespace groupmix {

inline constexpr double kMassTolerance = 1e-9;
inline constexpr double kNegativeClamp = 1e-12;

/// Dense signed measure on a finite group: one real weight per element.
struct SignedMeasure {
  GroupPtr group;
  std::vector<double> weights;

  double total_mass() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }

  /// Probability-measure refinement: weights >= -1e-12 (clamped to zero,
  /// absorbing convolution round-off) and total mass within 1e-9 of 1.
  bool is_probability() const {
    double s = 0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < -kNegativeClamp) return false;
      s += w;
    }
    return std::abs(s - 1.0) <= kMassTolerance;
  }

  SignedMeasure clamped() const {
    SignedMeasure out = *this;
    for (double& w : out.weights)
      if (w < 0 && w >= -kNegativeClamp) w = 0;
    return out;
  }

  std::vector<Element> support() const {
    std::vector<Element> s;
    for (Element g = 0; g < weights.size(); ++g)
      if (weights[g] != 0.0) s.push_back(g);
    return s;
  }
};

inline void require_same_group(const SignedMeasure& a, const SignedMeasure& b) {
  if (a.group.get() != b.group.get())
    throw GroupMismatchError("measures live on different groups");
}

inline SignedMeasure dirac(const GroupPtr& g, Element x) {
  if (x >= g->order()) throw GroupMismatchError("dirac point out of range");
  SignedMeasure m{g, std::vector<double>(g->order(), 0.0)};
  m.weights[x] = 1.0;
  return m;
}

inline SignedMeasure uniform(const GroupPtr& g) {
  return SignedMeasure{g, std::vector<double>(g->order(), 1.0 / g->order())};
}

/// Uniform probability measure on the given support set.
inline SignedMeasure uniform_on(const GroupPtr& g,
                                const std::vector<Element>& support) {
  SignedMeasure m{g, std::vector<double>(g->order(), 0.0)};
  for (Element x : support) m.weights[x] = 1.0 / support.size();
  return m;
}

/// (mu * nu)(g) = sum_h mu(h) nu(h^{-1} g); the law of a product XY of
/// independent X ~ mu, Y ~ nu.
inline SignedMeasure convolve(const SignedMeasure& mu, const SignedMeasure& nu) {
  require_same_group(mu, nu);
  const FiniteGroup& g = *mu.group;
  const std::size_t n = g.order();
  SignedMeasure out{mu.group, std::vector<double>(n, 0.0)};
  for (Element h = 0; h < n; ++h) {
    const double mh = mu.weights[h];
    if (mh == 0.0) continue;
    const Element* row = g.row(h);
    for (Element k = 0; k < n; ++k) out.weights[row[k]] += mh * nu.weights[k];
  }
  return out;
}

/// f_* mu(t) = mu(f^{-1}(t)); mass-preserving by construction.
inline SignedMeasure pushforward(const Homomorphism& f, const SignedMeasure& mu) {
  if (f.source.get() != mu.group.get())
    throw GroupMismatchError("pushforward domain mismatch");
  SignedMeasure out{f.target, std::vector<double>(f.target->order(), 0.0)};
  for (Element g = 0; g < mu.weights.size(); ++g)
    out.weights[f.map[g]] += mu.weights[g];
  return out;
}

/// Pushforward along the left-coset set map G -> G/H (no group structure on
/// the target required; H need not be normal).
inline std::vector<double> pushforward_cosets(const LeftCosets& cosets,
                                              const SignedMeasure& mu) {
  std::vector<double> out(cosets.cosets.size(), 0.0);
  for (Element g = 0; g < mu.weights.size(); ++g)
    out[cosets.coset_of[g]] += mu.weights[g];
  return out;
}

inline double l2_norm(const SignedMeasure& mu) {
  double s = 0;
  for (double w : mu.weights) s += w * w;
  return std::sqrt(s);
}

inline double l2_distance(const SignedMeasure& a, const SignedMeasure& b) {
  require_same_group(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    const double d = a.weights[i] - b.weights[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double l2_distance_sq(const SignedMeasure& a, const SignedMeasure& b) {
  const double d = l2_distance(a, b);
  return d * d;
}

/// Orthogonal projection onto M_H, the subspace of measures uniform on each
/// left coset of H: projected(gh) = mu(gH)/|H|. residual_norm is the L2
/// distance from mu to M_H.
struct SubspaceProjection {
  Subgroup subgroup;
  SignedMeasure projected;
  double residual_norm;
};

inline SubspaceProjection project_coset_uniform(const SignedMeasure& mu,
                                                const Subgroup& h) {
  if (h.parent.get() != mu.group.get())
    throw GroupMismatchError("subgroup belongs to a different group");
  LeftCosets cosets = left_cosets(mu.group, h);
  std::vector<double> masses = pushforward_cosets(cosets, mu);
  SignedMeasure proj{mu.group, std::vector<double>(mu.weights.size(), 0.0)};
  const double inv_h = 1.0 / static_cast<double>(h.order());
  for (Element g = 0; g < proj.weights.size(); ++g)
    proj.weights[g] = masses[cosets.coset_of[g]] * inv_h;
  const double residual = l2_distance(mu, proj);
  return SubspaceProjection{h, std::move(proj), residual};
}

/// The two summands of ||mu - pi||^2 = |H|^{-1} ||P_* mu - P_* pi||^2
///                                     + d(mu, M_H)^2,
/// returned as (quotient_part, residual_part).
inline std::pair<double, double> l2_decomposition_check(const SignedMeasure& mu,
                                                        const Subgroup& h) {
  if (h.parent.get() != mu.group.get())
    throw GroupMismatchError("subgroup belongs to a different group");
  LeftCosets cosets = left_cosets(mu.group, h);
  std::vector<double> pushed = pushforward_cosets(cosets, mu);
  std::vector<double> pushed_pi = pushforward_cosets(cosets, uniform(mu.group));
  double quotient_part = 0;
  for (std::size_t c = 0; c < pushed.size(); ++c) {
    const double d = pushed[c] - pushed_pi[c];
    quotient_part += d * d;
  }
  quotient_part /= static_cast<double>(h.order());
  SubspaceProjection proj = project_coset_uniform(mu, h);
  return {quotient_part, proj.residual_norm * proj.residual_norm};
}

/// Restrict a measure supported inside subgroup H to H realized as a group
/// of its own. Mass outside H is dropped; callers check support first.
inline SignedMeasure restrict_to_subgroup(const SignedMeasure& mu,
                                          const RealizedSubgroup& sub) {
  SignedMeasure out{sub.group, std::vector<double>(sub.group->order(), 0.0)};
  for (std::size_t i = 0; i < sub.to_parent.size(); ++i)
    out.weights[i] = mu.weights[sub.to_parent[i]];
  return out;
}

}  // namespace groupmix
