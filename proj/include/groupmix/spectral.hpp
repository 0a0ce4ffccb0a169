#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "groupmix/errors.hpp"
#include "groupmix/group.hpp"
#include "groupmix/measure.hpp"

namespace groupmix {

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), entries(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

/// Matrix of the convolution operator nu -> nu * mu in the Dirac basis:
/// entry (g, h) = mu(h^{-1} g).
inline DenseMatrix convolution_matrix(const SignedMeasure& mu) {
  const FiniteGroup& g = *mu.group;
  const std::size_t n = g.order();
  DenseMatrix m(n, n);
  for (Element col = 0; col < n; ++col) {
    const Element ci = g.inv(col);
    for (Element row = 0; row < n; ++row)
      m.at(row, col) = mu.weights[g.mul(ci, row)];
  }
  return m;
}

/// Singular values in descending order, via one-sided Jacobi: rotate column
/// pairs until mutually orthogonal, then read off the column norms. Chosen
/// over an eigensolve of M^T M because tiny singular values come out with
/// absolute accuracy near machine epsilon, which the sigma == 0 golden cases
/// rely on. Deterministic: fixed cyclic sweep order.
inline std::vector<double> singular_values(const DenseMatrix& m) {
  if (m.rows != m.cols)
    throw DimensionCapError("singular_values expects a square matrix");
  if (m.rows > 4096)
    throw DimensionCapError("matrix dimension exceeds 4096");
  const std::size_t n = m.rows;
  if (n == 0) return {};
  // Column-major copy; rotations act on column pairs.
  std::vector<double> a(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a[c * n + r] = m.entries[r * n + c];

  constexpr double kOrthTol = 1e-14;
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double* cp = a.data() + p * n;
        double* cq = a.data() + q * n;
        double app = 0, aqq = 0, apq = 0;
        for (std::size_t i = 0; i < n; ++i) {
          app += cp[i] * cp[i];
          aqq += cq[i] * cq[i];
          apq += cp[i] * cq[i];
        }
        if (std::abs(apq) <= kOrthTol * std::sqrt(app * aqq) || apq == 0.0)
          continue;
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = cp[i], y = cq[i];
          cp[i] = c * x - s * y;
          cq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[c * n + i] * a[c * n + i];
    sv[c] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

/// Second-largest singular value, multiplicity counted: singular values
/// (1, 1, 0) report 1. A 1x1 operator reports 0 so that product bounds stay
/// vacuously valid for Dirac steps.
inline double second_of(const std::vector<double>& sv) {
  return sv.size() >= 2 ? sv[1] : 0.0;
}

struct SpectralReport {
  std::vector<double> singular_values;  // descending
  double second_largest = 0.0;
  Subgroup subgroup_used;
};

/// Second-largest singular value of *mu as an operator on
/// L^2(<supp mu>): the measure is restricted to the subgroup its support
/// generates, where the walk actually mixes.
inline SpectralReport second_singular_value(const SignedMeasure& mu) {
  Subgroup h = generated_subgroup(mu.group, mu.support());
  RealizedSubgroup sub = realize_subgroup(h);
  SignedMeasure restricted = restrict_to_subgroup(mu, sub);
  std::vector<double> sv = singular_values(convolution_matrix(restricted));
  SpectralReport rep;
  rep.second_largest = second_of(sv);
  rep.singular_values = std::move(sv);
  rep.subgroup_used = std::move(h);
  return rep;
}

/// epsilon such that no coset of a proper subgroup carries mass above
/// 1 - epsilon. Coset mass is monotone under subgroup inclusion, so only
/// maximal proper subgroups need scanning; for abelian groups these are
/// exactly the index-p subgroups.
inline double epsilon_balanced(const SignedMeasure& mu,
                               const SubgroupLattice& lattice) {
  if (lattice.group.get() != mu.group.get())
    throw GroupMismatchError("lattice belongs to a different group");
  if (mu.group->order() == 1) return 1.0;  // no proper subgroup constrains mass
  double max_mass = 0.0;
  for (std::size_t i : lattice.maximal_proper()) {
    LeftCosets cosets = left_cosets(mu.group, lattice.subgroups[i]);
    std::vector<double> masses = pushforward_cosets(cosets, mu);
    for (double m : masses) max_mass = std::max(max_mass, m);
  }
  return 1.0 - max_mass;
}

inline double epsilon_balanced(const SignedMeasure& mu,
                               std::size_t lattice_cap = 256) {
  return epsilon_balanced(mu, subgroup_lattice(mu.group, lattice_cap));
}

/// General-group singular value bound exp(-eps / (2 |G|^3)).
inline double sigma_bound_general(double epsilon, std::size_t group_order) {
  const double cube = static_cast<double>(group_order) *
                      static_cast<double>(group_order) *
                      static_cast<double>(group_order);
  return std::exp(-epsilon / (2.0 * cube));
}

/// Abelian bound exp(-eps / a^2) for groups of exponent dividing a.
inline double sigma_bound_abelian(double epsilon, std::size_t a) {
  return std::exp(-epsilon / (static_cast<double>(a) * static_cast<double>(a)));
}

}  // namespace groupmix
