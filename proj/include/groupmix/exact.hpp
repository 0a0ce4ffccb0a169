#pragma once

// Opt-in exact-rational measure arithmetic. Not part of the default double
// pipeline; include this header when a dispute needs settling exactly.

#include <vector>

#include "groupmix/group.hpp"
#include "groupmix/int_matrix.hpp"

namespace groupmix {

inline std::vector<BigRational> exact_convolve(
    const FiniteGroup& g, const std::vector<BigRational>& mu,
    const std::vector<BigRational>& nu) {
  const std::size_t n = g.order();
  std::vector<BigRational> out(n, BigRational(0));
  for (Element h = 0; h < n; ++h) {
    if (mu[h] == 0) continue;
    const Element* row = g.row(h);
    for (Element k = 0; k < n; ++k)
      if (nu[k] != 0) out[row[k]] += mu[h] * nu[k];
  }
  return out;
}

inline std::vector<BigRational> exact_uniform_on(
    const FiniteGroup& g, const std::vector<Element>& support) {
  std::vector<BigRational> out(g.order(), BigRational(0));
  for (Element x : support) out[x] = BigRational(1, support.size());
  return out;
}

inline BigRational exact_l2_distance_sq_to_uniform(
    const FiniteGroup& g, const std::vector<BigRational>& mu) {
  BigRational total(0);
  const BigRational pi(1, g.order());
  for (const BigRational& w : mu) {
    const BigRational d = w - pi;
    total += d * d;
  }
  return total;
}

}  // namespace groupmix
