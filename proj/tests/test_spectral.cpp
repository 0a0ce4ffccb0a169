#include <catch2/catch_amalgamated.hpp>

#include "groupmix/spectral.hpp"
#include "helpers.hpp"

using namespace groupmix;
using Catch::Approx;

namespace {

SignedMeasure random_probability(const GroupPtr& g, Rng& rng) {
  SignedMeasure mu{g, std::vector<double>(g->order(), 0.0)};
  double total = 0;
  for (double& w : mu.weights) {
    w = rng.u01();
    total += w;
  }
  for (double& w : mu.weights) w /= total;
  return mu;
}

}  // namespace

TEST_CASE("convolution matrix") {
  auto z4 = FiniteGroup::cyclic(4);
  DenseMatrix id = convolution_matrix(dirac(z4, 0));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      REQUIRE(id.at(r, c) == (r == c ? 1.0 : 0.0));

  DenseMatrix u = convolution_matrix(uniform(z4));
  for (double e : u.entries) REQUIRE(e == Approx(0.25));

  // Applying the matrix equals convolving.
  Rng rng(20, 0, 0);
  for (const GroupPtr& g : {FiniteGroup::dihedral(4), FiniteGroup::quaternion()}) {
    SignedMeasure mu = random_probability(g, rng);
    SignedMeasure nu = random_probability(g, rng);
    DenseMatrix m = convolution_matrix(mu);
    SignedMeasure via_matrix{g, std::vector<double>(g->order(), 0.0)};
    for (std::size_t r = 0; r < g->order(); ++r)
      for (std::size_t c = 0; c < g->order(); ++c)
        via_matrix.weights[r] += m.at(r, c) * nu.weights[c];
    REQUIRE(l2_distance(via_matrix, convolve(nu, mu)) < 1e-12);
  }
}

TEST_CASE("singular values of simple matrices") {
  DenseMatrix id(3, 3);
  for (int i = 0; i < 3; ++i) id.at(i, i) = 1.0;
  auto sv = singular_values(id);
  REQUIRE(sv == std::vector<double>{1.0, 1.0, 1.0});

  DenseMatrix diag(2, 2);
  diag.at(0, 0) = 3.0;
  diag.at(1, 1) = -4.0;
  sv = singular_values(diag);
  REQUIRE(sv[0] == Approx(4.0));
  REQUIRE(sv[1] == Approx(3.0));

  // Multiplicity counts: (1, 1, 0) has second-largest value 1.
  DenseMatrix two_ones(3, 3);
  two_ones.at(0, 0) = 1.0;
  two_ones.at(1, 1) = 1.0;
  REQUIRE(second_of(singular_values(two_ones)) == Approx(1.0));

  DenseMatrix rect(2, 3);
  REQUIRE_THROWS_AS(singular_values(rect), DimensionCapError);
}

TEST_CASE("singular values match the extended-precision oracle") {
  Rng rng(21, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    DenseMatrix m(6, 6);
    for (double& e : m.entries) e = 2.0 * rng.u01() - 1.0;
    auto fast = singular_values(m);
    auto slow = oracle::singular_values_bruteforce(m);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i)
      REQUIRE(fast[i] == Approx(slow[i]).margin(1e-8));
  }
}

TEST_CASE("second singular value of walk steps") {
  // Uniform on the subgroup its support generates: instant mixing.
  auto d8 = FiniteGroup::dihedral(4);
  SignedMeasure rot_uniform = uniform_on(d8, {0, 1, 2, 3});
  SpectralReport rep = second_singular_value(rot_uniform);
  REQUIRE(rep.subgroup_used.order() == 4);
  REQUIRE(rep.second_largest <= 1e-12);

  // Z/2 coin step: singular values 1 and |1-2p|.
  auto z2 = FiniteGroup::cyclic(2);
  for (double p : {0.1, 0.25, 0.3, 0.5, 0.8}) {
    SignedMeasure coin{z2, {1.0 - p, p}};
    REQUIRE(second_singular_value(coin).second_largest ==
            Approx(std::abs(1.0 - 2.0 * p)).margin(1e-10));
  }

  // Dirac at the identity: 1x1 operator, second value defined as 0.
  SpectralReport degenerate = second_singular_value(dirac(d8, 0));
  REQUIRE(degenerate.subgroup_used.order() == 1);
  REQUIRE(degenerate.second_largest == 0.0);

  // On all of L^2(G) a step supported in a proper subgroup has sigma = 1.
  REQUIRE(second_of(singular_values(convolution_matrix(rot_uniform))) ==
          Approx(1.0).margin(1e-8));
}

TEST_CASE("probability operators have top singular value 1 and fix pi") {
  Rng rng(22, 0, 0);
  for (const GroupPtr& g : {FiniteGroup::cyclic(6), FiniteGroup::dihedral(5)}) {
    SignedMeasure mu = random_probability(g, rng);
    auto sv = singular_values(convolution_matrix(mu));
    REQUIRE(sv[0] == Approx(1.0).margin(1e-8));
    REQUIRE(l2_distance(convolve(uniform(g), mu), uniform(g)) < 1e-12);
  }
}

TEST_CASE("operator contracts equal-mass differences by sigma") {
  Rng rng(23, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const GroupPtr g = trial % 2 ? FiniteGroup::cyclic(8) : FiniteGroup::dihedral(4);
    SignedMeasure mu = random_probability(g, rng);
    const double sigma = second_of(singular_values(convolution_matrix(mu)));
    SignedMeasure nu = random_probability(g, rng);
    SignedMeasure nu2 = random_probability(g, rng);
    const double before = l2_distance(nu, nu2);
    const double after = l2_distance(convolve(nu, mu), convolve(nu2, mu));
    REQUIRE(after <= sigma * before + 1e-8);
  }
}

TEST_CASE("quotient maps never increase the mixing sigma") {
  Rng rng(24, 0, 0);
  auto q8 = FiniteGroup::quaternion();
  auto d12 = FiniteGroup::dihedral(6);
  for (int trial = 0; trial < 100; ++trial) {
    const GroupPtr g = trial % 2 ? q8 : d12;
    SubgroupLattice lat = subgroup_lattice(g);
    std::vector<Subgroup> normals;
    for (const Subgroup& h : lat.subgroups)
      if (is_normal(g, h) && h.order() > 1 && h.order() < g->order())
        normals.push_back(h);
    const Subgroup& n = normals[rng.below(normals.size())];
    QuotientResult q = quotient(g, n);
    SignedMeasure mu = random_probability(g, rng);
    const double sigma = second_singular_value(mu).second_largest;
    const double sigma_pushed =
        second_singular_value(pushforward(q.projection, mu)).second_largest;
    REQUIRE(sigma_pushed <= sigma + 1e-8);
  }
}

TEST_CASE("epsilon_balanced") {
  auto z5 = FiniteGroup::cyclic(5);
  REQUIRE(epsilon_balanced(uniform(z5)) == Approx(0.8));

  // Support inside a proper coset: some coset carries all the mass.
  auto z6 = FiniteGroup::cyclic(6);
  REQUIRE(epsilon_balanced(uniform_on(z6, {1, 3, 5})) == Approx(0.0).margin(1e-15));

  // Generating support containing e with minimum mass eps0 is eps0-balanced.
  Rng rng(25, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    auto d8 = FiniteGroup::dihedral(4);
    SignedMeasure mu{d8, std::vector<double>(8, 0.0)};
    // e, r, s generate D8.
    double rest = 1.0;
    for (Element x : {Element{1}, Element{4}}) {
      mu.weights[x] = 0.05 + 0.3 * rng.u01();
      rest -= mu.weights[x];
    }
    mu.weights[0] = rest;
    double eps0 = std::min({mu.weights[0], mu.weights[1], mu.weights[4]});
    REQUIRE(epsilon_balanced(mu) >= eps0 - 1e-12);
  }

  // Maximal-subgroup scan agrees with the full proper-subgroup scan.
  for (const GroupPtr& g : {FiniteGroup::cyclic(12), FiniteGroup::dihedral(4),
                            FiniteGroup::quaternion()}) {
    SubgroupLattice lat = subgroup_lattice(g);
    for (int trial = 0; trial < 20; ++trial) {
      SignedMeasure mu = random_probability(g, rng);
      double full = 0.0;
      for (std::size_t i = 0; i + 1 < lat.size(); ++i) {
        LeftCosets cosets = left_cosets(g, lat.subgroups[i]);
        for (double mass : pushforward_cosets(cosets, mu))
          full = std::max(full, mass);
      }
      REQUIRE(epsilon_balanced(mu, lat) == Approx(1.0 - full).margin(1e-12));
    }
  }
}

TEST_CASE("closed-form sigma bounds") {
  REQUIRE(sigma_bound_general(0.0, 17) == 1.0);
  REQUIRE(sigma_bound_general(1.0, 2) == Approx(0.93941).margin(5e-6));
  REQUIRE(sigma_bound_general(1.0, 2) == Approx(std::exp(-1.0 / 16.0)));
  REQUIRE(sigma_bound_abelian(0.0, 5) == 1.0);
  REQUIRE(sigma_bound_abelian(0.5, 2) == Approx(0.88250).margin(5e-6));
  REQUIRE(sigma_bound_abelian(0.5, 2) == Approx(std::exp(-0.125)));
}

TEST_CASE("measured sigma respects the balanced bounds (smoke)") {
  Rng rng(26, 0, 0);
  auto z12 = FiniteGroup::cyclic(12);
  SubgroupLattice lat = subgroup_lattice(z12);
  for (int trial = 0; trial < 100; ++trial) {
    SignedMeasure mu = random_probability(z12, rng);
    const double eps = epsilon_balanced(mu, lat);
    const double sigma = second_of(singular_values(convolution_matrix(mu)));
    REQUIRE(sigma <= sigma_bound_abelian(eps, 12) + 1e-8);
    REQUIRE(sigma <= sigma_bound_general(eps, 12) + 1e-8);
  }
}
