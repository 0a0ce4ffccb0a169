#include <catch2/catch_amalgamated.hpp>

#include "groupmix/exact.hpp"
#include "groupmix/measure.hpp"
#include "groupmix/rng.hpp"

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

SignedMeasure random_signed(const GroupPtr& g, Rng& rng) {
  SignedMeasure mu{g, std::vector<double>(g->order(), 0.0)};
  for (double& w : mu.weights) w = 2.0 * rng.u01() - 1.0;
  return mu;
}

const std::vector<GroupPtr>& measure_pool() {
  static const std::vector<GroupPtr> pool = {
      FiniteGroup::cyclic(5),
      FiniteGroup::dihedral(4),
      FiniteGroup::quaternion(),
      FiniteGroup::product(FiniteGroup::cyclic(4), FiniteGroup::cyclic(6)),
      FiniteGroup::dihedral(6),
  };
  return pool;
}

}  // namespace

TEST_CASE("dirac and uniform basics") {
  auto t = FiniteGroup::trivial();
  REQUIRE(uniform(t).weights == std::vector<double>{1.0});
  auto z4 = FiniteGroup::cyclic(4);
  REQUIRE(dirac(z4, 0).total_mass() == Approx(1.0));
  REQUIRE(dirac(z4, 2).is_probability());
  REQUIRE(l2_distance_sq(dirac(z4, 0), uniform(z4)) == Approx(0.75));
  REQUIRE_THROWS_AS(dirac(z4, 7), GroupMismatchError);
}

TEST_CASE("convolution identities") {
  auto z2 = FiniteGroup::cyclic(2);
  SignedMeasure mu{z2, {0.7, 0.3}};
  SignedMeasure same = convolve(dirac(z2, 0), mu);
  REQUIRE(same.weights[0] == Approx(0.7));
  REQUIRE(same.weights[1] == Approx(0.3));

  SignedMeasure twice = convolve(mu, mu);
  REQUIRE(twice.weights[0] == Approx(0.58));  // .49 + .09
  REQUIRE(twice.weights[1] == Approx(0.42));  // 2 * .21

  Rng rng(3, 0, 0);
  for (const GroupPtr& g : measure_pool()) {
    SignedMeasure p = random_probability(g, rng);
    SignedMeasure u = uniform(g);
    REQUIRE(l2_distance(convolve(u, p), u) < 1e-12);
    REQUIRE(l2_distance(convolve(p, u), u) < 1e-12);
  }

  REQUIRE_THROWS_AS(
      convolve(uniform(FiniteGroup::cyclic(2)), uniform(FiniteGroup::cyclic(3))),
      GroupMismatchError);
}

TEST_CASE("pushforward") {
  auto d8 = FiniteGroup::dihedral(4);
  auto idm = Homomorphism::identity(d8);
  Rng rng(4, 0, 0);
  SignedMeasure mu = random_probability(d8, rng);
  REQUIRE(l2_distance(pushforward(idm, mu), mu) == 0.0);

  // Linearity.
  SignedMeasure nu = random_signed(d8, rng);
  QuotientResult q = quotient(d8, generated_subgroup(d8, {1}));
  SignedMeasure lhs = pushforward(q.projection, SignedMeasure{d8, [&] {
    std::vector<double> w(d8->order());
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = 2.0 * mu.weights[i] - 3.0 * nu.weights[i];
    return w;
  }()});
  SignedMeasure rhs{q.group, std::vector<double>(q.group->order(), 0.0)};
  SignedMeasure pm = pushforward(q.projection, mu);
  SignedMeasure pn = pushforward(q.projection, nu);
  for (std::size_t i = 0; i < rhs.weights.size(); ++i)
    rhs.weights[i] = 2.0 * pm.weights[i] - 3.0 * pn.weights[i];
  REQUIRE(l2_distance(lhs, rhs) < 1e-12);

  // A rotation-supported measure pushes to the Dirac at the identity coset.
  SignedMeasure rotations = uniform_on(d8, {0, 1, 2, 3});
  SignedMeasure pushed = pushforward(q.projection, rotations);
  REQUIRE(pushed.weights[0] == Approx(1.0));
  REQUIRE(pushed.weights[1] == Approx(0.0).margin(1e-15));

  // Mass preservation.
  REQUIRE(pushed.total_mass() == Approx(rotations.total_mass()));
}

TEST_CASE("l2 geometry") {
  auto q8 = FiniteGroup::quaternion();
  Rng rng(6, 0, 0);
  SignedMeasure a = random_signed(q8, rng);
  REQUIRE(l2_distance(a, a) == 0.0);
  REQUIRE(l2_distance_sq(dirac(q8, 0), uniform(q8)) == Approx(1.0 - 1.0 / 8));
  for (int trial = 0; trial < 100; ++trial) {
    SignedMeasure x = random_signed(q8, rng);
    SignedMeasure y = random_signed(q8, rng);
    SignedMeasure z = random_signed(q8, rng);
    REQUIRE(l2_distance(x, z) <= l2_distance(x, y) + l2_distance(y, z) + 1e-12);
  }
}

TEST_CASE("coset-uniform projection") {
  auto d8 = FiniteGroup::dihedral(4);
  Rng rng(7, 0, 0);
  SignedMeasure mu = random_probability(d8, rng);

  std::vector<Element> all(d8->order());
  std::iota(all.begin(), all.end(), Element{0});
  SubspaceProjection onto_g = project_coset_uniform(mu, Subgroup{d8, all});
  REQUIRE(l2_distance(onto_g.projected, uniform(d8)) < 1e-12);

  SubspaceProjection onto_trivial =
      project_coset_uniform(mu, generated_subgroup(d8, {}));
  REQUIRE(onto_trivial.residual_norm < 1e-15);
  REQUIRE(l2_distance(onto_trivial.projected, mu) < 1e-15);

  // Residual of a Dirac against H is 1 - 1/|H|, squared.
  Subgroup rot = generated_subgroup(d8, {1});
  SubspaceProjection proj = project_coset_uniform(dirac(d8, 0), rot);
  REQUIRE(proj.residual_norm * proj.residual_norm == Approx(0.75));

  // The projection lands in M_H and beats every other member of M_H.
  LeftCosets cosets = left_cosets(d8, rot);
  for (const auto& coset : cosets.cosets)
    for (std::size_t i = 1; i < coset.size(); ++i)
      REQUIRE(proj.projected.weights[coset[i]] ==
              Approx(proj.projected.weights[coset[0]]));
  SubspaceProjection pm = project_coset_uniform(mu, rot);
  for (int trial = 0; trial < 100; ++trial) {
    // Random member of M_H: uniform on each coset with random masses.
    SignedMeasure w{d8, std::vector<double>(d8->order(), 0.0)};
    for (const auto& coset : cosets.cosets) {
      const double mass = rng.u01();
      for (Element x : coset) w.weights[x] = mass / coset.size();
    }
    REQUIRE(pm.residual_norm <= l2_distance(mu, w) + 1e-12);
  }
}

TEST_CASE("l2 decomposition identity") {
  auto d8 = FiniteGroup::dihedral(4);
  Subgroup h = generated_subgroup(d8, {2});  // <r^2>
  auto [qpart, rpart] = l2_decomposition_check(uniform(d8), h);
  REQUIRE(qpart == Approx(0.0).margin(1e-15));
  REQUIRE(rpart == Approx(0.0).margin(1e-15));

  std::vector<Element> all(d8->order());
  std::iota(all.begin(), all.end(), Element{0});
  auto [q2, r2] = l2_decomposition_check(dirac(d8, 0), Subgroup{d8, all});
  REQUIRE(q2 == Approx(0.0).margin(1e-15));
  REQUIRE(r2 == Approx(1.0 - 1.0 / 8));

  Rng rng(8, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    SignedMeasure mu = random_probability(d8, rng);
    auto [qp, rp] = l2_decomposition_check(mu, h);
    REQUIRE(qp + rp == Approx(l2_distance_sq(mu, uniform(d8))).margin(1e-9));
  }
}

TEST_CASE("convolution is non-expansive (1000 random instances)") {
  Rng rng(9, 0, 0);
  const auto& pool = measure_pool();
  for (int trial = 0; trial < 1000; ++trial) {
    const GroupPtr& g = pool[rng.below(pool.size())];
    SignedMeasure nu = random_signed(g, rng);
    SignedMeasure mu = random_probability(g, rng);
    REQUIRE(l2_norm(convolve(nu, mu)) <= l2_norm(nu) + 1e-9);
  }
}

TEST_CASE("normal subgroups stabilize M_H under convolution") {
  Rng rng(10, 0, 0);
  auto d8 = FiniteGroup::dihedral(4);
  for (const Subgroup& h : {generated_subgroup(d8, {1}),
                            generated_subgroup(d8, {2})}) {
    REQUIRE(is_normal(d8, h));
    for (int trial = 0; trial < 100; ++trial) {
      SignedMeasure nu =
          project_coset_uniform(random_signed(d8, rng), h).projected;
      SignedMeasure mu = random_probability(d8, rng);
      SubspaceProjection after = project_coset_uniform(convolve(nu, mu), h);
      REQUIRE(after.residual_norm < 1e-9);
    }
  }
  // Contrast: a non-normal subgroup does not stabilize in general.
  Subgroup flip = generated_subgroup(d8, {4});
  bool escaped = false;
  for (int trial = 0; trial < 50 && !escaped; ++trial) {
    SignedMeasure nu = project_coset_uniform(random_signed(d8, rng), flip).projected;
    SignedMeasure mu = random_probability(d8, rng);
    if (project_coset_uniform(convolve(nu, mu), flip).residual_norm > 1e-6)
      escaped = true;
  }
  REQUIRE(escaped);
}

TEST_CASE("pushforward along quotients is multiplicative") {
  Rng rng(11, 0, 0);
  auto q8 = FiniteGroup::quaternion();
  QuotientResult q = quotient(q8, generated_subgroup(q8, {1}));  // by {1,-1}
  for (int trial = 0; trial < 100; ++trial) {
    SignedMeasure mu = random_signed(q8, rng);
    SignedMeasure nu = random_signed(q8, rng);
    SignedMeasure lhs = pushforward(q.projection, convolve(mu, nu));
    SignedMeasure rhs = convolve(pushforward(q.projection, mu),
                                 pushforward(q.projection, nu));
    REQUIRE(l2_distance(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("|H|^{-1/2} pushforward is an isometry on M_H") {
  Rng rng(12, 0, 0);
  auto d12 = FiniteGroup::dihedral(6);
  Subgroup h = generated_subgroup(d12, {2});
  LeftCosets cosets = left_cosets(d12, h);
  for (int trial = 0; trial < 100; ++trial) {
    SignedMeasure nu = project_coset_uniform(random_signed(d12, rng), h).projected;
    std::vector<double> pushed = pushforward_cosets(cosets, nu);
    double pushed_sq = 0;
    for (double x : pushed) pushed_sq += x * x;
    REQUIRE(l2_norm(nu) == Approx(std::sqrt(pushed_sq / h.order())).margin(1e-12));
  }
}

TEST_CASE("probability validation knobs") {
  auto z4 = FiniteGroup::cyclic(4);
  SignedMeasure dusty{z4, {0.5, 0.5, -5e-13, 5e-13}};
  REQUIRE(dusty.is_probability());
  SignedMeasure cleaned = dusty.clamped();
  REQUIRE(cleaned.weights[2] == 0.0);
  SignedMeasure negative{z4, {0.6, 0.5, -0.1, 0.0}};
  REQUIRE_FALSE(negative.is_probability());
  SignedMeasure off_mass{z4, {0.5, 0.5, 0.1, 0.0}};
  REQUIRE_FALSE(off_mass.is_probability());
}

TEST_CASE("exact rational convolution agrees with the double path") {
  auto z6 = FiniteGroup::cyclic(6);
  std::vector<BigRational> a(6), b(6);
  SignedMeasure ad{z6, std::vector<double>(6)}, bd{z6, std::vector<double>(6)};
  for (int i = 0; i < 6; ++i) {
    a[i] = BigRational(i + 1, 21);
    b[i] = BigRational(6 - i, 21);
    ad.weights[i] = a[i].convert_to<double>();
    bd.weights[i] = b[i].convert_to<double>();
  }
  std::vector<BigRational> exact = exact_convolve(*z6, a, b);
  SignedMeasure approx = convolve(ad, bd);
  for (int i = 0; i < 6; ++i)
    REQUIRE(approx.weights[i] == Approx(exact[i].convert_to<double>()).margin(1e-15));
  BigRational mass = 0;
  for (const auto& x : exact) mass += x;
  REQUIRE(mass == 1);
}
