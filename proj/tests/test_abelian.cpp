#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "groupmix/abelian.hpp"
#include "groupmix/json_io.hpp"
#include "helpers.hpp"

using namespace groupmix;
using Catch::Approx;

TEST_CASE("canonical invariant factors") {
  AbelianGroup g = AbelianGroup::canonical(0, {6, 4});
  REQUIRE(g.invariant_factors == std::vector<BigInt>{2, 12});
  REQUIRE(g.order() == 24);
  REQUIRE(g.exponent() == 12);
  REQUIRE(g.key() == "2x12");

  AbelianGroup with_units = AbelianGroup::canonical(0, {1, 3, 1});
  REQUIRE(with_units == AbelianGroup::cyclic(3));

  AbelianGroup with_zeros = AbelianGroup::canonical(1, {0, 4});
  REQUIRE(with_zeros.free_rank == 2);
  REQUIRE(with_zeros.key() == "Z^2x4");

  REQUIRE(AbelianGroup::trivial().key() == "1");
}

TEST_CASE("hom counting") {
  REQUIRE(hom_count(AbelianGroup::trivial(), AbelianGroup::cyclic(12)) == 1);
  AbelianGroup z = AbelianGroup::canonical(1, {});
  REQUIRE(hom_count(z, AbelianGroup::canonical(0, {2, 6})) == 12);
  REQUIRE(hom_count(AbelianGroup::canonical(0, {4, 6}), AbelianGroup::cyclic(2)) == 4);
  REQUIRE_THROWS_AS(hom_count(AbelianGroup::cyclic(2), z), BInfiniteError);
}

TEST_CASE("aut orders") {
  REQUIRE(aut_order(AbelianGroup::trivial()) == 1);
  REQUIRE(aut_order(AbelianGroup::cyclic(12)) == 4);  // phi(12)
  REQUIRE(aut_order(AbelianGroup::canonical(0, {2, 2})) == 6);  // |GL2(F2)|
  // Closed form agrees with exhaustive invertible-endomorphism counting.
  for (const AbelianGroup& b : oracle::abelian_groups_up_to(16))
    REQUIRE(aut_order(b) == oracle::aut_count_bruteforce(b));
}

TEST_CASE("surjection counts against exhaustive enumeration") {
  REQUIRE(sur_count(AbelianGroup::canonical(0, {4, 6}), AbelianGroup::trivial()) == 1);
  REQUIRE(sur_count(AbelianGroup::canonical(0, {2, 2}), AbelianGroup::cyclic(2)) == 3);

  // Free sources: Z^u covers every image choice.
  AbelianGroup z2 = AbelianGroup::cyclic(2);
  REQUIRE(sur_count(AbelianGroup::canonical(2, {}), z2) == 3);
  REQUIRE(sur_count(AbelianGroup::canonical(1, {2}), z2) ==
          oracle::sur_count_bruteforce(AbelianGroup::canonical(1, {2}), z2));

  // Spot sweep below the acceptance suite's full |A|,|B| <= 16 run.
  const auto groups = oracle::abelian_groups_up_to(12);
  for (const AbelianGroup& a : groups)
    for (const AbelianGroup& b : groups)
      REQUIRE(sur_count(a, b) == oracle::sur_count_bruteforce(a, b));
}

TEST_CASE("homs partition by image over the subgroup lattice") {
  // sum_{H <= B} #Sur(A, H) = #Hom(A, B)
  const std::vector<AbelianGroup> bs = {
      AbelianGroup::cyclic(24), AbelianGroup::canonical(0, {2, 8}),
      AbelianGroup::canonical(0, {2, 2, 2}), AbelianGroup::canonical(0, {3, 6})};
  const std::vector<AbelianGroup> as = {
      AbelianGroup::cyclic(4), AbelianGroup::canonical(0, {2, 4}),
      AbelianGroup::canonical(1, {6})};
  for (const AbelianGroup& b : bs) {
    GroupPtr bg = realize(b);
    SubgroupLattice lat = subgroup_lattice(bg);
    for (const AbelianGroup& a : as) {
      BigInt total = 0;
      for (const Subgroup& h : lat.subgroups)
        total += sur_count(a, abelian_invariants(bg, h.elements));
      REQUIRE(total == hom_count(a, b));
    }
  }
}

TEST_CASE("abelian invariants recovered from element orders") {
  for (const AbelianGroup& g :
       {AbelianGroup::canonical(0, {2, 12}), AbelianGroup::canonical(0, {3, 9}),
        AbelianGroup::canonical(0, {2, 2, 4}), AbelianGroup::cyclic(30)}) {
    GroupPtr realized = realize(g);
    std::vector<Element> all(realized->order());
    std::iota(all.begin(), all.end(), Element{0});
    REQUIRE(abelian_invariants(realized, all) == g);
  }
}

TEST_CASE("zeta values") {
  REQUIRE(zeta(2) == Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-15));
  REQUIRE(zeta(3) == Approx(1.2020569031595943).epsilon(1e-15));
  REQUIRE(zeta(4) == Approx(std::pow(std::numbers::pi, 4) / 90).epsilon(1e-15));
  REQUIRE(zeta(40) == Approx(1.0 + std::pow(2.0, -40)).epsilon(1e-14));
}

TEST_CASE("lambda_p masses") {
  PartitionType trivial2{2, {}};
  REQUIRE(lambda_p_mass(trivial2, 0) == Approx(0.2887880951).margin(1e-9));

  // Z/p has |Aut| = p - 1.
  for (long long p : {2, 3, 5}) {
    PartitionType zp{p, {1}};
    PartitionType none{p, {}};
    REQUIRE(lambda_p_mass(zp, 0) ==
            Approx(lambda_p_mass(none, 0) / (p - 1)).epsilon(1e-12));
  }

  // Masses over all partitions sum to 1 (every u), and partial sums stay
  // below 1.
  for (long long p : {2, 3}) {
    for (int u : {0, 1}) {
      double partial8 = 0.0;
      for (const PartitionType& b : p_groups_up_to(p, 8))
        partial8 += lambda_p_mass(b, u);
      REQUIRE(partial8 <= 1.0 + 1e-9);
      double total = 0.0;
      for (const PartitionType& b : p_groups_up_to(p, 44))
        total += lambda_p_mass(b, u);
      REQUIRE(total == Approx(1.0).margin(1e-6));
    }
  }
}

TEST_CASE("lambda_u finite masses") {
  REQUIRE(lambda_u_finite_mass(AbelianGroup::trivial(), 1) ==
          Approx(0.4357570767).margin(1e-9));
  REQUIRE_THROWS_AS(lambda_u_finite_mass(AbelianGroup::trivial(), 0),
                    HypothesisViolatedError);

  // Multiplicativity over primes, via the ratio form.
  AbelianGroup z6 = AbelianGroup::cyclic(6);
  for (int u : {1, 2}) {
    double ratio = lambda_u_finite_mass(z6, u) /
                   lambda_u_finite_mass(AbelianGroup::trivial(), u);
    double expected = 1.0;
    for (const PartitionType& pt : p_parts(z6)) {
      PartitionType none{pt.prime, {}};
      expected *= lambda_p_mass(pt, u) / lambda_p_mass(none, u);
    }
    REQUIRE(ratio == Approx(expected).epsilon(1e-9));
  }

  // The trivial group is the most likely class for every u >= 1.
  for (const AbelianGroup& b : oracle::abelian_groups_up_to(16))
    REQUIRE(lambda_u_finite_mass(b, 1) <=
            lambda_u_finite_mass(AbelianGroup::trivial(), 1) + 1e-12);
}

TEST_CASE("tensor_mod") {
  REQUIRE(tensor_mod(AbelianGroup::canonical(0, {5, 15}), 1).is_trivial());
  REQUIRE(tensor_mod(AbelianGroup::cyclic(12), 8) == AbelianGroup::cyclic(4));
  REQUIRE(tensor_mod(AbelianGroup::canonical(2, {6}), 2) ==
          AbelianGroup::canonical(0, {2, 2, 2}));
  // Idempotent on exponent-a groups.
  for (const AbelianGroup& g : oracle::abelian_groups_up_to(16)) {
    AbelianGroup t = tensor_mod(g, 4);
    REQUIRE(tensor_mod(t, 4) == t);
  }
}

TEST_CASE("lambda tensor masses") {
  REQUIRE(lambda_u_tensor_mass(2, AbelianGroup::trivial(), 0) ==
          Approx(0.2887880951).margin(1e-9));
  // Sum over Z/2^j, j >= 1 of the u=0 masses: mass(trivial) * sum 2^{1-j}.
  REQUIRE(lambda_u_tensor_mass(2, AbelianGroup::cyclic(2), 0) ==
          Approx(2.0 * 0.2887880950866024).margin(1e-8));
  REQUIRE(lambda_u_tensor_mass(2, AbelianGroup::trivial(), 1) ==
          Approx(0.5775761902).margin(1e-9));
  REQUIRE_THROWS_AS(lambda_u_tensor_mass(2, AbelianGroup::cyclic(3), 0),
                    ExponentMismatchError);

  // Masses over all H with exponent dividing a sum to 1.
  for (long long a : {2, 3, 4}) {
    for (int u : {0, 1}) {
      double total = 0.0;
      for (const AbelianGroup& h : abelian_groups_exponent_dividing(a, 8))
        total += lambda_u_tensor_mass(a, h, u, 1e-9);
      REQUIRE(total == Approx(1.0).margin(1e-5));
    }
  }
}

TEST_CASE("abelian JSON round-trip") {
  AbelianGroup g = AbelianGroup::canonical(2, {4, 12});
  REQUIRE(abelian_from_json(abelian_to_json(g)) == g);
  REQUIRE(abelian_from_json(Json::array({2, 4})) ==
          AbelianGroup::canonical(0, {2, 4}));
}
