#include "doctest.h"
#include "sij/gt.hpp"
#include "sij/statistics.hpp"

using namespace sij;

TEST_CASE("stat values compare structurally") {
  CHECK(StatValue::integer(3) == StatValue::integer(3));
  CHECK(StatValue::integer(3) != StatValue::seq({3}));
  CHECK(StatValue::multiset_seq({{2, 1}}) == StatValue::multiset_seq({{1, 2}}));
  CHECK(StatValue::tuple({StatValue::integer(1), StatValue::seq({2, 3})})
            .to_string() == "[1,[2,3]]");
}

TEST_CASE("normal statistic reads intervals, products, unions") {
  SignedSet iv = make_interval(2, 5);
  Statistic eta = normal_statistic(iv);
  CHECK(eta(Side::Domain, Elem::atom(3)) == StatValue::integer(3));

  SignedSet prod = cartesian_product({make_interval(1, 2), make_interval(4, 6)});
  Statistic etap = normal_statistic(prod);
  CHECK(etap(Side::Domain, Elem::tuple({Elem::atom(1), Elem::atom(5)})) ==
        StatValue::tuple({StatValue::integer(1), StatValue::integer(5)}));

  SignedSet uni = disjoint_union({make_interval(0, 2), make_interval(5, 7)});
  Statistic etau = normal_statistic(uni);
  CHECK(etau(Side::Domain, Elem::tagged(1, Elem::atom(6))) ==
        StatValue::integer(6));

  // index-forgetting unions are transparent
  SignedSet iu = indexed_union(make_interval(0, 2), [](const Elem&) {
    return make_interval(7, 9);
  });
  Statistic etai = normal_statistic(iu);
  CHECK(etai(Side::Domain, Elem::tuple({Elem::atom(8), Elem::atom(1)})) ==
        StatValue::integer(8));

  SignedSet bare({Elem::atom(0)}, {});
  CHECK_THROWS_AS(normal_statistic(bare), InterfaceError);
}

TEST_CASE("identity is compatible with everything") {
  SignedSet s = make_interval(0, 4);
  Statistic eta = normal_statistic(s);
  CHECK(check_compatibility(identity_sij(s), eta).compatible);
}

TEST_CASE("interval split is compatible with the normal statistic") {
  for (std::int64_t a = 0; a < 3; ++a)
    for (std::int64_t b = 0; b < 3; ++b)
      for (std::int64_t c = 0; c < 3; ++c) {
        Sijection phi = interval_split(a, b, c);
        Statistic eta = normal_statistic(phi.domain(), phi.codomain());
        CHECK(check_compatibility(phi, eta).compatible);
      }
}

TEST_CASE("compatibility is preserved under composition") {
  Sijection phi = interval_split(0, 3, 5);
  Sijection back = inverse_sij(phi);
  Sijection loop = compose(phi, back);
  Statistic eta = normal_statistic(loop.domain(), loop.codomain());
  CHECK(check_compatibility(phi, normal_statistic(phi.domain(), phi.codomain()))
            .compatible);
  CHECK(check_compatibility(loop, eta).compatible);
}

TEST_CASE("pair and union statistics") {
  SignedSet s = make_interval(0, 3);
  Statistic eta = normal_statistic(s);
  Statistic paired = pair_statistic(eta, eta);
  CHECK(paired(Side::Domain, Elem::atom(1)) ==
        StatValue::tuple({StatValue::integer(1), StatValue::integer(1)}));

  Statistic constant{"const",
                     [](Side, const Elem&) { return StatValue::integer(9); }};
  Statistic uni = union_statistic(eta, constant);
  CHECK(uni(Side::Domain, Elem::tagged(0, Elem::atom(2))) ==
        StatValue::integer(2));
  CHECK(uni(Side::Domain, Elem::tagged(1, Elem::atom(2))) ==
        StatValue::integer(9));
  // product of normal statistics is the normal statistic of the product
  SignedSet prod = cartesian_product({s, s});
  Statistic etan = normal_statistic(prod);
  Elem e = Elem::tuple({Elem::atom(1), Elem::atom(2)});
  CHECK(etan(Side::Domain, e) ==
        StatValue::tuple({StatValue::integer(1), StatValue::integer(2)}));
}

TEST_CASE("check_compatibility reports a witness on failure") {
  SignedSet s = make_interval(0, 2);
  // 0 <-> 1 across: a valid sijection that is not value-preserving
  Sijection swap = relabel_sij(
      s, s, [](const Elem& e) { return Elem::atom(1 - e.atom_value()); },
      [](const Elem& e) { return Elem::atom(1 - e.atom_value()); });
  REQUIRE(verify_sijection(swap).valid);
  CompatReport rep = check_compatibility(swap, normal_statistic(s));
  CHECK_FALSE(rep.compatible);
  CHECK(rep.witness.has_value());
}

TEST_CASE("restriction slices sets and sijections") {
  SignedSet g = gt({1, 3});
  Statistic top = eta_top_stat();
  SignedSet one = restrict_by_stat(g, top, Side::Domain, StatValue::integer(1));
  CHECK(one.size() == 1);
  SignedSet none = restrict_by_stat(g, top, Side::Domain, StatValue::integer(7));
  CHECK(none.empty());
  // restricting by a constant statistic returns the set
  Statistic constant{"const",
                     [](Side, const Elem&) { return StatValue::integer(0); }};
  CHECK(restrict_by_stat(g, constant, Side::Domain, StatValue::integer(0)) == g);

  // an eta-compatible sijection restricts to a sijection between the slices
  Sijection pi = pi_sij({1, 3}, 1);
  Statistic row = eta_row_stat({1, 3}, {3, 1});
  REQUIRE(check_compatibility(pi, row).compatible);
  for (const Elem& e : pi.domain().plus()) {
    Sijection sliced = restrict_sij(pi, row, row(Side::Domain, e));
    CHECK(verify_sijection(sliced).valid);
    CHECK(sliced.domain().support_size() >= 1);
  }
}
