#include <random>

#include "doctest.h"
#include "sij/signed_set.hpp"

using namespace sij;

TEST_CASE("element serialization round-trips") {
  Elem e = Elem::tagged(0, Elem::tuple({Elem::atom(1), Elem::atom(4)}));
  CHECK(e.to_sexpr() == "(tag 0 (tup 1 4))");
  CHECK(Elem::parse("(tag 0 (tup 1 4))") == e);
  CHECK(Elem::parse("()").is_unit());
  CHECK(Elem::parse("NWNE").arrow_value() == Arrow::NWNE);
  CHECK(Elem::parse("-7").atom_value() == -7);
  Elem nested = Elem::tuple({Elem::unit(), Elem::arrow(Arrow::SESW),
                             Elem::tagged(2, Elem::atom(-3))});
  CHECK(Elem::parse(nested.to_sexpr()) == nested);
  CHECK_THROWS_AS(Elem::parse("(tup 1"), std::invalid_argument);
  CHECK_THROWS_AS(Elem::parse("bogus"), std::invalid_argument);
}

TEST_CASE("interval materialization") {
  SignedSet s = make_interval(2, 5);
  CHECK(s.plus().size() == 3);
  CHECK(s.minus().empty());
  CHECK(s.size() == 3);
  CHECK(s.contains_plus(Elem::atom(2)));
  CHECK(s.contains_plus(Elem::atom(4)));
  CHECK_FALSE(s.contains(Elem::atom(5)));

  SignedSet empty = make_interval(5, 5);
  CHECK(empty.empty());

  SignedSet rev = make_interval(5, 2);
  CHECK(rev.plus().empty());
  CHECK(rev.size() == -3);
  CHECK(rev.contains_minus(Elem::atom(3)));

  // [b,a) = -[a,b)
  CHECK(make_interval(5, 2) == opposite(make_interval(2, 5)));
}

TEST_CASE("interval size is b - a for all small bounds") {
  for (std::int64_t a = -4; a <= 4; ++a)
    for (std::int64_t b = -4; b <= 4; ++b)
      CHECK(make_interval(a, b).size() == b - a);
}

TEST_CASE("opposite is an involution") {
  SignedSet s({Elem::atom(1)}, {Elem::atom(2)});
  CHECK(opposite(s) == SignedSet({Elem::atom(2)}, {Elem::atom(1)}));
  CHECK(opposite(opposite(s)) == s);
  CHECK(opposite(SignedSet()) == SignedSet());
}

TEST_CASE("disjoint union tags positionally and adds sizes") {
  SignedSet a({Elem::atom(7)}, {});
  SignedSet b({}, {Elem::atom(7)});
  SignedSet u = disjoint_union({a, b});
  CHECK(u.plus() == std::vector<Elem>{Elem::tagged(0, Elem::atom(7))});
  CHECK(u.minus() == std::vector<Elem>{Elem::tagged(1, Elem::atom(7))});
  CHECK(disjoint_union(std::initializer_list<SignedSet>{}) == SignedSet());
  // [1,3) u [3,2) has size 2 + (-1) = 1 = #[1,2)
  SignedSet v = disjoint_union({make_interval(1, 3), make_interval(3, 2)});
  CHECK(v.size() == make_interval(1, 2).size());
}

TEST_CASE("cartesian product multiplies with the sign rule") {
  SignedSet ab({Elem::atom(0)}, {Elem::atom(1)});
  SignedSet c({Elem::atom(2)}, {});
  SignedSet p = cartesian_product({ab, c});
  CHECK(p.sign_of(Elem::tuple({Elem::atom(0), Elem::atom(2)})) == 1);
  CHECK(p.sign_of(Elem::tuple({Elem::atom(1), Elem::atom(2)})) == -1);

  CHECK(cartesian_product({ab, SignedSet()}).empty());

  // [3,1) x [3,1): all four pairs plus
  SignedSet q = cartesian_product({make_interval(3, 1), make_interval(3, 1)});
  CHECK(q.size() == 4);
  CHECK(q.minus().empty());

  SignedSet unit = cartesian_product(std::initializer_list<SignedSet>{});
  CHECK(unit.plus() == std::vector<Elem>{Elem::unit()});
}

TEST_CASE("union and product sizes on random small inputs") {
  std::mt19937 rng(20240811);
  auto random_set = [&]() {
    std::vector<Elem> plus, minus;
    for (int v = 0; v < 5; ++v) {
      int r = static_cast<int>(rng() % 3);
      if (r == 1) plus.push_back(Elem::atom(v));
      if (r == 2) minus.push_back(Elem::atom(v));
    }
    return SignedSet(std::move(plus), std::move(minus));
  };
  for (int trial = 0; trial < 50; ++trial) {
    SignedSet a = random_set(), b = random_set();
    CHECK(disjoint_union({a, b}).size() == a.size() + b.size());
    CHECK(cartesian_product({a, b}).size() == a.size() * b.size());
  }
}

TEST_CASE("plus and minus must stay disjoint") {
  CHECK_THROWS_AS(SignedSet({Elem::atom(1)}, {Elem::atom(1)}), InterfaceError);
}

TEST_CASE("indexed union follows the four-case sign rule") {
  SignedSet fiber({Elem::atom(10)}, {Elem::atom(11)});
  auto family = [&](const Elem&) { return fiber; };

  SignedSet plus_index({Elem::atom(0)}, {});
  SignedSet u1 = indexed_union(plus_index, family);
  CHECK(u1.sign_of(Elem::tuple({Elem::atom(10), Elem::atom(0)})) == 1);
  CHECK(u1.sign_of(Elem::tuple({Elem::atom(11), Elem::atom(0)})) == -1);

  SignedSet minus_index({}, {Elem::atom(0)});
  SignedSet u2 = indexed_union(minus_index, family);
  CHECK(u2.sign_of(Elem::tuple({Elem::atom(10), Elem::atom(0)})) == -1);
  CHECK(u2.sign_of(Elem::tuple({Elem::atom(11), Elem::atom(0)})) == 1);

  // over an all-plus index with singleton fibers, matches disjoint_union
  SignedSet idx = make_interval(0, 2);
  SignedSet u3 = indexed_union(
      idx, [](const Elem& t) { return SignedSet({t}, {}); });
  CHECK(u3.size() == 2);
  for (const Elem& e : u3.plus()) CHECK(e.children()[0] == e.children()[1]);
}

TEST_CASE("restrict keeps matching elements with signs") {
  SignedSet s({Elem::atom(1), Elem::atom(2)}, {Elem::atom(3)});
  SignedSet odd = restrict_set(
      s, [](const Elem& e) { return e.atom_value() % 2 == 1; });
  CHECK(odd == SignedSet({Elem::atom(1)}, {Elem::atom(3)}));
  SignedSet all = restrict_set(s, [](const Elem&) { return true; });
  CHECK(all == s);
  SignedSet none = restrict_set(s, [](const Elem&) { return false; });
  CHECK(none.empty());
}

TEST_CASE("budget errors are loud") {
  std::int64_t saved = element_budget();
  set_element_budget(10);
  CHECK_THROWS_AS(make_interval(0, 100), BudgetError);
  CHECK_THROWS_AS(
      cartesian_product({make_interval(0, 5), make_interval(0, 5)}),
      BudgetError);
  set_element_budget(saved);
}

TEST_CASE("translate shifts atoms only") {
  Elem e = Elem::tuple({Elem::atom(3), Elem::arrow(Arrow::NW),
                        Elem::tagged(1, Elem::atom(-1))});
  Elem t = translate_elem(2, e);
  CHECK(t.children()[0].atom_value() == 5);
  CHECK(t.children()[1].arrow_value() == Arrow::NW);
  CHECK(t.children()[2].tagged_child().atom_value() == 1);
  CHECK(translate_elem(0, e) == e);
}
