#include <random>

#include "doctest.h"
#include "sij/gt.hpp"
#include "support/oracles.hpp"

using namespace sij;

namespace {

bool verify_ok(const Sijection& s) { return verify_sijection(s).valid; }
Sided dom(const Elem& e) { return Sided{Side::Domain, e}; }

// eta_row on a union-of-GT domain: elements (g, l) with bottom row read off l.
Statistic eta_row_indexed() {
  return Statistic{"eta_row_indexed", [](Side, const Elem& e) {
                     IntSeq l;
                     for (const Elem& c : e.children()[1].children())
                       l.push_back(c.atom_value());
                     return eta_row_value(e.children()[0], l);
                   }};
}

}  // namespace

TEST_CASE("gt sizes match the oracle and the formula") {
  CHECK(oracles::gt_count({1, 3}) == 2);
  CHECK(gt({1, 3}).size() == 2);
  CHECK(oracles::gt_count({3, 1}) == -2);
  CHECK(gt({3, 1}).size() == -2);
  CHECK(oracles::gt_count({1, 3, 5}) == 8);
  CHECK(gt({1, 3, 5}).size() == 8);
  CHECK(gt_size_formula({1, 3, 5}) == 8);
  CHECK(gt_size_formula({3, 1}) == -2);
  CHECK(gt_size_formula({2, 2}) == 0);
  for (std::int64_t a = 0; a <= 3; ++a)
    for (std::int64_t b = 0; b <= 3; ++b)
      for (std::int64_t c = 0; c <= 3; ++c) {
        IntSeq k = {a, b, c};
        CHECK(gt(k).size() == gt_size_formula(k));
        CHECK(gt(k).size() == oracles::gt_count(k));
      }
}

TEST_CASE("sgn of a sequence") {
  CHECK(sgn_seq({1, 2}) == 1);
  CHECK(sgn_seq({2, 1}) == -1);
  CHECK(sgn_seq({1, 1}) == 0);
  CHECK(sgn_seq({2, 0, 1}) == 1);
}

TEST_CASE("permuted bottom rows scale by the permutation sign") {
  IntSeq sorted = {0, 1, 3};
  std::vector<IntSeq> perms = {{0, 1, 3}, {0, 3, 1}, {1, 0, 3},
                               {1, 3, 0}, {3, 0, 1}, {3, 1, 0}};
  for (const IntSeq& k : perms)
    CHECK(gt(k).size() == sgn_seq(k) * gt(sorted).size());
}

TEST_CASE("row statistics match the worked display") {
  // rows 4 / 2,5 / 2,5,7
  SignedSet s = gt({2, 5, 7});
  bool found = false;
  for (const Elem& e : s.plus()) {
    auto rows = gt_rows(e, {2, 5, 7});
    if (rows[0] == IntSeq{4} && rows[1] == IntSeq{2, 5}) {
      found = true;
      CHECK(eta_row_value(e, {2, 5, 7}) ==
            StatValue::multiset_seq({{4}, {2, 5}, {2, 5, 7}}));
      CHECK(eta_top_value(e) == 4);
    }
  }
  CHECK(found);
  // single-row pattern
  CHECK(eta_row_value(Elem::atom(6), {6}) == StatValue::multiset_seq({{6}}));
}

TEST_CASE("beta base case coincides with the interval split") {
  IntSeq a = {1}, b = {2};
  Sijection beta = beta_sij(a, b, 5);
  CHECK(verify_ok(beta));
  Sijection split = interval_split(1, 2, 5);
  // same domain up to the one-tuple wrapper, same pairing per value
  for (const Elem& e : beta.domain().plus()) {
    Sided r = beta.eval(dom(e));
    Sided rs = split.eval(dom(e.children()[0]));
    REQUIRE(r.side == Side::Codomain);
    REQUIRE(rs.side == Side::Codomain);
    // the split part index matches the beta choice tag
    CHECK(r.elem.children()[1].children()[0].tag() == rs.elem.tag());
    CHECK(r.elem.children()[0].children()[0] == rs.elem.tagged_child());
  }
}

TEST_CASE("beta verifies and preserves the normal value") {
  IntSeq a = {0, 2}, b = {2, 4};
  Sijection beta = beta_sij(a, b, 5);
  CHECK(verify_ok(beta));
  // value of a domain tuple = its coordinates; of a codomain element = the
  // fiber coordinates (the choice index is forgotten)
  Statistic value{"value", [](Side side, const Elem& e) {
                    const Elem& coords =
                        side == Side::Domain ? e : e.children()[0];
                    std::vector<std::int64_t> v;
                    for (const Elem& c : coords.children())
                      v.push_back(c.atom_value());
                    return StatValue::seq(std::move(v));
                  }};
  CHECK(check_compatibility(beta, value).compatible);

  // a == b: both sides empty
  Sijection empty = beta_sij({1, 1}, {1, 1}, 4);
  CHECK(empty.domain().empty());
  CHECK(empty.codomain().empty());
  CHECK(verify_ok(empty));
}

TEST_CASE("beta verifies across a small grid") {
  for (std::int64_t a1 = 0; a1 <= 2; ++a1)
    for (std::int64_t b1 = 0; b1 <= 2; ++b1)
      for (std::int64_t a2 = 0; a2 <= 2; ++a2)
        for (std::int64_t b2 = 0; b2 <= 2; ++b2)
          for (std::int64_t x : {-1, 1, 3}) {
            Sijection beta = beta_sij({a1, a2}, {b1, b2}, x);
            CHECK(verify_ok(beta));
          }
}

TEST_CASE("rho traces the n = 1 example and verifies") {
  Sijection rho = rho_sij({1}, {2}, 5);
  CHECK(verify_ok(rho));
  // (pattern (1), l = (1)) -> (pattern rows (1)/(1,5), m = 1 with tag 0)
  Elem source = Elem::tuple({Elem::atom(1), Elem::tuple({Elem::atom(1)})});
  Sided image = rho.eval(dom(source));
  REQUIRE(image.side == Side::Codomain);
  const Elem& gt_elem = image.elem.children()[0];
  const Elem& m = image.elem.children()[1];
  CHECK(m == Elem::tuple({Elem::tagged(0, Elem::atom(1))}));
  CHECK(gt_rows(gt_elem, {1, 5}) == std::vector<IntSeq>{{1}, {1, 5}});

  // a == b gives empty <=> empty
  Sijection empty = rho_sij({2, 2}, {2, 2}, 4);
  CHECK(empty.domain().empty());
  CHECK(verify_ok(empty));
}

TEST_CASE("rho preserves eta_top and all rows") {
  IntSeq a = {0, 2}, b = {2, 3};
  std::int64_t x = 4;
  Sijection rho = rho_sij(a, b, x);
  CHECK(verify_ok(rho));
  CHECK(check_compatibility(rho, eta_top_stat()).compatible);
  // eta_row over the whole fiber: domain (g, l) has bottom row l; codomain
  // (g', m) has rows of g' minus its last row (the appended x-row keeps the
  // top n rows equal)
  for (int i = 1; i <= 2; ++i) {
    Statistic row_i{"row_i", [i](Side side, const Elem& e) {
                      const Elem& g = e.children()[0];
                      IntSeq bottom;
                      if (side == Side::Domain) {
                        for (const Elem& c : e.children()[1].children())
                          bottom.push_back(c.atom_value());
                      } else {
                        for (const Elem& c : e.children()[1].children())
                          bottom.push_back(c.tagged_child().atom_value());
                        bottom.push_back(4);
                      }
                      auto rows = gt_rows(g, bottom);
                      return StatValue::multiset_seq({rows.at(i - 1)});
                    }};
    CHECK(check_compatibility(rho, row_i).compatible);
  }
}

TEST_CASE("pi on a two-entry row is the forced matching") {
  Sijection pi = pi_sij({1, 3}, 1);
  CHECK(pi.domain() == gt({1, 3}));
  CHECK(pi.codomain() == opposite(gt({3, 1})));
  CHECK(verify_ok(pi));
  for (const Elem& e : pi.domain().plus())
    CHECK(pi.eval(dom(e)) == Sided{Side::Codomain, e});
  CHECK(check_compatibility(pi, eta_row_stat({1, 3}, {3, 1})).compatible);
}

TEST_CASE("pi verifies and respects eta_row across a grid") {
  for (std::int64_t a = 0; a <= 2; ++a)
    for (std::int64_t b = 0; b <= 2; ++b)
      for (std::int64_t c = 0; c <= 2; ++c)
        for (int i = 1; i <= 2; ++i) {
          IntSeq k = {a, b, c};
          IntSeq swapped = k;
          std::swap(swapped[i - 1], swapped[i]);
          Sijection pi = pi_sij(k, i);
          CHECK(verify_ok(pi));
          CHECK(check_compatibility(pi, eta_row_stat(k, swapped)).compatible);
        }
  // one n = 4 spot check
  Sijection pi4 = pi_sij({0, 2, 1, 3}, 2);
  CHECK(verify_ok(pi4));
  CHECK(check_compatibility(pi4, eta_row_stat({0, 2, 1, 3}, {0, 1, 2, 3}))
            .compatible);
}

TEST_CASE("sigma cancels unions with interchangeable positions") {
  // empty-interval form: domain is empty
  Sijection trivial = sigma_sij({0, 1, 1}, {2, 1, 1}, 2);
  CHECK(trivial.domain().empty());
  CHECK(verify_ok(trivial));

  // identical-interval form
  Sijection s1 = sigma_sij({0, 0}, {2, 2}, 1);
  CHECK(s1.codomain().empty());
  CHECK(verify_ok(s1));
  CHECK(check_compatibility(s1, eta_row_indexed()).compatible);

  // reversed-pair form, as produced inside pi
  Sijection s2 = sigma_sij({0, 2}, {2, 0}, 1);
  CHECK(verify_ok(s2));
  CHECK(check_compatibility(s2, eta_row_indexed()).compatible);

  Sijection s3 = sigma_sij({1, 0, 0}, {2, 3, 3}, 2);
  CHECK(verify_ok(s3));
  CHECK(check_compatibility(s3, eta_row_indexed()).compatible);

  CHECK_THROWS_AS(sigma_sij({0, 1}, {2, 3}, 1), InterfaceError);
}

TEST_CASE("gamma_row base case is the split up to tagging") {
  Sijection g = gamma_row_sij({0, 2}, 1);
  CHECK(verify_ok(g));
  // domain [0,2) as one-tuples; parts: tag 0 = [1,2), tag 1 = [0,1)
  Sided r0 = g.eval(dom(Elem::tuple({Elem::atom(0)})));
  CHECK(r0 == Sided{Side::Codomain,
                    Elem::tagged(1, Elem::tuple({Elem::atom(0)}))});
  Sided r1 = g.eval(dom(Elem::tuple({Elem::atom(1)})));
  CHECK(r1 == Sided{Side::Codomain,
                    Elem::tagged(0, Elem::tuple({Elem::atom(1)}))});
}

TEST_CASE("gamma_row verifies and preserves values") {
  IntSeq k = {0, 2, 4};
  std::int64_t x = 1;
  Sijection g = gamma_row_sij(k, x);
  CHECK(verify_ok(g));
  Statistic value{"value", [](Side, const Elem& e) {
                    const Elem* p = &e;
                    while (p->is_tagged()) p = &p->tagged_child();
                    std::vector<std::int64_t> v;
                    for (const Elem& c : p->children())
                      v.push_back(c.atom_value());
                    return StatValue::seq(std::move(v));
                  }};
  CHECK(check_compatibility(g, value).compatible);

  // x == k_i stays valid with degenerate empty parts
  CHECK(verify_ok(gamma_row_sij({0, 2, 4}, 2)));
  CHECK(verify_ok(gamma_row_sij({0, 2}, 0)));
  // sizes: #I(k) = sum of part sizes
  auto parts = gamma_row_parts(k, x);
  CHECK(parts.size() == 4);  // n A-parts + (n-2) B-parts
}

TEST_CASE("tau base case and size identity") {
  Sijection t1 = tau_sij({7}, 3);
  CHECK(verify_ok(t1));
  CHECK(t1.eval(dom(Elem::atom(7))) ==
        Sided{Side::Codomain, Elem::tagged(0, Elem::atom(3))});

  IntSeq k = {0, 2, 5};
  std::int64_t x = 3;
  Sijection tau = tau_sij(k, x);
  CHECK(verify_ok(tau));
  std::int64_t total = 0;
  for (int i = 0; i < 3; ++i) {
    IntSeq sub = k;
    sub[i] = x;
    total += gt(sub).size();
  }
  CHECK(gt(k).size() == total);
}

TEST_CASE("tau preserves eta_top for n >= 2") {
  Sijection tau = tau_sij({0, 2}, 4);
  CHECK(verify_ok(tau));
  Statistic top{"top", [](Side side, const Elem& e) {
                  return StatValue::integer(eta_top_value(
                      side == Side::Domain ? e : e.tagged_child()));
                }};
  CHECK(check_compatibility(tau, top).compatible);

  // eta_row_i through the union wrapper for i < n
  IntSeq k = {0, 2, 4};
  Sijection tau3 = tau_sij(k, 1);
  CHECK(verify_ok(tau3));
  for (int i = 1; i <= 2; ++i) {
    Statistic row_i{"row_i", [k, i](Side side, const Elem& e) {
                      if (side == Side::Domain) {
                        auto rows = gt_rows(e, k);
                        return StatValue::multiset_seq({rows.at(i - 1)});
                      }
                      IntSeq sub = k;
                      sub[e.tag()] = 1;
                      auto rows = gt_rows(e.tagged_child(), sub);
                      return StatValue::multiset_seq({rows.at(i - 1)});
                    }};
    CHECK(check_compatibility(tau3, row_i).compatible);
  }
}

TEST_CASE("restricted counts agree with enumeration") {
  RowProfile classical = {{1}, {1, 3}, {1, 3, 5}};
  CHECK(restricted_count({1, 3, 5}, classical) == 1);
  CHECK(restricted_count({3, 1, 5}, classical) == -1);
  RowProfile broken = {{5}, {1, 3}, {1, 3, 5}};
  CHECK(restricted_count({1, 3, 5}, broken) == 0);
  CHECK_THROWS_AS(restricted_count({1, 3, 4}, classical), InterfaceError);

  // cross-check against the oracle enumeration with signs
  for (const auto& p : oracles::gt_patterns({2, 0, 3})) {
    RowProfile profile;
    for (auto row : p.rows) {
      std::sort(row.begin(), row.end());
      profile.push_back(row);
    }
    std::int64_t direct = 0;
    for (const auto& q : oracles::gt_patterns({2, 0, 3})) {
      RowProfile qp;
      for (auto row : q.rows) {
        std::sort(row.begin(), row.end());
        qp.push_back(row);
      }
      if (qp == profile) direct += q.sign;
    }
    CHECK(direct == restricted_count({2, 0, 3}, profile));
  }
}

TEST_CASE("generalized patterns and parameter signs") {
  // classical parameters reproduce gt
  GgtParams classical = GgtParams::classical(3);
  CHECK(ggt_param_sign(classical) == 1);
  CHECK(ggt({1, 3, 5}, classical) == gt({1, 3, 5}));
  CHECK(ggt_size_formula({1, 3, 5}, classical) == 8);

  // single reversed edge: rows drawn from [3,1), size -2
  GgtParams reversed;
  reversed.levels = {{{2, 1}}};
  CHECK(ggt_param_sign(reversed) == -1);
  SignedSet g = ggt({1, 3}, reversed);
  CHECK(g.size() == -2);
  CHECK(ggt_size_formula({1, 3}, reversed) == -2);
  CHECK(g.size() == oracles::ggt_count({1, 3}, reversed.levels));

  // doubled edge in G_2 is not a tree: sign and size are 0
  GgtParams doubled;
  doubled.levels = {{{1, 2}}, {{1, 2}, {2, 1}}};
  CHECK(ggt_param_sign(doubled) == 0);
  CHECK(ggt_size_formula({0, 1, 2}, doubled) == 0);
  CHECK(ggt({0, 1, 2}, doubled).size() == 0);
  CHECK(oracles::ggt_count({0, 1, 2}, doubled.levels) == 0);

  // randomized parameter sets against the oracle
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    GgtParams params;
    for (int i = 1; i <= 2; ++i) {
      std::vector<std::pair<int, int>> level;
      for (int j = 1; j <= i; ++j)
        level.push_back({static_cast<int>(rng() % (i + 1)) + 1,
                         static_cast<int>(rng() % (i + 1)) + 1});
      params.levels.push_back(std::move(level));
    }
    IntSeq k = {static_cast<std::int64_t>(rng() % 4),
                static_cast<std::int64_t>(rng() % 4),
                static_cast<std::int64_t>(rng() % 4)};
    std::int64_t expected = oracles::ggt_count(k, params.levels);
    CHECK(ggt(k, params).size() == expected);
    CHECK(ggt_size_formula(k, params) == expected);
  }
}

TEST_CASE("pi paths act as the identity on the plus part") {
  IntSeq k = {0, 2};
  auto rep = check_partial_integrability(k, 4);
  CHECK(rep.holds);
  CHECK(rep.paths_checked > 0);

  auto rep3 = check_partial_integrability({0, 2, 4}, 4);
  CHECK(rep3.holds);
  CHECK(rep3.paths_checked > 0);
  CHECK_THROWS_AS(check_partial_integrability({0, 1, 2, 3}, 2), InterfaceError);
  CHECK_THROWS_AS(check_partial_integrability({2, 1}, 2), InterfaceError);
}
