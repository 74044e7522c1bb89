#include "sij/gt.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace sij {

namespace {

// --- small shared helpers ----------------------------------------------------

Elem atoms_tuple(const IntSeq& v) {
  std::vector<Elem> kids;
  kids.reserve(v.size());
  for (std::int64_t x : v) kids.push_back(Elem::atom(x));
  return Elem::tuple(std::move(kids));
}

IntSeq atom_values(const Elem& t) {
  IntSeq out;
  if (t.is_unit()) return out;
  for (const Elem& c : t.children()) out.push_back(c.atom_value());
  return out;
}

std::int64_t coord_value(const Elem& c) {
  const Elem* p = &c;
  while (p->is_tagged()) p = &p->tagged_child();
  return p->atom_value();
}

// Reads coordinate values through any tag layers (union-of-products and
// product-of-unions index elements both occur).
IntSeq index_values(const Elem& t) {
  const Elem* p = &t;
  while (p->is_tagged()) p = &p->tagged_child();
  IntSeq out;
  if (p->is_unit()) return out;
  for (const Elem& c : p->children()) out.push_back(coord_value(c));
  return out;
}


using Bounds = std::vector<std::pair<std::int64_t, std::int64_t>>;

SignedSet bounds_product(const Bounds& b) {
  std::vector<SignedSet> parts;
  parts.reserve(b.size());
  for (auto [lo, hi] : b) parts.push_back(make_interval(lo, hi));
  return cartesian_product(parts);
}

Bounds index_bounds(const IntSeq& k) {
  Bounds b;
  for (std::size_t j = 0; j + 1 < k.size(); ++j) b.push_back({k[j], k[j + 1]});
  return b;
}

template <typename K, typename V>
class Memo {
 public:
  template <typename F>
  V get(const K& key, F&& build) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    V value = build();
    std::lock_guard<std::mutex> lock(mu_);
    return map_.emplace(key, std::move(value)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<K, V> map_;
};

SignedSet gt_fiber(const Elem& index_elem) {
  return gt(index_values(index_elem));
}

// Indexed union of identity GT fibers over a value-preserving index sijection.
Sijection lift_over_index(const Sijection& psi) {
  return indexed_union_sij(
      psi, [](const Sided& t) { return gt_fiber(t.elem); },
      [](const Sided& t) { return identity_sij(gt_fiber(t.elem)); },
      /*check_fibers=*/false);
}

}  // namespace

// --- GT sets and formulas ------------------------------------------------------

SignedSet gt(const IntSeq& k) {
  static Memo<IntSeq, SignedSet> memo;
  return memo.get(k, [&]() -> SignedSet {
    if (k.empty()) throw InterfaceError("gt: empty bottom row");
    if (k.size() == 1) return SignedSet({Elem::atom(k[0])}, {});
    SignedSet index = bounds_product(index_bounds(k));
    return indexed_union(index,
                         [](const Elem& l) { return gt(atom_values(l)); });
  });
}

std::int64_t gt_size_formula(const IntSeq& k) {
  std::int64_t num = 1, den = 1;
  int n = static_cast<int>(k.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      num *= k[j] - k[i];
      den *= j - i;
    }
  return num / den;  // the product is always an integer
}

int sgn_seq(const IntSeq& k) {
  int sign = 1;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = i + 1; j < k.size(); ++j) {
      if (k[i] == k[j]) return 0;
      if (k[i] > k[j]) sign = -sign;
    }
  return sign;
}

std::vector<IntSeq> gt_rows(const Elem& e, const IntSeq& k) {
  if (k.size() == 1) return {{e.atom_value()}};
  const Elem& child = e.children()[0];
  IntSeq second = atom_values(e.children()[1]);
  std::vector<IntSeq> rows = gt_rows(child, second);
  rows.push_back(k);
  return rows;
}

std::int64_t eta_top_value(const Elem& gt_elem) {
  const Elem* cur = &gt_elem;
  while (cur->is_tuple()) cur = &cur->children()[0];
  return cur->atom_value();
}

StatValue eta_row_value(const Elem& gt_elem, const IntSeq& k) {
  return StatValue::multiset_seq(gt_rows(gt_elem, k));
}

Statistic eta_top_stat() {
  return Statistic{"eta_top", [](Side, const Elem& e) {
                     return StatValue::integer(eta_top_value(e));
                   }};
}

Statistic eta_row_stat(const IntSeq& k_dom, const IntSeq& k_cod) {
  return Statistic{"eta_row", [k_dom, k_cod](Side s, const Elem& e) {
                     return eta_row_value(e, s == Side::Domain ? k_dom : k_cod);
                   }};
}

Statistic eta_row_i_stat(const IntSeq& k_dom, const IntSeq& k_cod, int i) {
  return Statistic{
      "eta_row_" + std::to_string(i),
      [k_dom, k_cod, i](Side s, const Elem& e) {
        auto rows = gt_rows(e, s == Side::Domain ? k_dom : k_cod);
        return StatValue::multiset_seq({rows.at(static_cast<std::size_t>(i) - 1)});
      }};
}

// --- beta ----------------------------------------------------------------------

namespace {

// S_i = ({a_i},{b_i}); side tags keep the two atoms distinct when a_i == b_i.
SignedSet beta_choice_set(std::int64_t a, std::int64_t b) {
  return SignedSet({Elem::tagged(0, Elem::atom(a))},
                   {Elem::tagged(1, Elem::atom(b))});
}

SignedSet beta_choice_product(const IntSeq& a, const IntSeq& b) {
  std::vector<SignedSet> parts;
  for (std::size_t i = 0; i < a.size(); ++i)
    parts.push_back(beta_choice_set(a[i], b[i]));
  return cartesian_product(parts);
}

IntSeq choice_values(const Elem& m) {
  IntSeq out;
  for (const Elem& c : m.children())
    out.push_back(c.tagged_child().atom_value());
  return out;
}

// [m1,m2) x ... x [m_{n-1},m_n) x [m_n, x)
SignedSet beta_fiber(const IntSeq& m, std::int64_t x) {
  Bounds bounds;
  for (std::size_t j = 0; j + 1 < m.size(); ++j)
    bounds.push_back({m[j], m[j + 1]});
  bounds.push_back({m.back(), x});
  return bounds_product(bounds);
}

SignedSet beta_codomain(const IntSeq& a, const IntSeq& b, std::int64_t x) {
  return indexed_union(beta_choice_product(a, b), [x](const Elem& m) {
    return beta_fiber(choice_values(m), x);
  });
}

Bounds zip_bounds(const IntSeq& a, const IntSeq& b) {
  Bounds out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back({a[i], b[i]});
  return out;
}

}  // namespace

namespace {
Sijection beta_build(const IntSeq& a, const IntSeq& b, std::int64_t x);
}  // namespace

Sijection beta_sij(const IntSeq& a, const IntSeq& b, std::int64_t x) {
  static Memo<std::tuple<IntSeq, IntSeq, std::int64_t>, Sijection> memo;
  return memo.get({a, b, x}, [&] { return beta_build(a, b, x); });
}

namespace {

Sijection beta_build(const IntSeq& a, const IntSeq& b, std::int64_t x) {
  if (a.size() != b.size() || a.empty())
    throw InterfaceError("beta: |a| == |b| >= 1 required");

  if (a.size() == 1) {
    SignedSet dom = bounds_product({{a[0], b[0]}});
    Sijection split = interval_split(a[0], b[0], x);
    Sijection unwrap =
        relabel_sij(dom, split.domain(),
                    [](const Elem& e) { return e.children()[0]; },
                    [](const Elem& e) { return Elem::tuple({e}); });
    SignedSet cod = beta_codomain(a, b, x);
    std::int64_t av = a[0], bv = b[0];
    Sijection wrap = relabel_sij(
        split.codomain(), cod,
        [av, bv](const Elem& e) {
          std::int64_t t = e.tag();
          Elem choice =
              Elem::tuple({Elem::tagged(t, Elem::atom(t == 0 ? av : bv))});
          return Elem::tuple({Elem::tuple({e.tagged_child()}), choice});
        },
        [](const Elem& e) {
          const Elem& fiber = e.children()[0];
          const Elem& choice = e.children()[1].children()[0];
          return Elem::tagged(choice.tag(), fiber.children()[0]);
        });
    return compose_chain({unwrap, split, wrap});
  }

  IntSeq at(a.begin() + 1, a.end()), bt(b.begin() + 1, b.end());
  Sijection tail = beta_sij(at, bt, x);
  SignedSet first = make_interval(a[0], b[0]);
  SignedSet dom = bounds_product(zip_bounds(a, b));

  // (v1,...,vn) <-> (v1, (v2,...,vn))
  SignedSet pair_dom = cartesian_product({first, tail.domain()});
  Sijection c0 = relabel_sij(
      dom, pair_dom,
      [](const Elem& e) {
        const auto& kids = e.children();
        std::vector<Elem> rest(kids.begin() + 1, kids.end());
        return Elem::tuple({kids[0], Elem::tuple(std::move(rest))});
      },
      [](const Elem& e) {
        std::vector<Elem> kids = {e.children()[0]};
        for (const Elem& c : e.children()[1].children()) kids.push_back(c);
        return Elem::tuple(std::move(kids));
      });

  Sijection c1 = product_sij({identity_sij(first), tail});

  // (v1, (fib, mT)) <-> ((v1, fib), mT)
  SignedSet choices_tail = beta_choice_product(at, bt);
  auto pair_fiber = [first, x](const Elem& mt) {
    return cartesian_product({first, beta_fiber(choice_values(mt), x)});
  };
  SignedSet mid = indexed_union(choices_tail, pair_fiber);
  Sijection c2 = relabel_sij(
      c1.codomain(), mid,
      [](const Elem& e) {
        const Elem& v1 = e.children()[0];
        const Elem& fib = e.children()[1].children()[0];
        const Elem& mt = e.children()[1].children()[1];
        return Elem::tuple({Elem::tuple({v1, fib}), mt});
      },
      [](const Elem& e) {
        const Elem& pairpart = e.children()[0];
        const Elem& mt = e.children()[1];
        return Elem::tuple({pairpart.children()[0],
                            Elem::tuple({pairpart.children()[1], mt})});
      });

  // Per tail choice mT: split the first interval at m2 and absorb the two
  // parts as the S_1 choice.
  std::int64_t a0 = a[0], b0 = b[0];
  auto split_cod = [a0, b0, x](const Elem& mt) {
    IntSeq mvals = choice_values(mt);
    SignedSet tail_prod = beta_fiber(mvals, x);
    return disjoint_union(
        {cartesian_product({make_interval(a0, mvals[0]), tail_prod}),
         cartesian_product({make_interval(mvals[0], b0), tail_prod})});
  };
  auto split_fiber = [a0, b0, x, split_cod](const Elem& mt) {
    IntSeq mvals = choice_values(mt);
    std::int64_t m2 = mvals[0];
    SignedSet tail_prod = beta_fiber(mvals, x);
    Sijection prod =
        product_sij({interval_split(a0, b0, m2), identity_sij(tail_prod)});
    Sijection dist = relabel_sij(
        prod.codomain(), split_cod(mt),
        [](const Elem& e) {
          const Elem& tv = e.children()[0];
          return Elem::tagged(
              tv.tag(), Elem::tuple({tv.tagged_child(), e.children()[1]}));
        },
        [](const Elem& e) {
          const Elem& inner = e.tagged_child();
          return Elem::tuple({Elem::tagged(e.tag(), inner.children()[0]),
                              inner.children()[1]});
        });
    return compose(prod, dist);
  };
  Sijection c3 = indexed_union_sij(
      identity_sij(choices_tail),
      [pair_fiber, split_cod](const Sided& t) {
        return t.side == Side::Domain ? pair_fiber(t.elem) : split_cod(t.elem);
      },
      oriented_fiber_family(split_fiber), /*check_fibers=*/false);

  // ((tag t (v, fib)), mT) <-> ((v, fib...), (tag t m1, mT...))
  SignedSet cod = beta_codomain(a, b, x);
  Sijection c4 = relabel_sij(
      c3.codomain(), cod,
      [a0, b0](const Elem& e) {
        const Elem& tagged_pair = e.children()[0];
        const Elem& mt = e.children()[1];
        std::int64_t t = tagged_pair.tag();
        const Elem& v = tagged_pair.tagged_child().children()[0];
        const Elem& fib = tagged_pair.tagged_child().children()[1];
        std::vector<Elem> coords = {v};
        for (const Elem& c : fib.children()) coords.push_back(c);
        std::vector<Elem> m = {Elem::tagged(t, Elem::atom(t == 0 ? a0 : b0))};
        for (const Elem& c : mt.children()) m.push_back(c);
        return Elem::tuple(
            {Elem::tuple(std::move(coords)), Elem::tuple(std::move(m))});
      },
      [](const Elem& e) {
        const Elem& coords = e.children()[0];
        const Elem& m = e.children()[1];
        std::int64_t t = m.children()[0].tag();
        std::vector<Elem> fib(coords.children().begin() + 1,
                              coords.children().end());
        std::vector<Elem> mt(m.children().begin() + 1, m.children().end());
        Elem pair =
            Elem::tuple({coords.children()[0], Elem::tuple(std::move(fib))});
        return Elem::tuple(
            {Elem::tagged(t, std::move(pair)), Elem::tuple(std::move(mt))});
      });

  return compose_chain({c0, c1, c2, c3, c4});
}

}  // namespace

// --- rho -------------------------------------------------------------------------

namespace {
Sijection rho_build(const IntSeq& a, const IntSeq& b, std::int64_t x);
}  // namespace

Sijection rho_sij(const IntSeq& a, const IntSeq& b, std::int64_t x) {
  static Memo<std::tuple<IntSeq, IntSeq, std::int64_t>, Sijection> memo;
  return memo.get({a, b, x}, [&] { return rho_build(a, b, x); });
}

namespace {
Sijection rho_build(const IntSeq& a, const IntSeq& b, std::int64_t x) {
  Sijection beta = beta_sij(a, b, x);
  // Codomain-side indices are (fiber, choice) pairs; the GT fiber reads the
  // fiber coordinates.
  auto fiber_values = [](const Sided& t) {
    return atom_values(t.side == Side::Domain ? t.elem
                                              : t.elem.children()[0]);
  };
  Sijection lifted = indexed_union_sij(
      beta,
      [fiber_values](const Sided& t) { return gt(fiber_values(t)); },
      [fiber_values](const Sided& t) {
        return identity_sij(gt(fiber_values(t)));
      },
      /*check_fibers=*/false);
  // (g, (fib, m)) <-> ((g, fib), m): the fiber product [m1,m2) x ... x [mn,x)
  // is exactly the index row of GT(m, x).
  SignedSet cod = indexed_union(beta_choice_product(a, b), [x](const Elem& m) {
    IntSeq row = choice_values(m);
    row.push_back(x);
    return gt(row);
  });
  Sijection nest = relabel_sij(
      lifted.codomain(), cod,
      [](const Elem& e) {
        const Elem& g = e.children()[0];
        const Elem& fib = e.children()[1].children()[0];
        const Elem& m = e.children()[1].children()[1];
        return Elem::tuple({Elem::tuple({g, fib}), m});
      },
      [](const Elem& e) {
        const Elem& gt_elem = e.children()[0];
        const Elem& m = e.children()[1];
        return Elem::tuple({gt_elem.children()[0],
                            Elem::tuple({gt_elem.children()[1], m})});
      });
  return compose(lifted, nest);
}
}  // namespace

// --- pi and sigma (mutual induction) ----------------------------------------------

namespace {

IntSeq swap_at(IntSeq v, int i) {  // 1-based position i
  std::swap(v[i - 1], v[i]);
  return v;
}

struct SigmaKey {
  IntSeq a, b;
  int i;
  bool operator<(const SigmaKey& o) const {
    return std::tie(a, b, i) < std::tie(o.a, o.b, o.i);
  }
};

Memo<std::pair<IntSeq, int>, Sijection>& pi_memo() {
  static Memo<std::pair<IntSeq, int>, Sijection> memo;
  return memo;
}

Memo<SigmaKey, Sijection>& sigma_memo() {
  static Memo<SigmaKey, Sijection> memo;
  return memo;
}

bool sigma_precondition(const IntSeq& a, const IntSeq& b, int i) {
  std::int64_t a1 = a[i - 1], b1 = b[i - 1], a2 = a[i], b2 = b[i];
  bool identical = a1 == a2 && b1 == b2;
  bool reversed = a1 == b2 && b1 == a2;
  bool both_empty = a1 == b1 && a2 == b2;
  return identical || reversed || both_empty;
}

Sijection pi_build(const IntSeq& k, int i);

Sijection sigma_build(const IntSeq& a, const IntSeq& b, int i) {
  if (a.size() != b.size() || a.size() < 2 || i < 1 ||
      i >= static_cast<int>(a.size()))
    throw InterfaceError("sigma: bad arity or position");
  if (!sigma_precondition(a, b, i))
    throw InterfaceError("sigma: intervals at positions i, i+1 must match");
  SignedSet index = bounds_product(zip_bounds(a, b));
  SignedSet dom =
      indexed_union(index, [](const Elem& l) { return gt(atom_values(l)); });
  auto rule = [i](const Sided& v) -> Sided {
    const Elem& g = v.elem.children()[0];
    const Elem& l = v.elem.children()[1];
    IntSeq vals = atom_values(l);
    bool is_rep = vals[i - 1] < vals[i];
    IntSeq rep = is_rep ? vals : swap_at(vals, i);
    Sijection phi = pi_sij(rep, i);
    Sided r = phi.eval(is_rep ? Side::Domain : Side::Codomain, g);
    IntSeq out = r.side == Side::Domain ? rep : swap_at(rep, i);
    return Sided{Side::Domain, Elem::tuple({r.elem, atoms_tuple(out)})};
  };
  return rule_sij(std::move(dom), SignedSet(), rule);
}

// One sigma-cancelled or surviving family in the pi construction.
struct PiPart {
  Bounds bounds;
  int sigma_pos = 0;  // 0 = surviving part
};

Sijection pi_build(const IntSeq& k, int i) {
  int n = static_cast<int>(k.size());
  if (n < 2 || i < 1 || i > n - 1) throw InterfaceError("pi: bad position");
  IntSeq swapped = swap_at(k, i);
  if (n == 2) return identity_sij(gt(k), opposite(gt(swapped)));

  int i0 = i - 1;  // 0-based swap position
  Bounds base = index_bounds(k);
  std::vector<Sijection> theta_factors;
  std::vector<int> tagged_positions;  // positions carrying a split
  for (int j = 0; j < n - 1; ++j) {
    if (i0 >= 1 && j == i0 - 1) {
      // [k_{i-1}, k_i) split at k_{i+1}
      theta_factors.push_back(interval_split(k[i0 - 1], k[i0], k[i0 + 1]));
      tagged_positions.push_back(j);
    } else if (i0 <= n - 3 && j == i0 + 1) {
      // [k_{i+1}, k_{i+2}) split at k_i
      theta_factors.push_back(interval_split(k[i0 + 1], k[i0 + 2], k[i0]));
      tagged_positions.push_back(j);
    } else {
      theta_factors.push_back(
          identity_sij(make_interval(base[j].first, base[j].second)));
    }
  }
  Sijection theta = product_sij(theta_factors);

  // Families after distributing the split tags, in tag order.
  std::vector<PiPart> parts;
  auto family_bounds = [&](int p, int q) {
    Bounds bd = base;
    if (i0 == 0) {
      bd[1] = q == 0 ? std::make_pair(k[1], k[0]) : std::make_pair(k[0], k[2]);
    } else if (i0 == n - 2) {
      bd[i0 - 1] = p == 0 ? std::make_pair(k[i0 - 1], k[i0 + 1])
                          : std::make_pair(k[i0 + 1], k[i0]);
    } else {
      bd[i0 - 1] = p == 0 ? std::make_pair(k[i0 - 1], k[i0 + 1])
                          : std::make_pair(k[i0 + 1], k[i0]);
      bd[i0 + 1] = q == 0 ? std::make_pair(k[i0 + 1], k[i0])
                          : std::make_pair(k[i0], k[i0 + 2]);
    }
    return bd;
  };
  int surviving_tag;
  if (i0 == 0) {
    parts.push_back({family_bounds(0, 0), 1});  // sigma at positions 1,2
    parts.push_back({family_bounds(0, 1), 0});
    surviving_tag = 1;
  } else if (i0 == n - 2) {
    parts.push_back({family_bounds(0, 0), 0});
    parts.push_back({family_bounds(1, 0), n - 2});  // sigma at n-2, n-1
    surviving_tag = 0;
  } else {
    parts.push_back({family_bounds(0, 0), i0 + 1});
    parts.push_back({family_bounds(0, 1), 0});
    parts.push_back({family_bounds(1, 0), i0});
    parts.push_back({family_bounds(1, 1), i0});
    surviving_tag = 1;
  }

  Sijection lifted = lift_over_index(theta);

  // distribute: (g, prod-with-tagged-coords) <-> tag (g, plain prod)
  std::vector<SignedSet> family_unions;
  for (const PiPart& p : parts)
    family_unions.push_back(indexed_union(
        bounds_product(p.bounds),
        [](const Elem& l) { return gt(atom_values(l)); }));
  SignedSet dist_cod =
      disjoint_union(std::span<const SignedSet>(family_unions));
  std::vector<int> tagpos = tagged_positions;
  auto tag_of = [tagpos](const Elem& prod) {
    int tag = 0;
    for (int pos : tagpos)
      tag = 2 * tag + static_cast<int>(prod.children()[pos].tag());
    return tag;
  };
  bool two_parts = tagpos.size() == 1;
  Sijection dist = relabel_sij(
      lifted.codomain(), dist_cod,
      [tagpos, tag_of](const Elem& e) {
        const Elem& g = e.children()[0];
        const Elem& prod = e.children()[1];
        int tag = tag_of(prod);
        std::vector<Elem> coords = prod.children();
        for (int pos : tagpos) coords[pos] = coords[pos].tagged_child();
        return Elem::tagged(
            tag, Elem::tuple({g, Elem::tuple(std::move(coords))}));
      },
      [tagpos, two_parts](const Elem& e) {
        int tag = static_cast<int>(e.tag());
        const Elem& g = e.tagged_child().children()[0];
        const Elem& prod = e.tagged_child().children()[1];
        std::vector<Elem> coords = prod.children();
        if (two_parts) {
          coords[tagpos[0]] = Elem::tagged(tag, coords[tagpos[0]]);
        } else {
          coords[tagpos[0]] = Elem::tagged(tag / 2, coords[tagpos[0]]);
          coords[tagpos[1]] = Elem::tagged(tag % 2, coords[tagpos[1]]);
        }
        return Elem::tuple({g, Elem::tuple(std::move(coords))});
      });

  SignedSet target = opposite(gt(swapped));
  std::vector<Sijection> branch;
  for (std::size_t t = 0; t < parts.size(); ++t) {
    if (static_cast<int>(t) == surviving_tag) {
      branch.push_back(identity_sij(family_unions[t], target));
    } else {
      IntSeq fa, fb;
      for (auto [lo, hi] : parts[t].bounds) {
        fa.push_back(lo);
        fb.push_back(hi);
      }
      branch.push_back(sigma_sij(fa, fb, parts[t].sigma_pos));
    }
  }
  Sijection branched = union_sij(std::move(branch));

  int surv = surviving_tag;
  Sijection strip = relabel_sij(
      branched.codomain(), target,
      [](const Elem& e) { return e.tagged_child(); },
      [surv](const Elem& e) { return Elem::tagged(surv, e); });

  return compose_chain({lifted, dist, branched, strip});
}

}  // namespace

Sijection pi_sij(const IntSeq& k, int i) {
  return pi_memo().get({k, i}, [&] { return pi_build(k, i); });
}

Sijection sigma_sij(const IntSeq& a, const IntSeq& b, int i) {
  return sigma_memo().get({a, b, i}, [&] { return sigma_build(a, b, i); });
}

// --- gamma_row ----------------------------------------------------------------------

std::vector<std::pair<IntSeq, IntSeq>> gamma_row_parts(const IntSeq& k,
                                                       std::int64_t x) {
  int n = static_cast<int>(k.size());
  std::vector<std::pair<IntSeq, IntSeq>> parts;
  for (int i = 1; i <= n; ++i) {
    IntSeq sub = k;
    sub[i - 1] = x;
    IntSeq lo, hi;
    for (auto [l, h] : index_bounds(sub)) {
      lo.push_back(l);
      hi.push_back(h);
    }
    parts.push_back({lo, hi});
  }
  for (int i = 1; i <= n - 2; ++i) {
    IntSeq lo, hi;
    for (int j = 0; j < n - 1; ++j) {
      if (j == i - 1 || j == i) {
        lo.push_back(k[i]);
        hi.push_back(x);
      } else {
        lo.push_back(k[j]);
        hi.push_back(k[j + 1]);
      }
    }
    parts.push_back({lo, hi});
  }
  return parts;
}

namespace {

SignedSet gamma_codomain(const IntSeq& k, std::int64_t x) {
  std::vector<SignedSet> parts;
  for (const auto& [lo, hi] : gamma_row_parts(k, x))
    parts.push_back(bounds_product(zip_bounds(lo, hi)));
  return disjoint_union(std::span<const SignedSet>(parts));
}

Sijection gamma_row_build(const IntSeq& k, std::int64_t x) {
  int n = static_cast<int>(k.size());
  if (n < 2) throw InterfaceError("gamma_row: need n >= 2");
  SignedSet dom = bounds_product(index_bounds(k));
  SignedSet cod = gamma_codomain(k, x);

  if (n == 2) {
    Sijection split = interval_split(k[0], k[1], x);
    Sijection unwrap =
        relabel_sij(dom, split.domain(),
                    [](const Elem& e) { return e.children()[0]; },
                    [](const Elem& e) { return Elem::tuple({e}); });
    // split parts ([k1,x), [x,k2)) land at codomain tags (1, 0).
    Sijection retag = relabel_sij(
        split.codomain(), cod,
        [](const Elem& e) {
          return Elem::tagged(1 - e.tag(), Elem::tuple({e.tagged_child()}));
        },
        [](const Elem& e) {
          return Elem::tagged(1 - e.tag(), e.tagged_child().children()[0]);
        });
    return compose_chain({unwrap, split, retag});
  }

  IntSeq kh(k.begin(), k.end() - 1);
  Sijection head = gamma_row_sij(kh, x);
  SignedSet last = make_interval(k[n - 2], k[n - 1]);

  SignedSet pair_dom = cartesian_product({head.domain(), last});
  Sijection c0 = relabel_sij(
      dom, pair_dom,
      [](const Elem& e) {
        const auto& kids = e.children();
        std::vector<Elem> front(kids.begin(), kids.end() - 1);
        return Elem::tuple({Elem::tuple(std::move(front)), kids.back()});
      },
      [](const Elem& e) {
        std::vector<Elem> kids = e.children()[0].children();
        kids.push_back(e.children()[1]);
        return Elem::tuple(std::move(kids));
      });

  Sijection c1 = product_sij({head, identity_sij(last)});

  // distribute the head tag over the appended interval, flattening products
  auto head_parts = gamma_row_parts(kh, x);
  std::vector<SignedSet> flat_parts;
  for (const auto& [lo, hi] : head_parts) {
    IntSeq lo2 = lo, hi2 = hi;
    lo2.push_back(k[n - 2]);
    hi2.push_back(k[n - 1]);
    flat_parts.push_back(bounds_product(zip_bounds(lo2, hi2)));
  }
  SignedSet dist_cod = disjoint_union(std::span<const SignedSet>(flat_parts));
  Sijection c2 = relabel_sij(
      c1.codomain(), dist_cod,
      [](const Elem& e) {
        const Elem& tagged_front = e.children()[0];
        std::vector<Elem> coords = tagged_front.tagged_child().children();
        coords.push_back(e.children()[1]);
        return Elem::tagged(tagged_front.tag(),
                            Elem::tuple(std::move(coords)));
      },
      [](const Elem& e) {
        std::vector<Elem> coords = e.tagged_child().children();
        Elem lastc = coords.back();
        coords.pop_back();
        return Elem::tuple(
            {Elem::tagged(e.tag(), Elem::tuple(std::move(coords))), lastc});
      });

  // The part A'_{n-1} (x) [k_{n-1},k_n), at tag n-2, splits into A_{n-1},
  // A_n and B_{n-2}; everything else is already a canonical part.
  int rtag = n - 2;
  Bounds r_bounds;
  {
    const auto& [lo, hi] = head_parts[rtag];
    IntSeq lo2 = lo, hi2 = hi;
    lo2.push_back(k[n - 2]);
    hi2.push_back(k[n - 1]);
    r_bounds = zip_bounds(lo2, hi2);
  }

  auto canonical_parts = gamma_row_parts(k, x);
  auto part_set = [&](int idx) {
    const auto& [lo, hi] = canonical_parts[idx];
    return bounds_product(zip_bounds(lo, hi));
  };

  // m1: split the last coordinate of R at x.
  std::vector<Sijection> m1_factors;
  for (std::size_t j = 0; j + 1 < r_bounds.size(); ++j)
    m1_factors.push_back(
        identity_sij(make_interval(r_bounds[j].first, r_bounds[j].second)));
  m1_factors.push_back(interval_split(k[n - 2], k[n - 1], x));
  Sijection m1 = product_sij(m1_factors);
  auto last_tag_dist = [](const SignedSet& from, const SignedSet& to) {
    return relabel_sij(
        from, to,
        [](const Elem& e) {
          std::vector<Elem> coords = e.children();
          Elem t = coords.back();
          coords.back() = t.tagged_child();
          return Elem::tagged(t.tag(), Elem::tuple(std::move(coords)));
        },
        [](const Elem& e) {
          std::vector<Elem> coords = e.tagged_child().children();
          coords.back() = Elem::tagged(e.tag(), coords.back());
          return Elem::tuple(std::move(coords));
        });
  };
  Bounds ra_bounds = r_bounds, rb_bounds = r_bounds;
  ra_bounds.back() = {k[n - 2], x};
  rb_bounds.back() = {x, k[n - 1]};
  SignedSet ra = bounds_product(ra_bounds);
  SignedSet rb = bounds_product(rb_bounds);  // equals A_{n-1}
  Sijection m2 = last_tag_dist(m1.codomain(), disjoint_union({ra, rb}));

  // M_a: split coordinate n-3 of R_a at k_{n-1}.
  std::vector<Sijection> m3_factors;
  for (std::size_t j = 0; j < ra_bounds.size(); ++j) {
    if (j == ra_bounds.size() - 2)
      m3_factors.push_back(interval_split(k[n - 3], x, k[n - 2]));
    else
      m3_factors.push_back(
          identity_sij(make_interval(ra_bounds[j].first, ra_bounds[j].second)));
  }
  Sijection m3 = product_sij(m3_factors);
  auto mid_tag_dist = [](const SignedSet& from, const SignedSet& to,
                         std::size_t pos) {
    return relabel_sij(
        from, to,
        [pos](const Elem& e) {
          std::vector<Elem> coords = e.children();
          Elem t = coords[pos];
          coords[pos] = t.tagged_child();
          return Elem::tagged(t.tag(), Elem::tuple(std::move(coords)));
        },
        [pos](const Elem& e) {
          std::vector<Elem> coords = e.tagged_child().children();
          coords[pos] = Elem::tagged(e.tag(), coords[pos]);
          return Elem::tuple(std::move(coords));
        });
  };
  SignedSet a_n = part_set(n - 1);       // A_n
  SignedSet b_last = part_set(2 * n - 3);  // B_{n-2}
  Sijection m4 =
      mid_tag_dist(m3.codomain(), disjoint_union({a_n, b_last}),
                   ra_bounds.size() - 2);
  Sijection m_a = compose_chain({m3, m4});

  Sijection m5 = union_sij({m_a, identity_sij(rb, part_set(n - 2))});
  // nested tags -> flat 3-part union [A_{n-1}, A_n, B_{n-2}]
  SignedSet merged =
      disjoint_union({part_set(n - 2), part_set(n - 1), part_set(2 * n - 3)});
  Sijection m6 = relabel_sij(
      m5.codomain(), merged,
      [](const Elem& e) {
        if (e.tag() == 1) return Elem::tagged(0, e.tagged_child());
        const Elem& inner = e.tagged_child();
        return Elem::tagged(inner.tag() == 0 ? 1 : 2, inner.tagged_child());
      },
      [](const Elem& e) {
        if (e.tag() == 0) return Elem::tagged(1, e.tagged_child());
        return Elem::tagged(0,
                            Elem::tagged(e.tag() == 1 ? 0 : 1, e.tagged_child()));
      });
  Sijection merge_r = compose_chain({m1, m2, m5, m6});

  // union over all distributed parts; R gets the merge machinery
  std::vector<Sijection> branches;
  for (int t = 0; t < static_cast<int>(flat_parts.size()); ++t) {
    if (t == rtag)
      branches.push_back(merge_r);
    else if (t < rtag)
      branches.push_back(identity_sij(flat_parts[t], part_set(t)));
    else  // B'_i parts shift up by one in the canonical order
      branches.push_back(identity_sij(flat_parts[t], part_set(t + 1)));
  }
  Sijection c3 = union_sij(std::move(branches));

  // flatten: B' tags shift, and R's inner 3-part union lands at its canonical
  // slots [n-2, n-1, 2n-3].
  Sijection c4 = relabel_sij(
      c3.codomain(), cod,
      [rtag, n](const Elem& e) {
        int t = static_cast<int>(e.tag());
        if (t < rtag) return Elem::tagged(t, e.tagged_child());
        if (t > rtag) return Elem::tagged(t + 1, e.tagged_child());
        const Elem& inner = e.tagged_child();
        int r = static_cast<int>(inner.tag());
        int target = r == 0 ? n - 2 : (r == 1 ? n - 1 : 2 * n - 3);
        return Elem::tagged(target, inner.tagged_child());
      },
      [rtag, n](const Elem& e) {
        int t = static_cast<int>(e.tag());
        if (t < rtag) return Elem::tagged(t, e.tagged_child());
        if (t == n - 2 || t == n - 1 || t == 2 * n - 3) {
          int r = t == n - 2 ? 0 : (t == n - 1 ? 1 : 2);
          return Elem::tagged(rtag, Elem::tagged(r, e.tagged_child()));
        }
        return Elem::tagged(t - 1, e.tagged_child());
      });

  return compose_chain({c0, c1, c2, c3, c4});
}

}  // namespace

Sijection gamma_row_sij(const IntSeq& k, std::int64_t x) {
  static Memo<std::pair<IntSeq, std::int64_t>, Sijection> memo;
  return memo.get({k, x}, [&] { return gamma_row_build(k, x); });
}

// --- tau -----------------------------------------------------------------------------

Sijection tau_sij(const IntSeq& k, std::int64_t x) {
  static Memo<std::pair<IntSeq, std::int64_t>, Sijection> memo;
  return memo.get({k, x}, [&]() -> Sijection {
    int n = static_cast<int>(k.size());
    if (n == 1) {
      SignedSet dom = gt(k);
      SignedSet cod = disjoint_union({gt({x})});
      return finite_map_sij(
          dom, cod,
          {{Sided{Side::Domain, Elem::atom(k[0])},
            Sided{Side::Codomain, Elem::tagged(0, Elem::atom(x))}}});
    }
    Sijection gamma = gamma_row_sij(k, x);
    Sijection lifted = lift_over_index(gamma);

    auto parts = gamma_row_parts(k, x);
    std::vector<SignedSet> part_unions;
    for (const auto& [lo, hi] : parts)
      part_unions.push_back(
          indexed_union(bounds_product(zip_bounds(lo, hi)),
                        [](const Elem& l) { return gt(atom_values(l)); }));
    SignedSet dist_cod =
        disjoint_union(std::span<const SignedSet>(part_unions));
    Sijection dist = relabel_sij(
        lifted.codomain(), dist_cod,
        [](const Elem& e) {
          const Elem& g = e.children()[0];
          const Elem& t = e.children()[1];
          return Elem::tagged(t.tag(),
                              Elem::tuple({g, t.tagged_child()}));
        },
        [](const Elem& e) {
          const Elem& inner = e.tagged_child();
          return Elem::tuple(
              {inner.children()[0],
               Elem::tagged(e.tag(), inner.children()[1])});
        });

    std::vector<SignedSet> subs;
    for (int i = 1; i <= n; ++i) {
      IntSeq sub = k;
      sub[i - 1] = x;
      subs.push_back(gt(sub));
    }
    std::vector<Sijection> branches;
    for (int t = 0; t < static_cast<int>(parts.size()); ++t) {
      if (t < n) {
        branches.push_back(identity_sij(part_unions[t], subs[t]));
      } else {
        branches.push_back(
            sigma_sij(parts[t].first, parts[t].second, t - n + 1));
      }
    }
    Sijection branched = union_sij(std::move(branches));

    SignedSet cod = disjoint_union(std::span<const SignedSet>(subs));
    Sijection strip = relabel_sij(
        branched.codomain(), cod,
        [](const Elem& e) { return e; },
        [](const Elem& e) { return e; });
    return compose_chain({lifted, dist, branched, strip});
  });
}

// --- signed enumeration -----------------------------------------------------------------

bool profile_is_classical(const RowProfile& a) {
  for (std::size_t r = 0; r + 1 < a.size(); ++r) {
    for (std::size_t j = 0; j <= r; ++j) {
      if (!(a[r + 1][j] <= a[r][j] && a[r][j] < a[r + 1][j + 1])) return false;
    }
  }
  return true;
}

std::int64_t restricted_count(const IntSeq& k, const RowProfile& a) {
  if (a.size() != k.size())
    throw InterfaceError("restricted_count: profile depth mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != i + 1)
      throw InterfaceError("restricted_count: profile row cardinality");
    if (!std::is_sorted(a[i].begin(), a[i].end()))
      throw InterfaceError("restricted_count: multisets must be sorted");
  }
  IntSeq kk = k;
  std::sort(kk.begin(), kk.end());
  if (kk != a.back())
    throw InterfaceError("restricted_count: bottom multiset mismatch");
  return profile_is_classical(a) ? sgn_seq(k) : 0;
}

// --- generalized GT patterns --------------------------------------------------------------

GgtParams GgtParams::classical(int n) {
  GgtParams p;
  for (int i = 1; i <= n - 1; ++i) {
    std::vector<std::pair<int, int>> level;
    for (int j = 1; j <= i; ++j) level.push_back({j, j + 1});
    p.levels.push_back(std::move(level));
  }
  return p;
}

void GgtParams::validate() const {
  for (int i = 1; i <= rows(); ++i) {
    const auto& level = levels[i - 1];
    if (static_cast<int>(level.size()) != i)
      throw InterfaceError("ggt params: level " + std::to_string(i) +
                           " must have " + std::to_string(i) + " entries");
    for (auto [p, q] : level)
      if (p < 1 || p > i + 1 || q < 1 || q > i + 1)
        throw InterfaceError("ggt params: entries must lie in 1..i+1");
  }
}

SignedSet ggt(const IntSeq& k, const GgtParams& params) {
  params.validate();
  int n = static_cast<int>(k.size());
  if (n == 1) return SignedSet({Elem::atom(k[0])}, {});
  if (params.rows() < n - 1)
    throw InterfaceError("ggt: not enough parameter levels");
  Bounds bounds;
  for (auto [p, q] : params.levels[n - 2]) bounds.push_back({k[p - 1], k[q - 1]});
  return indexed_union(bounds_product(bounds), [&](const Elem& l) {
    return ggt(atom_values(l), params);
  });
}

int ggt_param_sign(const GgtParams& params) {
  params.validate();
  int total = 1;
  for (int i = 1; i <= params.rows(); ++i) {
    const auto& level = params.levels[i - 1];
    int verts = i + 1;
    // union-find; any cycle (incl. self-loops and doubled edges) kills the sign
    std::vector<int> parent(verts + 1);
    for (int v = 1; v <= verts; ++v) parent[v] = v;
    std::function<int(int)> find = [&](int v) {
      return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    bool tree = true;
    for (auto [p, q] : level) {
      int rp = find(p), rq = find(q);
      if (rp == rq) {
        tree = false;
        break;
      }
      parent[rp] = rq;
    }
    if (!tree) return 0;
    // geodesic distances from r_i(0) = 1
    std::vector<std::vector<int>> adj(verts + 1);
    for (auto [p, q] : level) {
      adj[p].push_back(q);
      adj[q].push_back(p);
    }
    std::vector<int> dist(verts + 1, -1);
    std::vector<int> queue = {1};
    dist[1] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      int v = queue[h];
      for (int w : adj[v])
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
    }
    std::vector<int> r = {1};
    int flips = 0;
    for (auto [p, q] : level) {
      int far = dist[p] > dist[q] ? p : q;
      if (far == p) ++flips;
      r.push_back(far);
    }
    int perm_sign = 1;
    for (std::size_t s = 0; s < r.size(); ++s)
      for (std::size_t t = s + 1; t < r.size(); ++t)
        if (r[s] > r[t]) perm_sign = -perm_sign;
    total *= (flips % 2 ? -1 : 1) * perm_sign;
  }
  return total;
}

std::int64_t ggt_size_formula(const IntSeq& k, const GgtParams& params) {
  IntSeq sorted = k;
  std::sort(sorted.begin(), sorted.end());
  return sgn_seq(k) * ggt_param_sign(params) * gt_size_formula(sorted);
}

// --- integrable-system spot check -----------------------------------------------------------

IntegrabilityReport check_partial_integrability(const IntSeq& k, int bound) {
  IntegrabilityReport rep;
  int n = static_cast<int>(k.size());
  if (n > 3) throw InterfaceError("integrability check: n <= 3 enforced");
  for (std::size_t i = 0; i + 1 < k.size(); ++i)
    if (k[i] >= k[i + 1])
      throw InterfaceError("integrability check: k must be strictly increasing");

  SignedSet base = gt(k);
  std::vector<std::vector<int>> paths;
  std::vector<std::vector<int>> frontier = {{}};
  for (int len = 1; len <= bound; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& p : frontier)
      for (int i = 1; i <= n - 1; ++i) {
        auto q = p;
        q.push_back(i);
        next.push_back(q);
      }
    frontier = next;
    for (const auto& p : frontier) {
      IntSeq cur = k;
      for (int i : p) cur = swap_at(cur, i);
      if (cur == k) paths.push_back(p);
    }
  }

  for (const auto& path : paths) {
    std::vector<Sijection> chain;
    IntSeq cur = k;
    for (std::size_t t = 0; t < path.size(); ++t) {
      Sijection step = pi_sij(cur, path[t]);
      chain.push_back(t % 2 == 0 ? step : opposite_sij(step));
      cur = swap_at(cur, path[t]);
    }
    Sijection composite = compose_chain(std::move(chain));
    ++rep.paths_checked;
    for (const Elem& e : base.plus()) {
      Sided r = composite.eval(Side::Domain, e);
      if (!(r.side == Side::Codomain && r.elem == e)) {
        rep.holds = false;
        rep.detail = "path of length " + std::to_string(path.size()) +
                     " is not the identity at " + e.to_sexpr();
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace sij
