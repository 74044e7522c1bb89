#include "sij/gamma.hpp"

#include <algorithm>
#include <mutex>

namespace sij {

namespace {

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

Elem arrows_tuple(const std::vector<Arrow>& mu) {
  std::vector<Elem> kids;
  kids.reserve(mu.size());
  for (Arrow a : mu) kids.push_back(Elem::arrow(a));
  return Elem::tuple(std::move(kids));
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

IntSeq swap_at(IntSeq v, int i) {  // 1-based
  std::swap(v[i - 1], v[i]);
  return v;
}

// Bound pairs S_i = ({a_i},{b_i}) determined by the arrow row.
std::int64_t s_lower(const IntSeq& k, const std::vector<Arrow>& mu, int i) {
  return k[i - 1] + delta_ne(mu[i - 1]);
}
std::int64_t s_upper(const IntSeq& k, const std::vector<Arrow>& mu, int i) {
  return k[i] - delta_nw(mu[i]);
}

}  // namespace

std::int64_t mid_row_bound(const IntSeq& k, const std::vector<Arrow>& mu,
                           const IntSeq& c, int i, int omega) {
  std::int64_t base = omega == 0 ? s_lower(k, mu, i) : s_upper(k, mu, i);
  return base + c[i - 1];
}

// --- phi1 ---------------------------------------------------------------------

namespace {

// The S_i choice product for a fixed arrow row, with an additive shift.
SignedSet choice_product(const IntSeq& k, const std::vector<Arrow>& mu,
                         const IntSeq& shift) {
  std::vector<SignedSet> parts;
  int n = static_cast<int>(k.size());
  for (int i = 1; i <= n - 1; ++i)
    parts.push_back(SignedSet(
        {Elem::tagged(0, Elem::atom(s_lower(k, mu, i) + shift[i - 1]))},
        {Elem::tagged(1, Elem::atom(s_upper(k, mu, i) + shift[i - 1]))}));
  return cartesian_product(parts);
}

IntSeq choice_values(const Elem& m) {
  IntSeq out;
  for (const Elem& c : m.children())
    out.push_back(c.tagged_child().atom_value());
  return out;
}

// Shifted interval product prod_i [a_i + c_i, b_i + c_i).
SignedSet shifted_index(const IntSeq& k, const std::vector<Arrow>& mu,
                        const IntSeq& c) {
  std::vector<SignedSet> parts;
  int n = static_cast<int>(k.size());
  for (int i = 1; i <= n - 1; ++i)
    parts.push_back(make_interval(s_lower(k, mu, i) + c[i - 1],
                                  s_upper(k, mu, i) + c[i - 1]));
  return cartesian_product(parts);
}

// D(k) = U_mu U_{l in mu(k)} SGT(l): the shared endpoint of the recursion
// step and of phi1.
SignedSet gmt_step_domain(const IntSeq& k, SignMode mode) {
  int n = static_cast<int>(k.size());
  return indexed_union(arrow_row_set(n, mode), [&](const Elem& mu_elem) {
    return indexed_union(mu_apply(arrows_of(mu_elem), k), [&](const Elem& l) {
      return sgt(atom_values(l), mode);
    });
  });
}

SignedSet phi1_codomain(const IntSeq& k, std::int64_t x, SignMode mode) {
  int n = static_cast<int>(k.size());
  return indexed_union(arrow_row_set(n, mode), [&](const Elem& mu_elem) {
    std::vector<Arrow> mu = arrows_of(mu_elem);
    return indexed_union(
        arrow_pattern_set(n - 1, mode), [&](const Elem& ap) {
          IntSeq c = c_vector(ap, n - 1);
          return indexed_union(
              choice_product(k, mu, IntSeq(static_cast<std::size_t>(n - 1), 0)),
              [&](const Elem& m) {
                IntSeq row = choice_values(m);
                for (int i = 0; i < n - 1; ++i) row[i] += c[i];
                row.push_back(x);
                return gt(row);
              });
        });
  });
}

Sijection phi1_build(const IntSeq& k, std::int64_t x, SignMode mode) {
  int n = static_cast<int>(k.size());
  if (n < 2) throw InterfaceError("phi1: need n >= 2");
  SignedSet ar = arrow_row_set(n, mode);
  SignedSet ap = arrow_pattern_set(n - 1, mode);
  SignedSet dom = gmt_step_domain(k, mode);

  // s1: ((g,T), l, mu) <-> ((g, l), T, mu)
  SignedSet d1 = indexed_union(ar, [&](const Elem& mu_elem) {
    std::vector<Arrow> mu = arrows_of(mu_elem);
    return indexed_union(ap, [&](const Elem& t) {
      return indexed_union(mu_apply(mu, k), [&](const Elem& l) {
        return gt(ap_apply(t, atom_values(l)));
      });
    });
  });
  Sijection s1 = relabel_sij(
      dom, d1,
      [](const Elem& e) {
        const Elem& inner = e.children()[0];
        const Elem& mu = e.children()[1];
        const Elem& sgt_elem = inner.children()[0];
        const Elem& l = inner.children()[1];
        const Elem& g = sgt_elem.children()[0];
        const Elem& t = sgt_elem.children()[1];
        return Elem::tuple(
            {Elem::tuple({Elem::tuple({g, l}), t}), mu});
      },
      [](const Elem& e) {
        const Elem& inner = e.children()[0];
        const Elem& mu = e.children()[1];
        const Elem& gl = inner.children()[0];
        const Elem& t = inner.children()[1];
        const Elem& g = gl.children()[0];
        const Elem& l = gl.children()[1];
        return Elem::tuple(
            {Elem::tuple({Elem::tuple({g, t}), l}), mu});
      });

  // s2: reindex l -> l + c(T) per (mu, T) fiber
  SignedSet d2 = indexed_union(ar, [&](const Elem& mu_elem) {
    std::vector<Arrow> mu = arrows_of(mu_elem);
    return indexed_union(ap, [&](const Elem& t) {
      IntSeq c = c_vector(t, n - 1);
      return indexed_union(shifted_index(k, mu, c), [](const Elem& l) {
        return gt(atom_values(l));
      });
    });
  });
  Sijection s2 = relabel_sij(
      d1, d2,
      [n](const Elem& e) {
        const Elem& inner = e.children()[0];
        const Elem& mu = e.children()[1];
        const Elem& gl = inner.children()[0];
        const Elem& t = inner.children()[1];
        IntSeq c = c_vector(t, n - 1);
        IntSeq l = atom_values(gl.children()[1]);
        for (int i = 0; i < n - 1; ++i) l[i] += c[i];
        return Elem::tuple(
            {Elem::tuple({Elem::tuple({gl.children()[0], atoms_tuple(l)}), t}),
             mu});
      },
      [n](const Elem& e) {
        const Elem& inner = e.children()[0];
        const Elem& mu = e.children()[1];
        const Elem& gl = inner.children()[0];
        const Elem& t = inner.children()[1];
        IntSeq c = c_vector(t, n - 1);
        IntSeq l = atom_values(gl.children()[1]);
        for (int i = 0; i < n - 1; ++i) l[i] -= c[i];
        return Elem::tuple(
            {Elem::tuple({Elem::tuple({gl.children()[0], atoms_tuple(l)}), t}),
             mu});
      });

  // s3: rho per (mu, T) fiber
  auto rho_for = [k, x, n](const Elem& mu_elem, const Elem& t) {
    std::vector<Arrow> mu = arrows_of(mu_elem);
    IntSeq c = c_vector(t, n - 1);
    IntSeq a, b;
    for (int i = 1; i <= n - 1; ++i) {
      a.push_back(s_lower(k, mu, i) + c[i - 1]);
      b.push_back(s_upper(k, mu, i) + c[i - 1]);
    }
    return rho_sij(a, b, x);
  };
  auto inner_sets = [k, x, n](const Elem& mu_elem, const Sided& t) {
    std::vector<Arrow> mu = arrows_of(mu_elem);
    IntSeq c = c_vector(t.elem, n - 1);
    if (t.side == Side::Domain)
      return indexed_union(shifted_index(k, mu, c), [](const Elem& l) {
        return gt(atom_values(l));
      });
    IntSeq shift = c;
    return indexed_union(choice_product(k, mu, shift), [x](const Elem& m) {
      IntSeq row = choice_values(m);
      row.push_back(x);
      return gt(row);
    });
  };
  auto per_mu = [ap, rho_for, inner_sets](const Elem& mu_elem) {
    return indexed_union_sij(
        identity_sij(ap),
        [inner_sets, mu_elem](const Sided& t) {
          return inner_sets(mu_elem, t);
        },
        oriented_fiber_family([rho_for, mu_elem](const Elem& t) {
          return rho_for(mu_elem, t);
        }),
        /*check_fibers=*/false);
  };
  auto outer_sets = [ap, inner_sets](const Sided& mu_sided) {
    return indexed_union(ap, [&](const Elem& t) {
      return inner_sets(mu_sided.elem, Sided{mu_sided.side, t});
    });
  };
  Sijection s3 = indexed_union_sij(identity_sij(ar), outer_sets,
                                   oriented_fiber_family(per_mu),
                                   /*check_fibers=*/false);

  // s4: unshift the choice atoms m' -> m' - c(T)
  SignedSet cod = phi1_codomain(k, x, mode);
  auto reshift = [n](const Elem& e, int direction) {
    const Elem& inner = e.children()[0];
    const Elem& mu = e.children()[1];
    const Elem& gm = inner.children()[0];
    const Elem& t = inner.children()[1];
    IntSeq c = c_vector(t, n - 1);
    const Elem& m = gm.children()[1];
    std::vector<Elem> coords;
    int i = 0;
    for (const Elem& ch : m.children()) {
      coords.push_back(Elem::tagged(
          ch.tag(),
          Elem::atom(ch.tagged_child().atom_value() + direction * c[i])));
      ++i;
    }
    return Elem::tuple(
        {Elem::tuple(
             {Elem::tuple({gm.children()[0], Elem::tuple(std::move(coords))}),
              t}),
         mu});
  };
  Sijection s4 = relabel_sij(
      s3.codomain(), cod,
      [reshift](const Elem& e) { return reshift(e, -1); },
      [reshift](const Elem& e) { return reshift(e, +1); });

  return compose_chain({s1, s2, s3, s4});
}

}  // namespace

Sijection phi1(const IntSeq& k, std::int64_t x, SignMode mode) {
  static Memo<std::tuple<IntSeq, std::int64_t, int>, Sijection> memo;
  return memo.get({k, x, static_cast<int>(mode)},
                  [&] { return phi1_build(k, x, mode); });
}

// --- phi3' ---------------------------------------------------------------------

namespace {

IntSeq mid_row(const IntSeq& k, const std::vector<Arrow>& mu, const IntSeq& c,
               const std::vector<int>& omega) {
  IntSeq row;
  for (std::size_t i = 1; i <= omega.size(); ++i)
    row.push_back(mid_row_bound(k, mu, c, static_cast<int>(i),
                                omega[i - 1]));
  return row;
}

// GT bottom row for the staircase word omega^(i) with x inserted at slot i.
IntSeq with_x_row(const IntSeq& k, const std::vector<Arrow>& mu,
                  const IntSeq& c, int i, std::int64_t x) {
  IntSeq row;
  int n = static_cast<int>(k.size());
  for (int j = 1; j <= i - 1; ++j)
    row.push_back(mid_row_bound(k, mu, c, j, 0));
  row.push_back(x);
  for (int j = i; j <= n - 1; ++j)
    row.push_back(mid_row_bound(k, mu, c, j, 1));
  return row;
}

SignedSet omega_word_set(int n) {  // Omega^{n-1}, Omega = ({0},{1})
  std::vector<SignedSet> parts(
      static_cast<std::size_t>(n - 1),
      SignedSet({Elem::atom(0)}, {Elem::atom(1)}));
  return cartesian_product(parts);
}

std::vector<int> omega_of(const Elem& w) {
  std::vector<int> out;
  for (const Elem& c : w.children())
    out.push_back(static_cast<int>(c.atom_value()));
  return out;
}

bool is_staircase(const std::vector<int>& w) {
  // 0...0 1...1
  bool seen_one = false;
  for (int v : w) {
    if (v == 1) seen_one = true;
    else if (seen_one) return false;
  }
  return true;
}

int staircase_slot(const std::vector<int>& w) {  // omega^(i): first 1 at i
  for (std::size_t j = 0; j < w.size(); ++j)
    if (w[j] == 1) return static_cast<int>(j) + 1;
  return static_cast<int>(w.size()) + 1;
}

Elem staircase_word(int n, int i) {
  std::vector<Elem> kids;
  for (int j = 1; j <= n - 1; ++j) kids.push_back(Elem::atom(j >= i ? 1 : 0));
  return Elem::tuple(std::move(kids));
}

// Per fixed omega in Omega2: the arrow swap involution on (mu, T).
std::pair<Elem, Elem> omega_involution(int n, int i, const Elem& mu_elem,
                                       const Elem& ap) {
  std::vector<Arrow> mu = arrows_of(mu_elem);
  std::vector<Arrow> t = arrows_of(ap);
  int m = n - 1;  // pattern size
  std::vector<Arrow> t2 = t;
  for (int p = 1; p <= i - 1; ++p)
    std::swap(t2[ap_slot(m, p, i)], t2[ap_slot(m, p, i + 1)]);
  for (int j = i + 2; j <= m; ++j)
    std::swap(t2[ap_slot(m, i, j)], t2[ap_slot(m, i + 1, j)]);
  std::vector<Arrow> mu2 = mu;
  t2[ap_slot(m, i, i + 1)] = reverse_arrow(mu[i]);       // mu_{i+1}, 0-based i
  mu2[i] = reverse_arrow(t[ap_slot(m, i, i + 1)]);
  return {arrows_tuple(mu2), arrows_tuple(t2)};
}

SignedSet phi3_codomain(const IntSeq& k, std::int64_t x, SignMode mode) {
  int n = static_cast<int>(k.size());
  std::vector<SignedSet> parts;
  for (int i = 1; i <= n; ++i) {
    parts.push_back(indexed_union(
        arrow_row_set(n, mode), [&](const Elem& mu_elem) {
          std::vector<Arrow> mu = arrows_of(mu_elem);
          return indexed_union(
              arrow_pattern_set(n - 1, mode), [&](const Elem& ap) {
                IntSeq c = c_vector(ap, n - 1);
                return gt(with_x_row(k, mu, c, i, x));
              });
        }));
  }
  return disjoint_union(std::span<const SignedSet>(parts));
}

Sijection phi3p_build(const IntSeq& k, std::int64_t x, SignMode mode) {
  int n = static_cast<int>(k.size());
  if (n < 2) throw InterfaceError("phi3p: need n >= 2");
  SignedSet ar = arrow_row_set(n, mode);
  SignedSet ap = arrow_pattern_set(n - 1, mode);
  SignedSet dom = phi1_codomain(k, x, mode);

  auto block_fiber = [k, x, n](const Elem& w, const Elem& mu_elem,
                               const Elem& t) {
    std::vector<Arrow> mu = arrows_of(mu_elem);
    IntSeq c = c_vector(t, n - 1);
    IntSeq row = mid_row(k, mu, c, omega_of(w));
    row.push_back(x);
    return gt(row);
  };
  auto block = [ar, ap, block_fiber](const Elem& w) {
    return indexed_union(ar, [&](const Elem& mu_elem) {
      return indexed_union(ap, [&](const Elem& t) {
        return block_fiber(w, mu_elem, t);
      });
    });
  };

  // t1: ((g, m), T, mu) <-> ((g, T), mu, omega(m))
  SignedSet omega_all = omega_word_set(n);
  SignedSet c1p = indexed_union(omega_all, block);
  Sijection t1 = relabel_sij(
      dom, c1p,
      [](const Elem& e) {
        const Elem& inner = e.children()[0];
        const Elem& mu = e.children()[1];
        const Elem& gm = inner.children()[0];
        const Elem& t = inner.children()[1];
        const Elem& g = gm.children()[0];
        const Elem& m = gm.children()[1];
        std::vector<Elem> wbits;
        for (const Elem& c : m.children())
          wbits.push_back(Elem::atom(c.tag()));
        return Elem::tuple(
            {Elem::tuple({Elem::tuple({g, t}), mu}),
             Elem::tuple(std::move(wbits))});
      },
      [k, n](const Elem& e) {
        const Elem& inner = e.children()[0];
        const Elem& w = e.children()[1];
        const Elem& gt_part = inner.children()[0];
        const Elem& mu_elem = inner.children()[1];
        const Elem& g = gt_part.children()[0];
        const Elem& t = gt_part.children()[1];
        std::vector<Arrow> mu = arrows_of(mu_elem);
        std::vector<Elem> coords;
        for (int i = 1; i <= n - 1; ++i) {
          int bit = static_cast<int>(w.children()[i - 1].atom_value());
          std::int64_t value =
              bit == 0 ? s_lower(k, mu, i) : s_upper(k, mu, i);
          coords.push_back(Elem::tagged(bit, Elem::atom(value)));
        }
        return Elem::tuple(
            {Elem::tuple({Elem::tuple({g, Elem::tuple(std::move(coords))}), t}),
             mu_elem});
      });

  // t2: split Omega^{n-1} into staircase words and the rest
  std::vector<Elem> o1_plus, o1_minus, o2_plus, o2_minus;
  for (const Elem& w : omega_all.plus())
    (is_staircase(omega_of(w)) ? o1_plus : o2_plus).push_back(w);
  for (const Elem& w : omega_all.minus())
    (is_staircase(omega_of(w)) ? o1_minus : o2_minus).push_back(w);
  SignedSet omega1(std::move(o1_plus), std::move(o1_minus));
  SignedSet omega2(std::move(o2_plus), std::move(o2_minus));
  SignedSet part1 = indexed_union(omega1, block);
  SignedSet part2 = indexed_union(omega2, block);
  SignedSet two_parts = disjoint_union({part1, part2});
  Sijection t2 = relabel_sij(
      c1p, two_parts,
      [](const Elem& e) {
        const Elem& w = e.children()[1];
        std::vector<int> bits;
        for (const Elem& c : w.children())
          bits.push_back(static_cast<int>(c.atom_value()));
        return Elem::tagged(is_staircase(bits) ? 0 : 1, e);
      },
      [](const Elem& e) { return e.tagged_child(); });

  // Omega1 machinery: route omega^(i) through the pi chain to put x at slot i
  auto pi_chain = [](IntSeq row, int target) {
    Sijection acc;
    IntSeq cur = row;
    bool flipped = false;
    for (int j = static_cast<int>(row.size()) - 1; j >= target; --j) {
      Sijection step = pi_sij(cur, j);
      if (flipped) step = opposite_sij(step);
      acc = acc.valid() ? compose(acc, step) : step;
      cur = swap_at(cur, j);
      flipped = !flipped;
    }
    if (!acc.valid()) acc = identity_sij(gt(row));
    return acc;
  };

  SignedSet cod3 = phi3_codomain(k, x, mode);
  std::vector<SignedSet> inner_parts;
  for (int i = 1; i <= n; ++i)
    inner_parts.push_back(indexed_union(ar, [&](const Elem& mu_elem) {
      std::vector<Arrow> mu = arrows_of(mu_elem);
      return indexed_union(ap, [&](const Elem& t) {
        IntSeq c = c_vector(t, n - 1);
        return gt(with_x_row(k, mu, c, i, x));
      });
    }));

  // u1: (blk, omega^(i)) <-> tag i-1 blk, with the omega sign folded into
  // an opposite wrapper on odd slots.
  std::vector<SignedSet> p_parts;
  for (int i = 1; i <= n; ++i) {
    SignedSet blk = block(staircase_word(n, i));
    p_parts.push_back((n - i) % 2 == 0 ? blk : opposite(blk));
  }
  SignedSet p_union = disjoint_union(std::span<const SignedSet>(p_parts));
  Sijection u1 = relabel_sij(
      part1, p_union,
      [n](const Elem& e) {
        const Elem& w = e.children()[1];
        int i = staircase_slot(omega_of(w));
        return Elem::tagged(i - 1, e.children()[0]);
      },
      [n](const Elem& e) {
        int i = static_cast<int>(e.tag()) + 1;
        return Elem::tuple({e.tagged_child(), staircase_word(n, i)});
      });

  // u2: per slot, the nested pi chains
  std::vector<Sijection> q_parts;
  for (int i = 1; i <= n; ++i) {
    auto chain_for = [k, x, n, i, pi_chain](const Elem& mu_elem,
                                            const Elem& t) {
      std::vector<Arrow> mu = arrows_of(mu_elem);
      IntSeq c = c_vector(t, n - 1);
      IntSeq row = mid_row(k, mu, c, omega_of(staircase_word(n, i)));
      row.push_back(x);
      return pi_chain(row, i);
    };
    auto inner_fiber_set = [k, x, n, i](const Elem& mu_elem, const Sided& t) {
      std::vector<Arrow> mu = arrows_of(mu_elem);
      IntSeq c = c_vector(t.elem, n - 1);
      if (t.side == Side::Domain) {
        IntSeq row = mid_row(k, mu, c, omega_of(staircase_word(n, i)));
        row.push_back(x);
        return gt(row);
      }
      SignedSet target = gt(with_x_row(k, mu, c, i, x));
      return (n - i) % 2 == 0 ? target : opposite(target);
    };
    auto per_mu = [ap, i, chain_for, inner_fiber_set](const Elem& mu_elem) {
      return indexed_union_sij(
          identity_sij(ap),
          [inner_fiber_set, mu_elem](const Sided& t) {
            return inner_fiber_set(mu_elem, t);
          },
          oriented_fiber_family([chain_for, mu_elem](const Elem& t) {
            return chain_for(mu_elem, t);
          }),
          /*check_fibers=*/false);
    };
    auto outer_set = [ap, inner_fiber_set](const Sided& mu_sided) {
      return indexed_union(ap, [&](const Elem& t) {
        return inner_fiber_set(mu_sided.elem, Sided{mu_sided.side, t});
      });
    };
    Sijection w_i = indexed_union_sij(identity_sij(ar), outer_set,
                                      oriented_fiber_family(per_mu),
                                      /*check_fibers=*/false);
    Sijection q_i = (n - i) % 2 == 0 ? w_i : opposite_sij(w_i);
    q_parts.push_back(
        compose(q_i, identity_sij(q_i.codomain(), inner_parts[i - 1])));
  }
  Sijection u2 = union_sij(std::move(q_parts));
  Sijection omega1_machinery = compose_chain(
      {u1, u2, identity_sij(u2.codomain(),
                            disjoint_union(std::span<const SignedSet>(inner_parts)))});

  // Omega2 cancellation
  auto cancel_rule = [k, x, n](const Sided& v) -> Sided {
    const Elem& blk = v.elem.children()[0];
    const Elem& w = v.elem.children()[1];
    std::vector<int> bits = omega_of(w);
    int i = 0;
    for (int j = 1; j <= n - 2; ++j)
      if (bits[j - 1] == 1 && bits[j] == 0) {
        i = j;
        break;
      }
    const Elem& inner = blk.children()[0];
    const Elem& mu_elem = blk.children()[1];
    const Elem& g = inner.children()[0];
    const Elem& t = inner.children()[1];
    auto [mu2, t2] = omega_involution(n, i, mu_elem, t);
    Elem this_pair = Elem::tuple({mu_elem, t});
    Elem other_pair = Elem::tuple({mu2, t2});
    bool is_rep = this_pair < other_pair;
    const Elem& rep_mu = is_rep ? mu_elem : mu2;
    const Elem& rep_t = is_rep ? t : t2;
    IntSeq c = c_vector(rep_t, n - 1);
    IntSeq row = mid_row(k, arrows_of(rep_mu), c, bits);
    row.push_back(x);
    Sijection phi = pi_sij(row, i);
    Sided r = phi.eval(is_rep ? Side::Domain : Side::Codomain, g);
    bool lands_rep = r.side == Side::Domain;
    const Elem& out_mu = lands_rep ? rep_mu : (is_rep ? mu2 : mu_elem);
    const Elem& out_t = lands_rep ? rep_t : (is_rep ? t2 : t);
    return Sided{Side::Domain,
                 Elem::tuple({Elem::tuple({Elem::tuple({r.elem, out_t}), out_mu}),
                              w})};
  };
  Sijection omega2_cancel = rule_sij(part2, SignedSet(), cancel_rule);

  Sijection t3 = union_sij({omega1_machinery, omega2_cancel});
  Sijection t4 = relabel_sij(
      t3.codomain(), cod3,
      [](const Elem& e) { return e.tagged_child(); },
      [](const Elem& e) { return Elem::tagged(0, e); });

  return compose_chain({t1, t2, t3, t4});
}

}  // namespace

Sijection phi3p(const IntSeq& k, std::int64_t x, SignMode mode) {
  static Memo<std::tuple<IntSeq, std::int64_t, int>, Sijection> memo;
  return memo.get({k, x, static_cast<int>(mode)},
                  [&] { return phi3p_build(k, x, mode); });
}

// --- psi rearrangement and phi4 --------------------------------------------------

std::pair<Elem, Elem> psi_rearrange(int n, int i, const Elem& mu_elem,
                                    const Elem& ap) {
  std::vector<Arrow> mu = arrows_of(mu_elem);
  std::vector<Arrow> t = arrows_of(ap);  // AP_{n-1}
  std::vector<Arrow> t2(static_cast<std::size_t>(n) * (n - 1) / 2, Arrow::SE);
  for (int p = 1; p <= n; ++p)
    for (int q = p + 1; q <= n; ++q) {
      Arrow value;
      if (q < i)
        value = t[ap_slot(n - 1, p, q)];
      else if (p < i && i < q)
        value = t[ap_slot(n - 1, p, q - 1)];
      else if (i < p)
        value = t[ap_slot(n - 1, p - 1, q - 1)];
      else if (q == i)
        value = reverse_arrow(mu[p - 1]);
      else  // p == i, q > i
        value = reverse_arrow(mu[q - 1]);
      t2[ap_slot(n, p, q)] = value;
    }
  return {Elem::tuple({Elem::arrow(mu[i - 1])}), arrows_tuple(t2)};
}

std::pair<Elem, Elem> psi_rearrange_inverse(int n, int i, const Elem& mu1,
                                            const Elem& ap_n) {
  std::vector<Arrow> t2 = arrows_of(ap_n);
  std::vector<Arrow> mu(static_cast<std::size_t>(n), Arrow::NW);
  mu[i - 1] = mu1.children()[0].arrow_value();
  for (int p = 1; p < i; ++p) mu[p - 1] = reverse_arrow(t2[ap_slot(n, p, i)]);
  for (int q = i + 1; q <= n; ++q)
    mu[q - 1] = reverse_arrow(t2[ap_slot(n, i, q)]);
  std::vector<Arrow> t(static_cast<std::size_t>(n - 1) * (n - 2) / 2,
                       Arrow::SE);
  for (int p = 1; p <= n - 1; ++p)
    for (int q = p + 1; q <= n - 1; ++q) {
      Arrow value;
      if (q < i)
        value = t2[ap_slot(n, p, q)];
      else if (p < i && q >= i)
        value = t2[ap_slot(n, p, q + 1)];
      else  // p >= i
        value = t2[ap_slot(n, p + 1, q + 1)];
      t[ap_slot(n - 1, p, q)] = value;
    }
  return {arrows_tuple(mu), arrows_tuple(t)};
}

namespace {

IntSeq with_c_row(const IntSeq& k, const Elem& ap_n, int i, std::int64_t x) {
  IntSeq row = ap_apply(ap_n, k);
  row[i - 1] = x;
  return row;
}

// tag(i-1) of ((g, T), mu) <-> tag(i-1) of (g, (mu1, T'')): the arrow
// rearrangement at slot i.
Sijection phi4_rearrange(const IntSeq& k, std::int64_t x, SignMode mode) {
  int n = static_cast<int>(k.size());
  SignedSet dom = phi3_codomain(k, x, mode);
  SignedSet ar1 = arrow_row_set(1, mode);
  SignedSet apn = arrow_pattern_set(n, mode);
  SignedSet pairs = cartesian_product({ar1, apn});
  std::vector<SignedSet> parts;
  for (int i = 1; i <= n; ++i)
    parts.push_back(indexed_union(pairs, [&](const Elem& p) {
      return gt(with_c_row(k, p.children()[1], i, x));
    }));
  SignedSet cod = disjoint_union(std::span<const SignedSet>(parts));
  Sijection out = relabel_sij(
      dom, cod,
      [n](const Elem& e) {
        int i = static_cast<int>(e.tag()) + 1;
        const Elem& inner = e.tagged_child();
        const Elem& gt_part = inner.children()[0];
        const Elem& mu = inner.children()[1];
        auto [mu1, t2] = psi_rearrange(n, i, mu, gt_part.children()[1]);
        return Elem::tagged(
            i - 1, Elem::tuple({gt_part.children()[0],
                                Elem::tuple({mu1, t2})}));
      },
      [n](const Elem& e) {
        int i = static_cast<int>(e.tag()) + 1;
        const Elem& inner = e.tagged_child();
        const Elem& g = inner.children()[0];
        const Elem& pair = inner.children()[1];
        auto [mu, t] = psi_rearrange_inverse(n, i, pair.children()[0],
                                             pair.children()[1]);
        return Elem::tagged(
            i - 1,
            Elem::tuple({Elem::tuple({g, t}), mu}));
      });
  return out;
}

// U_{T''} U_i GT(..x@i..) <=> U_{T''} GT(T''(k)) = SGT(k) via inverse tau.
Sijection phi4_tau_merge(const IntSeq& k, std::int64_t x, SignMode mode,
                         const SignedSet& dom) {
  int n = static_cast<int>(k.size());
  SignedSet apn = arrow_pattern_set(n, mode);
  auto fiber_set = [k, x, n](const Sided& t) {
    IntSeq base = ap_apply(t.elem, k);
    if (t.side == Side::Codomain) return gt(base);
    std::vector<SignedSet> subs;
    for (int i = 1; i <= n; ++i) {
      IntSeq row = base;
      row[i - 1] = x;
      subs.push_back(gt(row));
    }
    return disjoint_union(std::span<const SignedSet>(subs));
  };
  Sijection out = indexed_union_sij(
      identity_sij(apn), fiber_set,
      oriented_fiber_family([k, x](const Elem& t) {
        return inverse_sij(tau_sij(ap_apply(t, k), x));
      }),
      /*check_fibers=*/false);
  return compose(identity_sij(dom, out.domain()), out);
}

}  // namespace

Sijection phi4p(const IntSeq& k, std::int64_t x) {
  static Memo<std::pair<IntSeq, std::int64_t>, Sijection> memo;
  return memo.get({k, x}, [&]() -> Sijection {
    SignMode mode = SignMode::FkSigned;
    int n = static_cast<int>(k.size());
    if (n < 2) throw InterfaceError("phi4p: need n >= 2");
    Sijection f1 = phi4_rearrange(k, x, mode);

    // cancel the AR_1 coordinate with phi_AR1
    SignedSet ar1 = arrow_row_set(1, mode);
    SignedSet apn = arrow_pattern_set(n, mode);
    SignedSet dot({Elem::unit()}, {});
    Sijection phi_ar1 = finite_map_sij(
        ar1, dot,
        {{Sided{Side::Domain, Elem::tuple({Elem::arrow(Arrow::NW)})},
          Sided{Side::Codomain, Elem::unit()}},
         {Sided{Side::Domain, Elem::tuple({Elem::arrow(Arrow::NE)})},
          Sided{Side::Domain, Elem::tuple({Elem::arrow(Arrow::NWNE)})}}});

    std::vector<Sijection> per_slot;
    std::vector<SignedSet> stripped_parts;
    for (int i = 1; i <= n; ++i) {
      Sijection psi_i = product_sij({phi_ar1, identity_sij(apn)});
      auto fiber_set = [k, x, i](const Sided& t) {
        const Elem& ap_elem = t.elem.children()[1];
        return gt(with_c_row(k, ap_elem, i, x));
      };
      Sijection lift = indexed_union_sij(
          psi_i, fiber_set,
          [k, x, i, fiber_set](const Sided& t) {
            return identity_sij(fiber_set(t));
          },
          /*check_fibers=*/false);
      SignedSet stripped = indexed_union(apn, [&](const Elem& t) {
        return gt(with_c_row(k, t, i, x));
      });
      Sijection strip = relabel_sij(
          lift.codomain(), stripped,
          [](const Elem& e) {
            return Elem::tuple(
                {e.children()[0], e.children()[1].children()[1]});
          },
          [](const Elem& e) {
            return Elem::tuple(
                {e.children()[0],
                 Elem::tuple({Elem::unit(), e.children()[1]})});
          });
      per_slot.push_back(compose(lift, strip));
      stripped_parts.push_back(stripped);
    }
    Sijection f2 = union_sij(std::move(per_slot));

    // reorder U_i U_{T''} -> U_{T''} U_i
    SignedSet reordered = indexed_union(apn, [&](const Elem& t) {
      std::vector<SignedSet> subs;
      for (int i = 1; i <= n; ++i) subs.push_back(gt(with_c_row(k, t, i, x)));
      return disjoint_union(std::span<const SignedSet>(subs));
    });
    Sijection f3 = relabel_sij(
        f2.codomain(), reordered,
        [](const Elem& e) {
          const Elem& inner = e.tagged_child();
          return Elem::tuple(
              {Elem::tagged(e.tag(), inner.children()[0]), inner.children()[1]});
        },
        [](const Elem& e) {
          const Elem& tagged_g = e.children()[0];
          return Elem::tagged(
              tagged_g.tag(),
              Elem::tuple({tagged_g.tagged_child(), e.children()[1]}));
        });

    Sijection f4 = phi4_tau_merge(k, x, mode, reordered);
    Sijection to_sgt =
        identity_sij(f4.codomain(), sgt(k, mode));
    return compose_chain({f1, f2, f3, f4, to_sgt});
  });
}

Sijection phi4pp(const IntSeq& k, std::int64_t x) {
  static Memo<std::pair<IntSeq, std::int64_t>, Sijection> memo;
  return memo.get({k, x}, [&]() -> Sijection {
    SignMode mode = SignMode::AfUnsigned;
    int n = static_cast<int>(k.size());
    if (n < 2) throw InterfaceError("phi4pp: need n >= 2");
    Sijection g1 = phi4_rearrange(k, x, mode);

    SignedSet ar1 = arrow_row_set(1, mode);
    SignedSet apn = arrow_pattern_set(n, mode);
    // pull AR_1 out front
    SignedSet inner_union = indexed_union(apn, [&](const Elem& t) {
      std::vector<SignedSet> subs;
      for (int i = 1; i <= n; ++i) subs.push_back(gt(with_c_row(k, t, i, x)));
      return disjoint_union(std::span<const SignedSet>(subs));
    });
    // U_i U_{(mu1,T'')} GT <-> AR_1 x (U_{T''} U_i GT)
    SignedSet pulled = cartesian_product({ar1, inner_union});
    Sijection g2 = relabel_sij(
        g1.codomain(), pulled,
        [](const Elem& e) {
          const Elem& inner = e.tagged_child();
          const Elem& g = inner.children()[0];
          const Elem& pair = inner.children()[1];
          return Elem::tuple(
              {pair.children()[0],
               Elem::tuple({Elem::tagged(e.tag(), g), pair.children()[1]})});
        },
        [](const Elem& e) {
          const Elem& mu1 = e.children()[0];
          const Elem& rest = e.children()[1];
          const Elem& tagged_g = rest.children()[0];
          return Elem::tagged(
              tagged_g.tag(),
              Elem::tuple({tagged_g.tagged_child(),
                           Elem::tuple({mu1, rest.children()[1]})}));
        });

    Sijection merge = phi4_tau_merge(k, x, mode, inner_union);
    Sijection g3 = product_sij({identity_sij(ar1), merge});
    Sijection fix_cod = identity_sij(
        g3.codomain(), cartesian_product({ar1, sgt(k, mode)}));
    return compose_chain({g1, g2, g3, fix_cod});
  });
}

// --- Gamma ---------------------------------------------------------------------------

namespace {

Sijection gmt_recursion_step(
    const IntSeq& k, SignMode mode,
    const std::function<Sijection(const IntSeq&)>& fiber_for,
    const std::function<SignedSet(const IntSeq&)>& fiber_cod) {
  int n = static_cast<int>(k.size());
  SignedSet ar = arrow_row_set(n, mode);
  auto inner_set = [k, mode, fiber_cod](const Elem&, const Sided& l) {
    IntSeq lv = atom_values(l.elem);
    return l.side == Side::Domain ? gmt(lv, mode) : fiber_cod(lv);
  };
  auto per_mu = [k, fiber_for, inner_set](const Elem& mu_elem) {
    SignedSet index = mu_apply(arrows_of(mu_elem), k);
    return indexed_union_sij(
        identity_sij(index),
        [inner_set, mu_elem](const Sided& l) { return inner_set(mu_elem, l); },
        oriented_fiber_family([fiber_for](const Elem& l) {
          return fiber_for(atom_values(l));
        }),
        /*check_fibers=*/false);
  };
  auto outer_set = [k, inner_set](const Sided& mu_sided) {
    return indexed_union(
        mu_apply(arrows_of(mu_sided.elem), k), [&](const Elem& l) {
          return inner_set(mu_sided.elem, Sided{mu_sided.side, l});
        });
  };
  return indexed_union_sij(identity_sij(ar), outer_set,
                           oriented_fiber_family(per_mu),
                           /*check_fibers=*/false);
}

}  // namespace

Sijection gamma_sij(const IntSeq& k, std::int64_t x) {
  static Memo<std::pair<IntSeq, std::int64_t>, Sijection> memo;
  return memo.get({k, x}, [&]() -> Sijection {
    SignMode mode = SignMode::FkSigned;
    int n = static_cast<int>(k.size());
    if (n == 0) throw InterfaceError("gamma: empty bottom row");
    if (n == 1) {
      SignedSet dom = gmt(k, mode);
      SignedSet cod = sgt(k, mode);
      Elem target = Elem::tuple({Elem::atom(k[0]), Elem::unit()});
      return finite_map_sij(
          dom, cod,
          {{Sided{Side::Domain, Elem::tuple({Elem::arrow(Arrow::NW)})},
            Sided{Side::Codomain, target}},
           {Sided{Side::Domain, Elem::tuple({Elem::arrow(Arrow::NE)})},
            Sided{Side::Domain, Elem::tuple({Elem::arrow(Arrow::NWNE)})}}});
    }
    Sijection rec = gmt_recursion_step(
        k, mode, [x](const IntSeq& l) { return gamma_sij(l, x); },
        [mode](const IntSeq& l) { return sgt(l, mode); });
    Sijection glue = identity_sij(rec.codomain(), gmt_step_domain(k, mode));
    return compose_chain({rec, glue, phi1(k, x, mode), phi3p(k, x, mode),
                          phi4p(k, x)});
  });
}

std::int64_t stable_x(const IntSeq& k, LimitDir dir) {
  std::int64_t n = static_cast<std::int64_t>(k.size());
  if (dir == LimitDir::PlusInfinity)
    return *std::max_element(k.begin(), k.end()) + n;
  return *std::min_element(k.begin(), k.end()) - n;
}

Sijection gamma_limit(const IntSeq& k, LimitDir dir) {
  return gamma_sij(k, stable_x(k, dir));
}

Sijection gmt_ar_sgt_sij(const IntSeq& k, std::int64_t x) {
  static Memo<std::pair<IntSeq, std::int64_t>, Sijection> memo;
  return memo.get({k, x}, [&]() -> Sijection {
    SignMode mode = SignMode::AfUnsigned;
    int n = static_cast<int>(k.size());
    if (n == 0) throw InterfaceError("gmt_ar_sgt: empty bottom row");
    SignedSet ar1 = arrow_row_set(1, mode);
    if (n == 1) {
      SignedSet dom = gmt(k, mode);
      SignedSet cod = cartesian_product({ar1, sgt(k, mode)});
      Elem sgt_elem = Elem::tuple({Elem::atom(k[0]), Elem::unit()});
      return relabel_sij(
          dom, cod,
          [sgt_elem](const Elem& e) { return Elem::tuple({e, sgt_elem}); },
          [](const Elem& e) { return e.children()[0]; });
    }
    SignedSet ar_prev = arrow_row_set(n - 1, mode);
    Sijection rec = gmt_recursion_step(
        k, mode, [x](const IntSeq& l) { return gmt_ar_sgt_sij(l, x); },
        [mode, ar_prev](const IntSeq& l) {
          return cartesian_product({ar_prev, sgt(l, mode)});
        });

    // pull the AR_{n-1} coordinate out front
    SignedSet pulled = cartesian_product({ar_prev, gmt_step_domain(k, mode)});
    Sijection pull = relabel_sij(
        rec.codomain(), pulled,
        [](const Elem& e) {
          const Elem& inner = e.children()[0];
          const Elem& mu = e.children()[1];
          const Elem& pair = inner.children()[0];
          const Elem& l = inner.children()[1];
          return Elem::tuple(
              {pair.children()[0],
               Elem::tuple({Elem::tuple({pair.children()[1], l}), mu})});
        },
        [](const Elem& e) {
          const Elem& arp = e.children()[0];
          const Elem& rest = e.children()[1];
          const Elem& inner = rest.children()[0];
          const Elem& mu = rest.children()[1];
          return Elem::tuple(
              {Elem::tuple({Elem::tuple({arp, inner.children()[0]}),
                            inner.children()[1]}),
               mu});
        });

    Sijection mid = compose_chain(
        {phi1(k, x, mode), phi3p(k, x, mode), phi4pp(k, x)});
    Sijection big = product_sij({identity_sij(ar_prev), mid});

    // concat AR_{n-1} x AR_1 into AR_n, new arrow last
    SignedSet cod =
        cartesian_product({arrow_row_set(n, mode), sgt(k, mode)});
    Sijection concat = relabel_sij(
        big.codomain(), cod,
        [](const Elem& e) {
          const Elem& arp = e.children()[0];
          const Elem& pair = e.children()[1];
          std::vector<Elem> arrows = arp.children();
          arrows.push_back(pair.children()[0].children()[0]);
          return Elem::tuple(
              {Elem::tuple(std::move(arrows)), pair.children()[1]});
        },
        [](const Elem& e) {
          std::vector<Elem> arrows = e.children()[0].children();
          Elem last = arrows.back();
          arrows.pop_back();
          return Elem::tuple(
              {Elem::tuple(std::move(arrows)),
               Elem::tuple({Elem::tuple({last}), e.children()[1]})});
        });
    return compose_chain({rec, pull, big, concat});
  });
}

// --- weighted enumeration ----------------------------------------------------------------

namespace {

void count_row_arrows(const std::vector<Arrow>& mu, WeightedStats& ws) {
  for (Arrow a : mu) {
    if (a == Arrow::NE) ++ws.u;
    if (a == Arrow::NW) ++ws.v;
    if (a == Arrow::NWNE) ++ws.w;
  }
}

std::int64_t seq_sum(const IntSeq& v) {
  std::int64_t s = 0;
  for (std::int64_t x : v) s += x;
  return s;
}

}  // namespace

WeightedStats weighted_stats_gmt(const Elem& e, const IntSeq& k) {
  if (k.size() == 1) {
    WeightedStats ws;
    Arrow a = e.children()[0].arrow_value();
    count_row_arrows({a}, ws);
    ws.x.push_back(k[0] + (a == Arrow::NE ? 1 : 0) - (a == Arrow::NW ? 1 : 0));
    return ws;
  }
  const Elem& inner = e.children()[0];
  std::vector<Arrow> mu = arrows_of(e.children()[1]);
  IntSeq l = atom_values(inner.children()[1]);
  WeightedStats ws = weighted_stats_gmt(inner.children()[0], l);
  count_row_arrows(mu, ws);
  std::int64_t pure_ne = 0, pure_nw = 0;
  for (Arrow a : mu) {
    pure_ne += a == Arrow::NE ? 1 : 0;
    pure_nw += a == Arrow::NW ? 1 : 0;
  }
  ws.x.push_back(seq_sum(k) - seq_sum(l) + pure_ne - pure_nw);
  return ws;
}

WeightedStats weighted_stats_ar_sgt(const Elem& e, const IntSeq& k) {
  WeightedStats ws;
  std::vector<Arrow> mu = arrows_of(e.children()[0]);
  const Elem& sgt_elem = e.children()[1];
  const Elem& a_part = sgt_elem.children()[0];
  const Elem& t_part = sgt_elem.children()[1];
  count_row_arrows(mu, ws);
  for (Arrow a : arrows_of(t_part)) {
    if (a == Arrow::SW) ++ws.u;
    if (a == Arrow::SE) ++ws.v;
    if (a == Arrow::SESW) ++ws.w;
  }
  IntSeq bottom = ap_apply(t_part, k);
  auto rows = gt_rows(a_part, bottom);
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::int64_t cur = seq_sum(rows[i]);
    std::int64_t arrow_term = (mu[i] == Arrow::NE ? 1 : 0) -
                              (mu[i] == Arrow::NW ? 1 : 0);
    ws.x.push_back(cur - prev + arrow_term);
    prev = cur;
  }
  return ws;
}

void LaurentPoly::add(const Expo& exponents, std::int64_t coeff) {
  if (coeff == 0) return;
  auto it = terms_.find(exponents);
  if (it == terms_.end()) {
    terms_.emplace(exponents, coeff);
    return;
  }
  it->second += coeff;
  if (it->second == 0) terms_.erase(it);
}

std::int64_t LaurentPoly::eval_at_ones() const {
  std::int64_t s = 0;
  for (const auto& [e, c] : terms_) s += c;
  return s;
}

std::string LaurentPoly::to_string(int n_vars_x) const {
  std::string out;
  for (const auto& [e, c] : terms_) {
    out += std::to_string(c);
    const char* uvw[] = {"u", "v", "w"};
    for (int i = 0; i < 3; ++i) {
      if (e[i] == 0) continue;
      out += ' ';
      out += uvw[i];
      if (e[i] != 1) out += "^" + std::to_string(e[i]);
    }
    for (int i = 0; i < n_vars_x; ++i) {
      if (e[3 + i] == 0) continue;
      out += " X" + std::to_string(i + 1) + "^" + std::to_string(e[3 + i]);
    }
    out += '\n';
  }
  return out;
}

LaurentPoly weighted_monomials(const WeightedStats& ws) {
  LaurentPoly p;
  std::vector<int> expo = {static_cast<int>(ws.u), static_cast<int>(ws.v),
                           static_cast<int>(ws.w)};
  for (std::int64_t xi : ws.x) expo.push_back(static_cast<int>(xi));
  p.add(expo, 1);
  return p;
}

LaurentPoly weighted_sum_gmt(const IntSeq& k) {
  LaurentPoly total;
  const SignedSet s = gmt(k, SignMode::AfUnsigned);
  for (const Elem& e : s.plus())
    total.add(weighted_monomials(weighted_stats_gmt(e, k)).terms().begin()->first,
              1);
  for (const Elem& e : s.minus())
    total.add(weighted_monomials(weighted_stats_gmt(e, k)).terms().begin()->first,
              -1);
  return total;
}

LaurentPoly weighted_sum_ar_sgt(const IntSeq& k) {
  LaurentPoly total;
  SignedSet product = cartesian_product(
      {arrow_row_set(static_cast<int>(k.size()), SignMode::AfUnsigned),
       sgt(k, SignMode::AfUnsigned)});
  for (const Elem& e : product.plus())
    total.add(
        weighted_monomials(weighted_stats_ar_sgt(e, k)).terms().begin()->first,
        1);
  for (const Elem& e : product.minus())
    total.add(
        weighted_monomials(weighted_stats_ar_sgt(e, k)).terms().begin()->first,
        -1);
  return total;
}

}  // namespace sij
