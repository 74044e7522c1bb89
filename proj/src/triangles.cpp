#include "sij/triangles.hpp"

#include <algorithm>
#include <map>
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

}  // namespace

// --- Alternating sign matrices ----------------------------------------------

bool is_asm(const Matrix& m) {
  int n = static_cast<int>(m.size());
  if (n == 0) return false;
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != n) return false;
  for (int i = 0; i < n; ++i) {
    int run = 0;
    for (int j = 0; j < n; ++j) {
      if (m[i][j] < -1 || m[i][j] > 1) return false;
      run += m[i][j];
      if (run < 0 || run > 1) return false;
    }
    if (run != 1) return false;
  }
  for (int j = 0; j < n; ++j) {
    int run = 0;
    for (int i = 0; i < n; ++i) {
      run += m[i][j];
      if (run < 0 || run > 1) return false;
    }
    if (run != 1) return false;
  }
  return true;
}

std::vector<Matrix> asm_enumerate(int n) {
  if (n < 1 || n > 5) throw BudgetError("asm_enumerate: n must be in 1..5");
  std::vector<Matrix> out;
  Matrix acc(n, std::vector<int>(n, 0));
  std::vector<int> colsum(n, 0);

  // Fill row by row; keep row and column partial sums in {0,1}.
  std::function<void(int)> fill_row = [&](int i) {
    if (i == n) {
      for (int j = 0; j < n; ++j)
        if (colsum[j] != 1) return;
      out.push_back(acc);
      return;
    }
    std::function<void(int, int)> fill = [&](int j, int rowsum) {
      if (j == n) {
        if (rowsum == 1) fill_row(i + 1);
        return;
      }
      for (int v = -1; v <= 1; ++v) {
        int rs = rowsum + v, cs = colsum[j] + v;
        if (rs < 0 || rs > 1 || cs < 0 || cs > 1) continue;
        acc[i][j] = v;
        colsum[j] = cs;
        fill(j + 1, rs);
        colsum[j] -= v;
        acc[i][j] = 0;
      }
    };
    fill(0, 0);
  };
  fill_row(0);
  return out;
}

Triangle asm_to_mt(const Matrix& m) {
  if (!is_asm(m)) throw InterfaceError("asm_to_mt: not an alternating sign matrix");
  int n = static_cast<int>(m.size());
  Triangle t;
  std::vector<int> colsum(n, 0);
  for (int i = 0; i < n; ++i) {
    IntSeq row;
    for (int j = 0; j < n; ++j) {
      colsum[j] += m[i][j];
      if (colsum[j] == 1) row.push_back(j + 1);
    }
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] += static_cast<std::int64_t>(j);
    t.push_back(std::move(row));
  }
  return t;
}

Matrix mt_to_asm(const Triangle& t) {
  int n = static_cast<int>(t.size());
  Matrix m(n, std::vector<int>(n, 0));
  std::vector<int> prev(n, 0);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(t[i].size()) != i + 1)
      throw InterfaceError("mt_to_asm: malformed triangle");
    std::vector<int> cur(n, 0);
    for (int j = 0; j <= i; ++j) {
      std::int64_t col = t[i][j] - j;
      if (col < 1 || col > n) throw InterfaceError("mt_to_asm: entry out of range");
      cur[col - 1] = 1;
    }
    for (int j = 0; j < n; ++j) m[i][j] = cur[j] - prev[j];
    prev = cur;
  }
  if (!is_asm(m)) throw InterfaceError("mt_to_asm: input is not a monotone triangle");
  return m;
}

std::int64_t eta_inv_asm(const Matrix& m) {
  int n = static_cast<int>(m.size());
  std::int64_t total = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int i2 = i + 1; i2 < n; ++i2)
        for (int j2 = 0; j2 <= j; ++j2) total += m[i][j] * m[i2][j2];
  return total;
}

std::int64_t eta_inv_mt(const Triangle& t) {
  int n = static_cast<int>(t.size());
  std::int64_t count = 0;
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (t[i + 1][j] <= t[i][j] && t[i][j] == t[i + 1][j + 1] - 1) ++count;
  return count;
}

// --- Monotone triangles -----------------------------------------------------------

std::vector<Triangle> mt_enumerate(const IntSeq& k) {
  if (k.empty()) throw InterfaceError("mt_enumerate: empty bottom row");
  if (k.size() == 1) return {Triangle{{k[0]}}};
  std::vector<Triangle> out;
  // Enumerate the second-bottom row: interlacing plus gaps >= 2 within it.
  std::size_t m = k.size() - 1;
  IntSeq row(m);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == m) {
      for (const Triangle& top : mt_enumerate(row)) {
        Triangle t = top;
        t.push_back(k);
        out.push_back(std::move(t));
      }
      return;
    }
    for (std::int64_t v = k[j]; v < k[j + 1]; ++v) {
      if (j > 0 && !(row[j - 1] < v - 1)) continue;
      row[j] = v;
      rec(j + 1);
    }
  };
  rec(0);
  return out;
}

Elem triangle_to_elem(const Triangle& t) {
  std::vector<Elem> rows;
  rows.reserve(t.size());
  for (const IntSeq& r : t) rows.push_back(atoms_tuple(r));
  return Elem::tuple(std::move(rows));
}

Triangle elem_to_triangle(const Elem& e) {
  Triangle t;
  for (const Elem& r : e.children()) t.push_back(atom_values(r));
  return t;
}

SignedSet mt_set(const IntSeq& k) {
  static Memo<IntSeq, SignedSet> memo;
  return memo.get(k, [&] {
    std::vector<Elem> plus;
    for (const Triangle& t : mt_enumerate(k)) plus.push_back(triangle_to_elem(t));
    return SignedSet(std::move(plus), {});
  });
}

// --- Arrow rows and patterns ---------------------------------------------------------

namespace {

SignedSet row_arrow_choice(SignMode mode) {
  if (mode == SignMode::FkSigned)
    return SignedSet({Elem::arrow(Arrow::NW), Elem::arrow(Arrow::NE)},
                     {Elem::arrow(Arrow::NWNE)});
  return SignedSet({Elem::arrow(Arrow::NW), Elem::arrow(Arrow::NE),
                    Elem::arrow(Arrow::NWNE)},
                   {});
}

SignedSet pattern_arrow_choice(SignMode mode) {
  if (mode == SignMode::FkSigned)
    return SignedSet({Elem::arrow(Arrow::SE), Elem::arrow(Arrow::SW)},
                     {Elem::arrow(Arrow::SESW)});
  return SignedSet({Elem::arrow(Arrow::SE), Elem::arrow(Arrow::SW),
                    Elem::arrow(Arrow::SESW)},
                   {});
}

}  // namespace

SignedSet arrow_row_set(int n, SignMode mode) {
  static Memo<std::pair<int, int>, SignedSet> memo;
  return memo.get({n, static_cast<int>(mode)}, [&] {
    std::vector<SignedSet> parts(static_cast<std::size_t>(n),
                                 row_arrow_choice(mode));
    return cartesian_product(parts);
  });
}

SignedSet arrow_pattern_set(int n, SignMode mode) {
  static Memo<std::pair<int, int>, SignedSet> memo;
  return memo.get({n, static_cast<int>(mode)}, [&] {
    std::vector<SignedSet> parts(static_cast<std::size_t>(n) * (n - 1) / 2,
                                 pattern_arrow_choice(mode));
    return cartesian_product(parts);
  });
}

std::vector<Arrow> arrows_of(const Elem& e) {
  std::vector<Arrow> out;
  if (e.is_unit()) return out;
  for (const Elem& c : e.children()) out.push_back(c.arrow_value());
  return out;
}

SignedSet mu_apply(const std::vector<Arrow>& mu, const IntSeq& k) {
  if (mu.size() != k.size()) throw InterfaceError("mu_apply: length mismatch");
  std::vector<SignedSet> parts;
  for (std::size_t i = 0; i + 1 < k.size(); ++i)
    parts.push_back(
        make_interval(k[i] + delta_ne(mu[i]), k[i + 1] - delta_nw(mu[i + 1])));
  return cartesian_product(parts);
}

std::size_t ap_slot(int n, int i, int j) {
  // (i,j)-lexicographic, 1 <= i < j <= n
  return static_cast<std::size_t>((i - 1) * (2 * n - i) / 2 + (j - i - 1));
}

IntSeq c_vector(const Elem& ap, int n) {
  std::vector<Arrow> arrows = arrows_of(ap);
  IntSeq c(static_cast<std::size_t>(n), 0);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) c[i - 1] += delta_sw(arrows[ap_slot(n, i, j)]);
    for (int p = 1; p < i; ++p) c[i - 1] -= delta_se(arrows[ap_slot(n, p, i)]);
  }
  return c;
}

IntSeq ap_apply(const Elem& ap, const IntSeq& k) {
  IntSeq c = c_vector(ap, static_cast<int>(k.size()));
  IntSeq out = k;
  for (std::size_t i = 0; i < k.size(); ++i) out[i] += c[i];
  return out;
}

// --- GMT and SGT ----------------------------------------------------------------------

SignedSet gmt(const IntSeq& k, SignMode mode) {
  static Memo<std::pair<IntSeq, int>, SignedSet> memo;
  return memo.get({k, static_cast<int>(mode)}, [&]() -> SignedSet {
    int n = static_cast<int>(k.size());
    if (n == 0) throw InterfaceError("gmt: empty bottom row");
    if (n == 1) return arrow_row_set(1, mode);
    return indexed_union(arrow_row_set(n, mode), [&](const Elem& mu_elem) {
      std::vector<Arrow> mu = arrows_of(mu_elem);
      return indexed_union(mu_apply(mu, k), [&](const Elem& l) {
        return gmt(atom_values(l), mode);
      });
    });
  });
}

SignedSet sgt(const IntSeq& k, SignMode mode) {
  static Memo<std::pair<IntSeq, int>, SignedSet> memo;
  return memo.get({k, static_cast<int>(mode)}, [&]() -> SignedSet {
    int n = static_cast<int>(k.size());
    if (n == 0) throw InterfaceError("sgt: empty bottom row");
    return indexed_union(arrow_pattern_set(n, mode), [&](const Elem& ap) {
      return gt(ap_apply(ap, k));
    });
  });
}

Triangle eta_mt_rows(const Elem& gmt_elem, const IntSeq& k) {
  if (k.size() == 1) return {{k[0]}};
  const Elem& inner = gmt_elem.children()[0];
  const Elem& child = inner.children()[0];
  IntSeq l = atom_values(inner.children()[1]);
  Triangle rows = eta_mt_rows(child, l);
  rows.push_back(k);
  return rows;
}

std::int64_t eta_top_gmt(const Elem& gmt_elem, const IntSeq& k) {
  return eta_mt_rows(gmt_elem, k)[0][0];
}

std::int64_t eta_top_sgt(const Elem& sgt_elem) {
  return eta_top_value(sgt_elem.children()[0]);
}

std::int64_t eta_inv_ar(const Elem& arrow_row) {
  std::int64_t count = 0;
  for (Arrow a : arrows_of(arrow_row)) count += delta_ne(a);
  return count;
}

std::int64_t eta_inv_gmt(const Elem& gmt_elem) {
  if (!gmt_elem.is_tuple()) throw InterfaceError("eta_inv_gmt: bad element");
  // n = 1 elements are bare arrow rows
  if (gmt_elem.children().size() == 1 && gmt_elem.children()[0].is_arrow())
    return eta_inv_ar(gmt_elem);
  const Elem& inner = gmt_elem.children()[0];
  const Elem& mu = gmt_elem.children()[1];
  return eta_inv_gmt(inner.children()[0]) + eta_inv_ar(mu);
}

std::int64_t eta_inv_sgt(const Elem& sgt_elem) {
  std::int64_t count = 0;
  for (Arrow a : arrows_of(sgt_elem.children()[1])) count += delta_sw(a);
  return count;
}

// --- iota ------------------------------------------------------------------------------

namespace {

std::vector<Arrow> mu_for_row(const IntSeq& k, const IntSeq& l) {
  std::vector<Arrow> mu(k.size(), Arrow::NW);
  for (std::size_t i = 1; i < k.size(); ++i)
    if (k[i] == l[i - 1] + 1) mu[i] = Arrow::NE;
  return mu;
}

Elem arrows_tuple(const std::vector<Arrow>& mu) {
  std::vector<Elem> kids;
  kids.reserve(mu.size());
  for (Arrow a : mu) kids.push_back(Elem::arrow(a));
  return Elem::tuple(std::move(kids));
}

// MT(k) <=> U_mu U_{l in mu(k)} MT(l): peel the bottom row; the arrow-row
// coordinate cancels down to mu_l by toggling NE <-> NWNE at the first
// departure.
Sijection xi_step(const IntSeq& k) {
  SignedSet dom = mt_set(k);
  SignedSet cod =
      indexed_union(arrow_row_set(static_cast<int>(k.size()), SignMode::FkSigned),
                    [&](const Elem& mu_elem) {
                      return indexed_union(
                          mu_apply(arrows_of(mu_elem), k),
                          [](const Elem& l) { return mt_set(atom_values(l)); });
                    });
  auto rule = [k](const Sided& v) -> Sided {
    if (v.side == Side::Domain) {
      Triangle t = elem_to_triangle(v.elem);
      IntSeq l = t[t.size() - 2];
      Triangle upper(t.begin(), t.end() - 1);
      Elem mu = arrows_tuple(mu_for_row(k, l));
      return Sided{Side::Codomain,
                   Elem::tuple({Elem::tuple({triangle_to_elem(upper),
                                             atoms_tuple(l)}),
                                mu})};
    }
    const Elem& inner = v.elem.children()[0];
    const Elem& mu_elem = v.elem.children()[1];
    IntSeq l = atom_values(inner.children()[1]);
    std::vector<Arrow> mu = arrows_of(mu_elem);
    std::vector<Arrow> canonical = mu_for_row(k, l);
    std::size_t i = 0;
    while (i < mu.size() && mu[i] == canonical[i]) ++i;
    if (i == mu.size()) {
      Triangle t = elem_to_triangle(inner.children()[0]);
      t.push_back(k);
      return Sided{Side::Domain, triangle_to_elem(t)};
    }
    mu[i] = mu[i] == Arrow::NE ? Arrow::NWNE : Arrow::NE;
    return Sided{Side::Codomain, Elem::tuple({inner, arrows_tuple(mu)})};
  };
  return rule_sij(std::move(dom), std::move(cod), rule);
}

}  // namespace

Sijection iota_mt(const IntSeq& k) {
  static Memo<IntSeq, Sijection> memo;
  return memo.get(k, [&]() -> Sijection {
    for (std::size_t i = 0; i + 1 < k.size(); ++i)
      if (k[i] >= k[i + 1])
        throw InterfaceError("iota: bottom row must be strictly increasing");
    int n = static_cast<int>(k.size());
    if (n == 1) {
      SignedSet dom = mt_set(k);
      SignedSet cod = gmt(k, SignMode::FkSigned);
      Elem triangle = triangle_to_elem({{k[0]}});
      return finite_map_sij(
          dom, cod,
          {{Sided{Side::Domain, triangle},
            Sided{Side::Codomain, Elem::tuple({Elem::arrow(Arrow::NW)})}},
           {Sided{Side::Codomain, Elem::tuple({Elem::arrow(Arrow::NE)})},
            Sided{Side::Codomain, Elem::tuple({Elem::arrow(Arrow::NWNE)})}}});
    }
    Sijection xi = xi_step(k);
    SignedSet rows = arrow_row_set(n, SignMode::FkSigned);
    auto outer_fiber_set = [k](const Sided& t) {
      std::vector<Arrow> mu = arrows_of(t.elem);
      bool to_gmt = t.side == Side::Codomain;
      return indexed_union(mu_apply(mu, k), [to_gmt](const Elem& l) {
        IntSeq lv = atom_values(l);
        return to_gmt ? gmt(lv, SignMode::FkSigned) : mt_set(lv);
      });
    };
    auto outer_fiber = [k](const Elem& mu_elem) {
      std::vector<Arrow> mu = arrows_of(mu_elem);
      SignedSet index = mu_apply(mu, k);
      return indexed_union_sij(
          identity_sij(index),
          [](const Sided& t) {
            IntSeq lv = atom_values(t.elem);
            return t.side == Side::Domain ? mt_set(lv)
                                          : gmt(lv, SignMode::FkSigned);
          },
          oriented_fiber_family(
              [](const Elem& l) { return iota_mt(atom_values(l)); }),
          /*check_fibers=*/false);
    };
    Sijection lift = indexed_union_sij(
        identity_sij(rows), outer_fiber_set,
        oriented_fiber_family(outer_fiber), /*check_fibers=*/false);
    return compose(xi, lift);
  });
}

// --- Transfer matrices -------------------------------------------------------------------

namespace {

struct Mat2 {
  std::int64_t a, b, c, d;  // [[a,b],[c,d]]
};

Mat2 transfer_matrix(std::int64_t kj, std::int64_t kj1, std::int64_t lj) {
  static constexpr Mat2 A1{0, 1, 0, 1}, A2{1, 0, 0, 0}, A3{1, 0, 1, 0},
      A4{0, 1, -1, 1}, A5{1, -1, 1, -1}, A6{0, 0, 1, 0}, O{0, 0, 0, 0};
  auto neg = [](Mat2 m) { return Mat2{-m.a, -m.b, -m.c, -m.d}; };
  if (kj1 >= kj + 2) {
    if (lj == kj) return A1;
    if (lj == kj1 - 1) return A2;
    if (kj < lj && lj < kj1 - 1) return A3;
    return O;
  }
  if (kj1 == kj + 1) {
    if (lj == kj) return A4;
    return O;
  }
  if (lj == kj) return neg(A5);
  if (lj == kj1 - 1) return neg(A6);
  if (kj1 - 1 < lj && lj < kj) return neg(A3);
  return O;
}

}  // namespace

std::int64_t m_multiplicity(const IntSeq& k, const IntSeq& l) {
  if (l.size() + 1 != k.size()) throw InterfaceError("m_multiplicity: lengths");
  // (1 0) T_{n-1} ... T_1 (1 1)^t
  std::int64_t v0 = 1, v1 = 1;
  for (std::size_t j = 0; j < l.size(); ++j) {
    Mat2 t = transfer_matrix(k[j], k[j + 1], l[j]);
    std::int64_t w0 = t.a * v0 + t.b * v1;
    std::int64_t w1 = t.c * v0 + t.d * v1;
    v0 = w0;
    v1 = w1;
  }
  return v0;
}

bool is_partially_successive(const IntSeq& m) {
  for (std::size_t i = 0; i + 2 < m.size(); ++i)
    if (m[i] == m[i + 1] - 1 && m[i + 1] == m[i + 2] - 1) return true;
  return false;
}

}  // namespace sij
