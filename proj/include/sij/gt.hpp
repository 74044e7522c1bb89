#pragma once

#include <span>
#include <vector>

#include "sij/statistics.hpp"

namespace sij {

using IntSeq = std::vector<std::int64_t>;

// --- Gelfand-Tsetlin signed sets -----------------------------------------

// GT(k), materialized through the recursion
//   GT(k) = (({k}, {}))                        for n = 1,
//   GT(k) = U_{l in [k1,k2) x ... x [k_{n-1},k_n)} GT(l)   for n >= 2.
// Elements are nested (child, index-row) pairs; memoized per bottom row.
SignedSet gt(const IntSeq& k);

// prod_{i<j} (k_j - k_i) / (j - i), always an exact integer.
std::int64_t gt_size_formula(const IntSeq& k);

// Sign of the permutation sorting k increasingly; 0 on duplicates.
int sgn_seq(const IntSeq& k);

// Rows of a GT element, top row first, including the bottom row k.
std::vector<IntSeq> gt_rows(const Elem& e, const IntSeq& k);

std::int64_t eta_top_value(const Elem& gt_elem);
// Row profile, one sorted multiset per row, bottom row from context.
StatValue eta_row_value(const Elem& gt_elem, const IntSeq& k);

// Statistics on GT(k) <=> (sign) GT(k') endpoint pairs.
Statistic eta_top_stat();
Statistic eta_row_stat(const IntSeq& k_dom, const IntSeq& k_cod);
Statistic eta_row_i_stat(const IntSeq& k_dom, const IntSeq& k_cod, int i);

// --- Constructions --------------------------------------------------------

// beta_{a,b,x} : [a1,b1) x ... x [an,bn)
//   <=> U_{m in S1 x ... x Sn} [m1,m2) x ... x [m_{n-1},m_n) x [mn,x)
// with S_i = ({a_i},{b_i}). Index atoms carry a side tag (0 for a_i, 1 for
// b_i) so they stay distinct when a_i == b_i. Normal-statistic compatible.
Sijection beta_sij(const IntSeq& a, const IntSeq& b, std::int64_t x);

// rho_{a,b,x} : U_{l in prod [a_i,b_i)} GT(l) <=> U_{m in prod S_i} GT(m,x).
Sijection rho_sij(const IntSeq& a, const IntSeq& b, std::int64_t x);

// pi_{k,i} : GT(k) <=> -GT(k with k_i, k_{i+1} swapped), 1 <= i <= n-1.
// Compatible with eta_row; memoized (mutual induction with sigma).
Sijection pi_sij(const IntSeq& k, int i);

// sigma_{a,b,i} : U_{l in prod [a_j,b_j)} GT(l) <=> ((),()) when positions
// i, i+1 carry interchangeable intervals: (a_i,b_i) equals (a_{i+1},b_{i+1})
// as an ordered or reversed pair, or both intervals are empty.
Sijection sigma_sij(const IntSeq& a, const IntSeq& b, int i);

// gamma_row_{k,x} : [k1,k2) x ... x [k_{n-1},k_n) <=>
//   U_{i=1..n}   (k_i replaced by x in the bounds)
//   U_{i=1..n-2} (... x [k_{i+1},x) x [k_{i+1},x) x ...),
// flattened into one (2n-2)-part union, A-parts first. Normal-compatible.
Sijection gamma_row_sij(const IntSeq& k, std::int64_t x);

// The gamma_row codomain bound vectors: first n entries are the A-parts
// (bounds of GT(k1..x..kn) index products), then n-2 B-parts.
std::vector<std::pair<IntSeq, IntSeq>> gamma_row_parts(const IntSeq& k,
                                                       std::int64_t x);

// tau_{k,x} : GT(k) <=> U_{i=1..n} GT(k1,...,k_{i-1},x,k_{i+1},...,kn).
// Compatible with eta_row_1..n-1.
Sijection tau_sij(const IntSeq& k, std::int64_t x);

// --- Signed enumeration ----------------------------------------------------

using RowProfile = std::vector<IntSeq>;  // i-th multiset sorted ascending

bool profile_is_classical(const RowProfile& a);

// sgn(k) when A forms a classical pattern, else 0. Requires A_n == {{k}}.
std::int64_t restricted_count(const IntSeq& k, const RowProfile& a);

// --- Generalized GT patterns -----------------------------------------------

struct GgtParams {
  // level[i-1][j-1] = (p_{i,j}, q_{i,j}), 1 <= j <= i <= n-1, values in 1..i+1.
  std::vector<std::vector<std::pair<int, int>>> levels;

  int rows() const { return static_cast<int>(levels.size()); }
  static GgtParams classical(int n);
  void validate() const;  // range checks; throws InterfaceError
};

SignedSet ggt(const IntSeq& k, const GgtParams& params);

// 0 when some G_i is not a tree; otherwise the flip-count/permutation sign
// product with r_i(0) = 1 fixed.
int ggt_param_sign(const GgtParams& params);

std::int64_t ggt_size_formula(const IntSeq& k, const GgtParams& params);

// --- Integrable-system spot check ------------------------------------------

struct IntegrabilityReport {
  bool holds = true;
  std::size_t paths_checked = 0;
  std::string detail;

  explicit operator bool() const { return holds; }
};

// For strictly increasing k (n <= 3): every composition of pi-moves of length
// <= bound from GT(k) back to GT(k) acts as the identity on GT(k)+.
IntegrabilityReport check_partial_integrability(const IntSeq& k, int bound);

}  // namespace sij
