#pragma once

#include <map>

#include "sij/triangles.hpp"

namespace sij {

// m_i(mu,T,0) = k_i + ne(mu_i) + c_i(T),  m_i(mu,T,1) = k_{i+1} - nw(mu_{i+1}) + c_i(T)
std::int64_t mid_row_bound(const IntSeq& k, const std::vector<Arrow>& mu,
                           const IntSeq& c, int i, int omega);

// U_mu U_{l in mu(k)} SGT(l) <=> U_mu U_T U_{m in S1 x ... x S_{n-1}}
//   GT(m_1 + c_1(T), ..., m_{n-1} + c_{n-1}(T), x)
Sijection phi1(const IntSeq& k, std::int64_t x, SignMode mode);

// ... <=> U_{i=1..n} U_mu U_T GT(m_1(0),...,m_{i-1}(0), x, m_i(1),...,m_{n-1}(1));
// staircase words route through pi, the rest cancels by the arrow swap
// involution paired with the GT-level pi swap.
Sijection phi3p(const IntSeq& k, std::int64_t x, SignMode mode);

// Arrow rearrangement behind Phi4: AR_n x AP_{n-1} -> AR_1 x AP_n at target
// position i; bijective, moves mu_i to the lone row and reverses the rest
// into row/column i of the pattern.
std::pair<Elem, Elem> psi_rearrange(int n, int i, const Elem& mu,
                                    const Elem& ap);
std::pair<Elem, Elem> psi_rearrange_inverse(int n, int i, const Elem& mu1,
                                            const Elem& ap);

Sijection phi4p(const IntSeq& k, std::int64_t x);   // signed mode only
Sijection phi4pp(const IntSeq& k, std::int64_t x);  // unsigned mode only

// GMT(k) <=> SGT(k) in signed mode; compatible with (eta_top, eta_inv).
Sijection gamma_sij(const IntSeq& k, std::int64_t x);

enum class LimitDir { PlusInfinity, MinusInfinity };

// max(k) + n, resp. min(k) - n: beyond these the construction stabilizes.
std::int64_t stable_x(const IntSeq& k, LimitDir dir);
Sijection gamma_limit(const IntSeq& k, LimitDir dir);

// GMT(k) <=> AR_n x SGT(k) in unsigned mode; compatible with the n+3
// weighted statistics.
Sijection gmt_ar_sgt_sij(const IntSeq& k, std::int64_t x);

// --- weighted enumeration ---------------------------------------------------

struct WeightedStats {
  std::int64_t u = 0, v = 0, w = 0;
  IntSeq x;  // eta_{X_1..n}
};

WeightedStats weighted_stats_gmt(const Elem& e, const IntSeq& k);
WeightedStats weighted_stats_ar_sgt(const Elem& e, const IntSeq& k);

// Multivariate Laurent polynomial over (u, v, w, X_1..X_n) with integer
// coefficients; zero coefficients are never stored.
class LaurentPoly {
 public:
  using Expo = std::vector<int>;

  void add(const Expo& exponents, std::int64_t coeff);
  bool operator==(const LaurentPoly& o) const { return terms_ == o.terms_; }
  bool operator!=(const LaurentPoly& o) const { return !(*this == o); }
  const std::map<Expo, std::int64_t>& terms() const { return terms_; }

  std::int64_t eval_at_ones() const;
  // One sorted "coeff monomial" line per term.
  std::string to_string(int n_vars_x) const;

 private:
  std::map<Expo, std::int64_t> terms_;
};

LaurentPoly weighted_monomials(const WeightedStats& ws);
LaurentPoly weighted_sum_gmt(const IntSeq& k);
LaurentPoly weighted_sum_ar_sgt(const IntSeq& k);

}  // namespace sij
