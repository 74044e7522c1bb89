#pragma once

#include "sij/gt.hpp"

namespace sij {

// Arrow rows and patterns come in two sign conventions: the signed one, where
// a double arrow counts -1, and the unsigned one where everything is plus.
// The convention is a constructor parameter, never global state.
enum class SignMode : std::uint8_t { FkSigned, AfUnsigned };

using Matrix = std::vector<std::vector<int>>;
using Triangle = std::vector<IntSeq>;  // row i (0-based) has i+1 entries

// --- Alternating sign matrices ------------------------------------------------

bool is_asm(const Matrix& m);
std::vector<Matrix> asm_enumerate(int n);  // n <= 5

// Column-wise cumulative sums, 1-positions per row, then the half-open shift
// (+ j-1 on the j-th entry). Mutually inverse with mt_to_asm.
Triangle asm_to_mt(const Matrix& m);
Matrix mt_to_asm(const Triangle& t);

std::int64_t eta_inv_asm(const Matrix& m);
std::int64_t eta_inv_mt(const Triangle& t);

// --- Monotone triangles ----------------------------------------------------------

// Classical monotone triangles with the given bottom row: half-open
// interlacing, rows above the bottom increase with gaps >= 2. All plus.
SignedSet mt_set(const IntSeq& k);
std::vector<Triangle> mt_enumerate(const IntSeq& k);

Elem triangle_to_elem(const Triangle& t);
Triangle elem_to_triangle(const Elem& e);

// --- Arrow rows and arrow patterns ----------------------------------------------

SignedSet arrow_row_set(int n, SignMode mode);
SignedSet arrow_pattern_set(int n, SignMode mode);

std::vector<Arrow> arrows_of(const Elem& e);  // flat arrow tuple

// mu(k) = [k1+ne(mu1), k2-nw(mu2)) x ... x [k_{n-1}+ne(mu_{n-1}), kn-nw(mun));
// the empty product for n = 1.
SignedSet mu_apply(const std::vector<Arrow>& mu, const IntSeq& k);

// Arrow patterns are stored flat in (i,j)-lexicographic slot order, 1<=i<j<=n.
std::size_t ap_slot(int n, int i, int j);
// c_i(T) = sum_{j>i} sw(t_{i,j}) - sum_{p<i} se(t_{p,i})
IntSeq c_vector(const Elem& ap, int n);
IntSeq ap_apply(const Elem& ap, const IntSeq& k);

// --- Generalized monotone triangles and shifted GT patterns ----------------------

SignedSet gmt(const IntSeq& k, SignMode mode);
SignedSet sgt(const IntSeq& k, SignMode mode);

// Rows of a generalized monotone triangle, top first, bottom row k included.
Triangle eta_mt_rows(const Elem& gmt_elem, const IntSeq& k);

std::int64_t eta_top_gmt(const Elem& gmt_elem, const IntSeq& k);
std::int64_t eta_top_sgt(const Elem& sgt_elem);

// Inversion numbers: NE-ish arrows on rows, SW-ish arrows on patterns.
std::int64_t eta_inv_ar(const Elem& arrow_row);
std::int64_t eta_inv_gmt(const Elem& gmt_elem);
std::int64_t eta_inv_sgt(const Elem& sgt_elem);

// iota : MT(k) <=> GMT(k) for strictly increasing k (signed mode). The
// distinguished arrow row mu_l has NE exactly where k_i = l_{i-1} + 1.
Sijection iota_mt(const IntSeq& k);

// --- Transfer-matrix multiplicity -------------------------------------------------

// Signed count of arrow rows mu with l in the support of mu(k), computed by a
// 2x2 transfer-matrix product over the positions of l.
std::int64_t m_multiplicity(const IntSeq& k, const IntSeq& l);

// True iff m_i = m_{i+1}-1 = m_{i+2}-2 for some i.
bool is_partially_successive(const IntSeq& m);

}  // namespace sij
