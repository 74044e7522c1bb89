#pragma once

// Brute-force oracles used to freeze expected values. These work directly on
// integer tuples and plain loops, independent of the signed-set and sijection
// machinery they cross-check.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace oracles {

using Seq = std::vector<std::int64_t>;

struct SignedPattern {
  std::vector<Seq> rows;  // top row first, bottom row included
  int sign = 1;
};

// All patterns of the recursive half-open GT definition, with signs.
std::vector<SignedPattern> gt_patterns(const Seq& k);
std::int64_t gt_count(const Seq& k);

// Generalized patterns: levels[i-1][j-1] = (p_{i,j}, q_{i,j}).
std::int64_t ggt_count(const Seq& k,
                       const std::vector<std::vector<std::pair<int, int>>>& levels);

// Signed count of arrow rows mu (signed double-arrow convention) with l in
// the support of mu(k), weighting each by the sign of l inside mu(k).
std::int64_t arrow_row_multiplicity(const Seq& k, const Seq& l);

// Classical monotone triangles with the given bottom row (plus-only count).
std::int64_t mt_count(const Seq& k);

// Weighted enumerations with unsigned arrows: exponent vectors are
// (u, v, w, X_1..X_n), coefficients are signed by the interval signs.
using WeightMap = std::map<std::vector<int>, std::int64_t>;
WeightMap weighted_gmt(const Seq& k);
WeightMap weighted_ar_sgt(const Seq& k);

}  // namespace oracles
