#include "support/oracles.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace oracles {

namespace {

struct SignedTuple {
  Seq values;
  int sign = 1;
};

// Integer tuples of prod [a_i, b_i) with coordinate-wise signs.
std::vector<SignedTuple> signed_tuples(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& bounds) {
  std::vector<SignedTuple> out = {{{}, 1}};
  for (auto [a, b] : bounds) {
    std::vector<SignedTuple> next;
    std::int64_t lo = std::min(a, b), hi = std::max(a, b);
    int coord_sign = a <= b ? 1 : -1;
    for (const SignedTuple& t : out)
      for (std::int64_t v = lo; v < hi; ++v) {
        SignedTuple u = t;
        u.values.push_back(v);
        u.sign *= coord_sign;
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> step_bounds(const Seq& k) {
  std::vector<std::pair<std::int64_t, std::int64_t>> bounds;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) bounds.push_back({k[i], k[i + 1]});
  return bounds;
}

std::int64_t sum(const Seq& v) {
  return std::accumulate(v.begin(), v.end(), std::int64_t{0});
}

// Arrow code: 0 = NW-ish, 1 = NE-ish, 2 = double.
int d_up_left(int a) { return a == 1 ? 0 : 1; }   // NW or NWNE
int d_up_right(int a) { return a == 0 ? 0 : 1; }  // NE or NWNE

std::vector<std::vector<int>> all_words(int length) {
  std::vector<std::vector<int>> out = {{}};
  for (int i = 0; i < length; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& w : out)
      for (int a = 0; a < 3; ++a) {
        auto u = w;
        u.push_back(a);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> mu_bounds(
    const std::vector<int>& mu, const Seq& k) {
  std::vector<std::pair<std::int64_t, std::int64_t>> bounds;
  for (std::size_t i = 0; i + 1 < k.size(); ++i)
    bounds.push_back({k[i] + d_up_right(mu[i]), k[i + 1] - d_up_left(mu[i + 1])});
  return bounds;
}

// Pattern arrows: 0 = SE-ish, 1 = SW-ish, 2 = double; slots (i,j)-lex.
int d_down_right(int a) { return a == 1 ? 0 : 1; }
int d_down_left(int a) { return a == 0 ? 0 : 1; }

std::size_t slot(int n, int i, int j) {
  return static_cast<std::size_t>((i - 1) * (2 * n - i) / 2 + (j - i - 1));
}

Seq pattern_shift(const std::vector<int>& t, const Seq& k) {
  int n = static_cast<int>(k.size());
  Seq out = k;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) out[i - 1] += d_down_left(t[slot(n, i, j)]);
    for (int p = 1; p < i; ++p) out[i - 1] -= d_down_right(t[slot(n, p, i)]);
  }
  return out;
}

}  // namespace

std::vector<SignedPattern> gt_patterns(const Seq& k) {
  if (k.size() == 1) return {{{{k[0]}}, 1}};
  std::vector<SignedPattern> out;
  for (const SignedTuple& l : signed_tuples(step_bounds(k)))
    for (const SignedPattern& sub : gt_patterns(l.values)) {
      SignedPattern p = sub;
      p.rows.push_back(k);
      p.sign *= l.sign;
      out.push_back(std::move(p));
    }
  return out;
}

std::int64_t gt_count(const Seq& k) {
  if (k.size() == 1) return 1;
  std::int64_t total = 0;
  for (const SignedTuple& l : signed_tuples(step_bounds(k)))
    total += l.sign * gt_count(l.values);
  return total;
}

std::int64_t ggt_count(
    const Seq& k,
    const std::vector<std::vector<std::pair<int, int>>>& levels) {
  std::size_t n = k.size();
  if (n == 1) return 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> bounds;
  for (auto [p, q] : levels[n - 2]) bounds.push_back({k[p - 1], k[q - 1]});
  std::int64_t total = 0;
  for (const SignedTuple& l : signed_tuples(bounds))
    total += l.sign * ggt_count(l.values, levels);
  return total;
}

std::int64_t arrow_row_multiplicity(const Seq& k, const Seq& l) {
  std::int64_t total = 0;
  for (const auto& mu : all_words(static_cast<int>(k.size()))) {
    int mu_sign = 1;
    for (int a : mu)
      if (a == 2) mu_sign = -mu_sign;
    auto bounds = mu_bounds(mu, k);
    int member_sign = 1;
    bool inside = true;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      auto [a, b] = bounds[i];
      std::int64_t lo = std::min(a, b), hi = std::max(a, b);
      if (!(lo <= l[i] && l[i] < hi)) {
        inside = false;
        break;
      }
      if (a > b) member_sign = -member_sign;
    }
    if (inside) total += mu_sign * member_sign;
  }
  return total;
}

std::int64_t mt_count(const Seq& k) {
  if (k.size() == 1) return 1;
  std::int64_t total = 0;
  std::size_t m = k.size() - 1;
  Seq row(m);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == m) {
      total += mt_count(row);
      return;
    }
    for (std::int64_t v = k[j]; v < k[j + 1]; ++v) {
      if (j > 0 && !(row[j - 1] < v - 1)) continue;
      row[j] = v;
      rec(j + 1);
    }
  };
  rec(0);
  return total;
}

namespace {

struct GmtLine {
  std::int64_t u = 0, v = 0, w = 0;
  Seq x;
  int sign = 1;
};

std::vector<GmtLine> gmt_lines(const Seq& k) {
  std::vector<GmtLine> out;
  if (k.size() == 1) {
    for (int a = 0; a < 3; ++a) {
      GmtLine line;
      line.u = a == 1;
      line.v = a == 0;
      line.w = a == 2;
      line.x = {k[0] + (a == 1) - (a == 0)};
      out.push_back(std::move(line));
    }
    return out;
  }
  for (const auto& mu : all_words(static_cast<int>(k.size()))) {
    std::int64_t ne = 0, nw = 0, dbl = 0;
    for (int a : mu) {
      ne += a == 1;
      nw += a == 0;
      dbl += a == 2;
    }
    for (const SignedTuple& l : signed_tuples(mu_bounds(mu, k)))
      for (const GmtLine& sub : gmt_lines(l.values)) {
        GmtLine line = sub;
        line.u += ne;
        line.v += nw;
        line.w += dbl;
        line.x.push_back(sum(k) - sum(l.values) + ne - nw);
        line.sign *= l.sign;
        out.push_back(std::move(line));
      }
  }
  return out;
}

void add_line(WeightMap& map, const GmtLine& line) {
  std::vector<int> expo = {static_cast<int>(line.u), static_cast<int>(line.v),
                           static_cast<int>(line.w)};
  for (std::int64_t xi : line.x) expo.push_back(static_cast<int>(xi));
  auto it = map.find(expo);
  if (it == map.end())
    map.emplace(std::move(expo), line.sign);
  else if ((it->second += line.sign) == 0)
    map.erase(it);
}

}  // namespace

WeightMap weighted_gmt(const Seq& k) {
  WeightMap map;
  for (const GmtLine& line : gmt_lines(k)) add_line(map, line);
  return map;
}

WeightMap weighted_ar_sgt(const Seq& k) {
  WeightMap map;
  int n = static_cast<int>(k.size());
  for (const auto& mu : all_words(n)) {
    for (const auto& t : all_words(n * (n - 1) / 2)) {
      Seq bottom = pattern_shift(t, k);
      std::int64_t se = 0, sw = 0, dbl = 0;
      for (int a : t) {
        se += a == 0;
        sw += a == 1;
        dbl += a == 2;
      }
      for (const SignedPattern& p : gt_patterns(bottom)) {
        GmtLine line;
        line.sign = p.sign;
        for (int a : mu) {
          line.u += a == 1;
          line.v += a == 0;
          line.w += a == 2;
        }
        line.u += sw;
        line.v += se;
        line.w += dbl;
        std::int64_t prev = 0;
        for (std::size_t i = 0; i < p.rows.size(); ++i) {
          std::int64_t cur = sum(p.rows[i]);
          line.x.push_back(cur - prev + (mu[i] == 1) - (mu[i] == 0));
          prev = cur;
        }
        add_line(map, line);
      }
    }
  }
  return map;
}

}  // namespace oracles
