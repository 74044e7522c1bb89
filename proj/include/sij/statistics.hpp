#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sij/sijection.hpp"

namespace sij {

// Closed value algebra for statistics: integer, integer sequence, sequence of
// multisets (each stored as a sorted integer sequence), or a tuple of values.
// Equality is structural.
class StatValue {
 public:
  enum class Kind : std::uint8_t { Int, Seq, MultisetSeq, Tuple };

  static StatValue integer(std::int64_t v);
  static StatValue seq(std::vector<std::int64_t> v);
  // Sorts each multiset.
  static StatValue multiset_seq(std::vector<std::vector<std::int64_t>> v);
  static StatValue tuple(std::vector<StatValue> v);

  Kind kind() const { return kind_; }
  std::int64_t as_int() const;
  const std::vector<std::int64_t>& as_seq() const;
  const std::vector<std::vector<std::int64_t>>& as_multiset_seq() const;
  const std::vector<StatValue>& as_tuple() const;

  bool operator==(const StatValue& o) const;
  bool operator!=(const StatValue& o) const { return !(*this == o); }

  std::string to_string() const;  // JSON-style scalars/arrays

 private:
  Kind kind_ = Kind::Int;
  std::int64_t int_ = 0;
  std::vector<std::int64_t> seq_;
  std::vector<std::vector<std::int64_t>> mseq_;
  std::vector<StatValue> tuple_;
};

// A total function on the support of a signed set (or of a sijection's two
// endpoint sets; the side disambiguates which one the element belongs to).
struct Statistic {
  std::string name;
  std::function<StatValue(Side, const Elem&)> eval;

  StatValue operator()(Side s, const Elem& e) const { return eval(s, e); }
};

struct CompatReport {
  bool compatible = true;
  std::string detail;
  std::optional<Sided> witness;
  std::size_t checked = 0;

  explicit operator bool() const { return compatible; }
};

// Checks eta(phi(s)) == eta(s) for every s in the union of supports; reports
// the first witness on failure.
CompatReport check_compatibility(const Sijection& phi, const Statistic& eta);

// The canonical integer-valued statistic of a normal signed set (one built
// from intervals by unions and products, with index-forgetting unions being
// transparent). Requires recorded provenance; throws InterfaceError without.
Statistic normal_statistic(const SignedSet& s);

// Side-dispatching normal statistic over a sijection's two endpoints.
Statistic normal_statistic(const SignedSet& dom, const SignedSet& cod);

// eta(s) = (eta1(s), eta2(s)).
Statistic pair_statistic(const Statistic& a, const Statistic& b);

// For elements of a two-part disjoint union: dispatch on the tag.
Statistic union_statistic(const Statistic& a, const Statistic& b);

// Restriction of S to the elements with eta(s) == value (signs preserved).
SignedSet restrict_by_stat(const SignedSet& s, const Statistic& eta, Side side,
                           const StatValue& value);

// Restricts an eta-compatible sijection to the eta = value slices of its
// endpoints. The result is a valid sijection whenever phi is compatible.
Sijection restrict_sij(const Sijection& phi, const Statistic& eta,
                       const StatValue& value);

}  // namespace sij
