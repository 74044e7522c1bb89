#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sij/element.hpp"

namespace sij {

// Thrown when a construction would materialize more support elements than the
// configured budget allows.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on contract violations between constructions (mismatched middle sets,
// missing family members, bad preconditions).
struct InterfaceError : std::runtime_error {
  explicit InterfaceError(const std::string& what) : std::runtime_error(what) {}
};

// Global support-element budget for one materialized signed set.
std::int64_t element_budget();
void set_element_budget(std::int64_t budget);

// Provenance of a normal signed set: built from intervals by disjoint unions
// and Cartesian products, possibly under index-forgetting unions whose fibers
// all share a shape. Drives the normal statistic.
struct NormalShape {
  enum class Kind { Interval, Union, Product, FiberForget };
  Kind kind;
  std::vector<std::shared_ptr<const NormalShape>> parts;  // Union/Product
  std::shared_ptr<const NormalShape> fiber;               // FiberForget
};

bool same_shape(const NormalShape* a, const NormalShape* b);

// A pair of disjoint finite sets of canonical elements. Fully materialized;
// immutable after construction and safe to share across threads.
class SignedSet {
 public:
  SignedSet() = default;
  // Sorts, dedups, and checks plus/minus disjointness.
  SignedSet(std::vector<Elem> plus, std::vector<Elem> minus,
            std::shared_ptr<const NormalShape> shape = nullptr);

  const std::vector<Elem>& plus() const { return plus_; }
  const std::vector<Elem>& minus() const { return minus_; }
  const std::shared_ptr<const NormalShape>& shape() const { return shape_; }

  std::int64_t size() const {
    return static_cast<std::int64_t>(plus_.size()) -
           static_cast<std::int64_t>(minus_.size());
  }
  std::size_t support_size() const { return plus_.size() + minus_.size(); }
  bool empty() const { return plus_.empty() && minus_.empty(); }

  bool contains_plus(const Elem& e) const;
  bool contains_minus(const Elem& e) const;
  bool contains(const Elem& e) const { return sign_of(e) != 0; }
  // +1, -1, or 0 when absent.
  int sign_of(const Elem& e) const;

  // Value equality; provenance is not part of the value.
  bool operator==(const SignedSet& o) const {
    return plus_ == o.plus_ && minus_ == o.minus_;
  }
  bool operator!=(const SignedSet& o) const { return !(*this == o); }

  SignedSet with_shape(std::shared_ptr<const NormalShape> s) const;

 private:
  std::vector<Elem> plus_, minus_;
  std::shared_ptr<const NormalShape> shape_;
};

// The signed interval [a,b): {a..b-1} plus when a<b, empty when a=b,
// {b..a-1} minus when a>b. Satisfies interval(b,a) == opposite(interval(a,b)).
SignedSet make_interval(std::int64_t a, std::int64_t b);

SignedSet opposite(const SignedSet& s);

// Parts tagged positionally 0..k-1. Size is the sum of part sizes.
SignedSet disjoint_union(std::span<const SignedSet> parts);
SignedSet disjoint_union(std::initializer_list<SignedSet> parts);

// Elements are flat tuples, one coordinate per part; an element is plus iff
// an even number of coordinates are minus. The empty product is ({unit}, {}).
SignedSet cartesian_product(std::span<const SignedSet> parts);
SignedSet cartesian_product(std::initializer_list<SignedSet> parts);

// Disjoint union with signed index: elements are (s, t) pairs, sign is the
// product of index and fiber signs. `family` must be defined on the support.
SignedSet indexed_union(const SignedSet& index,
                        const std::function<SignedSet(const Elem&)>& family);

// Keeps exactly the elements with stat(e) == value, preserving signs.
SignedSet restrict_set(const SignedSet& s,
                       const std::function<bool(const Elem&)>& keep);

}  // namespace sij
