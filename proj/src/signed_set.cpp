#include "sij/signed_set.hpp"

#include <algorithm>
#include <atomic>

namespace sij {

namespace {

std::atomic<std::int64_t> g_budget{1000000};

void check_budget(std::size_t support) {
  std::int64_t budget = g_budget.load(std::memory_order_relaxed);
  if (static_cast<std::int64_t>(support) > budget)
    throw BudgetError("signed set support " + std::to_string(support) +
                      " exceeds element budget " + std::to_string(budget));
}

void sort_dedup(std::vector<Elem>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::shared_ptr<const NormalShape> interval_shape() {
  static const auto s = [] {
    auto n = std::make_shared<NormalShape>();
    n->kind = NormalShape::Kind::Interval;
    return n;
  }();
  return s;
}

}  // namespace

std::int64_t element_budget() { return g_budget.load(std::memory_order_relaxed); }

void set_element_budget(std::int64_t budget) {
  if (budget < 1) throw InterfaceError("element budget must be >= 1");
  g_budget.store(budget, std::memory_order_relaxed);
}

bool same_shape(const NormalShape* a, const NormalShape* b) {
  if (a == b) return true;
  if (a == nullptr || b == nullptr) return false;
  if (a->kind != b->kind) return false;
  if (a->parts.size() != b->parts.size()) return false;
  for (std::size_t i = 0; i < a->parts.size(); ++i)
    if (!same_shape(a->parts[i].get(), b->parts[i].get())) return false;
  return same_shape(a->fiber.get(), b->fiber.get());
}

SignedSet::SignedSet(std::vector<Elem> plus, std::vector<Elem> minus,
                     std::shared_ptr<const NormalShape> shape)
    : plus_(std::move(plus)), minus_(std::move(minus)), shape_(std::move(shape)) {
  sort_dedup(plus_);
  sort_dedup(minus_);
  check_budget(plus_.size() + minus_.size());
  // plus and minus must be disjoint ("a pair of disjoint finite sets").
  auto pi = plus_.begin();
  auto mi = minus_.begin();
  while (pi != plus_.end() && mi != minus_.end()) {
    if (*pi == *mi)
      throw InterfaceError("signed set parts not disjoint: " + pi->to_sexpr());
    if (*pi < *mi)
      ++pi;
    else
      ++mi;
  }
}

bool SignedSet::contains_plus(const Elem& e) const {
  return std::binary_search(plus_.begin(), plus_.end(), e);
}

bool SignedSet::contains_minus(const Elem& e) const {
  return std::binary_search(minus_.begin(), minus_.end(), e);
}

int SignedSet::sign_of(const Elem& e) const {
  if (contains_plus(e)) return 1;
  if (contains_minus(e)) return -1;
  return 0;
}

SignedSet SignedSet::with_shape(std::shared_ptr<const NormalShape> s) const {
  SignedSet out = *this;
  out.shape_ = std::move(s);
  return out;
}

SignedSet make_interval(std::int64_t a, std::int64_t b) {
  std::int64_t lo = std::min(a, b), hi = std::max(a, b);
  check_budget(static_cast<std::size_t>(hi - lo));
  std::vector<Elem> elems;
  elems.reserve(static_cast<std::size_t>(hi - lo));
  for (std::int64_t v = lo; v < hi; ++v) elems.push_back(Elem::atom(v));
  if (a < b) return SignedSet(std::move(elems), {}, interval_shape());
  if (a == b) return SignedSet({}, {}, interval_shape());
  return SignedSet({}, std::move(elems), interval_shape());
}

SignedSet opposite(const SignedSet& s) {
  return SignedSet(s.minus(), s.plus(), s.shape());
}

SignedSet disjoint_union(std::span<const SignedSet> parts) {
  std::vector<Elem> plus, minus;
  bool shaped = true;
  std::vector<std::shared_ptr<const NormalShape>> shapes;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const SignedSet& p = parts[i];
    for (const Elem& e : p.plus())
      plus.push_back(Elem::tagged(static_cast<std::int64_t>(i), e));
    for (const Elem& e : p.minus())
      minus.push_back(Elem::tagged(static_cast<std::int64_t>(i), e));
    check_budget(plus.size() + minus.size());
    if (p.shape() == nullptr) shaped = false;
    shapes.push_back(p.shape());
  }
  std::shared_ptr<const NormalShape> shape;
  if (shaped && !parts.empty()) {
    auto n = std::make_shared<NormalShape>();
    n->kind = NormalShape::Kind::Union;
    n->parts = std::move(shapes);
    shape = std::move(n);
  }
  return SignedSet(std::move(plus), std::move(minus), std::move(shape));
}

SignedSet disjoint_union(std::initializer_list<SignedSet> parts) {
  std::vector<SignedSet> v(parts);
  return disjoint_union(std::span<const SignedSet>(v));
}

SignedSet cartesian_product(std::span<const SignedSet> parts) {
  std::size_t total = 1;
  bool shaped = true;
  std::vector<std::shared_ptr<const NormalShape>> shapes;
  for (const SignedSet& p : parts) {
    total *= p.support_size();
    if (total == 0) break;
    check_budget(total);
  }
  for (const SignedSet& p : parts) {
    if (p.shape() == nullptr) shaped = false;
    shapes.push_back(p.shape());
  }
  std::vector<Elem> plus, minus;
  // Depth-first over coordinate choices, tracking minus-coordinate parity.
  std::vector<Elem> coords(parts.size());
  auto emit = [&](bool negative) {
    Elem e = Elem::tuple(coords);
    if (parts.empty()) e = Elem::unit();
    (negative ? minus : plus).push_back(std::move(e));
  };
  std::function<void(std::size_t, bool)> rec = [&](std::size_t i, bool neg) {
    if (i == parts.size()) {
      emit(neg);
      return;
    }
    for (const Elem& e : parts[i].plus()) {
      coords[i] = e;
      rec(i + 1, neg);
    }
    for (const Elem& e : parts[i].minus()) {
      coords[i] = e;
      rec(i + 1, !neg);
    }
  };
  rec(0, false);
  std::shared_ptr<const NormalShape> shape;
  if (shaped) {
    auto n = std::make_shared<NormalShape>();
    n->kind = NormalShape::Kind::Product;
    n->parts = std::move(shapes);
    shape = std::move(n);
  }
  return SignedSet(std::move(plus), std::move(minus), std::move(shape));
}

SignedSet cartesian_product(std::initializer_list<SignedSet> parts) {
  std::vector<SignedSet> v(parts);
  return cartesian_product(std::span<const SignedSet>(v));
}

SignedSet indexed_union(const SignedSet& index,
                        const std::function<SignedSet(const Elem&)>& family) {
  std::vector<Elem> plus, minus;
  std::shared_ptr<const NormalShape> fiber_shape;
  bool shaped = true;
  bool first = true;
  auto add = [&](const Elem& t, bool index_minus) {
    SignedSet fib = family(t);
    if (fib.shape() == nullptr) {
      shaped = false;
    } else if (first) {
      fiber_shape = fib.shape();
      first = false;
    } else if (!same_shape(fiber_shape.get(), fib.shape().get())) {
      shaped = false;
    }
    for (const Elem& s : fib.plus())
      (index_minus ? minus : plus).push_back(Elem::tuple({s, t}));
    for (const Elem& s : fib.minus())
      (index_minus ? plus : minus).push_back(Elem::tuple({s, t}));
    check_budget(plus.size() + minus.size());
  };
  for (const Elem& t : index.plus()) add(t, false);
  for (const Elem& t : index.minus()) add(t, true);
  std::shared_ptr<const NormalShape> shape;
  if (shaped && !first) {
    auto n = std::make_shared<NormalShape>();
    n->kind = NormalShape::Kind::FiberForget;
    n->fiber = std::move(fiber_shape);
    shape = std::move(n);
  }
  return SignedSet(std::move(plus), std::move(minus), std::move(shape));
}

SignedSet restrict_set(const SignedSet& s,
                       const std::function<bool(const Elem&)>& keep) {
  std::vector<Elem> plus, minus;
  for (const Elem& e : s.plus())
    if (keep(e)) plus.push_back(e);
  for (const Elem& e : s.minus())
    if (keep(e)) minus.push_back(e);
  return SignedSet(std::move(plus), std::move(minus), s.shape());
}

}  // namespace sij
