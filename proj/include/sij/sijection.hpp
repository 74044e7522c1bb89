#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sij/signed_set.hpp"

namespace sij {

enum class Side : std::uint8_t { Domain, Codomain };

inline Side other_side(Side s) {
  return s == Side::Domain ? Side::Codomain : Side::Domain;
}

// A support element together with the side of the sijection it lives on.
struct Sided {
  Side side;
  Elem elem;

  bool operator==(const Sided& o) const {
    return side == o.side && elem == o.elem;
  }
};

// An evaluable sijection S <=> T: an involution on the disjoint union of the
// two supports that maps S+ u T- onto S- u T+. Built from combinators and
// evaluated on demand; nothing is materialized unless the verifier asks.
// Immutable and shareable; eval is reentrant and stateless.
class Sijection {
 public:
  Sijection() = default;

  const SignedSet& domain() const;
  const SignedSet& codomain() const;

  // Total on both supports; throws InterfaceError for foreign elements.
  Sided eval(const Sided& v) const;
  Sided eval(Side side, const Elem& e) const { return eval(Sided{side, e}); }

  bool valid() const { return impl_ != nullptr; }

  struct Node;
  explicit Sijection(std::shared_ptr<const Node> n) : impl_(std::move(n)) {}
  const Node* node() const { return impl_.get(); }

 private:
  std::shared_ptr<const Node> impl_;
};

// --- Combinators ---------------------------------------------------------

// s <-> s across sides; domain and codomain must be equal as values.
Sijection identity_sij(const SignedSet& s);
Sijection identity_sij(const SignedSet& dom, const SignedSet& cod);

// Every element crosses sides through fwd/bwd, which must be mutually inverse
// sign-preserving bijections between the supports.
Sijection relabel_sij(SignedSet dom, SignedSet cod,
                      std::function<Elem(const Elem&)> fwd,
                      std::function<Elem(const Elem&)> bwd);

// Explicit involution given as a pairing list; each listed pair {a, b} means
// a <-> b. Every support element must appear in exactly one pair.
Sijection finite_map_sij(SignedSet dom, SignedSet cod,
                         std::vector<std::pair<Sided, Sided>> pairs);

// [a,b) <=> [a,c) u [c,b). For each integer value, occurrences in S+ u T- and
// in S- u T+ are paired positionally (domain occurrence first, then parts in
// tag order).
Sijection interval_split(std::int64_t a, std::int64_t b, std::int64_t c);

// Alternating iteration s, phi(s), psi(phi(s)), ... until the next step is
// undefined. Requires codomain(phi) == domain(psi) byte-equal.
Sijection compose(const Sijection& phi, const Sijection& psi);
Sijection compose_chain(std::vector<Sijection> chain);

// Leftmost-reverting k-ary Cartesian product; elements are flat tuples with
// one coordinate per factor.
Sijection product_sij(std::vector<Sijection> factors);

// Tag-dispatching disjoint union.
Sijection union_sij(std::vector<Sijection> parts);

// Disjoint union with signed index. `fiber_set` gives the fiber at each sided
// index element; `fiber_sij` is consulted only at indices in psi's class
// dom+ u cod- and must map fiber_set(t) to fiber_set(psi(t)). The family is
// closed under psi automatically.
Sijection indexed_union_sij(
    const Sijection& psi,
    std::function<SignedSet(const Sided&)> fiber_set,
    std::function<Sijection(const Sided&)> fiber_sij,
    bool check_fibers = true);

// From phi : S <=> T, the sijection S u -T <=> (0,0) pairing s with phi(s)
// inside the lone domain.
Sijection cancel_opposite(const Sijection& phi);

// -phi : -S <=> -T (same underlying involution).
Sijection opposite_sij(const Sijection& phi);

// phi read backwards: T <=> S.
Sijection inverse_sij(const Sijection& phi);

// Bespoke leaf: an arbitrary rule with declared endpoints. The rule must be
// an involution; the verifier is the safety net.
Sijection rule_sij(SignedSet dom, SignedSet cod,
                   std::function<Sided(const Sided&)> rule);

// Conjugation by the translation k -> k + t.
Sijection translate_sij(std::int64_t t, const Sijection& phi);

// Orients a by-value fiber family for indexed_union_sij: at codomain-side
// class-one indices the required fiber runs backwards.
std::function<Sijection(const Sided&)> oriented_fiber_family(
    std::function<Sijection(const Elem&)> forward);

// --- Verification and export ---------------------------------------------

struct VerifyReport {
  bool valid = true;
  std::string issue;             // empty when valid
  std::optional<Sided> witness;  // first violating element
  std::size_t checked = 0;

  explicit operator bool() const { return valid; }
};

// Checks totality on both supports, the involution law, and the sign
// condition (S+ u T- <-> S- u T+). Violations are report content, not thrown.
VerifyReport verify_sijection(const Sijection& phi);

struct GraphEdge {
  Sided a, b;  // a in S+ u T-, b = phi(a)
};

// Edges {v, phi(v)} for v in S+ u T-.
std::vector<GraphEdge> sijection_graph(const Sijection& phi);

// DOT rendering: one subgraph per side, node label = serialized element,
// circle/box by bipartition class as in hand-drawn sijection figures.
std::string graph_dot(const Sijection& phi);

}  // namespace sij
