#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sij {

// Arrow decorations. NW/NE/NWNE decorate rows, SE/SW/SESW decorate patterns.
enum class Arrow : std::uint8_t { NW, NE, NWNE, SE, SW, SESW };

const char* arrow_name(Arrow a);
bool parse_arrow(std::string_view s, Arrow& out);

// delta_ne(a) = 1 iff a points north-east (NE or NWNE); likewise the others.
inline int delta_ne(Arrow a) { return (a == Arrow::NE || a == Arrow::NWNE) ? 1 : 0; }
inline int delta_nw(Arrow a) { return (a == Arrow::NW || a == Arrow::NWNE) ? 1 : 0; }
inline int delta_se(Arrow a) { return (a == Arrow::SE || a == Arrow::SESW) ? 1 : 0; }
inline int delta_sw(Arrow a) { return (a == Arrow::SW || a == Arrow::SESW) ? 1 : 0; }

// Reverses an arrow's direction (NW <-> SE, NE <-> SW, NWNE <-> SESW).
Arrow reverse_arrow(Arrow a);

// Canonical element tree. Every object that lives inside a signed set is one
// of these: an integer atom, an arrow, a tuple, a component-tagged child, or
// the unit (the sole element of an empty Cartesian product).
//
// Equality is structural and coincides with byte-equality of the canonical
// s-expression serialization. operator< is a deterministic structural order
// (kind, then payload, then children); it is total and used wherever sorted
// element order is required.
class Elem {
 public:
  enum class Kind : std::uint8_t { Unit, Atom, ArrowSym, Tuple, Tagged };

  Elem() : Elem(unit()) {}

  static Elem unit();
  static Elem atom(std::int64_t v);
  static Elem arrow(Arrow a);
  static Elem tuple(std::vector<Elem> children);
  static Elem tagged(std::int64_t index, Elem child);

  Kind kind() const { return node_->kind; }
  bool is_unit() const { return kind() == Kind::Unit; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_arrow() const { return kind() == Kind::ArrowSym; }
  bool is_tuple() const { return kind() == Kind::Tuple; }
  bool is_tagged() const { return kind() == Kind::Tagged; }

  std::int64_t atom_value() const;
  Arrow arrow_value() const;
  const std::vector<Elem>& children() const;  // Tuple
  std::int64_t tag() const;                   // Tagged
  const Elem& tagged_child() const;           // Tagged

  std::size_t hash() const { return node_->hash; }

  bool operator==(const Elem& o) const;
  bool operator!=(const Elem& o) const { return !(*this == o); }
  bool operator<(const Elem& o) const;

  std::string to_sexpr() const;
  // Parses the canonical s-expression form; throws std::invalid_argument.
  static Elem parse(std::string_view text);

 private:
  struct Node {
    Kind kind;
    Arrow arrow = Arrow::NW;
    std::int64_t value = 0;  // Atom value or Tagged index
    std::vector<Elem> children;
    std::size_t hash = 0;
  };
  explicit Elem(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct ElemHash {
  std::size_t operator()(const Elem& e) const { return e.hash(); }
};

// Shifts every integer atom by t; arrows and structure are unchanged.
Elem translate_elem(std::int64_t t, const Elem& e);

}  // namespace sij
