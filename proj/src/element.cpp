#include "sij/element.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace sij {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

const char* arrow_name(Arrow a) {
  switch (a) {
    case Arrow::NW: return "NW";
    case Arrow::NE: return "NE";
    case Arrow::NWNE: return "NWNE";
    case Arrow::SE: return "SE";
    case Arrow::SW: return "SW";
    case Arrow::SESW: return "SESW";
  }
  return "?";
}

bool parse_arrow(std::string_view s, Arrow& out) {
  static constexpr Arrow all[] = {Arrow::NW,  Arrow::NE, Arrow::NWNE,
                                  Arrow::SE,  Arrow::SW, Arrow::SESW};
  for (Arrow a : all) {
    if (s == arrow_name(a)) {
      out = a;
      return true;
    }
  }
  return false;
}

Arrow reverse_arrow(Arrow a) {
  switch (a) {
    case Arrow::NW: return Arrow::SE;
    case Arrow::NE: return Arrow::SW;
    case Arrow::NWNE: return Arrow::SESW;
    case Arrow::SE: return Arrow::NW;
    case Arrow::SW: return Arrow::NE;
    case Arrow::SESW: return Arrow::NWNE;
  }
  return a;
}

Elem Elem::unit() {
  static const Elem u = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Unit;
    n->hash = 0x5u;
    return Elem(std::move(n));
  }();
  return u;
}

Elem Elem::atom(std::int64_t v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->value = v;
  n->hash = mix(0x11u, std::hash<std::int64_t>{}(v));
  return Elem(std::move(n));
}

Elem Elem::arrow(Arrow a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::ArrowSym;
  n->arrow = a;
  n->hash = mix(0x23u, static_cast<std::size_t>(a));
  return Elem(std::move(n));
}

Elem Elem::tuple(std::vector<Elem> children) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Tuple;
  std::size_t h = 0x31u;
  for (const Elem& c : children) h = mix(h, c.hash());
  h = mix(h, children.size());
  n->children = std::move(children);
  n->hash = h;
  return Elem(std::move(n));
}

Elem Elem::tagged(std::int64_t index, Elem child) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Tagged;
  n->value = index;
  n->hash = mix(mix(0x47u, std::hash<std::int64_t>{}(index)), child.hash());
  n->children.push_back(std::move(child));
  return Elem(std::move(n));
}

std::int64_t Elem::atom_value() const {
  if (!is_atom()) throw std::logic_error("Elem: not an atom");
  return node_->value;
}

Arrow Elem::arrow_value() const {
  if (!is_arrow()) throw std::logic_error("Elem: not an arrow");
  return node_->arrow;
}

const std::vector<Elem>& Elem::children() const {
  if (!is_tuple()) throw std::logic_error("Elem: not a tuple");
  return node_->children;
}

std::int64_t Elem::tag() const {
  if (!is_tagged()) throw std::logic_error("Elem: not tagged");
  return node_->value;
}

const Elem& Elem::tagged_child() const {
  if (!is_tagged()) throw std::logic_error("Elem: not tagged");
  return node_->children[0];
}

bool Elem::operator==(const Elem& o) const {
  if (node_ == o.node_) return true;
  if (node_->hash != o.node_->hash || node_->kind != o.node_->kind) return false;
  switch (node_->kind) {
    case Kind::Unit: return true;
    case Kind::Atom: return node_->value == o.node_->value;
    case Kind::ArrowSym: return node_->arrow == o.node_->arrow;
    case Kind::Tagged:
      return node_->value == o.node_->value &&
             node_->children[0] == o.node_->children[0];
    case Kind::Tuple: {
      if (node_->children.size() != o.node_->children.size()) return false;
      for (std::size_t i = 0; i < node_->children.size(); ++i)
        if (!(node_->children[i] == o.node_->children[i])) return false;
      return true;
    }
  }
  return false;
}

bool Elem::operator<(const Elem& o) const {
  if (node_ == o.node_) return false;
  if (node_->kind != o.node_->kind) return node_->kind < o.node_->kind;
  switch (node_->kind) {
    case Kind::Unit: return false;
    case Kind::Atom: return node_->value < o.node_->value;
    case Kind::ArrowSym: return node_->arrow < o.node_->arrow;
    case Kind::Tagged:
      if (node_->value != o.node_->value) return node_->value < o.node_->value;
      return node_->children[0] < o.node_->children[0];
    case Kind::Tuple: {
      const auto& a = node_->children;
      const auto& b = o.node_->children;
      for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
      }
      return a.size() < b.size();
    }
  }
  return false;
}

namespace {

void write_sexpr(const Elem& e, std::string& out) {
  switch (e.kind()) {
    case Elem::Kind::Unit:
      out += "()";
      return;
    case Elem::Kind::Atom:
      out += std::to_string(e.atom_value());
      return;
    case Elem::Kind::ArrowSym:
      out += arrow_name(e.arrow_value());
      return;
    case Elem::Kind::Tuple: {
      out += "(tup";
      for (const Elem& c : e.children()) {
        out += ' ';
        write_sexpr(c, out);
      }
      out += ')';
      return;
    }
    case Elem::Kind::Tagged: {
      out += "(tag ";
      out += std::to_string(e.tag());
      out += ' ';
      write_sexpr(e.tagged_child(), out);
      out += ')';
      return;
    }
  }
}

struct Parser {
  std::string_view s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& why) {
    throw std::invalid_argument("element parse error at offset " +
                                std::to_string(pos) + ": " + why);
  }

  bool eat(char c) {
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  std::string_view token() {
    std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
           s[pos] != '(' && s[pos] != ')')
      ++pos;
    if (pos == start) fail("expected token");
    return s.substr(start, pos - start);
  }

  std::int64_t integer() {
    std::string_view t = token();
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail("expected integer");
    return v;
  }

  Elem expr() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    if (eat('(')) {
      skip_ws();
      if (eat(')')) return Elem::unit();
      std::string_view head = token();
      if (head == "tup") {
        std::vector<Elem> kids;
        skip_ws();
        while (!eat(')')) {
          kids.push_back(expr());
          skip_ws();
          if (pos >= s.size()) fail("unterminated tuple");
        }
        return Elem::tuple(std::move(kids));
      }
      if (head == "tag") {
        skip_ws();
        std::int64_t idx = integer();
        Elem child = expr();
        skip_ws();
        if (!eat(')')) fail("expected ')' after tagged child");
        return Elem::tagged(idx, std::move(child));
      }
      fail("unknown list head '" + std::string(head) + "'");
    }
    std::string_view t = token();
    Arrow a;
    if (parse_arrow(t, a)) return Elem::arrow(a);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
      fail("expected integer, arrow, or list");
    return Elem::atom(v);
  }
};

}  // namespace

std::string Elem::to_sexpr() const {
  std::string out;
  write_sexpr(*this, out);
  return out;
}

Elem Elem::parse(std::string_view text) {
  Parser p{text};
  Elem e = p.expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

Elem translate_elem(std::int64_t t, const Elem& e) {
  switch (e.kind()) {
    case Elem::Kind::Unit:
    case Elem::Kind::ArrowSym:
      return e;
    case Elem::Kind::Atom:
      return Elem::atom(e.atom_value() + t);
    case Elem::Kind::Tagged:
      return Elem::tagged(e.tag(), translate_elem(t, e.tagged_child()));
    case Elem::Kind::Tuple: {
      std::vector<Elem> kids;
      kids.reserve(e.children().size());
      for (const Elem& c : e.children()) kids.push_back(translate_elem(t, c));
      return Elem::tuple(std::move(kids));
    }
  }
  return e;
}

}  // namespace sij
