#include "sij/sijection.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace sij {

struct Sijection::Node {
  SignedSet dom, cod;
  virtual ~Node() = default;
  virtual Sided eval(const Sided& v) const = 0;
};

namespace {

using Node = Sijection::Node;

struct SidedKey {
  bool operator()(const Sided& a, const Sided& b) const {
    if (a.side != b.side) return a.side < b.side;
    return a.elem < b.elem;
  }
};

[[noreturn]] void foreign(const Sided& v) {
  throw InterfaceError(std::string("element not in ") +
                       (v.side == Side::Domain ? "domain" : "codomain") +
                       " support: " + v.elem.to_sexpr());
}

const SignedSet& side_set(const Node& n, Side s) {
  return s == Side::Domain ? n.dom : n.cod;
}

struct IdentityNode final : Node {
  Sided eval(const Sided& v) const override {
    if (!side_set(*this, v.side).contains(v.elem)) foreign(v);
    return Sided{other_side(v.side), v.elem};
  }
};

struct RelabelNode final : Node {
  std::function<Elem(const Elem&)> fwd, bwd;
  Sided eval(const Sided& v) const override {
    if (!side_set(*this, v.side).contains(v.elem)) foreign(v);
    return v.side == Side::Domain ? Sided{Side::Codomain, fwd(v.elem)}
                                  : Sided{Side::Domain, bwd(v.elem)};
  }
};

struct FiniteMapNode final : Node {
  std::map<Sided, Sided, SidedKey> map;
  Sided eval(const Sided& v) const override {
    auto it = map.find(v);
    if (it == map.end()) foreign(v);
    return it->second;
  }
};

struct SplitNode final : Node {
  std::int64_t a, b, c;

  // Occurrences of value v in the given bipartition class, in positional
  // order: domain first, then part 0, then part 1.
  std::vector<Sided> occurrences(std::int64_t v, bool class_one) const {
    auto in_plus = [v](std::int64_t lo, std::int64_t hi) {
      return lo < hi && lo <= v && v < hi;
    };
    std::vector<Sided> out;
    bool dom_plus = in_plus(a, b), dom_minus = in_plus(b, a);
    bool p0_plus = in_plus(a, c), p0_minus = in_plus(c, a);
    bool p1_plus = in_plus(c, b), p1_minus = in_plus(b, c);
    Elem atom = Elem::atom(v);
    if (class_one ? dom_plus : dom_minus) out.push_back({Side::Domain, atom});
    if (class_one ? p0_minus : p0_plus)
      out.push_back({Side::Codomain, Elem::tagged(0, atom)});
    if (class_one ? p1_minus : p1_plus)
      out.push_back({Side::Codomain, Elem::tagged(1, atom)});
    return out;
  }

  Sided eval(const Sided& v) const override {
    if (!side_set(*this, v.side).contains(v.elem)) foreign(v);
    const Elem& inner =
        v.side == Side::Domain ? v.elem : v.elem.tagged_child();
    std::int64_t value = inner.atom_value();
    int sign = side_set(*this, v.side).sign_of(v.elem);
    bool class_one = (v.side == Side::Domain) == (sign > 0);
    std::vector<Sided> from = occurrences(value, class_one);
    std::vector<Sided> to = occurrences(value, !class_one);
    for (std::size_t i = 0; i < from.size(); ++i)
      if (from[i] == v) return to[i];
    foreign(v);
  }
};

struct ComposeNode final : Node {
  Sijection f, g;
  Sided eval(const Sided& v) const override {
    // Walk the alternating red/blue path; the last well-defined element is
    // the image. The path length is bounded by the total support size.
    std::size_t cap = f.domain().support_size() + f.codomain().support_size() +
                      g.codomain().support_size() + 2;
    bool in_f = v.side == Side::Domain;
    Sided cur = in_f ? v : g.eval(v);
    if (!in_f && cur.side == Side::Codomain) return {Side::Codomain, cur.elem};
    // cur is now a middle element expressed on f's codomain side when coming
    // from the right, or a starting domain element.
    if (!in_f) cur = Sided{Side::Codomain, cur.elem};
    for (std::size_t step = 0; step <= cap; ++step) {
      Sided r = f.eval(cur);
      if (r.side == Side::Domain) return {Side::Domain, r.elem};
      Sided s = g.eval(Sided{Side::Domain, r.elem});
      if (s.side == Side::Codomain) return {Side::Codomain, s.elem};
      cur = Sided{Side::Codomain, s.elem};
    }
    throw std::logic_error("compose: alternation exceeded support bound");
  }
};

struct ProductNode final : Node {
  std::vector<Sijection> factors;

  Sided eval(const Sided& v) const override {
    if (!side_set(*this, v.side).contains(v.elem)) foreign(v);
    const std::vector<Elem> coords =
        v.elem.is_unit() ? std::vector<Elem>{} : v.elem.children();
    // An image coordinate "stays" when it lands back on the side we started
    // from; the leftmost staying coordinate reverts alone, otherwise all
    // coordinates cross.
    std::vector<Elem> out(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
      Sided r = factors[i].eval(Sided{v.side, coords[i]});
      if (r.side == v.side) {
        std::vector<Elem> kept = coords;
        kept[i] = r.elem;
        return Sided{v.side, Elem::tuple(std::move(kept))};
      }
      out[i] = r.elem;
    }
    Elem img = coords.empty() ? Elem::unit() : Elem::tuple(std::move(out));
    return Sided{other_side(v.side), std::move(img)};
  }
};

struct UnionNode final : Node {
  std::vector<Sijection> parts;
  Sided eval(const Sided& v) const override {
    if (!v.elem.is_tagged()) foreign(v);
    std::int64_t tag = v.elem.tag();
    if (tag < 0 || tag >= static_cast<std::int64_t>(parts.size()))
      throw InterfaceError("union: tag out of range: " + v.elem.to_sexpr());
    Sided r = parts[tag].eval(Sided{v.side, v.elem.tagged_child()});
    return Sided{r.side, Elem::tagged(tag, r.elem)};
  }
};

struct IndexedUnionNode final : Node {
  Sijection psi;
  std::function<SignedSet(const Sided&)> fiber_set;
  std::function<Sijection(const Sided&)> fiber_sij;

  bool in_class_one(const Sided& t) const {
    const SignedSet& s = t.side == Side::Domain ? psi.domain() : psi.codomain();
    int sign = s.sign_of(t.elem);
    if (sign == 0) foreign(t);
    return (t.side == Side::Domain) == (sign > 0);
  }

  Sided eval(const Sided& v) const override {
    if (!v.elem.is_tuple() || v.elem.children().size() != 2) foreign(v);
    const Elem& s = v.elem.children()[0];
    const Elem& t = v.elem.children()[1];
    Sided idx{v.side, t};
    if (in_class_one(idx)) {
      Sijection fib = fiber_sij(idx);
      Sided r = fib.eval(Sided{Side::Domain, s});
      if (r.side == Side::Domain)
        return Sided{idx.side, Elem::tuple({r.elem, t})};
      Sided moved = psi.eval(idx);
      return Sided{moved.side, Elem::tuple({r.elem, moved.elem})};
    }
    Sided rep = psi.eval(idx);  // in class one; fiber runs rep -> idx
    Sijection fib = fiber_sij(rep);
    Sided r = fib.eval(Sided{Side::Codomain, s});
    if (r.side == Side::Codomain)
      return Sided{idx.side, Elem::tuple({r.elem, t})};
    return Sided{rep.side, Elem::tuple({r.elem, rep.elem})};
  }
};

struct CancelOppositeNode final : Node {
  Sijection phi;
  Sided eval(const Sided& v) const override {
    if (v.side == Side::Codomain || !v.elem.is_tagged()) foreign(v);
    std::int64_t tag = v.elem.tag();
    if (tag != 0 && tag != 1)
      throw InterfaceError("cancel: tag out of range: " + v.elem.to_sexpr());
    Side inner = tag == 0 ? Side::Domain : Side::Codomain;
    Sided r = phi.eval(Sided{inner, v.elem.tagged_child()});
    std::int64_t rtag = r.side == Side::Domain ? 0 : 1;
    return Sided{Side::Domain, Elem::tagged(rtag, r.elem)};
  }
};

struct OppositeNode final : Node {
  Sijection phi;
  Sided eval(const Sided& v) const override { return phi.eval(v); }
};

struct InverseNode final : Node {
  Sijection phi;
  Sided eval(const Sided& v) const override {
    Sided r = phi.eval(Sided{other_side(v.side), v.elem});
    return Sided{other_side(r.side), r.elem};
  }
};

struct RuleNode final : Node {
  std::function<Sided(const Sided&)> rule;
  Sided eval(const Sided& v) const override {
    if (!side_set(*this, v.side).contains(v.elem)) foreign(v);
    return rule(v);
  }
};

struct TranslateNode final : Node {
  std::int64_t t = 0;
  Sijection phi;
  Sided eval(const Sided& v) const override {
    Sided r = phi.eval(Sided{v.side, translate_elem(-t, v.elem)});
    return Sided{r.side, translate_elem(t, r.elem)};
  }
};

SignedSet translate_set(std::int64_t t, const SignedSet& s) {
  std::vector<Elem> plus, minus;
  plus.reserve(s.plus().size());
  minus.reserve(s.minus().size());
  for (const Elem& e : s.plus()) plus.push_back(translate_elem(t, e));
  for (const Elem& e : s.minus()) minus.push_back(translate_elem(t, e));
  return SignedSet(std::move(plus), std::move(minus), s.shape());
}

}  // namespace

const SignedSet& Sijection::domain() const { return impl_->dom; }
const SignedSet& Sijection::codomain() const { return impl_->cod; }
Sided Sijection::eval(const Sided& v) const { return impl_->eval(v); }

Sijection identity_sij(const SignedSet& s) { return identity_sij(s, s); }

Sijection identity_sij(const SignedSet& dom, const SignedSet& cod) {
  if (dom != cod)
    throw InterfaceError("identity: domain and codomain differ as values");
  auto n = std::make_shared<IdentityNode>();
  n->dom = dom;
  n->cod = cod;
  return Sijection(std::move(n));
}

Sijection relabel_sij(SignedSet dom, SignedSet cod,
                      std::function<Elem(const Elem&)> fwd,
                      std::function<Elem(const Elem&)> bwd) {
  auto n = std::make_shared<RelabelNode>();
  n->dom = std::move(dom);
  n->cod = std::move(cod);
  n->fwd = std::move(fwd);
  n->bwd = std::move(bwd);
  return Sijection(std::move(n));
}

Sijection finite_map_sij(SignedSet dom, SignedSet cod,
                         std::vector<std::pair<Sided, Sided>> pairs) {
  auto n = std::make_shared<FiniteMapNode>();
  n->dom = std::move(dom);
  n->cod = std::move(cod);
  for (auto& [a, b] : pairs) {
    n->map[a] = b;
    n->map[b] = a;
  }
  std::size_t support = n->dom.support_size() + n->cod.support_size();
  if (n->map.size() != support)
    throw InterfaceError("finite map: pairing does not cover the supports");
  return Sijection(std::move(n));
}

Sijection interval_split(std::int64_t a, std::int64_t b, std::int64_t c) {
  auto n = std::make_shared<SplitNode>();
  n->a = a;
  n->b = b;
  n->c = c;
  n->dom = make_interval(a, b);
  n->cod = disjoint_union({make_interval(a, c), make_interval(c, b)});
  return Sijection(std::move(n));
}

Sijection compose(const Sijection& phi, const Sijection& psi) {
  if (phi.codomain() != psi.domain())
    throw InterfaceError("compose: middle signed sets differ");
  auto n = std::make_shared<ComposeNode>();
  n->dom = phi.domain();
  n->cod = psi.codomain();
  n->f = phi;
  n->g = psi;
  return Sijection(std::move(n));
}

Sijection compose_chain(std::vector<Sijection> chain) {
  if (chain.empty()) throw InterfaceError("compose_chain: empty chain");
  Sijection acc = chain[0];
  for (std::size_t i = 1; i < chain.size(); ++i) acc = compose(acc, chain[i]);
  return acc;
}

Sijection product_sij(std::vector<Sijection> factors) {
  std::vector<SignedSet> doms, cods;
  doms.reserve(factors.size());
  cods.reserve(factors.size());
  for (const Sijection& f : factors) {
    doms.push_back(f.domain());
    cods.push_back(f.codomain());
  }
  auto n = std::make_shared<ProductNode>();
  n->dom = cartesian_product(std::span<const SignedSet>(doms));
  n->cod = cartesian_product(std::span<const SignedSet>(cods));
  n->factors = std::move(factors);
  return Sijection(std::move(n));
}

Sijection union_sij(std::vector<Sijection> parts) {
  std::vector<SignedSet> doms, cods;
  doms.reserve(parts.size());
  cods.reserve(parts.size());
  for (const Sijection& f : parts) {
    doms.push_back(f.domain());
    cods.push_back(f.codomain());
  }
  auto n = std::make_shared<UnionNode>();
  n->dom = disjoint_union(std::span<const SignedSet>(doms));
  n->cod = disjoint_union(std::span<const SignedSet>(cods));
  n->parts = std::move(parts);
  return Sijection(std::move(n));
}

Sijection indexed_union_sij(const Sijection& psi,
                            std::function<SignedSet(const Sided&)> fiber_set,
                            std::function<Sijection(const Sided&)> fiber_sij,
                            bool check_fibers) {
  auto n = std::make_shared<IndexedUnionNode>();
  n->psi = psi;
  n->fiber_set = std::move(fiber_set);
  n->fiber_sij = std::move(fiber_sij);
  n->dom = indexed_union(psi.domain(), [&](const Elem& t) {
    return n->fiber_set(Sided{Side::Domain, t});
  });
  n->cod = indexed_union(psi.codomain(), [&](const Elem& t) {
    return n->fiber_set(Sided{Side::Codomain, t});
  });
  if (check_fibers) {
    auto check_one = [&](const Sided& t) {
      if (!n->in_class_one(t)) return;
      Sijection fib = n->fiber_sij(t);
      if (!fib.valid()) throw InterfaceError("indexed union: missing fiber");
      Sided moved = psi.eval(t);
      if (fib.domain() != n->fiber_set(t) ||
          fib.codomain() != n->fiber_set(moved))
        throw InterfaceError("indexed union: fiber endpoints mismatch at " +
                             t.elem.to_sexpr());
    };
    for (const Elem& t : psi.domain().plus()) check_one({Side::Domain, t});
    for (const Elem& t : psi.domain().minus()) check_one({Side::Domain, t});
    for (const Elem& t : psi.codomain().plus()) check_one({Side::Codomain, t});
    for (const Elem& t : psi.codomain().minus()) check_one({Side::Codomain, t});
  }
  return Sijection(std::move(n));
}

Sijection cancel_opposite(const Sijection& phi) {
  auto n = std::make_shared<CancelOppositeNode>();
  n->dom = disjoint_union({phi.domain(), opposite(phi.codomain())});
  n->cod = SignedSet();
  n->phi = phi;
  return Sijection(std::move(n));
}

Sijection opposite_sij(const Sijection& phi) {
  auto n = std::make_shared<OppositeNode>();
  n->dom = opposite(phi.domain());
  n->cod = opposite(phi.codomain());
  n->phi = phi;
  return Sijection(std::move(n));
}

Sijection inverse_sij(const Sijection& phi) {
  auto n = std::make_shared<InverseNode>();
  n->dom = phi.codomain();
  n->cod = phi.domain();
  n->phi = phi;
  return Sijection(std::move(n));
}

Sijection rule_sij(SignedSet dom, SignedSet cod,
                   std::function<Sided(const Sided&)> rule) {
  auto n = std::make_shared<RuleNode>();
  n->dom = std::move(dom);
  n->cod = std::move(cod);
  n->rule = std::move(rule);
  return Sijection(std::move(n));
}

std::function<Sijection(const Sided&)> oriented_fiber_family(
    std::function<Sijection(const Elem&)> forward) {
  return [forward](const Sided& t) {
    Sijection f = forward(t.elem);
    return t.side == Side::Domain ? f : inverse_sij(f);
  };
}

Sijection translate_sij(std::int64_t t, const Sijection& phi) {
  auto n = std::make_shared<TranslateNode>();
  n->t = t;
  n->phi = phi;
  n->dom = translate_set(t, phi.domain());
  n->cod = translate_set(t, phi.codomain());
  return Sijection(std::move(n));
}

VerifyReport verify_sijection(const Sijection& phi) {
  VerifyReport rep;
  auto fail = [&](const Sided& v, const std::string& why) {
    rep.valid = false;
    rep.issue = why;
    rep.witness = v;
  };
  auto side_of = [&](Side s) -> const SignedSet& {
    return s == Side::Domain ? phi.domain() : phi.codomain();
  };
  auto check = [&](Side side, const Elem& e) {
    if (!rep.valid) return;
    Sided v{side, e};
    ++rep.checked;
    Sided w;
    try {
      w = phi.eval(v);
    } catch (const std::exception& ex) {
      fail(v, std::string("eval failed: ") + ex.what());
      return;
    }
    int vsign = side_of(v.side).sign_of(v.elem);
    int wsign = side_of(w.side).sign_of(w.elem);
    if (wsign == 0) {
      fail(v, "image not in support: " + w.elem.to_sexpr());
      return;
    }
    // class one = S+ u T-; images must land in the other class.
    bool v_one = (v.side == Side::Domain) == (vsign > 0);
    bool w_one = (w.side == Side::Domain) == (wsign > 0);
    if (v_one == w_one) {
      fail(v, "sign condition violated");
      return;
    }
    Sided back = phi.eval(w);
    if (!(back == v)) fail(v, "not an involution");
  };
  for (const Elem& e : phi.domain().plus()) check(Side::Domain, e);
  for (const Elem& e : phi.domain().minus()) check(Side::Domain, e);
  for (const Elem& e : phi.codomain().plus()) check(Side::Codomain, e);
  for (const Elem& e : phi.codomain().minus()) check(Side::Codomain, e);
  return rep;
}

std::vector<GraphEdge> sijection_graph(const Sijection& phi) {
  std::vector<GraphEdge> edges;
  for (const Elem& e : phi.domain().plus()) {
    Sided v{Side::Domain, e};
    edges.push_back({v, phi.eval(v)});
  }
  for (const Elem& e : phi.codomain().minus()) {
    Sided v{Side::Codomain, e};
    edges.push_back({v, phi.eval(v)});
  }
  return edges;
}

std::string graph_dot(const Sijection& phi) {
  // Node ids follow sorted support order per side, so output is stable.
  std::map<Sided, std::string, SidedKey> ids;
  auto assign = [&](Side side, const SignedSet& s) {
    std::size_t i = 0;
    const char* prefix = side == Side::Domain ? "d" : "c";
    std::vector<Elem> all = s.plus();
    all.insert(all.end(), s.minus().begin(), s.minus().end());
    std::sort(all.begin(), all.end());
    for (const Elem& e : all) ids[Sided{side, e}] = prefix + std::to_string(i++);
  };
  assign(Side::Domain, phi.domain());
  assign(Side::Codomain, phi.codomain());
  auto emit_nodes = [&](std::string& out, Side side, const SignedSet& s) {
    auto one = [&](const Elem& e, int sign) {
      Sided v{side, e};
      bool class_one = (side == Side::Domain) == (sign > 0);
      out += "    " + ids[v] + " [label=\"" + e.to_sexpr() +
             (sign > 0 ? " +" : " -") + "\", shape=" +
             (class_one ? "circle" : "box") + "];\n";
    };
    std::vector<Elem> all = s.plus();
    all.insert(all.end(), s.minus().begin(), s.minus().end());
    std::sort(all.begin(), all.end());
    for (const Elem& e : all) one(e, s.sign_of(e));
  };
  std::string out = "graph sijection {\n";
  out += "  subgraph cluster_domain {\n    label=\"domain\";\n";
  emit_nodes(out, Side::Domain, phi.domain());
  out += "  }\n  subgraph cluster_codomain {\n    label=\"codomain\";\n";
  emit_nodes(out, Side::Codomain, phi.codomain());
  out += "  }\n";
  for (const GraphEdge& e : sijection_graph(phi))
    out += "  " + ids[e.a] + " -- " + ids[e.b] + ";\n";
  out += "}\n";
  return out;
}

}  // namespace sij
