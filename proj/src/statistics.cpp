#include "sij/statistics.hpp"

#include <algorithm>

namespace sij {

StatValue StatValue::integer(std::int64_t v) {
  StatValue s;
  s.kind_ = Kind::Int;
  s.int_ = v;
  return s;
}

StatValue StatValue::seq(std::vector<std::int64_t> v) {
  StatValue s;
  s.kind_ = Kind::Seq;
  s.seq_ = std::move(v);
  return s;
}

StatValue StatValue::multiset_seq(std::vector<std::vector<std::int64_t>> v) {
  StatValue s;
  s.kind_ = Kind::MultisetSeq;
  for (auto& m : v) std::sort(m.begin(), m.end());
  s.mseq_ = std::move(v);
  return s;
}

StatValue StatValue::tuple(std::vector<StatValue> v) {
  StatValue s;
  s.kind_ = Kind::Tuple;
  s.tuple_ = std::move(v);
  return s;
}

std::int64_t StatValue::as_int() const {
  if (kind_ != Kind::Int) throw std::logic_error("StatValue: not an int");
  return int_;
}

const std::vector<std::int64_t>& StatValue::as_seq() const {
  if (kind_ != Kind::Seq) throw std::logic_error("StatValue: not a seq");
  return seq_;
}

const std::vector<std::vector<std::int64_t>>& StatValue::as_multiset_seq()
    const {
  if (kind_ != Kind::MultisetSeq)
    throw std::logic_error("StatValue: not a multiset seq");
  return mseq_;
}

const std::vector<StatValue>& StatValue::as_tuple() const {
  if (kind_ != Kind::Tuple) throw std::logic_error("StatValue: not a tuple");
  return tuple_;
}

bool StatValue::operator==(const StatValue& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case Kind::Int: return int_ == o.int_;
    case Kind::Seq: return seq_ == o.seq_;
    case Kind::MultisetSeq: return mseq_ == o.mseq_;
    case Kind::Tuple: return tuple_ == o.tuple_;
  }
  return false;
}

std::string StatValue::to_string() const {
  switch (kind_) {
    case Kind::Int:
      return std::to_string(int_);
    case Kind::Seq: {
      std::string out = "[";
      for (std::size_t i = 0; i < seq_.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(seq_[i]);
      }
      return out + "]";
    }
    case Kind::MultisetSeq: {
      std::string out = "[";
      for (std::size_t i = 0; i < mseq_.size(); ++i) {
        if (i) out += ",";
        out += "[";
        for (std::size_t j = 0; j < mseq_[i].size(); ++j) {
          if (j) out += ",";
          out += std::to_string(mseq_[i][j]);
        }
        out += "]";
      }
      return out + "]";
    }
    case Kind::Tuple: {
      std::string out = "[";
      for (std::size_t i = 0; i < tuple_.size(); ++i) {
        if (i) out += ",";
        out += tuple_[i].to_string();
      }
      return out + "]";
    }
  }
  return "";
}

CompatReport check_compatibility(const Sijection& phi, const Statistic& eta) {
  CompatReport rep;
  auto check = [&](Side side, const Elem& e) {
    if (!rep.compatible) return;
    ++rep.checked;
    Sided v{side, e};
    Sided w = phi.eval(v);
    StatValue a = eta(v.side, v.elem);
    StatValue b = eta(w.side, w.elem);
    if (!(a == b)) {
      rep.compatible = false;
      rep.witness = v;
      rep.detail = eta.name + ": " + a.to_string() + " vs " + b.to_string() +
                   " at " + e.to_sexpr();
    }
  };
  for (const Elem& e : phi.domain().plus()) check(Side::Domain, e);
  for (const Elem& e : phi.domain().minus()) check(Side::Domain, e);
  for (const Elem& e : phi.codomain().plus()) check(Side::Codomain, e);
  for (const Elem& e : phi.codomain().minus()) check(Side::Codomain, e);
  return rep;
}

namespace {

StatValue eval_shape(const NormalShape& shape, const Elem& e) {
  switch (shape.kind) {
    case NormalShape::Kind::Interval:
      return StatValue::integer(e.atom_value());
    case NormalShape::Kind::Union: {
      std::int64_t tag = e.tag();
      if (tag < 0 || tag >= static_cast<std::int64_t>(shape.parts.size()))
        throw InterfaceError("normal statistic: tag out of range");
      return eval_shape(*shape.parts[tag], e.tagged_child());
    }
    case NormalShape::Kind::Product: {
      std::vector<StatValue> coords;
      if (!e.is_unit()) {
        const auto& kids = e.children();
        if (kids.size() != shape.parts.size())
          throw InterfaceError("normal statistic: arity mismatch");
        for (std::size_t i = 0; i < kids.size(); ++i)
          coords.push_back(eval_shape(*shape.parts[i], kids[i]));
      }
      return StatValue::tuple(std::move(coords));
    }
    case NormalShape::Kind::FiberForget:
      return eval_shape(*shape.fiber, e.children()[0]);
  }
  throw std::logic_error("normal statistic: bad shape");
}

}  // namespace

Statistic normal_statistic(const SignedSet& s) {
  auto shape = s.shape();
  if (shape == nullptr)
    throw InterfaceError("normal statistic requires normal provenance");
  return Statistic{"normal", [shape](Side, const Elem& e) {
                     return eval_shape(*shape, e);
                   }};
}

Statistic normal_statistic(const SignedSet& dom, const SignedSet& cod) {
  auto ds = dom.shape(), cs = cod.shape();
  if (ds == nullptr || cs == nullptr)
    throw InterfaceError("normal statistic requires normal provenance");
  return Statistic{"normal", [ds, cs](Side side, const Elem& e) {
                     return eval_shape(side == Side::Domain ? *ds : *cs, e);
                   }};
}

Statistic pair_statistic(const Statistic& a, const Statistic& b) {
  return Statistic{"(" + a.name + "," + b.name + ")",
                   [a, b](Side s, const Elem& e) {
                     return StatValue::tuple({a(s, e), b(s, e)});
                   }};
}

Statistic union_statistic(const Statistic& a, const Statistic& b) {
  return Statistic{a.name + "|" + b.name, [a, b](Side s, const Elem& e) {
                     std::int64_t tag = e.tag();
                     if (tag == 0) return a(s, e.tagged_child());
                     if (tag == 1) return b(s, e.tagged_child());
                     throw InterfaceError("union statistic: tag out of range");
                   }};
}

SignedSet restrict_by_stat(const SignedSet& s, const Statistic& eta, Side side,
                           const StatValue& value) {
  return restrict_set(
      s, [&](const Elem& e) { return eta(side, e) == value; });
}

Sijection restrict_sij(const Sijection& phi, const Statistic& eta,
                       const StatValue& value) {
  SignedSet dom = restrict_by_stat(phi.domain(), eta, Side::Domain, value);
  SignedSet cod = restrict_by_stat(phi.codomain(), eta, Side::Codomain, value);
  return rule_sij(std::move(dom), std::move(cod),
                  [phi](const Sided& v) { return phi.eval(v); });
}

}  // namespace sij
