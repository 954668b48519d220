#include "flp/partial.hpp"

#include <stdexcept>

#include "flp/lang.hpp"

namespace flp {

bool PartialValue::is_total() const {
  if (kind == Kind::Bottom) return false;
  for (const auto& a : args)
    if (!a.is_total()) return false;
  return true;
}

int PartialValue::size() const {
  if (kind == Kind::Bottom) return 0;
  int n = 1;
  for (const auto& a : args) n += a.size();
  return n;
}

bool operator==(const PartialValue& a, const PartialValue& b) {
  return a.kind == b.kind && a.value == b.value && a.name == b.name && a.args == b.args;
}

bool operator<(const PartialValue& a, const PartialValue& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.value != b.value) return a.value < b.value;
  if (a.name != b.name) return a.name < b.name;
  return a.args < b.args;
}

std::vector<std::int64_t> integer_ring(int n) {
  std::vector<std::int64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(i % 2 ? (i + 1) / 2 : -(i / 2));
  return out;
}

Type instantiate(const Type& t) {
  if (t.kind == Type::Kind::Var) return Type::data(kThreeValued);
  Type out = t;
  for (auto& a : out.args) a = instantiate(a);
  return out;
}

int weight(const PartialValue& v, const std::vector<std::int64_t>& ring) {
  switch (v.kind) {
    case PartialValue::Kind::Bottom: return 0;
    case PartialValue::Kind::Int:
      for (std::size_t i = 0; i < ring.size(); ++i)
        if (ring[i] == v.value) return static_cast<int>(i) + 1;
      return static_cast<int>(ring.size()) + 1;
    case PartialValue::Kind::Ctor: {
      int w = 1;
      for (const auto& a : v.args) w += weight(a, ring);
      return w;
    }
  }
  return 0;
}

namespace {

Type substitute(const Type& t, const std::vector<std::string>& params,
                const std::vector<Type>& actual) {
  if (t.kind == Type::Kind::Var) {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] == t.name) return actual[i];
    return instantiate(t);
  }
  Type out = t;
  for (auto& a : out.args) a = substitute(a, params, actual);
  return out;
}

}  // namespace

PartialEnumerator::PartialEnumerator(const Program& program, std::vector<std::int64_t> ring)
    : program_(program), ring_(std::move(ring)) {}

const std::vector<PartialValue>& PartialEnumerator::of_weight(const Type& type0, int w) {
  Type type = instantiate(type0);
  auto key = std::make_pair(pretty(type), w);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::vector<PartialValue> out;
  if (w == 0) {
    out.push_back(PartialValue::bottom());
  } else if (type.kind == Type::Kind::Int) {
    if (static_cast<std::size_t>(w) <= ring_.size())
      out.push_back(PartialValue::integer(ring_[w - 1]));
  } else {
    const auto* decl = program_.find_type(type.name);
    if (!decl) throw std::invalid_argument("unknown type '" + type.name + "'");
    for (const auto& c : decl->ctors) {
      std::vector<Type> arg_types;
      for (const auto& a : c.args) arg_types.push_back(substitute(a, decl->params, type.args));
      for (auto& children : tuples_of_weight(arg_types, w - 1))
        out.push_back(PartialValue::ctor(c.name, std::move(children)));
    }
  }
  return memo_.emplace(key, std::move(out)).first->second;
}

std::vector<std::vector<PartialValue>> PartialEnumerator::tuples_of_weight(
    const std::vector<Type>& types, int w) {
  std::vector<std::vector<PartialValue>> out;
  std::vector<PartialValue> cur;
  products(types, 0, w, cur, out);
  return out;
}

void PartialEnumerator::products(const std::vector<Type>& types, std::size_t i, int w,
                                 std::vector<PartialValue>& cur,
                                 std::vector<std::vector<PartialValue>>& out) {
  if (i == types.size()) {
    if (w == 0) out.push_back(cur);
    return;
  }
  if (i + 1 == types.size()) {
    for (const auto& v : of_weight(types[i], w)) {
      cur.push_back(v);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (int wi = 0; wi <= w; ++wi) {
    for (const auto& v : of_weight(types[i], wi)) {
      cur.push_back(v);
      products(types, i + 1, w - wi, cur, out);
      cur.pop_back();
    }
  }
}

std::vector<PartialValue> enumerate_partial_values(const Program& program, const LevelPlan& plan) {
  PartialEnumerator en(program, plan.integer_ring);
  std::vector<PartialValue> out;
  for (int w = 0; w <= plan.max_level; ++w) {
    const auto& vs = en.of_weight(plan.type, w);
    out.insert(out.end(), vs.begin(), vs.end());
  }
  return out;
}

ExprPtr partial_to_expr(const PartialValue& t) {
  switch (t.kind) {
    case PartialValue::Kind::Bottom: return mk::failed();
    case PartialValue::Kind::Int: return mk::integer(t.value);
    case PartialValue::Kind::Ctor: {
      std::vector<ExprPtr> args;
      for (const auto& a : t.args) args.push_back(partial_to_expr(a));
      return mk::ctor(t.name, std::move(args));
    }
  }
  return mk::failed();
}

std::string render(const PartialValue& t) { return pretty(*partial_to_expr(t)); }

bool less_defined_or_equal(const PartialValue& t, const PartialValue& u) {
  if (t.is_bottom()) return true;
  if (t.kind != u.kind || t.value != u.value || t.name != u.name || t.args.size() != u.args.size())
    return false;
  for (std::size_t i = 0; i < t.args.size(); ++i)
    if (!less_defined_or_equal(t.args[i], u.args[i])) return false;
  return true;
}

bool less_defined(const PartialValue& t, const PartialValue& u) {
  return t != u && less_defined_or_equal(t, u);
}

std::vector<PartialValue> downward_closure(const PartialValue& t) {
  std::vector<PartialValue> out{PartialValue::bottom()};
  if (t.is_bottom()) return out;
  if (t.kind == PartialValue::Kind::Int) {
    out.push_back(t);
    return out;
  }
  std::vector<std::vector<PartialValue>> partial{{}};
  for (const auto& a : t.args) {
    auto below = downward_closure(a);
    std::vector<std::vector<PartialValue>> next;
    for (const auto& prefix : partial)
      for (const auto& b : below) {
        next.push_back(prefix);
        next.back().push_back(b);
      }
    partial = std::move(next);
  }
  for (auto& args : partial) out.push_back(PartialValue::ctor(t.name, std::move(args)));
  return out;
}

}  // namespace flp
