#include "flp/ast.hpp"

#include <algorithm>

namespace flp {

int prim_arity(Prim p) { return p == Prim::Not ? 1 : 2; }

const char* prim_symbol(Prim p) {
  switch (p) {
    case Prim::Add: return "+";
    case Prim::Sub: return "-";
    case Prim::Mul: return "*";
    case Prim::Div: return "div";
    case Prim::Mod: return "mod";
    case Prim::Eq: return "==";
    case Prim::Ne: return "/=";
    case Prim::Lt: return "<";
    case Prim::Le: return "<=";
    case Prim::Gt: return ">";
    case Prim::Ge: return ">=";
    case Prim::And: return "&&";
    case Prim::Or: return "||";
    case Prim::Not: return "not";
  }
  return "?";
}

std::optional<Prim> prefix_prim(const std::string& name) {
  if (name == "div") return Prim::Div;
  if (name == "mod") return Prim::Mod;
  if (name == "not") return Prim::Not;
  return std::nullopt;
}

namespace mk {
namespace {
std::shared_ptr<Expr> node(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}
}  // namespace

ExprPtr var(std::string name) {
  auto e = node(Expr::Kind::Var);
  e->name = std::move(name);
  return e;
}
ExprPtr integer(std::int64_t v) {
  auto e = node(Expr::Kind::Int);
  e->value = v;
  return e;
}
ExprPtr ctor(std::string name, std::vector<ExprPtr> args) {
  auto e = node(Expr::Kind::Ctor);
  e->name = std::move(name);
  e->args = std::move(args);
  return e;
}
ExprPtr call(std::string name, std::vector<ExprPtr> args) {
  auto e = node(Expr::Kind::Call);
  e->name = std::move(name);
  e->args = std::move(args);
  return e;
}
ExprPtr prim(Prim p, std::vector<ExprPtr> args) {
  auto e = node(Expr::Kind::Prim);
  e->prim = p;
  e->args = std::move(args);
  return e;
}
ExprPtr choice(ExprPtr a, ExprPtr b) {
  auto e = node(Expr::Kind::Choice);
  e->args = {std::move(a), std::move(b)};
  return e;
}
ExprPtr failed() { return node(Expr::Kind::Failed); }
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr f) {
  auto e = node(Expr::Kind::If);
  e->args = {std::move(c), std::move(t), std::move(f)};
  return e;
}
ExprPtr case_(ExprPtr scrutinee, std::vector<Alt> alts) {
  auto e = node(Expr::Kind::Case);
  e->args = {std::move(scrutinee)};
  e->alts = std::move(alts);
  return e;
}
ExprPtr let(std::vector<LetBinding> bindings, ExprPtr body) {
  auto e = node(Expr::Kind::Let);
  e->bindings = std::move(bindings);
  e->args = {std::move(body)};
  return e;
}
}  // namespace mk

const TypeDecl* Program::find_type(const std::string& name) const {
  for (const auto& t : types)
    if (t.name == name) return &t;
  return nullptr;
}

const OpDecl* Program::find_op(const std::string& name) const {
  for (const auto& o : ops)
    if (o.name == name) return &o;
  return nullptr;
}

OpDecl* Program::find_op(const std::string& name) {
  for (auto& o : ops)
    if (o.name == name) return &o;
  return nullptr;
}

const Signature* Program::find_signature(const std::string& name) const {
  auto it = signatures.find(name);
  return it == signatures.end() ? nullptr : &it->second;
}

std::pair<const TypeDecl*, const CtorDecl*> Program::find_ctor(const std::string& name) const {
  for (const auto& t : types)
    for (const auto& c : t.ctors)
      if (c.name == name) return {&t, &c};
  return {nullptr, nullptr};
}

bool structurally_equal(const Pattern& a, const Pattern& b) {
  if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(a.args[i], b.args[i])) return false;
  return true;
}

namespace {
bool equal_ptr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool equal_bindings(const std::vector<LetBinding>& a, const std::vector<LetBinding>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(a[i].lhs, b[i].lhs) || !equal_ptr(a[i].rhs, b[i].rhs)) return false;
  return true;
}
}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.value != b.value) return false;
  if (a.kind == Expr::Kind::Prim && a.prim != b.prim) return false;
  if (a.args.size() != b.args.size() || a.alts.size() != b.alts.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal_ptr(a.args[i], b.args[i])) return false;
  for (std::size_t i = 0; i < a.alts.size(); ++i)
    if (!structurally_equal(a.alts[i].pattern, b.alts[i].pattern) ||
        !equal_ptr(a.alts[i].body, b.alts[i].body))
      return false;
  return equal_bindings(a.bindings, b.bindings);
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.types.size() != b.types.size() || a.ops.size() != b.ops.size() ||
      a.props.size() != b.props.size() || a.signatures != b.signatures)
    return false;
  for (std::size_t i = 0; i < a.types.size(); ++i) {
    const auto& x = a.types[i];
    const auto& y = b.types[i];
    if (x.name != y.name || x.params != y.params || x.ctors.size() != y.ctors.size()) return false;
    for (std::size_t j = 0; j < x.ctors.size(); ++j)
      if (x.ctors[j].name != y.ctors[j].name || x.ctors[j].args != y.ctors[j].args) return false;
  }
  for (std::size_t i = 0; i < a.ops.size(); ++i) {
    const auto& x = a.ops[i];
    const auto& y = b.ops[i];
    if (x.name != y.name || x.rules.size() != y.rules.size()) return false;
    for (std::size_t j = 0; j < x.rules.size(); ++j) {
      const auto& r = x.rules[j];
      const auto& s = y.rules[j];
      if (r.params.size() != s.params.size()) return false;
      for (std::size_t k = 0; k < r.params.size(); ++k)
        if (!structurally_equal(r.params[k], s.params[k])) return false;
      if (!equal_ptr(r.guard, s.guard) || !equal_ptr(r.body, s.body) ||
          !equal_bindings(r.where, s.where))
        return false;
    }
  }
  for (std::size_t i = 0; i < a.props.size(); ++i) {
    const auto& x = a.props[i];
    const auto& y = b.props[i];
    if (x.name != y.name || x.annotation != y.annotation || x.lhs != y.lhs || x.rhs != y.rhs)
      return false;
  }
  return true;
}

namespace {
bool alpha_types(const Type& a, const Type& b, std::map<std::string, std::string>& fwd,
                 std::map<std::string, std::string>& bwd) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Type::Kind::Int: return true;
    case Type::Kind::Var: {
      auto [fi, fnew] = fwd.emplace(a.name, b.name);
      auto [bi, bnew] = bwd.emplace(b.name, a.name);
      return fi->second == b.name && bi->second == a.name;
    }
    case Type::Kind::Data:
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!alpha_types(a.args[i], b.args[i], fwd, bwd)) return false;
      return true;
  }
  return false;
}
}  // namespace

bool alpha_equivalent(const Signature& a, const Signature& b) {
  if (a.params.size() != b.params.size()) return false;
  std::map<std::string, std::string> fwd, bwd;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (!alpha_types(a.params[i], b.params[i], fwd, bwd)) return false;
  return alpha_types(a.result, b.result, fwd, bwd);
}

}  // namespace flp
