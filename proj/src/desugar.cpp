#include "flp/lang.hpp"

namespace flp {

namespace {

bool binds(const Pattern& p, const std::string& v) {
  if (p.kind == Pattern::Kind::Var) return p.name == v;
  for (const auto& a : p.args)
    if (binds(a, v)) return true;
  return false;
}

void pattern_vars(const Pattern& p, std::vector<std::string>& out) {
  if (p.kind == Pattern::Kind::Var) out.push_back(p.name);
  for (const auto& a : p.args) pattern_vars(a, out);
}

class Desugarer {
 public:
  ExprPtr expr(const ExprPtr& e) {
    if (!e) return e;
    auto out = std::make_shared<Expr>(*e);
    for (auto& a : out->args) a = expr(a);
    for (auto& alt : out->alts) alt.body = expr(alt.body);
    if (e->kind == Expr::Kind::Let) out->bindings = bindings(e->bindings);
    return out;
  }

  std::vector<LetBinding> bindings(const std::vector<LetBinding>& in) {
    std::vector<LetBinding> out;
    for (const auto& b : in) {
      auto rhs = expr(b.rhs);
      if (b.lhs.kind == Pattern::Kind::Var) {
        out.push_back({b.lhs, rhs});
        continue;
      }
      auto shared = fresh();
      out.push_back({Pattern::var(shared), rhs});
      std::vector<std::string> vars;
      pattern_vars(b.lhs, vars);
      for (const auto& v : vars) out.push_back({Pattern::var(v), select(b.lhs, mk::var(shared), v)});
    }
    return out;
  }

 private:
  int counter_ = 0;

  std::string fresh() { return "_p" + std::to_string(++counter_); }

  // Lazy projection of variable `v` out of `scrut` matched against `p`.
  ExprPtr select(const Pattern& p, ExprPtr scrut, const std::string& v) {
    if (p.kind == Pattern::Kind::Var) return scrut;
    std::vector<Pattern> flat;
    std::size_t hit = 0;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < p.args.size(); ++i) {
      names.push_back(fresh());
      flat.push_back(Pattern::var(names.back()));
      if (binds(p.args[i], v)) hit = i;
    }
    auto body = select(p.args[hit], mk::var(names[hit]), v);
    return mk::case_(std::move(scrut), {Alt{Pattern::ctor(p.name, std::move(flat)), body}});
  }
};

}  // namespace

Program desugar(const Program& program) {
  if (program.desugared) return program;
  Program out = program;
  Desugarer d;
  for (auto& op : out.ops) {
    for (auto& r : op.rules) {
      ExprPtr body = r.body;
      if (r.guard) body = mk::call(kIfThen, {r.guard, body});
      if (!r.where.empty()) body = mk::let(r.where, body);
      r.body = d.expr(body);
      r.guard = nullptr;
      r.where.clear();
    }
  }
  OpDecl ifthen;
  ifthen.name = kIfThen;
  Rule r;
  r.op = kIfThen;
  r.params = {Pattern::ctor("True"), Pattern::var("x")};
  r.body = mk::var("x");
  ifthen.rules.push_back(std::move(r));
  out.ops.push_back(std::move(ifthen));
  out.signatures[kIfThen] = Signature{{Type::data("Bool"), Type::var("a")}, Type::var("a"), {}};
  out.desugared = true;
  return out;
}

}  // namespace flp
