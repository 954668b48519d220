#include <set>

#include "flp/lang.hpp"

namespace flp {

namespace {

using Kind = Diagnostic::Kind;

class Validator {
 public:
  Validator(const Program& prog, std::vector<Diagnostic>& diags) : prog_(prog), diags_(diags) {}

  void error(Kind k, SourcePos p, std::string msg) { diags_.push_back({k, p, std::move(msg)}); }

  void check_type(const Type& t, const std::set<std::string>* params, SourcePos pos) {
    switch (t.kind) {
      case Type::Kind::Int: return;
      case Type::Kind::Var:
        if (params && !params->count(t.name))
          error(Kind::Type, pos, "type variable '" + t.name + "' is not a parameter");
        return;
      case Type::Kind::Data: {
        const auto* decl = prog_.find_type(t.name);
        if (!decl) {
          error(Kind::UnknownIdentifier, pos, "unknown type '" + t.name + "'");
          return;
        }
        if (decl->params.size() != t.args.size())
          error(Kind::Arity, pos,
                "type '" + t.name + "' expects " + std::to_string(decl->params.size()) +
                    " argument(s)");
        for (const auto& a : t.args) check_type(a, params, pos);
        return;
      }
    }
  }

  void check_types() {
    std::set<std::string> names, ctors;
    for (const auto& t : prog_.types) {
      if (!names.insert(t.name).second)
        error(Kind::Duplicate, t.pos, "duplicate type '" + t.name + "'");
      std::set<std::string> params;
      for (const auto& p : t.params)
        if (!params.insert(p).second)
          error(Kind::Duplicate, t.pos, "duplicate type parameter '" + p + "'");
      for (const auto& c : t.ctors) {
        if (!ctors.insert(c.name).second)
          error(Kind::Duplicate, c.pos, "duplicate constructor '" + c.name + "'");
        for (const auto& a : c.args) check_type(a, &params, c.pos);
      }
    }
  }

  // Collects pattern variables, checking constructors and linearity.
  void check_pattern(const Pattern& p, std::vector<std::string>& vars) {
    switch (p.kind) {
      case Pattern::Kind::Var:
        for (const auto& v : vars)
          if (v == p.name) {
            error(Kind::Scope, p.pos, "variable '" + p.name + "' bound twice in pattern");
            return;
          }
        vars.push_back(p.name);
        return;
      case Pattern::Kind::Wildcard:
      case Pattern::Kind::Int: return;
      case Pattern::Kind::Ctor: {
        auto [type, ctor] = prog_.find_ctor(p.name);
        if (!ctor) {
          error(Kind::UnknownIdentifier, p.pos, "unknown constructor '" + p.name + "'");
        } else if (ctor->args.size() != p.args.size()) {
          error(Kind::Arity, p.pos,
                "constructor '" + p.name + "' expects " + std::to_string(ctor->args.size()) +
                    " argument(s), got " + std::to_string(p.args.size()));
        }
        for (const auto& a : p.args) check_pattern(a, vars);
        return;
      }
    }
  }

  bool in_scope(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (*it == name) return true;
    return false;
  }

  std::vector<LetBinding> resolve_bindings(const std::vector<LetBinding>& binds) {
    std::vector<std::string> vars;
    for (const auto& b : binds) check_pattern(b.lhs, vars);
    scope_.insert(scope_.end(), vars.begin(), vars.end());
    std::vector<LetBinding> out;
    for (const auto& b : binds) out.push_back({b.lhs, resolve(b.rhs)});
    return out;
  }

  void pop_scope(std::size_t mark) { scope_.resize(mark); }

  ExprPtr resolve(const ExprPtr& e) {
    if (!e) return e;
    auto out = std::make_shared<Expr>(*e);
    switch (e->kind) {
      case Expr::Kind::Int:
      case Expr::Kind::Failed:
      case Expr::Kind::Var: break;
      case Expr::Kind::Ctor: {
        auto [type, ctor] = prog_.find_ctor(e->name);
        if (!ctor)
          error(Kind::UnknownIdentifier, e->pos, "unknown constructor '" + e->name + "'");
        else if (ctor->args.size() != e->args.size())
          error(Kind::Arity, e->pos,
                "constructor '" + e->name + "' expects " + std::to_string(ctor->args.size()) +
                    " argument(s), got " + std::to_string(e->args.size()));
        break;
      }
      case Expr::Kind::Call: {
        if (in_scope(e->name)) {
          if (!e->args.empty())
            error(Kind::Arity, e->pos, "variable '" + e->name + "' cannot be applied");
          out->kind = Expr::Kind::Var;
          break;
        }
        if (const auto* op = prog_.find_op(e->name)) {
          if (op->arity() != e->args.size())
            error(Kind::Arity, e->pos,
                  "operation '" + e->name + "' expects " + std::to_string(op->arity()) +
                      " argument(s), got " + std::to_string(e->args.size()));
          break;
        }
        if (e->name == kIfThen && prog_.desugared) break;
        if (auto p = prefix_prim(e->name)) {
          if (static_cast<std::size_t>(prim_arity(*p)) != e->args.size())
            error(Kind::Arity, e->pos,
                  "'" + e->name + "' expects " + std::to_string(prim_arity(*p)) + " argument(s)");
          out->kind = Expr::Kind::Prim;
          out->prim = *p;
          break;
        }
        error(Kind::UnknownIdentifier, e->pos, "unknown identifier '" + e->name + "'");
        break;
      }
      case Expr::Kind::Prim:
      case Expr::Kind::Choice:
      case Expr::Kind::If: break;
      case Expr::Kind::Case: {
        out->args[0] = resolve(e->args[0]);
        for (auto& alt : out->alts) {
          std::vector<std::string> vars;
          check_pattern(alt.pattern, vars);
          for (const auto& a : alt.pattern.args)
            if (a.kind == Pattern::Kind::Ctor || a.kind == Pattern::Kind::Int)
              error(Kind::Syntax, a.pos, "case patterns must be flat");
          auto mark = scope_.size();
          scope_.insert(scope_.end(), vars.begin(), vars.end());
          alt.body = resolve(alt.body);
          pop_scope(mark);
        }
        return out;
      }
      case Expr::Kind::Let: {
        auto mark = scope_.size();
        out->bindings = resolve_bindings(e->bindings);
        out->args[0] = resolve(e->args[0]);
        pop_scope(mark);
        return out;
      }
    }
    for (auto& a : out->args) a = resolve(a);
    return out;
  }

  void check_ops(Program& prog) {
    std::set<std::string> reserved = {"failed"};
    if (!prog.desugared) reserved.insert(kIfThen);
    for (auto& op : prog.ops) {
      if (reserved.count(op.name))
        error(Kind::Duplicate, op.pos, "'" + op.name + "' is reserved");
      const auto* sig = prog.find_signature(op.name);
      if (sig && sig->params.size() != op.arity())
        error(Kind::Arity, op.pos,
              "'" + op.name + "' has " + std::to_string(op.arity()) +
                  " parameter(s) but its signature has " + std::to_string(sig->params.size()));
      for (auto& r : op.rules) {
        if (r.params.size() != op.arity())
          error(Kind::Arity, r.pos, "rules of '" + op.name + "' differ in arity");
        std::vector<std::string> vars;
        for (const auto& p : r.params) check_pattern(p, vars);
        scope_ = vars;
        auto mark = scope_.size();
        r.where = resolve_bindings(r.where);
        if (r.guard) r.guard = resolve(r.guard);
        r.body = resolve(r.body);
        pop_scope(mark);
        scope_.clear();
      }
    }
    for (const auto& [name, sig] : prog.signatures) {
      if (!prog.find_op(name))
        error(Kind::Scope, sig.pos, "signature for undefined operation '" + name + "'");
      for (const auto& t : sig.params) check_type(t, nullptr, sig.pos);
      check_type(sig.result, nullptr, sig.pos);
    }
  }

  void check_props(const Program& prog) {
    std::set<std::string> names;
    for (const auto& p : prog.props) {
      if (!names.insert(p.name).second)
        error(Kind::Duplicate, p.pos, "duplicate property '" + p.name + "'");
      const Signature* sigs[2] = {nullptr, nullptr};
      const std::string* ops[2] = {&p.lhs, &p.rhs};
      for (int i = 0; i < 2; ++i) {
        if (!prog.find_op(*ops[i])) {
          error(Kind::Property, p.pos, "property '" + p.name + "' refers to unknown operation '" +
                                           *ops[i] + "'");
          continue;
        }
        sigs[i] = prog.find_signature(*ops[i]);
        if (!sigs[i])
          error(Kind::Property, p.pos, "operation '" + *ops[i] + "' needs a type signature");
      }
      if (sigs[0] && sigs[1] && !alpha_equivalent(*sigs[0], *sigs[1]))
        error(Kind::Property, p.pos,
              "property '" + p.name + "' compares operations of different types");
    }
  }

 private:
  const Program& prog_;
  std::vector<Diagnostic>& diags_;
  std::vector<std::string> scope_;
};

}  // namespace

std::vector<Diagnostic> validate(Program& program) {
  std::vector<Diagnostic> diags;
  Validator v(program, diags);
  v.check_types();
  v.check_ops(program);
  v.check_props(program);
  return diags;
}

ExprPtr resolve_closed_expr(const ExprPtr& e, const Program& prog, std::vector<Diagnostic>& diags) {
  Validator v(prog, diags);
  return v.resolve(e);
}

}  // namespace flp
