#include <sstream>

#include "flp/lang.hpp"

namespace flp {

namespace {

// Precedence of the node's outermost construct; 10 is application, 11 atoms.
int prec_of(Prim p) {
  switch (p) {
    case Prim::Or: return 2;
    case Prim::And: return 3;
    case Prim::Eq:
    case Prim::Ne:
    case Prim::Lt:
    case Prim::Le:
    case Prim::Gt:
    case Prim::Ge: return 4;
    case Prim::Add:
    case Prim::Sub: return 6;
    case Prim::Mul: return 7;
    default: return 10;
  }
}

bool is_list(const Expr& e) {
  const Expr* cur = &e;
  while (cur->kind == Expr::Kind::Ctor && cur->name == "Cons" && cur->args.size() == 2)
    cur = cur->args[1].get();
  return cur->kind == Expr::Kind::Ctor && cur->name == "Nil";
}

bool is_list(const Pattern& p) {
  const Pattern* cur = &p;
  while (cur->kind == Pattern::Kind::Ctor && cur->name == "Cons" && cur->args.size() == 2)
    cur = &cur->args[1];
  return cur->kind == Pattern::Kind::Ctor && cur->name == "Nil";
}

std::string paren_if(bool b, std::string s) { return b ? "(" + s + ")" : s; }

void print(const Expr& e, int ctx, std::ostream& os);

void print_bindings(const std::vector<LetBinding>& binds, std::ostream& os) {
  for (std::size_t i = 0; i < binds.size(); ++i) {
    if (i) os << "; ";
    os << pretty(binds[i].lhs) << " = ";
    print(*binds[i].rhs, 1, os);
  }
}

std::string str(const Expr& e, int ctx) {
  std::ostringstream os;
  print(e, ctx, os);
  return os.str();
}

void print(const Expr& e, int ctx, std::ostream& os) {
  switch (e.kind) {
    case Expr::Kind::Var: os << e.name; return;
    case Expr::Kind::Int: os << paren_if(e.value < 0 && ctx > 0, std::to_string(e.value)); return;
    case Expr::Kind::Failed: os << "failed"; return;
    case Expr::Kind::Ctor:
      if (e.name == "Cons" && e.args.size() == 2) {
        if (is_list(e)) {
          os << "[";
          const Expr* cur = &e;
          bool first = true;
          while (cur->name == "Cons") {
            if (!first) os << ", ";
            first = false;
            print(*cur->args[0], 0, os);
            cur = cur->args[1].get();
          }
          os << "]";
          return;
        }
        os << "(" << str(*e.args[0], 6) << " : " << str(*e.args[1], 6) << ")";
        return;
      }
      if (e.name == "Pair" && e.args.size() == 2) {
        os << "(" << str(*e.args[0], 0) << ", " << str(*e.args[1], 0) << ")";
        return;
      }
      if (e.name == "Nil") {
        os << "[]";
        return;
      }
      [[fallthrough]];
    case Expr::Kind::Call: {
      std::string s = e.name;
      for (const auto& a : e.args) s += " " + str(*a, 11);
      os << paren_if(!e.args.empty() && ctx > 10, s);
      return;
    }
    case Expr::Kind::Prim: {
      int p = prec_of(e.prim);
      if (p == 10) {
        std::string s = prim_symbol(e.prim);
        for (const auto& a : e.args) s += " " + str(*a, 11);
        os << paren_if(ctx > 10, s);
        return;
      }
      bool right = e.prim == Prim::And || e.prim == Prim::Or;
      bool nonassoc = p == 4;
      int lp = right || nonassoc ? p + 1 : p;
      int rp = right ? p : p + 1;
      os << paren_if(ctx > p, str(*e.args[0], lp) + " " + prim_symbol(e.prim) + " " +
                                  str(*e.args[1], rp));
      return;
    }
    case Expr::Kind::Choice:
      os << paren_if(ctx > 0, str(*e.args[0], 1) + " ? " + str(*e.args[1], 0));
      return;
    case Expr::Kind::If: {
      std::string s = "if " + str(*e.args[0], 0) + " then " + str(*e.args[1], 0) + " else " +
                      str(*e.args[2], 0);
      os << paren_if(ctx > 0, s);
      return;
    }
    case Expr::Kind::Case: {
      std::ostringstream s;
      s << "case " << str(*e.args[0], 0) << " of ";
      for (std::size_t i = 0; i < e.alts.size(); ++i) {
        if (i) s << "; ";
        s << pretty(e.alts[i].pattern) << " -> ";
        print(*e.alts[i].body, 1, s);
      }
      os << paren_if(ctx > 0, s.str());
      return;
    }
    case Expr::Kind::Let: {
      std::ostringstream s;
      s << "let ";
      print_bindings(e.bindings, s);
      s << " in " << str(*e.args[0], 0);
      os << paren_if(ctx > 0, s.str());
      return;
    }
  }
}

std::string pat(const Pattern& p, bool arg) {
  switch (p.kind) {
    case Pattern::Kind::Var: return p.name;
    case Pattern::Kind::Wildcard: return "_";
    case Pattern::Kind::Int: return paren_if(arg && p.value < 0, std::to_string(p.value));
    case Pattern::Kind::Ctor:
      if (p.name == "Cons" && p.args.size() == 2) {
        if (is_list(p)) {
          std::string s = "[";
          const Pattern* cur = &p;
          while (cur->name == "Cons") {
            if (cur != &p) s += ", ";
            s += pat(cur->args[0], false);
            cur = &cur->args[1];
          }
          return s + "]";
        }
        return "(" + pat(p.args[0], true) + " : " + pat(p.args[1], false) + ")";
      }
      if (p.name == "Pair" && p.args.size() == 2)
        return "(" + pat(p.args[0], false) + ", " + pat(p.args[1], false) + ")";
      if (p.name == "Nil") return "[]";
      {
        std::string s = p.name;
        for (const auto& a : p.args) s += " " + pat(a, true);
        return paren_if(arg && !p.args.empty(), s);
      }
  }
  return "?";
}

std::string type_str(const Type& t, bool arg) {
  switch (t.kind) {
    case Type::Kind::Int: return "Int";
    case Type::Kind::Var: return t.name;
    case Type::Kind::Data: {
      if (t.name == "List" && t.args.size() == 1) return "[" + type_str(t.args[0], false) + "]";
      if (t.name == "Pair" && t.args.size() == 2)
        return "(" + type_str(t.args[0], false) + ", " + type_str(t.args[1], false) + ")";
      std::string s = t.name;
      for (const auto& a : t.args) s += " " + type_str(a, true);
      return paren_if(arg && !t.args.empty(), s);
    }
  }
  return "?";
}

}  // namespace

std::string pretty(const Expr& expr) { return str(expr, 0); }
std::string pretty(const Pattern& pattern) { return pat(pattern, false); }
std::string pretty(const Type& type) { return type_str(type, false); }

std::string pretty(const Signature& sig) {
  std::string s;
  for (const auto& p : sig.params) s += type_str(p, false) + " -> ";
  return s + type_str(sig.result, false);
}

std::string pretty(const Program& program) {
  std::ostringstream os;
  for (const auto& t : program.types) {
    if (t.builtin) continue;
    os << "data " << t.name;
    for (const auto& p : t.params) os << " " << p;
    os << " =";
    for (std::size_t i = 0; i < t.ctors.size(); ++i) {
      os << (i ? " | " : " ") << t.ctors[i].name;
      for (const auto& a : t.ctors[i].args) os << " " << type_str(a, true);
    }
    os << "\n";
  }
  for (const auto& op : program.ops) {
    if (const auto* sig = program.find_signature(op.name))
      os << op.name << " :: " << pretty(*sig) << "\n";
    for (const auto& r : op.rules) {
      os << op.name;
      for (const auto& p : r.params) os << " " << pat(p, true);
      if (r.guard) os << " | " << str(*r.guard, 0);
      os << " = " << str(*r.body, 0);
      if (!r.where.empty()) {
        os << " where ";
        print_bindings(r.where, os);
      }
      os << "\n";
    }
  }
  for (const auto& p : program.props)
    os << "prop " << p.name << annotation_suffix(p.annotation) << " = " << p.lhs << " <=> "
       << p.rhs << "\n";
  return os.str();
}

}  // namespace flp
