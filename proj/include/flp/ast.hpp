#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace flp {

struct SourcePos {
  int line = 0;
  int column = 0;
};

/// Monomorphic-or-polymorphic first-order type: `Int`, a type variable, or a
/// saturated data type application such as `List a`.
struct Type {
  enum class Kind { Int, Var, Data };

  Kind kind = Kind::Int;
  std::string name;
  std::vector<Type> args;

  static Type integer() { return {}; }
  static Type var(std::string name) { return {Kind::Var, std::move(name), {}}; }
  static Type data(std::string name, std::vector<Type> args = {}) {
    return {Kind::Data, std::move(name), std::move(args)};
  }

  bool operator==(const Type&) const = default;
  auto operator<=>(const Type&) const = default;
};

struct Signature {
  std::vector<Type> params;
  Type result;
  SourcePos pos;

  bool operator==(const Signature& o) const {
    return params == o.params && result == o.result;
  }
};

struct CtorDecl {
  std::string name;
  std::vector<Type> args;
  SourcePos pos;
};

struct TypeDecl {
  std::string name;
  std::vector<std::string> params;
  std::vector<CtorDecl> ctors;
  bool builtin = false;
  SourcePos pos;
};

struct Pattern {
  enum class Kind { Var, Wildcard, Int, Ctor };

  Kind kind = Kind::Wildcard;
  std::string name;  // variable or constructor name
  std::int64_t value = 0;
  std::vector<Pattern> args;
  SourcePos pos;

  static Pattern var(std::string n) { return {Kind::Var, std::move(n), 0, {}, {}}; }
  static Pattern wildcard() { return {}; }
  static Pattern integer(std::int64_t v) { return {Kind::Int, {}, v, {}, {}}; }
  static Pattern ctor(std::string n, std::vector<Pattern> args = {}) {
    return {Kind::Ctor, std::move(n), 0, std::move(args), {}};
  }
};

enum class Prim { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not };

int prim_arity(Prim p);
const char* prim_symbol(Prim p);
std::optional<Prim> prefix_prim(const std::string& name);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LetBinding {
  Pattern lhs;  // a plain variable after desugaring
  ExprPtr rhs;
};

struct Alt {
  Pattern pattern;  // flat: constructor over variables, integer, or variable/wildcard
  ExprPtr body;
};

/// Expression tree. Nodes are immutable and shared.
///
/// `args` holds the operands: constructor/call/primitive arguments, the two
/// alternatives of a choice, `[cond, then, else]` for if, `[scrutinee]` for
/// case and `[body]` for let.
struct Expr {
  enum class Kind { Var, Int, Ctor, Call, Prim, Choice, Failed, If, Case, Let };

  Kind kind = Kind::Failed;
  std::string name;
  std::int64_t value = 0;
  Prim prim = Prim::Add;
  std::vector<ExprPtr> args;
  std::vector<Alt> alts;
  std::vector<LetBinding> bindings;
  SourcePos pos;
};

namespace mk {
ExprPtr var(std::string name);
ExprPtr integer(std::int64_t v);
ExprPtr ctor(std::string name, std::vector<ExprPtr> args = {});
ExprPtr call(std::string name, std::vector<ExprPtr> args = {});
ExprPtr prim(Prim p, std::vector<ExprPtr> args);
ExprPtr choice(ExprPtr a, ExprPtr b);
ExprPtr failed();
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr case_(ExprPtr scrutinee, std::vector<Alt> alts);
ExprPtr let(std::vector<LetBinding> bindings, ExprPtr body);
}  // namespace mk

struct Rule {
  std::string op;
  std::vector<Pattern> params;
  ExprPtr guard;  // null when absent
  ExprPtr body;
  std::vector<LetBinding> where;
  SourcePos pos;
};

struct OpDecl {
  std::string name;
  std::vector<Rule> rules;
  SourcePos pos;

  std::size_t arity() const { return rules.empty() ? 0 : rules.front().params.size(); }
};

enum class Annotation { None, Terminate, Productive };

struct PropDecl {
  std::string name;
  Annotation annotation = Annotation::None;
  std::string lhs;
  std::string rhs;
  SourcePos pos;
};

/// A parsed and validated module. Prelude types are included and flagged
/// `builtin`.
struct Program {
  std::vector<TypeDecl> types;
  std::vector<OpDecl> ops;
  std::map<std::string, Signature> signatures;
  std::vector<PropDecl> props;
  bool desugared = false;

  const TypeDecl* find_type(const std::string& name) const;
  const OpDecl* find_op(const std::string& name) const;
  OpDecl* find_op(const std::string& name);
  const Signature* find_signature(const std::string& name) const;
  /// Returns the declaring type and the constructor, or nulls.
  std::pair<const TypeDecl*, const CtorDecl*> find_ctor(const std::string& name) const;
};

/// Name of the internal operation introduced by guard desugaring.
inline constexpr const char* kIfThen = "ifthen";
/// The designated three-constant type used to instantiate type variables.
inline constexpr const char* kThreeValued = "Ordering";

bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Pattern& a, const Pattern& b);
bool structurally_equal(const Program& a, const Program& b);

/// Signature equality up to consistent renaming of type variables.
bool alpha_equivalent(const Signature& a, const Signature& b);

}  // namespace flp
