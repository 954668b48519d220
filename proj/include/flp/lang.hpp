#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flp/ast.hpp"

namespace flp {

struct Diagnostic {
  enum class Kind { Syntax, UnknownIdentifier, Arity, Duplicate, Scope, Type, Property };

  Kind kind = Kind::Syntax;
  SourcePos pos;
  std::string message;

  std::string str() const;
};

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
};

struct ParseOptions {
  bool include_prelude = true;
};

/// Source text of the prelude data types shipped with every program.
std::string_view prelude_source();

/// Parses and validates a module. Never throws on malformed input; every
/// problem is returned as a positioned diagnostic.
ParseResult parse_program(std::string_view source, const ParseOptions& options = {});

/// Parses a closed expression against an already validated program.
struct ExprResult {
  ExprPtr expr;
  std::vector<Diagnostic> diagnostics;
};
ExprResult parse_expression(std::string_view source, const Program& program);

/// Re-runs validation on a programmatically built program (e.g. a merged
/// comparison module). Returns the diagnostics; empty means valid.
std::vector<Diagnostic> validate(Program& program);

/// Replaces guards by the internal `ifthen` operation and where-bindings by
/// shared let-bindings; lazy pattern bindings become case selectors.
Program desugar(const Program& program);

std::string pretty(const Expr& expr);
std::string pretty(const Pattern& pattern);
std::string pretty(const Type& type);
std::string pretty(const Signature& sig);
/// Prints the user part of a program (prelude types omitted) in concrete syntax.
std::string pretty(const Program& program);

std::string annotation_suffix(Annotation a);

}  // namespace flp
