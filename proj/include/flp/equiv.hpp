#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flp/analysis.hpp"
#include "flp/ast.hpp"
#include "flp/eval.hpp"
#include "flp/partial.hpp"

namespace flp {

enum class Mode { PartialTemplate, PartialSet, Ground };
const char* to_string(Mode m);

struct EquivTask {
  std::string lhs;
  std::string rhs;
  Annotation annotation = Annotation::None;
  std::optional<Mode> mode_override;
  /// Weight bound for input tuples.
  int levels = 6;
  /// Size bound for result templates.
  int template_levels = 6;
  EvalConfig eval;
  bool safe_mode = false;
  /// Stop after this many tests; the verdict then covers only what ran.
  long max_tests = 100000;
  /// Wall-clock budget for the whole task, in seconds. Zero means none.
  double time_limit = 0;
  /// Unary-in-the-tuple predicates an input must satisfy (evaluate to True
  /// and nothing else) to be tested.
  std::vector<std::string> preconditions;
};

struct Counterexample {
  std::vector<PartialValue> inputs;
  /// The observed partial value; reachable on exactly one side.
  std::optional<PartialValue> tmpl;
  Reachability lhs = Reachability::Unknown;
  Reachability rhs = Reachability::Unknown;
  /// Set when the failure is a postcondition violation rather than a
  /// disagreement between two operations.
  bool postcondition = false;
};

struct Verdict {
  enum class Outcome { EquivalentUpToBound, Counterexample, Inconclusive, Skipped };

  Outcome outcome = Outcome::EquivalentUpToBound;
  Mode mode = Mode::PartialTemplate;
  std::string lhs;
  std::string rhs;
  std::optional<Counterexample> cex;
  std::string reason;
  long tests_run = 0;
  long unknown_tests = 0;
  long branches = 0;
  double wall_seconds = 0;
};

const char* to_string(Verdict::Outcome o);

struct ModeChoice {
  Mode mode = Mode::PartialTemplate;
  bool skipped = false;
  std::string reason;
};

/// Picks the checking mode from the analyses and the task's annotation.
ModeChoice select_mode(const EquivTask& task, const Program& program);

/// Throws std::invalid_argument for unknown operations or mismatched
/// signatures.
Verdict check_equiv(const Program& program, const EquivTask& task);

/// Ground mode regardless of the gate. Only total inputs are tried, so a pass
/// here says nothing about contexts that leave parts of the input undefined.
Verdict check_ground_equiv(const Program& program, const EquivTask& task);

/// Greedily replaces subtrees of the inputs, then the template, with ⊥ while
/// the same one-sided reachability persists.
Counterexample minimize_counterexample(const Program& program, const EquivTask& task,
                                       const Counterexample& cex);

/// Re-runs one recorded test and reports whether both sides still give the
/// recorded reachability.
bool replay(const Program& program, const EquivTask& task, const Counterexample& cex);

struct StrictProbe {
  bool non_strict = false;
  /// Argument position that was set to ⊥.
  std::size_t position = 0;
  std::vector<PartialValue> inputs;
  PartialValue witness;
  /// The search behind a PossiblyStrict answer ran to completion.
  bool complete = false;
};

/// Applies `op` to ⊥ in each argument position in turn (the others get the
/// first total value of their type) and looks for a constructor-rooted
/// result.
StrictProbe strict_probe(const Program& program, const std::string& op,
                         const EvalConfig& cfg = EvalConfig{});

/// Checks `op` against `op'spec` (with `op'pre` and `op'spec'pre` as input
/// filters) and, when `op'post` exists, every value of `op` against it.
/// Throws std::invalid_argument when neither a specification nor a
/// postcondition exists.
std::vector<Verdict> check_spec(const Program& program, const std::string& op,
                                const EquivTask& base = EquivTask{});

/// Operations `f` for which `f'spec` or `f'post` is defined, in declaration
/// order.
std::vector<std::string> specified_operations(const Program& program);

}  // namespace flp
