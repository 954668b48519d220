#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "flp/ast.hpp"
#include "flp/partial.hpp"

namespace flp {

struct EvalConfig {
  /// Rule applications allowed per branch.
  long step_budget = 100000;
  /// Branches (choice-tree nodes) a single search may explore.
  long branch_budget = 10000;
  /// Constructor depth observed when enumerating partial values.
  int depth_budget = 25;
  std::optional<std::chrono::steady_clock::time_point> deadline;

  /// Throws std::invalid_argument unless every budget is positive.
  void validate() const;
};

enum class Reachability { Yes, No, Unknown };
const char* to_string(Reachability r);

struct SearchStats {
  long branches = 0;
  bool timed_out = false;
};

struct OutcomeSet {
  std::set<PartialValue> outcomes;
  bool complete = true;
  SearchStats stats;
};

/// Result of observing an expression through a shape: every vector of
/// integers found at the shape's integer leaves, in left-to-right order, over
/// all branches whose result matches the shape's constructors.
struct ShapeObservation {
  std::set<std::vector<std::int64_t>> vectors;
  bool complete = true;
  SearchStats stats;
};

struct Compiled;

/// Evaluator for one program. Construction desugars and compiles the program;
/// afterwards the object is immutable and may be shared between threads.
class Evaluator {
 public:
  explicit Evaluator(const Program& program);
  ~Evaluator();
  Evaluator(const Evaluator&);
  Evaluator& operator=(const Evaluator&);

  /// The desugared program the evaluator runs.
  const Program& program() const;

  /// Total values of `expr`.
  OutcomeSet values(const ExprPtr& expr, const EvalConfig& cfg) const;

  /// Whether `expr` can be evaluated to `tmpl`, where ⊥ positions of the
  /// template are left unevaluated.
  Reachability reach(const ExprPtr& expr, const PartialValue& tmpl, const EvalConfig& cfg,
                     SearchStats* stats = nullptr) const;

  /// Integer leaves of `shape` are observed rather than compared.
  ShapeObservation observe_shape(const ExprPtr& expr, const PartialValue& shape,
                                 const EvalConfig& cfg) const;

  /// Maximal partial values of `expr` up to the depth budget. The full set of
  /// partial values is their downward closure.
  OutcomeSet maximal_partials(const ExprPtr& expr, const EvalConfig& cfg) const;

  /// The downward closure of maximal_partials, materialized.
  OutcomeSet partials(const ExprPtr& expr, const EvalConfig& cfg) const;

 private:
  std::shared_ptr<const Compiled> compiled_;
};

OutcomeSet eval_values(const Program& program, const ExprPtr& expr, const EvalConfig& cfg);
Reachability reach_partial(const Program& program, const ExprPtr& expr, const PartialValue& tmpl,
                           const EvalConfig& cfg);
OutcomeSet enumerate_partials(const Program& program, const ExprPtr& expr, const EvalConfig& cfg);

/// Inserts `t` into an antichain of maximal elements. Returns false when `t`
/// was already covered.
bool insert_maximal(std::set<PartialValue>& antichain, const PartialValue& t);
/// t lies below some element of the antichain.
bool covered(const std::set<PartialValue>& antichain, const PartialValue& t);

/// Runs `fn` on a thread with a large stack unless already on one. The
/// evaluator recurses along the demand chain.
void with_large_stack(const std::function<void()>& fn);

}  // namespace flp
