#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "flp/ast.hpp"

namespace flp {

struct AnalysisVerdict {
  enum class Status { Proven, Unknown };
  Status status = Status::Unknown;
  std::string reason;

  bool proven() const { return status == Status::Proven; }
};

const char* to_string(AnalysisVerdict::Status s);

/// Conservative static analyses over one program. Verdicts for an operation
/// depend only on the operations it can reach, so results are memoized.
/// Every query throws std::invalid_argument for an unknown operation.
class Analyzer {
 public:
  explicit Analyzer(const Program& program);
  ~Analyzer();
  Analyzer(const Analyzer&) = delete;
  Analyzer& operator=(const Analyzer&) = delete;

  /// Every recursive call, in every cycle reachable from `op`, passes a strict
  /// subterm of a parameter pattern in one fixed argument position per
  /// operation.
  AnalysisVerdict termination(const std::string& op);
  /// Either terminating, or every recursive call sits under a constructor in
  /// the result and everything evaluated before that constructor is itself
  /// productive. Failure counts as progress: the guarantee is that forcing a
  /// call to head normal form does not diverge.
  AnalysisVerdict productivity(const std::string& op);
  /// No choice, no `failed`, no guards and no overlapping rules anywhere
  /// reachable.
  AnalysisVerdict deterministic(const std::string& op);
  /// Terminating, with exhaustive guard-free patterns and no failure source
  /// (`failed`, division, refutable case or let patterns) anywhere reachable.
  AnalysisVerdict totally_defined(const std::string& op);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

AnalysisVerdict termination_check(const Program& program, const std::string& op);
AnalysisVerdict productivity_check(const Program& program, const std::string& op);
AnalysisVerdict deterministic_check(const Program& program, const std::string& op);
AnalysisVerdict totally_defined_check(const Program& program, const std::string& op);

/// True when the pattern rows cover every value of their column types.
bool exhaustive(const Program& program, const std::vector<std::vector<Pattern>>& rows);
/// True when some value matches both pattern rows.
bool overlap(const std::vector<Pattern>& a, const std::vector<Pattern>& b);

struct OpAnalysis {
  std::string op;
  AnalysisVerdict termination;
  AnalysisVerdict productivity;
  AnalysisVerdict deterministic;
  AnalysisVerdict totally_defined;
};

/// All four verdicts for every user operation, in declaration order.
std::vector<OpAnalysis> analyze_program(const Program& program);

}  // namespace flp
