#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "flp/ast.hpp"
#include "flp/equiv.hpp"

namespace flp {

struct Version {
  std::uint64_t major = 0;
  std::uint64_t minor = 0;
  std::uint64_t patch = 0;
  std::vector<std::string> prerelease;

  std::string str() const;
};

/// Semantic-versioning precedence: a prerelease sorts before its release,
/// numeric identifiers compare numerically and below alphanumeric ones.
std::strong_ordering operator<=>(const Version& a, const Version& b);
bool operator==(const Version& a, const Version& b);

/// MAJOR.MINOR.PATCH with an optional `-pre.release` suffix. Throws
/// std::invalid_argument on anything else.
Version parse_version(const std::string& text);

struct ApiEntry {
  enum class Kind { Type, Operation };
  enum class Status { Identical, SignatureChanged, Removed, Added };

  Kind kind = Kind::Operation;
  std::string name;
  Status status = Status::Identical;
};

const char* to_string(ApiEntry::Kind k);
const char* to_string(ApiEntry::Status s);

struct ApiViolation {
  std::string entity;
  std::string rule;
};

struct ApiReport {
  /// Types first, then operations; each group sorted by name.
  std::vector<ApiEntry> entries;
  std::vector<ApiViolation> violations;
};

ApiReport compare_api(const Program& old_program, const Program& new_program, const Version& vold,
                      const Version& vnew);

/// One module holding both versions: old entities prefixed `V0_`, new ones
/// `V1_`, translations `t_T` from new to old values, and for each shared
/// operation `f` with matching signatures the wrappers `M_f_1`, `M_f_2` and a
/// property `f_equivalent`. Prelude types are shared and not renamed.
struct Comparison {
  Program program;
  /// Shared operations that got wrappers, in old-version declaration order.
  std::vector<std::string> compared;
  /// Shared operations left out, with the reason.
  std::vector<std::pair<std::string, std::string>> excluded;
};

Comparison build_comparison_program(const Program& old_program, const Program& new_program);

struct DiffConfig {
  /// Bounds and budgets for each behavior check; lhs, rhs and preconditions
  /// are filled in per operation.
  EquivTask base;
  DiffConfig() { base.safe_mode = true; }
};

struct BehaviorEntry {
  std::string op;
  Verdict verdict;
};

struct DiffReport {
  Version old_version;
  Version new_version;
  ApiReport api;
  /// Empty when the major versions differ.
  std::vector<BehaviorEntry> behavior;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Counterexamples in the report use the unprefixed constructor names.
DiffReport behavior_diff(const Program& old_program, const Program& new_program, const Version& vold,
                         const Version& vnew, const DiffConfig& config = DiffConfig{});

}  // namespace flp
