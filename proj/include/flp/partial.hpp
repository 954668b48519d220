#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flp/ast.hpp"

namespace flp {

/// A constructor tree where any position may be ⊥.
struct PartialValue {
  enum class Kind { Bottom, Int, Ctor };

  Kind kind = Kind::Bottom;
  std::int64_t value = 0;
  std::string name;
  std::vector<PartialValue> args;

  static PartialValue bottom() { return {}; }
  static PartialValue integer(std::int64_t v) { return {Kind::Int, v, {}, {}}; }
  static PartialValue ctor(std::string n, std::vector<PartialValue> a = {}) {
    return {Kind::Ctor, 0, std::move(n), std::move(a)};
  }

  bool is_bottom() const { return kind == Kind::Bottom; }
  bool is_total() const;
  /// Number of non-⊥ nodes.
  int size() const;
};

bool operator==(const PartialValue& a, const PartialValue& b);
bool operator<(const PartialValue& a, const PartialValue& b);
inline bool operator!=(const PartialValue& a, const PartialValue& b) { return !(a == b); }

/// 0, 1, -1, 2, -2, ... truncated to n elements.
std::vector<std::int64_t> integer_ring(int n);

struct LevelPlan {
  Type type;
  int max_level = 0;
  std::vector<std::int64_t> integer_ring;

  /// Plan whose integer ring has one element per level.
  static LevelPlan standard(Type t, int level) {
    return {std::move(t), level, flp::integer_ring(level)};
  }
};

/// Replaces type variables by the three-constant type.
Type instantiate(const Type& t);

/// Enumeration weight: non-⊥ nodes, where the i-th ring integer (0-based)
/// weighs i+1. Equals size() on integer-free values.
int weight(const PartialValue& v, const std::vector<std::int64_t>& ring);

/// Memoized generator of the partial values of a type with a given weight.
/// Order within one weight: constructor declaration order, then children
/// left to right with the first child's weight ascending.
class PartialEnumerator {
 public:
  PartialEnumerator(const Program& program, std::vector<std::int64_t> ring);

  const std::vector<PartialValue>& of_weight(const Type& type, int w);
  /// Tuples over `types` whose weights sum to w.
  std::vector<std::vector<PartialValue>> tuples_of_weight(const std::vector<Type>& types, int w);

 private:
  const Program& program_;
  std::vector<std::int64_t> ring_;
  std::map<std::pair<std::string, int>, std::vector<PartialValue>> memo_;

  void products(const std::vector<Type>& types, std::size_t i, int w,
                std::vector<PartialValue>& cur, std::vector<std::vector<PartialValue>>& out);
};

/// Every partial value of weight <= max_level, ascending weight, ⊥ first.
/// Throws std::invalid_argument for an unknown type.
std::vector<PartialValue> enumerate_partial_values(const Program& program, const LevelPlan& plan);

/// ⊥ becomes `failed`.
ExprPtr partial_to_expr(const PartialValue& t);

std::string render(const PartialValue& t);

/// t < u: t arises from u by replacing at least one subtree with ⊥.
bool less_defined(const PartialValue& t, const PartialValue& u);
bool less_defined_or_equal(const PartialValue& t, const PartialValue& u);

/// All partial values below t, including t itself.
std::vector<PartialValue> downward_closure(const PartialValue& t);

}  // namespace flp
