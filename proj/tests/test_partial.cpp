#include <doctest.h>

#include <set>

#include "flp/lang.hpp"
#include "flp/partial.hpp"

using namespace flp;

namespace {

const char* kTypes =
    "data AB = A | B\n"
    "data C = C AB\n"
    "data T = Leaf | Node T AB T\n"
    "data Wrap a = Wrap a Int\n";

Program types_program() {
  auto r = parse_program(kTypes);
  REQUIRE(r.ok());
  return *r.program;
}

Type subst(const Type& t, const std::vector<std::string>& params, const std::vector<Type>& args) {
  if (t.kind == Type::Kind::Var)
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] == t.name) return args[i];
  Type out = t;
  for (auto& a : out.args) a = subst(a, params, args);
  return out;
}

// Independent generator: builds trees top-down, pruning partial argument
// lists as soon as their weight exceeds the remaining budget.
std::vector<PartialValue> brute(const Program& prog, const Type& t, int budget,
                                const std::vector<std::int64_t>& ring) {
  std::vector<PartialValue> out{PartialValue::bottom()};
  if (budget == 0) return out;
  if (t.kind == Type::Kind::Int) {
    for (auto v : ring) out.push_back(PartialValue::integer(v));
    return out;
  }
  const auto* decl = prog.find_type(t.name);
  for (const auto& c : decl->ctors) {
    std::vector<std::pair<std::vector<PartialValue>, int>> combos{{{}, 1}};
    for (const auto& a : c.args) {
      auto subs = brute(prog, subst(a, decl->params, t.args), budget - 1, ring);
      std::vector<std::pair<std::vector<PartialValue>, int>> next;
      for (const auto& [pre, w] : combos)
        for (const auto& s : subs) {
          int total = w + weight(s, ring);
          if (total > budget) continue;
          next.push_back({pre, total});
          next.back().first.push_back(s);
        }
      combos = std::move(next);
    }
    for (auto& [args, w] : combos) out.push_back(PartialValue::ctor(c.name, std::move(args)));
  }
  return out;
}

std::set<PartialValue> oracle(const Program& prog, const Type& t, int level) {
  auto ring = integer_ring(level);
  std::set<PartialValue> out;
  for (auto& v : brute(prog, t, level, ring))
    if (weight(v, ring) <= level) out.insert(v);
  return out;
}

std::vector<std::string> rendered(const std::vector<PartialValue>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(render(v));
  return out;
}

}  // namespace

TEST_CASE("integer ring") {
  CHECK(integer_ring(5) == std::vector<std::int64_t>{0, 1, -1, 2, -2});
  CHECK(integer_ring(0).empty());
}

TEST_CASE("enumeration examples") {
  auto p = types_program();
  CHECK(rendered(enumerate_partial_values(p, LevelPlan::standard(Type::data("AB"), 1))) ==
        std::vector<std::string>{"failed", "A", "B"});
  auto c = rendered(enumerate_partial_values(p, LevelPlan::standard(Type::data("C"), 2)));
  CHECK(c == std::vector<std::string>{"failed", "C failed", "C A", "C B"});
  for (const auto& t : {Type::data("AB"), Type::data("T"), Type::integer()}) {
    auto v = enumerate_partial_values(p, LevelPlan::standard(t, 0));
    REQUIRE(v.size() == 1);
    CHECK(v[0].is_bottom());
  }
  CHECK_THROWS_AS(enumerate_partial_values(p, LevelPlan::standard(Type::data("Nope"), 1)),
                  std::invalid_argument);
}

TEST_CASE("enumeration matches the brute-force generator") {
  auto p = types_program();
  std::vector<Type> types = {
      Type::data("AB"),
      Type::data("C"),
      Type::data("Bool"),
      Type::data("Ordering"),
      Type::data("T"),
      Type::data("Maybe", {Type::data("AB")}),
      Type::data("List", {Type::data("AB")}),
      Type::data("List", {Type::var("a")}),
      Type::data("Pair", {Type::data("Bool"), Type::data("C")}),
      Type::data("Wrap", {Type::data("AB")}),
      Type::data("List", {Type::integer()}),
      Type::integer(),
  };
  for (const auto& t : types) {
    std::vector<PartialValue> prev;
    for (int level = 0; level <= 4; ++level) {
      auto got = enumerate_partial_values(p, LevelPlan::standard(t, level));
      auto expected = oracle(p, instantiate(t), level);
      std::set<PartialValue> got_set(got.begin(), got.end());
      CHECK_MESSAGE(got_set.size() == got.size(), pretty(t), " has duplicates at ", level);
      std::string diff;
      for (const auto& v : got_set)
        if (!expected.count(v)) diff += " +" + render(v);
      for (const auto& v : expected)
        if (!got_set.count(v)) diff += " -" + render(v);
      CHECK_MESSAGE(diff.empty(), pretty(t), " level ", level, ":", diff);
      REQUIRE(!got.empty());
      CHECK(got.front().is_bottom());
      // Ascending weight.
      auto ring = integer_ring(level);
      for (std::size_t i = 1; i < got.size(); ++i)
        CHECK(weight(got[i - 1], ring) <= weight(got[i], ring));
      // Prefix stability.
      REQUIRE(prev.size() <= got.size());
      CHECK(std::equal(prev.begin(), prev.end(), got.begin()));
      prev = got;
    }
  }
}

TEST_CASE("weight equals size without integers") {
  auto p = types_program();
  for (const auto& v : enumerate_partial_values(p, LevelPlan::standard(Type::data("T"), 5)))
    CHECK(weight(v, {}) == v.size());
}

TEST_CASE("partial_to_expr and render") {
  auto bot = PartialValue::bottom();
  CHECK(partial_to_expr(bot)->kind == Expr::Kind::Failed);
  CHECK(render(bot) == "failed");
  CHECK(render(PartialValue::ctor("C", {PartialValue::ctor("A")})) == "C A");
  auto cons = [](PartialValue h, PartialValue t) {
    return PartialValue::ctor("Cons", {std::move(h), std::move(t)});
  };
  auto i = PartialValue::integer;
  CHECK(render(cons(i(1), cons(i(0), bot))) == "(1 : (0 : failed))");
  CHECK(render(cons(bot, cons(i(2), bot))) == "(failed : (2 : failed))");
  CHECK(render(cons(bot, bot)) == "(failed : failed)");
  CHECK(render(cons(i(-1), PartialValue::ctor("Nil"))) == "[-1]");
  CHECK(render(PartialValue::ctor("Just", {i(-1)})) == "Just (-1)");
  auto e = partial_to_expr(cons(i(1), cons(i(0), bot)));
  CHECK(pretty(*e) == "(1 : (0 : failed))");
}

TEST_CASE("render is injective on one type") {
  auto p = types_program();
  for (const auto& t : {Type::data("T"), Type::data("List", {Type::integer()}),
                        Type::data("Pair", {Type::data("AB"), Type::data("Maybe", {Type::data("AB")})})}) {
    auto vs = enumerate_partial_values(p, LevelPlan::standard(t, 5));
    std::set<std::string> names;
    for (const auto& v : vs) names.insert(render(v));
    CHECK(names.size() == vs.size());
  }
}

TEST_CASE("less_defined examples") {
  auto A = PartialValue::ctor("A");
  auto CA = PartialValue::ctor("C", {A});
  auto Cbot = PartialValue::ctor("C", {PartialValue::bottom()});
  CHECK(less_defined(PartialValue::bottom(), CA));
  CHECK(less_defined(Cbot, CA));
  CHECK_FALSE(less_defined(CA, Cbot));
  CHECK_FALSE(less_defined(CA, CA));
  CHECK(less_defined_or_equal(CA, CA));
}

TEST_CASE("less_defined is a partial order with bottom as minimum") {
  auto p = types_program();
  auto vs = enumerate_partial_values(p, LevelPlan::standard(Type::data("T"), 4));
  for (const auto& a : vs) {
    CHECK(less_defined_or_equal(a, a));
    CHECK_FALSE(less_defined(a, a));
    if (!a.is_bottom()) CHECK(less_defined(PartialValue::bottom(), a));
    for (const auto& b : vs) {
      if (less_defined(a, b)) CHECK_FALSE(less_defined(b, a));
      for (const auto& c : vs)
        if (less_defined(a, b) && less_defined(b, c)) CHECK(less_defined(a, c));
    }
  }
}

TEST_CASE("downward closure agrees with less_defined") {
  auto p = types_program();
  auto vs = enumerate_partial_values(p, LevelPlan::standard(Type::data("T"), 5));
  for (const auto& u : vs) {
    auto closure = downward_closure(u);
    std::set<PartialValue> cs(closure.begin(), closure.end());
    CHECK(cs.size() == closure.size());
    for (const auto& t : vs) CHECK(cs.count(t) == (less_defined_or_equal(t, u) ? 1u : 0u));
  }
}
