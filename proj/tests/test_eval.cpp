#include <doctest.h>

#include "flp/eval.hpp"
#include "flp/lang.hpp"
#include "corpus.hpp"

using namespace flp;

namespace {

PartialValue I(std::int64_t v) { return PartialValue::integer(v); }
PartialValue C(const std::string& n, std::vector<PartialValue> args = {}) {
  return PartialValue::ctor(n, std::move(args));
}
PartialValue B() { return PartialValue::bottom(); }
PartialValue cons(PartialValue h, PartialValue t) { return C("Cons", {std::move(h), std::move(t)}); }
PartialValue list(std::vector<PartialValue> xs) {
  PartialValue out = C("Nil");
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) out = cons(*it, out);
  return out;
}

std::set<PartialValue> values(const Program& p, const std::string& src, bool* complete = nullptr) {
  auto r = eval_values(p, expr(p, src), EvalConfig{});
  if (complete) *complete = r.complete;
  return r.outcomes;
}

Reachability reach(const Program& p, const std::string& src, const PartialValue& t) {
  return reach_partial(p, expr(p, src), t, EvalConfig{});
}

std::set<PartialValue> closure_of(const std::set<PartialValue>& vs) {
  std::set<PartialValue> out;
  for (const auto& v : vs)
    for (auto& t : downward_closure(v)) out.insert(std::move(t));
  return out;
}

}  // namespace

TEST_CASE("call-time choice") {
  auto p = load("examples.flp");
  bool complete = false;
  CHECK(values(p, "double coin", &complete) == std::set<PartialValue>{I(0), I(2)});
  CHECK(complete);
  CHECK(values(p, "coin + coin") == std::set<PartialValue>{I(0), I(1), I(2)});
  CHECK(values(p, "let x = coin in x + x") == std::set<PartialValue>{I(0), I(2)});
}

TEST_CASE("value enumeration") {
  auto p = load("examples.flp");
  bool complete = false;
  CHECK(values(p, "insert 0 [1, 2]", &complete) ==
        std::set<PartialValue>{list({I(0), I(1), I(2)}), list({I(1), I(0), I(2)}),
                               list({I(1), I(2), I(0)})});
  CHECK(complete);
  CHECK(values(p, "head (insert 1 failed)", &complete) == std::set<PartialValue>{I(1)});
  CHECK(complete);
  CHECK(values(p, "head (insert' 1 failed)", &complete).empty());
  CHECK(complete);
  CHECK(values(p, "not (not True)") == std::set<PartialValue>{C("True")});
  CHECK(values(p, "perm [1, 2, 3]").size() == 6);
  CHECK(values(p, "fromTo 1 3") == std::set<PartialValue>{list({I(1), I(2), I(3)})});
  CHECK(values(p, "div 7 2 + mod (-7) 2") == std::set<PartialValue>{I(4)});
  CHECK(values(p, "div (-7) 2") == std::set<PartialValue>{I(-4)});
  CHECK(values(p, "div 1 0").empty());
  CHECK(values(p, "if 1 < 2 && [1] == [1] then True else False") == std::set<PartialValue>{C("True")});
}

TEST_CASE("budget exhaustion is reported, not fatal") {
  auto p = load("examples.flp");
  EvalConfig cfg;
  cfg.step_budget = 1000;
  auto r = eval_values(p, expr(p, "loop"), cfg);
  CHECK(r.outcomes.empty());
  CHECK_FALSE(r.complete);
  auto q = eval_values(p, expr(p, "head (fromTo 1 1000000)"), EvalConfig{});
  CHECK(q.outcomes == std::set<PartialValue>{I(1)});
  CHECK(q.complete);
  EvalConfig bad;
  bad.branch_budget = 0;
  CHECK_THROWS_AS(eval_values(p, expr(p, "coin"), bad), std::invalid_argument);
}

TEST_CASE("reachability of partial templates") {
  auto ex1 = load("ex1.flp");
  CHECK(reach(ex1, "f failed", C("C", {B()})) == Reachability::Yes);
  CHECK(reach(ex1, "g failed", C("C", {B()})) == Reachability::No);
  CHECK(reach(ex1, "g failed", B()) == Reachability::Yes);
  auto se = load("sortequiv.flp");
  auto two = cons(I(2), B());
  CHECK(reach(se, "sort' [2, 3, 1]", two) == Reachability::Yes);
  CHECK(reach(se, "sort [2, 3, 1]", two) == Reachability::No);
  auto ints = load("ints12.flp");
  auto t = cons(I(0), cons(I(1), B()));
  CHECK(reach(ints, "ints1 0", t) == Reachability::Yes);
  CHECK(reach(ints, "ints2 0", t) == Reachability::No);
  CHECK(reach(ints, "ints2 0", cons(I(0), cons(I(2), B()))) == Reachability::Yes);
  CHECK(reach(ints, "ints1 0", list({I(0)})) == Reachability::No);
  auto ex = load("examples.flp");
  CHECK(reach(ex, "loop", C("True")) == Reachability::Unknown);
  CHECK(reach(ex, "loop", B()) == Reachability::Yes);
}

TEST_CASE("shape observation collects integer leaves") {
  auto p = load("examples.flp");
  Evaluator ev(p);
  auto shape = cons(I(0), cons(I(0), B()));
  auto obs = ev.observe_shape(expr(p, "insert 0 [1, 2]"), shape, EvalConfig{});
  CHECK(obs.complete);
  CHECK(obs.vectors == std::set<std::vector<std::int64_t>>{{0, 1}, {1, 0}, {1, 2}});
}

TEST_CASE("partial value enumeration") {
  auto p = load("examples.flp");
  auto got = enumerate_partials(p, expr(p, "fromTo 1 5"), EvalConfig{});
  CHECK(got.complete);
  for (const auto& t : {B(), cons(B(), B()), cons(I(1), B()), cons(B(), cons(B(), B())),
                        cons(I(1), cons(B(), B())), cons(B(), cons(I(2), B())),
                        cons(I(1), cons(I(2), B()))})
    CHECK_MESSAGE(got.outcomes.count(t), render(t));

  auto f12 = load("f12.flp");
  auto f1 = enumerate_partials(f12, expr(f12, "f1 failed"), EvalConfig{});
  CHECK(f1.complete);
  CHECK(f1.outcomes == std::set<PartialValue>{B()});
  auto f2 = enumerate_partials(f12, expr(f12, "f2 failed"), EvalConfig{});
  CHECK(f2.complete);
  CHECK(f2.outcomes == std::set<PartialValue>{B(), C("True")});

  auto ex1 = load("ex1.flp");
  CHECK(enumerate_partials(ex1, expr(ex1, "A"), EvalConfig{}).outcomes ==
        std::set<PartialValue>{B(), C("A")});
  auto cf = enumerate_partials(ex1, expr(ex1, "f failed"), EvalConfig{});
  CHECK(cf.outcomes == std::set<PartialValue>{B(), C("C", {B()})});
}

TEST_CASE("partial values of fromTo 1 3 are the closure of its value") {
  auto p = load("examples.flp");
  EvalConfig cfg;
  cfg.depth_budget = 5;
  auto got = enumerate_partials(p, expr(p, "fromTo 1 3"), cfg);
  CHECK(got.complete);
  auto vals = values(p, "fromTo 1 3");
  CHECK(got.outcomes == closure_of(vals));
}

TEST_CASE("depth budget truncates infinite results") {
  auto p = load("ints12.flp");
  EvalConfig cfg;
  cfg.depth_budget = 4;
  auto got = Evaluator(p).maximal_partials(expr(p, "ints1 0"), cfg);
  CHECK_FALSE(got.complete);
  CHECK(got.outcomes == std::set<PartialValue>{cons(I(0), cons(I(1), cons(I(2), cons(B(), B()))))});
}

TEST_CASE("partial sets are downward closed and agree with reachability") {
  // Terminating expressions over several corpus programs. For each, the
  // oracle is the brute-force comparison of reach against every template
  // of the result type up to a size bound.
  struct Case {
    const char* file;
    const char* expr;
    Type type;
  };
  auto list_int = Type::data("List", {Type::integer()});
  std::vector<Case> cases = {
      {"examples.flp", "insert 0 [1, 2]", list_int},
      {"examples.flp", "insert' 0 [1, failed]", list_int},
      {"examples.flp", "perm [0, failed]", list_int},
      {"examples.flp", "coin ? failed", Type::integer()},
      {"ex1.flp", "f (A ? failed)", Type::data("C")},
      {"ex1.flp", "g (A ? B)", Type::data("C")},
      {"h12.flp", "h2 (True ? failed)", Type::data("Maybe", {Type::data("Bool")})},
      {"sortequiv.flp", "sort' [1, 0, failed]", list_int},
      {"sortequiv.flp", "sort [1, 0, failed]", list_int},
      {"g12.flp", "g1 0", list_int},
  };
  for (const auto& c : cases) {
    auto p = load(c.file);
    auto e = expr(p, c.expr);
    Evaluator ev(p);
    auto got = ev.partials(e, EvalConfig{});
    REQUIRE_MESSAGE(got.complete, c.expr);
    for (const auto& t : got.outcomes)
      for (const auto& u : downward_closure(t)) CHECK_MESSAGE(got.outcomes.count(u), c.expr);
    for (const auto& t : enumerate_partial_values(p, LevelPlan::standard(c.type, 5))) {
      bool in_set = got.outcomes.count(t) > 0;
      auto r = ev.reach(e, t, EvalConfig{});
      CHECK_MESSAGE((r == Reachability::Yes) == in_set, c.expr, " at ", render(t));
      CHECK_MESSAGE(r != Reachability::Unknown, c.expr, " at ", render(t));
    }
  }
}

TEST_CASE("partial inputs reach themselves and nothing more defined") {
  auto p = load("examples.flp");
  Evaluator ev(p);
  for (const auto& t : enumerate_partial_values(
           p, LevelPlan::standard(Type::data("List", {Type::data("Bool")}), 4))) {
    auto e = partial_to_expr(t);
    CHECK(ev.reach(e, t, EvalConfig{}) == Reachability::Yes);
    if (t.is_total()) {
      auto v = ev.values(e, EvalConfig{});
      CHECK(v.outcomes == std::set<PartialValue>{t});
    }
    for (const auto& u : enumerate_partial_values(
             p, LevelPlan::standard(Type::data("List", {Type::data("Bool")}), 5)))
      if (less_defined(t, u)) CHECK(ev.reach(e, u, EvalConfig{}) == Reachability::No);
  }
}

TEST_CASE("evaluation is deterministic") {
  auto p = load("perm.flp");
  auto e = expr(p, "perm' [1, failed, 2]");
  auto a = enumerate_partials(p, e, EvalConfig{});
  auto b = enumerate_partials(p, e, EvalConfig{});
  CHECK(a.outcomes == b.outcomes);
  CHECK(a.stats.branches == b.stats.branches);
}

TEST_CASE("desugaring preserves computed values") {
  for (const auto& [file, src] : std::vector<std::pair<std::string, std::string>>{
           {"sortequiv.flp", "sort [3, 1, 2]"},
           {"sortequiv.flp", "sort' [3, 1, 2]"},
           {"selsort_lazy.flp", "sort [2, 0, 1]"},
           {"selsort.flp", "sort [2, 0, 1]"},
           {"quicksort.flp", "sort'spec [1, 0, 1]"},
           {"examples.flp", "perm [0, 1]"},
       }) {
    auto p = load(file);
    auto d = desugar(p);
    auto e = expr(p, src);
    CHECK_MESSAGE(eval_values(p, e, EvalConfig{}).outcomes == eval_values(d, e, EvalConfig{}).outcomes,
                  src);
  }
}

TEST_CASE("lazy where-patterns expose constructors early") {
  auto lazy = load("selsort_lazy.flp");
  auto strict = load("selsort.flp");
  CHECK(reach(lazy, "sort (failed : failed)", cons(B(), B())) == Reachability::Yes);
  CHECK(reach(strict, "sort (failed : failed)", cons(B(), B())) == Reachability::No);
  CHECK(reach(lazy, "sort'spec (failed : failed)", cons(B(), B())) == Reachability::No);
}
