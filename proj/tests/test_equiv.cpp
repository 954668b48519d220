#include <doctest.h>

#include "flp/equiv.hpp"
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

EquivTask task_of(const Program& p, const std::string& prop) {
  for (const auto& d : p.props)
    if (d.name == prop) {
      EquivTask t;
      t.lhs = d.lhs;
      t.rhs = d.rhs;
      t.annotation = d.annotation;
      return t;
    }
  FAIL("no such property: " << prop);
  return {};
}

EquivTask pair(const std::string& l, const std::string& r) {
  EquivTask t;
  t.lhs = l;
  t.rhs = r;
  return t;
}

// Brute-force oracle for a decisive counterexample: the template is
// reachable on one side and provably unreachable on the other.
void check_witness(const Program& p, const EquivTask& t, const Counterexample& cex) {
  REQUIRE(cex.tmpl);
  std::vector<ExprPtr> args;
  for (const auto& v : cex.inputs) args.push_back(partial_to_expr(v));
  auto l = reach_partial(p, mk::call(t.lhs, args), *cex.tmpl, EvalConfig{});
  auto r = reach_partial(p, mk::call(t.rhs, args), *cex.tmpl, EvalConfig{});
  CHECK(l == cex.lhs);
  CHECK(r == cex.rhs);
  CHECK(((l == Reachability::Yes && r == Reachability::No) ||
         (l == Reachability::No && r == Reachability::Yes)));
}

}  // namespace

TEST_CASE("non-equivalent pairs yield decisive counterexamples") {
  struct Case {
    const char* file;
    std::string lhs, rhs;
  };
  std::vector<Case> cases = {
      {"ex1.flp", "f", "g"},        {"ints12.flp", "ints1", "ints2"},
      {"ndinsert.flp", "insert", "insert'"}, {"perm.flp", "perm", "perm'"},
      {"sortequiv.flp", "sort", "sort'"},    {"sortpermute.flp", "sort", "sort'"},
      {"revrev.flp", "revrev", "idList"},    {"primes.flp", "primes", "dummy_primes"},
      {"g12.flp", "g1", "g2"},      {"f12.flp", "f1", "f2"},
      {"h12.flp", "h1", "h2"},
  };
  for (const auto& c : cases) {
    auto p = load(c.file);
    auto t = pair(c.lhs, c.rhs);
    for (const auto& d : p.props)
      if (d.lhs == c.lhs && d.rhs == c.rhs) t.annotation = d.annotation;
    auto v = check_equiv(p, t);
    CHECK_MESSAGE(v.outcome == Verdict::Outcome::Counterexample, c.file);
    CHECK_MESSAGE(v.tests_run <= 5000, c.file);
    if (v.cex) {
      check_witness(p, t, *v.cex);
      CHECK(replay(p, t, *v.cex));
    }
  }
}

TEST_CASE("minimized witnesses") {
  auto ex1 = load("ex1.flp");
  auto v = check_equiv(ex1, task_of(ex1, "f_equiv_g"));
  REQUIRE(v.cex);
  CHECK(v.cex->inputs == std::vector<PartialValue>{B()});
  CHECK(*v.cex->tmpl == C("C", {B()}));

  auto se = load("sortequiv.flp");
  auto s = check_equiv(se, task_of(se, "sort_equiv"));
  REQUIRE(s.cex);
  CHECK(s.cex->inputs.at(0).size() + s.cex->tmpl->size() <= 5);

  auto pr = load("primes.flp");
  auto q = check_equiv(pr, task_of(pr, "primes_equiv"));
  REQUIRE(q.cex);
  int heads = 0;
  for (const PartialValue* n = &*q.cex->tmpl; n->kind == PartialValue::Kind::Ctor && n->name == "Cons";
       n = &n->args[1])
    heads += n->args[0].is_bottom() ? 0 : 1;
  CHECK(heads <= 5);
}

TEST_CASE("minimization keeps the disagreement and is idempotent") {
  auto p = load("revrev.flp");
  auto t = task_of(p, "revrev_equiv");
  Counterexample big{{cons(I(0), cons(I(1), B()))}, cons(I(0), cons(I(1), B())), Reachability::No,
                     Reachability::Yes, false};
  REQUIRE(replay(p, t, big));
  auto small = minimize_counterexample(p, t, big);
  check_witness(p, t, small);
  CHECK(small.inputs.at(0).size() + small.tmpl->size() < big.inputs.at(0).size() + big.tmpl->size());
  auto again = minimize_counterexample(p, t, small);
  CHECK(again.inputs == small.inputs);
  CHECK(*again.tmpl == *small.tmpl);
}

TEST_CASE("equivalences hold up to the bound") {
  auto mc = load("mc91.flp");
  auto m = check_equiv(mc, task_of(mc, "mc91r_equiv_mc91n"));
  CHECK(m.mode == Mode::PartialSet);
  CHECK(m.outcome == Verdict::Outcome::EquivalentUpToBound);
  CHECK_FALSE(m.cex);

  auto fac = load("fac.flp");
  auto f = check_spec(fac, "fac");
  REQUIRE(f.size() == 1);
  CHECK(f[0].outcome == Verdict::Outcome::EquivalentUpToBound);
  CHECK(f[0].tests_run > 0);

  auto ex = load("examples.flp");
  CHECK(check_equiv(ex, pair("neg", "neg")).outcome == Verdict::Outcome::EquivalentUpToBound);
  CHECK(check_equiv(ex, pair("notnot", "idBool")).outcome == Verdict::Outcome::EquivalentUpToBound);
}

TEST_CASE("ground mode misses contextual differences") {
  struct Case {
    const char* file;
    std::string lhs, rhs;
  };
  for (const auto& c : std::vector<Case>{{"ex1.flp", "f", "g"},
                                         {"g12.flp", "g1", "g2"},
                                         {"ndinsert.flp", "insert", "insert'"},
                                         {"f12.flp", "f1", "f2"},
                                         {"h12.flp", "h1", "h2"},
                                         {"sortequiv.flp", "sort", "sort'"}}) {
    auto p = load(c.file);
    auto t = pair(c.lhs, c.rhs);
    auto g = check_ground_equiv(p, t);
    CHECK_MESSAGE(g.outcome == Verdict::Outcome::EquivalentUpToBound, c.file);
    CHECK_MESSAGE(g.tests_run > 0, c.file);
    CHECK_MESSAGE(check_equiv(p, t).outcome == Verdict::Outcome::Counterexample, c.file);
  }
}

TEST_CASE("mode selection") {
  auto ex = load("examples.flp");
  CHECK(select_mode(pair("neg", "neg"), ex).mode == Mode::Ground);
  CHECK(select_mode(pair("notnot", "idBool"), ex).mode == Mode::PartialSet);
  CHECK(select_mode(pair("loop", "loop"), ex).mode == Mode::PartialTemplate);
  auto ints = load("ints12.flp");
  CHECK(select_mode(task_of(ints, "ints12"), ints).mode == Mode::PartialTemplate);
  auto mc = load("mc91.flp");
  CHECK(select_mode(task_of(mc, "mc91r_equiv_mc91n"), mc).mode == Mode::PartialSet);
  auto plain = pair("mc91r", "mc91n");
  CHECK(select_mode(plain, mc).mode == Mode::PartialTemplate);
  plain.mode_override = Mode::Ground;
  CHECK(select_mode(plain, mc).mode == Mode::Ground);
  CHECK_THROWS_AS(select_mode(pair("nope", "neg"), ex), std::invalid_argument);
  CHECK_THROWS_AS(check_equiv(ex, pair("neg", "head")), std::invalid_argument);
}

TEST_CASE("the ground gate agrees with ground checking") {
  // Whenever the gate picks Ground, the partial-set search over the same
  // inputs must not find anything the ground search misses.
  for (const auto& file : corpus_files()) {
    if (file.find('/') != std::string::npos) continue;
    auto p = load(file);
    std::vector<std::string> ops;
    for (const auto& op : p.ops)
      if (p.find_signature(op.name)) ops.push_back(op.name);
    for (const auto& a : ops)
      for (const auto& b : ops) {
        if (!alpha_equivalent(*p.find_signature(a), *p.find_signature(b))) continue;
        auto t = pair(a, b);
        t.levels = 4;
        if (select_mode(t, p).mode != Mode::Ground) continue;
        t.mode_override = Mode::PartialSet;
        auto ps = check_equiv(p, t);
        auto gr = check_ground_equiv(p, t);
        CHECK_MESSAGE((ps.outcome == Verdict::Outcome::Counterexample) ==
                          (gr.outcome == Verdict::Outcome::Counterexample),
                      file, ": ", a, " vs ", b);
      }
  }
}

TEST_CASE("forced partial-set mode on infinite results stays bounded") {
  auto p = load("ints12.flp");
  auto t = task_of(p, "ints12");
  t.mode_override = Mode::PartialSet;
  t.time_limit = 10;
  auto v = check_equiv(p, t);
  CHECK(v.outcome == Verdict::Outcome::Inconclusive);
  CHECK(v.wall_seconds < 12);
  t.mode_override.reset();
  CHECK(check_equiv(p, t).outcome == Verdict::Outcome::Counterexample);
}

TEST_CASE("safe mode skips unannotated non-productive pairs") {
  auto plain = load("primes_plain.flp");
  auto t = task_of(plain, "primes_equiv");
  t.safe_mode = true;
  auto v = check_equiv(plain, t);
  CHECK(v.outcome == Verdict::Outcome::Skipped);
  CHECK(v.tests_run == 0);
  auto ann = load("primes.flp");
  auto u = task_of(ann, "primes_equiv");
  u.safe_mode = true;
  CHECK(check_equiv(ann, u).outcome == Verdict::Outcome::Counterexample);
  auto ints = load("ints12.flp");
  auto w = task_of(ints, "ints12");
  w.safe_mode = true;
  CHECK(check_equiv(ints, w).outcome == Verdict::Outcome::Counterexample);
}

TEST_CASE("strictness probe") {
  auto f12 = load("f12.flp");
  auto s2 = strict_probe(f12, "f2");
  CHECK(s2.non_strict);
  CHECK(s2.witness == C("True"));
  auto s1 = strict_probe(f12, "f1");
  CHECK_FALSE(s1.non_strict);
  CHECK(s1.complete);
  auto ex = load("examples.flp");
  CHECK_FALSE(strict_probe(ex, "idBool").non_strict);
  auto ins = strict_probe(ex, "insert");
  CHECK(ins.non_strict);
  CHECK(ins.position == 0);
  auto ex1 = load("ex1.flp");
  CHECK(strict_probe(ex1, "f").witness == C("C", {B()}));
}

TEST_CASE("a strictness mismatch is caught at the undefined input") {
  // Exactly one side non-strict with a complete probe on the other: the
  // checker must report a counterexample whose input is ⊥.
  for (const auto& [file, a, b] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"f12.flp", "f1", "f2"}, {"ex1.flp", "f", "g"}, {"examples.flp", "idBool", "notnot"}}) {
    auto p = load(file);
    auto pa = strict_probe(p, a);
    auto pb = strict_probe(p, b);
    if (pa.non_strict == pb.non_strict) continue;
    auto v = check_equiv(p, pair(a, b));
    REQUIRE_MESSAGE(v.cex, file);
    CHECK(v.cex->inputs == std::vector<PartialValue>{B()});
  }
}

TEST_CASE("specifications and preconditions") {
  auto qs = load("quicksort.flp");
  CHECK(specified_operations(qs) == std::vector<std::string>{"sort"});
  auto q = check_spec(qs, "sort");
  REQUIRE(q.size() == 1);
  CHECK(q[0].outcome == Verdict::Outcome::Counterexample);
  REQUIRE(q[0].cex);
  check_witness(qs, pair("sort", "sort'spec"), *q[0].cex);

  auto nd = load("ndinsert_spec.flp");
  auto n = check_spec(nd, "ndinsert");
  REQUIRE(n.size() == 1);
  REQUIRE(n[0].cex);
  CHECK(n[0].cex->inputs == std::vector<PartialValue>{B(), B()});
  CHECK(*n[0].cex->tmpl == cons(B(), B()));

  auto ex = load("examples.flp");
  CHECK_THROWS_AS(check_spec(ex, "neg"), std::invalid_argument);
}

TEST_CASE("postconditions") {
  auto src = R"(
dbl :: Int -> Int
dbl x = x + x

dbl'post :: Int -> Int -> Bool
dbl'post x y = y == 2 * x

sq :: Int -> Int
sq x = x * x + 1

sq'post :: Int -> Int -> Bool
sq'post x y = y == x * x
)";
  auto r = parse_program(src);
  REQUIRE(r.ok());
  const auto& p = *r.program;
  auto d = check_spec(p, "dbl");
  REQUIRE(d.size() == 1);
  CHECK(d[0].outcome == Verdict::Outcome::EquivalentUpToBound);
  auto s = check_spec(p, "sq");
  REQUIRE(s.size() == 1);
  REQUIRE(s[0].cex);
  CHECK(s[0].cex->postcondition);
  CHECK(s[0].cex->inputs == std::vector<PartialValue>{I(0)});
  CHECK(*s[0].cex->tmpl == I(1));
  CHECK(replay(p, pair("sq", "sq'post"), *s[0].cex));
}

TEST_CASE("checking is deterministic") {
  auto p = load("sortpermute.flp");
  auto t = task_of(p, "sort_permute");
  auto a = check_equiv(p, t);
  auto b = check_equiv(p, t);
  REQUIRE(a.cex);
  REQUIRE(b.cex);
  CHECK(a.cex->inputs == b.cex->inputs);
  CHECK(*a.cex->tmpl == *b.cex->tmpl);
  CHECK(a.tests_run == b.tests_run);
  CHECK(a.branches == b.branches);
}
