#include <doctest.h>

#include "corpus.hpp"
#include "flp/analysis.hpp"
#include "flp/eval.hpp"
#include "flp/partial.hpp"

using namespace flp;

namespace {

bool proven(AnalysisVerdict v) { return v.proven(); }

Program parse_ok(const std::string& src) {
  auto r = parse_program(src);
  for (const auto& d : r.diagnostics) MESSAGE(d.str());
  REQUIRE(r.ok());
  return *r.program;
}

// Total argument tuples whose summed size is at most `limit`.
std::vector<std::vector<PartialValue>> total_inputs(const Program& p, const Signature& sig, int limit) {
  std::vector<std::vector<PartialValue>> out{{}};
  for (const auto& t : sig.params) {
    std::vector<PartialValue> vals;
    for (auto& v : enumerate_partial_values(p, LevelPlan::standard(t, limit)))
      if (v.is_total()) vals.push_back(std::move(v));
    std::vector<std::vector<PartialValue>> next;
    for (const auto& pre : out) {
      int used = 0;
      for (const auto& v : pre) used += v.size();
      for (const auto& v : vals)
        if (used + v.size() <= limit) {
          next.push_back(pre);
          next.back().push_back(v);
        }
    }
    out = std::move(next);
  }
  return out;
}

ExprPtr apply(const std::string& op, const std::vector<PartialValue>& args) {
  std::vector<ExprPtr> es;
  for (const auto& a : args) es.push_back(partial_to_expr(a));
  return mk::call(op, std::move(es));
}

}  // namespace

TEST_CASE("termination examples") {
  CHECK_FALSE(proven(termination_check(load("mc91.flp"), "mc91r")));
  CHECK(proven(termination_check(load("mc91.flp"), "mc91n")));
  auto ex = load("examples.flp");
  CHECK(proven(termination_check(ex, "neg")));
  CHECK(proven(termination_check(ex, "perm")));
  CHECK(proven(termination_check(ex, "insert")));
  CHECK_FALSE(proven(termination_check(ex, "fromTo")));
  CHECK_FALSE(proven(termination_check(ex, "loop")));
  CHECK(proven(termination_check(load("revrev.flp"), "revrev")));
  CHECK_FALSE(proven(termination_check(load("ints12.flp"), "ints1")));
  CHECK_FALSE(proven(termination_check(load("quicksort.flp"), "sort")));
  CHECK(proven(termination_check(load("quicksort.flp"), "sort'spec")));
  CHECK_THROWS_AS(termination_check(ex, "nope"), std::invalid_argument);
}

TEST_CASE("termination needs a consistent decreasing position") {
  auto p = parse_ok(
      "data N = Z | S N\n"
      "swap :: N -> N -> N\n"
      "swap Z y = y\n"
      "swap (S x) y = swap y x\n"
      "even :: N -> Bool\n"
      "even Z = True\n"
      "even (S n) = odd n\n"
      "odd :: N -> Bool\n"
      "odd Z = False\n"
      "odd (S n) = even n\n"
      "down :: N -> N\n"
      "down n = case n of\n"
      "  Z -> Z\n"
      "  S m -> down m\n"
      "cyc :: N -> [N]\n"
      "cyc n = len xs where xs = n : xs\n"
      "len :: [N] -> [N]\n"
      "len [] = []\n"
      "len (_:ys) = len ys\n");
  CHECK_FALSE(proven(termination_check(p, "swap")));
  CHECK(proven(termination_check(p, "even")));
  CHECK(proven(termination_check(p, "down")));
  CHECK(proven(termination_check(p, "len")));
  CHECK_FALSE(proven(termination_check(p, "cyc")));
}

TEST_CASE("productivity examples") {
  CHECK(proven(productivity_check(load("ints12.flp"), "ints1")));
  auto primes = load("primes.flp");
  CHECK_FALSE(proven(productivity_check(primes, "primes")));
  CHECK(proven(productivity_check(primes, "dummy_primes")));
  CHECK(proven(productivity_check(primes, "fromStep")));
  CHECK_FALSE(proven(productivity_check(load("examples.flp"), "loop")));
  CHECK(proven(productivity_check(load("examples.flp"), "perm")));
  auto p = parse_ok(
      "data C = C Bool\n"
      "unC :: C -> Bool\n"
      "unC (C b) = b\n"
      "hidden :: Bool -> Bool\n"
      "hidden x = unC (C (hidden x))\n"
      "twice :: [Int] -> [Int]\n"
      "twice (x:xs) = x : twice (twice xs)\n");
  CHECK_FALSE(proven(productivity_check(p, "hidden")));
  CHECK_FALSE(proven(productivity_check(p, "twice")));
}

TEST_CASE("determinism examples") {
  auto ex = load("examples.flp");
  CHECK_FALSE(proven(deterministic_check(ex, "insert")));
  CHECK_FALSE(proven(deterministic_check(ex, "perm")));
  CHECK_FALSE(proven(deterministic_check(ex, "coin")));
  CHECK(proven(deterministic_check(ex, "double")));
  CHECK(proven(deterministic_check(ex, "neg")));
  auto f12 = load("f12.flp");
  CHECK(proven(deterministic_check(f12, "f1")));
  CHECK(proven(deterministic_check(f12, "f2")));
  CHECK_FALSE(proven(deterministic_check(load("sortequiv.flp"), "idSorted")));
}

TEST_CASE("totality examples") {
  auto ex = load("examples.flp");
  CHECK(proven(totally_defined_check(ex, "neg")));
  CHECK(proven(totally_defined_check(ex, "notnot")));
  CHECK_FALSE(proven(totally_defined_check(ex, "head")));
  CHECK_FALSE(proven(totally_defined_check(load("ex1.flp"), "h")));
  CHECK_FALSE(proven(totally_defined_check(load("ex1.flp"), "f")));
  CHECK(proven(totally_defined_check(load("ex1.flp"), "k")));
  CHECK_FALSE(proven(totally_defined_check(load("sortequiv.flp"), "idSorted")));
  CHECK(proven(totally_defined_check(load("revrev.flp"), "revrev")));
  CHECK_FALSE(proven(totally_defined_check(load("primes.flp"), "filterMod")));
}

TEST_CASE("pattern matrices") {
  auto p = parse_ok("data AB = A | B\n");
  using P = Pattern;
  auto cons = [](P h, P t) { return P::ctor("Cons", {std::move(h), std::move(t)}); };
  CHECK(exhaustive(p, {{P::ctor("A")}, {P::ctor("B")}}));
  CHECK_FALSE(exhaustive(p, {{P::ctor("A")}}));
  CHECK(exhaustive(p, {{P::ctor("Nil")}, {cons(P::wildcard(), P::var("xs"))}}));
  CHECK_FALSE(exhaustive(p, {{P::ctor("Nil")}, {cons(P::wildcard(), P::ctor("Nil"))}}));
  CHECK_FALSE(exhaustive(p, {{P::integer(0)}}));
  CHECK(exhaustive(p, {{P::integer(0)}, {P::var("n")}}));
  CHECK(exhaustive(p, {{P::ctor("A"), P::wildcard()}, {P::wildcard(), P::ctor("B")}, {P::ctor("B"), P::ctor("A")}}));
  CHECK(overlap({P::var("x"), P::var("ys")}, {P::var("x"), cons(P::var("y"), P::var("ys"))}));
  CHECK_FALSE(overlap({P::ctor("A")}, {P::ctor("B")}));
  CHECK_FALSE(overlap({P::integer(1)}, {P::integer(2)}));
}

TEST_CASE("proven verdicts hold on small total inputs") {
  EvalConfig cfg;
  for (const auto& file : corpus_files()) {
    auto p = load(file);
    Analyzer a(p);
    Evaluator ev(p);
    for (const auto& op : p.ops) {
      const auto* sig = p.find_signature(op.name);
      if (!sig) continue;
      bool term = a.termination(op.name).proven();
      bool prod = a.productivity(op.name).proven();
      bool total = a.totally_defined(op.name).proven();
      if (!term && !prod) continue;
      for (const auto& args : total_inputs(p, *sig, 4)) {
        auto call = apply(op.name, args);
        if (term) {
          auto r = ev.values(call, cfg);
          CHECK_MESSAGE(r.complete, file, ": ", op.name, " diverged");
          if (total) CHECK_MESSAGE(!r.outcomes.empty(), file, ": ", op.name, " not total");
        }
        if (prod) {
          auto head = mk::case_(call, {Alt{Pattern::wildcard(), mk::ctor("True")}});
          auto r = ev.values(head, cfg);
          CHECK_MESSAGE(r.complete, file, ": ", op.name, " not productive");
        }
      }
    }
  }
}

TEST_CASE("verdicts ignore unrelated operations") {
  auto base = read_corpus("examples.flp");
  auto p = parse_ok(base);
  auto q = parse_ok(base + "\nextra :: Int -> Int\nextra n = extra (n + 1) ? failed\n");
  auto a = analyze_program(p);
  auto b = analyze_program(q);
  REQUIRE(b.size() == a.size() + 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].termination.status == b[i].termination.status);
    CHECK(a[i].productivity.status == b[i].productivity.status);
    CHECK(a[i].deterministic.status == b[i].deterministic.status);
    CHECK(a[i].totally_defined.status == b[i].totally_defined.status);
  }
}
