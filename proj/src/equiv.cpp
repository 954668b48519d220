#include "flp/equiv.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

#include "flp/lang.hpp"

namespace flp {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::PartialTemplate: return "partial-template";
    case Mode::PartialSet: return "partial-set";
    case Mode::Ground: return "ground";
  }
  return "?";
}

const char* to_string(Verdict::Outcome o) {
  switch (o) {
    case Verdict::Outcome::EquivalentUpToBound: return "equivalent-up-to-bound";
    case Verdict::Outcome::Counterexample: return "counterexample";
    case Verdict::Outcome::Inconclusive: return "inconclusive";
    case Verdict::Outcome::Skipped: return "skipped";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

const OpDecl& require_op(const Program& p, const std::string& name) {
  const auto* op = p.find_op(name);
  if (!op) throw std::invalid_argument("unknown operation '" + name + "'");
  return *op;
}

const Signature& require_signature(const Program& p, const std::string& name) {
  require_op(p, name);
  const auto* sig = p.find_signature(name);
  if (!sig) throw std::invalid_argument("operation '" + name + "' has no type signature");
  return *sig;
}

bool flat_type(const Program& p, const Type& t0) {
  Type t = instantiate(t0);
  if (t.kind == Type::Kind::Int) return true;
  const auto* decl = p.find_type(t.name);
  if (!decl) return false;
  for (const auto& c : decl->ctors)
    if (!c.args.empty()) return false;
  return true;
}

// Total deterministic operations whose arguments are flat and matched by a
// constructor or literal in every rule: any ⊥ argument yields only ⊥, so
// total inputs decide equivalence.
bool ground_gate(Analyzer& a, const Program& p, const std::string& op) {
  if (!a.totally_defined(op).proven() || !a.deterministic(op).proven()) return false;
  const auto& sig = require_signature(p, op);
  for (const auto& t : sig.params)
    if (!flat_type(p, t)) return false;
  for (const auto& r : require_op(p, op).rules)
    for (const auto& pat : r.params)
      if (pat.kind == Pattern::Kind::Var || pat.kind == Pattern::Kind::Wildcard) return false;
  return true;
}

PartialValue fill(const PartialValue& shape, const std::vector<std::int64_t>& ints, std::size_t& i) {
  if (shape.kind == PartialValue::Kind::Int) return PartialValue::integer(ints.at(i++));
  PartialValue out = shape;
  for (auto& a : out.args) a = fill(a, ints, i);
  return out;
}

// Pre-order positions of non-bottom nodes, each as a child-index path.
void positions(const PartialValue& v, std::vector<std::size_t>& cur,
               std::vector<std::vector<std::size_t>>& out) {
  if (v.is_bottom()) return;
  out.push_back(cur);
  for (std::size_t i = 0; i < v.args.size(); ++i) {
    cur.push_back(i);
    positions(v.args[i], cur, out);
    cur.pop_back();
  }
}

PartialValue bottom_at(const PartialValue& v, const std::vector<std::size_t>& path, std::size_t k = 0) {
  if (k == path.size()) return PartialValue::bottom();
  PartialValue out = v;
  out.args[path[k]] = bottom_at(v.args[path[k]], path, k + 1);
  return out;
}

class Runner {
 public:
  Runner(const Program& prog, const EquivTask& task, bool same_signature = true)
      : prog_(prog), task_(task), ev_(prog), start_(Clock::now()) {
    const auto& ls = require_signature(prog, task.lhs);
    const auto& rs = require_signature(prog, task.rhs);
    if (same_signature && !alpha_equivalent(ls, rs))
      throw std::invalid_argument("signatures of '" + task.lhs + "' and '" + task.rhs + "' differ");
    for (const auto& t : ls.params) params_.push_back(instantiate(t));
    result_ = instantiate(ls.result);
    for (const auto& pre : task.preconditions) require_op(prog, pre);
    if (task.time_limit > 0)
      deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(task.time_limit));
    verdict_.lhs = task.lhs;
    verdict_.rhs = task.rhs;
  }

  Verdict run(Mode mode) {
    verdict_.mode = mode;
    switch (mode) {
      case Mode::PartialTemplate:
        if (!probe_fast_path()) partial_template();
        break;
      case Mode::PartialSet:
        if (!probe_fast_path()) partial_set();
        break;
      case Mode::Ground: ground(); break;
    }
    finish();
    return verdict_;
  }

  Counterexample minimize(Counterexample cex) {
    auto agrees = [&](const std::vector<PartialValue>& in, const PartialValue& t) {
      if (!accepted(in)) return false;
      return reach(task_.lhs, in, t) == cex.lhs && reach(task_.rhs, in, t) == cex.rhs;
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < cex.inputs.size() && !changed; ++i) {
        std::vector<std::vector<std::size_t>> ps;
        std::vector<std::size_t> cur;
        positions(cex.inputs[i], cur, ps);
        for (const auto& p : ps) {
          auto in = cex.inputs;
          in[i] = bottom_at(in[i], p);
          if (agrees(in, *cex.tmpl)) {
            cex.inputs = std::move(in);
            changed = true;
            break;
          }
        }
      }
      if (changed) continue;
      std::vector<std::vector<std::size_t>> ps;
      std::vector<std::size_t> cur;
      positions(*cex.tmpl, cur, ps);
      for (const auto& p : ps) {
        auto t = bottom_at(*cex.tmpl, p);
        if (agrees(cex.inputs, t)) {
          cex.tmpl = std::move(t);
          changed = true;
          break;
        }
      }
    }
    return cex;
  }

  Reachability reach(const std::string& op, const std::vector<PartialValue>& in, const PartialValue& t) {
    SearchStats st;
    auto r = ev_.reach(call(op, in), t, cfg(), &st);
    verdict_.branches += st.branches;
    return r;
  }

  bool accepted(const std::vector<PartialValue>& in) {
    if (task_.preconditions.empty()) return true;
    if (auto it = accepted_.find(in); it != accepted_.end()) return it->second;
    bool ok = true;
    for (const auto& pre : task_.preconditions) {
      auto r = ev_.values(call(pre, in), cfg());
      verdict_.branches += r.stats.branches;
      bool all_true = r.complete && !r.outcomes.empty();
      for (const auto& v : r.outcomes) all_true = all_true && v == PartialValue::ctor("True");
      ok = ok && all_true;
    }
    return accepted_[in] = ok;
  }

  const Evaluator& evaluator() const { return ev_; }
  EvalConfig cfg() const {
    EvalConfig c = task_.eval;
    if (deadline_ && (!c.deadline || *deadline_ < *c.deadline)) c.deadline = deadline_;
    return c;
  }
  ExprPtr call(const std::string& op, const std::vector<PartialValue>& in) const {
    std::vector<ExprPtr> args;
    for (const auto& v : in) args.push_back(partial_to_expr(v));
    return mk::call(op, std::move(args));
  }
  Verdict& verdict() { return verdict_; }
  const std::vector<Type>& params() const { return params_; }
  void finish() {
    verdict_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    if (verdict_.outcome == Verdict::Outcome::Counterexample) return;
    if (stop_reason_ == "time limit reached") {
      verdict_.outcome = Verdict::Outcome::Inconclusive;
      verdict_.reason = stop_reason_;
    } else if (verdict_.unknown_tests > 0) {
      verdict_.outcome = Verdict::Outcome::Inconclusive;
      verdict_.reason = std::to_string(verdict_.unknown_tests) + " test(s) exhausted a budget";
    } else {
      verdict_.outcome = Verdict::Outcome::EquivalentUpToBound;
      verdict_.reason = stop_reason_;
    }
  }

 private:
  const Program& prog_;
  const EquivTask& task_;
  Evaluator ev_;
  std::vector<Type> params_;
  Type result_;
  Clock::time_point start_;
  std::optional<Clock::time_point> deadline_;
  Verdict verdict_;
  std::map<std::vector<PartialValue>, bool> accepted_;
  std::string stop_reason_;

  bool stop() {
    if (deadline_ && Clock::now() > *deadline_) {
      stop_reason_ = "time limit reached";
      return true;
    }
    if (verdict_.tests_run >= task_.max_tests) {
      stop_reason_ = "test limit reached";
      return true;
    }
    return false;
  }

  void found(Counterexample cex) {
    cex = minimize(std::move(cex));
    verdict_.outcome = Verdict::Outcome::Counterexample;
    verdict_.cex = std::move(cex);
  }

  // One side strict, the other demonstrably not: the ⊥ input separates them.
  bool probe_fast_path() {
    if (params_.size() != 1) return false;
    auto l = strict_probe(prog_, task_.lhs, cfg());
    auto r = strict_probe(prog_, task_.rhs, cfg());
    const StrictProbe* lazy = nullptr;
    if (l.non_strict && !r.non_strict && r.complete) lazy = &l;
    if (r.non_strict && !l.non_strict && l.complete) lazy = &r;
    if (!lazy) return false;
    std::vector<PartialValue> in{PartialValue::bottom()};
    if (!accepted(in)) return false;
    Counterexample cex{in, lazy->witness, Reachability::No, Reachability::No, false};
    (lazy == &l ? cex.lhs : cex.rhs) = Reachability::Yes;
    ++verdict_.tests_run;
    if (reach(task_.lhs, in, *cex.tmpl) != cex.lhs || reach(task_.rhs, in, *cex.tmpl) != cex.rhs)
      return false;
    found(std::move(cex));
    return true;
  }

  std::vector<std::vector<PartialValue>>& inputs_of(PartialEnumerator& en, int w) {
    while (static_cast<int>(inputs_.size()) <= w)
      inputs_.push_back(en.tuples_of_weight(params_, static_cast<int>(inputs_.size())));
    return inputs_[w];
  }
  std::vector<std::vector<std::vector<PartialValue>>> inputs_;

  void partial_template() {
    PartialEnumerator inputs(prog_, integer_ring(task_.levels));
    PartialEnumerator shapes(prog_, {0});
    for (int total = 1; total <= task_.levels + task_.template_levels; ++total) {
      for (int w = 0; w <= std::min(total, task_.levels); ++w) {
        int s = total - w;
        if (s < 1 || s > task_.template_levels) continue;
        for (const auto& in : inputs_of(inputs, w)) {
          if (!accepted(in)) continue;
          for (const auto& shape : shapes.of_weight(result_, s)) {
            if (stop()) return;
            ++verdict_.tests_run;
            if (compare_shape(in, shape)) return;
          }
        }
      }
    }
  }

  bool compare_shape(const std::vector<PartialValue>& in, const PartialValue& shape) {
    auto l = ev_.observe_shape(call(task_.lhs, in), shape, cfg());
    auto r = ev_.observe_shape(call(task_.rhs, in), shape, cfg());
    verdict_.branches += l.stats.branches + r.stats.branches;
    auto one_sided = [&](const ShapeObservation& has, const ShapeObservation& lacks, bool lhs_has) {
      if (!lacks.complete) return false;
      for (const auto& v : has.vectors)
        if (!lacks.vectors.count(v)) {
          std::size_t i = 0;
          Counterexample cex{in, fill(shape, v, i), Reachability::No, Reachability::No, false};
          (lhs_has ? cex.lhs : cex.rhs) = Reachability::Yes;
          found(std::move(cex));
          return true;
        }
      return false;
    };
    if (one_sided(l, r, true) || one_sided(r, l, false)) return true;
    if (!l.complete || !r.complete) ++verdict_.unknown_tests;
    return false;
  }

  void partial_set() {
    PartialEnumerator inputs(prog_, integer_ring(task_.levels));
    for (int w = 0; w <= task_.levels; ++w)
      for (const auto& in : inputs_of(inputs, w)) {
        if (!accepted(in)) continue;
        if (stop()) return;
        ++verdict_.tests_run;
        auto l = ev_.maximal_partials(call(task_.lhs, in), cfg());
        auto r = ev_.maximal_partials(call(task_.rhs, in), cfg());
        verdict_.branches += l.stats.branches + r.stats.branches;
        if (one_sided_set(in, l, r, true) || one_sided_set(in, r, l, false)) return;
        if (!l.complete || !r.complete) ++verdict_.unknown_tests;
      }
  }

  bool one_sided_set(const std::vector<PartialValue>& in, const OutcomeSet& has, const OutcomeSet& lacks,
                     bool lhs_has) {
    if (!lacks.complete) return false;
    for (const auto& t : has.outcomes)
      if (!covered(lacks.outcomes, t)) {
        Counterexample cex{in, t, Reachability::No, Reachability::No, false};
        (lhs_has ? cex.lhs : cex.rhs) = Reachability::Yes;
        found(std::move(cex));
        return true;
      }
    return false;
  }

  void ground() {
    PartialEnumerator inputs(prog_, integer_ring(task_.levels));
    for (int w = 0; w <= task_.levels; ++w)
      for (const auto& in : inputs_of(inputs, w)) {
        bool total = true;
        for (const auto& v : in) total = total && v.is_total();
        if (!total || !accepted(in)) continue;
        if (stop()) return;
        ++verdict_.tests_run;
        auto l = ev_.values(call(task_.lhs, in), cfg());
        auto r = ev_.values(call(task_.rhs, in), cfg());
        verdict_.branches += l.stats.branches + r.stats.branches;
        auto one_sided = [&](const OutcomeSet& has, const OutcomeSet& lacks, bool lhs_has) {
          if (!lacks.complete) return false;
          for (const auto& v : has.outcomes)
            if (!lacks.outcomes.count(v)) {
              Counterexample cex{in, v, Reachability::No, Reachability::No, false};
              (lhs_has ? cex.lhs : cex.rhs) = Reachability::Yes;
              verdict_.outcome = Verdict::Outcome::Counterexample;
              verdict_.cex = std::move(cex);
              return true;
            }
          return false;
        };
        if (one_sided(l, r, true) || one_sided(r, l, false)) return;
        if (!l.complete || !r.complete) ++verdict_.unknown_tests;
      }
  }
};

Verdict skipped(const EquivTask& task, Mode mode, std::string reason) {
  Verdict v;
  v.outcome = Verdict::Outcome::Skipped;
  v.mode = mode;
  v.lhs = task.lhs;
  v.rhs = task.rhs;
  v.reason = std::move(reason);
  return v;
}

}  // namespace

ModeChoice select_mode(const EquivTask& task, const Program& program) {
  require_op(program, task.lhs);
  require_op(program, task.rhs);
  Analyzer a(program);
  ModeChoice c;
  if (task.mode_override) {
    c.mode = *task.mode_override;
    c.reason = "mode forced";
  } else if (ground_gate(a, program, task.lhs) && ground_gate(a, program, task.rhs)) {
    c.mode = Mode::Ground;
    c.reason = "both total, deterministic and strict on flat arguments";
  } else if (task.annotation == Annotation::Terminate) {
    c.mode = Mode::PartialSet;
    c.reason = "annotated as terminating";
  } else if (a.termination(task.lhs).proven() && a.termination(task.rhs).proven()) {
    c.mode = Mode::PartialSet;
    c.reason = "both terminate";
  } else {
    c.mode = Mode::PartialTemplate;
    c.reason = "termination not established";
  }
  if (task.safe_mode && c.mode == Mode::PartialTemplate && task.annotation != Annotation::Productive &&
      !(a.productivity(task.lhs).proven() && a.productivity(task.rhs).proven())) {
    c.skipped = true;
    c.reason = "safe mode: productivity not established and no 'PRODUCTIVE annotation";
  }
  return c;
}

Verdict check_equiv(const Program& program, const EquivTask& task) {
  Verdict out;
  with_large_stack([&] {
    auto choice = select_mode(task, program);
    Runner runner(program, task);
    if (choice.skipped) {
      out = skipped(task, choice.mode, choice.reason);
      return;
    }
    out = runner.run(choice.mode);
  });
  return out;
}

Verdict check_ground_equiv(const Program& program, const EquivTask& task) {
  Verdict out;
  with_large_stack([&] { out = Runner(program, task).run(Mode::Ground); });
  return out;
}

Counterexample minimize_counterexample(const Program& program, const EquivTask& task,
                                       const Counterexample& cex) {
  if (!cex.tmpl) return cex;
  Counterexample out;
  with_large_stack([&] { out = Runner(program, task).minimize(cex); });
  return out;
}

bool replay(const Program& program, const EquivTask& task, const Counterexample& cex) {
  if (!cex.tmpl) return false;
  bool ok = false;
  with_large_stack([&] {
    Runner r(program, task, !cex.postcondition);
    if (cex.postcondition) {
      auto value = r.reach(task.lhs, cex.inputs, *cex.tmpl);
      auto in = cex.inputs;
      in.push_back(*cex.tmpl);
      auto post = r.evaluator().values(r.call(task.rhs, in), r.cfg());
      ok = value == Reachability::Yes && post.complete &&
           !post.outcomes.count(PartialValue::ctor("True"));
      return;
    }
    ok = r.reach(task.lhs, cex.inputs, *cex.tmpl) == cex.lhs &&
         r.reach(task.rhs, cex.inputs, *cex.tmpl) == cex.rhs;
  });
  return ok;
}

StrictProbe strict_probe(const Program& program, const std::string& op, const EvalConfig& cfg) {
  const auto& sig = require_signature(program, op);
  StrictProbe out;
  out.complete = true;
  with_large_stack([&] {
    Evaluator ev(program);
    std::vector<PartialValue> firsts;
    for (const auto& t : sig.params) {
      PartialValue first = PartialValue::bottom();
      auto plan = LevelPlan::standard(instantiate(t), 8);
      for (auto& v : enumerate_partial_values(program, plan))
        if (v.is_total()) {
          first = std::move(v);
          break;
        }
      firsts.push_back(std::move(first));
    }
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
      auto in = firsts;
      in[i] = PartialValue::bottom();
      std::vector<ExprPtr> args;
      for (const auto& v : in) args.push_back(partial_to_expr(v));
      auto r = ev.maximal_partials(mk::call(op, std::move(args)), cfg);
      out.complete = out.complete && r.complete;
      for (const auto& t : r.outcomes)
        if (!t.is_bottom()) {
          out.non_strict = true;
          out.position = i;
          out.inputs = std::move(in);
          out.witness = t;
          return;
        }
    }
  });
  return out;
}

std::vector<std::string> specified_operations(const Program& program) {
  std::vector<std::string> out;
  for (const auto& op : program.ops)
    if (program.find_op(op.name + "'spec") || program.find_op(op.name + "'post")) out.push_back(op.name);
  return out;
}

std::vector<Verdict> check_spec(const Program& program, const std::string& op, const EquivTask& base) {
  require_op(program, op);
  const std::string spec = op + "'spec";
  const std::string post = op + "'post";
  if (!program.find_op(spec) && !program.find_op(post))
    throw std::invalid_argument("operation '" + op + "' has no specification or postcondition");
  std::vector<std::string> pres;
  for (const auto& name : {op + "'pre", spec + "'pre"})
    if (program.find_op(name)) pres.push_back(name);
  std::vector<Verdict> out;
  if (program.find_op(spec)) {
    EquivTask t = base;
    t.lhs = op;
    t.rhs = spec;
    t.annotation = Annotation::None;
    t.preconditions = pres;
    out.push_back(check_equiv(program, t));
  }
  if (program.find_op(post)) {
    EquivTask t = base;
    t.lhs = op;
    t.rhs = post;
    t.preconditions = pres;
    Verdict v;
    with_large_stack([&] {
      const auto& sig = require_signature(program, op);
      const auto& psig = require_signature(program, post);
      if (psig.params.size() != sig.params.size() + 1)
        throw std::invalid_argument("postcondition '" + post + "' must take the inputs and the result");
      Runner r(program, t, false);
      auto& verdict = r.verdict();
      verdict.mode = Mode::Ground;
      std::vector<Type> params;
      for (const auto& p : sig.params) params.push_back(instantiate(p));
      PartialEnumerator en(program, integer_ring(t.levels));
      bool done = false;
      for (int w = 0; w <= t.levels && !done; ++w)
        for (const auto& in : en.tuples_of_weight(params, w)) {
          if (!r.accepted(in)) continue;
          if (verdict.tests_run >= t.max_tests) break;
          ++verdict.tests_run;
          auto vals = r.evaluator().values(r.call(op, in), r.cfg());
          if (!vals.complete) ++verdict.unknown_tests;
          for (const auto& value : vals.outcomes) {
            auto args = in;
            args.push_back(value);
            auto ok = r.evaluator().values(r.call(post, args), r.cfg());
            if (ok.outcomes.count(PartialValue::ctor("True"))) continue;
            if (!ok.complete) {
              ++verdict.unknown_tests;
              continue;
            }
            verdict.outcome = Verdict::Outcome::Counterexample;
            verdict.cex = Counterexample{in, value, Reachability::Yes, Reachability::No, true};
            done = true;
            break;
          }
          if (done) break;
        }
      r.finish();
      v = verdict;
    });
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace flp
