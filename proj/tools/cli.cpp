#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "flp/analysis.hpp"
#include "flp/equiv.hpp"
#include "flp/eval.hpp"
#include "flp/lang.hpp"
#include "flp/semver.hpp"

namespace flp::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file;
  std::string file2;
  std::string expr;
  std::string lhs;
  std::string rhs;
  std::vector<std::string> ops;
  std::vector<std::string> pre;
  std::string mode = "auto";
  std::string annotation = "none";
  std::string old_version;
  std::string new_version;
  long steps = EvalConfig{}.step_budget;
  long branches = EvalConfig{}.branch_budget;
  int depth = EvalConfig{}.depth_budget;
  int levels = EquivTask{}.levels;
  int template_levels = EquivTask{}.template_levels;
  long max_tests = EquivTask{}.max_tests;
  double time_limit = 0;
  bool safe = false;
  bool unsafe = false;
  bool json = false;
  bool partials = false;
};

Program load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto r = parse_program(ss.str());
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += (msg.empty() ? "" : "\n") + path + ":" + d.str();
    throw UsageError(msg);
  }
  return std::move(*r.program);
}

EvalConfig eval_config(const Options& o) {
  EvalConfig c;
  c.step_budget = o.steps;
  c.branch_budget = o.branches;
  c.depth_budget = o.depth;
  c.validate();
  return c;
}

EquivTask base_task(const Options& o, bool safe_default) {
  EquivTask t;
  t.levels = o.levels;
  t.template_levels = o.template_levels;
  t.eval = eval_config(o);
  t.max_tests = o.max_tests;
  t.time_limit = o.time_limit;
  t.safe_mode = o.unsafe ? false : (o.safe || safe_default);
  return t;
}

const char* annotation_name(Annotation a) {
  switch (a) {
    case Annotation::Terminate: return "terminate";
    case Annotation::Productive: return "productive";
    case Annotation::None: break;
  }
  return "none";
}

const char* reach_name(Reachability r) {
  switch (r) {
    case Reachability::Yes: return "yes";
    case Reachability::No: return "no";
    case Reachability::Unknown: break;
  }
  return "unknown";
}

int severity(Verdict::Outcome o) {
  switch (o) {
    case Verdict::Outcome::EquivalentUpToBound: return kOk;
    case Verdict::Outcome::Counterexample: return kFailure;
    case Verdict::Outcome::Inconclusive:
    case Verdict::Outcome::Skipped: break;
  }
  return kInconclusive;
}

// Failure dominates inconclusive, which dominates ok.
int combine(int a, int b) {
  if (a == kFailure || b == kFailure) return kFailure;
  return std::max(a, b);
}

class Report {
 public:
  Report(std::string command, bool json) : json_(json) {
    doc_["tool"] = "flpcheck";
    doc_["version"] = kToolVersion;
    doc_["command"] = std::move(command);
    doc_["tasks"] = Json::array();
  }

  void add(Json task, int sev) {
    doc_["tasks"].push_back(std::move(task));
    status_ = combine(status_, sev);
  }
  std::ostream& text() { return text_; }

  int finish(std::ostream& out) {
    static const char* names[] = {"ok", "failed", "inconclusive"};
    doc_["status"] = names[status_];
    doc_["exit_code"] = status_;
    if (json_) {
      out << doc_.dump(2) << "\n";
    } else {
      out << text_.str() << "status: " << names[status_] << "\n";
    }
    return status_;
  }

 private:
  bool json_;
  Json doc_;
  std::ostringstream text_;
  int status_ = kOk;
};

Json verdict_json(const std::string& name, const Verdict& v, Annotation annotation) {
  Json j;
  j["kind"] = "equiv";
  j["name"] = name;
  j["lhs"] = v.lhs;
  j["rhs"] = v.rhs;
  j["annotation"] = annotation_name(annotation);
  j["mode"] = to_string(v.mode);
  j["outcome"] = to_string(v.outcome);
  j["reason"] = v.reason;
  j["tests_run"] = v.tests_run;
  j["unknown_tests"] = v.unknown_tests;
  j["branches"] = v.branches;
  if (v.cex) {
    Json c;
    c["inputs"] = Json::array();
    for (const auto& in : v.cex->inputs) c["inputs"].push_back(render(in));
    c["template"] = v.cex->tmpl ? Json(render(*v.cex->tmpl)) : Json();
    c["lhs_reaches"] = reach_name(v.cex->lhs);
    c["rhs_reaches"] = reach_name(v.cex->rhs);
    c["postcondition"] = v.cex->postcondition;
    j["counterexample"] = std::move(c);
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

void verdict_text(std::ostream& os, const std::string& name, const Verdict& v, const std::string& indent = "") {
  os << indent << name << ": " << v.lhs << " <=> " << v.rhs << "  [" << to_string(v.mode) << "]\n";
  os << indent << "  " << to_string(v.outcome) << " after " << v.tests_run << " test(s)";
  if (v.unknown_tests) os << ", " << v.unknown_tests << " unknown";
  os << ", " << std::fixed << std::setprecision(2) << v.wall_seconds << "s";
  if (!v.reason.empty()) os << " (" << v.reason << ")";
  os << "\n";
  if (!v.cex) return;
  const auto& c = *v.cex;
  for (std::size_t i = 0; i < c.inputs.size(); ++i)
    os << indent << "    input " << i + 1 << ": " << render(c.inputs[i]) << "\n";
  if (c.tmpl) {
    if (c.postcondition) {
      os << indent << "    value:    " << render(*c.tmpl) << "\n";
      os << indent << "    " << v.rhs << " does not hold for it\n";
    } else {
      os << indent << "    template: " << render(*c.tmpl) << "\n";
      os << indent << "    " << v.lhs << " reaches it: " << reach_name(c.lhs) << "; " << v.rhs
         << " reaches it: " << reach_name(c.rhs) << "\n";
    }
  }
}

Json analysis_json(const AnalysisVerdict& a) {
  Json j;
  j["status"] = a.proven() ? "proven" : "unknown";
  j["reason"] = a.reason;
  return j;
}

int cmd_eval(const Options& o, std::ostream& out) {
  auto p = load(o.file);
  auto parsed = parse_expression(o.expr, p);
  if (!parsed.expr) {
    std::string msg;
    for (const auto& d : parsed.diagnostics) msg += (msg.empty() ? "" : "\n") + d.str();
    throw UsageError(msg);
  }
  auto cfg = eval_config(o);
  OutcomeSet r;
  with_large_stack([&] {
    Evaluator ev(p);
    r = o.partials ? ev.maximal_partials(parsed.expr, cfg) : ev.values(parsed.expr, cfg);
  });
  Report rep("eval", o.json);
  Json t;
  t["kind"] = "eval";
  t["expression"] = o.expr;
  t["what"] = o.partials ? "maximal-partial-values" : "values";
  t["values"] = Json::array();
  for (const auto& v : r.outcomes) t["values"].push_back(render(v));
  t["complete"] = r.complete;
  t["branches"] = r.stats.branches;
  std::string set = "{";
  for (const auto& v : r.outcomes) set += (set.size() > 1 ? ", " : "") + render(v);
  rep.text() << set << "}" << (r.complete ? "" : "  (incomplete: a budget was exhausted)") << "\n";
  rep.add(std::move(t), r.complete ? kOk : kInconclusive);
  return rep.finish(out);
}

int cmd_analyze(const Options& o, std::ostream& out) {
  auto p = load(o.file);
  Report rep("analyze", o.json);
  Analyzer a(p);
  std::vector<std::string> ops = o.ops;
  if (ops.empty())
    for (const auto& op : p.ops) ops.push_back(op.name);
  for (const auto& op : ops) {
    if (!p.find_op(op)) throw UsageError("unknown operation '" + op + "'");
    std::pair<const char*, AnalysisVerdict> rows[] = {{"termination", a.termination(op)},
                                                      {"productivity", a.productivity(op)},
                                                      {"deterministic", a.deterministic(op)},
                                                      {"totally_defined", a.totally_defined(op)}};
    Json t;
    t["kind"] = "analysis";
    t["op"] = op;
    rep.text() << op << "\n";
    for (const auto& [name, v] : rows) {
      t[name] = analysis_json(v);
      rep.text() << "  " << std::left << std::setw(16) << name << (v.proven() ? "proven" : "unknown");
      if (!v.reason.empty()) rep.text() << ": " << v.reason;
      rep.text() << "\n";
    }
    rep.add(std::move(t), kOk);
  }
  return rep.finish(out);
}

void add_verdict(Report& rep, const std::string& name, const Verdict& v, Annotation a) {
  verdict_text(rep.text(), name, v);
  rep.add(verdict_json(name, v, a), severity(v.outcome));
}

int cmd_check(const Options& o, std::ostream& out) {
  auto p = load(o.file);
  auto base = base_task(o, false);
  Report rep("check", o.json);
  for (const auto& prop : p.props) {
    EquivTask t = base;
    t.lhs = prop.lhs;
    t.rhs = prop.rhs;
    t.annotation = prop.annotation;
    add_verdict(rep, prop.name + annotation_suffix(prop.annotation), check_equiv(p, t), prop.annotation);
  }
  for (const auto& op : specified_operations(p))
    for (const auto& v : check_spec(p, op, base)) add_verdict(rep, v.rhs, v, Annotation::None);
  if (p.props.empty() && specified_operations(p).empty()) rep.text() << "nothing to check\n";
  return rep.finish(out);
}

int cmd_equiv(const Options& o, std::ostream& out) {
  auto p = load(o.file);
  auto t = base_task(o, false);
  t.lhs = o.lhs;
  t.rhs = o.rhs;
  t.preconditions = o.pre;
  if (o.annotation == "terminate") t.annotation = Annotation::Terminate;
  if (o.annotation == "productive") t.annotation = Annotation::Productive;
  if (o.mode == "ground") t.mode_override = Mode::Ground;
  if (o.mode == "partial-set") t.mode_override = Mode::PartialSet;
  if (o.mode == "partial-template") t.mode_override = Mode::PartialTemplate;
  Report rep("equiv", o.json);
  auto v = o.mode == "ground" ? check_ground_equiv(p, t) : check_equiv(p, t);
  add_verdict(rep, o.lhs + " <=> " + o.rhs, v, t.annotation);
  return rep.finish(out);
}

int cmd_diff(const Options& o, std::ostream& out) {
  auto a = load(o.file);
  auto b = load(o.file2);
  Version va, vb;
  try {
    va = parse_version(o.old_version);
    vb = parse_version(o.new_version);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  DiffConfig cfg;
  cfg.base = base_task(o, true);
  auto d = behavior_diff(a, b, va, vb, cfg);

  Report rep("diff", o.json);
  Json t;
  t["kind"] = "diff";
  t["old_version"] = va.str();
  t["new_version"] = vb.str();
  Json api;
  api["entries"] = Json::array();
  auto& os = rep.text();
  os << "diff " << va.str() << " -> " << vb.str() << "\napi:\n";
  for (const auto& e : d.api.entries) {
    api["entries"].push_back({{"kind", to_string(e.kind)}, {"name", e.name}, {"status", to_string(e.status)}});
    os << "  " << to_string(e.kind) << " " << e.name << ": " << to_string(e.status) << "\n";
  }
  api["violations"] = Json::array();
  for (const auto& v : d.api.violations) api["violations"].push_back({{"entity", v.entity}, {"rule", v.rule}});
  t["api"] = std::move(api);
  t["behavior"] = Json::array();
  int sev = kOk;
  if (va.major != vb.major) os << "behavior: not compared (major versions differ)\n";
  else os << "behavior:\n";
  for (const auto& b : d.behavior) {
    auto j = verdict_json(b.op, b.verdict, Annotation::None);
    j["op"] = b.op;
    t["behavior"].push_back(std::move(j));
    verdict_text(os, b.op, b.verdict, "  ");
    sev = combine(sev, severity(b.verdict.outcome));
  }
  t["violations"] = d.violations;
  t["judgment"] = d.ok() ? "ok" : "violation";
  os << "judgment: " << (d.ok() ? "ok" : "violation") << "\n";
  for (const auto& v : d.violations) os << "  " << v << "\n";
  if (!d.ok()) sev = kFailure;
  rep.add(std::move(t), sev);
  return rep.finish(out);
}

void add_budgets(CLI::App* c, Options& o) {
  c->add_option("--steps", o.steps, "Rule applications per branch")->check(CLI::PositiveNumber);
  c->add_option("--branches", o.branches, "Branches per search")->check(CLI::PositiveNumber);
  c->add_option("--depth", o.depth, "Observed constructor depth")->check(CLI::PositiveNumber);
  c->add_flag("--json", o.json, "Print the report as JSON");
}

void add_equiv_options(CLI::App* c, Options& o) {
  add_budgets(c, o);
  c->add_option("--levels", o.levels, "Input weight bound")->check(CLI::NonNegativeNumber);
  c->add_option("--template-levels", o.template_levels, "Template size bound")->check(CLI::NonNegativeNumber);
  c->add_option("--max-tests", o.max_tests, "Tests per task")->check(CLI::PositiveNumber);
  c->add_option("--time-limit", o.time_limit, "Seconds per task, 0 for none")->check(CLI::NonNegativeNumber);
  auto* safe = c->add_flag("--safe", o.safe, "Skip pairs not known to be productive");
  auto* unsafe = c->add_flag("--unsafe", o.unsafe, "Check every pair");
  safe->excludes(unsafe);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Equivalence checking for a small functional-logic language", "flpcheck"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* eval = app.add_subcommand("eval", "Evaluate an expression against a program");
  eval->add_option("file", o.file)->required();
  eval->add_option("-e,--expr", o.expr, "Expression")->required();
  eval->add_flag("--partials", o.partials, "Print maximal partial values instead of values");
  add_budgets(eval, o);

  auto* analyze = app.add_subcommand("analyze", "Static verdicts per operation");
  analyze->add_option("file", o.file)->required();
  analyze->add_option("--op", o.ops, "Restrict to these operations");
  analyze->add_flag("--json", o.json, "Print the report as JSON");

  auto* check = app.add_subcommand("check", "Check every property and specification in a file");
  check->add_option("file", o.file)->required();
  add_equiv_options(check, o);

  auto* equiv = app.add_subcommand("equiv", "Check two operations of a file");
  equiv->add_option("file", o.file)->required();
  equiv->add_option("lhs", o.lhs)->required();
  equiv->add_option("rhs", o.rhs)->required();
  equiv->add_option("--mode", o.mode)->check(CLI::IsMember({"auto", "ground", "partial-set", "partial-template"}));
  equiv->add_option("--annotation", o.annotation)->check(CLI::IsMember({"none", "terminate", "productive"}));
  equiv->add_option("--pre", o.pre, "Precondition operations");
  add_equiv_options(equiv, o);

  auto* diff = app.add_subcommand("diff", "Semantic-versioning diff of two module versions");
  diff->add_option("old", o.file)->required();
  diff->add_option("new", o.file2)->required();
  diff->add_option("--old-version", o.old_version)->required();
  diff->add_option("--new-version", o.new_version)->required();
  add_equiv_options(diff, o);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "flpcheck: " << e.what() << "\n";
    return kError;
  }

  try {
    if (*eval) return cmd_eval(o, out);
    if (*analyze) return cmd_analyze(o, out);
    if (*check) return cmd_check(o, out);
    if (*equiv) return cmd_equiv(o, out);
    return cmd_diff(o, out);
  } catch (const std::exception& e) {
    err << "flpcheck: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace flp::cli
