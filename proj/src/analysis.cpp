#include "flp/analysis.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>

namespace flp {

const char* to_string(AnalysisVerdict::Status s) {
  return s == AnalysisVerdict::Status::Proven ? "proven" : "unknown";
}

namespace {

AnalysisVerdict proven(std::string why) { return {AnalysisVerdict::Status::Proven, std::move(why)}; }
AnalysisVerdict unknown(std::string why) { return {AnalysisVerdict::Status::Unknown, std::move(why)}; }

void for_each_subexpr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& a : e.args) for_each_subexpr(*a, fn);
  for (const auto& alt : e.alts) for_each_subexpr(*alt.body, fn);
  for (const auto& b : e.bindings) for_each_subexpr(*b.rhs, fn);
}

void for_each_rule_expr(const Rule& r, const std::function<void(const Expr&)>& fn) {
  if (r.guard) for_each_subexpr(*r.guard, fn);
  for_each_subexpr(*r.body, fn);
  for (const auto& b : r.where) for_each_subexpr(*b.rhs, fn);
}

int pattern_depth(const Pattern& p) {
  if (p.kind != Pattern::Kind::Ctor) return 0;
  int d = 0;
  for (const auto& a : p.args) d = std::max(d, pattern_depth(a));
  return d + 1;
}

bool mentions(const Expr& e, const std::set<std::string>& names) {
  bool hit = false;
  for_each_subexpr(e, [&](const Expr& x) { hit = hit || (x.kind == Expr::Kind::Var && names.count(x.name)); });
  return hit;
}

void pattern_vars(const Pattern& p, std::set<std::string>& out) {
  if (p.kind == Pattern::Kind::Var) out.insert(p.name);
  for (const auto& a : p.args) pattern_vars(a, out);
}

// A binding group whose right-hand sides refer back to the group can build
// cyclic data, which defeats structural descent.
bool recursive_binding(const Rule& r) {
  auto group = [](const std::vector<LetBinding>& bs) {
    std::set<std::string> names;
    for (const auto& b : bs) pattern_vars(b.lhs, names);
    for (const auto& b : bs)
      if (mentions(*b.rhs, names)) return true;
    return false;
  };
  bool hit = group(r.where);
  for_each_rule_expr(r, [&](const Expr& e) { hit = hit || (e.kind == Expr::Kind::Let && group(e.bindings)); });
  return hit;
}

bool refutable(const Program& prog, const Pattern& p) { return !exhaustive(prog, {{p}}); }

// Where a variable's value comes from, relative to the rule's parameters.
struct Origin {
  std::size_t param;
  bool strict;  // a proper subterm of the parameter
};
using Origins = std::map<std::string, Origin>;

void bind_pattern(const Pattern& p, std::optional<Origin> origin, bool below, Origins& env) {
  switch (p.kind) {
    case Pattern::Kind::Var:
      if (origin)
        env[p.name] = {origin->param, origin->strict || below};
      else
        env.erase(p.name);
      return;
    case Pattern::Kind::Ctor:
      for (const auto& a : p.args) bind_pattern(a, origin, true, env);
      return;
    default: return;
  }
}

void unbind_pattern(const Pattern& p, Origins& env) { bind_pattern(p, std::nullopt, false, env); }

// The rule's parameter patterns plus names rebound since, which no longer
// denote the pattern variables.
struct Scope {
  const std::vector<Pattern>* params = nullptr;
  std::set<std::string> shadowed;
};

bool rebuilds(const Expr& e, const Pattern& p, const Scope& sc) {
  switch (p.kind) {
    case Pattern::Kind::Var:
      return e.kind == Expr::Kind::Var && e.name == p.name && !sc.shadowed.count(e.name);
    case Pattern::Kind::Int: return e.kind == Expr::Kind::Int && e.value == p.value;
    case Pattern::Kind::Ctor:
      if (e.kind != Expr::Kind::Ctor || e.name != p.name || e.args.size() != p.args.size()) return false;
      for (std::size_t i = 0; i < p.args.size(); ++i)
        if (!rebuilds(*e.args[i], p.args[i], sc)) return false;
      return true;
    case Pattern::Kind::Wildcard: return false;
  }
  return false;
}

bool rebuilds_proper_subpattern(const Expr& e, const Pattern& p, const Scope& sc) {
  for (const auto& a : p.args)
    if (rebuilds(e, a, sc) || rebuilds_proper_subpattern(e, a, sc)) return true;
  return false;
}

std::optional<Origin> origin_of(const Expr& e, const Origins& env, const Scope& sc) {
  if (e.kind == Expr::Kind::Var) {
    auto it = env.find(e.name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  }
  if (e.kind == Expr::Kind::Ctor && sc.params)
    for (std::size_t i = 0; i < sc.params->size(); ++i)
      if (rebuilds_proper_subpattern(e, (*sc.params)[i], sc)) return Origin{i, true};
  return std::nullopt;
}

void shadow(const Pattern& p, Scope& sc) {
  if (p.kind == Pattern::Kind::Var) sc.shadowed.insert(p.name);
  for (const auto& a : p.args) shadow(a, sc);
}

struct CallSite {
  std::string callee;
  std::vector<std::optional<Origin>> args;
};

void collect_sites(const Expr& e, Origins env, Scope sc, std::vector<CallSite>& out) {
  switch (e.kind) {
    case Expr::Kind::Call: {
      CallSite s{e.name, {}};
      for (const auto& a : e.args) s.args.push_back(origin_of(*a, env, sc));
      out.push_back(std::move(s));
      break;
    }
    case Expr::Kind::Case: {
      collect_sites(*e.args[0], env, sc, out);
      auto scrut = origin_of(*e.args[0], env, sc);
      for (const auto& alt : e.alts) {
        Origins inner = env;
        Scope isc = sc;
        shadow(alt.pattern, isc);
        bind_pattern(alt.pattern, scrut, false, inner);
        collect_sites(*alt.body, inner, isc, out);
      }
      return;
    }
    case Expr::Kind::Let: {
      Origins inner = env;
      Scope isc = sc;
      for (const auto& b : e.bindings) {
        unbind_pattern(b.lhs, inner);
        shadow(b.lhs, isc);
      }
      for (const auto& b : e.bindings) collect_sites(*b.rhs, inner, isc, out);
      collect_sites(*e.args[0], inner, isc, out);
      return;
    }
    default: break;
  }
  for (const auto& a : e.args) collect_sites(*a, env, sc, out);
}

std::vector<CallSite> rule_sites(const Rule& r) {
  Origins env;
  Scope sc{&r.params, {}};
  for (std::size_t i = 0; i < r.params.size(); ++i) bind_pattern(r.params[i], Origin{i, false}, false, env);
  // Where-bindings scope over guard and body; an alias of a parameter keeps
  // its origin, anything else loses it.
  for (const auto& b : r.where) {
    auto o = origin_of(*b.rhs, env, sc);
    shadow(b.lhs, sc);
    if (o)
      bind_pattern(b.lhs, o, false, env);
    else
      unbind_pattern(b.lhs, env);
  }
  std::vector<CallSite> out;
  if (r.guard) collect_sites(*r.guard, env, sc, out);
  collect_sites(*r.body, env, sc, out);
  for (const auto& b : r.where) collect_sites(*b.rhs, env, sc, out);
  return out;
}

// ---- pattern matrices

using Row = std::vector<Pattern>;

bool is_default(const Pattern& p) {
  return p.kind == Pattern::Kind::Var || p.kind == Pattern::Kind::Wildcard;
}

bool exhaustive_rows(const Program& prog, const std::vector<Row>& rows) {
  if (rows.empty()) return false;
  if (rows.front().empty()) return true;
  const TypeDecl* type = nullptr;
  for (const auto& r : rows)
    if (r[0].kind == Pattern::Kind::Ctor) {
      type = prog.find_ctor(r[0].name).first;
      break;
    }
  auto default_rows = [&] {
    std::vector<Row> out;
    for (const auto& r : rows)
      if (is_default(r[0])) out.emplace_back(r.begin() + 1, r.end());
    return out;
  };
  if (!type) return exhaustive_rows(prog, default_rows());
  for (const auto& c : type->ctors) {
    std::vector<Row> spec;
    for (const auto& r : rows) {
      Row next;
      if (r[0].kind == Pattern::Kind::Ctor) {
        if (r[0].name != c.name) continue;
        next = r[0].args;
      } else if (is_default(r[0])) {
        next.assign(c.args.size(), Pattern::wildcard());
      } else {
        continue;
      }
      next.insert(next.end(), r.begin() + 1, r.end());
      spec.push_back(std::move(next));
    }
    if (!exhaustive_rows(prog, spec)) return false;
  }
  return true;
}

bool unify(const Pattern& a, const Pattern& b) {
  if (is_default(a) || is_default(b)) return true;
  if (a.kind != b.kind) return false;
  if (a.kind == Pattern::Kind::Int) return a.value == b.value;
  if (a.name != b.name) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify(a.args[i], b.args[i])) return false;
  return true;
}

}  // namespace

bool exhaustive(const Program& program, const std::vector<std::vector<Pattern>>& rows) {
  return exhaustive_rows(program, rows);
}

bool overlap(const std::vector<Pattern>& a, const std::vector<Pattern>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (!unify(a[i], b[i])) return false;
  return true;
}

// ------------------------------------------------------------------ analyzer

struct Analyzer::Impl {
  const Program& prog;
  std::map<std::string, std::set<std::string>> callees;
  std::map<std::string, int> scc_of;
  std::vector<std::vector<std::string>> sccs;
  std::map<std::string, AnalysisVerdict> term, prod, det, total;
  std::map<std::string, bool> guarded_memo;

  explicit Impl(const Program& p) : prog(p) {
    for (const auto& op : prog.ops) {
      auto& out = callees[op.name];
      for (const auto& r : op.rules)
        for_each_rule_expr(r, [&](const Expr& e) {
          if (e.kind == Expr::Kind::Call && prog.find_op(e.name)) out.insert(e.name);
        });
    }
    tarjan();
  }

  // ---- call graph

  void tarjan() {
    std::map<std::string, int> index, low;
    std::vector<std::string> stack;
    std::set<std::string> on_stack;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (const auto& w : callees[v]) {
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<std::string> comp;
        std::string w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          scc_of[w] = static_cast<int>(sccs.size());
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        sccs.push_back(std::move(comp));
      }
    };
    for (const auto& op : prog.ops)
      if (!index.count(op.name)) visit(op.name);
  }

  const OpDecl& require(const std::string& name) const {
    const auto* op = prog.find_op(name);
    if (!op) throw std::invalid_argument("unknown operation '" + name + "'");
    return *op;
  }

  bool recursive(int scc) const {
    const auto& comp = sccs[scc];
    if (comp.size() > 1) return true;
    return callees.at(comp[0]).count(comp[0]) > 0;
  }

  std::vector<std::string> reachable(const std::string& root) const {
    std::set<std::string> seen{root};
    std::vector<std::string> order{root};
    for (std::size_t i = 0; i < order.size(); ++i)
      for (const auto& c : callees.at(order[i]))
        if (seen.insert(c).second) order.push_back(c);
    return order;
  }

  // ---- termination

  // Searches for one argument position per operation of the component such
  // that every internal call passes a strict subterm in that position.
  bool descends(int scc) const {
    const auto& comp = sccs[scc];
    std::map<std::string, std::vector<CallSite>> sites;
    std::map<std::string, std::size_t> arity;
    for (const auto& name : comp) {
      const auto& op = *prog.find_op(name);
      arity[name] = op.arity();
      if (op.arity() == 0) return false;
      for (const auto& r : op.rules) {
        auto s = rule_sites(r);
        auto& dst = sites[name];
        for (auto& c : s)
          if (scc_of.at(c.callee) == scc) dst.push_back(std::move(c));
      }
    }
    std::map<std::string, std::size_t> pos;
    for (const auto& n : comp) pos[n] = 0;
    constexpr long kMaxAssignments = 1 << 16;
    for (long tried = 0; tried < kMaxAssignments; ++tried) {
      bool ok = true;
      for (const auto& [caller, calls] : sites) {
        for (const auto& c : calls) {
          const auto& o = c.args[pos[c.callee]];
          if (!o || !o->strict || o->param != pos[caller]) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) return true;
      // Next assignment, odometer style.
      std::size_t i = 0;
      for (; i < comp.size(); ++i) {
        if (++pos[comp[i]] < arity[comp[i]]) break;
        pos[comp[i]] = 0;
      }
      if (i == comp.size()) return false;
    }
    return false;
  }

  AnalysisVerdict termination(const std::string& name) {
    require(name);
    if (auto it = term.find(name); it != term.end()) return it->second;
    AnalysisVerdict v = proven("no recursion");
    std::set<int> seen;
    for (const auto& op : reachable(name)) {
      for (const auto& r : prog.find_op(op)->rules)
        if (recursive_binding(r)) return term[name] = unknown("recursive local binding in '" + op + "'");
      int s = scc_of.at(op);
      if (!seen.insert(s).second || !recursive(s)) continue;
      if (!descends(s)) {
        v = unknown("no structurally decreasing argument for recursion through '" + op + "'");
        break;
      }
      v = proven("structural descent on every recursive call");
    }
    return term[name] = v;
  }

  // ---- productivity

  enum class Pos { Result, Guarded, Demanded, Full };

  bool walk(const Expr& e, Pos pos, int scc) {
    auto all = [&](const std::vector<ExprPtr>& xs, Pos p) {
      for (const auto& x : xs)
        if (!walk(*x, p, scc)) return false;
      return true;
    };
    bool guarded = pos == Pos::Guarded;
    switch (e.kind) {
      case Expr::Kind::Var: return pos != Pos::Full;
      case Expr::Kind::Int:
      case Expr::Kind::Failed: return true;
      case Expr::Kind::Ctor:
        return all(e.args, pos == Pos::Result ? Pos::Guarded : pos);
      case Expr::Kind::Call: {
        bool internal = scc_of.count(e.name) && scc_of.at(e.name) == scc;
        if (guarded) return all(e.args, internal ? Pos::Demanded : Pos::Guarded);
        if (internal || pos == Pos::Full) return false;
        return (!prog.find_op(e.name) || guarded_ok(e.name)) && all(e.args, Pos::Demanded);
      }
      case Expr::Kind::Prim: {
        bool compare = e.prim == Prim::Eq || e.prim == Prim::Ne || e.prim == Prim::Lt ||
                       e.prim == Prim::Le || e.prim == Prim::Gt || e.prim == Prim::Ge;
        if (guarded) return all(e.args, Pos::Guarded);
        return all(e.args, compare ? Pos::Full : (pos == Pos::Full ? Pos::Full : Pos::Demanded));
      }
      case Expr::Kind::Choice: return all(e.args, pos);
      case Expr::Kind::If:
        return walk(*e.args[0], guarded ? pos : Pos::Demanded, scc) && walk(*e.args[1], pos, scc) &&
               walk(*e.args[2], pos, scc);
      case Expr::Kind::Case: {
        if (!walk(*e.args[0], guarded ? pos : Pos::Demanded, scc)) return false;
        for (const auto& alt : e.alts)
          if (!walk(*alt.body, pos, scc)) return false;
        return true;
      }
      case Expr::Kind::Let:
        for (const auto& b : e.bindings)
          if (!walk(*b.rhs, guarded ? pos : Pos::Demanded, scc)) return false;
        return walk(*e.args[0], pos, scc);
    }
    return false;
  }

  bool guarded_ok(const std::string& name) {
    if (auto it = guarded_memo.find(name); it != guarded_memo.end()) return it->second;
    int scc = scc_of.at(name);
    guarded_memo[name] = false;  // cut cycles through other components
    bool ok = true;
    bool rec = recursive(scc);
    for (const auto& member : sccs[scc]) {
      for (const auto& r : prog.find_op(member)->rules) {
        if (rec)
          for (const auto& p : r.params)
            if (pattern_depth(p) > 1) ok = false;
        if (r.guard && !walk(*r.guard, Pos::Demanded, scc)) ok = false;
        for (const auto& b : r.where)
          if (!walk(*b.rhs, Pos::Demanded, scc)) ok = false;
        if (!walk(*r.body, Pos::Result, scc)) ok = false;
      }
    }
    for (const auto& member : sccs[scc]) guarded_memo[member] = ok;
    return ok;
  }

  AnalysisVerdict productivity(const std::string& name) {
    require(name);
    if (auto it = prod.find(name); it != prod.end()) return it->second;
    AnalysisVerdict v;
    if (termination(name).proven())
      v = proven("terminating");
    else if (guarded_ok(name))
      v = proven("recursion guarded by constructors");
    else
      v = unknown("a recursive or unproductive call is evaluated before any constructor");
    return prod[name] = v;
  }

  // ---- determinism

  AnalysisVerdict deterministic(const std::string& name) {
    require(name);
    if (auto it = det.find(name); it != det.end()) return it->second;
    AnalysisVerdict v = proven("no choice, failure, guard or overlapping rules");
    for (const auto& op_name : reachable(name)) {
      const auto& op = *prog.find_op(op_name);
      std::string why;
      for (std::size_t i = 0; i < op.rules.size() && why.empty(); ++i) {
        const auto& r = op.rules[i];
        if (r.guard) why = "guarded rule in '" + op_name + "'";
        for (std::size_t j = i + 1; j < op.rules.size() && why.empty(); ++j)
          if (overlap(r.params, op.rules[j].params))
            why = "overlapping rules in '" + op_name + "'";
        for_each_rule_expr(r, [&](const Expr& e) {
          if (!why.empty()) return;
          if (e.kind == Expr::Kind::Choice) why = "choice in '" + op_name + "'";
          if (e.kind == Expr::Kind::Failed) why = "failed in '" + op_name + "'";
        });
      }
      if (!why.empty()) {
        v = unknown(why);
        break;
      }
    }
    return det[name] = v;
  }

  // ---- totality

  std::string partiality(const OpDecl& op) const {
    std::vector<Row> rows;
    for (const auto& r : op.rules) {
      if (r.guard) return "guarded rule";
      rows.push_back(r.params);
      for (const auto& b : r.where)
        if (refutable(prog, b.lhs)) return "refutable where-pattern";
    }
    if (!exhaustive(prog, rows)) return "non-exhaustive patterns";
    std::string why;
    for (const auto& r : op.rules)
      for_each_rule_expr(r, [&](const Expr& e) {
        if (!why.empty()) return;
        switch (e.kind) {
          case Expr::Kind::Failed: why = "uses failed"; break;
          case Expr::Kind::Prim:
            if (e.prim == Prim::Div || e.prim == Prim::Mod) why = "division may fail";
            break;
          case Expr::Kind::Case: {
            std::vector<Row> alts;
            for (const auto& a : e.alts) alts.push_back({a.pattern});
            if (!exhaustive(prog, alts)) why = "non-exhaustive case";
            break;
          }
          case Expr::Kind::Let:
            for (const auto& b : e.bindings)
              if (refutable(prog, b.lhs)) why = "refutable let-pattern";
            break;
          default: break;
        }
      });
    return why;
  }

  AnalysisVerdict totally_defined(const std::string& name) {
    require(name);
    if (auto it = total.find(name); it != total.end()) return it->second;
    AnalysisVerdict v = proven("terminating with exhaustive patterns");
    auto t = termination(name);
    if (!t.proven()) {
      v = unknown("termination not proven");
    } else {
      for (const auto& op_name : reachable(name)) {
        auto why = partiality(*prog.find_op(op_name));
        if (!why.empty()) {
          v = unknown(why + " in '" + op_name + "'");
          break;
        }
      }
    }
    return total[name] = v;
  }
};

Analyzer::Analyzer(const Program& program) : impl_(std::make_unique<Impl>(program)) {}
Analyzer::~Analyzer() = default;

AnalysisVerdict Analyzer::termination(const std::string& op) { return impl_->termination(op); }
AnalysisVerdict Analyzer::productivity(const std::string& op) { return impl_->productivity(op); }
AnalysisVerdict Analyzer::deterministic(const std::string& op) { return impl_->deterministic(op); }
AnalysisVerdict Analyzer::totally_defined(const std::string& op) { return impl_->totally_defined(op); }

AnalysisVerdict termination_check(const Program& program, const std::string& op) {
  return Analyzer(program).termination(op);
}
AnalysisVerdict productivity_check(const Program& program, const std::string& op) {
  return Analyzer(program).productivity(op);
}
AnalysisVerdict deterministic_check(const Program& program, const std::string& op) {
  return Analyzer(program).deterministic(op);
}
AnalysisVerdict totally_defined_check(const Program& program, const std::string& op) {
  return Analyzer(program).totally_defined(op);
}

std::vector<OpAnalysis> analyze_program(const Program& program) {
  Analyzer a(program);
  std::vector<OpAnalysis> out;
  for (const auto& op : program.ops)
    out.push_back({op.name, a.termination(op.name), a.productivity(op.name), a.deterministic(op.name),
                   a.totally_defined(op.name)});
  return out;
}

}  // namespace flp
