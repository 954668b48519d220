#include "flp/semver.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <stdexcept>

#include "flp/lang.hpp"

namespace flp {

std::string Version::str() const {
  std::string s = std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
  for (std::size_t i = 0; i < prerelease.size(); ++i) s += (i ? "." : "-") + prerelease[i];
  return s;
}

namespace {

bool numeric(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::strong_ordering compare_identifier(const std::string& a, const std::string& b) {
  bool na = numeric(a), nb = numeric(b);
  if (na && nb) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.compare(b) <=> 0;
  }
  if (na != nb) return na ? std::strong_ordering::less : std::strong_ordering::greater;
  return a.compare(b) <=> 0;
}

}  // namespace

std::strong_ordering operator<=>(const Version& a, const Version& b) {
  if (auto c = std::tie(a.major, a.minor, a.patch) <=> std::tie(b.major, b.minor, b.patch); c != 0)
    return c;
  if (a.prerelease.empty() || b.prerelease.empty())
    return a.prerelease.empty() <=> b.prerelease.empty();
  for (std::size_t i = 0; i < std::min(a.prerelease.size(), b.prerelease.size()); ++i)
    if (auto c = compare_identifier(a.prerelease[i], b.prerelease[i]); c != 0) return c;
  return a.prerelease.size() <=> b.prerelease.size();
}

bool operator==(const Version& a, const Version& b) { return (a <=> b) == 0; }

Version parse_version(const std::string& text) {
  static const std::regex re(
      R"(^(0|[1-9][0-9]*)\.(0|[1-9][0-9]*)\.(0|[1-9][0-9]*)(?:-([0-9A-Za-z-]+(?:\.[0-9A-Za-z-]+)*))?$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw std::invalid_argument("malformed version '" + text + "'");
  Version v;
  try {
    v.major = std::stoull(m[1]);
    v.minor = std::stoull(m[2]);
    v.patch = std::stoull(m[3]);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("version component out of range in '" + text + "'");
  }
  if (m[4].matched) {
    std::string pre = m[4];
    std::size_t start = 0;
    for (std::size_t dot; (dot = pre.find('.', start)) != std::string::npos; start = dot + 1)
      v.prerelease.push_back(pre.substr(start, dot - start));
    v.prerelease.push_back(pre.substr(start));
    for (const auto& id : v.prerelease)
      if (numeric(id) && id.size() > 1 && id[0] == '0')
        throw std::invalid_argument("leading zero in prerelease of '" + text + "'");
  }
  return v;
}

const char* to_string(ApiEntry::Kind k) {
  return k == ApiEntry::Kind::Type ? "type" : "operation";
}

const char* to_string(ApiEntry::Status s) {
  switch (s) {
    case ApiEntry::Status::Identical: return "identical";
    case ApiEntry::Status::SignatureChanged: return "signature-changed";
    case ApiEntry::Status::Removed: return "removed";
    case ApiEntry::Status::Added: return "added";
  }
  return "?";
}

namespace {

const char* kOld = "V0_";
const char* kNew = "V1_";

std::vector<const TypeDecl*> local_types(const Program& p) {
  std::vector<const TypeDecl*> out;
  for (const auto& t : p.types)
    if (!t.builtin) out.push_back(&t);
  return out;
}

// Structural correspondence between the local types of two versions. Types
// correspond by name; constructors are matched positionally, or by their
// argument shapes when those single out one partner each.
class Matcher {
 public:
  Matcher(const Program& a, const Program& b) : a_(a), b_(b) {
    for (const auto* t : local_types(a))
      if (const auto* u = b.find_type(t->name); u && !u->builtin) compatible_.insert(t->name);
    // Greatest fixpoint: drop types whose constructors fail to match under
    // the current assumptions until nothing changes.
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = compatible_.begin(); it != compatible_.end();) {
        if (ctor_map(*a.find_type(*it), *b.find_type(*it))) {
          ++it;
        } else {
          it = compatible_.erase(it);
          changed = true;
        }
      }
    }
  }

  bool compatible(const std::string& type) const { return compatible_.count(type) > 0; }

  /// New-version constructor name to old-version constructor name.
  std::optional<std::map<std::string, std::string>> ctor_map(const TypeDecl& t, const TypeDecl& u) const {
    if (t.ctors.size() != u.ctors.size() || t.params.size() != u.params.size()) return std::nullopt;
    Renaming r;
    for (std::size_t i = 0; i < t.params.size(); ++i) r.bind(t.params[i], u.params[i]);
    auto shapes_match = [&](const CtorDecl& c, const CtorDecl& d) {
      if (c.args.size() != d.args.size()) return false;
      Renaming local = r;
      for (std::size_t k = 0; k < c.args.size(); ++k)
        if (!same(c.args[k], d.args[k], local)) return false;
      return true;
    };
    std::map<std::string, std::string> out;
    bool positional = true;
    for (std::size_t i = 0; i < t.ctors.size() && positional; ++i)
      positional = shapes_match(t.ctors[i], u.ctors[i]);
    if (positional) {
      for (std::size_t i = 0; i < t.ctors.size(); ++i) out[u.ctors[i].name] = t.ctors[i].name;
      return out;
    }
    for (const auto& c : t.ctors) {
      const CtorDecl* partner = nullptr;
      for (const auto& d : u.ctors)
        if (shapes_match(c, d)) {
          if (partner) return std::nullopt;
          partner = &d;
        }
      if (!partner || out.count(partner->name)) return std::nullopt;
      out[partner->name] = c.name;
    }
    return out;
  }

  bool same_signature(const Signature& s, const Signature& t) const {
    if (s.params.size() != t.params.size()) return false;
    Renaming r;
    for (std::size_t i = 0; i < s.params.size(); ++i)
      if (!same(s.params[i], t.params[i], r)) return false;
    return same(s.result, t.result, r);
  }

 private:
  struct Renaming {
    std::map<std::string, std::string> fwd, back;
    bool bind(const std::string& a, const std::string& b) {
      auto i = fwd.emplace(a, b).first;
      auto j = back.emplace(b, a).first;
      return i->second == b && j->second == a;
    }
  };

  bool same(const Type& x, const Type& y, Renaming& r) const {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
      case Type::Kind::Int: return true;
      case Type::Kind::Var: return r.bind(x.name, y.name);
      case Type::Kind::Data: break;
    }
    if (x.name != y.name || x.args.size() != y.args.size()) return false;
    const auto* tx = a_.find_type(x.name);
    const auto* ty = b_.find_type(y.name);
    if (!tx || !ty || tx->builtin != ty->builtin) return false;
    if (!tx->builtin && !compatible(x.name)) return false;
    for (std::size_t i = 0; i < x.args.size(); ++i)
      if (!same(x.args[i], y.args[i], r)) return false;
    return true;
  }

  const Program& a_;
  const Program& b_;
  std::set<std::string> compatible_;
};

}  // namespace

ApiReport compare_api(const Program& old_program, const Program& new_program, const Version& vold,
                      const Version& vnew) {
  Matcher m(old_program, new_program);
  ApiReport out;
  bool same_major = vold.major == vnew.major;
  bool removal_breaks = same_major && !(vnew.minor > vold.minor);
  auto record = [&](ApiEntry::Kind kind, const std::string& name, ApiEntry::Status st) {
    out.entries.push_back({kind, name, st});
    if (st == ApiEntry::Status::SignatureChanged && same_major)
      out.violations.push_back({name, "signature changed without a major version bump"});
    if (st == ApiEntry::Status::Removed && removal_breaks)
      out.violations.push_back({name, "removed without a major or minor version bump"});
  };

  std::set<std::string> types;
  for (const auto* t : local_types(old_program)) types.insert(t->name);
  for (const auto* t : local_types(new_program)) types.insert(t->name);
  for (const auto& name : types) {
    const auto* a = old_program.find_type(name);
    const auto* b = new_program.find_type(name);
    a = a && !a->builtin ? a : nullptr;
    b = b && !b->builtin ? b : nullptr;
    if (!b) record(ApiEntry::Kind::Type, name, ApiEntry::Status::Removed);
    else if (!a) record(ApiEntry::Kind::Type, name, ApiEntry::Status::Added);
    else
      record(ApiEntry::Kind::Type, name,
             m.compatible(name) ? ApiEntry::Status::Identical : ApiEntry::Status::SignatureChanged);
  }

  std::set<std::string> ops;
  for (const auto& op : old_program.ops) ops.insert(op.name);
  for (const auto& op : new_program.ops) ops.insert(op.name);
  for (const auto& name : ops) {
    const auto* a = old_program.find_op(name);
    const auto* b = new_program.find_op(name);
    if (!b) {
      record(ApiEntry::Kind::Operation, name, ApiEntry::Status::Removed);
      continue;
    }
    if (!a) {
      record(ApiEntry::Kind::Operation, name, ApiEntry::Status::Added);
      continue;
    }
    const auto* sa = old_program.find_signature(name);
    const auto* sb = new_program.find_signature(name);
    bool same = sa && sb ? m.same_signature(*sa, *sb) : !sa && !sb && a->arity() == b->arity();
    record(ApiEntry::Kind::Operation, name,
           same ? ApiEntry::Status::Identical : ApiEntry::Status::SignatureChanged);
  }
  return out;
}

namespace {

class Merger {
 public:
  Merger(const Program& old_program, const Program& new_program)
      : old_(old_program), new_(new_program), match_(old_program, new_program) {}

  Comparison build() {
    auto prelude = parse_program("");
    result_.program.types = prelude.program->types;
    copy(old_, kOld);
    copy(new_, kNew);
    for (const auto& op : old_.ops) {
      if (!new_.find_op(op.name)) continue;
      const auto* so = old_.find_signature(op.name);
      const auto* sn = new_.find_signature(op.name);
      if (!so || !sn) {
        result_.excluded.emplace_back(op.name, "no type signature");
        continue;
      }
      if (!match_.same_signature(*so, *sn)) {
        result_.excluded.emplace_back(op.name, "signature changed");
        continue;
      }
      wrap(op.name, *sn);
      result_.compared.push_back(op.name);
    }
    auto diags = validate(result_.program);
    if (!diags.empty())
      throw std::logic_error("merged comparison module is invalid: " + diags.front().str());
    return std::move(result_);
  }

 private:
  const Program& old_;
  const Program& new_;
  Matcher match_;
  Comparison result_;
  std::set<std::string> generated_;

  static bool local_type(const Program& p, const std::string& name) {
    const auto* t = p.find_type(name);
    return t && !t->builtin;
  }
  static bool local_ctor(const Program& p, const std::string& name) {
    auto [t, c] = p.find_ctor(name);
    return t && !t->builtin;
  }

  static Type rename(const Type& t, const Program& p, const std::string& pre) {
    Type out = t;
    if (t.kind == Type::Kind::Data && local_type(p, t.name)) out.name = pre + t.name;
    for (auto& a : out.args) a = rename(a, p, pre);
    return out;
  }

  static Pattern rename(const Pattern& pat, const Program& p, const std::string& pre) {
    Pattern out = pat;
    if (pat.kind == Pattern::Kind::Ctor && local_ctor(p, pat.name)) out.name = pre + pat.name;
    for (auto& a : out.args) a = rename(a, p, pre);
    return out;
  }

  static ExprPtr rename(const ExprPtr& e, const Program& p, const std::string& pre) {
    if (!e) return e;
    auto out = std::make_shared<Expr>(*e);
    if ((e->kind == Expr::Kind::Call && p.find_op(e->name)) ||
        (e->kind == Expr::Kind::Ctor && local_ctor(p, e->name)))
      out->name = pre + e->name;
    for (auto& a : out->args) a = rename(a, p, pre);
    for (auto& alt : out->alts) {
      alt.pattern = rename(alt.pattern, p, pre);
      alt.body = rename(alt.body, p, pre);
    }
    for (auto& b : out->bindings) {
      b.lhs = rename(b.lhs, p, pre);
      b.rhs = rename(b.rhs, p, pre);
    }
    return out;
  }

  void copy(const Program& p, const std::string& pre) {
    for (const auto* t : local_types(p)) {
      TypeDecl d = *t;
      d.name = pre + d.name;
      for (auto& c : d.ctors) {
        c.name = pre + c.name;
        for (auto& a : c.args) a = rename(a, p, pre);
      }
      result_.program.types.push_back(std::move(d));
    }
    for (const auto& op : p.ops) {
      OpDecl d = op;
      d.name = pre + op.name;
      for (auto& r : d.rules) {
        r.op = d.name;
        for (auto& pat : r.params) pat = rename(pat, p, pre);
        r.guard = rename(r.guard, p, pre);
        r.body = rename(r.body, p, pre);
        for (auto& b : r.where) {
          b.lhs = rename(b.lhs, p, pre);
          b.rhs = rename(b.rhs, p, pre);
        }
      }
      result_.program.ops.push_back(std::move(d));
    }
    for (const auto& [name, sig] : p.signatures) {
      Signature s = sig;
      for (auto& t : s.params) t = rename(t, p, pre);
      s.result = rename(s.result, p, pre);
      result_.program.signatures[pre + name] = std::move(s);
    }
  }

  // Whether values of `t` (new-version names) mention a local type.
  bool needs_translation(const Type& t) const {
    if (t.kind != Type::Kind::Data) return false;
    if (local_type(new_, t.name)) return true;
    return std::any_of(t.args.begin(), t.args.end(), [&](const Type& a) { return needs_translation(a); });
  }

  static std::string mangle(const Type& t) {
    switch (t.kind) {
      case Type::Kind::Int: return "Int";
      case Type::Kind::Var: return t.name;
      case Type::Kind::Data: break;
    }
    std::string s = t.name;
    for (const auto& a : t.args) s += "_" + mangle(a);
    return s;
  }

  static Type substitute(const Type& t, const std::map<std::string, Type>& env) {
    if (t.kind == Type::Kind::Var) {
      auto it = env.find(t.name);
      return it == env.end() ? t : it->second;
    }
    Type out = t;
    for (auto& a : out.args) a = substitute(a, env);
    return out;
  }

  ExprPtr translate(const Type& t, ExprPtr e) {
    if (!needs_translation(t)) return e;
    return mk::call(translation(t), {std::move(e)});
  }

  // Generates `t_<type>` mapping new-version values of `t` to old-version ones.
  std::string translation(const Type& t) {
    std::string name = "t_" + mangle(t);
    if (!generated_.insert(name).second) return name;
    const auto* nd = new_.find_type(t.name);
    const auto* od = old_.find_type(t.name);
    bool local = !nd->builtin;
    std::map<std::string, std::string> ctors;
    if (local) {
      ctors = *match_.ctor_map(*od, *nd);
    } else {
      for (const auto& c : nd->ctors) ctors[c.name] = c.name;
    }
    std::map<std::string, Type> env;
    for (std::size_t i = 0; i < nd->params.size(); ++i) env[nd->params[i]] = t.args[i];

    OpDecl op;
    op.name = name;
    for (const auto& c : nd->ctors) {
      Rule r;
      r.op = name;
      Pattern pat = Pattern::ctor(local ? kNew + c.name : c.name);
      std::vector<ExprPtr> args;
      for (std::size_t k = 0; k < c.args.size(); ++k) {
        std::string v = "x" + std::to_string(k + 1);
        pat.args.push_back(Pattern::var(v));
        args.push_back(translate(substitute(c.args[k], env), mk::var(v)));
      }
      r.params.push_back(std::move(pat));
      r.body = mk::ctor(local ? kOld + ctors.at(c.name) : c.name, std::move(args));
      op.rules.push_back(std::move(r));
    }
    result_.program.ops.push_back(std::move(op));
    Signature sig;
    sig.params.push_back(rename(t, new_, kNew));
    sig.result = rename(t, old_, kOld);
    result_.program.signatures[name] = std::move(sig);
    return name;
  }

  // M_f_1 runs the new version and translates its result; M_f_2 translates
  // the arguments and runs the old one. Both take new-version arguments.
  void wrap(const std::string& f, const Signature& sig) {
    std::vector<Pattern> params;
    std::vector<ExprPtr> plain, translated;
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
      std::string v = "x" + std::to_string(i + 1);
      params.push_back(Pattern::var(v));
      plain.push_back(mk::var(v));
      translated.push_back(translate(sig.params[i], mk::var(v)));
    }
    Signature ws;
    for (const auto& t : sig.params) ws.params.push_back(rename(t, new_, kNew));
    ws.result = rename(sig.result, old_, kOld);

    auto add = [&](const std::string& name, ExprPtr body) {
      OpDecl op;
      op.name = name;
      Rule r;
      r.op = name;
      r.params = params;
      r.body = std::move(body);
      op.rules.push_back(std::move(r));
      result_.program.ops.push_back(std::move(op));
      result_.program.signatures[name] = ws;
    };
    add("M_" + f + "_1", translate(sig.result, mk::call(kNew + f, plain)));
    add("M_" + f + "_2", mk::call(kOld + f, translated));
    PropDecl prop;
    prop.name = f + "_equivalent";
    prop.lhs = "M_" + f + "_1";
    prop.rhs = "M_" + f + "_2";
    result_.program.props.push_back(std::move(prop));
  }
};

PartialValue strip_prefix(PartialValue v) {
  if (v.kind == PartialValue::Kind::Ctor)
    for (const char* pre : {kOld, kNew})
      if (v.name.rfind(pre, 0) == 0) {
        v.name = v.name.substr(std::string(pre).size());
        break;
      }
  for (auto& a : v.args) a = strip_prefix(std::move(a));
  return v;
}

}  // namespace

Comparison build_comparison_program(const Program& old_program, const Program& new_program) {
  return Merger(old_program, new_program).build();
}

DiffReport behavior_diff(const Program& old_program, const Program& new_program, const Version& vold,
                         const Version& vnew, const DiffConfig& config) {
  DiffReport out;
  out.old_version = vold;
  out.new_version = vnew;
  out.api = compare_api(old_program, new_program, vold, vnew);
  for (const auto& v : out.api.violations) out.violations.push_back(v.entity + ": " + v.rule);
  if (vold.major != vnew.major) return out;

  auto cmp = build_comparison_program(old_program, new_program);
  std::map<std::string, Verdict> by_op;
  for (const auto& f : cmp.compared) {
    EquivTask t = config.base;
    t.lhs = "M_" + f + "_1";
    t.rhs = "M_" + f + "_2";
    t.preconditions.clear();
    auto v = check_equiv(cmp.program, t);
    if (v.cex) {
      for (auto& in : v.cex->inputs) in = strip_prefix(std::move(in));
      if (v.cex->tmpl) v.cex->tmpl = strip_prefix(std::move(*v.cex->tmpl));
      out.violations.push_back(f + ": behavior changed without a major version bump");
    }
    by_op.emplace(f, std::move(v));
  }
  for (const auto& [f, reason] : cmp.excluded) {
    Verdict v;
    v.outcome = Verdict::Outcome::Skipped;
    v.lhs = "M_" + f + "_1";
    v.rhs = "M_" + f + "_2";
    v.reason = reason;
    by_op.emplace(f, std::move(v));
  }
  for (const auto& op : old_program.ops)
    if (auto it = by_op.find(op.name); it != by_op.end()) out.behavior.push_back({op.name, it->second});
  return out;
}

}  // namespace flp
