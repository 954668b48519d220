#include "flp/eval.hpp"

#include <pthread.h>

#include <deque>
#include <exception>
#include <map>
#include <stdexcept>

#include "flp/lang.hpp"

namespace flp {

// ------------------------------------------------------------------ compiled form

struct CPat {
  enum class K { Var, Wild, Int, Ctor };
  K k = K::Wild;
  int slot = -1;
  std::int64_t value = 0;
  int ctor = -1;
  std::vector<CPat> args;
};

struct CExpr;

struct CAlt {
  CPat pat;
  const CExpr* body = nullptr;
};

struct CExpr {
  Expr::Kind k = Expr::Kind::Failed;
  int slot = -1;  // Var
  std::int64_t value = 0;
  int id = -1;  // constructor or operation
  Prim prim = Prim::Add;
  std::vector<const CExpr*> args;
  std::vector<CAlt> alts;
  std::vector<std::pair<int, const CExpr*>> binds;
};

struct CRule {
  std::vector<CPat> params;
  const CExpr* body = nullptr;
  int frame_size = 0;
};

struct COp {
  std::string name;
  std::vector<CRule> rules;
};

struct CtorInfo {
  std::string name;
  int arity = 0;
  int index = 0;  // position within its type
};

struct CodeStore {
  std::deque<CExpr> exprs;
  CExpr* add() { return &exprs.emplace_back(); }
};

struct Compiled {
  Program program;  // desugared
  std::vector<CtorInfo> ctors;
  std::map<std::string, int> ctor_ids;
  std::vector<COp> ops;
  std::map<std::string, int> op_ids;
  CodeStore code;
  int true_id = -1;
  int false_id = -1;
};

namespace {

class Compiler {
 public:
  Compiler(const Compiled& c, CodeStore& store) : c_(c), store_(store) {}

  int frame_size() const { return next_slot_; }

  int bind(const std::string& name) {
    scope_.emplace_back(name, next_slot_);
    return next_slot_++;
  }

  CPat pattern(const Pattern& p) {
    CPat out;
    switch (p.kind) {
      case Pattern::Kind::Var:
        out.k = CPat::K::Var;
        out.slot = bind(p.name);
        break;
      case Pattern::Kind::Wildcard: out.k = CPat::K::Wild; break;
      case Pattern::Kind::Int:
        out.k = CPat::K::Int;
        out.value = p.value;
        break;
      case Pattern::Kind::Ctor:
        out.k = CPat::K::Ctor;
        out.ctor = c_.ctor_ids.at(p.name);
        for (const auto& a : p.args) out.args.push_back(pattern(a));
        break;
    }
    return out;
  }

  const CExpr* expr(const Expr& e) {
    CExpr* out = store_.add();
    out->k = e.kind;
    switch (e.kind) {
      case Expr::Kind::Var: out->slot = lookup(e.name); break;
      case Expr::Kind::Int: out->value = e.value; break;
      case Expr::Kind::Ctor: out->id = c_.ctor_ids.at(e.name); break;
      case Expr::Kind::Call: {
        auto it = c_.op_ids.find(e.name);
        if (it == c_.op_ids.end()) throw std::invalid_argument("unknown operation '" + e.name + "'");
        out->id = it->second;
        break;
      }
      case Expr::Kind::Prim: out->prim = e.prim; break;
      default: break;
    }
    if (e.kind == Expr::Kind::Let) {
      auto mark = scope_.size();
      std::vector<int> slots;
      for (const auto& b : e.bindings) {
        if (b.lhs.kind != Pattern::Kind::Var)
          throw std::logic_error("let pattern binding survived desugaring");
        slots.push_back(bind(b.lhs.name));
      }
      for (std::size_t i = 0; i < e.bindings.size(); ++i)
        out->binds.emplace_back(slots[i], expr(*e.bindings[i].rhs));
      out->args.push_back(expr(*e.args[0]));
      scope_.resize(mark);
      return out;
    }
    if (e.kind == Expr::Kind::Case) {
      out->args.push_back(expr(*e.args[0]));
      for (const auto& alt : e.alts) {
        auto mark = scope_.size();
        CAlt a;
        a.pat = pattern(alt.pattern);
        a.body = expr(*alt.body);
        out->alts.push_back(std::move(a));
        scope_.resize(mark);
      }
      return out;
    }
    for (const auto& a : e.args) out->args.push_back(expr(*a));
    return out;
  }

 private:
  const Compiled& c_;
  CodeStore& store_;
  std::vector<std::pair<std::string, int>> scope_;
  int next_slot_ = 0;

  int lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return it->second;
    throw std::invalid_argument("unbound variable '" + name + "'");
  }
};

std::shared_ptr<Compiled> compile(const Program& source) {
  auto c = std::make_shared<Compiled>();
  c->program = desugar(source);
  for (const auto& t : c->program.types)
    for (std::size_t i = 0; i < t.ctors.size(); ++i) {
      c->ctor_ids[t.ctors[i].name] = static_cast<int>(c->ctors.size());
      c->ctors.push_back(
          {t.ctors[i].name, static_cast<int>(t.ctors[i].args.size()), static_cast<int>(i)});
    }
  c->true_id = c->ctor_ids.at("True");
  c->false_id = c->ctor_ids.at("False");
  for (const auto& op : c->program.ops) {
    c->op_ids[op.name] = static_cast<int>(c->ops.size());
    c->ops.push_back({op.name, {}});
  }
  for (std::size_t i = 0; i < c->program.ops.size(); ++i) {
    for (const auto& r : c->program.ops[i].rules) {
      Compiler comp(*c, c->code);
      CRule cr;
      for (const auto& p : r.params) cr.params.push_back(comp.pattern(p));
      cr.body = comp.expr(*r.body);
      cr.frame_size = comp.frame_size();
      c->ops[i].rules.push_back(std::move(cr));
    }
  }
  return c;
}

// ------------------------------------------------------------------ runtime

struct Fail {};
struct Cut {};
struct Fork {
  int n;
};
// Demanding a driver position failed or was cut; the run may continue with ⊥ there.
struct PositionLost {
  std::size_t slot;
  bool cut;
};
struct Mismatch {};

struct Node;
using Frame = std::vector<Node*>;

struct Node {
  enum class Tag : std::uint8_t { Thunk, Ctor, Int, Ind, Hole };
  Tag tag = Tag::Thunk;
  int ctor = -1;
  std::int64_t value = 0;
  const CExpr* code = nullptr;
  Frame* env = nullptr;
  Node* ind = nullptr;
  std::vector<Node*> args;
};

constexpr int kMaxNesting = 200000;
constexpr long kMaxObservedNodes = 1000000;

class Machine {
 public:
  Machine(const Compiled& c, const EvalConfig& cfg, std::vector<std::uint8_t> path)
      : c_(c), cfg_(cfg), path_(std::move(path)) {}

  std::vector<std::uint8_t>& path() { return path_; }
  std::size_t cursor() const { return idx_; }
  bool depth_cut() const { return depth_cut_; }

  Node* build(const CExpr* e, Frame* env) {
    switch (e->k) {
      case Expr::Kind::Var: return (*env)[e->slot];
      case Expr::Kind::Int: return alloc_int(e->value);
      case Expr::Kind::Ctor: {
        Node* n = alloc(Node::Tag::Ctor);
        n->ctor = e->id;
        for (const auto* a : e->args) n->args.push_back(build(a, env));
        return n;
      }
      default: {
        Node* n = alloc(Node::Tag::Thunk);
        n->code = e;
        n->env = env;
        return n;
      }
    }
  }

  Frame* new_frame(int size) { return &frames_.emplace_back(static_cast<std::size_t>(size), nullptr); }

  static Node* deref(Node* n) {
    while (n->tag == Node::Tag::Ind) n = n->ind;
    return n;
  }

  Node* whnf(Node* n) {
    n = deref(n);
    if (n->tag == Node::Tag::Ctor || n->tag == Node::Tag::Int) return n;
    if (n->tag == Node::Tag::Hole) throw Fail{};
    if (++nesting_ > kMaxNesting) throw Cut{};
    const CExpr* code = n->code;
    Frame* env = n->env;
    n->tag = Node::Tag::Hole;
    Node* r = eval(code, env);
    n->tag = Node::Tag::Ind;
    n->ind = r;
    --nesting_;
    return r;
  }

  // ---- observation drivers

  PartialValue observe_total(Node* n, int depth) {
    if (depth > kMaxNesting || ++observed_ > kMaxObservedNodes) throw Cut{};
    n = whnf(n);
    if (n->tag == Node::Tag::Int) return PartialValue::integer(n->value);
    PartialValue out = PartialValue::ctor(c_.ctors[n->ctor].name);
    for (Node* a : n->args) out.args.push_back(observe_total(a, depth + 1));
    return out;
  }

  PartialValue observe_partial(Node* n, int depth) {
    if (depth >= cfg_.depth_budget) {
      depth_cut_ = true;
      return PartialValue::bottom();
    }
    std::size_t slot = driver_slot();
    if (path_[slot] == 1) return PartialValue::bottom();
    try {
      n = whnf(n);
    } catch (const Fail&) {
      throw PositionLost{slot, false};
    } catch (const Cut&) {
      throw PositionLost{slot, true};
    }
    if (n->tag == Node::Tag::Int) return PartialValue::integer(n->value);
    PartialValue out = PartialValue::ctor(c_.ctors[n->ctor].name);
    for (Node* a : n->args) out.args.push_back(observe_partial(a, depth + 1));
    return out;
  }

  void observe_shape(Node* n, const PartialValue& shape, std::vector<std::int64_t>& ints) {
    if (shape.is_bottom()) return;
    n = whnf(n);
    if (shape.kind == PartialValue::Kind::Int) {
      if (n->tag != Node::Tag::Int) throw Mismatch{};
      ints.push_back(n->value);
      return;
    }
    if (n->tag != Node::Tag::Ctor || c_.ctors[n->ctor].name != shape.name) throw Mismatch{};
    for (std::size_t i = 0; i < shape.args.size(); ++i) observe_shape(n->args[i], shape.args[i], ints);
  }

 private:
  const Compiled& c_;
  const EvalConfig& cfg_;
  std::vector<std::uint8_t> path_;
  std::size_t idx_ = 0;
  long steps_ = 0;
  int nesting_ = 0;
  long observed_ = 0;
  bool depth_cut_ = false;
  std::deque<Node> nodes_;
  std::deque<Frame> frames_;
  Node* true_ = nullptr;
  Node* false_ = nullptr;

  Node* alloc(Node::Tag t) {
    Node& n = nodes_.emplace_back();
    n.tag = t;
    return &n;
  }
  Node* alloc_int(std::int64_t v) {
    Node* n = alloc(Node::Tag::Int);
    n->value = v;
    return n;
  }
  Node* boolean(bool b) {
    Node*& slot = b ? true_ : false_;
    if (!slot) {
      slot = alloc(Node::Tag::Ctor);
      slot->ctor = b ? c_.true_id : c_.false_id;
    }
    return slot;
  }

  int choose(int n) {
    if (idx_ < path_.size()) return path_[idx_++];
    throw Fork{n};
  }

  std::size_t driver_slot() {
    if (idx_ == path_.size()) path_.push_back(0);
    return idx_++;
  }

  void step() {
    ++steps_;
    if (steps_ > cfg_.step_budget) throw Cut{};
    if (cfg_.deadline && (steps_ & 255) == 0 && std::chrono::steady_clock::now() > *cfg_.deadline)
      throw Cut{};
  }

  Node* eval(const CExpr* e, Frame* env) {
    for (;;) {
      switch (e->k) {
        case Expr::Kind::Var: return whnf((*env)[e->slot]);
        case Expr::Kind::Int:
        case Expr::Kind::Ctor: return build(e, env);
        case Expr::Kind::Failed: throw Fail{};
        case Expr::Kind::Choice: e = e->args[choose(2)]; continue;
        case Expr::Kind::If: {
          Node* c = eval(e->args[0], env);
          e = e->args[c->ctor == c_.true_id ? 1 : 2];
          continue;
        }
        case Expr::Kind::Prim: {
          if (e->prim == Prim::And || e->prim == Prim::Or) {
            Node* a = eval(e->args[0], env);
            bool av = a->ctor == c_.true_id;
            if (av == (e->prim == Prim::Or)) return a;
            e = e->args[1];
            continue;
          }
          return prim(e, env);
        }
        case Expr::Kind::Call: {
          std::vector<Node*> args;
          args.reserve(e->args.size());
          for (const auto* a : e->args) args.push_back(build(a, env));
          const COp& op = c_.ops[e->id];
          const CRule& rule = select_rule(op, args);
          step();
          Frame* frame = new_frame(rule.frame_size);
          for (std::size_t i = 0; i < args.size(); ++i) bind(rule.params[i], args[i], *frame);
          e = rule.body;
          env = frame;
          continue;
        }
        case Expr::Kind::Case: {
          Node* s = eval(e->args[0], env);
          const CAlt* hit = nullptr;
          for (const auto& alt : e->alts)
            if (alt_matches(alt.pat, s)) {
              hit = &alt;
              break;
            }
          if (!hit) throw Fail{};
          bind(hit->pat, s, *env);
          e = hit->body;
          continue;
        }
        case Expr::Kind::Let: {
          for (const auto& [slot, rhs] : e->binds) {
            Node* n = alloc(Node::Tag::Thunk);
            n->code = rhs;
            n->env = env;
            (*env)[slot] = n;
          }
          e = e->args[0];
          continue;
        }
      }
    }
  }

  bool alt_matches(const CPat& p, Node* s) const {
    switch (p.k) {
      case CPat::K::Var:
      case CPat::K::Wild: return true;
      case CPat::K::Int: return s->tag == Node::Tag::Int && s->value == p.value;
      case CPat::K::Ctor: return s->tag == Node::Tag::Ctor && s->ctor == p.ctor;
    }
    return false;
  }

  void bind(const CPat& p, Node* n, Frame& frame) {
    switch (p.k) {
      case CPat::K::Var: frame[p.slot] = n; return;
      case CPat::K::Wild:
      case CPat::K::Int: return;
      case CPat::K::Ctor: {
        Node* d = deref(n);
        for (std::size_t i = 0; i < p.args.size(); ++i) bind(p.args[i], d->args[i], frame);
        return;
      }
    }
  }

  // Returns true on a definite mismatch; collects unevaluated nodes the
  // pattern still needs.
  static bool probe(const CPat& p, Node* n, std::vector<Node*>& needs) {
    if (p.k == CPat::K::Var || p.k == CPat::K::Wild) return false;
    n = deref(n);
    if (n->tag == Node::Tag::Thunk || n->tag == Node::Tag::Hole) {
      needs.push_back(n);
      return false;
    }
    if (p.k == CPat::K::Int) return n->tag != Node::Tag::Int || n->value != p.value;
    if (n->tag != Node::Tag::Ctor || n->ctor != p.ctor) return true;
    bool mismatch = false;
    for (std::size_t i = 0; i < p.args.size() && !mismatch; ++i)
      mismatch = probe(p.args[i], n->args[i], needs);
    return mismatch;
  }

  // Demand-driven rule selection. Nodes needed by every remaining candidate
  // are evaluated deterministically; otherwise the candidates fork.
  const CRule& select_rule(const COp& op, const std::vector<Node*>& args) {
    std::vector<int> cand(op.rules.size());
    for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = static_cast<int>(i);
    for (;;) {
      std::vector<int> alive;
      std::vector<std::vector<Node*>> needs;
      for (int r : cand) {
        std::vector<Node*> nd;
        bool mismatch = false;
        const auto& params = op.rules[r].params;
        for (std::size_t i = 0; i < params.size() && !mismatch; ++i)
          mismatch = probe(params[i], args[i], nd);
        if (!mismatch) {
          alive.push_back(r);
          needs.push_back(std::move(nd));
        }
      }
      if (alive.empty()) throw Fail{};
      cand = std::move(alive);
      if (cand.size() == 1) {
        if (needs[0].empty()) return op.rules[cand[0]];
        whnf(needs[0][0]);
        continue;
      }
      bool any_ready = false;
      for (const auto& nd : needs) any_ready = any_ready || nd.empty();
      if (!any_ready) {
        Node* common = nullptr;
        for (Node* n : needs[0]) {
          bool shared = true;
          for (std::size_t j = 1; j < needs.size() && shared; ++j) {
            bool found = false;
            for (Node* m : needs[j]) found = found || m == n;
            shared = found;
          }
          if (shared) {
            common = n;
            break;
          }
        }
        if (common) {
          whnf(common);
          continue;
        }
      }
      bool all_ready = true;
      for (const auto& nd : needs) all_ready = all_ready && nd.empty();
      int pick = choose(static_cast<int>(cand.size()));
      if (all_ready) return op.rules[cand[pick]];
      cand = {cand[pick]};
    }
  }

  int compare(Node* a, Node* b) {
    a = whnf(a);
    b = whnf(b);
    if (a->tag == Node::Tag::Int && b->tag == Node::Tag::Int)
      return a->value < b->value ? -1 : (a->value > b->value ? 1 : 0);
    if (a->tag != b->tag) throw Fail{};
    int ia = c_.ctors[a->ctor].index, ib = c_.ctors[b->ctor].index;
    if (ia != ib) return ia < ib ? -1 : 1;
    for (std::size_t i = 0; i < a->args.size(); ++i)
      if (int r = compare(a->args[i], b->args[i])) return r;
    return 0;
  }

  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }

  Node* prim(const CExpr* e, Frame* env) {
    if (e->prim == Prim::Not) {
      Node* a = eval(e->args[0], env);
      return boolean(a->ctor != c_.true_id);
    }
    switch (e->prim) {
      case Prim::Eq:
      case Prim::Ne:
      case Prim::Lt:
      case Prim::Le:
      case Prim::Gt:
      case Prim::Ge: {
        Node* a = build(e->args[0], env);
        Node* b = build(e->args[1], env);
        int r = compare(a, b);
        switch (e->prim) {
          case Prim::Eq: return boolean(r == 0);
          case Prim::Ne: return boolean(r != 0);
          case Prim::Lt: return boolean(r < 0);
          case Prim::Le: return boolean(r <= 0);
          case Prim::Gt: return boolean(r > 0);
          default: return boolean(r >= 0);
        }
      }
      default: break;
    }
    Node* a = eval(e->args[0], env);
    Node* b = eval(e->args[1], env);
    if (a->tag != Node::Tag::Int || b->tag != Node::Tag::Int) throw Fail{};
    std::int64_t x = a->value, y = b->value, r = 0;
    switch (e->prim) {
      case Prim::Add: r = x + y; break;
      case Prim::Sub: r = x - y; break;
      case Prim::Mul: r = x * y; break;
      case Prim::Div:
        if (y == 0) throw Fail{};
        r = floor_div(x, y);
        break;
      case Prim::Mod:
        if (y == 0) throw Fail{};
        r = x - floor_div(x, y) * y;
        break;
      default: throw std::logic_error("unhandled primitive");
    }
    return alloc_int(r);
  }
};

// One compiled query: its code lives next to the shared program code.
struct Query {
  CodeStore store;
  const CExpr* root = nullptr;
  int frame_size = 0;

  Query(const Compiled& c, const Expr& e) {
    Compiler comp(c, store);
    root = comp.expr(e);
    frame_size = comp.frame_size();
  }
};

enum class DriveMode { Values, Partials, Shape };

struct SearchResult {
  std::set<PartialValue> observations;  // values, or maximal partial values
  ShapeObservation shape;
  bool complete = true;
  bool target_found = false;
  SearchStats stats;
};

SearchResult search(const Compiled& c, const ExprPtr& expr, const EvalConfig& cfg, DriveMode mode,
                    const PartialValue* shape = nullptr,
                    const std::vector<std::int64_t>* target = nullptr) {
  cfg.validate();
  Query q(c, *expr);
  SearchResult res;
  std::deque<std::vector<std::uint8_t>> queue;
  std::set<std::vector<std::uint8_t>> skipped;
  queue.emplace_back();
  auto timed_out = [&] {
    return cfg.deadline && std::chrono::steady_clock::now() > *cfg.deadline;
  };
  while (!queue.empty()) {
    if (res.stats.branches >= cfg.branch_budget || timed_out()) {
      res.stats.timed_out = timed_out();
      res.complete = false;
      break;
    }
    ++res.stats.branches;
    Machine m(c, cfg, std::move(queue.front()));
    queue.pop_front();
    try {
      Frame* frame = m.new_frame(q.frame_size);
      Node* root = m.build(q.root, frame);
      switch (mode) {
        case DriveMode::Values: res.observations.insert(m.observe_total(root, 0)); break;
        case DriveMode::Partials:
          insert_maximal(res.observations, m.observe_partial(root, 0));
          if (m.depth_cut()) res.complete = false;
          break;
        case DriveMode::Shape: {
          std::vector<std::int64_t> ints;
          m.observe_shape(root, *shape, ints);
          if (target && ints == *target) res.target_found = true;
          res.shape.vectors.insert(std::move(ints));
          break;
        }
      }
    } catch (const Fork& f) {
      const auto& p = m.path();
      std::vector<std::uint8_t> prefix(p.begin(), p.begin() + static_cast<long>(m.cursor()));
      for (int i = 0; i < f.n; ++i) {
        queue.push_back(prefix);
        queue.back().push_back(static_cast<std::uint8_t>(i));
      }
    } catch (const PositionLost& lost) {
      if (lost.cut) res.complete = false;
      const auto& p = m.path();
      std::vector<std::uint8_t> skip(p.begin(), p.begin() + static_cast<long>(lost.slot));
      skip.push_back(1);
      if (skipped.insert(skip).second) queue.push_back(std::move(skip));
    } catch (const Fail&) {
    } catch (const Mismatch&) {
    } catch (const Cut&) {
      res.complete = false;
    }
    if (res.target_found) break;
  }
  if (timed_out()) res.stats.timed_out = true;
  res.shape.complete = res.complete;
  res.shape.stats = res.stats;
  return res;
}

// The driver's observation recursion and the evaluator's demand chain both
// use the native stack.
constexpr std::size_t kLargeStack = std::size_t{1} << 30;
thread_local bool tl_large_stack = false;

void* trampoline(void* arg) {
  auto* job = static_cast<std::pair<const std::function<void()>*, std::exception_ptr>*>(arg);
  tl_large_stack = true;
  try {
    (*job->first)();
  } catch (...) {
    job->second = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void with_large_stack(const std::function<void()>& fn) {
  if (tl_large_stack) {
    fn();
    return;
  }
  std::pair<const std::function<void()>*, std::exception_ptr> job{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kLargeStack);
  pthread_t th;
  if (pthread_create(&th, &attr, trampoline, &job) != 0) {
    pthread_attr_destroy(&attr);
    throw std::runtime_error("cannot start evaluation thread");
  }
  pthread_join(th, nullptr);
  pthread_attr_destroy(&attr);
  if (job.second) std::rethrow_exception(job.second);
}

void EvalConfig::validate() const {
  if (step_budget <= 0 || branch_budget <= 0 || depth_budget <= 0)
    throw std::invalid_argument("evaluation budgets must be positive");
}

const char* to_string(Reachability r) {
  switch (r) {
    case Reachability::Yes: return "yes";
    case Reachability::No: return "no";
    case Reachability::Unknown: return "unknown";
  }
  return "?";
}

bool covered(const std::set<PartialValue>& antichain, const PartialValue& t) {
  for (const auto& u : antichain)
    if (less_defined_or_equal(t, u)) return true;
  return false;
}

bool insert_maximal(std::set<PartialValue>& antichain, const PartialValue& t) {
  if (covered(antichain, t)) return false;
  for (auto it = antichain.begin(); it != antichain.end();)
    it = less_defined(*it, t) ? antichain.erase(it) : std::next(it);
  antichain.insert(t);
  return true;
}

Evaluator::Evaluator(const Program& program) : compiled_(compile(program)) {}
Evaluator::~Evaluator() = default;
Evaluator::Evaluator(const Evaluator&) = default;
Evaluator& Evaluator::operator=(const Evaluator&) = default;

const Program& Evaluator::program() const { return compiled_->program; }

OutcomeSet Evaluator::values(const ExprPtr& expr, const EvalConfig& cfg) const {
  OutcomeSet out;
  with_large_stack([&] {
    auto r = search(*compiled_, expr, cfg, DriveMode::Values);
    out.outcomes = std::move(r.observations);
    out.complete = r.complete;
    out.stats = r.stats;
  });
  return out;
}

Reachability Evaluator::reach(const ExprPtr& expr, const PartialValue& tmpl, const EvalConfig& cfg,
                              SearchStats* stats) const {
  Reachability out = Reachability::Unknown;
  with_large_stack([&] {
    std::vector<std::int64_t> target;
    // Integer leaves in left-to-right order.
    std::function<void(const PartialValue&)> collect = [&](const PartialValue& v) {
      if (v.kind == PartialValue::Kind::Int) target.push_back(v.value);
      for (const auto& a : v.args) collect(a);
    };
    collect(tmpl);
    auto r = search(*compiled_, expr, cfg, DriveMode::Shape, &tmpl, &target);
    if (stats) *stats = r.stats;
    if (r.target_found)
      out = Reachability::Yes;
    else
      out = r.complete ? Reachability::No : Reachability::Unknown;
  });
  return out;
}

ShapeObservation Evaluator::observe_shape(const ExprPtr& expr, const PartialValue& shape,
                                          const EvalConfig& cfg) const {
  ShapeObservation out;
  with_large_stack([&] { out = search(*compiled_, expr, cfg, DriveMode::Shape, &shape).shape; });
  return out;
}

OutcomeSet Evaluator::maximal_partials(const ExprPtr& expr, const EvalConfig& cfg) const {
  OutcomeSet out;
  with_large_stack([&] {
    auto r = search(*compiled_, expr, cfg, DriveMode::Partials);
    out.outcomes = std::move(r.observations);
    out.complete = r.complete;
    out.stats = r.stats;
  });
  return out;
}

OutcomeSet Evaluator::partials(const ExprPtr& expr, const EvalConfig& cfg) const {
  auto max = maximal_partials(expr, cfg);
  OutcomeSet out;
  out.complete = max.complete;
  out.stats = max.stats;
  for (const auto& m : max.outcomes)
    for (auto& t : downward_closure(m)) out.outcomes.insert(std::move(t));
  return out;
}

OutcomeSet eval_values(const Program& program, const ExprPtr& expr, const EvalConfig& cfg) {
  return Evaluator(program).values(expr, cfg);
}

Reachability reach_partial(const Program& program, const ExprPtr& expr, const PartialValue& tmpl,
                           const EvalConfig& cfg) {
  return Evaluator(program).reach(expr, tmpl, cfg);
}

OutcomeSet enumerate_partials(const Program& program, const ExprPtr& expr, const EvalConfig& cfg) {
  return Evaluator(program).partials(expr, cfg);
}

}  // namespace flp
