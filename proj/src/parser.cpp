#include <cctype>
#include <set>
#include <stdexcept>

#include "flp/lang.hpp"

namespace flp {

std::string Diagnostic::str() const {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
}

std::string_view prelude_source() {
  return "data Bool = False | True\n"
         "data List a = Nil | Cons a (List a)\n"
         "data Pair a b = Pair a b\n"
         "data Maybe a = Nothing | Just a\n"
         "data Ordering = LT | EQ | GT\n";
}

std::string annotation_suffix(Annotation a) {
  switch (a) {
    case Annotation::Terminate: return "'TERMINATE";
    case Annotation::Productive: return "'PRODUCTIVE";
    case Annotation::None: break;
  }
  return "";
}

namespace {

struct Token {
  enum class Kind { Ident, Ctor, Int, Sym, Kw, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  SourcePos pos;
  bool bol = false;  // first token on its line
};

const std::set<std::string> kKeywords = {"data", "prop", "if",    "then", "else", "case",
                                         "of",   "let",  "in",    "where", "failed"};

struct ParseError : std::runtime_error {
  SourcePos pos;
  Diagnostic::Kind kind;
  ParseError(SourcePos p, const std::string& msg, Diagnostic::Kind k = Diagnostic::Kind::Syntax)
      : std::runtime_error(msg), pos(p), kind(k) {}
};

std::vector<Token> lex(std::string_view src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  bool bol = true;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
        bol = true;
      } else {
        ++col;
      }
    }
  };
  static const char* kSyms[] = {"<=>", "::", "->", "==", "/=", "<=", ">=", "&&", "||", "=", "|",
                                "?",   ":",  ",",  "(",  ")",  "[",  "]",  "+",  "-",  "*",
                                "<",   ">",  ";"};
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = {line, col};
    t.bol = bol;
    bol = false;
    auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                src[j] == '\''))
        ++j;
      t.text = std::string(src.substr(i, j - i));
      if (t.text == "_")
        t.kind = Token::Kind::Sym;
      else if (std::isupper(uc))
        t.kind = Token::Kind::Ctor;
      else if (kKeywords.count(t.text))
        t.kind = Token::Kind::Kw;
      else
        t.kind = Token::Kind::Ident;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(uc)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        diags.push_back({Diagnostic::Kind::Syntax, t.pos, "integer literal out of range"});
      }
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char* s : kSyms) {
      std::string_view sv(s);
      if (src.substr(i, sv.size()) == sv) {
        t.kind = Token::Kind::Sym;
        t.text = std::string(sv);
        advance(sv.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) {
      diags.push_back({Diagnostic::Kind::Syntax, t.pos,
                       std::string("unexpected character '") + c + "'"});
      advance(1);
    }
  }
  Token end;
  end.kind = Token::Kind::End;
  end.pos = {line, col};
  end.bol = true;
  out.push_back(end);
  return out;
}

// Binary operators: precedence and right-associativity.
struct BinOp {
  int prec;
  bool right;
  bool nonassoc;
};

std::optional<BinOp> binop(const Token& t) {
  if (t.kind != Token::Kind::Sym) return std::nullopt;
  const auto& s = t.text;
  if (s == "?") return BinOp{0, true, false};
  if (s == "||") return BinOp{2, true, false};
  if (s == "&&") return BinOp{3, true, false};
  if (s == "==" || s == "/=" || s == "<" || s == "<=" || s == ">" || s == ">=")
    return BinOp{4, false, true};
  if (s == ":") return BinOp{5, true, false};
  if (s == "+" || s == "-") return BinOp{6, false, false};
  if (s == "*") return BinOp{7, false, false};
  return std::nullopt;
}

ExprPtr with_pos(ExprPtr e, SourcePos p) {
  auto copy = std::make_shared<Expr>(*e);
  copy->pos = p;
  return copy;
}

ExprPtr list_expr(std::vector<ExprPtr> elems, SourcePos p) {
  ExprPtr acc = with_pos(mk::ctor("Nil"), p);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    acc = with_pos(mk::ctor("Cons", {*it, acc}), p);
  return acc;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  void parse_module(Program& prog, std::vector<Diagnostic>& diags, bool builtin) {
    layout_.push_back(1);
    while (true) {
      released_ = idx_;
      if (raw().kind == Token::Kind::End) break;
      if (raw().pos.column != 1) {
        diags.push_back({Diagnostic::Kind::Syntax, raw().pos,
                         "declaration must start in column 1"});
        skip_to_next_decl();
        continue;
      }
      try {
        parse_decl(prog, builtin);
        if (!at_end())
          throw ParseError(peek().pos, "unexpected '" + peek().text + "'");
      } catch (const ParseError& e) {
        diags.push_back({e.kind, e.pos, e.what()});
        skip_to_next_decl();
      }
    }
    layout_.pop_back();
  }

  ExprPtr parse_standalone_expr() {
    layout_.push_back(0);
    released_ = idx_;
    auto e = parse_expr(0);
    if (raw().kind != Token::Kind::End)
      throw ParseError(raw().pos, "unexpected '" + raw().text + "'");
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  std::size_t released_ = static_cast<std::size_t>(-1);
  std::vector<int> layout_;
  mutable Token end_;

  const Token& raw() const { return toks_[idx_]; }

  bool blocked(std::size_t i) const {
    const auto& t = toks_[i];
    if (t.kind == Token::Kind::End) return true;
    return t.bol && !layout_.empty() && t.pos.column <= layout_.back() && i != released_;
  }

  const Token& peek() const {
    if (blocked(idx_)) {
      end_.pos = toks_[idx_].pos;
      return end_;
    }
    return toks_[idx_];
  }

  bool at_end() const { return peek().kind == Token::Kind::End; }

  Token next() {
    const auto& t = peek();
    if (t.kind == Token::Kind::End) throw ParseError(t.pos, "unexpected end of declaration");
    return toks_[idx_++];
  }

  bool is_sym(const char* s) const {
    const auto& t = peek();
    return t.kind == Token::Kind::Sym && t.text == s;
  }
  bool is_kw(const char* s) const {
    const auto& t = peek();
    return t.kind == Token::Kind::Kw && t.text == s;
  }
  void expect_sym(const char* s) {
    if (!is_sym(s)) throw ParseError(peek().pos, std::string("expected '") + s + "'");
    next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) throw ParseError(peek().pos, std::string("expected '") + s + "'");
    next();
  }

  void skip_to_next_decl() {
    if (raw().kind != Token::Kind::End) ++idx_;
    while (raw().kind != Token::Kind::End && !(raw().bol && raw().pos.column == 1)) ++idx_;
  }

  // Opens an offside block whose items align with the next token.
  void open_block() {
    const auto& t = raw();
    int col = t.pos.column;
    if (t.bol && !layout_.empty() && col <= layout_.back())
      throw ParseError(t.pos, "empty block");
    layout_.push_back(col);
    released_ = idx_;
  }
  void close_block() { layout_.pop_back(); }
  // True when another block item follows (separator ';' or aligned new line).
  bool block_continues() {
    if (is_sym(";")) {
      next();
      released_ = idx_;
      return !at_end();
    }
    const auto& t = raw();
    // A keyword cannot start an item, so an aligned `where` or `in` closes the block.
    if (t.kind != Token::Kind::End && t.kind != Token::Kind::Kw && t.bol &&
        t.pos.column == layout_.back()) {
      released_ = idx_;
      return true;
    }
    return false;
  }

  // ---------------------------------------------------------------- decls

  void parse_decl(Program& prog, bool builtin) {
    const auto& t = peek();
    if (t.kind == Token::Kind::Kw && t.text == "data") {
      parse_data(prog, builtin);
      return;
    }
    if (t.kind == Token::Kind::Kw && t.text == "prop") {
      parse_prop(prog);
      return;
    }
    if (t.kind != Token::Kind::Ident)
      throw ParseError(t.pos, "expected a declaration, found '" + t.text + "'");
    if (toks_[idx_ + 1].kind == Token::Kind::Sym && toks_[idx_ + 1].text == "::") {
      parse_signature(prog);
      return;
    }
    parse_rule(prog);
  }

  void parse_data(Program& prog, bool builtin) {
    auto pos = next().pos;
    if (peek().kind != Token::Kind::Ctor) throw ParseError(peek().pos, "expected type name");
    TypeDecl decl;
    decl.pos = pos;
    decl.builtin = builtin;
    decl.name = next().text;
    while (peek().kind == Token::Kind::Ident) decl.params.push_back(next().text);
    expect_sym("=");
    while (true) {
      if (peek().kind != Token::Kind::Ctor) throw ParseError(peek().pos, "expected constructor");
      CtorDecl c;
      c.pos = peek().pos;
      c.name = next().text;
      while (starts_atype()) c.args.push_back(parse_atype());
      decl.ctors.push_back(std::move(c));
      if (!is_sym("|")) break;
      next();
    }
    prog.types.push_back(std::move(decl));
  }

  void parse_prop(Program& prog) {
    auto pos = next().pos;
    if (peek().kind != Token::Kind::Ident) throw ParseError(peek().pos, "expected property name");
    PropDecl p;
    p.pos = pos;
    p.name = next().text;
    for (auto [suffix, ann] : {std::pair{"'TERMINATE", Annotation::Terminate},
                               std::pair{"'PRODUCTIVE", Annotation::Productive}}) {
      std::string s(suffix);
      if (p.name.size() > s.size() && p.name.ends_with(s)) {
        p.name.resize(p.name.size() - s.size());
        p.annotation = ann;
      }
    }
    expect_sym("=");
    if (peek().kind != Token::Kind::Ident) throw ParseError(peek().pos, "expected operation name");
    p.lhs = next().text;
    expect_sym("<=>");
    if (peek().kind != Token::Kind::Ident) throw ParseError(peek().pos, "expected operation name");
    p.rhs = next().text;
    prog.props.push_back(std::move(p));
  }

  void parse_signature(Program& prog) {
    auto name_tok = next();
    expect_sym("::");
    Signature sig;
    sig.pos = name_tok.pos;
    std::vector<Type> parts{parse_btype()};
    while (is_sym("->")) {
      next();
      parts.push_back(parse_btype());
    }
    sig.result = parts.back();
    parts.pop_back();
    sig.params = std::move(parts);
    if (!prog.signatures.emplace(name_tok.text, sig).second)
      throw ParseError(name_tok.pos, "duplicate signature for '" + name_tok.text + "'",
                       Diagnostic::Kind::Duplicate);
  }

  void parse_rule(Program& prog) {
    auto name_tok = next();
    Rule r;
    r.op = name_tok.text;
    r.pos = name_tok.pos;
    while (!is_sym("=") && !is_sym("|")) {
      if (!starts_apat()) throw ParseError(peek().pos, "expected pattern, '|' or '='");
      r.params.push_back(parse_apat());
    }
    if (is_sym("|")) {
      next();
      r.guard = parse_expr(0);
    }
    expect_sym("=");
    r.body = parse_expr(0);
    if (is_kw("where")) {
      next();
      r.where = parse_bindings();
    }
    OpDecl* op = prog.ops.empty() ? nullptr : &prog.ops.back();
    if (op && op->name == r.op) {
      op->rules.push_back(std::move(r));
      return;
    }
    if (prog.find_op(r.op))
      throw ParseError(r.pos, "duplicate definition of '" + r.op + "' (rules must be contiguous)",
                       Diagnostic::Kind::Duplicate);
    OpDecl decl;
    decl.name = r.op;
    decl.pos = r.pos;
    decl.rules.push_back(std::move(r));
    prog.ops.push_back(std::move(decl));
  }

  std::vector<LetBinding> parse_bindings() {
    std::vector<LetBinding> out;
    open_block();
    do {
      LetBinding b;
      b.lhs = parse_pattern();
      if (!is_sym("=")) {
        if (b.lhs.kind == Pattern::Kind::Var && starts_apat())
          throw ParseError(peek().pos, "local function definitions are not supported");
        throw ParseError(peek().pos, "expected '=' in binding");
      }
      next();
      b.rhs = parse_expr(0);
      out.push_back(std::move(b));
    } while (block_continues());
    close_block();
    return out;
  }

  // ---------------------------------------------------------------- types

  bool starts_atype() const {
    const auto& t = peek();
    return t.kind == Token::Kind::Ctor || t.kind == Token::Kind::Ident ||
           (t.kind == Token::Kind::Sym && (t.text == "(" || t.text == "["));
  }

  Type named_type(const std::string& name) {
    return name == "Int" ? Type::integer() : Type::data(name);
  }

  Type parse_btype() {
    if (peek().kind == Token::Kind::Ctor) {
      auto name = next().text;
      Type t = named_type(name);
      if (t.kind == Type::Kind::Data)
        while (starts_atype()) t.args.push_back(parse_atype());
      return t;
    }
    return parse_atype();
  }

  Type parse_atype() {
    auto t = next();
    if (t.kind == Token::Kind::Ctor) return named_type(t.text);
    if (t.kind == Token::Kind::Ident) return Type::var(t.text);
    if (t.kind == Token::Kind::Sym && t.text == "[") {
      auto elem = parse_btype();
      expect_sym("]");
      return Type::data("List", {elem});
    }
    if (t.kind == Token::Kind::Sym && t.text == "(") {
      auto a = parse_btype();
      if (is_sym("->")) throw ParseError(peek().pos, "higher-order types are not supported");
      if (is_sym(",")) {
        next();
        auto b = parse_btype();
        expect_sym(")");
        return Type::data("Pair", {a, b});
      }
      expect_sym(")");
      return a;
    }
    throw ParseError(t.pos, "expected type, found '" + t.text + "'");
  }

  // ---------------------------------------------------------------- patterns

  bool starts_apat() const {
    const auto& t = peek();
    if (t.kind == Token::Kind::Ident || t.kind == Token::Kind::Ctor || t.kind == Token::Kind::Int)
      return true;
    return t.kind == Token::Kind::Sym && (t.text == "_" || t.text == "(" || t.text == "[");
  }

  Pattern parse_pattern() {
    auto p = parse_pat_app();
    if (is_sym(":")) {
      auto pos = next().pos;
      auto tail = parse_pattern();
      auto c = Pattern::ctor("Cons", {std::move(p), std::move(tail)});
      c.pos = pos;
      return c;
    }
    return p;
  }

  Pattern parse_pat_app() {
    if (peek().kind == Token::Kind::Ctor) {
      auto t = next();
      auto p = Pattern::ctor(t.text);
      p.pos = t.pos;
      while (starts_apat()) p.args.push_back(parse_apat());
      return p;
    }
    if (is_sym("-")) {
      auto pos = next().pos;
      if (peek().kind != Token::Kind::Int) throw ParseError(pos, "expected integer after '-'");
      auto p = Pattern::integer(-next().value);
      p.pos = pos;
      return p;
    }
    return parse_apat();
  }

  Pattern parse_apat() {
    auto t = next();
    Pattern p;
    switch (t.kind) {
      case Token::Kind::Ident: p = Pattern::var(t.text); break;
      case Token::Kind::Ctor: p = Pattern::ctor(t.text); break;
      case Token::Kind::Int: p = Pattern::integer(t.value); break;
      case Token::Kind::Sym:
        if (t.text == "_") {
          p = Pattern::wildcard();
        } else if (t.text == "(") {
          p = parse_pattern();
          if (is_sym(",")) {
            next();
            auto q = parse_pattern();
            p = Pattern::ctor("Pair", {std::move(p), std::move(q)});
          }
          expect_sym(")");
        } else if (t.text == "[") {
          std::vector<Pattern> elems;
          if (!is_sym("]")) {
            elems.push_back(parse_pattern());
            while (is_sym(",")) {
              next();
              elems.push_back(parse_pattern());
            }
          }
          expect_sym("]");
          p = Pattern::ctor("Nil");
          for (auto it = elems.rbegin(); it != elems.rend(); ++it)
            p = Pattern::ctor("Cons", {std::move(*it), std::move(p)});
        } else {
          throw ParseError(t.pos, "expected pattern, found '" + t.text + "'");
        }
        break;
      default: throw ParseError(t.pos, "expected pattern, found '" + t.text + "'");
    }
    p.pos = t.pos;
    return p;
  }

  // ---------------------------------------------------------------- expressions

  ExprPtr parse_expr(int min_prec) {
    auto lhs = parse_prefix();
    while (true) {
      auto op = binop(peek());
      if (!op || op->prec < min_prec) break;
      auto tok = next();
      auto rhs = parse_expr(op->right ? op->prec : op->prec + 1);
      lhs = with_pos(combine(tok.text, lhs, rhs), tok.pos);
      if (op->nonassoc) {
        auto again = binop(peek());
        if (again && again->prec == op->prec)
          throw ParseError(peek().pos, "non-associative operator '" + peek().text + "'");
      }
    }
    return lhs;
  }

  static ExprPtr combine(const std::string& op, ExprPtr a, ExprPtr b) {
    static const std::pair<const char*, Prim> kPrims[] = {
        {"+", Prim::Add}, {"-", Prim::Sub}, {"*", Prim::Mul},  {"==", Prim::Eq},
        {"/=", Prim::Ne}, {"<", Prim::Lt},  {"<=", Prim::Le},  {">", Prim::Gt},
        {">=", Prim::Ge}, {"&&", Prim::And}, {"||", Prim::Or}};
    if (op == "?") return mk::choice(std::move(a), std::move(b));
    if (op == ":") return mk::ctor("Cons", {std::move(a), std::move(b)});
    for (auto [s, p] : kPrims)
      if (op == s) return mk::prim(p, {std::move(a), std::move(b)});
    throw std::logic_error("unknown operator " + op);
  }

  ExprPtr parse_prefix() {
    const auto& t = peek();
    if (t.kind == Token::Kind::Sym && t.text == "-") {
      auto pos = next().pos;
      auto operand = parse_expr(7);
      if (operand->kind == Expr::Kind::Int) return with_pos(mk::integer(-operand->value), pos);
      return with_pos(mk::prim(Prim::Sub, {mk::integer(0), operand}), pos);
    }
    if (t.kind == Token::Kind::Kw) {
      if (t.text == "if") {
        auto pos = next().pos;
        auto c = parse_expr(0);
        expect_kw("then");
        auto th = parse_expr(0);
        expect_kw("else");
        auto el = parse_expr(0);
        return with_pos(mk::if_(c, th, el), pos);
      }
      if (t.text == "let") {
        auto pos = next().pos;
        auto binds = parse_bindings();
        expect_kw("in");
        auto body = parse_expr(0);
        return with_pos(mk::let(std::move(binds), body), pos);
      }
      if (t.text == "case") {
        auto pos = next().pos;
        auto scrut = parse_expr(0);
        expect_kw("of");
        std::vector<Alt> alts;
        open_block();
        do {
          Alt a;
          a.pattern = parse_pattern();
          expect_sym("->");
          a.body = parse_expr(0);
          alts.push_back(std::move(a));
        } while (block_continues());
        close_block();
        return with_pos(mk::case_(scrut, std::move(alts)), pos);
      }
    }
    return parse_app();
  }

  bool starts_atom() const {
    const auto& t = peek();
    if (t.kind == Token::Kind::Ident || t.kind == Token::Kind::Ctor || t.kind == Token::Kind::Int)
      return true;
    if (t.kind == Token::Kind::Kw) return t.text == "failed";
    return t.kind == Token::Kind::Sym && (t.text == "(" || t.text == "[");
  }

  ExprPtr parse_app() {
    const auto& t = peek();
    if (t.kind == Token::Kind::Ident || t.kind == Token::Kind::Ctor) {
      auto head = next();
      std::vector<ExprPtr> args;
      while (starts_atom()) args.push_back(parse_atom());
      auto e = head.kind == Token::Kind::Ident ? mk::call(head.text, std::move(args))
                                               : mk::ctor(head.text, std::move(args));
      return with_pos(e, head.pos);
    }
    auto a = parse_atom();
    if (starts_atom()) throw ParseError(peek().pos, "only named operations can be applied");
    return a;
  }

  ExprPtr parse_atom() {
    auto t = next();
    switch (t.kind) {
      case Token::Kind::Ident: return with_pos(mk::call(t.text), t.pos);
      case Token::Kind::Ctor: return with_pos(mk::ctor(t.text), t.pos);
      case Token::Kind::Int: return with_pos(mk::integer(t.value), t.pos);
      case Token::Kind::Kw:
        if (t.text == "failed") return with_pos(mk::failed(), t.pos);
        break;
      case Token::Kind::Sym:
        if (t.text == "(") {
          auto e = parse_expr(0);
          if (is_sym(",")) {
            next();
            auto b = parse_expr(0);
            expect_sym(")");
            return with_pos(mk::ctor("Pair", {e, b}), t.pos);
          }
          expect_sym(")");
          return e;
        }
        if (t.text == "[") {
          std::vector<ExprPtr> elems;
          if (!is_sym("]")) {
            elems.push_back(parse_expr(0));
            while (is_sym(",")) {
              next();
              elems.push_back(parse_expr(0));
            }
          }
          expect_sym("]");
          return list_expr(std::move(elems), t.pos);
        }
        break;
      default: break;
    }
    throw ParseError(t.pos, "expected expression, found '" + t.text + "'");
  }
};

}  // namespace

ParseResult parse_program(std::string_view source, const ParseOptions& options) {
  ParseResult result;
  Program prog;
  if (options.include_prelude) {
    std::vector<Diagnostic> pd;
    Parser(lex(prelude_source(), pd)).parse_module(prog, pd, true);
  }
  auto toks = lex(source, result.diagnostics);
  Parser(std::move(toks)).parse_module(prog, result.diagnostics, false);
  auto more = validate(prog);
  result.diagnostics.insert(result.diagnostics.end(), more.begin(), more.end());
  if (result.diagnostics.empty()) result.program = std::move(prog);
  return result;
}

// Defined in validate.cpp.
ExprPtr resolve_closed_expr(const ExprPtr& e, const Program& prog, std::vector<Diagnostic>& diags);

ExprResult parse_expression(std::string_view source, const Program& program) {
  ExprResult out;
  auto toks = lex(source, out.diagnostics);
  if (!out.diagnostics.empty()) return out;
  try {
    auto raw = Parser(std::move(toks)).parse_standalone_expr();
    auto resolved = resolve_closed_expr(raw, program, out.diagnostics);
    if (out.diagnostics.empty()) out.expr = resolved;
  } catch (const ParseError& e) {
    out.diagnostics.push_back({e.kind, e.pos, e.what()});
  }
  return out;
}

}  // namespace flp
