#include "fieldc/parser.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "fieldc/builtins.hpp"
#include "fieldc/value.hpp"

namespace fieldc {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Ident, Number, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  double num = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  Lexer(const std::string& src, std::string file) : src_(src), file_(std::move(file)) {
    tokenize();
  }

  const std::vector<Token>& tokens() const { return toks_; }
  const std::string& file() const { return file_; }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(file_, line_, col_, msg); }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') { ++line_; col_ = 1; } else { ++col_; }
    return c;
  }

  void tokenize() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { advance(); continue; }
      if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
        continue;
      }
      int line = line_, col = col_;
      if (std::isdigit(static_cast<unsigned char>(c))) { number(line, col); continue; }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') { ident(line, col); continue; }
      if (c == '"') { stringLit(line, col); continue; }
      punct(line, col);
    }
    toks_.push_back({Token::Kind::End, "", 0, line_, col_});
  }

  void number(int line, int col) {
    std::string text;
    while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      text += advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::string exp;
      exp += peek();
      size_t save = 1;
      if (peek(1) == '+' || peek(1) == '-') { exp += peek(1); ++save; }
      if (std::isdigit(static_cast<unsigned char>(peek(save)))) {
        for (size_t i = 0; i < exp.size(); ++i) advance();
        text += exp;
        while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
      }
    }
    toks_.push_back({Token::Kind::Number, text, std::stod(text), line, col});
  }

  void ident(int line, int col) {
    std::string text;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') text += advance();
    toks_.push_back({Token::Kind::Ident, text, 0, line, col});
  }

  void stringLit(int line, int col) {
    advance();  // opening quote
    std::string text;
    while (true) {
      if (pos_ >= src_.size()) fail("unterminated string literal");
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) fail("unterminated escape");
        char e = advance();
        switch (e) {
          case 'n': text += '\n'; break;
          case 't': text += '\t'; break;
          case '"': text += '"'; break;
          case '\\': text += '\\'; break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
      } else {
        text += c;
      }
    }
    toks_.push_back({Token::Kind::String, text, 0, line, col});
  }

  void punct(int line, int col) {
    static const std::vector<std::string> puncts = {
        "=>", "==", "!=", "<=", ">=", "&&", "||", "(", ")", "{",
        "}",  ",",  "+",  "-",  "*",  "/",  "<",  ">", "!"};
    for (const std::string& p : puncts) {
      if (src_.compare(pos_, p.size(), p) == 0) {
        for (size_t i = 0; i < p.size(); ++i) advance();
        toks_.push_back({Token::Kind::Punct, p, 0, line, col});
        return;
      }
    }
    fail(std::string("unexpected character '") + peek() + "'");
  }

  const std::string& src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  std::vector<Token> toks_;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

using ExprPtr = std::unique_ptr<Expr>;

ExprPtr makeNode(Expr::Kind kind, const Token& at) {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->line = at.line;
  e->col = at.col;
  return e;
}

void adopt(Expr& parent, ExprPtr child) {
  child->slot = static_cast<int>(parent.kids.size());
  parent.kids.push_back(std::move(child));
}

class Parser {
 public:
  Parser(const std::vector<Token>& toks, std::string file)
      : toks_(toks), file_(std::move(file)) {}

  Program parseProgram() {
    Program p;
    while (check("def")) p.defs.push_back(parseDef());
    if (!atEnd()) {
      p.main = parseExpr();
      p.main->slot = 0;
    }
    expect(Token::Kind::End, "expected end of input");
    for (size_t i = 0; i < p.defs.size(); ++i) {
      if (p.defIndex.count(p.defs[i].name))
        throw ParseError(file_, p.defs[i].line, p.defs[i].col,
                         "duplicate definition '" + p.defs[i].name + "'");
      p.defIndex[p.defs[i].name] = i;
    }
    return p;
  }

 private:
  const Token& cur(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  bool atEnd() const { return cur().kind == Token::Kind::End; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(file_, cur().line, cur().col, msg);
  }

  bool check(const std::string& text) const {
    return (cur().kind == Token::Kind::Punct || cur().kind == Token::Kind::Ident) &&
           cur().text == text;
  }

  bool match(const std::string& text) {
    if (!check(text)) return false;
    ++pos_;
    return true;
  }

  Token expectText(const std::string& text, const std::string& what) {
    if (!check(text)) fail("expected '" + text + "' " + what);
    return toks_[pos_++];
  }

  Token expect(Token::Kind kind, const std::string& msg) {
    if (cur().kind != kind) fail(msg);
    return toks_[pos_++];
  }

  Token expectIdent(const std::string& what) {
    if (cur().kind != Token::Kind::Ident) fail("expected identifier " + what);
    Token t = toks_[pos_++];
    if (isReserved(t.text)) fail("'" + t.text + "' is reserved");
    return t;
  }

  static bool isReserved(const std::string& s) {
    return s == "def" || s == "rep" || s == "nbr" || s == "true" || s == "false" ||
           s == "infinity";
  }

  std::vector<std::string> parseParams() {
    std::vector<std::string> params;
    if (check(")")) return params;
    while (true) {
      Token t = expectIdent("in parameter list");
      for (const std::string& p : params)
        if (p == t.text)
          throw ParseError(file_, t.line, t.col, "duplicate parameter '" + t.text + "'");
      params.push_back(t.text);
      if (!match(",")) break;
    }
    return params;
  }

  Def parseDef() {
    Token kw = expectText("def", "");
    Token name = expectIdent("after 'def'");
    Def d;
    d.name = name.text;
    d.line = kw.line;
    d.col = kw.col;
    expectText("(", "after definition name");
    d.params = parseParams();
    expectText(")", "after parameters");
    expectText("{", "before definition body");
    d.body = parseExpr();
    d.body->slot = 0;
    expectText("}", "after definition body");
    return d;
  }

  ExprPtr parseExpr() { return parseOr(); }

  ExprPtr infixApply(const Token& opTok, ExprPtr lhs, ExprPtr rhs) {
    auto target = makeNode(Expr::Kind::Var, opTok);  // resolved to BuiltinRef later
    target->name = opTok.text;
    auto apply = makeNode(Expr::Kind::Apply, opTok);
    adopt(*apply, std::move(target));
    adopt(*apply, std::move(lhs));
    adopt(*apply, std::move(rhs));
    return apply;
  }

  ExprPtr parseOr() {
    ExprPtr e = parseAnd();
    while (check("||")) {
      Token op = toks_[pos_++];
      e = infixApply(op, std::move(e), parseAnd());
    }
    return e;
  }

  ExprPtr parseAnd() {
    ExprPtr e = parseCmp();
    while (check("&&")) {
      Token op = toks_[pos_++];
      e = infixApply(op, std::move(e), parseCmp());
    }
    return e;
  }

  // Comparisons do not chain: a < b < c is a syntax error.
  ExprPtr parseCmp() {
    ExprPtr e = parseAdd();
    for (const char* op : {"<=", ">=", "==", "!=", "<", ">"}) {
      if (check(op)) {
        Token t = toks_[pos_++];
        return infixApply(t, std::move(e), parseAdd());
      }
    }
    return e;
  }

  ExprPtr parseAdd() {
    ExprPtr e = parseMul();
    while (true) {
      if (check("+") || (check("-") && !isOperatorRef())) {
        Token op = toks_[pos_++];
        e = infixApply(op, std::move(e), parseMul());
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr parseMul() {
    ExprPtr e = parseUnary();
    while (check("*") || check("/")) {
      Token op = toks_[pos_++];
      e = infixApply(op, std::move(e), parseUnary());
    }
    return e;
  }

  ExprPtr parseUnary() {
    if (check("!") && !isOperatorRef()) {
      Token op = toks_[pos_++];
      auto target = makeNode(Expr::Kind::Var, op);
      target->name = "!";
      auto apply = makeNode(Expr::Kind::Apply, op);
      adopt(*apply, std::move(target));
      adopt(*apply, parseUnary());
      return apply;
    }
    if (check("-") && !isOperatorRef()) {
      Token op = toks_[pos_++];
      auto target = makeNode(Expr::Kind::Var, op);
      target->name = "-";
      auto apply = makeNode(Expr::Kind::Apply, op);
      adopt(*apply, std::move(target));
      adopt(*apply, parseUnary());
      return apply;
    }
    return parsePostfix();
  }

  ExprPtr parsePostfix() {
    ExprPtr e = parsePrimary();
    while (check("(")) {
      Token open = toks_[pos_++];
      auto apply = makeNode(Expr::Kind::Apply, open);
      apply->line = e->line;
      apply->col = e->col;
      adopt(*apply, std::move(e));
      if (!check(")")) {
        while (true) {
          adopt(*apply, parseExpr());
          if (!match(",")) break;
        }
      }
      expectText(")", "after arguments");
      e = std::move(apply);
    }
    return e;
  }

  // An operator token used as a value, e.g. the + in mux(s, +, -). Only
  // allowed where the next token proves no operand follows.
  bool isOperatorRef() const {
    if (cur().kind != Token::Kind::Punct || !isInfixOperator(cur().text))
      if (!(cur().kind == Token::Kind::Punct && cur().text == "!")) return false;
    const Token& next = cur(1);
    if (next.kind == Token::Kind::End) return true;
    return next.kind == Token::Kind::Punct &&
           (next.text == "," || next.text == ")" || next.text == "}");
  }

  // Decides between a parenthesized expression and a lambda by scanning to
  // the matching ')'.
  bool lambdaAhead() const {
    size_t i = pos_ + 1;
    int depth = 1;
    while (i < toks_.size() && depth > 0) {
      const Token& t = toks_[i];
      if (t.kind == Token::Kind::Punct) {
        if (t.text == "(") ++depth;
        if (t.text == ")") --depth;
      }
      if (t.kind == Token::Kind::End) return false;
      ++i;
    }
    return i < toks_.size() && toks_[i].kind == Token::Kind::Punct && toks_[i].text == "=>";
  }

  ExprPtr parsePrimary() {
    const Token& t = cur();

    if (t.kind == Token::Kind::Number) {
      auto e = makeNode(Expr::Kind::Literal, t);
      e->lit = t.num;
      ++pos_;
      return e;
    }
    if (t.kind == Token::Kind::String) {
      auto e = makeNode(Expr::Kind::Literal, t);
      e->lit = t.text;
      ++pos_;
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      if (t.text == "true" || t.text == "false") {
        auto e = makeNode(Expr::Kind::Literal, t);
        e->lit = (t.text == "true");
        ++pos_;
        return e;
      }
      if (t.text == "infinity") {
        auto e = makeNode(Expr::Kind::Literal, t);
        e->lit = std::numeric_limits<double>::infinity();
        ++pos_;
        return e;
      }
      if (t.text == "rep") return parseRep();
      if (t.text == "nbr") return parseNbr();
      if (t.text == "def") fail("'def' is only allowed at top level");
      auto e = makeNode(Expr::Kind::Var, t);
      e->name = t.text;
      ++pos_;
      return e;
    }
    if (t.kind == Token::Kind::Punct) {
      if (isOperatorRef()) {
        auto e = makeNode(Expr::Kind::Var, t);
        e->name = t.text;
        ++pos_;
        return e;
      }
      if (t.text == "(") {
        if (lambdaAhead()) return parseLambda();
        ++pos_;
        ExprPtr e = parseExpr();
        expectText(")", "to close parenthesized expression");
        return e;
      }
    }
    fail(atEnd() ? "unexpected end of input" : "unexpected token '" + t.text + "'");
  }

  ExprPtr parseLambda() {
    Token open = expectText("(", "to open lambda parameters");
    auto e = makeNode(Expr::Kind::Lambda, open);
    e->params = parseParams();
    expectText(")", "after lambda parameters");
    expectText("=>", "in lambda");
    adopt(*e, parseExpr());
    return e;
  }

  ExprPtr parseRep() {
    Token kw = expectText("rep", "");
    auto e = makeNode(Expr::Kind::Rep, kw);
    expectText("(", "after 'rep'");
    adopt(*e, parseExpr());
    expectText(")", "after rep initial value");
    expectText("{", "before rep update");
    adopt(*e, parseExpr());
    expectText("}", "after rep update");
    return e;
  }

  ExprPtr parseNbr() {
    Token kw = expectText("nbr", "");
    auto e = makeNode(Expr::Kind::Nbr, kw);
    expectText("{", "after 'nbr'");
    adopt(*e, parseExpr());
    expectText("}", "after nbr body");
    return e;
  }

  const std::vector<Token>& toks_;
  std::string file_;
  size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Resolution: Var nodes become Var/DefRef/BuiltinRef; arities are checked.
// ---------------------------------------------------------------------------

class Resolver {
 public:
  Resolver(const Program& p, const std::vector<Def>* external, std::string file)
      : program_(p), external_(external), file_(std::move(file)) {}

  void run(Program& p) {
    for (const Def& d : p.defs) {
      if (findBuiltin(d.name))
        throw ParseError(file_, d.line, d.col,
                         "definition '" + d.name + "' shadows a builtin");
    }
    for (Def& d : p.defs) {
      scopes_.push_back(d.params);
      resolve(*d.body);
      scopes_.pop_back();
    }
    if (p.main) resolve(*p.main);
  }

 private:
  [[noreturn]] void fail(const Expr& e, const std::string& msg) const {
    throw ParseError(file_, e.line, e.col, msg);
  }

  bool inScope(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      for (const std::string& p : *it)
        if (p == name) return true;
    return false;
  }

  const Def* lookupDef(const std::string& name) const {
    if (const Def* d = program_.findDef(name)) return d;
    if (external_)
      for (const Def& d : *external_)
        if (d.name == name) return &d;
    return nullptr;
  }

  void resolve(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        break;
      case Expr::Kind::Var: {
        if (inScope(e.name)) break;
        if (lookupDef(e.name)) { e.kind = Expr::Kind::DefRef; break; }
        if (findBuiltin(e.name)) { e.kind = Expr::Kind::BuiltinRef; break; }
        fail(e, "unresolved identifier '" + e.name + "'");
      }
      case Expr::Kind::Lambda:
        scopes_.push_back(e.params);
        resolve(*e.kids[0]);
        scopes_.pop_back();
        break;
      case Expr::Kind::Apply: {
        for (auto& k : e.kids) resolve(*k);
        const Expr& target = *e.kids[0];
        size_t argc = e.kids.size() - 1;
        if (target.kind == Expr::Kind::BuiltinRef) {
          const BuiltinSpec* spec = findBuiltin(target.name);
          if (!spec->acceptsArity(argc))
            fail(e, "'" + target.name + "' expects " +
                        (spec->minArity == spec->maxArity
                             ? std::to_string(spec->minArity)
                             : std::to_string(spec->minArity) + ".." +
                                   (spec->maxArity < 0 ? std::string("n")
                                                       : std::to_string(spec->maxArity))) +
                        " argument(s), got " + std::to_string(argc));
        } else if (target.kind == Expr::Kind::DefRef) {
          const Def* d = lookupDef(target.name);
          if (d->params.size() != argc)
            fail(e, "'" + target.name + "' expects " + std::to_string(d->params.size()) +
                        " argument(s), got " + std::to_string(argc));
        } else if (target.kind == Expr::Kind::Lambda) {
          if (target.params.size() != argc)
            fail(e, "lambda expects " + std::to_string(target.params.size()) +
                        " argument(s), got " + std::to_string(argc));
        }
        break;
      }
      case Expr::Kind::Rep:
      case Expr::Kind::Nbr:
        for (auto& k : e.kids) resolve(*k);
        break;
      case Expr::Kind::BuiltinRef:
      case Expr::Kind::DefRef:
        break;
    }
  }

  const Program& program_;
  const std::vector<Def>* external_;
  std::string file_;
  std::vector<std::vector<std::string>> scopes_;
};

// ---------------------------------------------------------------------------
// Lambda tags: a hash of the lambda's canonical source, so identical source
// text yields identical tags on every device, and pretty-printing preserves
// them.
// ---------------------------------------------------------------------------

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void assignTags(Expr& e) {
  for (auto& k : e.kids) assignTags(*k);
  if (e.kind == Expr::Kind::Lambda) {
    std::ostringstream os;
    os << std::hex << fnv1a64(prettyExpr(e));
    e.tag = "fn_" + os.str();
  }
}

}  // namespace

Program parse(const std::string& source, const std::string& filename,
              const std::vector<Def>* externalDefs) {
  Lexer lexer(source, filename);
  Parser parser(lexer.tokens(), filename);
  Program p = parser.parseProgram();
  if (p.defs.empty() && !p.main)
    throw ParseError(filename, 1, 1, "empty program");
  Resolver resolver(p, externalDefs, filename);
  resolver.run(p);
  for (Def& d : p.defs) assignTags(*d.body);
  if (p.main) assignTags(*p.main);
  return p;
}

// ---------------------------------------------------------------------------
// Pretty-printing
// ---------------------------------------------------------------------------

namespace {

// Precedence levels: lambda 0, || 1, && 2, comparisons 3, additive 4,
// multiplicative 5, unary 6, application 7, atoms 8.
int opPrec(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=") return 3;
  if (op == "+" || op == "-") return 4;
  return 5;  // * /
}

void printExpr(std::ostream& os, const Expr& e, int parentPrec);

void printWrapped(std::ostream& os, const Expr& e, int myPrec, int parentPrec,
                  const std::function<void()>& body) {
  (void)e;
  if (myPrec < parentPrec) {
    os << "(";
    body();
    os << ")";
  } else {
    body();
  }
}

std::string escapeString(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

void printExpr(std::ostream& os, const Expr& e, int parentPrec) {
  switch (e.kind) {
    case Expr::Kind::Literal: {
      if (std::holds_alternative<bool>(e.lit)) {
        os << (std::get<bool>(e.lit) ? "true" : "false");
      } else if (std::holds_alternative<double>(e.lit)) {
        double d = std::get<double>(e.lit);
        if (std::isinf(d))
          os << "infinity";
        else
          os << formatNum(d);
      } else {
        os << '"' << escapeString(std::get<std::string>(e.lit)) << '"';
      }
      break;
    }
    case Expr::Kind::Var:
    case Expr::Kind::BuiltinRef:
    case Expr::Kind::DefRef:
      os << e.name;
      break;
    case Expr::Kind::Lambda:
      printWrapped(os, e, 0, parentPrec, [&] {
        os << "(";
        for (size_t i = 0; i < e.params.size(); ++i) {
          if (i) os << ", ";
          os << e.params[i];
        }
        os << ") => ";
        printExpr(os, *e.kids[0], 0);
      });
      break;
    case Expr::Kind::Apply: {
      const Expr& target = *e.kids[0];
      size_t argc = e.kids.size() - 1;
      bool builtinTarget = target.kind == Expr::Kind::BuiltinRef || target.kind == Expr::Kind::Var;
      if (builtinTarget && argc == 2 && isInfixOperator(target.name)) {
        int prec = opPrec(target.name);
        printWrapped(os, e, prec, parentPrec, [&] {
          // comparisons do not chain, so both sides bind tighter
          int leftPrec = prec == 3 ? prec + 1 : prec;
          printExpr(os, *e.kids[1], leftPrec);
          os << " " << target.name << " ";
          printExpr(os, *e.kids[2], prec + 1);
        });
        break;
      }
      if (builtinTarget && argc == 1 && (target.name == "-" || target.name == "!")) {
        printWrapped(os, e, 6, parentPrec, [&] {
          os << target.name;
          printExpr(os, *e.kids[1], 6);
        });
        break;
      }
      printWrapped(os, e, 7, parentPrec, [&] {
        printExpr(os, target, 8);  // lambdas and operator refs get parens
        os << "(";
        for (size_t i = 1; i < e.kids.size(); ++i) {
          if (i > 1) os << ", ";
          printExpr(os, *e.kids[i], 0);
        }
        os << ")";
      });
      break;
    }
    case Expr::Kind::Rep:
      os << "rep(";
      printExpr(os, *e.kids[0], 0);
      os << ") { ";
      printExpr(os, *e.kids[1], 0);
      os << " }";
      break;
    case Expr::Kind::Nbr:
      os << "nbr{";
      printExpr(os, *e.kids[0], 0);
      os << "}";
      break;
  }
}

}  // namespace

std::string prettyExpr(const Expr& e) {
  std::ostringstream os;
  printExpr(os, e, 0);
  return os.str();
}

std::string pretty(const Program& p) {
  std::ostringstream os;
  for (const Def& d : p.defs) {
    os << "def " << d.name << "(";
    for (size_t i = 0; i < d.params.size(); ++i) {
      if (i) os << ", ";
      os << d.params[i];
    }
    os << ") {\n    ";
    printExpr(os, *d.body, 0);
    os << "\n}\n\n";
  }
  if (p.main) {
    printExpr(os, *p.main, 0);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

bool exprEquals(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.slot != b.slot) return false;
  switch (a.kind) {
    case Expr::Kind::Literal:
      if (a.lit.index() != b.lit.index()) return false;
      if (std::holds_alternative<double>(a.lit)) {
        double x = std::get<double>(a.lit), y = std::get<double>(b.lit);
        if (!(x == y)) return false;
      } else if (a.lit != b.lit) {
        return false;
      }
      break;
    case Expr::Kind::Var:
    case Expr::Kind::BuiltinRef:
    case Expr::Kind::DefRef:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Lambda:
      if (a.params != b.params || a.tag != b.tag) return false;
      break;
    default:
      break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!exprEquals(*a.kids[i], *b.kids[i])) return false;
  return true;
}

bool programEquals(const Program& a, const Program& b) {
  if (a.defs.size() != b.defs.size()) return false;
  for (size_t i = 0; i < a.defs.size(); ++i) {
    if (a.defs[i].name != b.defs[i].name || a.defs[i].params != b.defs[i].params)
      return false;
    if (!exprEquals(*a.defs[i].body, *b.defs[i].body)) return false;
  }
  if (static_cast<bool>(a.main) != static_cast<bool>(b.main)) return false;
  if (a.main && !exprEquals(*a.main, *b.main)) return false;
  return true;
}

}  // namespace fieldc
