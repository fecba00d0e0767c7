#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace fieldc {

// Literal constants as written in source.
using LitValue = std::variant<bool, double, std::string>;

// One node of the parsed program. `slot` is the node's index among its
// siblings, assigned left-to-right during parsing; together with lambda
// tags it forms the alignment path.
struct Expr {
  enum class Kind { Literal, Var, Lambda, Apply, Rep, Nbr, BuiltinRef, DefRef };

  Kind kind = Kind::Literal;
  int slot = 0;
  int line = 0, col = 0;

  LitValue lit;                     // Literal
  std::string name;                 // Var / BuiltinRef / DefRef
  std::vector<std::string> params;  // Lambda
  std::string tag;                  // Lambda: function-identity token

  // Lambda: [body]; Apply: [target, args...]; Rep: [init, update]; Nbr: [body]
  std::vector<std::unique_ptr<Expr>> kids;
};

struct Def {
  std::string name;
  std::vector<std::string> params;
  std::unique_ptr<Expr> body;
  int line = 0, col = 0;
};

struct Program {
  std::vector<Def> defs;        // in source order
  std::unique_ptr<Expr> main;   // optional trailing expression

  const Def* findDef(const std::string& name) const {
    auto it = defIndex.find(name);
    return it == defIndex.end() ? nullptr : &defs[it->second];
  }

  std::map<std::string, size_t> defIndex;
};

// Structural equality: kind, slot, literal, names, params, tags, children.
bool exprEquals(const Expr& a, const Expr& b);
bool programEquals(const Program& a, const Program& b);

}  // namespace fieldc
