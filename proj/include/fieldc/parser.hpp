#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fieldc/ast.hpp"

namespace fieldc {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, int col, const std::string& msg)
      : std::runtime_error((file.empty() ? "<input>" : file) + ":" +
                           std::to_string(line) + ":" + std::to_string(col) +
                           ": " + msg),
        line(line),
        col(col) {}
  int line, col;
};

// Parses a program: zero or more `def name(params) { body }` followed by an
// optional main expression. Identifiers resolve to lambda/def parameters,
// then defs, then builtins; anything else is an error. `externalDefs` makes
// additional definitions (e.g. the standard library) visible during
// resolution without owning them.
Program parse(const std::string& source, const std::string& filename = "",
              const std::vector<Def>* externalDefs = nullptr);

// Canonical source form; parse(pretty(p)) is structurally equal to p.
std::string pretty(const Program& p);
std::string prettyExpr(const Expr& e);

}  // namespace fieldc
