#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "fieldc/ast.hpp"
#include "fieldc/export.hpp"
#include "fieldc/rng.hpp"
#include "fieldc/value.hpp"

namespace fieldc {

class EvalError : public std::runtime_error {
 public:
  EvalError(Path path, const std::string& msg)
      : std::runtime_error("at " + pathToString(path) + ": " + msg),
        path(std::move(path)) {}
  Path path;
};

struct RoundResult {
  Value result;
  ExportTree exports;
};

struct EvalOptions {
  // When set, rep initial values get their numeric/boolean leaves replaced
  // by draws from `rng` (shape-preserving); used for warm-start uniqueness
  // testing.
  Rng* randomizeRepInit = nullptr;
  double randomizeRange = 4.0;
};

// Evaluates one computation round of `program` for the device described by
// `ctx`. Pure: equal inputs give bit-identical outputs.
RoundResult evalRound(const Program& program, const RoundContext& ctx,
                      const EvalOptions& options = {});

}  // namespace fieldc
