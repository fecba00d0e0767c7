#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>

#include "fieldc/export.hpp"
#include "fieldc/value.hpp"

namespace fieldc {

// Services a builtin may need from the evaluator. applyPointwise applies a
// function value with exports disabled; mapHood/foldHood use it to run user
// functions once per neighbour entry.
struct BuiltinCallCtx {
  const RoundContext* round = nullptr;
  std::function<Value(const FuncValue&, std::span<const Value>)> applyPointwise;
};

struct BuiltinSpec {
  std::string name;
  int minArity = 0;
  int maxArity = 0;  // -1: unbounded
  // Liftable builtins apply pointwise when any argument is an NbrMap
  // (key sets intersect, scalars broadcast). Hood folds and context
  // builtins handle NbrMaps themselves and never lift.
  bool liftable = true;
  // Pure builtins ignore the round context entirely.
  bool pure = true;
  std::function<Value(std::span<const Value>, BuiltinCallCtx&)> fn;

  bool acceptsArity(size_t n) const {
    return n >= static_cast<size_t>(minArity) &&
           (maxArity < 0 || n <= static_cast<size_t>(maxArity));
  }
};

// Name -> spec, in stable (sorted) order.
const std::map<std::string, BuiltinSpec>& builtinRegistry();

const BuiltinSpec* findBuiltin(const std::string& name);

// Arity check is the caller's job; this dispatches and lifts.
Value invokeBuiltin(const BuiltinSpec& spec, std::span<const Value> args,
                    BuiltinCallCtx& ctx);

// Names usable in infix position, e.g. "a + b"; parser and pretty-printer
// share this table.
bool isInfixOperator(const std::string& name);

}  // namespace fieldc
