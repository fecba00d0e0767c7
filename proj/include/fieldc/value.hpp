#pragma once

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fieldc {

using DeviceId = int;

struct Expr;  // ast.hpp
class Value;

using Tuple = std::vector<Value>;
using NbrMap = std::map<DeviceId, Value>;  // ordered: folds run in ascending id order

// A first-class function: builtin, top-level def, or lambda closure.
// Identity (and equality) is the alignment tag.
struct FuncValue {
  enum class Kind { Builtin, Def, Lambda };
  Kind kind = Kind::Builtin;
  std::string tag;   // alignment key; deterministic for identical source
  std::string name;  // builtin/def name, or a printable lambda label
  const Expr* lambda = nullptr;  // Lambda only; owned by the Program
  std::shared_ptr<const std::map<std::string, Value>> captured;  // Lambda only
};

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runtime datum. NbrMap values are engine-internal: they are produced by
// nbr/nbrRange, flow through pointwise-lifted operations, and are consumed
// by hood folds; they never appear in round results or export leaves.
class Value {
 public:
  using Storage = std::variant<bool, double, std::string,
                               std::shared_ptr<const Tuple>, FuncValue,
                               std::shared_ptr<const NbrMap>>;

  Value() : v_(0.0) {}

  static Value boolean(bool b) { return Value(Storage(b)); }
  static Value num(double d) { return Value(Storage(d)); }
  static Value str(std::string s) { return Value(Storage(std::move(s))); }
  static Value tuple(Tuple t) {
    return Value(Storage(std::make_shared<const Tuple>(std::move(t))));
  }
  static Value func(FuncValue f) { return Value(Storage(std::move(f))); }
  static Value nbrs(NbrMap m) {
    return Value(Storage(std::make_shared<const NbrMap>(std::move(m))));
  }

  bool isBool() const { return std::holds_alternative<bool>(v_); }
  bool isNum() const { return std::holds_alternative<double>(v_); }
  bool isStr() const { return std::holds_alternative<std::string>(v_); }
  bool isTuple() const { return std::holds_alternative<std::shared_ptr<const Tuple>>(v_); }
  bool isFunc() const { return std::holds_alternative<FuncValue>(v_); }
  bool isNbrMap() const { return std::holds_alternative<std::shared_ptr<const NbrMap>>(v_); }

  bool asBool() const;
  double asNum() const;
  const std::string& asStr() const;
  const Tuple& asTuple() const;
  const FuncValue& asFunc() const;
  const NbrMap& asNbrMap() const;

  const char* typeName() const;

  // Rendered with round-trip float precision; tuples as [a; b], functions
  // as <fn tag>.
  std::string toString() const;

 private:
  explicit Value(Storage v) : v_(std::move(v)) {}
  Storage v_;
};

// Exact structural equality. Num uses IEEE == (so NaN != NaN), Func compares
// tags, NbrMap compares entries.
bool valueEquals(const Value& a, const Value& b);

// Structural equality with |a-b| <= eps on numbers.
bool valueApproxEquals(const Value& a, const Value& b, double eps);

// Strict ordering used by comparisons and min/max folds. Tuples compare
// lexicographically and stop at the first unequal element; NaN loses every
// comparison; mixed or unordered types raise TypeError.
bool valueLess(const Value& a, const Value& b);

// min/max with the fold-friendly NaN rule: min(NaN, x) = x.
Value valueMin(const Value& a, const Value& b);
Value valueMax(const Value& a, const Value& b);

// Shortest round-trip decimal form of a double (to_chars).
std::string formatNum(double d);

}  // namespace fieldc
