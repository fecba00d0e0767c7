#include "fieldc/builtins.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace fieldc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& name, const std::string& msg) {
  throw TypeError(name + ": " + msg);
}

double numArg(const std::string& name, const Value& v) {
  if (!v.isNum()) fail(name, std::string("expected Num, got ") + v.typeName());
  return v.asNum();
}

bool boolArg(const std::string& name, const Value& v) {
  if (!v.isBool()) fail(name, std::string("expected Bool, got ") + v.typeName());
  return v.asBool();
}

const NbrMap& mapArg(const std::string& name, const Value& v) {
  if (!v.isNbrMap()) fail(name, std::string("expected neighbour map, got ") + v.typeName());
  return v.asNbrMap();
}

const FuncValue& funcArg(const std::string& name, const Value& v) {
  if (!v.isFunc()) fail(name, std::string("expected function, got ") + v.typeName());
  return v.asFunc();
}

// Fold of a neighbour map in ascending device id order. Empty map yields
// the identity; NaN elements lose against anything else.
Value foldExtremum(const std::string& name, const NbrMap& m, bool wantMin) {
  if (m.empty()) return Value::num(wantMin ? kInf : -kInf);
  auto it = m.begin();
  Value acc = it->second;
  for (++it; it != m.end(); ++it)
    acc = wantMin ? valueMin(acc, it->second) : valueMax(acc, it->second);
  (void)name;
  return acc;
}

Value requireRound(const BuiltinCallCtx& ctx, const std::string& name,
                   const std::function<Value(const RoundContext&)>& f) {
  if (!ctx.round) fail(name, "requires a round context");
  return f(*ctx.round);
}

void addSpec(std::map<std::string, BuiltinSpec>& reg, BuiltinSpec spec) {
  std::string key = spec.name;
  reg.emplace(std::move(key), std::move(spec));
}

std::map<std::string, BuiltinSpec> makeRegistry() {
  std::map<std::string, BuiltinSpec> reg;

  auto num2 = [](const char* name, double (*op)(double, double)) {
    return BuiltinSpec{name, 2, 2, true, true,
                       [name, op](std::span<const Value> a, BuiltinCallCtx&) {
                         return Value::num(op(numArg(name, a[0]), numArg(name, a[1])));
                       }};
  };

  addSpec(reg, num2("+", [](double x, double y) { return x + y; }));
  addSpec(reg, num2("*", [](double x, double y) { return x * y; }));
  // IEEE semantics: division by zero gives +-inf, not an error.
  addSpec(reg, num2("/", [](double x, double y) { return x / y; }));
  addSpec(reg, num2("mod", [](double x, double y) { return x - y * std::floor(x / y); }));

  // "-" is both negation and subtraction.
  addSpec(reg, {"-", 1, 2, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  if (a.size() == 1) return Value::num(-numArg("-", a[0]));
                  return Value::num(numArg("-", a[0]) - numArg("-", a[1]));
                }});

  addSpec(reg, {"min", 2, 2, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) { return valueMin(a[0], a[1]); }});
  addSpec(reg, {"max", 2, 2, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) { return valueMax(a[0], a[1]); }});

  addSpec(reg, {"floor", 1, 1, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return Value::num(std::floor(numArg("floor", a[0])));
                }});
  addSpec(reg, {"abs", 1, 1, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return Value::num(std::fabs(numArg("abs", a[0])));
                }});

  auto cmp = [](const char* name, bool (*op)(const Value&, const Value&)) {
    return BuiltinSpec{name, 2, 2, true, true,
                       [op](std::span<const Value> a, BuiltinCallCtx&) {
                         return Value::boolean(op(a[0], a[1]));
                       }};
  };
  addSpec(reg, cmp("<", [](const Value& x, const Value& y) { return valueLess(x, y); }));
  addSpec(reg, cmp(">", [](const Value& x, const Value& y) { return valueLess(y, x); }));
  addSpec(reg, cmp("<=", [](const Value& x, const Value& y) {
            return valueLess(x, y) || valueEquals(x, y);
          }));
  addSpec(reg, cmp(">=", [](const Value& x, const Value& y) {
            return valueLess(y, x) || valueEquals(x, y);
          }));
  // Exact equality; approxEq is the tolerant variant.
  addSpec(reg, cmp("==", [](const Value& x, const Value& y) { return valueEquals(x, y); }));
  addSpec(reg, cmp("!=", [](const Value& x, const Value& y) { return !valueEquals(x, y); }));

  addSpec(reg, {"approxEq", 3, 3, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return Value::boolean(
                      valueApproxEquals(a[0], a[1], numArg("approxEq", a[2])));
                }});

  addSpec(reg, {"&&", 2, 2, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return Value::boolean(boolArg("&&", a[0]) && boolArg("&&", a[1]));
                }});
  addSpec(reg, {"||", 2, 2, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return Value::boolean(boolArg("||", a[0]) || boolArg("||", a[1]));
                }});
  addSpec(reg, {"!", 1, 1, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return Value::boolean(!boolArg("!", a[0]));
                }});

  // Pure selection: both branches are already evaluated.
  addSpec(reg, {"mux", 3, 3, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return boolArg("mux", a[0]) ? a[1] : a[2];
                }});

  addSpec(reg, {"tuple", 0, -1, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return Value::tuple(Tuple(a.begin(), a.end()));
                }});
  addSpec(reg, {"get", 2, 2, true, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  if (!a[0].isTuple())
                    fail("get", std::string("expected Tuple, got ") + a[0].typeName());
                  const Tuple& t = a[0].asTuple();
                  double di = numArg("get", a[1]);
                  auto i = static_cast<long>(di);
                  if (di != static_cast<double>(i) || i < 0 ||
                      static_cast<size_t>(i) >= t.size())
                    fail("get", "index " + formatNum(di) + " out of range for tuple of size " +
                                    std::to_string(t.size()));
                  return t[static_cast<size_t>(i)];
                }});

  // Hood folds: summarise a neighbour map to an ordinary value. They never
  // include the evaluating device's own entry (nbr maps exclude self).
  addSpec(reg, {"minHood", 1, 1, false, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return foldExtremum("minHood", mapArg("minHood", a[0]), true);
                }});
  addSpec(reg, {"maxHood", 1, 1, false, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  return foldExtremum("maxHood", mapArg("maxHood", a[0]), false);
                }});
  addSpec(reg, {"sumHood", 1, 1, false, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  double s = 0.0;
                  for (const auto& [d, v] : mapArg("sumHood", a[0])) s += numArg("sumHood", v);
                  return Value::num(s);
                }});
  addSpec(reg, {"anyHood", 1, 1, false, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  for (const auto& [d, v] : mapArg("anyHood", a[0]))
                    if (boolArg("anyHood", v)) return Value::boolean(true);
                  return Value::boolean(false);
                }});
  addSpec(reg, {"allHood", 1, 1, false, true,
                [](std::span<const Value> a, BuiltinCallCtx&) {
                  for (const auto& [d, v] : mapArg("allHood", a[0]))
                    if (!boolArg("allHood", v)) return Value::boolean(false);
                  return Value::boolean(true);
                }});

  // foldHood(f, init, m): left fold in ascending id order. f runs with
  // exports disabled, so it must not contain rep or nbr.
  addSpec(reg, {"foldHood", 3, 3, false, true,
                [](std::span<const Value> a, BuiltinCallCtx& ctx) {
                  const FuncValue& f = funcArg("foldHood", a[0]);
                  Value acc = a[1];
                  for (const auto& [d, v] : mapArg("foldHood", a[2])) {
                    Value args[2] = {acc, v};
                    acc = ctx.applyPointwise(f, std::span<const Value>(args, 2));
                  }
                  return acc;
                }});

  // mapHood(f, x1..xn): apply f per neighbour over the key intersection of
  // the NbrMap arguments; scalar arguments broadcast.
  addSpec(reg, {"mapHood", 2, -1, false, true,
                [](std::span<const Value> a, BuiltinCallCtx& ctx) {
                  const FuncValue& f = funcArg("mapHood", a[0]);
                  std::vector<const NbrMap*> maps;
                  for (size_t i = 1; i < a.size(); ++i)
                    if (a[i].isNbrMap()) maps.push_back(&a[i].asNbrMap());
                  if (maps.empty()) fail("mapHood", "needs at least one neighbour map");
                  NbrMap out;
                  for (const auto& [d, v0] : *maps[0]) {
                    bool everywhere = true;
                    for (const NbrMap* m : maps)
                      if (!m->count(d)) { everywhere = false; break; }
                    if (!everywhere) continue;
                    std::vector<Value> args;
                    for (size_t i = 1; i < a.size(); ++i)
                      args.push_back(a[i].isNbrMap() ? a[i].asNbrMap().at(d) : a[i]);
                    out.emplace(d, ctx.applyPointwise(f, args));
                  }
                  return Value::nbrs(std::move(out));
                }});

  // Context sensors.
  addSpec(reg, {"nbrRange", 0, 0, false, false,
                [](std::span<const Value>, BuiltinCallCtx& ctx) {
                  return requireRound(ctx, "nbrRange", [](const RoundContext& rc) {
                    NbrMap m;
                    for (const auto& [d, r] : rc.nbrRanges) m.emplace(d, Value::num(r));
                    return Value::nbrs(std::move(m));
                  });
                }});
  addSpec(reg, {"nbrUid", 0, 0, false, false,
                [](std::span<const Value>, BuiltinCallCtx& ctx) {
                  return requireRound(ctx, "nbrUid", [](const RoundContext& rc) {
                    NbrMap m;
                    for (const auto& [d, r] : rc.nbrRanges)
                      m.emplace(d, Value::num(static_cast<double>(d)));
                    return Value::nbrs(std::move(m));
                  });
                }});
  addSpec(reg, {"uid", 0, 0, false, false,
                [](std::span<const Value>, BuiltinCallCtx& ctx) {
                  return requireRound(ctx, "uid", [](const RoundContext& rc) {
                    return Value::num(static_cast<double>(rc.self));
                  });
                }});
  addSpec(reg, {"sense", 1, 1, false, false,
                [](std::span<const Value> a, BuiltinCallCtx& ctx) {
                  if (!a[0].isStr()) fail("sense", std::string("expected sensor name, got ") + a[0].typeName());
                  const std::string& name = a[0].asStr();
                  return requireRound(ctx, "sense", [&](const RoundContext& rc) {
                    auto it = rc.sensors.find(name);
                    if (it == rc.sensors.end())
                      throw TypeError("sense: unbound sensor '" + name + "'");
                    return it->second;
                  });
                }});

  return reg;
}

}  // namespace

const std::map<std::string, BuiltinSpec>& builtinRegistry() {
  static const std::map<std::string, BuiltinSpec> reg = makeRegistry();
  return reg;
}

const BuiltinSpec* findBuiltin(const std::string& name) {
  const auto& reg = builtinRegistry();
  auto it = reg.find(name);
  return it == reg.end() ? nullptr : &it->second;
}

Value invokeBuiltin(const BuiltinSpec& spec, std::span<const Value> args,
                    BuiltinCallCtx& ctx) {
  bool anyMap = false;
  if (spec.liftable)
    for (const Value& v : args)
      if (v.isNbrMap()) { anyMap = true; break; }

  if (!anyMap) return spec.fn(args, ctx);

  // Pointwise lift: intersect the key sets of all NbrMap arguments and
  // broadcast scalar arguments to every surviving key.
  const NbrMap* first = nullptr;
  for (const Value& v : args)
    if (v.isNbrMap()) { first = &v.asNbrMap(); break; }

  NbrMap out;
  for (const auto& [d, v0] : *first) {
    bool everywhere = true;
    for (const Value& v : args)
      if (v.isNbrMap() && !v.asNbrMap().count(d)) { everywhere = false; break; }
    if (!everywhere) continue;
    std::vector<Value> pointArgs;
    pointArgs.reserve(args.size());
    for (const Value& v : args)
      pointArgs.push_back(v.isNbrMap() ? v.asNbrMap().at(d) : v);
    out.emplace(d, spec.fn(pointArgs, ctx));
  }
  return Value::nbrs(std::move(out));
}

bool isInfixOperator(const std::string& name) {
  static const std::map<std::string, int>& ops = *new std::map<std::string, int>{
      {"||", 1}, {"&&", 2}, {"<", 3},  {"<=", 3}, {">", 3}, {">=", 3},
      {"==", 3}, {"!=", 3}, {"+", 4},  {"-", 4},  {"*", 5}, {"/", 5}};
  return ops.count(name) != 0;
}

}  // namespace fieldc
