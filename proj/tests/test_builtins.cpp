#include <doctest.h>

#include <cmath>
#include <limits>

#include "fieldc/builtins.hpp"
#include "fieldc/rng.hpp"

using namespace fieldc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Value call(const std::string& name, std::vector<Value> args,
           const RoundContext* round = nullptr) {
  const BuiltinSpec* spec = findBuiltin(name);
  REQUIRE(spec != nullptr);
  REQUIRE(spec->acceptsArity(args.size()));
  BuiltinCallCtx ctx;
  ctx.round = round;
  ctx.applyPointwise = [](const FuncValue&, std::span<const Value>) -> Value {
    throw TypeError("no evaluator in this test");
  };
  return invokeBuiltin(*spec, args, ctx);
}

NbrMap mapOf(std::vector<std::pair<DeviceId, double>> entries) {
  NbrMap m;
  for (auto& [d, v] : entries) m.emplace(d, Value::num(v));
  return m;
}

}  // namespace

TEST_CASE("hood fold identities on the empty map") {
  CHECK(call("minHood", {Value::nbrs({})}).asNum() == kInf);
  CHECK(call("maxHood", {Value::nbrs({})}).asNum() == -kInf);
  CHECK(call("sumHood", {Value::nbrs({})}).asNum() == 0.0);
  CHECK(call("anyHood", {Value::nbrs({})}).asBool() == false);
  CHECK(call("allHood", {Value::nbrs({})}).asBool() == true);
}

TEST_CASE("sumHood counts three ones") {
  CHECK(call("sumHood", {Value::nbrs(mapOf({{1, 1}, {2, 1}, {5, 1}}))}).asNum() == 3.0);
}

TEST_CASE("minHood picks the smallest value") {
  CHECK(call("minHood", {Value::nbrs(mapOf({{0, 2.5}, {1, 1.0}}))}).asNum() == 1.0);
}

TEST_CASE("hood folds are insensitive to insertion order") {
  NbrMap a, b;
  Rng rng(7);
  std::vector<std::pair<DeviceId, double>> entries;
  for (int i = 0; i < 20; ++i) entries.push_back({i, rng.nextDouble() * 10 - 5});
  for (const auto& [d, v] : entries) a.emplace(d, Value::num(v));
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    b.emplace(it->first, Value::num(it->second));
  CHECK(call("sumHood", {Value::nbrs(a)}).asNum() ==
        call("sumHood", {Value::nbrs(b)}).asNum());
  CHECK(call("minHood", {Value::nbrs(a)}).asNum() ==
        call("minHood", {Value::nbrs(b)}).asNum());
}

TEST_CASE("minHood over tuples is lexicographic with short-circuit") {
  NbrMap m;
  m.emplace(7, Value::tuple({Value::num(1.0), Value::num(70.0)}));
  m.emplace(3, Value::tuple({Value::num(1.0), Value::num(30.0)}));
  m.emplace(5, Value::tuple({Value::num(2.0), Value::num(50.0)}));
  Value got = call("minHood", {Value::nbrs(m)});
  CHECK(valueEquals(got, Value::tuple({Value::num(1.0), Value::num(30.0)})));

  // Differing heads never compare the tails, so incomparable tails are fine.
  NbrMap funcs;
  FuncValue fa;
  fa.tag = "a";
  FuncValue fb;
  fb.tag = "b";
  funcs.emplace(1, Value::tuple({Value::num(1.0), Value::func(fa)}));
  funcs.emplace(2, Value::tuple({Value::num(2.0), Value::func(fb)}));
  Value winner = call("minHood", {Value::nbrs(funcs)});
  CHECK(winner.asTuple()[1].asFunc().tag == "a");
}

TEST_CASE("minHood tuple ties break toward the smallest device id") {
  // Tuples (dist, id, val): equal dist, ids force the order, vals never
  // compared. This is the parent selection rule the G block relies on.
  NbrMap m;
  m.emplace(4, Value::tuple({Value::num(1.0), Value::num(4), Value::num(40)}));
  m.emplace(2, Value::tuple({Value::num(1.0), Value::num(2), Value::num(20)}));
  Value got = call("minHood", {Value::nbrs(m)});
  CHECK(got.asTuple()[2].asNum() == 20.0);
}

TEST_CASE("mux selects between already-evaluated values") {
  CHECK(call("mux", {Value::boolean(true), Value::num(0), Value::num(7)}).asNum() == 0.0);
  CHECK(call("mux", {Value::boolean(false), Value::num(0), Value::num(7)}).asNum() == 7.0);
  CHECK_THROWS_AS(call("mux", {Value::num(1), Value::num(0), Value::num(7)}), TypeError);
}

TEST_CASE("mux(b, x, x) equals x for both selectors") {
  for (bool b : {true, false}) {
    Value x = Value::tuple({Value::num(3), Value::boolean(true)});
    CHECK(valueEquals(call("mux", {Value::boolean(b), x, x}), x));
  }
}

TEST_CASE("nbrRange reads the round context") {
  RoundContext rc;
  rc.self = 0;
  rc.nbrRanges = {{1, 1.0}, {2, 2.0}};
  Value v = call("nbrRange", {}, &rc);
  const NbrMap& m = v.asNbrMap();
  CHECK(m.size() == 2);
  CHECK(m.at(1).asNum() == 1.0);
  CHECK(m.at(2).asNum() == 2.0);

  RoundContext empty;
  CHECK(call("nbrRange", {}, &empty).asNbrMap().empty());
}

TEST_CASE("sense returns sensor values and reports unbound names") {
  RoundContext rc;
  rc.sensors.emplace("source", Value::boolean(true));
  rc.sensors.emplace("temp", Value::num(21.5));
  CHECK(call("sense", {Value::str("source")}, &rc).asBool());
  CHECK(call("sense", {Value::str("temp")}, &rc).asNum() == 21.5);
  CHECK_THROWS_WITH_AS(call("sense", {Value::str("missing")}, &rc),
                       "sense: unbound sensor 'missing'", TypeError);
}

TEST_CASE("pointwise lifting intersects key sets and broadcasts scalars") {
  Value m1 = Value::nbrs(mapOf({{1, 1.0}, {2, 2.0}, {3, 3.0}}));
  Value m2 = Value::nbrs(mapOf({{2, 10.0}, {3, 20.0}, {4, 30.0}}));
  Value sum = call("+", {m1, m2});
  const NbrMap& m = sum.asNbrMap();
  REQUIRE(m.size() == 2);
  CHECK(m.at(2).asNum() == 12.0);
  CHECK(m.at(3).asNum() == 23.0);

  Value plusOne = call("+", {m1, Value::num(1)});
  CHECK(plusOne.asNbrMap().at(1).asNum() == 2.0);
  CHECK(plusOne.asNbrMap().size() == 3);
}

TEST_CASE("property: lifted arithmetic agrees pointwise on equal key sets") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    NbrMap a, b;
    for (int d = 0; d < 8; ++d) {
      a.emplace(d, Value::num(rng.nextDouble() * 100 - 50));
      b.emplace(d, Value::num(rng.nextDouble() * 100 - 50));
    }
    Value sum = call("+", {Value::nbrs(a), Value::nbrs(b)});
    for (int d = 0; d < 8; ++d)
      CHECK(sum.asNbrMap().at(d).asNum() == a.at(d).asNum() + b.at(d).asNum());
  }
}

TEST_CASE("division by zero follows IEEE semantics") {
  CHECK(call("/", {Value::num(1), Value::num(0)}).asNum() == kInf);
  CHECK(call("/", {Value::num(-1), Value::num(0)}).asNum() == -kInf);
  CHECK(std::isnan(call("/", {Value::num(0), Value::num(0)}).asNum()));
}

TEST_CASE("NaN propagates through arithmetic and loses comparisons and min") {
  double nan = std::nan("");
  CHECK(std::isnan(call("+", {Value::num(nan), Value::num(1)}).asNum()));
  CHECK(call("<", {Value::num(nan), Value::num(1)}).asBool() == false);
  CHECK(call("<", {Value::num(1), Value::num(nan)}).asBool() == false);
  CHECK(call("min", {Value::num(nan), Value::num(3)}).asNum() == 3.0);
  CHECK(call("min", {Value::num(3), Value::num(nan)}).asNum() == 3.0);
  // a NaN element inside a fold loses as well
  CHECK(call("minHood", {Value::nbrs(mapOf({{0, nan}, {1, 5.0}}))}).asNum() == 5.0);
}

TEST_CASE("equality is exact; approxEq takes a tolerance") {
  CHECK(call("==", {Value::num(0.1 + 0.2), Value::num(0.3)}).asBool() == false);
  CHECK(call("approxEq", {Value::num(0.1 + 0.2), Value::num(0.3), Value::num(1e-12)})
            .asBool());
  CHECK(call("==", {Value::num(2), Value::num(2)}).asBool());
}

TEST_CASE("tuple and get") {
  Value t = call("tuple", {Value::num(1), Value::boolean(true), Value::num(3)});
  CHECK(t.asTuple().size() == 3);
  CHECK(call("get", {t, Value::num(2)}).asNum() == 3.0);
  CHECK_THROWS_AS(call("get", {t, Value::num(3)}), TypeError);
  CHECK_THROWS_AS(call("get", {t, Value::num(0.5)}), TypeError);
  CHECK_THROWS_AS(call("get", {Value::num(1), Value::num(0)}), TypeError);
}

TEST_CASE("mod is a floored modulus") {
  CHECK(call("mod", {Value::num(7), Value::num(3)}).asNum() == 1.0);
  CHECK(call("mod", {Value::num(-1), Value::num(30)}).asNum() == 29.0);
  CHECK(call("mod", {Value::num(-20), Value::num(30)}).asNum() == 10.0);
}

TEST_CASE("type errors inside maps surface from folds") {
  NbrMap m;
  m.emplace(0, Value::num(1));
  m.emplace(1, Value::boolean(true));
  CHECK_THROWS_AS(call("sumHood", {Value::nbrs(m)}), TypeError);
}

TEST_CASE("the registry is enumerable and stable") {
  const auto& reg = builtinRegistry();
  CHECK(reg.size() > 20);
  CHECK(reg.count("minHood") == 1);
  CHECK(reg.count("nbrRange") == 1);
  CHECK(reg.at("nbrRange").pure == false);
  CHECK(reg.at("+").pure == true);
}
