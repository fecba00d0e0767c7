#include <doctest.h>

#include <limits>

#include "helpers.hpp"

using namespace fieldc;
using namespace fieldc::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Environment sourcedRandomEnv(int n, double side, double radius, uint64_t seed,
                             DeviceId source) {
  Environment env = randomEnv(n, side, side, radius, seed);
  setAll(env, "source", Value::boolean(false));
  env.setSensor(source, "source", Value::boolean(true));
  return env;
}

RunOptions stabilizeOpts(int quietRounds, double eps = 0.0) {
  RunOptions o;
  o.stopOnStabilization = StabilizationStop{quietRounds, eps};
  return o;
}

Perturbation sensorFlip(double at, DeviceId d, const std::string& name, Value v) {
  Perturbation p;
  p.at = at;
  p.kind = Perturbation::Kind::SetSensor;
  p.device = d;
  p.sensorName = name;
  p.sensorValue = std::move(v);
  return p;
}

}  // namespace

TEST_CASE("G(source, 0, nbrRange, +) equals the distance program on every device") {
  Environment env = sourcedRandomEnv(25, 6, 2.2, 11, 4);
  REQUIRE(isConnected(env));
  World viaG = runWorld("G(sense(\"source\"), 0, nbrRange, +)", env, 80, {}, 1, {},
                        stabilizeOpts(12));
  World viaListing = runWorld("distance(sense(\"source\"))", env, 80, {}, 1, {},
                              stabilizeOpts(12));
  auto a = numericSnapshot(viaG.trace());
  auto b = numericSnapshot(viaListing.trace());
  REQUIRE(a.size() == b.size());
  for (const auto& [d, v] : a) CHECK(v == b.at(d));
}

TEST_CASE("G distance on a line of 5 with unit spacing matches Dijkstra exactly") {
  Environment env = lineEnv(5);
  setAll(env, "source", Value::boolean(false));
  env.setSensor(4, "source", Value::boolean(true));  // source at one end
  World w = runWorld("G(sense(\"source\"), 0, nbrRange, +)", env, 30, {}, 1, {},
                     stabilizeOpts(8));
  auto got = numericSnapshot(w.trace());
  auto want = dijkstra(w.env(), {4});
  for (const auto& [d, v] : got) CHECK(v == want.at(d));
  CHECK(got.at(0) == 4.0);
  CHECK(got.at(4) == 0.0);
}

TEST_CASE("G with a constant accumulator broadcasts the source value") {
  Environment env = sourcedRandomEnv(20, 6, 2.4, 12, 7);
  REQUIRE(isConnected(env));
  setAll(env, "payload", Value::num(0));
  env.setSensor(7, "payload", Value::num(42.5));
  World w = runWorld("broadcast(sense(\"source\"), sense(\"payload\"))", env, 60, {}, 1,
                     {}, stabilizeOpts(10));
  for (const auto& [d, v] : numericSnapshot(w.trace())) CHECK(v == 42.5);
}

TEST_CASE("C on two devices sums the pair at the lower-potential device") {
  // Hand evaluation: potentials (0, 1), locals (a, b) = (2.5, 4). Device 1
  // contributes to device 0; device 0 holds a + b.
  Environment env = lineEnv(2);
  env.setSensor(0, "potential", Value::num(0));
  env.setSensor(1, "potential", Value::num(1));
  env.setSensor(0, "local", Value::num(2.5));
  env.setSensor(1, "local", Value::num(4));
  World w = runWorld("C(sense(\"potential\"), +, sense(\"local\"), 0)", env, 20, {}, 1,
                     {}, stabilizeOpts(6));
  auto got = numericSnapshot(w.trace());
  CHECK(got.at(0) == 6.5);
  CHECK(got.at(1) == 4.0);
}

TEST_CASE("C on a single device keeps its local value") {
  Environment env = lineEnv(1);
  env.setSensor(0, "potential", Value::num(0));
  World w = runWorld("C(sense(\"potential\"), +, 7, 0)", env, 6);
  CHECK(numericSnapshot(w.trace()).at(0) == 7.0);
}

TEST_CASE("C over a distance potential counts the devices of the component") {
  Environment env = sourcedRandomEnv(24, 6, 2.3, 13, 2);
  REQUIRE(isConnected(env));
  World w = runWorld("C(distance(sense(\"source\")), +, 1, 0)", env, 120, {}, 1, {},
                     stabilizeOpts(16));
  auto got = numericSnapshot(w.trace());
  CHECK(got.at(2) == 24.0);  // the source collects everyone
}

TEST_CASE("C conservation: collected totals at minima equal the sum of locals") {
  // Integer locals, + accumulator: exact equality is required.
  Environment env = sourcedRandomEnv(18, 5, 2.2, 14, 0);
  REQUIRE(isConnected(env));
  Rng rng(5);
  double total = 0;
  for (DeviceId d : env.deviceIds()) {
    double local = static_cast<double>(1 + rng.nextIndex(9));
    env.setSensor(d, "local", Value::num(local));
    total += local;
  }
  World w = runWorld("C(distance(sense(\"source\")), +, sense(\"local\"), 0)", env, 120,
                     {}, 1, {}, stabilizeOpts(16));
  auto values = numericSnapshot(w.trace());

  // Potential minima: devices with no strictly-lower-potential neighbour.
  World pw = runWorld("distance(sense(\"source\"))", env, 120, {}, 1, {},
                      stabilizeOpts(16));
  auto potential = numericSnapshot(pw.trace());
  double collected = 0;
  for (const auto& [d, pot] : potential) {
    bool isMinimum = true;
    for (DeviceId n : w.env().neighbours(d))
      if (potential.at(n) < pot) isMinimum = false;
    if (isMinimum) collected += values.at(d);
  }
  CHECK(collected == total);
}

TEST_CASE("T decays by one per round until the floor") {
  // After k applications of the update the value is max(0, 10 - k); the
  // first round still holds the initial value.
  Environment env = lineEnv(1);
  for (int rounds : {1, 4, 11, 15}) {
    World w = runWorld("T(10, 0, (x) => x - 1)", env, rounds);
    CHECK(numericSnapshot(w.trace()).at(0) == std::max(0.0, 10.0 - (rounds - 1)));
  }
}

TEST_CASE("T stays at the floor no matter the decay function") {
  Environment env = lineEnv(1);
  World w = runWorld("T(5, 5, (x) => x * 3)", env, 8);
  CHECK(numericSnapshot(w.trace()).at(0) == 5.0);
}

TEST_CASE("T with exact halving never reaches 0; the epsilon detector handles it") {
  Environment env = lineEnv(1);
  World w = runWorld("T(8, 0, (x) => x / 2)", env, 80);
  double v = numericSnapshot(w.trace()).at(0);
  CHECK(v > 0.0);
  CHECK(v < 1e-9);
  StabilizationReport exact = detectStabilization(w.trace(), -1.0, 8, 0.0);
  CHECK(exact.stabilized == false);  // keeps halving forever
  StabilizationReport tolerant = detectStabilization(w.trace(), -1.0, 8, 1e-9);
  CHECK(tolerant.stabilized == true);
}

TEST_CASE("T is pointwise monotone toward the floor across rounds") {
  Environment env = lineEnv(3);
  World w = runWorld("T(9, 1, (x) => x * 0.7)", env, 25);
  std::map<DeviceId, double> last;
  for (const TraceEvent& e : w.trace().events) {
    double v = e.result.asNum();
    auto it = last.find(e.device);
    if (it != last.end()) {
      CHECK(v <= it->second);
      CHECK(v >= 1.0);
    }
    last[e.device] = v;
  }
}

TEST_CASE("gossipMin of a constant field stabilizes to that constant") {
  Environment env = randomEnv(16, 5, 5, 2.2, 15);
  setAll(env, "value", Value::num(5));
  World w = runWorld("gossipMin(sense(\"value\"))", env, 40, {}, 1, {},
                     stabilizeOpts(10));
  for (const auto& [d, v] : numericSnapshot(w.trace())) CHECK(v == 5.0);
}

TEST_CASE("gossipMin spreads the global minimum across connected regions") {
  Environment env = randomEnv(22, 6, 6, 2.4, 16);
  REQUIRE(isConnected(env));
  // two value regions: 3 on the left half, 4 on the right half
  for (DeviceId d : env.deviceIds())
    env.setSensor(d, "value", Value::num(env.position(d).x < 3.0 ? 3.0 : 4.0));
  World w = runWorld("gossipMin(sense(\"value\"))", env, 60, {}, 1, {}, stabilizeOpts(10));
  auto oracle = minSensorOverComponent(w.env(), "value");
  for (const auto& [d, v] : numericSnapshot(w.trace())) {
    CHECK(v == 3.0);
    CHECK(v == oracle.at(d));
  }
}

TEST_CASE("gossipMin is monotone non-increasing per device, which is why it cannot heal") {
  Environment env = randomEnv(18, 5, 5, 2.3, 17);
  setAll(env, "value", Value::num(5));
  std::vector<Perturbation> dip = {sensorFlip(8, 3, "value", Value::num(1)),
                                   sensorFlip(11, 3, "value", Value::num(5))};
  World w = runWorld("gossipMin(sense(\"value\"))", env, 50, {}, 1, dip);
  std::map<DeviceId, double> last;
  for (const TraceEvent& e : w.trace().events) {
    double v = e.result.asNum();
    auto it = last.find(e.device);
    if (it != last.end()) CHECK(v <= it->second);
    last[e.device] = v;
  }
}

TEST_CASE("hopCountDistance equals BFS depth on a line") {
  Environment env = lineEnv(5);
  setAll(env, "source", Value::boolean(false));
  env.setSensor(4, "source", Value::boolean(true));
  World w = runWorld("hopCountDistance(sense(\"source\"))", env, 20, {}, 1, {},
                     stabilizeOpts(8));
  auto got = numericSnapshot(w.trace());
  auto want = bfsHops(w.env(), {4});
  for (const auto& [d, v] : got) CHECK(v == want.at(d));
}

TEST_CASE("hopCountDistance is 0 where the source is everywhere") {
  Environment env = gridEnv(3, 3);
  setAll(env, "source", Value::boolean(true));
  World w = runWorld("hopCountDistance(sense(\"source\"))", env, 8);
  for (const auto& [d, v] : numericSnapshot(w.trace())) CHECK(v == 0.0);
}

TEST_CASE("doubling density at constant degree doubles hop-count distances") {
  // Same physical segment (0m..4m), twice the devices, half the radius: the
  // hop estimate between the fixed endpoints doubles while the metric
  // distance stays put.
  auto hopsAtEnd = [](int n, double spacing, double radius) {
    TopologySpec spec;
    spec.kind = TopologySpec::Kind::Line;
    spec.n = n;
    spec.spacing = spacing;
    spec.radius = radius;
    Environment env = buildTopology(spec, 0);
    setAll(env, "source", Value::boolean(false));
    env.setSensor(0, "source", Value::boolean(true));
    World w = runWorld("hopCountDistance(sense(\"source\"))", env, 40, {}, 1, {},
                       stabilizeOpts(10));
    return numericSnapshot(w.trace()).at(n - 1);  // device at 4m
  };
  double sparse = hopsAtEnd(5, 1.0, 1.2);
  double dense = hopsAtEnd(9, 0.5, 0.6);
  CHECK(sparse == 4.0);
  CHECK(dense == 8.0);
}

TEST_CASE("replicatedGossip matches gossipMin on a static input") {
  Environment env = randomEnv(15, 5, 5, 2.3, 18);
  REQUIRE(isConnected(env));
  Rng rng(9);
  for (DeviceId d : env.deviceIds())
    env.setSensor(d, "value", Value::num(2.0 + static_cast<double>(rng.nextIndex(8))));
  int p = 2 * hopDiameter(env);
  World plain = runWorld("gossipMin(sense(\"value\"))", env, 6 * p);
  World replicated = runWorld("replicatedGossip(sense(\"value\"))", env, 6 * p, {}, 1,
                              {}, {}, replicatedGossipDef(3, p));
  auto a = numericSnapshot(plain.trace());
  auto b = numericSnapshot(replicated.trace());
  for (const auto& [d, v] : a) CHECK(v == b.at(d));
}

TEST_CASE("replicatedGossip forgets a stale minimum within p rounds; k=1 never does") {
  Environment env = randomEnv(20, 6, 6, 2.4, 19);
  REQUIRE(isConnected(env));
  setAll(env, "value", Value::num(5));
  env.setSensor(4, "value", Value::num(1));  // initial minimum

  int diameter = hopDiameter(env);
  REQUIRE(diameter >= 2);
  int p = 2 * diameter;
  int warmup = 2 * p + diameter;
  int budget = warmup + 10 * p;
  std::vector<Perturbation> lift = {
      sensorFlip(static_cast<double>(warmup), 4, "value", Value::num(5))};

  World replicated = runWorld("replicatedGossip(sense(\"value\"))", env, budget, {}, 1,
                              lift, {}, replicatedGossipDef(3, p));
  // after warmup + p rounds every device must be back at the true minimum 5
  for (const TraceEvent& e : replicated.trace().events) {
    if (e.seq > warmup + p) CHECK(e.result.asNum() == 5.0);
    if (e.seq == warmup) CHECK(e.result.asNum() == 1.0);  // converged before the lift
  }

  World degenerate = runWorld("replicatedGossip(sense(\"value\"))", env, budget, {}, 1,
                              lift, {}, replicatedGossipDef(1, p));
  for (const auto& [d, v] : numericSnapshot(degenerate.trace())) CHECK(v == 1.0);
}
