#include "fieldc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fieldc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::set<DeviceId> liveDevicesAt(const Trace& trace, double time) {
  std::set<DeviceId> live(trace.initialDevices.begin(), trace.initialDevices.end());
  for (const EnvChange& c : trace.changes) {
    if (c.time > time) break;
    if (c.kind == Perturbation::Kind::AddDevice) live.insert(c.device);
    if (c.kind == Perturbation::Kind::RemoveDevice) live.erase(c.device);
  }
  return live;
}

Snapshot snapshotAt(const Trace& trace, double time) {
  std::set<DeviceId> live = liveDevicesAt(trace, time);
  Snapshot snap;
  for (const TraceEvent& e : trace.events) {
    if (e.time > time) break;
    if (live.count(e.device)) snap.insert_or_assign(e.device, e.result);
  }
  return snap;
}

Snapshot finalSnapshot(const Trace& trace) { return snapshotAt(trace, trace.horizon); }

bool fairnessSatisfied(const Trace& trace, double basePeriod) {
  const double window = 2.0 * basePeriod;

  std::map<DeviceId, std::pair<double, double>> liveSpan;  // birth, death
  for (DeviceId d : trace.initialDevices) liveSpan[d] = {0.0, trace.horizon};
  for (const EnvChange& c : trace.changes) {
    if (c.kind == Perturbation::Kind::AddDevice) liveSpan[c.device] = {c.time, trace.horizon};
    if (c.kind == Perturbation::Kind::RemoveDevice) {
      auto it = liveSpan.find(c.device);
      if (it != liveSpan.end()) it->second.second = c.time;
    }
  }

  std::map<DeviceId, double> lastFire;
  for (const auto& [d, span] : liveSpan) lastFire[d] = span.first;
  for (const TraceEvent& e : trace.events) {
    auto it = lastFire.find(e.device);
    if (it == lastFire.end()) return false;  // event from an unknown device
    if (e.time - it->second > window) return false;
    it->second = e.time;
  }
  for (const auto& [d, span] : liveSpan) {
    if (span.second - span.first < window) continue;  // too short to contain a window
    if (span.second - lastFire[d] > window) return false;
  }
  return true;
}

StabilizationReport detectStabilization(const Trace& trace, double freezeTime,
                                        int quietRounds, double epsilon) {
  StabilizationReport report;
  report.epsilon = epsilon;
  report.quietRounds = quietRounds;

  if (trace.lastChangeTime() > freezeTime) {
    report.diagnostics = "environment changes after the freeze time";
    return report;
  }

  std::set<DeviceId> live = liveDevicesAt(trace, trace.horizon);
  if (live.empty()) {
    report.diagnostics = "no live devices";
    return report;
  }

  std::map<DeviceId, Value> lastValue;
  std::map<DeviceId, int> streak;
  size_t quietDevices = 0;

  for (const TraceEvent& e : trace.events) {
    if (e.time <= freezeTime || !live.count(e.device)) continue;
    auto prev = lastValue.find(e.device);
    if (prev != lastValue.end()) {
      int& s = streak[e.device];
      int before = s;
      if (valueApproxEquals(prev->second, e.result, epsilon))
        ++s;
      else
        s = 0;
      if (before < quietRounds && s >= quietRounds) ++quietDevices;
      if (before >= quietRounds && s < quietRounds) --quietDevices;
      prev->second = e.result;
    } else {
      lastValue.emplace(e.device, e.result);
      streak[e.device] = 0;
    }
    if (quietDevices == live.size() && lastValue.size() == live.size()) {
      report.stabilized = true;
      report.stabilizationTime = e.time;
      Snapshot snap;
      for (const auto& [d, v] : lastValue) snap.emplace(d, v);
      report.snapshot = std::move(snap);
      return report;
    }
  }

  std::ostringstream os;
  os << "trace ended with " << quietDevices << "/" << live.size()
     << " devices quiet for " << quietRounds << " rounds";
  report.diagnostics = os.str();
  return report;
}

UniquenessReport checkUniqueness(const Scenario& scenario, int warmStarts,
                                 uint64_t seed, int quietRounds, double epsilon) {
  UniquenessReport report;
  if (warmStarts < 2) throw std::invalid_argument("checkUniqueness needs >= 2 warm starts");

  auto program = buildScenarioProgram(scenario);
  Environment env = buildScenarioEnvironment(scenario, scenario.seed);

  report.allStabilized = true;
  for (int i = 0; i < warmStarts; ++i) {
    RunOptions options;
    options.stopOnStabilization = StabilizationStop{quietRounds, epsilon};
    options.warmStartSeed = deriveSeed(seed, 200 + static_cast<uint64_t>(i));

    World world(program, env, scenario.schedule, deriveSeed(seed, 100 + static_cast<uint64_t>(i)),
                scenario.rounds, scenarioPerturbations(scenario), options);
    world.run();

    StabilizationReport st = detectStabilization(
        world.trace(), world.trace().lastChangeTime(), quietRounds, epsilon);
    if (!st.stabilized) {
      report.allStabilized = false;
      report.unique = false;
      std::ostringstream os;
      os << "warm start " << i << " did not stabilize: " << st.diagnostics;
      report.divergence = os.str();
      return report;
    }
    report.snapshots.push_back(finalSnapshot(world.trace()));
  }

  for (size_t i = 1; i < report.snapshots.size(); ++i) {
    const Snapshot& a = report.snapshots[0];
    const Snapshot& b = report.snapshots[i];
    if (a.size() != b.size()) {
      report.divergence = "snapshot device sets differ";
      return report;
    }
    for (const auto& [d, va] : a) {
      auto it = b.find(d);
      if (it == b.end() || !valueApproxEquals(va, it->second, epsilon)) {
        std::ostringstream os;
        os << "device " << d << ": run 0 -> " << va.toString() << ", run " << i << " -> "
           << (it == b.end() ? std::string("<missing>") : it->second.toString());
        report.divergence = os.str();
        return report;
      }
    }
  }
  report.unique = true;
  return report;
}

namespace {

struct SweepRun {
  std::vector<double> probes;
  double meanValue = 0;
  bool connected = false;
};

SweepRun runDensity(const DensitySweepSpec& spec, int density, double radius,
                    uint64_t seed, double probePitch) {
  TopologySpec topo;
  topo.kind = TopologySpec::Kind::UniformRandom;
  topo.n = density;
  topo.width = spec.width;
  topo.height = spec.height;
  topo.radius = radius;
  Environment env = buildTopology(topo, seed);

  // The device nearest the anchor is the source, so every density computes
  // "the same" field.
  DeviceId source = 0;
  double best = kInf;
  for (DeviceId d : env.deviceIds()) {
    double dd = dist(env.position(d), spec.sourceAnchor);
    if (dd < best) { best = dd; source = d; }
  }
  for (DeviceId d : env.deviceIds())
    env.setSensor(d, spec.sourceSensor, Value::boolean(d == source));

  SweepRun run;
  run.connected = isConnected(env);

  int diameter = std::max(1, hopDiameter(env));
  int budget = spec.maxRounds > 0 ? spec.maxRounds : 4 * diameter + 40;

  auto program = std::make_shared<const Program>(loadProgram(spec.mainExpr, "<sweep>"));
  RunOptions options;
  options.stopOnStabilization = StabilizationStop{2 * diameter, 0.0};
  Schedule sched;  // synchronous
  World world(program, std::move(env), sched, deriveSeed(seed, 7), budget, {}, options);
  world.run();

  Snapshot snap = finalSnapshot(world.trace());
  double sum = 0;
  size_t finite = 0;
  for (const auto& [d, v] : snap) {
    double x = v.asNum();
    if (std::isfinite(x)) { sum += x; ++finite; }
  }
  run.meanValue = finite ? sum / static_cast<double>(finite) : kInf;

  // Nearest-device sampling over a regular grid (ties toward the smaller id,
  // which std::map iteration order provides).
  const Environment& fenv = world.env();
  for (double y = probePitch / 2; y < spec.height; y += probePitch) {
    for (double x = probePitch / 2; x < spec.width; x += probePitch) {
      DeviceId nearest = -1;
      double bestD = kInf;
      for (DeviceId d : fenv.deviceIds()) {
        double dd = dist(fenv.position(d), {x, y});
        if (dd < bestD) { bestD = dd; nearest = d; }
      }
      run.probes.push_back(snap.at(nearest).asNum());
    }
  }
  return run;
}

double meanAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0;
  size_t n = std::min(a.size(), b.size());
  size_t counted = 0;
  for (size_t i = 0; i < n; ++i) {
    double d = std::fabs(a[i] - b[i]);
    if (std::isnan(d)) continue;
    if (std::isinf(a[i]) && std::isinf(b[i])) d = 0;  // both unreachable
    sum += d;
    ++counted;
  }
  return counted ? sum / static_cast<double>(counted) : 0;
}

}  // namespace

ConsistencyReport densitySweep(const DensitySweepSpec& spec) {
  if (spec.densities.size() < 2)
    throw std::invalid_argument("densitySweep needs at least two densities");
  for (size_t i = 1; i < spec.densities.size(); ++i)
    if (spec.densities[i] <= spec.densities[i - 1])
      throw std::invalid_argument("densities must increase");

  ConsistencyReport report;
  const size_t nd = spec.densities.size();
  const int n0 = spec.densities.front();

  auto radiusAt = [&](int n) {
    if (spec.policy == DensitySweepSpec::RadiusPolicy::Fixed) return spec.radius0;
    return spec.radius0 * std::sqrt(static_cast<double>(n0) / static_cast<double>(n));
  };
  double refRadius = radiusAt(spec.densities.back());
  double pitch = spec.probePitch > 0 ? spec.probePitch : refRadius / 4.0;

  // probes[rep][densityIndex]
  std::vector<std::vector<SweepRun>> runs(spec.replications,
                                          std::vector<SweepRun>(nd));
  for (int rep = 0; rep < spec.replications; ++rep) {
    for (size_t i = 0; i < nd; ++i) {
      uint64_t seed = deriveSeed(spec.seed, 1000 * (rep + 1) + i);
      runs[rep][i] = runDensity(spec, spec.densities[i], radiusAt(spec.densities[i]),
                                seed, pitch);
    }
  }

  for (size_t i = 0; i < nd; ++i) {
    DensityResult r;
    r.density = spec.densities[i];
    r.radius = radiusAt(spec.densities[i]);
    r.connected = true;
    double vsRef = 0, meanValue = 0;
    for (int rep = 0; rep < spec.replications; ++rep) {
      r.connected = r.connected && runs[rep][i].connected;
      vsRef += meanAbsDiff(runs[rep][i].probes, runs[rep][nd - 1].probes);
      meanValue += runs[rep][i].meanValue;
    }
    r.vsReference = vsRef / spec.replications;
    r.meanValue = meanValue / spec.replications;
    report.perDensity.push_back(r);
  }

  for (size_t i = 0; i + 1 < nd; ++i) {
    double acc = 0;
    for (int rep = 0; rep < spec.replications; ++rep)
      acc += meanAbsDiff(runs[rep][i].probes, runs[rep][i + 1].probes);
    report.successive.push_back(acc / spec.replications);
  }

  report.vsReferenceDecreasing = true;
  for (size_t i = 0; i + 2 < nd; ++i)  // reference compares to itself as 0
    if (!(report.perDensity[i].vsReference > report.perDensity[i + 1].vsReference))
      report.vsReferenceDecreasing = false;

  report.successiveDecreasing = true;
  for (size_t i = 0; i + 1 < report.successive.size(); ++i)
    if (!(report.successive[i] > report.successive[i + 1]))
      report.successiveDecreasing = false;

  report.meanValueIncreasing = true;
  for (size_t i = 0; i + 1 < nd; ++i)
    if (!(report.perDensity[i].meanValue < report.perDensity[i + 1].meanValue))
      report.meanValueIncreasing = false;

  report.verdict = report.successiveDecreasing
                       ? "consistent-with eventual consistency"
                       : "not consistent-with eventual consistency";
  return report;
}

DynamicsReport dynamicsMetrics(const Trace& trace, const OracleField& oracle,
                               double epsilon, double fromTime) {
  DynamicsReport report;

  std::map<DeviceId, double> current;  // device -> |error|
  std::map<DeviceId, double> value;
  double lastTime = fromTime;
  std::optional<double> candidate;  // start of the current within-epsilon run
  bool allWithin = false;

  auto meanError = [&]() {
    if (current.empty()) return 0.0;
    double s = 0;
    for (const auto& [d, e] : current) s += e;
    return s / static_cast<double>(current.size());
  };
  auto maxError = [&]() {
    double m = 0;
    for (const auto& [d, e] : current) m = std::max(m, e);
    return m;
  };

  for (const TraceEvent& e : trace.events) {
    if (e.time < fromTime) continue;
    if (e.time > lastTime) {
      report.errorIntegral += meanError() * (e.time - lastTime);
      lastTime = e.time;
    }
    std::set<DeviceId> live = liveDevicesAt(trace, e.time);
    for (auto it = current.begin(); it != current.end();) {
      if (!live.count(it->first)) {
        value.erase(it->first);
        it = current.erase(it);
      } else {
        ++it;
      }
    }
    value[e.device] = e.result.isNum() ? e.result.asNum() : std::nan("");
    auto errorOf = [&](DeviceId d) {
      auto expect = oracle(e.time, d);
      if (!expect) return 0.0;
      double v = value[d];
      if (v == *expect) return 0.0;  // covers matching infinities
      double err = std::fabs(v - *expect);
      return std::isnan(err) ? kInf : err;
    };
    // Re-evaluate all errors at this instant: the oracle may have shifted
    // with an environment change.
    for (auto& [d, err] : current) err = errorOf(d);
    current[e.device] = errorOf(e.device);
    report.peakError = std::max(report.peakError, maxError());

    bool within = maxError() <= epsilon && !current.empty();
    if (within && !allWithin) candidate = e.time;
    if (!within) candidate.reset();
    allWithin = within;
  }
  if (trace.horizon > lastTime) report.errorIntegral += meanError() * (trace.horizon - lastTime);
  if (allWithin) report.convergenceTime = candidate;
  return report;
}

}  // namespace fieldc
