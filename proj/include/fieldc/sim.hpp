#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fieldc/ast.hpp"
#include "fieldc/engine.hpp"
#include "fieldc/export.hpp"
#include "fieldc/rng.hpp"
#include "fieldc/topology.hpp"

namespace fieldc {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Schedule {
  enum class Mode { Synchronous, FairAsync };
  Mode mode = Mode::Synchronous;
  double basePeriod = 1.0;
  // Fraction of basePeriod each round period may deviate by; must stay below
  // 1 so every device fires within any 2*basePeriod window.
  double jitter = 0.1;
};

struct Perturbation {
  enum class Kind { AddDevice, RemoveDevice, MoveDevice, SetSensor };
  double at = 0;
  Kind kind = Kind::SetSensor;
  DeviceId device = -1;                  // remove / move / setSensor
  Vec2 pos;                              // add / move
  std::map<std::string, Value> sensors;  // add
  std::string sensorName;                // setSensor
  Value sensorValue;                     // setSensor
};

struct TraceEvent {
  double time = 0;
  DeviceId device = 0;
  int seq = 0;  // per-device round counter, starting at 1
  Value result;
  uint64_t exportDigest = 0;
  std::shared_ptr<const ExportTree> exports;  // populated when keepExports
};

struct EnvChange {
  double time = 0;
  Perturbation::Kind kind = Perturbation::Kind::SetSensor;
  DeviceId device = -1;
  std::string description;
};

// Space-time record of a run. Re-running the same scenario with the same
// seed reproduces it bit-exactly.
struct Trace {
  std::vector<TraceEvent> events;
  std::vector<EnvChange> changes;
  std::vector<DeviceId> initialDevices;
  double horizon = 0;

  // Time of the last environment change, or -infinity if none.
  double lastChangeTime() const;
};

struct StabilizationStop {
  int quietRounds = 8;     // change-free transitions required per device
  double epsilon = 0.0;
};

struct RunOptions {
  bool keepExports = false;
  std::optional<StabilizationStop> stopOnStabilization;
  bool requireStabilization = false;
  // Warm start: randomize rep initial values (shape-preserving draws).
  std::optional<uint64_t> warmStartSeed;
  double warmStartRange = 4.0;
};

// Drives device rounds over an Environment according to a Schedule,
// delivering exports with zero latency and applying perturbations between
// rounds. Logically single-threaded: one authoritative event order.
class World {
 public:
  World(std::shared_ptr<const Program> program, Environment env, Schedule sched,
        uint64_t seed, int roundBudget, std::vector<Perturbation> perturbations = {},
        RunOptions options = {});

  // Fires the next scheduled device round; false once the horizon is reached
  // or stabilization stopped the run early.
  bool step();

  // Steps to completion. Throws SimError if requireStabilization is set and
  // the budget ran out first.
  void run();

  const Trace& trace() const { return trace_; }
  Trace takeTrace() { return std::move(trace_); }
  const Environment& env() const { return env_; }
  bool stabilizedEarly() const { return stabilizedEarly_; }
  double now() const { return now_; }

  // Latest export of a device, if it has computed at least one round.
  const ExportTree* latestExport(DeviceId d) const;

 private:
  struct DeviceSim {
    std::shared_ptr<const ExportTree> lastExport;
    int seq = 0;
    double nextFire = 0;
    std::optional<Value> lastResult;
    int quietStreak = 0;
  };

  void scheduleNewDevice(DeviceId d, double notBefore);
  void applyDuePerturbations(double upTo);
  void applyPerturbation(const Perturbation& p);
  std::optional<DeviceId> nextToFire() const;
  void fire(DeviceId d);
  bool allQuiet() const;

  std::shared_ptr<const Program> program_;
  Environment env_;
  Schedule sched_;
  RunOptions options_;
  Rng schedRng_;
  std::optional<Rng> warmRng_;
  std::vector<Perturbation> perturbations_;  // sorted by time
  size_t nextPerturbation_ = 0;
  std::map<DeviceId, DeviceSim> devices_;
  Trace trace_;
  double now_ = 0;
  double horizon_ = 0;
  bool stabilizedEarly_ = false;
  // Synchronous mode: exports frozen at the start of each global round.
  std::map<DeviceId, std::shared_ptr<const ExportTree>> roundSnapshot_;
  std::vector<DeviceId> roundPending_;
};

// Canonical trace CSV: header "time,device,seq,value", floats in shortest
// round-trip form.
std::string traceCsv(const Trace& trace);

}  // namespace fieldc
