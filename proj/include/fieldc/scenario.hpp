#pragma once

#include <memory>
#include <optional>
#include <string>

#include "fieldc/sim.hpp"
#include "fieldc/stdlib.hpp"

namespace fieldc {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A runnable experiment: program + topology + schedule + sensor initial
// values + perturbations + budget. Loaded from versioned JSON with strict
// unknown-key rejection.
struct Scenario {
  std::string name;
  std::string programSource;  // contents of the referenced .fc file, if any
  std::string mainExpr;       // trailing main expression, if given inline
  std::optional<std::pair<int, int>> replicatedGossip;  // (k, p)

  TopologySpec topology;
  Schedule schedule;
  uint64_t seed = 0;
  int rounds = 0;

  std::map<std::string, Value> sensorDefaults;
  std::map<DeviceId, std::map<std::string, Value>> sensorByDevice;
  std::vector<Perturbation> perturbations;

  std::optional<StabilizationStop> stopOnStabilization;
  bool requireStabilization = false;

  std::string csvOutput;      // file name within the output directory
  std::string exportsOutput;  // optional full-export JSON dump
};

Scenario loadScenario(const std::string& path);
Scenario parseScenario(const std::string& jsonText, const std::string& baseDir,
                       const std::string& sourceName);

// Program with the standard library (and generated replicas) in scope.
std::shared_ptr<const Program> buildScenarioProgram(const Scenario& s);

// Topology with default and per-device sensors applied.
Environment buildScenarioEnvironment(const Scenario& s, uint64_t seed);

// Perturbation list with the scenario's default sensors merged into
// addDevice payloads.
std::vector<Perturbation> scenarioPerturbations(const Scenario& s);

// Assembles a ready-to-run world. `extra` augments the scenario's own run
// options (stabilization stop, export retention, warm starts).
World makeWorld(const Scenario& s, uint64_t seed, RunOptions extra = {});

// Full-export dump of a trace recorded with keepExports.
std::string traceExportsJson(const Trace& trace);

}  // namespace fieldc
