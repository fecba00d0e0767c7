#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fieldc/oracle.hpp"
#include "fieldc/scenario.hpp"
#include "fieldc/sim.hpp"

namespace fieldc {

// Field snapshot: the last value available in each live device at a moment.
using Snapshot = std::map<DeviceId, Value>;

std::set<DeviceId> liveDevicesAt(const Trace& trace, double time);
Snapshot snapshotAt(const Trace& trace, double time);
Snapshot finalSnapshot(const Trace& trace);

// True when every device fires at least once in every window of
// 2*basePeriod of its live interval.
bool fairnessSatisfied(const Trace& trace, double basePeriod);

struct StabilizationReport {
  bool stabilized = false;
  std::optional<double> stabilizationTime;
  std::optional<Snapshot> snapshot;
  double epsilon = 0;
  int quietRounds = 0;
  std::string diagnostics;
};

// Detects a self-stabilised state: after freezeTime (no environment changes
// may follow it), every device's result must hold still, within epsilon, for
// quietRounds consecutive own rounds.
StabilizationReport detectStabilization(const Trace& trace, double freezeTime,
                                        int quietRounds, double epsilon);

struct UniquenessReport {
  bool allStabilized = false;
  bool unique = false;
  std::vector<Snapshot> snapshots;
  std::string divergence;  // human-readable first difference, if any
};

// Runs the scenario `warmStarts` times with randomized rep initial values and
// randomized schedules over the same environment; unique when all stabilized
// snapshots agree device-wise within epsilon.
UniquenessReport checkUniqueness(const Scenario& scenario, int warmStarts,
                                 uint64_t seed, int quietRounds, double epsilon);

struct DensitySweepSpec {
  std::string mainExpr;  // program entry, e.g. distance(sense("source"))
  std::vector<int> densities;
  double width = 10, height = 10;
  double radius0 = 2.0;  // communication radius at densities[0]
  enum class RadiusPolicy {
    ConstantDegree,  // radius scales with 1/sqrt(n): constant expected degree
    Fixed
  };
  RadiusPolicy policy = RadiusPolicy::ConstantDegree;
  uint64_t seed = 1;
  int replications = 1;
  Vec2 sourceAnchor{};   // the device nearest this point is the source
  double probePitch = 0;  // 0: reference radius / 4
  int maxRounds = 0;      // 0: derived from the hop diameter
  std::string sourceSensor = "source";
};

struct DensityResult {
  int density = 0;
  double radius = 0;
  bool connected = false;
  // Mean |field - reference-density field| over the probe grid (the discrete
  // surrogate of the integral comparison), averaged over replications.
  double vsReference = 0;
  double meanValue = 0;  // mean stabilized device value
};

struct ConsistencyReport {
  std::vector<DensityResult> perDensity;
  // Mean probe difference between consecutive densities; a convergent
  // (eventually consistent) construction drives these down as density grows.
  std::vector<double> successive;
  bool vsReferenceDecreasing = false;  // strictly, over non-reference densities
  bool successiveDecreasing = false;   // strictly
  bool meanValueIncreasing = false;    // strictly
  std::string verdict;                 // "consistent-with ..." wording
};

ConsistencyReport densitySweep(const DensitySweepSpec& spec);

// Per-time numeric reference for a device; nullopt skips the device.
using OracleField = std::function<std::optional<double>(double time, DeviceId device)>;

struct DynamicsReport {
  // Earliest time from which every device error stays <= epsilon through the
  // end of the trace; unset if that never happens.
  std::optional<double> convergenceTime;
  double peakError = 0;
  double errorIntegral = 0;  // integral of the mean absolute error over time
};

DynamicsReport dynamicsMetrics(const Trace& trace, const OracleField& oracle,
                               double epsilon, double fromTime = 0);

}  // namespace fieldc
