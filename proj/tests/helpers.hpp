#pragma once

#include <map>
#include <memory>
#include <string>

#include "fieldc/analysis.hpp"
#include "fieldc/oracle.hpp"
#include "fieldc/sim.hpp"
#include "fieldc/stdlib.hpp"
#include "fieldc/topology.hpp"

namespace fieldc::testing {

inline Environment lineEnv(int n, double spacing = 1.0, double radius = 1.5) {
  TopologySpec spec;
  spec.kind = TopologySpec::Kind::Line;
  spec.n = n;
  spec.spacing = spacing;
  spec.radius = radius;
  return buildTopology(spec, 0);
}

inline Environment gridEnv(int rows, int cols, double spacing = 1.0, double radius = 1.0) {
  TopologySpec spec;
  spec.kind = TopologySpec::Kind::Grid;
  spec.rows = rows;
  spec.cols = cols;
  spec.spacing = spacing;
  spec.radius = radius;
  return buildTopology(spec, 0);
}

inline Environment randomEnv(int n, double width, double height, double radius,
                             uint64_t seed) {
  TopologySpec spec;
  spec.kind = TopologySpec::Kind::UniformRandom;
  spec.n = n;
  spec.width = width;
  spec.height = height;
  spec.radius = radius;
  return buildTopology(spec, seed);
}

inline void setAll(Environment& env, const std::string& name, Value v) {
  for (DeviceId d : env.deviceIds()) env.setSensor(d, name, v);
}

inline std::shared_ptr<const Program> programOf(const std::string& mainExpr,
                                                const std::string& extraDefs = "") {
  return std::make_shared<const Program>(loadProgram(mainExpr, "<test>", extraDefs));
}

inline World runWorld(const std::string& mainExpr, Environment env, int rounds,
                      Schedule sched = {}, uint64_t seed = 1,
                      std::vector<Perturbation> perturbations = {},
                      RunOptions options = {}, const std::string& extraDefs = "") {
  World world(programOf(mainExpr, extraDefs), std::move(env), sched, seed, rounds,
              std::move(perturbations), options);
  world.run();
  return world;
}

inline std::map<DeviceId, double> numericSnapshot(const Trace& trace) {
  std::map<DeviceId, double> out;
  for (const auto& [d, v] : finalSnapshot(trace)) out[d] = v.asNum();
  return out;
}

}  // namespace fieldc::testing
