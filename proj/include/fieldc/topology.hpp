#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fieldc/value.hpp"

namespace fieldc {

struct Vec2 {
  double x = 0, y = 0;
};

double dist(const Vec2& a, const Vec2& b);

// Positions, proximity and sensors at an instant. Two devices are neighbours
// when their Euclidean distance is at most commRadius.
class Environment {
 public:
  Environment() = default;
  explicit Environment(double commRadius) : commRadius_(commRadius) {}

  DeviceId addDevice(Vec2 pos, std::map<std::string, Value> sensors = {});
  void removeDevice(DeviceId d);
  void moveDevice(DeviceId d, Vec2 pos);
  void setSensor(DeviceId d, const std::string& name, Value v);

  bool hasDevice(DeviceId d) const { return devices_.count(d) != 0; }
  const Vec2& position(DeviceId d) const { return devices_.at(d).pos; }
  const std::map<std::string, Value>& sensors(DeviceId d) const {
    return devices_.at(d).sensors;
  }

  std::vector<DeviceId> deviceIds() const;
  size_t deviceCount() const { return devices_.size(); }
  double commRadius() const { return commRadius_; }

  // Neighbours of d in ascending id order (excludes d itself).
  std::vector<DeviceId> neighbours(DeviceId d) const;

  // All proximity edges (a < b), ascending.
  std::vector<std::pair<DeviceId, DeviceId>> edges() const;

  double distance(DeviceId a, DeviceId b) const {
    return dist(devices_.at(a).pos, devices_.at(b).pos);
  }

 private:
  struct DeviceInfo {
    Vec2 pos;
    std::map<std::string, Value> sensors;
  };
  std::map<DeviceId, DeviceInfo> devices_;
  double commRadius_ = 1.0;
  DeviceId nextId_ = 0;  // ids are dense and never reused
};

struct TopologySpec {
  enum class Kind { Line, Grid, UniformRandom };
  Kind kind = Kind::Line;
  int n = 0;                  // line/uniformRandom
  int rows = 0, cols = 0;     // grid
  double spacing = 1.0;       // line/grid
  double width = 0, height = 0;  // uniformRandom area
  double radius = 1.0;
};

// Deterministic per (spec, seed). Device ids are 0..n-1 in placement order.
Environment buildTopology(const TopologySpec& spec, uint64_t seed);

}  // namespace fieldc
