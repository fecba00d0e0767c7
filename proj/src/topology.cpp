#include "fieldc/topology.hpp"

#include <cmath>

#include "fieldc/rng.hpp"

namespace fieldc {

double dist(const Vec2& a, const Vec2& b) {
  double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

DeviceId Environment::addDevice(Vec2 pos, std::map<std::string, Value> sensors) {
  DeviceId id = nextId_++;
  devices_.emplace(id, DeviceInfo{pos, std::move(sensors)});
  return id;
}

void Environment::removeDevice(DeviceId d) {
  if (!devices_.erase(d))
    throw std::runtime_error("removeDevice: unknown device " + std::to_string(d));
}

void Environment::moveDevice(DeviceId d, Vec2 pos) {
  if (!hasDevice(d))
    throw std::runtime_error("moveDevice: unknown device " + std::to_string(d));
  devices_.at(d).pos = pos;
}

void Environment::setSensor(DeviceId d, const std::string& name, Value v) {
  if (!hasDevice(d))
    throw std::runtime_error("setSensor: unknown device " + std::to_string(d));
  devices_.at(d).sensors[name] = std::move(v);
}

std::vector<DeviceId> Environment::deviceIds() const {
  std::vector<DeviceId> ids;
  ids.reserve(devices_.size());
  for (const auto& [d, info] : devices_) ids.push_back(d);
  return ids;
}

std::vector<DeviceId> Environment::neighbours(DeviceId d) const {
  std::vector<DeviceId> out;
  const Vec2& p = devices_.at(d).pos;
  for (const auto& [other, info] : devices_) {
    if (other == d) continue;
    if (dist(p, info.pos) <= commRadius_) out.push_back(other);
  }
  return out;
}

std::vector<std::pair<DeviceId, DeviceId>> Environment::edges() const {
  std::vector<std::pair<DeviceId, DeviceId>> out;
  for (auto ia = devices_.begin(); ia != devices_.end(); ++ia) {
    auto ib = ia;
    for (++ib; ib != devices_.end(); ++ib) {
      if (dist(ia->second.pos, ib->second.pos) <= commRadius_)
        out.emplace_back(ia->first, ib->first);
    }
  }
  return out;
}

Environment buildTopology(const TopologySpec& spec, uint64_t seed) {
  if (spec.radius <= 0) throw std::invalid_argument("topology: radius must be positive");
  Environment env(spec.radius);
  switch (spec.kind) {
    case TopologySpec::Kind::Line: {
      if (spec.n <= 0) throw std::invalid_argument("topology: line needs n > 0");
      if (spec.spacing <= 0) throw std::invalid_argument("topology: spacing must be positive");
      for (int i = 0; i < spec.n; ++i) env.addDevice({i * spec.spacing, 0.0});
      break;
    }
    case TopologySpec::Kind::Grid: {
      if (spec.rows <= 0 || spec.cols <= 0)
        throw std::invalid_argument("topology: grid needs rows, cols > 0");
      if (spec.spacing <= 0) throw std::invalid_argument("topology: spacing must be positive");
      for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c)
          env.addDevice({c * spec.spacing, r * spec.spacing});
      break;
    }
    case TopologySpec::Kind::UniformRandom: {
      if (spec.n <= 0) throw std::invalid_argument("topology: uniformRandom needs n > 0");
      if (spec.width <= 0 || spec.height <= 0)
        throw std::invalid_argument("topology: uniformRandom needs a positive area");
      Rng rng(seed);
      for (int i = 0; i < spec.n; ++i) {
        double x = rng.nextDouble() * spec.width;
        double y = rng.nextDouble() * spec.height;
        env.addDevice({x, y});
      }
      break;
    }
  }
  return env;
}

}  // namespace fieldc
