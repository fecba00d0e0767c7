#pragma once

#include <map>
#include <set>
#include <vector>

#include "fieldc/topology.hpp"

namespace fieldc {

// Reference graph algorithms over the proximity graph. These never touch the
// DSL engine; they are the independent route differential tests and property
// checks compare against.

// Shortest-path distance from the nearest source along proximity edges
// weighted by Euclidean length; unreachable devices get +infinity. Each
// relaxation computes dist[u] + w(u, v), the same float operation order the
// gradient programs use.
std::map<DeviceId, double> dijkstra(const Environment& env,
                                    const std::set<DeviceId>& sources);

// Hop count to the nearest source (BFS depth); unreachable -> +infinity.
std::map<DeviceId, double> bfsHops(const Environment& env,
                                   const std::set<DeviceId>& sources);

// Connected-component label per device (labels are the smallest member id).
std::map<DeviceId, DeviceId> components(const Environment& env);

bool isConnected(const Environment& env);

// Largest BFS eccentricity in hops over all devices (0 for a single device).
int hopDiameter(const Environment& env);

// Minimum of a numeric sensor over each device's connected component.
std::map<DeviceId, double> minSensorOverComponent(const Environment& env,
                                                  const std::string& sensor);

}  // namespace fieldc
