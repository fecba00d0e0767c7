#include "fieldc/oracle.hpp"

#include <deque>
#include <limits>
#include <queue>

namespace fieldc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::map<DeviceId, double> dijkstra(const Environment& env,
                                    const std::set<DeviceId>& sources) {
  std::map<DeviceId, double> dist;
  for (DeviceId d : env.deviceIds()) dist[d] = kInf;

  using Item = std::pair<double, DeviceId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (DeviceId s : sources) {
    if (!env.hasDevice(s)) continue;
    dist[s] = 0.0;
    pq.push({0.0, s});
  }
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    for (DeviceId v : env.neighbours(u)) {
      double cand = dist[u] + env.distance(u, v);
      if (cand < dist[v]) {
        dist[v] = cand;
        pq.push({cand, v});
      }
    }
  }
  return dist;
}

std::map<DeviceId, double> bfsHops(const Environment& env,
                                   const std::set<DeviceId>& sources) {
  std::map<DeviceId, double> hops;
  for (DeviceId d : env.deviceIds()) hops[d] = kInf;
  std::deque<DeviceId> queue;
  for (DeviceId s : sources) {
    if (!env.hasDevice(s)) continue;
    hops[s] = 0.0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    DeviceId u = queue.front();
    queue.pop_front();
    for (DeviceId v : env.neighbours(u)) {
      if (hops[v] == kInf) {
        hops[v] = hops[u] + 1.0;
        queue.push_back(v);
      }
    }
  }
  return hops;
}

std::map<DeviceId, DeviceId> components(const Environment& env) {
  std::map<DeviceId, DeviceId> label;
  for (DeviceId d : env.deviceIds()) {
    if (label.count(d)) continue;
    // d is the smallest unlabelled id, hence its component's label.
    std::deque<DeviceId> queue{d};
    label[d] = d;
    while (!queue.empty()) {
      DeviceId u = queue.front();
      queue.pop_front();
      for (DeviceId v : env.neighbours(u)) {
        if (!label.count(v)) {
          label[v] = d;
          queue.push_back(v);
        }
      }
    }
  }
  return label;
}

bool isConnected(const Environment& env) {
  if (env.deviceCount() == 0) return true;
  auto label = components(env);
  DeviceId first = label.begin()->second;
  for (const auto& [d, l] : label)
    if (l != first) return false;
  return true;
}

int hopDiameter(const Environment& env) {
  int best = 0;
  for (DeviceId d : env.deviceIds()) {
    auto hops = bfsHops(env, {d});
    for (const auto& [v, h] : hops)
      if (h != kInf) best = std::max(best, static_cast<int>(h));
  }
  return best;
}

std::map<DeviceId, double> minSensorOverComponent(const Environment& env,
                                                  const std::string& sensor) {
  auto label = components(env);
  std::map<DeviceId, double> perComponent;
  for (DeviceId d : env.deviceIds()) {
    const auto& sensors = env.sensors(d);
    auto it = sensors.find(sensor);
    if (it == sensors.end() || !it->second.isNum()) continue;
    double v = it->second.asNum();
    auto [slot, inserted] = perComponent.emplace(label.at(d), v);
    if (!inserted && v < slot->second) slot->second = v;
  }
  std::map<DeviceId, double> out;
  for (DeviceId d : env.deviceIds()) {
    auto it = perComponent.find(label.at(d));
    out[d] = it == perComponent.end() ? kInf : it->second;
  }
  return out;
}

}  // namespace fieldc
