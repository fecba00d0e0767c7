#include "fieldc/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fieldc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ScenarioError(where + ": " + msg);
}

void rejectUnknownKeys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok) fail(where, "unknown key '" + it.key() + "'");
  }
}

Value jsonToValue(const json& j, const std::string& where) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number()) return Value::num(j.get<double>());
  if (j.is_string()) return Value::str(j.get<std::string>());
  if (j.is_array()) {
    Tuple t;
    for (const json& e : j) t.push_back(jsonToValue(e, where));
    return Value::tuple(std::move(t));
  }
  fail(where, "sensor values must be booleans, numbers, strings or arrays");
}

double requireNum(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    fail(where, std::string("missing numeric '") + key + "'");
  return obj[key].get<double>();
}

int requireInt(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_integer())
    fail(where, std::string("missing integer '") + key + "'");
  return obj[key].get<int>();
}

std::string requireStr(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string())
    fail(where, std::string("missing string '") + key + "'");
  return obj[key].get<std::string>();
}

TopologySpec parseTopology(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "'topology' must be an object");
  std::string kind = requireStr(j, "kind", where);
  TopologySpec spec;
  if (kind == "line") {
    rejectUnknownKeys(j, {"kind", "n", "spacing", "radius"}, where);
    spec.kind = TopologySpec::Kind::Line;
    spec.n = requireInt(j, "n", where);
    spec.spacing = requireNum(j, "spacing", where);
    spec.radius = requireNum(j, "radius", where);
  } else if (kind == "grid") {
    rejectUnknownKeys(j, {"kind", "rows", "cols", "spacing", "radius"}, where);
    spec.kind = TopologySpec::Kind::Grid;
    spec.rows = requireInt(j, "rows", where);
    spec.cols = requireInt(j, "cols", where);
    spec.spacing = requireNum(j, "spacing", where);
    spec.radius = requireNum(j, "radius", where);
  } else if (kind == "uniformRandom") {
    rejectUnknownKeys(j, {"kind", "n", "width", "height", "radius"}, where);
    spec.kind = TopologySpec::Kind::UniformRandom;
    spec.n = requireInt(j, "n", where);
    spec.width = requireNum(j, "width", where);
    spec.height = requireNum(j, "height", where);
    spec.radius = requireNum(j, "radius", where);
  } else {
    fail(where, "unknown topology kind '" + kind + "'");
  }
  return spec;
}

Schedule parseSchedule(const json& j, const std::string& where) {
  Schedule s;
  if (!j.is_object()) fail(where, "'schedule' must be an object");
  rejectUnknownKeys(j, {"mode", "basePeriod", "jitter"}, where);
  std::string mode = requireStr(j, "mode", where);
  if (mode == "synchronous")
    s.mode = Schedule::Mode::Synchronous;
  else if (mode == "fair-async")
    s.mode = Schedule::Mode::FairAsync;
  else
    fail(where, "schedule mode must be 'synchronous' or 'fair-async'");
  if (j.contains("basePeriod")) s.basePeriod = requireNum(j, "basePeriod", where);
  if (j.contains("jitter")) s.jitter = requireNum(j, "jitter", where);
  return s;
}

Perturbation parsePerturbation(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "perturbations must be objects");
  Perturbation p;
  p.at = requireNum(j, "at", where);
  std::string kind = requireStr(j, "kind", where);
  if (kind == "setSensor") {
    rejectUnknownKeys(j, {"at", "kind", "device", "name", "value"}, where);
    p.kind = Perturbation::Kind::SetSensor;
    p.device = requireInt(j, "device", where);
    p.sensorName = requireStr(j, "name", where);
    if (!j.contains("value")) fail(where, "setSensor needs 'value'");
    p.sensorValue = jsonToValue(j["value"], where);
  } else if (kind == "moveDevice") {
    rejectUnknownKeys(j, {"at", "kind", "device", "x", "y"}, where);
    p.kind = Perturbation::Kind::MoveDevice;
    p.device = requireInt(j, "device", where);
    p.pos = {requireNum(j, "x", where), requireNum(j, "y", where)};
  } else if (kind == "removeDevice") {
    rejectUnknownKeys(j, {"at", "kind", "device"}, where);
    p.kind = Perturbation::Kind::RemoveDevice;
    p.device = requireInt(j, "device", where);
  } else if (kind == "addDevice") {
    rejectUnknownKeys(j, {"at", "kind", "x", "y", "sensors"}, where);
    p.kind = Perturbation::Kind::AddDevice;
    p.pos = {requireNum(j, "x", where), requireNum(j, "y", where)};
    if (j.contains("sensors")) {
      if (!j["sensors"].is_object()) fail(where, "'sensors' must be an object");
      for (auto it = j["sensors"].begin(); it != j["sensors"].end(); ++it)
        p.sensors[it.key()] = jsonToValue(it.value(), where);
    }
  } else {
    fail(where, "unknown perturbation kind '" + kind + "'");
  }
  return p;
}

}  // namespace

Scenario parseScenario(const std::string& jsonText, const std::string& baseDir,
                       const std::string& sourceName) {
  json j;
  try {
    j = json::parse(jsonText);
  } catch (const json::parse_error& e) {
    fail(sourceName, e.what());
  }
  if (!j.is_object()) fail(sourceName, "scenario must be a JSON object");

  rejectUnknownKeys(j,
                    {"version", "name", "program", "main", "replicatedGossip", "topology",
                     "schedule", "seed", "rounds", "sensors", "perturbations",
                     "stopOnStabilization", "requireStabilization", "outputs"},
                    sourceName);

  if (requireInt(j, "version", sourceName) != 1)
    fail(sourceName, "unsupported scenario version (expected 1)");

  Scenario s;
  if (j.contains("name")) s.name = requireStr(j, "name", sourceName);

  if (j.contains("program")) {
    std::string rel = requireStr(j, "program", sourceName);
    std::filesystem::path path = std::filesystem::path(baseDir) / rel;
    std::ifstream in(path);
    if (!in) fail(sourceName, "cannot open program file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    s.programSource = buf.str();
  }
  if (j.contains("main")) s.mainExpr = requireStr(j, "main", sourceName);
  if (s.programSource.empty() && s.mainExpr.empty())
    fail(sourceName, "scenario needs 'program' and/or 'main'");

  if (j.contains("replicatedGossip")) {
    const json& rg = j["replicatedGossip"];
    rejectUnknownKeys(rg, {"k", "p"}, sourceName + ".replicatedGossip");
    s.replicatedGossip = {requireInt(rg, "k", sourceName), requireInt(rg, "p", sourceName)};
  }

  if (!j.contains("topology")) fail(sourceName, "missing 'topology'");
  s.topology = parseTopology(j["topology"], sourceName + ".topology");

  if (j.contains("schedule")) s.schedule = parseSchedule(j["schedule"], sourceName + ".schedule");

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail(sourceName, "'seed' must be an integer");
    s.seed = j["seed"].get<uint64_t>();
  }
  s.rounds = requireInt(j, "rounds", sourceName);
  if (s.rounds <= 0) fail(sourceName, "'rounds' must be positive");

  if (j.contains("sensors")) {
    const json& sensors = j["sensors"];
    rejectUnknownKeys(sensors, {"defaults", "byDevice"}, sourceName + ".sensors");
    if (sensors.contains("defaults"))
      for (auto it = sensors["defaults"].begin(); it != sensors["defaults"].end(); ++it)
        s.sensorDefaults[it.key()] = jsonToValue(it.value(), sourceName);
    if (sensors.contains("byDevice")) {
      for (auto it = sensors["byDevice"].begin(); it != sensors["byDevice"].end(); ++it) {
        DeviceId d;
        try {
          d = std::stoi(it.key());
        } catch (...) {
          fail(sourceName, "byDevice keys must be device ids, got '" + it.key() + "'");
        }
        for (auto sit = it.value().begin(); sit != it.value().end(); ++sit)
          s.sensorByDevice[d][sit.key()] = jsonToValue(sit.value(), sourceName);
      }
    }
  }

  if (j.contains("perturbations")) {
    if (!j["perturbations"].is_array()) fail(sourceName, "'perturbations' must be an array");
    for (const json& pj : j["perturbations"])
      s.perturbations.push_back(parsePerturbation(pj, sourceName + ".perturbations"));
  }

  if (j.contains("stopOnStabilization")) {
    const json& st = j["stopOnStabilization"];
    rejectUnknownKeys(st, {"quietRounds", "epsilon"}, sourceName + ".stopOnStabilization");
    StabilizationStop stop;
    stop.quietRounds = requireInt(st, "quietRounds", sourceName);
    if (st.contains("epsilon")) stop.epsilon = requireNum(st, "epsilon", sourceName);
    s.stopOnStabilization = stop;
  }
  if (j.contains("requireStabilization")) {
    if (!j["requireStabilization"].is_boolean())
      fail(sourceName, "'requireStabilization' must be a boolean");
    s.requireStabilization = j["requireStabilization"].get<bool>();
  }

  if (j.contains("outputs")) {
    const json& out = j["outputs"];
    rejectUnknownKeys(out, {"csv", "exportsJson"}, sourceName + ".outputs");
    if (out.contains("csv")) s.csvOutput = requireStr(out, "csv", sourceName);
    if (out.contains("exportsJson")) s.exportsOutput = requireStr(out, "exportsJson", sourceName);
  }

  return s;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string baseDir = std::filesystem::path(path).parent_path().string();
  return parseScenario(buf.str(), baseDir, path);
}

std::shared_ptr<const Program> buildScenarioProgram(const Scenario& s) {
  std::string userSource = s.programSource;
  if (!s.mainExpr.empty()) {
    if (!userSource.empty()) userSource += "\n";
    userSource += s.mainExpr;
  }
  std::string extra;
  if (s.replicatedGossip)
    extra = replicatedGossipDef(s.replicatedGossip->first, s.replicatedGossip->second);
  return std::make_shared<const Program>(loadProgram(userSource, s.name, extra));
}

Environment buildScenarioEnvironment(const Scenario& s, uint64_t seed) {
  Environment env = buildTopology(s.topology, deriveSeed(seed, 11));
  for (DeviceId d : env.deviceIds()) {
    for (const auto& [name, v] : s.sensorDefaults) env.setSensor(d, name, v);
    auto it = s.sensorByDevice.find(d);
    if (it != s.sensorByDevice.end())
      for (const auto& [name, v] : it->second) env.setSensor(d, name, v);
  }
  return env;
}

std::vector<Perturbation> scenarioPerturbations(const Scenario& s) {
  // Added devices inherit the scenario's default sensors.
  std::vector<Perturbation> perturbations = s.perturbations;
  for (Perturbation& p : perturbations) {
    if (p.kind == Perturbation::Kind::AddDevice) {
      std::map<std::string, Value> merged = s.sensorDefaults;
      for (const auto& [name, v] : p.sensors) merged[name] = v;
      p.sensors = std::move(merged);
    }
  }
  return perturbations;
}

World makeWorld(const Scenario& s, uint64_t seed, RunOptions extra) {
  auto program = buildScenarioProgram(s);
  Environment env = buildScenarioEnvironment(s, seed);

  RunOptions options = extra;
  if (!options.stopOnStabilization && s.stopOnStabilization)
    options.stopOnStabilization = s.stopOnStabilization;
  if (s.requireStabilization) options.requireStabilization = true;
  if (!s.exportsOutput.empty()) options.keepExports = true;

  return World(program, std::move(env), s.schedule, seed, s.rounds,
               scenarioPerturbations(s), options);
}

std::string traceExportsJson(const Trace& trace) {
  json events = json::array();
  for (const TraceEvent& e : trace.events) {
    json ev;
    ev["time"] = e.time;
    ev["device"] = e.device;
    ev["seq"] = e.seq;
    ev["value"] = e.result.toString();
    if (e.exports) {
      json entries = json::array();
      for (const auto& [path, value] : e.exports->entries()) {
        json entry;
        entry["path"] = pathToString(path);
        entry["value"] = value.toString();
        entries.push_back(std::move(entry));
      }
      ev["export"] = std::move(entries);
    }
    events.push_back(std::move(ev));
  }
  json root;
  root["events"] = std::move(events);
  return root.dump(2) + "\n";
}

}  // namespace fieldc
