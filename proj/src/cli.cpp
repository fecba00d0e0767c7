#include "fieldc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fieldc/analysis.hpp"
#include "fieldc/builtins.hpp"
#include "fieldc/parser.hpp"
#include "fieldc/scenario.hpp"
#include "fieldc/stdlib.hpp"

namespace fieldc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SeedFlag {
  bool given = false;
  uint64_t value = 0;
};

// Precedence: --seed flag, then FIELDC_SEED, then the scenario's own seed.
uint64_t resolveSeed(const SeedFlag& flag, uint64_t scenarioSeed) {
  if (flag.given) return flag.value;
  if (const char* env = std::getenv("FIELDC_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ScenarioError("FIELDC_SEED is not an integer");
    }
  }
  return scenarioSeed;
}

void writeFile(const fs::path& outDir, const std::string& name, const std::string& data) {
  fs::create_directories(outDir);
  fs::path path = outDir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write '" + path.string() + "'");
  out << data;
}

int cmdCheck(const std::string& file, bool noStdlib) {
  std::ifstream in(file);
  if (!in) {
    std::cerr << "error: cannot open '" << file << "'\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (noStdlib) {
    parse(buf.str(), file);
  } else {
    // Library names are visible for resolution; the file's own defs win.
    static const Program lib = parse(stdlibSource(), "<stdlib>");
    parse(buf.str(), file, &lib.defs);
  }
  std::cout << file << ": OK\n";
  return 0;
}

int cmdRun(const std::string& scenarioPath, const SeedFlag& seedFlag,
           const std::string& outDir, std::string csvName, std::string exportsName) {
  Scenario scenario = loadScenario(scenarioPath);
  uint64_t seed = resolveSeed(seedFlag, scenario.seed);

  if (csvName.empty()) csvName = scenario.csvOutput;
  if (exportsName.empty()) exportsName = scenario.exportsOutput;

  RunOptions extra;
  if (!exportsName.empty()) extra.keepExports = true;

  World world = makeWorld(scenario, seed, extra);
  world.run();

  std::string csv = traceCsv(world.trace());
  if (csvName.empty())
    std::cout << csv;
  else
    writeFile(outDir, csvName, csv);
  if (!exportsName.empty()) writeFile(outDir, exportsName, traceExportsJson(world.trace()));

  if (world.stabilizedEarly())
    std::cerr << "stabilized early at t=" << formatNum(world.now()) << "\n";
  return 0;
}

std::map<DeviceId, double> oracleField(const std::string& oracle, const Environment& env,
                                       const std::string& sourceSensor,
                                       const std::string& inputSensor) {
  if (oracle == "min-input") return minSensorOverComponent(env, inputSensor);
  std::set<DeviceId> sources;
  for (DeviceId d : env.deviceIds()) {
    const auto& sensors = env.sensors(d);
    auto it = sensors.find(sourceSensor);
    if (it != sensors.end() && it->second.isBool() && it->second.asBool()) sources.insert(d);
  }
  if (oracle == "dijkstra") return dijkstra(env, sources);
  if (oracle == "bfs-hops") return bfsHops(env, sources);
  throw ScenarioError("unknown oracle '" + oracle + "'");
}

int cmdAnalyze(const std::string& scenarioPath, const std::string& property,
               const SeedFlag& seedFlag, int warmStarts, int quietRounds, double epsilon,
               const std::string& oracle, const std::string& sourceSensor,
               const std::string& inputSensor) {
  Scenario scenario = loadScenario(scenarioPath);
  uint64_t seed = resolveSeed(seedFlag, scenario.seed);

  auto runOnce = [&](RunOptions extra) {
    World world = makeWorld(scenario, seed, extra);
    world.run();
    return world;
  };

  auto effectiveQuietRounds = [&](const Environment& env) {
    // Information travels at most one hop per round.
    return quietRounds > 0 ? quietRounds : 2 * std::max(1, hopDiameter(env));
  };

  if (property == "stabilization" || property == "self-stabilization-correctness") {
    World world = runOnce({});
    int k = effectiveQuietRounds(world.env());
    StabilizationReport report =
        detectStabilization(world.trace(), world.trace().lastChangeTime(), k, epsilon);
    json out;
    out["property"] = property;
    out["stabilized"] = report.stabilized;
    if (report.stabilizationTime) out["stabilizationTime"] = *report.stabilizationTime;
    out["quietRounds"] = k;
    out["epsilon"] = epsilon;
    if (!report.diagnostics.empty()) out["diagnostics"] = report.diagnostics;

    bool pass = report.stabilized;
    if (property == "self-stabilization-correctness" && report.stabilized) {
      auto expected = oracleField(oracle, world.env(), sourceSensor, inputSensor);
      json mismatches = json::array();
      for (const auto& [d, v] : *report.snapshot) {
        double want = expected.count(d) ? expected.at(d) : 0.0;
        if (!valueApproxEquals(v, Value::num(want), epsilon)) {
          json m;
          m["device"] = d;
          m["value"] = v.toString();
          m["expected"] = formatNum(want);
          mismatches.push_back(std::move(m));
        }
      }
      out["oracle"] = oracle;
      out["matchesOracle"] = mismatches.empty();
      if (!mismatches.empty()) out["mismatches"] = std::move(mismatches);
      pass = mismatches.empty();
    }
    out["pass"] = pass;
    std::cout << out.dump(2) << "\n";
    return pass ? 0 : 1;
  }

  if (property == "uniqueness") {
    Environment env = buildScenarioEnvironment(scenario, scenario.seed);
    int k = effectiveQuietRounds(env);
    UniquenessReport report = checkUniqueness(scenario, warmStarts, seed, k, epsilon);
    json out;
    out["property"] = "uniqueness";
    out["warmStarts"] = warmStarts;
    out["allStabilized"] = report.allStabilized;
    out["unique"] = report.unique;
    if (!report.divergence.empty()) out["divergence"] = report.divergence;
    out["pass"] = report.unique;
    std::cout << out.dump(2) << "\n";
    return report.unique ? 0 : 1;
  }

  if (property == "dynamics") {
    World world = runOnce({});
    auto expected = oracleField(oracle, world.env(), sourceSensor, inputSensor);
    OracleField field = [&expected](double, DeviceId d) -> std::optional<double> {
      auto it = expected.find(d);
      if (it == expected.end()) return std::nullopt;
      return it->second;
    };
    DynamicsReport report =
        dynamicsMetrics(world.trace(), field, epsilon, world.trace().lastChangeTime());
    json out;
    out["property"] = "dynamics";
    out["oracle"] = oracle;
    if (report.convergenceTime) out["convergenceTime"] = *report.convergenceTime;
    out["peakError"] = report.peakError;
    out["errorIntegral"] = report.errorIntegral;
    bool pass = report.convergenceTime.has_value();
    out["pass"] = pass;
    std::cout << out.dump(2) << "\n";
    return pass ? 0 : 1;
  }

  std::cerr << "error: unknown property '" << property << "'\n";
  return 2;
}

int cmdSweep(const DensitySweepSpec& spec, const std::string& expect) {
  ConsistencyReport report = densitySweep(spec);
  json out;
  out["verdict"] = report.verdict;
  out["successive"] = report.successive;
  out["successiveDecreasing"] = report.successiveDecreasing;
  out["vsReferenceDecreasing"] = report.vsReferenceDecreasing;
  out["meanValueIncreasing"] = report.meanValueIncreasing;
  json per = json::array();
  for (const DensityResult& r : report.perDensity) {
    json d;
    d["density"] = r.density;
    d["radius"] = r.radius;
    d["connected"] = r.connected;
    d["vsReference"] = r.vsReference;
    d["meanValue"] = r.meanValue;
    per.push_back(std::move(d));
  }
  out["perDensity"] = std::move(per);
  std::cout << out.dump(2) << "\n";

  std::cerr << "density sweep: " << report.verdict << "\n";
  for (const DensityResult& r : report.perDensity)
    std::cerr << "  n=" << r.density << " radius=" << formatNum(r.radius)
              << (r.connected ? "" : " (disconnected)")
              << " vsRef=" << formatNum(r.vsReference)
              << " mean=" << formatNum(r.meanValue) << "\n";

  if (expect.empty()) return 0;
  bool consistent = report.successiveDecreasing;
  if (expect == "consistent") return consistent ? 0 : 1;
  if (expect == "inconsistent") return consistent ? 1 : 0;
  std::cerr << "error: --expect must be 'consistent' or 'inconsistent'\n";
  return 2;
}

int cmdListBuiltins() {
  for (const auto& [name, spec] : builtinRegistry()) {
    std::cout << name << "  arity ";
    if (spec.maxArity < 0)
      std::cout << spec.minArity << "+";
    else if (spec.minArity == spec.maxArity)
      std::cout << spec.minArity;
    else
      std::cout << spec.minArity << ".." << spec.maxArity;
    std::cout << (spec.pure ? "" : "  [context]") << "\n";
  }
  return 0;
}

}  // namespace

int cliMain(int argc, const char* const* argv) {
  CLI::App app{"fieldc: field-calculus interpreter, simulator and analysis toolkit"};
  app.require_subcommand(1);

  SeedFlag seedFlag;
  auto addSeed = [&seedFlag](CLI::App* cmd) {
    cmd->add_option_function<uint64_t>(
        "--seed",
        [&seedFlag](const uint64_t& v) {
          seedFlag.given = true;
          seedFlag.value = v;
        },
        "Override every random choice in the run");
  };

  // check
  std::string checkFile;
  bool checkNoStdlib = false;
  CLI::App* check = app.add_subcommand("check", "Parse-check a program file");
  check->add_option("file", checkFile, "Program file (.fc)")->required();
  check->add_flag("--no-stdlib", checkNoStdlib, "Do not preload the standard library");

  // run
  std::string runScenario, runOut = ".", runCsv, runExports;
  CLI::App* run = app.add_subcommand("run", "Run a scenario and emit its trace");
  run->add_option("scenario", runScenario, "Scenario JSON file")->required();
  run->add_option("--out", runOut, "Output directory (default: current)");
  run->add_option("--csv", runCsv, "Trace CSV file name (default: scenario outputs.csv)");
  run->add_option("--exports-json", runExports, "Full-export JSON dump file name");
  addSeed(run);

  // analyze
  std::string anScenario, anProperty, anOracle = "min-input";
  std::string anSourceSensor = "source", anInputSensor = "value";
  int anWarmStarts = 5, anQuietRounds = 0;
  double anEpsilon = 0.0;
  CLI::App* analyze = app.add_subcommand("analyze", "Check a resilience property");
  analyze->add_option("scenario", anScenario, "Scenario JSON file")->required();
  analyze
      ->add_option("--property", anProperty,
                   "stabilization | self-stabilization-correctness | uniqueness | dynamics")
      ->required();
  analyze->add_option("--oracle", anOracle, "min-input | dijkstra | bfs-hops");
  analyze->add_option("--source-sensor", anSourceSensor, "Boolean sensor marking sources");
  analyze->add_option("--input-sensor", anInputSensor, "Numeric sensor for min-input");
  analyze->add_option("--warm-starts", anWarmStarts, "Runs for the uniqueness check");
  analyze->add_option("--quiet-rounds", anQuietRounds,
                      "Quiet rounds for stabilization (0: 2x hop diameter)");
  analyze->add_option("--epsilon", anEpsilon, "Tolerance for value comparisons");
  addSeed(analyze);

  // sweep
  DensitySweepSpec sweepSpec;
  std::string sweepDensities = "100,200,400", sweepPolicy = "constant-degree";
  std::string sweepExpect;
  std::vector<double> sweepAnchor;
  CLI::App* sweep = app.add_subcommand("sweep", "Stabilized-state density sweep");
  sweep->add_option("--main", sweepSpec.mainExpr, "Program entry expression")->required();
  sweep->add_option("--densities", sweepDensities, "Comma-separated device counts");
  sweep->add_option("--width", sweepSpec.width, "Region width in meters");
  sweep->add_option("--height", sweepSpec.height, "Region height in meters");
  sweep->add_option("--radius0", sweepSpec.radius0, "Radius at the lowest density");
  sweep->add_option("--policy", sweepPolicy, "constant-degree | fixed");
  sweep->add_option("--replications", sweepSpec.replications, "Seeds averaged per density");
  sweep->add_option("--anchor", sweepAnchor, "Source anchor point x y")->expected(2);
  sweep->add_option("--probe-pitch", sweepSpec.probePitch, "Probe grid pitch (0: radius/4)");
  sweep->add_option("--max-rounds", sweepSpec.maxRounds, "Round budget per run (0: auto)");
  sweep->add_option("--expect", sweepExpect, "consistent | inconsistent (sets exit code)");
  sweep->add_option("--seed", sweepSpec.seed, "Sweep seed");

  // dump-stdlib / list-builtins
  CLI::App* dump = app.add_subcommand("dump-stdlib", "Print the standard library source");
  CLI::App* list = app.add_subcommand("list-builtins", "List builtin functions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmdCheck(checkFile, checkNoStdlib);
    if (run->parsed()) return cmdRun(runScenario, seedFlag, runOut, runCsv, runExports);
    if (analyze->parsed())
      return cmdAnalyze(anScenario, anProperty, seedFlag, anWarmStarts, anQuietRounds,
                        anEpsilon, anOracle, anSourceSensor, anInputSensor);
    if (sweep->parsed()) {
      sweepSpec.densities.clear();
      std::stringstream ss(sweepDensities);
      std::string item;
      while (std::getline(ss, item, ',')) sweepSpec.densities.push_back(std::stoi(item));
      if (sweepPolicy == "constant-degree")
        sweepSpec.policy = DensitySweepSpec::RadiusPolicy::ConstantDegree;
      else if (sweepPolicy == "fixed")
        sweepSpec.policy = DensitySweepSpec::RadiusPolicy::Fixed;
      else
        throw ScenarioError("unknown radius policy '" + sweepPolicy + "'");
      if (sweepAnchor.size() == 2)
        sweepSpec.sourceAnchor = {sweepAnchor[0], sweepAnchor[1]};
      else
        sweepSpec.sourceAnchor = {sweepSpec.width / 2, sweepSpec.height / 2};
      return cmdSweep(sweepSpec, sweepExpect);
    }
    if (dump->parsed()) {
      std::cout << stdlibSource();
      return 0;
    }
    if (list->parsed()) return cmdListBuiltins();
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace fieldc
