#include "fieldc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fieldc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Trace::lastChangeTime() const {
  double t = -kInf;
  for (const EnvChange& c : changes) t = std::max(t, c.time);
  return t;
}

World::World(std::shared_ptr<const Program> program, Environment env, Schedule sched,
             uint64_t seed, int roundBudget, std::vector<Perturbation> perturbations,
             RunOptions options)
    : program_(std::move(program)),
      env_(std::move(env)),
      sched_(sched),
      options_(std::move(options)),
      schedRng_(deriveSeed(seed, 1)),
      perturbations_(std::move(perturbations)) {
  if (!program_ || !program_->main) throw SimError("world needs a program with a main expression");
  if (roundBudget <= 0) throw SimError("round budget must be positive");
  if (sched_.basePeriod <= 0) throw SimError("basePeriod must be positive");
  if (sched_.jitter < 0 || sched_.jitter >= 1)
    throw SimError("jitter must lie in [0, 1) to keep the scheduler fair");
  if (options_.warmStartSeed) warmRng_.emplace(deriveSeed(*options_.warmStartSeed, 2));

  std::stable_sort(perturbations_.begin(), perturbations_.end(),
                   [](const Perturbation& a, const Perturbation& b) { return a.at < b.at; });

  horizon_ = roundBudget * sched_.basePeriod;
  trace_.horizon = horizon_;
  trace_.initialDevices = env_.deviceIds();
  for (DeviceId d : trace_.initialDevices) scheduleNewDevice(d, 0.0);
}

void World::scheduleNewDevice(DeviceId d, double notBefore) {
  DeviceSim sim;
  if (sched_.mode == Schedule::Mode::Synchronous) {
    // Join the global round grid.
    sim.nextFire = std::ceil(notBefore / sched_.basePeriod) * sched_.basePeriod;
  } else {
    sim.nextFire = notBefore + schedRng_.nextDouble() * sched_.basePeriod;
  }
  devices_.emplace(d, std::move(sim));
}

void World::applyDuePerturbations(double upTo) {
  while (nextPerturbation_ < perturbations_.size() &&
         perturbations_[nextPerturbation_].at <= upTo) {
    applyPerturbation(perturbations_[nextPerturbation_]);
    ++nextPerturbation_;
  }
}

void World::applyPerturbation(const Perturbation& p) {
  EnvChange change;
  change.time = p.at;
  change.kind = p.kind;
  std::ostringstream desc;
  switch (p.kind) {
    case Perturbation::Kind::AddDevice: {
      DeviceId d = env_.addDevice(p.pos, p.sensors);
      scheduleNewDevice(d, p.at);
      change.device = d;
      desc << "addDevice " << d << " at (" << formatNum(p.pos.x) << ", "
           << formatNum(p.pos.y) << ")";
      break;
    }
    case Perturbation::Kind::RemoveDevice:
      env_.removeDevice(p.device);
      devices_.erase(p.device);
      roundSnapshot_.erase(p.device);
      roundPending_.erase(std::remove(roundPending_.begin(), roundPending_.end(), p.device),
                          roundPending_.end());
      change.device = p.device;
      desc << "removeDevice " << p.device;
      break;
    case Perturbation::Kind::MoveDevice:
      env_.moveDevice(p.device, p.pos);
      change.device = p.device;
      desc << "moveDevice " << p.device << " to (" << formatNum(p.pos.x) << ", "
           << formatNum(p.pos.y) << ")";
      break;
    case Perturbation::Kind::SetSensor:
      env_.setSensor(p.device, p.sensorName, p.sensorValue);
      change.device = p.device;
      desc << "setSensor " << p.device << " " << p.sensorName << "="
           << p.sensorValue.toString();
      break;
  }
  change.description = desc.str();
  trace_.changes.push_back(std::move(change));
}

std::optional<DeviceId> World::nextToFire() const {
  std::optional<DeviceId> best;
  for (const auto& [d, sim] : devices_) {
    if (!best || sim.nextFire < devices_.at(*best).nextFire) best = d;
  }
  return best;
}

bool World::step() {
  if (stabilizedEarly_) return false;

  if (sched_.mode == Schedule::Mode::Synchronous) {
    if (roundPending_.empty()) {
      // Start the next global round: perturb, then freeze exports so every
      // evaluation in the round reads prior-round state only.
      std::optional<DeviceId> next = nextToFire();
      if (!next) return false;
      double roundTime = devices_.at(*next).nextFire;
      if (roundTime >= horizon_) return false;
      applyDuePerturbations(roundTime);
      now_ = roundTime;
      roundSnapshot_.clear();
      roundPending_.clear();
      for (const auto& [d, sim] : devices_) {
        roundSnapshot_[d] = sim.lastExport;
        if (sim.nextFire <= roundTime) roundPending_.push_back(d);
      }
      if (roundPending_.empty()) return step();
    }
    DeviceId d = roundPending_.front();
    roundPending_.erase(roundPending_.begin());
    fire(d);
    if (roundPending_.empty() && options_.stopOnStabilization && allQuiet())
      stabilizedEarly_ = true;
    return true;
  }

  std::optional<DeviceId> next = nextToFire();
  if (!next) return false;
  double t = devices_.at(*next).nextFire;
  // A perturbation may retire or add devices before this event.
  if (nextPerturbation_ < perturbations_.size() &&
      perturbations_[nextPerturbation_].at <= t) {
    applyDuePerturbations(t);
    return step();
  }
  if (t >= horizon_) return false;
  now_ = t;
  fire(*next);
  if (options_.stopOnStabilization && allQuiet()) stabilizedEarly_ = true;
  return true;
}

void World::fire(DeviceId d) {
  DeviceSim& sim = devices_.at(d);
  double t = sched_.mode == Schedule::Mode::Synchronous ? now_ : sim.nextFire;

  RoundContext ctx;
  ctx.self = d;
  ctx.sensors = env_.sensors(d);
  ctx.prevExport = sim.lastExport.get();
  for (DeviceId n : env_.neighbours(d)) {
    const std::shared_ptr<const ExportTree>* exp = nullptr;
    if (sched_.mode == Schedule::Mode::Synchronous) {
      auto it = roundSnapshot_.find(n);
      if (it != roundSnapshot_.end()) exp = &it->second;
    } else {
      auto it = devices_.find(n);
      if (it != devices_.end()) exp = &it->second.lastExport;
    }
    if (exp && *exp) {
      ctx.nbrExports[n] = exp->get();
      ctx.nbrRanges[n] = env_.distance(d, n);
    }
  }

  EvalOptions evalOpts;
  if (warmRng_) {
    evalOpts.randomizeRepInit = &*warmRng_;
    evalOpts.randomizeRange = options_.warmStartRange;
  }

  RoundResult result;
  try {
    result = evalRound(*program_, ctx, evalOpts);
  } catch (const EvalError& e) {
    std::ostringstream os;
    os << "device " << d << " at t=" << formatNum(t) << " (round " << (sim.seq + 1)
       << "): " << e.what();
    throw SimError(os.str());
  }

  auto exports = std::make_shared<const ExportTree>(std::move(result.exports));

  if (options_.stopOnStabilization) {
    double eps = options_.stopOnStabilization->epsilon;
    if (sim.lastResult && valueApproxEquals(*sim.lastResult, result.result, eps))
      ++sim.quietStreak;
    else
      sim.quietStreak = 0;
  }
  sim.lastResult = result.result;
  sim.lastExport = exports;
  ++sim.seq;

  TraceEvent ev;
  ev.time = t;
  ev.device = d;
  ev.seq = sim.seq;
  ev.result = std::move(result.result);
  ev.exportDigest = exports->digest();
  if (options_.keepExports) ev.exports = exports;
  trace_.events.push_back(std::move(ev));

  if (sched_.mode == Schedule::Mode::Synchronous) {
    sim.nextFire = now_ + sched_.basePeriod;
  } else {
    double u = 2.0 * schedRng_.nextDouble() - 1.0;
    sim.nextFire = sim.nextFire + sched_.basePeriod * (1.0 + sched_.jitter * u);
  }
}

bool World::allQuiet() const {
  if (nextPerturbation_ < perturbations_.size()) return false;
  if (devices_.empty()) return false;
  int k = options_.stopOnStabilization->quietRounds;
  for (const auto& [d, sim] : devices_)
    if (sim.quietStreak < k) return false;
  return true;
}

void World::run() {
  while (step()) {
  }
  if (options_.requireStabilization && options_.stopOnStabilization && !stabilizedEarly_)
    throw SimError("round budget exhausted before stabilization");
}

const ExportTree* World::latestExport(DeviceId d) const {
  auto it = devices_.find(d);
  return it == devices_.end() ? nullptr : it->second.lastExport.get();
}

std::string traceCsv(const Trace& trace) {
  std::ostringstream os;
  os << "time,device,seq,value\n";
  for (const TraceEvent& e : trace.events) {
    os << formatNum(e.time) << "," << e.device << "," << e.seq << ","
       << e.result.toString() << "\n";
  }
  return os.str();
}

}  // namespace fieldc
