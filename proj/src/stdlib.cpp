#include "fieldc/stdlib.hpp"

#include <sstream>
#include <stdexcept>

#include "fieldc/parser.hpp"

namespace fieldc {

namespace {

// Kept as plain source so that --dump-stdlib emits exactly what runs and the
// composition claim (blocks are ordinary library code) stays honest.
const char* const kStdlibSource = R"FC(// fieldc standard library

def first(a, b) { a }
def second(a, b) { b }
def add(a, b) { a + b }
def identity(x) { x }
def hasNeighbours() { anyHood(nbr{true}) }

// Distance to the nearest source device, following the triangle inequality.
def distance(source) {
    rep(infinity) {
        (d) => mux(source, 0, minHood(nbrRange() + nbr{d}))
    }
}

// Running minimum of field over space and time. Deliberately not
// self-stabilizing: a transient low value is gossiped forever.
def gossipMin(field) {
    rep(infinity) {
        (v) => min(field, minHood(nbr{v}))
    }
}

// Hop-count estimate of distance to the nearest source.
def hopCountDistance(source) {
    rep(infinity) {
        (d) => mux(source, 0, minHood(nbr{d} + 1))
    }
}

// G: spread init outward from the sources along minimal-metric paths,
// accumulating en route. State is (distance, parent id, value); candidates
// order lexicographically, so equal distances break toward the smallest
// neighbour id.
def G(source, init, metric, accumulate) {
    get(rep(tuple(infinity, uid(), init)) {
        (dv) => mux(source,
                    tuple(0, uid(), init),
                    mux(hasNeighbours(),
                        minHood(tuple(metric() + get(nbr{dv}, 0),
                                      nbrUid(),
                                      accumulate(get(nbr{dv}, 2), metric()))),
                        tuple(infinity, uid(), init)))
    }, 2)
}

// Id of the strictly-lower-potential neighbour this device contributes to,
// or -1 at a local minimum (ties break toward the smallest id).
def parentOf(potential) {
    get(mux(anyHood(nbr{potential} < potential),
            minHood(tuple(nbr{potential}, nbrUid())),
            tuple(infinity, -1)),
        1)
}

// C: collect local values down the potential gradient. Each device combines
// its own local value with the values of neighbours whose parent it is.
def C(potential, accumulate, local, null) {
    rep(local) {
        (v) => accumulate(local,
                          foldHood(accumulate, null,
                                   mux(nbr{parentOf(potential)} == uid(), nbr{v}, null)))
    }
}

// T: decay initial toward floor, clamped so the value never rises.
def T(initial, floor, decay) {
    rep(initial) {
        (x) => max(floor, min(x, decay(x)))
    }
}

def broadcast(source, value) { G(source, value, nbrRange, first) }

def summarize(sink, accumulate, local, null) {
    broadcast(sink, C(G(sink, 0, nbrRange, add), accumulate, local, null))
}

// Replicated-gossip plumbing. Devices share a round clock (max over the
// neighbourhood plus one); each replica slot restarts when the clock crosses
// its stagger offset, and values only flow between devices whose slot
// belongs to the same restart instance.
def rgClock(r) { max(r, maxHood(nbr{r})) + 1 }
def rgStart(r, offset, period) { r - mod(r - offset, period) }
def rgSlot(field, rPrev, rNew, vPrev, offset, period) {
    min(field,
        min(mux(rgStart(rNew, offset, period) == rgStart(rPrev, offset, period),
                vPrev, infinity),
            minHood(mux(rgStart(nbr{rPrev}, offset, period) == rgStart(rNew, offset, period),
                        nbr{vPrev}, infinity))))
}
)FC";

}  // namespace

const std::string& stdlibSource() {
  static const std::string src = kStdlibSource;
  return src;
}

std::string replicatedGossipDef(int k, int p) {
  if (k < 1) throw std::invalid_argument("replicatedGossip: k must be >= 1");
  if (p < 1) throw std::invalid_argument("replicatedGossip: p must be >= 1");
  if (k == 1) return "def replicatedGossip(field) { gossipMin(field) }\n";

  int s = std::max(1, p / k);   // stagger interval in rounds
  int period = k * s;           // replica lifetime

  std::ostringstream os;
  os << "def replicatedGossip(field) {\n";
  os << "    ((st) => get(st, 1 + mod(floor(get(st, 0) / " << s << ") + 1, " << k << ")))(\n";
  os << "        rep(tuple(0";
  for (int i = 0; i < k; ++i) os << ", infinity";
  os << ")) {\n";
  os << "            (st) => ((r0) => ((r1) => tuple(r1";
  for (int i = 0; i < k; ++i)
    os << ",\n                rgSlot(field, r0, r1, get(st, " << (i + 1) << "), "
       << (i * s) << ", " << period << ")";
  os << "))(rgClock(r0)))(get(st, 0))\n";
  os << "        })\n";
  os << "}\n";
  return os.str();
}

Program loadProgram(const std::string& source, const std::string& filename,
                    const std::string& extraDefs) {
  Program lib = parse(stdlibSource(), "<stdlib>");
  Program combined = std::move(lib);

  if (!extraDefs.empty()) {
    Program extra = parse(extraDefs, "<generated>", &combined.defs);
    for (Def& d : extra.defs) combined.defs.push_back(std::move(d));
  }

  combined.defIndex.clear();
  for (size_t i = 0; i < combined.defs.size(); ++i)
    combined.defIndex[combined.defs[i].name] = i;

  Program user = parse(source, filename, &combined.defs);
  for (Def& d : user.defs) {
    if (combined.defIndex.count(d.name))
      throw ParseError(filename, d.line, d.col,
                       "definition '" + d.name + "' collides with the standard library");
    combined.defs.push_back(std::move(d));
  }
  combined.main = std::move(user.main);

  combined.defIndex.clear();
  for (size_t i = 0; i < combined.defs.size(); ++i)
    combined.defIndex[combined.defs[i].name] = i;
  return combined;
}

}  // namespace fieldc
