#pragma once

#include <string>

#include "fieldc/ast.hpp"

namespace fieldc {

// Standard library source: building blocks G, C, T, the reference programs
// (distance, gossipMin, hopCountDistance), broadcast/summarize, and the
// shared helpers for replicated gossip.
const std::string& stdlibSource();

// Generates `def replicatedGossip(field) { ... }` for k time-staggered
// gossipMin replicas with a lifetime of about p rounds (restarts every
// floor(p/k) rounds, clamped to at least 1). k = 1 degenerates to plain
// gossipMin. Requires k >= 1 and p >= 1.
std::string replicatedGossipDef(int k, int p);

// Parses `source` with the standard library in scope and returns a single
// program holding both. `extraDefs` (e.g. a generated replicatedGossip) is
// spliced between the library and the user source.
Program loadProgram(const std::string& source, const std::string& filename = "",
                    const std::string& extraDefs = "");

}  // namespace fieldc
