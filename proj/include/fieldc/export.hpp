#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fieldc/value.hpp"

namespace fieldc {

// One alignment key: a sibling slot index, or a function-identity tag when
// evaluation enters a function body.
using PathKey = std::variant<int, std::string>;

using Path = std::vector<PathKey>;

std::string pathToString(const Path& p);

// The path-indexed value tree a device publishes each round. Entries exist
// exactly at the rep and nbr paths visited during that round.
class ExportTree {
 public:
  void put(const Path& p, Value v) { entries_.insert_or_assign(p, std::move(v)); }

  const Value* find(const Path& p) const {
    auto it = entries_.find(p);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const std::map<Path, Value>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  uint64_t digest() const;

  bool operator==(const ExportTree& o) const;

 private:
  std::map<Path, Value> entries_;
};

// Everything one round of one device may read: its own sensors, its previous
// export, and the latest export (plus distance) of each current neighbour.
struct RoundContext {
  DeviceId self = 0;
  std::map<std::string, Value> sensors;
  const ExportTree* prevExport = nullptr;             // own last round, if any
  std::map<DeviceId, const ExportTree*> nbrExports;   // excludes self
  std::map<DeviceId, double> nbrRanges;               // keys match nbrExports
};

}  // namespace fieldc
