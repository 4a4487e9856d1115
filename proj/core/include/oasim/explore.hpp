#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oasim/properties.hpp"
#include "oasim/registry.hpp"
#include "oasim/runtime.hpp"

namespace oasim::rt {

struct ExplorationViolation {
  std::string property;
  std::string roles;
  int depth = 0;
  std::vector<ReplayStep> schedule;  // replays to a witness trace
};

struct ExplorationReport {
  uint64_t executedSteps = 0;
  uint64_t visitedConfigs = 0;
  uint64_t dedupHits = 0;
  bool stepLimitHit = false;
  std::vector<ExplorationViolation> violations;
};

struct ExploreOptions {
  int depth = 8;
  int branch = 4;           // per-decision-point fanout cap
  bool webAttackerSystem = true;
  size_t maxViolations = 8;
  uint64_t stepLimit = 200'000'000;
};

// Depth-first enumeration of every (event, process, choice-vector) schedule
// up to the bounds, deduplicating configurations by canonical hash and
// running the property monitors after each step.
ExplorationReport explore(const System& sys, const Configuration& initial,
                          const harness::Registry& reg, const ExploreOptions& opts);

}  // namespace oasim::rt
