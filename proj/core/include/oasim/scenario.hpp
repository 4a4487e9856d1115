#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oasim/attacker.hpp"
#include "oasim/browser.hpp"
#include "oasim/explore.hpp"
#include "oasim/properties.hpp"
#include "oasim/registry.hpp"
#include "oasim/runtime.hpp"

namespace oasim::harness {

// One scripted schedule entry: deliver the first matching pool event (or a
// trigger) to `proc`, resolving choices by label.
struct DirectorStep {
  enum class Sel { Trigger, AnyTo, DnsRequest, HttpsToHost };
  Sel sel = Sel::AnyTo;
  std::string proc;
  std::string host;  // HttpsToHost: destination domain
  std::string path;  // optional path filter for HttpsToHost
  std::vector<std::pair<std::string, int>> choices;
};

struct Scenario {
  std::string name;
  std::shared_ptr<Registry> registry;
  rt::System system;
  rt::Configuration initial;
  bool webAttackerSystem = false;
  std::vector<DirectorStep> schedule;
  std::vector<std::string> expectedViolations;  // exact set of violated properties
  std::vector<std::string> triggerable;         // parties the seeded policy may trigger
};

const std::vector<std::string>& scenarioNames();

// Builds one of the canned scenarios, applying toggle overrides before the
// dependent structures (registrations, menus, schedule) are derived.
Scenario buildScenario(const std::string& name,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Runs the scripted schedule (or a seeded run when the scenario has no
// schedule), evaluates every applicable property and compares the violated
// set against the scenario's expectation.
struct RunOutcome {
  rt::Trace trace;
  props::VerdictSet verdicts;
  std::vector<std::string> violated;
  bool matchesExpectation = false;
};

RunOutcome runScenario(const Scenario& sc, uint64_t seed, size_t maxSteps);

rt::ExplorationReport exploreScenario(const Scenario& sc, int depth, int branch);

// Scripted replay of a recorded trace (see io.hpp for the file format).
rt::Trace replayRun(const Scenario& sc, const std::vector<rt::ReplayStep>& steps);

class DirectorPolicy : public rt::Policy {
 public:
  explicit DirectorPolicy(const Scenario& sc) : sc_(sc) {}
  bool next(const rt::Configuration& cfg, const rt::System& sys, rt::Decision& d,
            std::unique_ptr<rt::Chooser>& ch) override;
  size_t skipped() const { return skipped_; }

 private:
  const Scenario& sc_;
  size_t pos_ = 0;
  size_t skipped_ = 0;
};

}  // namespace oasim::harness
