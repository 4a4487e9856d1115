// Command-line front end: run the canned scenarios, explore the fixed
// configuration, check properties on recorded traces and replay traces.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oasim/io.hpp"
#include "oasim/scenario.hpp"
#include "oasim/serialize.hpp"

namespace fs = std::filesystem;
using namespace oasim;

namespace {

std::vector<std::pair<std::string, std::string>> parseToggles(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& t : raw) {
    size_t eq = t.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--toggle", "expected key=value");
    out.emplace_back(t.substr(0, eq), t.substr(eq + 1));
  }
  return out;
}

std::string scenarioConfigText(const harness::Scenario& sc) {
  std::string out = "scenario " + sc.name + "\n";
  out += "attacker " + std::string(sc.webAttackerSystem ? "web" : "network") + "\n";
  for (const auto& [k, v] : sc.registry->toggles.asKeyValues()) out += k + " " + v + "\n";
  for (const auto& p : sc.registry->parties) {
    out += "party " + p.id;
    for (const auto& d : p.domains) out += " " + d;
    out += "\n";
  }
  return out;
}

int cmdRun(const std::string& name, uint64_t seed, size_t maxSteps,
           const std::vector<std::string>& togglesRaw, const std::string& outDir) {
  harness::Scenario sc = harness::buildScenario(name, parseToggles(togglesRaw));
  harness::RunOutcome out = harness::runScenario(sc, seed, maxSteps);
  if (!outDir.empty()) {
    fs::create_directories(outDir);
    io::writeFile(outDir + "/trace.txt", io::traceToText(out.trace));
    io::writeFile(outDir + "/verdicts.txt", io::verdictsToText(out.verdicts));
    io::writeFile(outDir + "/scenario.txt", scenarioConfigText(sc));
  }
  std::cout << "scenario " << name << ": " << out.trace.steps.size() << " steps, trace hash "
            << io::traceHash(out.trace) << "\n";
  for (const auto& v : out.verdicts.verdicts)
    std::cout << "  " << v.property << ": " << (v.holds ? "holds" : "VIOLATED")
              << (v.witness && !v.holds ? " @step " + std::to_string(v.witness->step) : "")
              << "\n";
  std::cout << (out.matchesExpectation ? "expected outcome reached"
                                       : "UNEXPECTED outcome (see verdicts)")
            << "\n";
  return out.matchesExpectation ? 0 : 1;
}

int cmdExplore(const std::string& name, int depth, int branch,
               const std::vector<std::string>& togglesRaw, const std::string& outDir) {
  harness::Scenario sc = harness::buildScenario(name, parseToggles(togglesRaw));
  rt::ExplorationReport rep = harness::exploreScenario(sc, depth, branch);
  std::string text = io::reportToText(rep, name, depth, branch);
  if (!outDir.empty()) {
    fs::create_directories(outDir);
    io::writeFile(outDir + "/report.txt", text);
  }
  std::cout << text;
  bool expectNone = sc.expectedViolations.empty();
  bool gotNone = rep.violations.empty();
  return (expectNone == gotNone) ? 0 : 1;
}

int cmdCheck(const std::string& tracePath, const std::string& property) {
  io::TraceFile tf = io::parseTraceText(io::readFile(tracePath));
  harness::Scenario sc = harness::buildScenario(tf.scenario, tf.toggles);
  rt::Trace trace = harness::replayRun(sc, tf.steps);
  trace.seed = tf.seed;
  props::VerdictSet all = props::evaluateAll(trace, *sc.registry, sc.webAttackerSystem);
  const props::PropertyVerdict* v = all.find(property);
  if (!v) {
    std::cerr << "unknown property: " << property << "\n";
    return 2;
  }
  std::cout << v->property << ": " << (v->holds ? "holds" : "VIOLATED") << "\n";
  if (v->witness && !v->holds) {
    std::cout << "  witness step " << v->witness->step << "\n";
    std::cout << "  term " << toText(v->witness->term) << "\n";
    std::cout << "  recipe " << toText(v->witness->recipe) << "\n";
    std::cout << "  recipe verified: "
              << (props::verifyWitness(trace, *sc.registry, *v) ? "yes" : "NO") << "\n";
  }
  return 0;
}

int cmdReplay(const std::string& tracePath) {
  std::string original = io::readFile(tracePath);
  io::TraceFile tf = io::parseTraceText(original);
  harness::Scenario sc = harness::buildScenario(tf.scenario, tf.toggles);
  rt::Trace trace = harness::replayRun(sc, tf.steps);
  trace.seed = tf.seed;
  std::string replayed = io::traceToText(trace);
  bool identical = replayed == original;
  std::cout << "replayed " << trace.steps.size() << " steps, hash " << fnv1a(replayed)
            << (identical ? " (byte-identical)" : " (MISMATCH)") << "\n";
  return identical ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dolev-Yao OAuth 2.0 web-model simulator"};
  app.require_subcommand(1);

  std::string scenario, outDir, tracePath, property;
  std::vector<std::string> toggles;
  uint64_t seed = 0;
  size_t maxSteps = 200;
  int depth = 8, branch = 4;

  auto* run = app.add_subcommand("run", "run a scenario's scripted or seeded schedule");
  run->add_option("--scenario", scenario, "scenario name")->required();
  run->add_option("--seed", seed, "random seed for seeded scenarios");
  run->add_option("--max-steps", maxSteps, "processing step budget");
  run->add_option("--toggle", toggles, "override a fix toggle, key=value");
  run->add_option("--out", outDir, "directory for trace/verdict files");

  auto* explore = app.add_subcommand("explore", "bounded exhaustive exploration");
  explore->add_option("--scenario", scenario, "scenario name")->required();
  explore->add_option("--depth", depth, "schedule depth bound");
  explore->add_option("--branch", branch, "per-decision-point fanout bound");
  explore->add_option("--toggle", toggles, "override a fix toggle, key=value");
  explore->add_option("--out", outDir, "directory for the report file");

  auto* check = app.add_subcommand("check", "evaluate one property on a recorded trace");
  check->add_option("--trace", tracePath, "trace file")->required();
  check->add_option("--property", property, "property name")->required();

  auto* replay = app.add_subcommand("replay", "re-execute a trace and compare serializations");
  replay->add_option("--trace", tracePath, "trace file")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmdRun(scenario, seed, maxSteps, toggles, outDir);
    if (explore->parsed()) return cmdExplore(scenario, depth, branch, toggles, outDir);
    if (check->parsed()) return cmdCheck(tracePath, property);
    if (replay->parsed()) return cmdReplay(tracePath);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
