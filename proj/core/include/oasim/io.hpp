#pragma once

#include <string>
#include <vector>

#include "oasim/explore.hpp"
#include "oasim/properties.hpp"
#include "oasim/runtime.hpp"

namespace oasim::io {

// Line format per processing step:
//   step <i> | event=<term> | proc=<id> | choice=<label> | emits=[t;t] | bindings={nu_i:n_j}
// preceded by a header carrying scenario, seed and toggles.
std::string traceToText(const rt::Trace& trace);
uint64_t traceHash(const rt::Trace& trace);

struct TraceFile {
  std::string scenario;
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> toggles;
  std::vector<rt::ReplayStep> steps;
};

TraceFile parseTraceText(const std::string& text);

std::string verdictsToText(const props::VerdictSet& v);
std::string reportToText(const rt::ExplorationReport& r, const std::string& scenario, int depth,
                         int branch);

void writeFile(const std::string& path, const std::string& content);
std::string readFile(const std::string& path);

}  // namespace oasim::io
