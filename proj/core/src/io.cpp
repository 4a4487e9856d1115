#include "oasim/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oasim/serialize.hpp"

namespace oasim::io {

std::string traceToText(const rt::Trace& trace) {
  std::string out;
  out += "oasim-trace v1\n";
  out += "scenario " + trace.scenario + "\n";
  out += "seed " + std::to_string(trace.seed) + "\n";
  for (const auto& [k, v] : trace.toggles) out += "toggle " + k + "=" + v + "\n";
  for (const auto& st : trace.steps) {
    out += "step " + std::to_string(st.index);
    out += " | event=" + toText(st.event);
    out += " | proc=" + st.proc;
    out += " | choice=" + rt::choiceLabelString(st);
    out += " | emits=[";
    for (size_t i = 0; i < st.emitted.size(); ++i) {
      if (i) out += ';';
      out += toText(st.emitted[i]);
    }
    out += "] | bindings={";
    for (size_t i = 0; i < st.bindings.size(); ++i) {
      if (i) out += ',';
      out += "ν" + std::to_string(st.bindings[i].first) + ":" +
             toText(st.bindings[i].second);
    }
    out += "}";
    if (st.stutter) out += " | stutter";
    out += "\n";
  }
  return out;
}

uint64_t traceHash(const rt::Trace& trace) { return fnv1a(traceToText(trace)); }

namespace {

std::string_view fieldOf(std::string_view line, std::string_view key) {
  size_t p = line.find(key);
  if (p == std::string_view::npos) return {};
  p += key.size();
  size_t end = line.find(" | ", p);
  if (end == std::string_view::npos) end = line.size();
  return line.substr(p, end - p);
}

}  // namespace

TraceFile parseTraceText(const std::string& text) {
  TraceFile tf;
  std::istringstream in(text);
  std::string line;
  bool headerSeen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("oasim-trace", 0) == 0) {
      headerSeen = true;
      continue;
    }
    if (line.rfind("scenario ", 0) == 0) {
      tf.scenario = line.substr(9);
      continue;
    }
    if (line.rfind("seed ", 0) == 0) {
      tf.seed = std::stoull(line.substr(5));
      continue;
    }
    if (line.rfind("toggle ", 0) == 0) {
      std::string kv = line.substr(7);
      size_t eq = kv.find('=');
      if (eq != std::string::npos) tf.toggles.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      continue;
    }
    if (line.rfind("step ", 0) != 0) continue;
    rt::ReplayStep rs;
    rs.proc = std::string(fieldOf(line, "proc="));
    std::string choice(fieldOf(line, "choice="));
    if (choice.empty() || rs.proc.empty()) throw std::runtime_error("bad trace line: " + line);
    std::vector<std::string> parts;
    size_t start = 0;
    while (start <= choice.size()) {
      size_t dot = choice.find('.', start);
      if (dot == std::string::npos) dot = choice.size();
      parts.push_back(choice.substr(start, dot - start));
      start = dot + 1;
    }
    if (parts.empty()) throw std::runtime_error("bad choice label");
    if (parts[0] == "t") {
      rs.trigger = true;
    } else if (parts[0].size() > 1 && parts[0][0] == 'e') {
      rs.trigger = false;
      rs.poolIndex = std::stoul(parts[0].substr(1));
    } else {
      throw std::runtime_error("bad choice label: " + choice);
    }
    for (size_t i = 1; i < parts.size(); ++i)
      if (!parts[i].empty()) rs.ints.push_back(std::stoi(parts[i]));
    tf.steps.push_back(std::move(rs));
  }
  if (!headerSeen) throw std::runtime_error("not a trace file");
  return tf;
}

std::string verdictsToText(const props::VerdictSet& v) {
  std::string out;
  out += "oasim-verdicts v1\n";
  for (const auto& pv : v.verdicts) {
    out += "property " + pv.property + " | holds=" + (pv.holds ? "true" : "false");
    if (pv.witness) {
      out += " | step=" + std::to_string(pv.witness->step);
      out += " | term=" + toText(pv.witness->term);
      out += " | recipe=" + toText(pv.witness->recipe);
      out += " | roles=" + pv.witness->roles;
    }
    out += "\n";
  }
  return out;
}

std::string reportToText(const rt::ExplorationReport& r, const std::string& scenario, int depth,
                         int branch) {
  std::string out;
  out += "oasim-report v1\n";
  out += "scenario " + scenario + "\n";
  out += "depth " + std::to_string(depth) + "\n";
  out += "branch " + std::to_string(branch) + "\n";
  out += "visited " + std::to_string(r.visitedConfigs) + "\n";
  out += "steps " + std::to_string(r.executedSteps) + "\n";
  out += "dedup " + std::to_string(r.dedupHits) + "\n";
  out += "stepLimitHit " + std::string(r.stepLimitHit ? "true" : "false") + "\n";
  out += "violations " + std::to_string(r.violations.size()) + "\n";
  for (const auto& v : r.violations) {
    out += "violation " + v.property + " depth=" + std::to_string(v.depth) + " roles=" + v.roles +
           " schedule=";
    for (size_t i = 0; i < v.schedule.size(); ++i) {
      const auto& st = v.schedule[i];
      if (i) out += ';';
      out += st.proc + (st.trigger ? ":t" : ":e" + std::to_string(st.poolIndex));
      for (int x : st.ints) out += "." + std::to_string(x);
    }
    out += "\n";
  }
  return out;
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

std::string readFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace oasim::io
