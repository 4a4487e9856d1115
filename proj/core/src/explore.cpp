#include "oasim/explore.hpp"

#include "oasim/serialize.hpp"

#include <map>
#include <unordered_map>

namespace oasim::rt {

namespace {

// Structural equality; cheap because untouched state terms share nodes.
bool configsEqual(const Configuration& a, const Configuration& b) {
  if (a.pool.size() != b.pool.size()) return false;
  for (size_t i = 0; i < a.pool.size(); ++i)
    if (!(a.pool[i].event == b.pool[i].event)) return false;
  for (const auto& [id, st] : a.states) {
    auto it = b.states.find(id);
    if (it == b.states.end() || !(st == it->second)) return false;
  }
  return true;
}

// Follows a fixed prefix, then picks 0; records fanouts so the caller can
// schedule sibling prefixes.
class EnumChooser : public Chooser {
 public:
  EnumChooser(const std::vector<int>& prefix, int branch) : prefix_(prefix), branch_(branch) {}
  size_t pick(size_t n, std::string_view) override {
    if (n == 0) throw NoBranch{};
    size_t eff = std::min(n, static_cast<size_t>(branch_));
    size_t v = 0;
    if (pos_ < prefix_.size()) v = std::min(static_cast<size_t>(prefix_[pos_]), eff - 1);
    taken_.push_back(static_cast<int>(v));
    fanouts_.push_back(eff);
    ++pos_;
    return v;
  }
  const std::vector<int>& taken() const { return taken_; }
  const std::vector<size_t>& fanouts() const { return fanouts_; }
  size_t prefixLen() const { return prefix_.size(); }

 private:
  std::vector<int> prefix_;
  int branch_;
  size_t pos_ = 0;
  std::vector<int> taken_;
  std::vector<size_t> fanouts_;
};

// All outcomes of one relation on one (state, event) pair, every choice
// vector enumerated up to the branch bound. Memoized globally: the same
// pair recurs across sibling configurations constantly.
struct RelationLeaves {
  struct Leaf {
    std::vector<int> ints;
    RelationResult res;
  };
  std::vector<Leaf> leaves;  // NoBranch outcomes omitted
  std::shared_ptr<const void> stateAnchor, eventAnchor;
};

struct Dfs {
  const System& sys;
  const harness::Registry& reg;
  const ExploreOptions& opts;
  ExplorationReport report;
  std::unordered_map<uint64_t, int> visited;  // canonical hash -> shallowest depth seen
  Trace trace;
  std::vector<ReplayStep> path;
  std::string attackerProc;
  std::map<std::pair<const void*, const void*>, std::shared_ptr<RelationLeaves>> relCache;

  const RelationLeaves& enumerate(size_t procIdx, const Term& state, const Term& event) {
    auto key = std::make_pair(state.nodeId(), event.nodeId());
    auto it = relCache.find(key);
    if (it != relCache.end()) return *it->second;
    auto out = std::make_shared<RelationLeaves>();
    out->stateAnchor = state.nodeAnchor();
    out->eventAnchor = event.nodeAnchor();
    const Relation& rel = *sys.procs[procIdx].relation;
    std::vector<std::vector<int>> prefixes{{}};
    while (!prefixes.empty()) {
      std::vector<int> prefix = std::move(prefixes.back());
      prefixes.pop_back();
      EnumChooser ch(prefix, opts.branch);
      ++report.executedSteps;
      bool ok = true;
      RelationResult res;
      try {
        res = rel.apply(event, state, ch);
      } catch (const NoBranch&) {
        ok = false;
      }
      for (size_t i = ch.prefixLen(); i < ch.fanouts().size(); ++i) {
        for (size_t v = 1; v < ch.fanouts()[i]; ++v) {
          std::vector<int> sibling(ch.taken().begin(), ch.taken().begin() + i);
          sibling.push_back(static_cast<int>(v));
          prefixes.push_back(std::move(sibling));
        }
      }
      if (ok) out->leaves.push_back({ch.taken(), std::move(res)});
    }
    return *relCache.emplace(key, std::move(out)).first->second;
  }

  bool budget() const {
    return report.executedSteps < opts.stepLimit &&
           report.violations.size() < opts.maxViolations;
  }

  void checkProperties(const ProcessingStep& step) {
    for (const auto& v :
         props::checkAtStep(trace, reg, step.index, opts.webAttackerSystem)) {
      report.violations.push_back(
          {v.property, v.witness ? v.witness->roles : "", static_cast<int>(path.size()), path});
    }
  }

  void go(const Configuration& cfg, int depth) {
    if (!budget() || depth >= opts.depth) return;
    trimSerializationCache(1000000);
    uint64_t h = canonicalConfigHash(cfg);
    auto [it, fresh] = visited.try_emplace(h, depth);
    if (!fresh && it->second <= depth) {
      ++report.dedupHits;
      return;
    }
    it->second = depth;
    ++report.visitedConfigs;

    std::vector<Decision> decisions;
    for (size_t i = 0; i < cfg.pool.size(); ++i) {
      const Term& to = cfg.pool[i].event.at(0);
      for (size_t p = 0; p < sys.procs.size(); ++p) {
        const Process& pr = sys.procs[p];
        bool owns = false;
        for (const Term& adr : pr.addresses)
          if (adr == to) owns = true;
        if (owns || pr.kind == PartyKind::NetworkAttacker)
          decisions.push_back({false, i, p});
      }
    }
    for (size_t p = 0; p < sys.procs.size(); ++p)
      if (!sys.procs[p].addresses.empty()) decisions.push_back({true, 0, p});

    for (const Decision& d : decisions) {
      const Term event = decisionEvent(sys, cfg, d);
      const Term& state = cfg.states.at(sys.procs[d.procIndex].id);
      const RelationLeaves& leaves = enumerate(d.procIndex, state, event);
      for (const auto& leaf : leaves.leaves) {
        if (!budget()) break;
        Configuration next = cfg;
        size_t stepsBefore = trace.steps.size();
        applyPrepared(sys, next, d, leaf.res, leaf.ints, trace);
        ++report.executedSteps;
        const ProcessingStep& st = trace.steps.back();
        std::vector<uint64_t> docsAdded;
        for (const Term& dn : st.meta.docsCreated)
          if (dn.isNonce()) docsAdded.push_back(dn.nonceId());
        if (!configsEqual(cfg, next)) {
          path.push_back({d.trigger, d.poolIndex, sys.procs[d.procIndex].id, leaf.ints});
          checkProperties(st);
          go(next, depth + 1);
          path.pop_back();
        }
        trace.steps.resize(stepsBefore);
        for (uint64_t id : docsAdded) trace.docProvenance.erase(id);
      }
    }
    if (report.executedSteps >= opts.stepLimit) report.stepLimitHit = true;
  }
};

}  // namespace

ExplorationReport explore(const System& sys, const Configuration& initial,
                          const harness::Registry& reg, const ExploreOptions& opts) {
  Dfs dfs{sys, reg, opts, {}, {}, {}, {}, ""};
  for (const auto& p : reg.parties)
    if (isAttacker(p.kind)) dfs.attackerProc = p.id;
  dfs.trace.initial = initial;
  if (opts.depth > 0) dfs.go(initial, 0);
  return dfs.report;
}

}  // namespace oasim::rt
