#include "oasim/runtime.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "oasim/serialize.hpp"
#include "oasim/wire.hpp"

namespace oasim::rt {

Term triggerMsg() { static const Term t = Term::str("TRIGGER"); return t; }
Term corruptMsg() { static const Term t = Term::str("CORRUPT"); return t; }
Term fullCorruptMsg() { static const Term t = Term::str("FULLCORRUPT"); return t; }
Term closeCorruptMsg() { static const Term t = Term::str("CLOSECORRUPT"); return t; }

bool isAttacker(PartyKind k) {
  return k == PartyKind::NetworkAttacker || k == PartyKind::WebAttacker;
}

size_t ScriptedChooser::pick(size_t n, std::string_view label) {
  if (n == 0) throw NoBranch{};
  used_.resize(byLabel_.size(), false);
  for (size_t i = 0; i < byLabel_.size(); ++i) {
    if (!used_[i] && byLabel_[i].first == label) {
      used_[i] = true;
      size_t v = static_cast<size_t>(byLabel_[i].second);
      if (v >= n) throw std::runtime_error("scripted choice out of range for " + std::string(label));
      return v;
    }
  }
  return 0;
}

size_t IntChooser::pick(size_t n, std::string_view) {
  if (n == 0) throw NoBranch{};
  if (pos_ >= ints_.size()) return 0;
  size_t v = static_cast<size_t>(ints_[pos_++]);
  if (v >= n) throw std::runtime_error("replayed choice out of range");
  return v;
}

size_t SeededChooser::pick(size_t n, std::string_view) {
  if (n == 0) throw NoBranch{};
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng_);
}

size_t RecordingChooser::pick(size_t n, std::string_view label) {
  size_t v = inner_.pick(n, label);
  ints_.push_back(static_cast<int>(v));
  fanouts_.push_back(n);
  return v;
}

const Process* System::find(const ProcId& id) const {
  for (const Process& p : procs)
    if (p.id == id) return &p;
  return nullptr;
}

int System::indexOf(const ProcId& id) const {
  for (size_t i = 0; i < procs.size(); ++i)
    if (procs[i].id == id) return static_cast<int>(i);
  return -1;
}

namespace {

bool ownsAddress(const Process& p, const Term& a) {
  return std::any_of(p.addresses.begin(), p.addresses.end(),
                     [&](const Term& x) { return x == a; });
}

Term substituteMetaTerm(const Term& t, const std::vector<std::pair<uint32_t, Term>>& b) {
  return substituteProcessVars(t, b);
}

}  // namespace

Term decisionEvent(const System& sys, const Configuration& cfg, const Decision& d) {
  const Process& proc = sys.procs.at(d.procIndex);
  if (d.trigger) {
    if (proc.addresses.empty()) throw std::runtime_error("trigger for addressless process");
    const Term& a = proc.addresses.front();
    return Term::seq({a, a, triggerMsg()});
  }
  if (d.poolIndex >= cfg.pool.size()) throw std::runtime_error("pool index out of range");
  return cfg.pool[d.poolIndex].event;
}

void applyPrepared(const System& sys, Configuration& cfg, const Decision& d,
                   const RelationResult& res, const std::vector<int>& choiceInts, Trace& out) {
  const Process& proc = sys.procs.at(d.procIndex);
  Term event = decisionEvent(sys, cfg, d);
  int64_t producer = d.trigger ? -1 : cfg.pool[d.poolIndex].producer;

  ProcessingStep step;
  step.index = static_cast<int64_t>(out.steps.size());
  step.event = event;
  step.eventProducer = producer;
  step.proc = proc.id;
  step.viaTrigger = d.trigger;
  step.poolIndex = d.poolIndex;
  step.choiceInts = choiceInts;
  step.meta = res.meta;

  // Bind fresh nonces for the process placeholders appearing in the
  // outputs and the new state, in ascending placeholder order.
  std::vector<uint32_t> vars;
  {
    std::vector<Term> all = res.events;
    all.push_back(res.state);
    vars = collectVars(Term::seq(std::move(all)), VarKind::Process);
  }
  std::vector<std::pair<uint32_t, Term>> bindings;
  bindings.reserve(vars.size());
  for (uint32_t v : vars) bindings.emplace_back(v, cfg.freshNonce());
  step.bindings = bindings;

  Term newState = substituteProcessVars(res.state, bindings);
  std::vector<Term> emitted;
  for (const Term& e : res.events) {
    Term g = substituteProcessVars(e, bindings);
    if (!g.ground()) throw std::runtime_error("emitted event is not ground");
    if (!g.isSeq() || g.size() != 3) throw std::runtime_error("emitted term is not an event");
    if (proc.kind != PartyKind::NetworkAttacker && !ownsAddress(proc, g.at(1))) {
      step.meta.rejected.push_back(g);  // sender spoofing rejected by the runtime
      continue;
    }
    emitted.push_back(std::move(g));
  }
  step.emitted = emitted;

  // Substitute placeholders inside the recorded metadata as well.
  for (Term& dn : step.meta.docsCreated) dn = substituteMetaTerm(dn, bindings);
  if (step.meta.mint) {
    step.meta.mint->token = substituteMetaTerm(step.meta.mint->token, bindings);
    step.meta.mint->user = substituteMetaTerm(step.meta.mint->user, bindings);
    step.meta.mint->idpDomain = substituteMetaTerm(step.meta.mint->idpDomain, bindings);
  }

  // Pool update: emitted events prepended, consumed event removed.
  std::vector<PoolEvent> pool;
  pool.reserve(cfg.pool.size() + emitted.size());
  for (const Term& e : emitted) pool.push_back(PoolEvent{e, step.index});
  for (size_t i = 0; i < cfg.pool.size(); ++i) {
    if (!d.trigger && i == d.poolIndex) continue;
    pool.push_back(cfg.pool[i]);
  }
  cfg.pool = std::move(pool);
  cfg.states[proc.id] = newState;

  for (const Term& dn : step.meta.docsCreated)
    if (dn.isNonce()) out.docProvenance[dn.nonceId()] = producer;

  step.post = cfg;
  out.steps.push_back(std::move(step));
}

bool applyStep(const System& sys, Configuration& cfg, const Decision& d, Chooser& ch, Trace& out) {
  const Process& proc = sys.procs.at(d.procIndex);
  Term event = decisionEvent(sys, cfg, d);
  const Term& recvAddr = event.at(0);
  if (proc.kind != PartyKind::NetworkAttacker && !ownsAddress(proc, recvAddr))
    throw std::runtime_error(proc.id + " does not listen on " + toText(recvAddr));

  RecordingChooser rec(ch);
  RelationResult res;
  bool stutter = false;
  try {
    res = proc.relation->apply(event, cfg.states.at(proc.id), rec);
  } catch (const NoBranch&) {
    stutter = true;
  }
  if (stutter) {
    ProcessingStep step;
    step.index = static_cast<int64_t>(out.steps.size());
    step.event = event;
    step.eventProducer = d.trigger ? -1 : cfg.pool[d.poolIndex].producer;
    step.proc = proc.id;
    step.viaTrigger = d.trigger;
    step.poolIndex = d.poolIndex;
    step.choiceInts = rec.ints();
    step.stutter = true;
    step.post = cfg;
    out.steps.push_back(std::move(step));
    return false;
  }
  applyPrepared(sys, cfg, d, res, rec.ints(), out);
  return true;
}

Trace run(const System& sys, Configuration initial, Policy& policy, size_t maxSteps) {
  Trace t;
  t.initial = initial;
  Configuration cfg = std::move(initial);
  for (size_t i = 0; i < maxSteps; ++i) {
    Decision d;
    std::unique_ptr<Chooser> ch;
    if (!policy.next(cfg, sys, d, ch)) break;
    applyStep(sys, cfg, d, *ch, t);
    policy.onStep(t);
  }
  return t;
}

SeededPolicy::SeededPolicy(uint64_t seed, std::vector<ProcId> triggerable)
    : rng_(seed), triggerable_(std::move(triggerable)) {}

bool SeededPolicy::next(const Configuration& cfg, const System& sys, Decision& d,
                        std::unique_ptr<Chooser>& ch) {
  // Prefer delivering queued events; fall back to round-robin triggers.
  bool deliver = !cfg.pool.empty() && std::uniform_int_distribution<int>(0, 9)(rng_) < 8;
  if (deliver) {
    size_t idx = std::uniform_int_distribution<size_t>(0, cfg.pool.size() - 1)(rng_);
    const Term& to = cfg.pool[idx].event.at(0);
    std::vector<size_t> listeners;
    for (size_t p = 0; p < sys.procs.size(); ++p) {
      const Process& pr = sys.procs[p];
      bool owns = std::any_of(pr.addresses.begin(), pr.addresses.end(),
                              [&](const Term& a) { return a == to; });
      if (owns || pr.kind == PartyKind::NetworkAttacker) listeners.push_back(p);
    }
    if (!listeners.empty()) {
      d.trigger = false;
      d.poolIndex = idx;
      d.procIndex = listeners[std::uniform_int_distribution<size_t>(0, listeners.size() - 1)(rng_)];
      ch = std::make_unique<SeededChooser>(rng_);
      return true;
    }
  }
  if (triggerable_.empty()) return false;
  const ProcId& id = triggerable_[roundRobin_++ % triggerable_.size()];
  int idx = sys.indexOf(id);
  if (idx < 0) return false;
  d.trigger = true;
  d.procIndex = static_cast<size_t>(idx);
  ch = std::make_unique<SeededChooser>(rng_);
  return true;
}

bool ReplayPolicy::next(const Configuration& cfg, const System& sys, Decision& d,
                        std::unique_ptr<Chooser>& ch) {
  if (pos_ >= steps_.size()) return false;
  const ReplayStep& r = steps_[pos_++];
  int idx = sys.indexOf(r.proc);
  if (idx < 0) throw std::runtime_error("replay: unknown process " + r.proc);
  d.trigger = r.trigger;
  d.poolIndex = r.poolIndex;
  d.procIndex = static_cast<size_t>(idx);
  ch = std::make_unique<IntChooser>(r.ints);
  return true;
}

RelationResult DnsServerRelation::apply(const Term& event, const Term& state, Chooser&) const {
  RelationResult res;
  res.state = state;
  const Term& msg = event.at(2);
  auto req = web::validateDnsRequest(msg);
  if (!web::ok(req)) return res;  // malformed or non-DNS: ignore
  Term answer = dictGet(table_, web::get(req).domain());
  if (!answer.isAddr()) return res;  // unknown domain: ignore
  Term resp = web::DnsResponse::make(web::get(req).domain(), answer, web::get(req).nonce()).t;
  res.events.push_back(Term::seq({event.at(1), event.at(0), resp}));
  return res;
}

namespace {

// Streaming FNV-1a with first-occurrence nonce renaming. `prev` carries the
// last character across piece boundaries so token detection stays exact.
struct CanonHasher {
  uint64_t h = 1469598103934665603ULL;
  std::unordered_map<uint64_t, uint64_t> renaming;
  char prev = '\n';

  void put(char c) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }

  void feed(std::string_view text) {
    for (size_t i = 0; i < text.size();) {
      char c = text[i];
      bool boundary = !(isalnum(static_cast<unsigned char>(prev)) || prev == '_');
      if (c == 'n' && boundary && i + 1 < text.size() &&
          isdigit(static_cast<unsigned char>(text[i + 1]))) {
        uint64_t id = 0;
        size_t j = i + 1;
        while (j < text.size() && isdigit(static_cast<unsigned char>(text[j]))) {
          id = id * 10 + static_cast<uint64_t>(text[j] - '0');
          ++j;
        }
        auto [it, fresh] = renaming.emplace(id, renaming.size());
        put('n');
        for (char d : std::to_string(it->second)) put(d);
        prev = '0';  // a digit: keeps the boundary logic consistent
        i = j;
        continue;
      }
      put(c);
      prev = c;
      ++i;
    }
  }
};

}  // namespace

uint64_t canonicalConfigHash(const Configuration& cfg) {
  // Hash with nonces renamed in first-occurrence order so that runs
  // differing only in fresh-nonce identities collapse to one state. The
  // pool is hashed as a multiset: delivery order is a scheduler choice, so
  // permuted pools are behaviourally identical.
  CanonHasher hasher;
  for (const auto& [id, st] : cfg.states) {
    hasher.feed(id);
    hasher.feed("=");
    hasher.feed(toTextCached(st));
    hasher.feed("\n");
  }
  std::vector<const std::string*> events;
  events.reserve(cfg.pool.size());
  for (const PoolEvent& e : cfg.pool) events.push_back(&toTextCached(e.event));
  std::sort(events.begin(), events.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (const std::string* e : events) {
    hasher.feed(*e);
    hasher.feed("\n");
  }
  return hasher.h;
}

std::string choiceLabelString(const ProcessingStep& s) {
  std::string label = s.viaTrigger ? "t" : ("e" + std::to_string(s.poolIndex));
  for (int v : s.choiceInts) {
    label += '.';
    label += std::to_string(v);
  }
  return label;
}

}  // namespace oasim::rt
