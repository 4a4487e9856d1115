#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "oasim/term.hpp"

namespace oasim::rt {

using ProcId = std::string;

Term triggerMsg();   // "TRIGGER"
Term corruptMsg();   // "CORRUPT"
Term fullCorruptMsg();
Term closeCorruptMsg();

// Thrown by relations when a nondeterministic choice has no candidates;
// the runtime records the step as a stutter and leaves the configuration
// untouched.
struct NoBranch {};

// Resolves the nondeterministic picks inside a relation. Every decision
// point is a finite menu; pick(0, ...) signals an empty menu via NoBranch.
class Chooser {
 public:
  virtual ~Chooser() = default;
  virtual size_t pick(size_t n, std::string_view label) = 0;
  bool pickBool(std::string_view label) { return pick(2, label) == 1; }
};

class ScriptedChooser : public Chooser {
 public:
  explicit ScriptedChooser(std::vector<std::pair<std::string, int>> byLabel)
      : byLabel_(std::move(byLabel)) {}
  size_t pick(size_t n, std::string_view label) override;

 private:
  std::vector<std::pair<std::string, int>> byLabel_;
  std::vector<bool> used_ = {};
};

class IntChooser : public Chooser {
 public:
  explicit IntChooser(std::vector<int> ints) : ints_(std::move(ints)) {}
  size_t pick(size_t n, std::string_view label) override;
  bool exhausted() const { return pos_ >= ints_.size(); }

 private:
  std::vector<int> ints_;
  size_t pos_ = 0;
};

class SeededChooser : public Chooser {
 public:
  explicit SeededChooser(std::mt19937_64& rng) : rng_(rng) {}
  size_t pick(size_t n, std::string_view label) override;

 private:
  std::mt19937_64& rng_;
};

// Wraps another chooser and records the flattened choice vector.
class RecordingChooser : public Chooser {
 public:
  explicit RecordingChooser(Chooser& inner) : inner_(inner) {}
  size_t pick(size_t n, std::string_view label) override;
  const std::vector<int>& ints() const { return ints_; }
  const std::vector<size_t>& fanouts() const { return fanouts_; }

 private:
  Chooser& inner_;
  std::vector<int> ints_;
  std::vector<size_t> fanouts_;
};

// Step metadata recorded for the property monitors.
struct ScriptRunMeta {
  std::string script;
  Term docNonce;
  std::optional<Term> selectedId;
  std::optional<Term> selectedDomain;
  std::optional<bool> interactive;
  std::optional<Term> commandTargetHost;
  std::optional<Term> messageTargetDomainOwnerHint;  // unused placeholder
};

struct MintMeta {  // RP created a service token
  Term token;
  Term user;
  Term idpDomain;
  Term destAddr;
};

struct EndsMeta {  // RP received an introspection body and answered the browser
  Term resource;
  Term clientId;
  Term user;
  Term destAddr;
};

struct StepMeta {
  std::optional<ScriptRunMeta> script;
  std::vector<Term> docsCreated;  // document nonces (proto, substituted by runtime)
  std::optional<MintMeta> mint;
  std::optional<EndsMeta> ends;
  std::vector<Term> rejected;  // emissions dropped by the sender-address rule
};

struct RelationResult {
  std::vector<Term> events;  // proto events <to,from,msg>
  Term state;                // proto state
  StepMeta meta;
};

class Relation {
 public:
  virtual ~Relation() = default;
  // May throw NoBranch. `recv` is the receiver address the event arrived at.
  virtual RelationResult apply(const Term& event, const Term& state, Chooser& ch) const = 0;
};

enum class PartyKind {
  Browser,
  RelyingParty,
  IdentityProvider,
  DnsServer,
  NetworkAttacker,
  WebAttacker,
};

bool isAttacker(PartyKind k);

struct Process {
  ProcId id;
  PartyKind kind{};
  std::vector<Term> addresses;
  Term initialState;
  std::shared_ptr<const Relation> relation;
};

struct System {
  std::vector<Process> procs;
  const Process* find(const ProcId& id) const;
  int indexOf(const ProcId& id) const;
};

struct PoolEvent {
  Term event;
  int64_t producer = -1;  // step index that emitted it; -1 for injected triggers
};

struct Configuration {
  std::map<ProcId, Term> states;
  std::vector<PoolEvent> pool;  // front = most recently emitted
  uint64_t nextNonce = 0;
  Term freshNonce() { return Term::nonce(nextNonce++); }
};

// Event selection: an index into the pool or a lazily injected trigger
// event addressed to the process's first address.
struct Decision {
  bool trigger = false;
  size_t poolIndex = 0;  // valid when !trigger
  size_t procIndex = 0;
};

struct ProcessingStep {
  int64_t index = 0;
  bool stutter = false;
  Term event;
  int64_t eventProducer = -1;
  ProcId proc;
  bool viaTrigger = false;
  size_t poolIndex = 0;
  std::vector<int> choiceInts;
  std::vector<Term> emitted;
  std::vector<std::pair<uint32_t, Term>> bindings;
  StepMeta meta;
  Configuration post;
};

struct Trace {
  std::string scenario;
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> toggles;
  Configuration initial;
  std::vector<ProcessingStep> steps;
  std::unordered_map<uint64_t, int64_t> docProvenance;  // doc nonce id -> producer step
  const Configuration& at(int64_t i) const { return i < 0 ? initial : steps[i].post; }
};

// Executes one processing step. Returns false (and leaves cfg untouched,
// recording a stutter) when the relation offers no branch.
bool applyStep(const System& sys, Configuration& cfg, const Decision& d, Chooser& ch, Trace& out);

// The event a decision would deliver.
Term decisionEvent(const System& sys, const Configuration& cfg, const Decision& d);

// Post-relation half of applyStep: binds fresh nonces, enforces the sender
// rule, updates the configuration and records the step. `res` is the raw
// relation output for `choiceInts`; it is not modified.
void applyPrepared(const System& sys, Configuration& cfg, const Decision& d,
                   const RelationResult& res, const std::vector<int>& choiceInts, Trace& out);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual bool next(const Configuration& cfg, const System& sys, Decision& d,
                    std::unique_ptr<Chooser>& ch) = 0;
  virtual void onStep(const Trace& t) {}
};

Trace run(const System& sys, Configuration initial, Policy& policy, size_t maxSteps);

// Seeded policy: picks a pool event (preferring recent work) or a trigger,
// then resolves all choices uniformly at random.
class SeededPolicy : public Policy {
 public:
  SeededPolicy(uint64_t seed, std::vector<ProcId> triggerable);
  bool next(const Configuration& cfg, const System& sys, Decision& d,
            std::unique_ptr<Chooser>& ch) override;

 private:
  std::mt19937_64 rng_;
  std::vector<ProcId> triggerable_;
  size_t roundRobin_ = 0;
};

// Replay policy: consumes the concrete (event index | trigger, proc,
// choice ints) records of a previous trace.
struct ReplayStep {
  bool trigger = false;
  size_t poolIndex = 0;
  ProcId proc;
  std::vector<int> ints;
};

class ReplayPolicy : public Policy {
 public:
  explicit ReplayPolicy(std::vector<ReplayStep> steps) : steps_(std::move(steps)) {}
  bool next(const Configuration& cfg, const System& sys, Decision& d,
            std::unique_ptr<Chooser>& ch) override;

 private:
  std::vector<ReplayStep> steps_;
  size_t pos_ = 0;
};

// Flat DNS server over a fixed domain->address table.
class DnsServerRelation : public Relation {
 public:
  explicit DnsServerRelation(Term table) : table_(std::move(table)) {}
  RelationResult apply(const Term& event, const Term& state, Chooser& ch) const override;

 private:
  Term table_;
};

// Canonical configuration fingerprint with first-occurrence nonce renaming,
// used to deduplicate states during exploration.
uint64_t canonicalConfigHash(const Configuration& cfg);

std::string choiceLabelString(const ProcessingStep& s);

}  // namespace oasim::rt
