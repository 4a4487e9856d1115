#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oasim/derive.hpp"
#include "oasim/registry.hpp"
#include "oasim/runtime.hpp"

namespace oasim::props {

struct Witness {
  int64_t step = -1;
  Term term;
  Term recipe;
  std::string roles;
};

struct PropertyVerdict {
  std::string property;
  bool holds = true;
  std::optional<Witness> witness;
};

// Dynamic honesty at a step: attackers never, corrupted processes no more.
bool honestAt(const rt::Trace& trace, int64_t step, const harness::Registry& reg,
              const std::string& party);
bool browserFullyCorruptedAt(const rt::Trace& trace, int64_t step, const harness::Registry& reg,
                             const std::string& browserParty);

// derive() over the attacker's state after `step`.
Derivation attackerKnows(const rt::Trace& trace, int64_t step, const harness::Registry& reg,
                         const Term& target);

PropertyVerdict checkAuthorization(const rt::Trace& trace, const harness::Registry& reg);
PropertyVerdict checkAuthentication(const rt::Trace& trace, const harness::Registry& reg);

// Connected processing steps (direct event flow, or script run on a
// document created by the earlier step's output).
bool connected(const rt::Trace& trace, int64_t a, int64_t b);

struct OAuthSession {
  std::string browser, rp, idp;
  std::vector<int64_t> steps;  // ordered, steps[0] is the starting step
  bool ended = false;
  int64_t endStep = -1;
  // selected identities with evidence kind
  std::vector<Term> selectedIa;
  std::vector<Term> selectedNia;
  bool contains(int64_t q) const;
};

std::vector<OAuthSession> extractOAuthSessions(const rt::Trace& trace,
                                               const harness::Registry& reg,
                                               const std::string& browser, const std::string& rp,
                                               const std::string& idp);

PropertyVerdict checkSessionIntegrityAuthz(const rt::Trace& trace, const harness::Registry& reg);
PropertyVerdict checkSessionIntegrityAuthn(const rt::Trace& trace, const harness::Registry& reg);

// The appendix lemmas as trace monitors: password, authorization-code,
// access-token, state and HTTPS-key secrecy against the attacker.
struct MonitorReport {
  std::vector<PropertyVerdict> verdicts;  // one per monitor
  bool allHold() const;
  const PropertyVerdict* find(const std::string& name) const;
};

MonitorReport lemmaMonitors(const rt::Trace& trace, const harness::Registry& reg);

// Every applicable check for a scenario kind.
struct VerdictSet {
  std::vector<PropertyVerdict> verdicts;
  const PropertyVerdict* find(const std::string& name) const;
  bool violated(const std::string& name) const;
};

VerdictSet evaluateAll(const rt::Trace& trace, const harness::Registry& reg, bool webAttackerSystem);

// Incremental variant for exploration: only the checks that can newly fire
// at step j (attacker-knowledge checks when the attacker moved, session
// integrity when a flow completed or a token was minted). Returns only
// violated verdicts.
std::vector<PropertyVerdict> checkAtStep(const rt::Trace& trace, const harness::Registry& reg,
                                         int64_t j, bool webAttackerSystem);

// Re-run the witness recipe against the attacker knowledge it cites.
bool verifyWitness(const rt::Trace& trace, const harness::Registry& reg,
                   const PropertyVerdict& verdict);

}  // namespace oasim::props
