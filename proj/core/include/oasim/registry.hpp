#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oasim/runtime.hpp"
#include "oasim/term.hpp"

namespace oasim::harness {

// Protocol/fix switches. Fixed mode is (303, iss on, referrer policy on,
// explicit tracking, single-use state); the attack scenarios flip exactly
// the switch they exploit.
struct FixToggles {
  int redirectStatus = 303;
  bool issParamCheck = true;
  bool referrerPolicy = true;
  bool naiveTracking = false;
  bool freshStatePerAttempt = true;
  bool clientSecretPresent = true;

  std::vector<std::pair<std::string, std::string>> asKeyValues() const;
  void set(const std::string& key, const std::string& value);
};

struct Identity {
  std::string name;
  std::string domain;
  Term term() const { return Term::seq({Term::str(name), Term::str(domain)}); }
  std::string key() const { return name + "@" + domain; }
};

struct Party {
  std::string id;
  rt::PartyKind kind{};
  std::vector<Term> addresses;
  std::vector<std::string> domains;
};

// The static world of a scenario: parties, keys, identities, registrations
// and protected resources. Nonces used here come from the front of the
// run's nonce stream; `nextNonce` is where the runtime continues.
class Registry {
 public:
  std::vector<Party> parties;
  FixToggles toggles;
  uint64_t nextNonce = 0;

  Term freshNonce() { return Term::nonce(nextNonce++); }

  // parties / domains / addresses
  void addParty(Party p);
  const Party* party(const std::string& id) const;
  const Party* ownerOfDomain(const std::string& domain) const;
  const Party* ownerOfAddress(const Term& addr) const;
  Term addrOf(const std::string& partyId) const;

  // TLS keys
  void assignSslKey(const std::string& domain);
  Term sslKey(const std::string& domain) const;          // private key nonce
  Term sslPubKey(const std::string& domain) const;       // pub(key)
  Term keyMappingTerm() const;                            // domain -> pub(key)

  // identities
  void addIdentity(const Identity& id, const std::string& ownerParty,
                   std::vector<std::string> trustedRpParties);
  const std::vector<Identity>& identities() const { return ids_; }
  std::optional<Term> secretOfId(const Term& idTerm) const;
  std::optional<std::string> ownerOfId(const Term& idTerm) const;
  const std::vector<std::string>* trustedRPs(const Term& idTerm) const;

  // client registration
  void registerClient(const std::string& rpParty, const std::string& idpDomain,
                      const std::string& clientId, bool withSecret);
  std::optional<std::string> clientIdOf(const std::string& rpParty,
                                        const std::string& idpDomain) const;
  Term secretOfClientId(const Term& clientId) const;  // bot when none/unknown
  std::optional<std::string> rpOfClientId(const Term& clientId) const;

  // protected resources: resourceOf(idp party, rp party or "", identity key or "")
  Term resourceOf(const std::string& idpParty, const std::string& rpPartyOrEmpty,
                  const std::string& idKeyOrEmpty) const;
  void mintResources();  // one nonce per (idp, rp/bot, id/bot) combination
  std::vector<Term> allResources(const std::string& idpParty) const;
  // Reverse lookup for property reporting.
  struct ResourceInfo {
    std::string idpParty;
    std::string rpParty;  // empty = bot
    std::string idKey;    // empty = bot
  };
  std::optional<ResourceInfo> resourceInfo(const Term& n) const;

  // resourceOf as used by the IdP algorithm: client id term + user term.
  Term resourceForIntrospection(const std::string& idpParty, const Term& clientId,
                                const Term& user) const;

  std::string idKeyOf(const Term& idTerm) const;  // "" when not an identity term

 private:
  std::map<std::string, Term> sslKeys_;
  std::vector<Identity> ids_;
  std::map<std::string, Term> secretOf_;
  std::map<std::string, std::string> ownerOf_;
  std::map<std::string, std::vector<std::string>> trusted_;
  std::map<std::string, std::string> clientIds_;          // rp|idpdomain -> client id
  std::map<std::string, Term> clientSecrets_;             // client id -> nonce (absent = bot)
  std::map<std::string, std::string> clientOwners_;       // client id -> rp party
  std::map<std::string, Term> resources_;                 // idp|rp|id -> nonce
};

}  // namespace oasim::harness
