#include "oasim/registry.hpp"

#include <stdexcept>

namespace oasim::harness {

std::vector<std::pair<std::string, std::string>> FixToggles::asKeyValues() const {
  return {
      {"redirectStatus", std::to_string(redirectStatus)},
      {"issParamCheck", issParamCheck ? "true" : "false"},
      {"referrerPolicy", referrerPolicy ? "true" : "false"},
      {"intentionTracking", naiveTracking ? "naive" : "explicit"},
      {"freshStatePerAttempt", freshStatePerAttempt ? "true" : "false"},
      {"clientSecretPresent", clientSecretPresent ? "true" : "false"},
  };
}

void FixToggles::set(const std::string& key, const std::string& value) {
  auto boolOf = [&](const std::string& v) { return v == "true" || v == "1" || v == "on"; };
  if (key == "redirectStatus") redirectStatus = std::stoi(value);
  else if (key == "issParamCheck") issParamCheck = boolOf(value);
  else if (key == "referrerPolicy") referrerPolicy = boolOf(value);
  else if (key == "intentionTracking") naiveTracking = (value == "naive");
  else if (key == "freshStatePerAttempt") freshStatePerAttempt = boolOf(value);
  else if (key == "clientSecretPresent") clientSecretPresent = boolOf(value);
  else throw std::runtime_error("unknown toggle: " + key);
}

void Registry::addParty(Party p) { parties.push_back(std::move(p)); }

const Party* Registry::party(const std::string& id) const {
  for (const Party& p : parties)
    if (p.id == id) return &p;
  return nullptr;
}

const Party* Registry::ownerOfDomain(const std::string& domain) const {
  for (const Party& p : parties)
    for (const std::string& d : p.domains)
      if (d == domain) return &p;
  return nullptr;
}

const Party* Registry::ownerOfAddress(const Term& addr) const {
  for (const Party& p : parties)
    for (const Term& a : p.addresses)
      if (a == addr) return &p;
  return nullptr;
}

Term Registry::addrOf(const std::string& partyId) const {
  const Party* p = party(partyId);
  if (!p || p->addresses.empty()) throw std::runtime_error("no address for " + partyId);
  return p->addresses.front();
}

void Registry::assignSslKey(const std::string& domain) {
  sslKeys_.emplace(domain, freshNonce());
}

Term Registry::sslKey(const std::string& domain) const {
  auto it = sslKeys_.find(domain);
  if (it == sslKeys_.end()) throw std::runtime_error("no ssl key for " + domain);
  return it->second;
}

Term Registry::sslPubKey(const std::string& domain) const {
  return Term::app(Op::Pub, {sslKey(domain)});
}

Term Registry::keyMappingTerm() const {
  std::vector<Term> entries;
  for (const auto& [d, k] : sslKeys_)
    entries.push_back(Term::seq({Term::str(d), Term::app(Op::Pub, {k})}));
  return Term::seq(std::move(entries));
}

void Registry::addIdentity(const Identity& id, const std::string& ownerParty,
                           std::vector<std::string> trustedRpParties) {
  ids_.push_back(id);
  secretOf_.emplace(id.key(), freshNonce());
  ownerOf_[id.key()] = ownerParty;
  trusted_[id.key()] = std::move(trustedRpParties);
}

std::string Registry::idKeyOf(const Term& idTerm) const {
  Term t = normalize(idTerm);
  if (!(t.isSeq() && t.size() == 2 && t.at(0).isStr() && t.at(1).isStr())) return "";
  std::string key = std::string(t.at(0).text()) + "@" + std::string(t.at(1).text());
  return secretOf_.count(key) ? key : "";
}

std::optional<Term> Registry::secretOfId(const Term& idTerm) const {
  std::string key = idKeyOf(idTerm);
  if (key.empty()) return std::nullopt;
  return secretOf_.at(key);
}

std::optional<std::string> Registry::ownerOfId(const Term& idTerm) const {
  std::string key = idKeyOf(idTerm);
  if (key.empty()) return std::nullopt;
  return ownerOf_.at(key);
}

const std::vector<std::string>* Registry::trustedRPs(const Term& idTerm) const {
  std::string key = idKeyOf(idTerm);
  if (key.empty()) return nullptr;
  return &trusted_.at(key);
}

void Registry::registerClient(const std::string& rpParty, const std::string& idpDomain,
                              const std::string& clientId, bool withSecret) {
  clientIds_[rpParty + "|" + idpDomain] = clientId;
  clientOwners_[clientId] = rpParty;
  if (withSecret) clientSecrets_.emplace(clientId, freshNonce());
}

std::optional<std::string> Registry::clientIdOf(const std::string& rpParty,
                                                const std::string& idpDomain) const {
  auto it = clientIds_.find(rpParty + "|" + idpDomain);
  if (it == clientIds_.end()) return std::nullopt;
  return it->second;
}

Term Registry::secretOfClientId(const Term& clientId) const {
  if (!clientId.isStr()) return Term::bot();
  auto it = clientSecrets_.find(std::string(clientId.text()));
  return it == clientSecrets_.end() ? Term::bot() : it->second;
}

std::optional<std::string> Registry::rpOfClientId(const Term& clientId) const {
  if (!clientId.isStr()) return std::nullopt;
  auto it = clientOwners_.find(std::string(clientId.text()));
  if (it == clientOwners_.end()) return std::nullopt;
  return it->second;
}

void Registry::mintResources() {
  std::vector<std::string> rpKeys{""};
  for (const Party& p : parties)
    if (p.kind == rt::PartyKind::RelyingParty || rt::isAttacker(p.kind)) rpKeys.push_back(p.id);
  std::vector<std::string> idKeys{""};
  for (const Identity& id : ids_) idKeys.push_back(id.key());
  for (const Party& p : parties) {
    if (p.kind != rt::PartyKind::IdentityProvider) continue;
    for (const std::string& r : rpKeys)
      for (const std::string& u : idKeys)
        resources_.emplace(p.id + "|" + r + "|" + u, freshNonce());
  }
}

Term Registry::resourceOf(const std::string& idpParty, const std::string& rp,
                          const std::string& idKey) const {
  auto it = resources_.find(idpParty + "|" + rp + "|" + idKey);
  if (it == resources_.end()) throw std::runtime_error("no resource minted");
  return it->second;
}

std::vector<Term> Registry::allResources(const std::string& idpParty) const {
  std::vector<Term> out;
  for (const auto& [k, v] : resources_)
    if (k.rfind(idpParty + "|", 0) == 0) out.push_back(v);
  return out;
}

std::optional<Registry::ResourceInfo> Registry::resourceInfo(const Term& n) const {
  for (const auto& [k, v] : resources_) {
    if (!(v == n)) continue;
    ResourceInfo info;
    size_t p1 = k.find('|');
    size_t p2 = k.find('|', p1 + 1);
    info.idpParty = k.substr(0, p1);
    info.rpParty = k.substr(p1 + 1, p2 - p1 - 1);
    info.idKey = k.substr(p2 + 1);
    return info;
  }
  return std::nullopt;
}

Term Registry::resourceForIntrospection(const std::string& idpParty, const Term& clientId,
                                        const Term& user) const {
  std::string rp;
  if (auto r = rpOfClientId(clientId)) rp = *r;
  std::string id = user.isBot() ? "" : idKeyOf(user);
  auto it = resources_.find(idpParty + "|" + rp + "|" + id);
  if (it == resources_.end()) return Term::bot();
  return it->second;
}

}  // namespace oasim::harness
