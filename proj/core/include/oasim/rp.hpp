#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oasim/browser.hpp"
#include "oasim/registry.hpp"
#include "oasim/runtime.hpp"

namespace oasim::oauth {

// RP endpoint paths (fixed strings, matching the algorithm).
Term pIndex();
Term pStartInteractiveLogin();
Term pRedirectionEndpoint();
Term pPasswordLogin();
Term pReceiveTokenFromImplicitGrant();

// Builds the RP state term <DNSAddress, idps, serviceTokens, loginSessions,
// keyMapping, sslkeys, pendingDNS, pendingRequests, corrupt>.
struct RpStateParts {
  Term dnsAddress;
  Term idps;  // domain -> <tokenEndpoint, authEndpoint, introspectEndpoint, clientId, clientPassword>
  Term keyMapping;
  Term sslKeys;  // <domain, privkey> pairs
};
Term initialRpState(const RpStateParts& parts);

Term idpRegistrationRecord(const Term& tokenEndpoint, const Term& authEndpoint,
                           const Term& introspectEndpoint, const Term& clientId,
                           const Term& clientPassword);

class RpRelation : public rt::Relation {
 public:
  RpRelation(std::shared_ptr<const harness::Registry> reg, std::string selfId,
             std::vector<Term> corruptAddressMenu = {})
      : reg_(std::move(reg)), self_(std::move(selfId)), corruptMenu_(std::move(corruptAddressMenu)) {}
  rt::RelationResult apply(const Term& event, const Term& state, rt::Chooser& ch) const override;

 private:
  std::shared_ptr<const harness::Registry> reg_;
  std::string self_;
  std::vector<Term> corruptMenu_;
};

// Index-page script: starts an interactive or password login, or follows
// an arbitrary link from the menu.
class ScriptRpIndex : public browser::Script {
 public:
  ScriptRpIndex(std::shared_ptr<const harness::Registry> reg, std::vector<Term> linkMenu)
      : reg_(std::move(reg)), linkMenu_(std::move(linkMenu)) {}
  browser::ScriptOutput run(const browser::ScriptInput& in, rt::Chooser& ch,
                            rt::ScriptRunMeta& meta) const override;

 private:
  std::shared_ptr<const harness::Registry> reg_;
  std::vector<Term> linkMenu_;
};

// Implicit-grant helper: posts the fragment's token and state, plus the
// IdP domain from its initial state, back to its own origin.
class ScriptRpImplicit : public browser::Script {
 public:
  browser::ScriptOutput run(const browser::ScriptInput& in, rt::Chooser& ch,
                            rt::ScriptRunMeta& meta) const override;
};

}  // namespace oasim::oauth
