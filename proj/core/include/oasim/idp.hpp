#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oasim/browser.hpp"
#include "oasim/registry.hpp"
#include "oasim/runtime.hpp"

namespace oasim::oauth {

// Builds the IdP state term <sslkeys, srlist, authEndpoint, tokenEndpoint,
// introspectEndpoint, clients, codes, atokens, corrupt>.
struct IdpStateParts {
  Term sslKeys;
  Term srlist;
  Term authEndpoint = Term::str("/auth");
  Term tokenEndpoint = Term::str("/token");
  Term introspectEndpoint = Term::str("/introspect");
  Term clients;  // client id -> sequence of redirect URI patterns
};
Term initialIdpState(const IdpStateParts& parts);

class IdpRelation : public rt::Relation {
 public:
  IdpRelation(std::shared_ptr<const harness::Registry> reg, std::string selfId,
              std::vector<Term> corruptAddressMenu = {})
      : reg_(std::move(reg)), self_(std::move(selfId)), corruptMenu_(std::move(corruptAddressMenu)) {}
  rt::RelationResult apply(const Term& event, const Term& state, rt::Chooser& ch) const override;

 private:
  std::shared_ptr<const harness::Registry> reg_;
  std::string self_;
  std::vector<Term> corruptMenu_;
};

// Login form: merges a chosen identity and secret into the OAuth
// parameters it was initialized with and posts them back to its origin.
class ScriptIdpForm : public browser::Script {
 public:
  explicit ScriptIdpForm(std::vector<Term> postPaths) : postPaths_(std::move(postPaths)) {}
  browser::ScriptOutput run(const browser::ScriptInput& in, rt::Chooser& ch,
                            rt::ScriptRunMeta& meta) const override;

 private:
  std::vector<Term> postPaths_;
};

}  // namespace oasim::oauth
