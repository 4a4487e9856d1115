#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oasim/browser.hpp"
#include "oasim/registry.hpp"
#include "oasim/runtime.hpp"
#include "oasim/wire.hpp"

namespace oasim::attacker {

// Attacker state: <e, E, s> stacked on a tagged base
// <"KB", attdoms, sslkeys, extra>.
Term initialAttackerState(const Term& attDoms, const Term& sslKeys, const Term& extra);

// Decoded view over the attacker's recorded knowledge, used by recipes.
struct View {
  std::vector<Term> events;  // consumed events, newest first
  Term attDoms;              // <domain, privkey> pairs
  Term sslKeys;              // domain -> pub(key)
  Term extra;

  Term privKey(const Term& domain) const;  // bot when not owned
  // Decrypt an HTTPS request addressed to one of the attacker's domains.
  struct OpenedRequest {
    web::HttpRequest request;
    Term symKey;
    Term domain;
    Term from;  // sender address of the event
    Term to;    // receiver address
  };
  std::optional<OpenedRequest> openRequest(const Term& event) const;
  // Newest event whose message decrypts to an HTTP request for `domain`
  // with the given path ("" = any).
  std::optional<OpenedRequest> findRequest(const Term& domain, const Term& path) const;
  // Newest symmetric decryption of a recorded message under `key`.
  std::optional<web::HttpResponse> findResponse(const Term& key) const;
};

View decodeAttackerState(const Term& state, const Term& newEvent);

// A recipe produces proto events derivable from the view; nullopt when it
// does not apply to the current knowledge.
struct Recipe {
  std::string name;
  std::function<std::optional<std::vector<Term>>(const View&, rt::Chooser&)> gen;
};

class AttackerRelation : public rt::Relation {
 public:
  AttackerRelation(std::shared_ptr<const std::vector<Recipe>> recipes, bool networkAttacker,
                   Term selfAddr)
      : recipes_(std::move(recipes)), network_(networkAttacker), selfAddr_(std::move(selfAddr)) {}
  rt::RelationResult apply(const Term& event, const Term& state, rt::Chooser& ch) const override;

 private:
  std::shared_ptr<const std::vector<Recipe>> recipes_;
  bool network_;
  Term selfAddr_;
};

// The attacker script: its initial scriptstate (planted by the attacker's
// server response) is a sequence of ready-made browser commands; the script
// replays one of them. Everything it outputs is a subterm of its input.
class AttackerScript : public browser::Script {
 public:
  browser::ScriptOutput run(const browser::ScriptInput& in, rt::Chooser& ch,
                            rt::ScriptRunMeta& meta) const override;
};

}  // namespace oasim::attacker
