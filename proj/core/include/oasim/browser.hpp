#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oasim/runtime.hpp"
#include "oasim/term.hpp"
#include "oasim/wire.hpp"

namespace oasim::browser {

// Command tags a script may return to the browser.
Term cHref();
Term cIframe();
Term cForm();
Term cSetScript();
Term cSetScriptState();
Term cXhr();
Term cBack();
Term cForward();
Term cClose();
Term cPostMessage();
Term wBlank();

struct Window;

struct Document {
  Term nonce;
  Term location;  // URL term
  Term headers;
  Term referrer;  // URL or bot
  Term script;
  Term scriptstate;
  Term scriptinputs;
  std::vector<Window> subwindows;
  bool active = false;

  Term origin() const;  // <location.host, location.protocol>
};

struct Window {
  Term nonce;
  std::vector<Document> documents;
  Term opener;  // nonce or bot

  int activeIndex() const;  // -1 when no active document
  const Document* activeDocument() const;
  Document* activeDocument();
};

struct BrowserState {
  std::vector<Window> windows;
  Term ids;
  Term secrets;
  Term cookies;  // domain -> cookie sequence
  Term localStorage;
  Term sessionStorage;
  Term keyMapping;
  Term sts;
  Term dnsAddress;
  Term pendingDNS;       // nonce -> <reference, message, url>
  Term pendingRequests;  // sequence of <reference, request, url, key, f>
  Term corrupt;
};

Term encodeWindow(const Window& w);
Term encodeState(const BrowserState& s);
BrowserState decodeState(const Term& t);

// A path to a window in the tree: windows[i] then alternating
// (document index, subwindow index) hops.
using WinPath = std::vector<size_t>;

Window* windowAt(BrowserState& s, const WinPath& p);
const Window* windowAt(const BrowserState& s, const WinPath& p);

// All windows reachable through active documents, in pre-order.
std::vector<WinPath> subwindowPaths(const BrowserState& s);
// Subset of subwindowPaths with a nonempty document list.
std::vector<WinPath> documentedWindowPaths(const BrowserState& s);

// The information a script sees about the window/document tree.
Term cleanTree(const BrowserState& s, const Document& viewer);

// RFC6265-style cookie handling.
Term cookieMerge(const Term& oldCookies, const Term& newCookies);
Term addCookie(const Term& oldCookies, const Term& cookie);

// HTML5 5.1.4 navigation rules; returns paths into s.
std::vector<WinPath> navigableWindows(const WinPath& w, const BrowserState& s);

// Script input/output per the run-script algorithm.
struct ScriptInput {
  Term tree;
  Term docNonce;
  Term scriptstate;
  Term scriptinputs;
  Term cookies;
  Term localStorage;
  Term sessionStorage;
  Term ids;
  Term secrets;
  Term asTerm() const;
};

struct ScriptOutput {
  Term state;
  Term cookies;
  Term localStorage;
  Term sessionStorage;
  Term command;  // may contain script placeholders
};

class Script {
 public:
  virtual ~Script() = default;
  virtual ScriptOutput run(const ScriptInput& in, rt::Chooser& ch,
                           rt::ScriptRunMeta& meta) const = 0;
};

using ScriptMap = std::map<std::string, std::shared_ptr<const Script>>;

// Helpers for scripts: locate a document's URL / containing window nonce
// inside a (cleaned) tree term.
std::optional<Term> findDocUrl(const Term& tree, const Term& docNonce);
std::optional<Term> findDocWindow(const Term& tree, const Term& docNonce);

struct BrowserConfig {
  std::vector<Term> urlMenu;      // URL terms offered to the urlbar
  std::vector<Term> addressMenu;  // target addresses for corrupted emission
};

class BrowserRelation : public rt::Relation {
 public:
  BrowserRelation(std::shared_ptr<const ScriptMap> scripts, BrowserConfig cfg)
      : scripts_(std::move(scripts)), cfg_(std::move(cfg)) {}
  rt::RelationResult apply(const Term& event, const Term& state, rt::Chooser& ch) const override;

 private:
  std::shared_ptr<const ScriptMap> scripts_;
  BrowserConfig cfg_;
};

}  // namespace oasim::browser
