#include "oasim/browser.hpp"

#include <algorithm>
#include <stdexcept>

using namespace oasim::web;

namespace oasim::browser {

Term cHref() { static const Term t = Term::str("HREF"); return t; }
Term cIframe() { static const Term t = Term::str("IFRAME"); return t; }
Term cForm() { static const Term t = Term::str("FORM"); return t; }
Term cSetScript() { static const Term t = Term::str("SETSCRIPT"); return t; }
Term cSetScriptState() { static const Term t = Term::str("SETSCRIPTSTATE"); return t; }
Term cXhr() { static const Term t = Term::str("XMLHTTPREQUEST"); return t; }
Term cBack() { static const Term t = Term::str("BACK"); return t; }
Term cForward() { static const Term t = Term::str("FORWARD"); return t; }
Term cClose() { static const Term t = Term::str("CLOSE"); return t; }
Term cPostMessage() { static const Term t = Term::str("POSTMESSAGE"); return t; }
Term wBlank() { static const Term t = Term::str("_BLANK"); return t; }

Term Document::origin() const {
  auto u = validateUrl(location);
  if (!ok(u)) return Term::bot();
  return Term::seq({get(u).host(), get(u).protocol()});
}

int Window::activeIndex() const {
  for (size_t i = 0; i < documents.size(); ++i)
    if (documents[i].active) return static_cast<int>(i);
  return -1;
}

const Document* Window::activeDocument() const {
  int i = activeIndex();
  return i < 0 ? nullptr : &documents[i];
}

Document* Window::activeDocument() {
  int i = activeIndex();
  return i < 0 ? nullptr : &documents[i];
}

namespace {

Term encodeDocument(const Document& d) {
  std::vector<Term> subs;
  for (const Window& w : d.subwindows) subs.push_back(encodeWindow(w));
  return Term::seq({d.nonce, d.location, d.headers, d.referrer, d.script, d.scriptstate,
                    d.scriptinputs, Term::seq(std::move(subs)), Term::boolean(d.active)});
}

Document decodeDocument(const Term& t);

Window decodeWindow(const Term& t) {
  if (!t.isSeq() || t.size() != 3) throw std::runtime_error("bad window term");
  Window w;
  w.nonce = t.at(0);
  for (const Term& d : t.at(1).args()) w.documents.push_back(decodeDocument(d));
  w.opener = t.at(2);
  return w;
}

Document decodeDocument(const Term& t) {
  if (!t.isSeq() || t.size() != 9) throw std::runtime_error("bad document term");
  Document d;
  d.nonce = t.at(0);
  d.location = t.at(1);
  d.headers = t.at(2);
  d.referrer = t.at(3);
  d.script = t.at(4);
  d.scriptstate = t.at(5);
  d.scriptinputs = t.at(6);
  for (const Term& w : t.at(7).args()) d.subwindows.push_back(decodeWindow(w));
  d.active = t.at(8).isTop();
  return d;
}

}  // namespace

Term encodeWindow(const Window& w) {
  std::vector<Term> docs;
  for (const Document& d : w.documents) docs.push_back(encodeDocument(d));
  return Term::seq({w.nonce, Term::seq(std::move(docs)), w.opener});
}

Term encodeState(const BrowserState& s) {
  std::vector<Term> ws;
  for (const Window& w : s.windows) ws.push_back(encodeWindow(w));
  return Term::seq({Term::seq(std::move(ws)), s.ids, s.secrets, s.cookies, s.localStorage,
                    s.sessionStorage, s.keyMapping, s.sts, s.dnsAddress, s.pendingDNS,
                    s.pendingRequests, s.corrupt});
}

BrowserState decodeState(const Term& t) {
  if (!t.isSeq() || t.size() != 12) throw std::runtime_error("bad browser state");
  BrowserState s;
  for (const Term& w : t.at(0).args()) s.windows.push_back(decodeWindow(w));
  s.ids = t.at(1);
  s.secrets = t.at(2);
  s.cookies = t.at(3);
  s.localStorage = t.at(4);
  s.sessionStorage = t.at(5);
  s.keyMapping = t.at(6);
  s.sts = t.at(7);
  s.dnsAddress = t.at(8);
  s.pendingDNS = t.at(9);
  s.pendingRequests = t.at(10);
  s.corrupt = t.at(11);
  return s;
}

Window* windowAt(BrowserState& s, const WinPath& p) {
  if (p.empty() || p[0] >= s.windows.size()) return nullptr;
  Window* w = &s.windows[p[0]];
  for (size_t i = 1; i + 1 < p.size(); i += 2) {
    if (p[i] >= w->documents.size()) return nullptr;
    Document& d = w->documents[p[i]];
    if (p[i + 1] >= d.subwindows.size()) return nullptr;
    w = &d.subwindows[p[i + 1]];
  }
  return w;
}

const Window* windowAt(const BrowserState& s, const WinPath& p) {
  return windowAt(const_cast<BrowserState&>(s), p);
}

namespace {

void collectPaths(const Window& w, WinPath path, std::vector<WinPath>& out) {
  out.push_back(path);
  int ai = w.activeIndex();
  if (ai < 0) return;
  const Document& d = w.documents[ai];
  for (size_t i = 0; i < d.subwindows.size(); ++i) {
    WinPath sub = path;
    sub.push_back(static_cast<size_t>(ai));
    sub.push_back(i);
    collectPaths(d.subwindows[i], std::move(sub), out);
  }
}

}  // namespace

std::vector<WinPath> subwindowPaths(const BrowserState& s) {
  std::vector<WinPath> out;
  for (size_t i = 0; i < s.windows.size(); ++i) collectPaths(s.windows[i], {i}, out);
  return out;
}

std::vector<WinPath> documentedWindowPaths(const BrowserState& s) {
  std::vector<WinPath> out;
  for (const WinPath& p : subwindowPaths(s))
    if (!windowAt(s, p)->documents.empty()) out.push_back(p);
  return out;
}

Term cleanTree(const BrowserState& s, const Document& viewer) {
  Term origin = viewer.origin();
  struct Rec {
    const Term& origin;
    Term window(const Window& w) const {
      std::vector<Term> docs;
      const Document* ad = w.activeDocument();
      if (ad) docs.push_back(doc(*ad));
      return Term::seq({w.nonce, Term::seq(std::move(docs)), w.opener});
    }
    Term doc(const Document& d) const {
      std::vector<Term> subs;
      for (const Window& sub : d.subwindows) subs.push_back(window(sub));
      if (!(d.origin() == origin))
        return Term::seq({d.nonce, Term::seq(std::move(subs))});  // limited document
      return Term::seq({d.nonce, d.location, Term::seq({}), d.referrer, d.script, d.scriptstate,
                        d.scriptinputs, Term::seq(std::move(subs)), Term::boolean(d.active)});
    }
  } rec{origin};
  std::vector<Term> ws;
  for (const Window& w : s.windows) ws.push_back(rec.window(w));
  return Term::seq(std::move(ws));
}

Term cookieMerge(const Term& oldCookies, const Term& newCookiesRaw) {
  // Scripts cannot plant httpOnly cookies; among same-name new cookies the
  // rightmost wins; an old httpOnly cookie survives any new one.
  std::vector<Term> fresh;
  Term newNorm = normalize(newCookiesRaw);
  if (newNorm.isSeq()) {
    for (const Term& c : newNorm.args()) {
      auto v = validateCookie(c);
      if (!ok(v) || get(v).httpOnly()) continue;
      std::erase_if(fresh, [&](const Term& x) { return equiv(x.at(0), c.at(0)); });
      fresh.push_back(normalize(c));
    }
  }
  Term oldNorm = normalize(oldCookies);
  std::vector<Term> out;
  for (const Term& oc : oldNorm.args()) {
    const Term* replacement = nullptr;
    for (const Term& nc : fresh)
      if (equiv(nc.at(0), oc.at(0))) replacement = &nc;
    if (!replacement) {
      out.push_back(oc);
      continue;
    }
    auto ov = validateCookie(oc);
    if (ok(ov) && get(ov).httpOnly()) out.push_back(oc);
    else out.push_back(*replacement);
  }
  for (const Term& nc : fresh) {
    bool clash = false;
    for (const Term& oc : oldNorm.args())
      if (equiv(nc.at(0), oc.at(0))) clash = true;
    if (!clash) out.push_back(nc);
  }
  return Term::seq(std::move(out));
}

Term addCookie(const Term& oldCookies, const Term& cookie) {
  std::vector<Term> out;
  Term oldNorm = normalize(oldCookies);
  if (oldNorm.isSeq()) {
    for (const Term& c : oldNorm.args()) {
      if (c.isSeq() && c.size() == 2 && equiv(c.at(0), cookie.at(0))) continue;
      out.push_back(c);
    }
  }
  out.push_back(normalize(cookie));
  return Term::seq(std::move(out));
}

namespace {

bool isChildOf(const WinPath& child, const WinPath& parent) {
  return parent.size() < child.size() &&
         std::equal(parent.begin(), parent.end(), child.begin());
}

Term activeOrigin(const BrowserState& s, const WinPath& p) {
  const Window* w = windowAt(s, p);
  if (!w) return Term::bot();
  const Document* d = w->activeDocument();
  return d ? d->origin() : Term::bot();
}

}  // namespace

std::vector<WinPath> navigableWindows(const WinPath& wp, const BrowserState& s) {
  std::vector<WinPath> all = subwindowPaths(s);
  Term myOrigin = activeOrigin(s, wp);
  std::vector<WinPath> result;
  auto contains = [&](const WinPath& p) {
    return std::find(result.begin(), result.end(), p) != result.end();
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (const WinPath& cand : all) {
      if (contains(cand)) continue;
      bool in = false;
      // (1) same-origin active documents
      if (!myOrigin.isBot() && activeOrigin(s, cand) == myOrigin) in = true;
      // (2) cand is the top-level ancestor of w
      if (!in && cand.size() == 1 && isChildOf(wp, cand)) in = true;
      // (3) an ancestor of cand is same-origin with w's active document
      if (!in && cand.size() > 1) {
        for (const WinPath& anc : all) {
          if (isChildOf(cand, anc) && !myOrigin.isBot() && activeOrigin(s, anc) == myOrigin) {
            in = true;
            break;
          }
        }
      }
      // (4) cand is top-level and w may navigate its opener
      if (!in && cand.size() == 1) {
        const Window* cw = windowAt(s, cand);
        if (cw && !cw->opener.isBot()) {
          for (const WinPath& p : result) {
            const Window* pw = windowAt(s, p);
            if (pw && pw->nonce == cw->opener) {
              in = true;
              break;
            }
          }
        }
      }
      if (in) {
        result.push_back(cand);
        grew = true;
      }
    }
  }
  return result;
}

Term ScriptInput::asTerm() const {
  return Term::seq({tree, docNonce, scriptstate, scriptinputs, cookies, localStorage,
                    sessionStorage, ids, secrets});
}

namespace {

std::optional<Term> findDocField(const Term& tree, const Term& docNonce, bool wantUrl) {
  if (!tree.isSeq()) return std::nullopt;
  for (const Term& w : tree.args()) {
    if (!w.isSeq() || w.size() != 3) continue;
    for (const Term& d : w.at(1).args()) {
      if (d.isSeq() && d.size() == 9) {
        if (d.at(0) == docNonce) return wantUrl ? d.at(1) : w.at(0);
        if (auto r = findDocField(d.at(7), docNonce, wantUrl)) return r;
      } else if (d.isSeq() && d.size() == 2) {
        if (d.at(0) == docNonce) {
          if (wantUrl) return std::nullopt;  // limited documents hide the URL
          return w.at(0);
        }
        if (auto r = findDocField(d.at(1), docNonce, wantUrl)) return r;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Term> findDocUrl(const Term& tree, const Term& docNonce) {
  return findDocField(tree, docNonce, true);
}

std::optional<Term> findDocWindow(const Term& tree, const Term& docNonce) {
  return findDocField(tree, docNonce, false);
}

namespace {

Term substituteScriptVars(const Term& t, uint32_t base) {
  if (t.ground()) return t;
  if (t.isVar() && t.varKind() == VarKind::Script)
    return Term::var(VarKind::Process, base + t.varIndex() - 1);
  if (t.isSeq() || t.isApp()) {
    std::vector<Term> args;
    args.reserve(t.size());
    for (const Term& a : t.args()) args.push_back(substituteScriptVars(a, base));
    if (t.isSeq()) return Term::seq(std::move(args));
    if (t.op() == Op::Proj) return Term::proj(t.projIndex(), std::move(args[0]));
    return Term::app(t.op(), std::move(args));
  }
  return t;
}

// One browser step in flight: decoded state plus accumulated outputs.
struct Exec {
  const BrowserConfig& cfg;
  const ScriptMap& scripts;
  rt::Chooser& ch;
  Term selfAddr;
  BrowserState st;
  rt::RelationResult out;

  void emit(const Term& to, const Term& msg) {
    out.events.push_back(Term::seq({to, selfAddr, msg}));
  }

  static Term nu(uint32_t i) { return Term::var(VarKind::Process, i); }

  rt::RelationResult finish() {
    out.state = encodeState(st);
    return std::move(out);
  }

  rt::RelationResult stopUnchanged(const Term& originalState) {
    out.events.clear();
    out.state = originalState;
    return std::move(out);
  }

  void cancelNav(const Term& windowNonce) {
    std::vector<Term> keep;
    for (const Term& e : st.pendingRequests.args())
      if (!(e.isSeq() && e.size() == 5 && e.at(0) == windowNonce)) keep.push_back(e);
    st.pendingRequests = Term::seq(std::move(keep));
    std::vector<Term> keepDns;
    for (const Term& e : st.pendingDNS.args()) {
      bool drop = e.isSeq() && e.size() == 2 && e.at(1).isSeq() && e.at(1).size() == 3 &&
                  e.at(1).at(0) == windowNonce;
      if (!drop) keepDns.push_back(e);
    }
    st.pendingDNS = Term::seq(std::move(keepDns));
  }

  void navBack(Window* w) {
    if (!w) return;
    int i = w->activeIndex();
    if (i <= 0) return;
    w->documents[i].active = false;
    w->documents[i - 1].active = true;
    cancelNav(w->nonce);
  }

  void navForward(Window* w) {
    if (!w) return;
    int i = w->activeIndex();
    if (i < 0 || static_cast<size_t>(i + 1) >= w->documents.size()) return;
    w->documents[i].active = false;
    w->documents[i + 1].active = true;
    cancelNav(w->nonce);
  }

  WinPath getNavigableWindow(const WinPath& wp, const Term& windowRef, bool noreferrer) {
    if (windowRef == wBlank()) {
      Window fresh;
      fresh.nonce = nu(9);
      fresh.opener = noreferrer ? Term::bot() : windowAt(st, wp)->nonce;
      st.windows.push_back(std::move(fresh));
      return {st.windows.size() - 1};
    }
    for (const WinPath& p : navigableWindows(wp, st))
      if (windowAt(st, p)->nonce == windowRef) return p;
    return wp;
  }

  WinPath getWindow(const WinPath& wp, const Term& windowRef) {
    for (const WinPath& p : subwindowPaths(st)) {
      if (windowAt(st, p)->nonce == windowRef) {
        Term o = activeOrigin(st, p);
        if (!o.isBot() && o == activeOrigin(st, wp)) return p;
        break;
      }
    }
    return wp;
  }

  // Attach cookie/origin/referrer headers, remember the request under a
  // fresh pendingDNS key and emit the DNS request.
  void send(const Term& reference, HttpRequest message, Term url, const Term& origin,
            Term referrer, const Term& referrerPolicy) {
    Url u{url};
    for (const Term& d : st.sts.args()) {
      if (d == message.host()) {
        u = u.withProtocol(protoS());
        url = u.t;
        break;
      }
    }
    std::vector<Term> cookiePairs;
    for (const Term& c : dictGet(st.cookies, message.host()).args()) {
      auto cv = validateCookie(c);
      if (!ok(cv)) continue;
      if (get(cv).secure() && !(u.protocol() == protoS())) continue;
      cookiePairs.push_back(Term::seq({get(cv).name(), get(cv).value()}));
    }
    Term headers = dictPut(message.headers(), hCookie(), Term::seq(std::move(cookiePairs)));
    if (!origin.isBot()) headers = dictPut(headers, hOrigin(), origin);
    if (referrerPolicy == rpNoReferrer()) referrer = Term::bot();
    if (!referrer.isBot()) {
      auto rv = validateUrl(referrer);
      if (ok(rv)) {
        if (referrerPolicy == rpOrigin()) {
          // Referrer stripped down to its origin.
          referrer = Url::make(get(rv).protocol(), get(rv).host(), Term::str("/")).t;
        } else {
          // Fragments never leave the browser in a Referer header.
          referrer = get(rv).withFragment(Term::bot()).t;
        }
        headers = dictPut(headers, hReferer(), referrer);
      }
    }
    message = message.withHeaders(headers);
    st.pendingDNS = dictPut(st.pendingDNS, nu(8), Term::seq({reference, message.t, url}));
    emit(st.dnsAddress, DnsRequest::make(message.host(), nu(8)).t);
  }

  void runScript(const WinPath& wp) {
    Window* w = windowAt(st, wp);
    Document* d = w ? w->activeDocument() : nullptr;
    if (!d) return;
    Term origin = d->origin();

    ScriptInput in;
    in.tree = cleanTree(st, *d);
    in.docNonce = d->nonce;
    in.scriptstate = d->scriptstate;
    in.scriptinputs = d->scriptinputs;
    {
      std::vector<Term> pairs;
      Term host = origin.isSeq() ? origin.at(0) : Term::bot();
      for (const Term& c : dictGet(st.cookies, host).args()) {
        auto cv = validateCookie(c);
        if (!ok(cv)) continue;
        if (get(cv).httpOnly()) continue;
        if (get(cv).secure() && !(origin.isSeq() && origin.at(1) == protoS())) continue;
        pairs.push_back(Term::seq({get(cv).name(), get(cv).value()}));
      }
      in.cookies = Term::seq(std::move(pairs));
    }
    const Window& tlw = st.windows[wp[0]];
    in.sessionStorage = dictGet(st.sessionStorage, Term::seq({origin, tlw.nonce}));
    in.localStorage = dictGet(st.localStorage, origin);
    in.secrets = dictGet(st.secrets, origin);
    in.ids = st.ids;

    std::string name(d->script.isStr() ? d->script.text() : "");
    auto it = scripts.find(name);
    if (it == scripts.end()) it = scripts.find("att_script");
    if (it == scripts.end()) return;

    rt::ScriptRunMeta meta;
    meta.script = it->first;
    meta.docNonce = d->nonce;
    ScriptOutput so = it->second->run(in, ch, meta);

    Term stateN = substituteScriptVars(so.state, 10);
    Term cookiesN = substituteScriptVars(so.cookies, 10);
    Term localN = substituteScriptVars(so.localStorage, 10);
    Term sessionN = substituteScriptVars(so.sessionStorage, 10);
    Term command = substituteScriptVars(so.command, 10);

    Term host = origin.isSeq() ? origin.at(0) : Term::bot();
    st.cookies = dictPut(st.cookies, host, cookieMerge(dictGet(st.cookies, host), cookiesN));
    st.localStorage = dictPut(st.localStorage, origin, localN);
    st.sessionStorage = dictPut(st.sessionStorage, Term::seq({origin, tlw.nonce}), sessionN);
    d->scriptstate = stateN;
    const Term docLocation = d->location;
    const Term docHeaders = d->headers;
    const Term docOrigin = origin;
    const Term docNonce = d->nonce;
    const Term runnerWindowNonce = w->nonce;

    if (!(command.isSeq() && command.size() > 0)) {
      out.meta.script = meta;
      return;
    }
    const Term kind = command.at(0);

    if (kind == cHref() && command.size() == 4) {
      auto uv = validateUrl(command.at(1));
      if (!ok(uv)) { out.meta.script = meta; return; }
      bool noref = command.at(3).isTop();
      WinPath target = getNavigableWindow(wp, command.at(2), noref);
      HttpRequest req = HttpRequest::make(nu(4), mGet(), get(uv).host(), get(uv).path(),
                                          get(uv).params(), Term::seq({}), Term::seq({}));
      Term policy = noref ? rpNoReferrer() : dictGet(docHeaders, hReferrerPolicy());
      cancelNav(windowAt(st, target)->nonce);
      meta.commandTargetHost = get(uv).host();
      out.meta.script = meta;
      send(windowAt(st, target)->nonce, req, get(uv).t, Term::bot(), docLocation, policy);
      return;
    }
    if (kind == cIframe() && command.size() == 3) {
      auto uv = validateUrl(command.at(1));
      if (!ok(uv)) { out.meta.script = meta; return; }
      WinPath target = getWindow(wp, command.at(2));
      Window* tw = windowAt(st, target);
      Document* td = tw->activeDocument();
      if (!td) { out.meta.script = meta; return; }
      Term referrer = td->location;
      Term policy = dictGet(docHeaders, hReferrerPolicy());
      HttpRequest req = HttpRequest::make(nu(4), mGet(), get(uv).host(), get(uv).path(),
                                          get(uv).params(), Term::seq({}), Term::seq({}));
      Window sub;
      sub.nonce = nu(5);
      sub.opener = Term::bot();
      td->subwindows.push_back(std::move(sub));
      meta.commandTargetHost = get(uv).host();
      out.meta.script = meta;
      send(nu(5), req, get(uv).t, Term::bot(), referrer, policy);
      return;
    }
    if (kind == cForm() && command.size() == 5) {
      auto uv = validateUrl(command.at(1));
      const Term method = command.at(2);
      if (!ok(uv) || !(method == mGet() || method == mPost())) { out.meta.script = meta; return; }
      WinPath target = getNavigableWindow(wp, command.at(4), false);
      Term body = Term::seq({});
      Term params = get(uv).params();
      Term originHdr = Term::bot();
      if (method == mGet()) {
        params = command.at(3);
      } else {
        body = command.at(3);
        originHdr = docOrigin;
      }
      HttpRequest req = HttpRequest::make(nu(4), method, get(uv).host(), get(uv).path(), params,
                                          Term::seq({}), body);
      Term policy = dictGet(docHeaders, hReferrerPolicy());
      cancelNav(windowAt(st, target)->nonce);
      meta.commandTargetHost = get(uv).host();
      out.meta.script = meta;
      send(windowAt(st, target)->nonce, req, get(uv).t, originHdr, docLocation, policy);
      return;
    }
    if (kind == cSetScript() && command.size() == 3) {
      WinPath target = getWindow(wp, command.at(1));
      if (Document* td = windowAt(st, target)->activeDocument()) td->script = command.at(2);
      out.meta.script = meta;
      return;
    }
    if (kind == cSetScriptState() && command.size() == 3) {
      WinPath target = getWindow(wp, command.at(1));
      if (Document* td = windowAt(st, target)->activeDocument()) td->scriptstate = command.at(2);
      out.meta.script = meta;
      return;
    }
    if (kind == cXhr() && command.size() == 5) {
      auto uv = validateUrl(command.at(1));
      const Term method = command.at(2);
      const Term xhrref = command.at(4);
      bool refOk = xhrref.isNonce() || xhrref.isBot() ||
                   (xhrref.isVar() && xhrref.varKind() == VarKind::Process);
      if (!ok(uv) || !refOk || method == Term::str("CONNECT") || method == Term::str("TRACE") ||
          method == Term::str("TRACK")) {
        out.meta.script = meta;
        return;
      }
      if (!(docOrigin.isSeq() && get(uv).host() == docOrigin.at(0) &&
            get(uv).protocol() == docOrigin.at(1))) {
        out.meta.script = meta;  // cross-origin XHR dropped
        return;
      }
      Term data = command.at(3);
      Term originHdr = docOrigin;
      if (method == mGet() || method == mHead()) {
        data = Term::seq({});
        originHdr = Term::bot();
      }
      HttpRequest req = HttpRequest::make(nu(4), method, get(uv).host(), get(uv).path(),
                                          get(uv).params(), Term::seq({}), data);
      Term policy = dictGet(docHeaders, hReferrerPolicy());
      meta.commandTargetHost = get(uv).host();
      out.meta.script = meta;
      send(Term::seq({docNonce, xhrref}), req, get(uv).t, originHdr, docLocation, policy);
      return;
    }
    if (kind == cBack() && command.size() == 2) {
      WinPath target = getNavigableWindow(wp, command.at(1), false);
      navBack(windowAt(st, target));
      out.meta.script = meta;
      return;
    }
    if (kind == cForward() && command.size() == 2) {
      WinPath target = getNavigableWindow(wp, command.at(1), false);
      navForward(windowAt(st, target));
      out.meta.script = meta;
      return;
    }
    if (kind == cClose() && command.size() == 2) {
      WinPath target = getNavigableWindow(wp, command.at(1), false);
      if (target.size() == 1) {
        st.windows.erase(st.windows.begin() + static_cast<long>(target[0]));
      } else {
        WinPath parent(target.begin(), target.end() - 2);
        Window* pw = windowAt(st, parent);
        auto& subs = pw->documents[target[target.size() - 2]].subwindows;
        subs.erase(subs.begin() + static_cast<long>(target.back()));
      }
      out.meta.script = meta;
      return;
    }
    if (kind == cPostMessage() && command.size() == 4) {
      for (const WinPath& p : subwindowPaths(st)) {
        Window* tw = windowAt(st, p);
        if (!(tw->nonce == command.at(1))) continue;
        if (Document* td = tw->activeDocument()) {
          const Term& restrict = command.at(3);
          if (restrict.isBot() || td->origin() == restrict) {
            std::vector<Term> inputs(td->scriptinputs.args());
            inputs.push_back(
                Term::seq({cPostMessage(), runnerWindowNonce, docOrigin, command.at(2)}));
            td->scriptinputs = Term::seq(std::move(inputs));
          }
        }
        break;
      }
      out.meta.script = meta;
      return;
    }
    out.meta.script = meta;  // unknown command
  }

  void processResponse(const HttpResponse& response, const Term& reference,
                       const HttpRequest& request, const Term& requestUrl) {
    if (dictHas(response.headers(), hSetCookie())) {
      for (const Term& c : response.header(hSetCookie()).args()) {
        auto cv = validateCookie(c);
        if (!ok(cv)) continue;
        st.cookies = dictPut(st.cookies, request.host(),
                             addCookie(dictGet(st.cookies, request.host()), c));
      }
    }
    Url requrl{requestUrl};
    if (dictHas(response.headers(), hSts()) && requrl.protocol() == protoS()) {
      std::vector<Term> sts(st.sts.args());
      sts.push_back(request.host());
      st.sts = Term::seq(std::move(sts));
    }
    Term referrer =
        dictHas(request.headers(), hReferer()) ? request.header(hReferer()) : Term::bot();

    if (dictHas(response.headers(), hLocation()) &&
        (response.status() == status303() || response.status() == status307())) {
      auto uv = validateUrl(response.header(hLocation()));
      if (!ok(uv)) return;
      Url url = get(uv);
      if (url.fragment().isBot()) url = url.withFragment(requrl.fragment());
      Term method = request.method();
      Term body = request.body();
      Term origin = Term::bot();
      if (dictHas(request.headers(), hOrigin()))
        origin = Term::seq({request.header(hOrigin()),
                            Term::seq({request.host(), url.protocol()})});
      if (response.status() == status303() && !(method == mGet() || method == mHead())) {
        method = mGet();
        body = Term::seq({});
      }
      bool isWindow = false;
      for (const WinPath& p : subwindowPaths(st))
        if (windowAt(st, p)->nonce == reference) isWindow = true;
      if (!isWindow) return;  // do not redirect XHRs
      HttpRequest req = HttpRequest::make(nu(6), method, url.host(), url.path(), url.params(),
                                          Term::seq({}), body);
      Term policy = response.header(hReferrerPolicy());
      send(reference, req, url.t, origin, referrer, policy);
      return;
    }

    for (const WinPath& p : subwindowPaths(st)) {
      Window* w = windowAt(st, p);
      if (!(w->nonce == reference)) continue;
      Term body = normalize(response.body());
      if (!(body.isSeq() && body.size() == 2)) return;  // body must be <script, state>
      Document d;
      d.nonce = nu(7);
      d.location = requestUrl;
      d.headers = response.headers();
      d.referrer = referrer;
      d.script = body.at(0);
      d.scriptstate = body.at(1);
      d.scriptinputs = Term::seq({});
      d.active = true;
      out.meta.docsCreated.push_back(d.nonce);
      int ai = w->activeIndex();
      if (w->documents.empty() || ai < 0) {
        w->documents.clear();
        w->documents.push_back(std::move(d));
      } else {
        w->documents[ai].active = false;
        w->documents.resize(static_cast<size_t>(ai) + 1);  // drop forward history
        w->documents.push_back(std::move(d));
      }
      return;
    }
    if (reference.isSeq() && reference.size() == 2) {  // XHR delivery
      for (const WinPath& p : subwindowPaths(st)) {
        Window* w = windowAt(st, p);
        Document* d = w->activeDocument();
        if (!d || !(d->nonce == reference.at(0))) continue;
        Term headers = dictRemove(response.headers(), hSetCookie());
        std::vector<Term> inputs(d->scriptinputs.args());
        inputs.push_back(Term::seq({cXhr(), headers, response.body(), reference.at(1)}));
        d->scriptinputs = Term::seq(std::move(inputs));
        return;
      }
    }
  }
};

}  // namespace

rt::RelationResult BrowserRelation::apply(const Term& event, const Term& state,
                                          rt::Chooser& ch) const {
  const Term& a = event.at(0);
  const Term& m = event.at(2);
  Exec ex{cfg_, *scripts_, ch, a, decodeState(state), {}};

  if (!ex.st.corrupt.isBot()) {
    // Corrupted browser: collect the message, then emit something derivable.
    ex.st.pendingRequests = Term::seq({m, ex.st.pendingRequests});
    std::vector<Term> recorded;
    Term cur = ex.st.pendingRequests;
    while (cur.isSeq() && cur.size() == 2) {
      recorded.push_back(cur.at(0));
      cur = cur.at(1);
    }
    if (recorded.empty() || cfg_.addressMenu.empty()) return ex.finish();
    size_t mi = ch.pick(recorded.size(), "corrupt.msg");
    size_t ai = ch.pick(cfg_.addressMenu.size(), "corrupt.addr");
    ex.emit(cfg_.addressMenu[ai], recorded[mi]);
    return ex.finish();
  }

  if (m == rt::triggerMsg()) {
    size_t sw = ch.pick(5, "switch");
    if (sw == 0) {  // run a script
      auto cands = documentedWindowPaths(ex.st);
      if (cands.empty()) return ex.finish();
      size_t wi = ch.pick(cands.size(), "window");
      ex.runScript(cands[wi]);
      return ex.finish();
    }
    if (sw == 1) {  // urlbar
      if (cfg_.urlMenu.empty()) return ex.finish();
      Term windowNonce;
      if (ch.pickBool("newwindow")) {
        Window fresh;
        fresh.nonce = Exec::nu(1);
        fresh.opener = Term::bot();
        windowNonce = fresh.nonce;
        ex.st.windows.push_back(std::move(fresh));
      } else {
        std::vector<size_t> tls;
        for (size_t i = 0; i < ex.st.windows.size(); ++i)
          if (!ex.st.windows[i].documents.empty()) tls.push_back(i);
        if (tls.empty()) return ex.finish();
        windowNonce = ex.st.windows[tls[ch.pick(tls.size(), "tlw")]].nonce;
      }
      size_t ui = ch.pick(cfg_.urlMenu.size(), "url");
      auto uv = validateUrl(cfg_.urlMenu[ui]);
      if (!ok(uv)) return ex.finish();
      Url url = get(uv);
      HttpRequest req = HttpRequest::make(Exec::nu(2), mGet(), url.host(), url.path(),
                                          url.params(), Term::seq({}), Term::seq({}));
      ex.send(windowNonce, req, url.t, Term::bot(), Term::bot(), Term::bot());
      return ex.finish();
    }
    if (sw == 2) {  // reload
      auto cands = documentedWindowPaths(ex.st);
      if (cands.empty()) return ex.finish();
      WinPath wp = cands[ch.pick(cands.size(), "window")];
      Window* w = windowAt(ex.st, wp);
      Document* d = w->activeDocument();
      if (!d) return ex.finish();
      auto uv = validateUrl(d->location);
      if (!ok(uv)) return ex.finish();
      Url url = get(uv);
      HttpRequest req = HttpRequest::make(Exec::nu(2), mGet(), url.host(), url.path(),
                                          url.params(), Term::seq({}), Term::seq({}));
      Term referrer = d->referrer;
      Term wn = w->nonce;
      ex.cancelNav(wn);
      ex.send(wn, req, url.t, Term::bot(), referrer, Term::bot());
      return ex.finish();
    }
    auto cands = documentedWindowPaths(ex.st);
    if (cands.empty()) return ex.finish();
    WinPath wp = cands[ch.pick(cands.size(), "window")];
    if (sw == 3) ex.navForward(windowAt(ex.st, wp));
    else ex.navBack(windowAt(ex.st, wp));
    return ex.finish();
  }

  if (m == rt::fullCorruptMsg()) {
    ex.st.corrupt = rt::fullCorruptMsg();
    return ex.finish();
  }

  if (m == rt::closeCorruptMsg()) {
    ex.st.secrets = Term::seq({});
    ex.st.windows.clear();
    ex.st.pendingDNS = Term::seq({});
    ex.st.pendingRequests = Term::seq({});
    ex.st.sessionStorage = Term::seq({});
    std::vector<Term> kept;
    for (const Term& entry : ex.st.cookies.args()) {
      if (!(entry.isSeq() && entry.size() == 2)) continue;
      std::vector<Term> cs;
      for (const Term& c : entry.at(1).args()) {
        auto cv = validateCookie(c);
        if (ok(cv) && !get(cv).session()) cs.push_back(c);  // session cookies wiped
      }
      kept.push_back(Term::seq({entry.at(0), Term::seq(std::move(cs))}));
    }
    ex.st.cookies = Term::seq(std::move(kept));
    ex.st.corrupt = rt::closeCorruptMsg();
    return ex.finish();
  }

  // Encrypted HTTP response matching a pending request.
  for (const Term& e : ex.st.pendingRequests.args()) {
    if (!(e.isSeq() && e.size() == 5) || !e.at(3).isNonce()) continue;
    Term dec = normalize(Term::app(Op::DecS, {m, e.at(3)}));
    if (!(dec.isSeq() && dec.size() == 5 && dec.at(0) == tHttpResp())) continue;
    auto rv = validateResponse(dec);
    if (!ok(rv)) return ex.stopUnchanged(state);
    auto reqv = validateRequest(e.at(1));
    if (!ok(reqv)) return ex.stopUnchanged(state);
    if (!(get(rv).nonce() == get(reqv).nonce())) return ex.stopUnchanged(state);
    std::vector<Term> keep;
    for (const Term& x : ex.st.pendingRequests.args())
      if (!(x == e)) keep.push_back(x);
    Term ref = e.at(0), reqT = e.at(1), urlT = e.at(2);
    ex.st.pendingRequests = Term::seq(std::move(keep));
    ex.processResponse(get(rv), ref, get(reqv), urlT);
    return ex.finish();
  }

  // Plain HTTP response, matched on the request nonce.
  if (m.isSeq() && m.size() == 5 && m.at(0) == tHttpResp()) {
    for (const Term& e : ex.st.pendingRequests.args()) {
      if (!(e.isSeq() && e.size() == 5) || !e.at(3).isBot()) continue;
      auto rv = validateResponse(m);
      auto reqv = validateRequest(e.at(1));
      if (!ok(rv) || !ok(reqv)) return ex.stopUnchanged(state);
      if (!(get(rv).nonce() == get(reqv).nonce())) continue;
      std::vector<Term> keep;
      for (const Term& x : ex.st.pendingRequests.args())
        if (!(x == e)) keep.push_back(x);
      Term ref = e.at(0), urlT = e.at(2);
      ex.st.pendingRequests = Term::seq(std::move(keep));
      ex.processResponse(get(rv), ref, get(reqv), urlT);
      return ex.finish();
    }
    return ex.stopUnchanged(state);
  }

  // DNS response moving a pending entry onto the wire.
  if (auto dv = validateDnsResponse(m); ok(dv)) {
    const DnsResponse& dns = get(dv);
    Term entry = dictGet(ex.st.pendingDNS, dns.nonce());
    if (!(entry.isSeq() && entry.size() == 3)) return ex.stopUnchanged(state);
    auto reqv = validateRequest(entry.at(1));
    if (!ok(reqv) || !(dns.domain() == get(reqv).host())) return ex.stopUnchanged(state);
    auto uv = validateUrl(entry.at(2));
    if (!ok(uv)) return ex.stopUnchanged(state);
    Term message;
    std::vector<Term> pend(ex.st.pendingRequests.args());
    if (get(uv).protocol() == protoS()) {
      pend.insert(pend.begin(),
                  Term::seq({entry.at(0), entry.at(1), entry.at(2), Exec::nu(3), dns.address()}));
      Term key = dictGet(ex.st.keyMapping, get(reqv).host());
      message = Term::app(Op::EncA, {Term::seq({entry.at(1), Exec::nu(3)}), key});
    } else {
      pend.insert(pend.begin(), Term::seq({entry.at(0), entry.at(1), entry.at(2), Term::bot(),
                                           dns.address()}));
      message = entry.at(1);
    }
    ex.st.pendingRequests = Term::seq(std::move(pend));
    ex.st.pendingDNS = dictRemove(ex.st.pendingDNS, dns.nonce());
    ex.emit(dns.address(), message);
    return ex.finish();
  }

  return ex.stopUnchanged(state);
}

}  // namespace oasim::browser
