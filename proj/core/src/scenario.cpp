#include "oasim/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "oasim/idp.hpp"
#include "oasim/rp.hpp"
#include "oasim/wire.hpp"

using namespace oasim::web;
using namespace oasim::rt;
using namespace oasim::attacker;

namespace oasim::harness {

namespace {

Term s(const char* x) { return Term::str(x); }
Term nuv(uint32_t i) { return Term::var(VarKind::Process, i); }

Term memoTag() { return s("memo"); }

Term memoEvent(const Term& selfAddr, const char* label, std::vector<Term> payload) {
  std::vector<Term> xs{memoTag(), s(label)};
  for (Term& p : payload) xs.push_back(std::move(p));
  return Term::seq({selfAddr, selfAddr, Term::seq(std::move(xs))});
}

bool isMemoMsg(const Term& msg) {
  return msg.isSeq() && msg.size() >= 2 && msg.at(0) == memoTag();
}

// All memos with the given label, newest first.
std::vector<Term> findMemos(const View& v, const char* label) {
  std::vector<Term> out;
  for (const Term& e : v.events) {
    if (!(e.isSeq() && e.size() == 3)) continue;
    const Term& msg = e.at(2);
    if (isMemoMsg(msg) && msg.at(1) == s(label)) out.push_back(msg);
  }
  return out;
}

// The scenario world: one browser, one RP, one honest IdP, one attacker
// (playing a malicious RP/IdP through its own domains), plus a DNS server
// in web-attacker systems.
struct World {
  std::shared_ptr<Registry> reg;
  bool web = false;
  bool withAidp = false;  // register the attacker IdP at the RP / give the user an account there

  Term aB, aRp, aHidp, aAtt, aDns;
  Term dRp = s("rp.com"), dHidp = s("hidp.com"), dAtt = s("attacker.com"), dAidp = s("aidp.com");
  std::string cRp = "c_rp_hidp", cRpAidp = "c_rp_aidp", cAtt = "c_att_hidp";

  Term aliceHidp, attackerHidp, aliceAidp;

  void build(const FixToggles& toggles) {
    reg = std::make_shared<Registry>();
    reg->toggles = toggles;
    aB = Term::addr("a_b");
    aRp = Term::addr("a_rp");
    aHidp = Term::addr("a_hidp");
    aAtt = Term::addr("a_att");
    aDns = Term::addr("a_dns");
    reg->addParty({"b", PartyKind::Browser, {aB}, {}});
    reg->addParty({"rp", PartyKind::RelyingParty, {aRp}, {"rp.com"}});
    reg->addParty({"hidp", PartyKind::IdentityProvider, {aHidp}, {"hidp.com"}});
    reg->addParty({"att", web ? PartyKind::WebAttacker : PartyKind::NetworkAttacker,
                   {aAtt},
                   {"attacker.com", "aidp.com"}});
    if (web) reg->addParty({"dns", PartyKind::DnsServer, {aDns}, {}});
    for (const char* d : {"rp.com", "hidp.com", "attacker.com", "aidp.com"})
      reg->assignSslKey(d);
    aliceHidp = Term::seq({s("alice"), dHidp});
    attackerHidp = Term::seq({s("attacker"), dHidp});
    reg->addIdentity({"alice", "hidp.com"}, "b", {"rp"});
    reg->addIdentity({"attacker", "hidp.com"}, "att", {});
    if (withAidp) {
      aliceAidp = Term::seq({s("alice"), dAidp});
      reg->addIdentity({"alice", "aidp.com"}, "b", {});
    }
    reg->registerClient("rp", "hidp.com", cRp, toggles.clientSecretPresent);
    reg->registerClient("att", "hidp.com", cAtt, false);
    if (withAidp) reg->registerClient("rp", "aidp.com", cRpAidp, false);
    reg->mintResources();
  }

  Term url(const Term& proto, const Term& host, const char* path, Term params = Term::seq({}),
           Term frag = Term::bot()) const {
    return Url::make(proto, host, s(path), std::move(params), std::move(frag)).t;
  }

  Term param(const char* k, Term v) const { return Term::seq({s(k), std::move(v)}); }

  // Registered redirect URI for a client (host belongs to the client owner).
  Term registeredRedirect(const Term& host, const std::string& clientId) const {
    Term params = Term::seq({});
    if (reg->toggles.issParamCheck) {
      params = dictPut(params, s("iss"), dHidp);
      params = dictPut(params, s("client_id"), s(clientId.c_str()));
    }
    if (reg->toggles.naiveTracking) params = dictPut(params, s("idp"), dHidp);
    return Url::make(protoS(), host, oauth::pRedirectionEndpoint(), params, Term::seq({})).t;
  }

  Term dnsTable() const {
    Term t = Term::seq({});
    for (const Party& p : reg->parties)
      for (const std::string& d : p.domains)
        t = dictPut(t, s(d.c_str()), p.addresses.front());
    return t;
  }

  Term browserState() const {
    Term secrets = Term::seq({});
    Term pwAlice = *reg->secretOfId(aliceHidp);
    secrets = dictPut(secrets, Term::seq({dHidp, protoS()}), Term::seq({pwAlice}));
    secrets = dictPut(secrets, Term::seq({dRp, protoS()}), Term::seq({pwAlice}));
    std::vector<Term> ids{aliceHidp};
    if (withAidp) {
      secrets = dictPut(secrets, Term::seq({dAidp, protoS()}),
                        Term::seq({*reg->secretOfId(aliceAidp)}));
      ids.push_back(aliceAidp);
    }
    browser::BrowserState b;
    b.ids = Term::seq(std::move(ids));
    b.secrets = secrets;
    b.cookies = Term::seq({});
    b.localStorage = Term::seq({});
    b.sessionStorage = Term::seq({});
    b.keyMapping = reg->keyMappingTerm();
    b.sts = Term::seq({});
    b.dnsAddress = web ? aDns : aAtt;
    b.pendingDNS = Term::seq({});
    b.pendingRequests = Term::seq({});
    b.corrupt = Term::bot();
    return browser::encodeState(b);
  }

  Term rpState() const {
    Term idps = Term::seq({});
    Term secret = reg->secretOfClientId(s(cRp.c_str()));
    idps = dictPut(
        idps, dHidp,
        oauth::idpRegistrationRecord(url(protoS(), dHidp, "/token"), url(protoS(), dHidp, "/auth"),
                                     url(protoS(), dHidp, "/introspect"), s(cRp.c_str()), secret));
    if (withAidp) {
      idps = dictPut(idps, dAidp,
                     oauth::idpRegistrationRecord(
                         url(protoS(), dAidp, "/token"), url(protoS(), dAidp, "/auth"),
                         url(protoS(), dAidp, "/introspect"), s(cRpAidp.c_str()), Term::bot()));
    }
    oauth::RpStateParts parts;
    parts.dnsAddress = web ? aDns : aAtt;
    parts.idps = idps;
    parts.keyMapping = reg->keyMappingTerm();
    parts.sslKeys = Term::seq({Term::seq({dRp, reg->sslKey("rp.com")})});
    return oauth::initialRpState(parts);
  }

  Term idpState() const {
    Term clients = Term::seq({});
    clients = dictPut(clients, s(cRp.c_str()), Term::seq({registeredRedirect(dRp, cRp)}));
    clients = dictPut(clients, s(cAtt.c_str()), Term::seq({registeredRedirect(dAtt, cAtt)}));
    oauth::IdpStateParts parts;
    parts.sslKeys = Term::seq({Term::seq({dHidp, reg->sslKey("hidp.com")})});
    parts.srlist = Term::seq(reg->allResources("hidp"));
    parts.clients = clients;
    return oauth::initialIdpState(parts);
  }

  Term attackerState() const {
    Term attDoms = Term::seq({Term::seq({dAtt, reg->sslKey("attacker.com")}),
                              Term::seq({dAidp, reg->sslKey("aidp.com")})});
    Term extra = Term::seq({*reg->secretOfId(attackerHidp), attackerHidp});
    return initialAttackerState(attDoms, reg->keyMappingTerm(), extra);
  }
};

// ---------------------------------------------------------------------------
// Attacker recipe library. Fresh nonces nu(90+) avoid clashing with honest
// placeholder indices inside the same step.

Term httpsEvent(const World& w, const Term& toAddr, const Term& fromAddr, const Term& host,
                const HttpRequest& req, const Term& symKey) {
  Term wire = Term::app(Op::EncA,
                        {Term::seq({req.t, symKey}), w.reg->sslPubKey(std::string(host.text()))});
  return Term::seq({toAddr, fromAddr, wire});
}

// Answer any DNS request truthfully (network-attacker scenarios where the
// attacker is everyone's DNS).
Recipe dnsHonestRecipe(const World& w) {
  Term table = w.dnsTable();
  return {"dns-honest", [table](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            if (v.events.empty()) return std::nullopt;
            const Term& e = v.events.front();
            if (!(e.isSeq() && e.size() == 3)) return std::nullopt;
            auto rq = validateDnsRequest(e.at(2));
            if (!ok(rq)) return std::nullopt;
            Term answer = dictGet(table, get(rq).domain());
            if (!answer.isAddr()) return std::nullopt;
            Term resp = DnsResponse::make(get(rq).domain(), answer, get(rq).nonce()).t;
            return std::vector<Term>{Term::seq({e.at(1), e.at(0), resp})};
          }};
}

// 307 scenario: the replayed credentials POST reaches the attacker's
// redirection endpoint; use the password for a token grant bound to the
// RP's client id.
Recipe leakRecipe(const World& w) {
  return {"leak", [w](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            if (v.events.empty()) return std::nullopt;
            auto opened = v.openRequest(v.events.front());
            if (!opened || !(opened->request.path() == oauth::pRedirectionEndpoint()))
              return std::nullopt;
            Term body = opened->request.body();
            Term id = dictGet(body, s("username"));
            Term pw = dictGet(body, s("password"));
            if (pw == Term::seq({})) return std::nullopt;
            Term grant = Term::seq({});
            grant = dictPut(grant, s("grant_type"), s("password"));
            grant = dictPut(grant, s("username"), id);
            grant = dictPut(grant, s("password"), pw);
            grant = dictPut(grant, s("client_id"), s(w.cRp.c_str()));
            HttpRequest tokenReq = HttpRequest::make(nuv(90), mPost(), w.dHidp, s("/token"),
                                                     Term::seq({}), Term::seq({}), grant);
            return std::vector<Term>{httpsEvent(w, w.aHidp, w.aAtt, w.dHidp, tokenReq, nuv(91)),
                                     memoEvent(w.aAtt, "pwgrant", {nuv(90), nuv(91)})};
          }};
}

// Introspect a token received under the key remembered by `memoLabel`,
// optionally also opening a fresh interactive login session at the RP.
Recipe introspectTokenRecipe(const World& w, const char* memoLabel, bool alsoStartLogin) {
  std::string label = memoLabel;
  return {alsoStartLogin ? "introspect-and-start" : "introspect-token",
          [w, label, alsoStartLogin](const View& v,
                                      rt::Chooser&) -> std::optional<std::vector<Term>> {
            for (const Term& memo : findMemos(v, label.c_str())) {
              Term key = memo.at(3);
              auto resp = v.findResponse(key);
              if (!resp) continue;
              Term token = dictGet(resp->body(), s("access_token"));
              if (token == Term::seq({})) continue;
              Term params = dictPut(Term::seq({}), s("token"), token);
              HttpRequest req = HttpRequest::make(nuv(90), mGet(), w.dHidp, s("/introspect"),
                                                  params, Term::seq({}), Term::seq({}));
              std::vector<Term> out{httpsEvent(w, w.aHidp, w.aAtt, w.dHidp, req, nuv(91)),
                                    memoEvent(w.aAtt, "intro", {nuv(90), nuv(91)})};
              if (alsoStartLogin) {
                Term startHeaders =
                    dictPut(Term::seq({}), hOrigin(), Term::seq({w.dRp, protoS()}));
                HttpRequest startReq =
                    HttpRequest::make(nuv(92), mPost(), w.dRp, oauth::pStartInteractiveLogin(),
                                      Term::seq({}), startHeaders, w.dHidp);
                out.push_back(httpsEvent(w, w.aRp, w.aAtt, w.dRp, startReq, nuv(93)));
                out.push_back(memoEvent(w.aAtt, "startil", {nuv(92), nuv(93)}));
              }
              return out;
            }
            return std::nullopt;
          }};
}

// Complete a login at the RP through the implicit-grant receive endpoint,
// using the session from the "startil" memo and a token found under
// `tokenMemo` (either a token response or a direct memo payload).
Recipe receiveTokenRecipe(const World& w, const char* tokenMemo, bool tokenFromResponse) {
  std::string label = tokenMemo;
  return {"receive-token",
          [w, label, tokenFromResponse](const View& v,
                                         rt::Chooser&) -> std::optional<std::vector<Term>> {
            Term token;
            if (tokenFromResponse) {
              for (const Term& memo : findMemos(v, label.c_str())) {
                auto resp = v.findResponse(memo.at(3));
                if (!resp) continue;
                Term t = dictGet(resp->body(), s("access_token"));
                if (!(t == Term::seq({}))) {
                  token = t;
                  break;
                }
              }
            } else {
              auto memos = findMemos(v, label.c_str());
              if (!memos.empty()) token = memos.front().at(2);
            }
            if (token == Term::seq({}) || token.isBot()) return std::nullopt;
            for (const Term& memo : findMemos(v, "startil")) {
              auto resp = v.findResponse(memo.at(3));
              if (!resp) continue;
              Term cookies = dictGet(resp->header(hSetCookie()), s("loginSessionId"));
              if (!(cookies.isSeq() && cookies.size() == 4)) continue;
              Term lsid = cookies.at(0);
              auto uv = validateUrl(resp->header(hLocation()));
              if (!ok(uv)) continue;
              Term state = dictGet(get(uv).params(), s("state"));
              Term headers = dictPut(Term::seq({}), hOrigin(), Term::seq({w.dRp, protoS()}));
              headers = dictPut(headers, hCookie(),
                                Term::seq({Term::seq({s("loginSessionId"), lsid})}));
              Term body = Term::seq({token, state, w.dHidp});
              HttpRequest req =
                  HttpRequest::make(nuv(90), mPost(), w.dRp, oauth::pReceiveTokenFromImplicitGrant(),
                                    Term::seq({}), headers, body);
              return std::vector<Term>{httpsEvent(w, w.aRp, w.aAtt, w.dRp, req, nuv(91)),
                                       memoEvent(w.aAtt, "rtig", {nuv(90), nuv(91)})};
            }
            return std::nullopt;
          }};
}

// Mix-up: the attacker IdP bounces the browser to the honest IdP, echoing
// the state and response type but swapping in the RP's client id there.
Recipe aidpRedirectRecipe(const World& w) {
  return {"aidp-redirect", [w](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            if (v.events.empty()) return std::nullopt;
            auto opened = v.openRequest(v.events.front());
            if (!opened || !(opened->domain == w.dAidp)) return std::nullopt;
            Term state = dictGet(opened->request.params(), s("state"));
            Term rtype = dictGet(opened->request.params(), s("response_type"));
            Term params = Term::seq({});
            params = dictPut(params, s("response_type"), rtype);
            params = dictPut(params, s("client_id"), s(w.cRp.c_str()));
            params = dictPut(params, s("state"), state);
            Term loc = Url::make(protoS(), w.dHidp, s("/auth"), params, Term::bot()).t;
            Term headers = dictPut(Term::seq({}), hLocation(), loc);
            HttpResponse resp =
                HttpResponse::make(opened->request.nonce(), status303(), headers, Term::seq({}));
            Term wire = Term::app(Op::EncS, {resp.t, opened->symKey});
            return std::vector<Term>{Term::seq({opened->from, opened->to, wire})};
          }};
}

// Mix-up, code mode: the RP redeems the code at the attacker's token
// endpoint; redeem it at the honest IdP instead (authorization break), or
// memo it for the authentication continuation.
Recipe codeLeakRecipe(const World& w, bool redeem) {
  return {redeem ? "redeem-leaked-code" : "steal-code-and-start",
          [w, redeem](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            if (v.events.empty()) return std::nullopt;
            auto opened = v.openRequest(v.events.front());
            if (!opened || !(opened->domain == w.dAidp) || !(opened->request.path() == s("/token")))
              return std::nullopt;
            Term code = dictGet(opened->request.body(), s("code"));
            if (code == Term::seq({})) return std::nullopt;
            if (redeem) {
              Term body = Term::seq({});
              body = dictPut(body, s("grant_type"), s("authorization_code"));
              body = dictPut(body, s("code"), code);
              body = dictPut(body, s("client_id"), s(w.cRp.c_str()));
              HttpRequest req = HttpRequest::make(nuv(90), mPost(), w.dHidp, s("/token"),
                                                  Term::seq({}), Term::seq({}), body);
              return std::vector<Term>{httpsEvent(w, w.aHidp, w.aAtt, w.dHidp, req, nuv(91)),
                                       memoEvent(w.aAtt, "redeem", {nuv(90), nuv(91)})};
            }
            Term startHeaders = dictPut(Term::seq({}), hOrigin(), Term::seq({w.dRp, protoS()}));
            HttpRequest startReq =
                HttpRequest::make(nuv(90), mPost(), w.dRp, oauth::pStartInteractiveLogin(),
                                  Term::seq({}), startHeaders, w.dHidp);
            return std::vector<Term>{httpsEvent(w, w.aRp, w.aAtt, w.dRp, startReq, nuv(91)),
                                     memoEvent(w.aAtt, "stolencode", {code}),
                                     memoEvent(w.aAtt, "startil", {nuv(90), nuv(91)})};
          }};
}

// Mix-up authentication continuation: replay the stolen code into the
// attacker's own login session at the RP's redirection endpoint.
Recipe redirectionWithStolenCodeRecipe(const World& w) {
  return {"redirep-stolen-code",
          [w](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            auto codes = findMemos(v, "stolencode");
            if (codes.empty()) return std::nullopt;
            Term code = codes.front().at(2);
            for (const Term& memo : findMemos(v, "startil")) {
              auto resp = v.findResponse(memo.at(3));
              if (!resp) continue;
              Term cookie = dictGet(resp->header(hSetCookie()), s("loginSessionId"));
              if (!(cookie.isSeq() && cookie.size() == 4)) continue;
              auto uv = validateUrl(resp->header(hLocation()));
              if (!ok(uv)) continue;
              Term state = dictGet(get(uv).params(), s("state"));
              Term params = Term::seq({});
              params = dictPut(params, s("code"), code);
              params = dictPut(params, s("state"), state);
              if (w.reg->toggles.issParamCheck) {
                params = dictPut(params, s("iss"), w.dHidp);
                params = dictPut(params, s("client_id"), s(w.cRp.c_str()));
              }
              Term headers = dictPut(Term::seq({}), hCookie(),
                                     Term::seq({Term::seq({s("loginSessionId"), cookie.at(0)})}));
              HttpRequest req =
                  HttpRequest::make(nuv(90), mGet(), w.dRp, oauth::pRedirectionEndpoint(), params,
                                    headers, Term::seq({}));
              return std::vector<Term>{httpsEvent(w, w.aRp, w.aAtt, w.dRp, req, nuv(91)),
                                       memoEvent(w.aAtt, "redirep", {nuv(90), nuv(91)})};
            }
            return std::nullopt;
          }};
}

// Implicit mix-up: the RP asks the attacker IdP to introspect the honest
// token; steal it, break authorization via the honest introspection
// endpoint and start the authentication continuation.
Recipe stealTokenRecipe(const World& w) {
  return {"steal-token", [w](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            if (v.events.empty()) return std::nullopt;
            auto opened = v.openRequest(v.events.front());
            if (!opened || !(opened->domain == w.dAidp) ||
                !(opened->request.path() == s("/introspect")))
              return std::nullopt;
            Term token = dictGet(opened->request.params(), s("token"));
            if (token == Term::seq({})) return std::nullopt;
            Term params = dictPut(Term::seq({}), s("token"), token);
            HttpRequest intro = HttpRequest::make(nuv(90), mGet(), w.dHidp, s("/introspect"),
                                                  params, Term::seq({}), Term::seq({}));
            Term startHeaders = dictPut(Term::seq({}), hOrigin(), Term::seq({w.dRp, protoS()}));
            HttpRequest startReq =
                HttpRequest::make(nuv(92), mPost(), w.dRp, oauth::pStartInteractiveLogin(),
                                  Term::seq({}), startHeaders, w.dHidp);
            return std::vector<Term>{httpsEvent(w, w.aHidp, w.aAtt, w.dHidp, intro, nuv(91)),
                                     httpsEvent(w, w.aRp, w.aAtt, w.dRp, startReq, nuv(93)),
                                     memoEvent(w.aAtt, "intro", {nuv(90), nuv(91)}),
                                     memoEvent(w.aAtt, "stolentoken", {token}),
                                     memoEvent(w.aAtt, "startil", {nuv(92), nuv(93)})};
          }};
}

// The attacker authenticates at the honest IdP with its own account,
// binding the resulting authorization code to the RP's client id.
Recipe ownAuthRecipe(const World& w) {
  return {"own-auth", [w](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            Term pw = v.extra.isSeq() && v.extra.size() >= 1 ? v.extra.at(0) : Term::bot();
            Term id = v.extra.isSeq() && v.extra.size() >= 2 ? v.extra.at(1) : Term::bot();
            if (pw.isBot() || id.isBot()) return std::nullopt;
            Term body = Term::seq({});
            body = dictPut(body, s("username"), id);
            body = dictPut(body, s("password"), pw);
            body = dictPut(body, s("client_id"), s(w.cRp.c_str()));
            body = dictPut(body, s("response_type"), s("code"));
            body = dictPut(body, s("state"), s("x"));
            Term headers = dictPut(Term::seq({}), hOrigin(), Term::seq({w.dHidp, protoS()}));
            HttpRequest req = HttpRequest::make(nuv(90), mPost(), w.dHidp, s("/auth"),
                                                Term::seq({}), headers, body);
            return std::vector<Term>{httpsEvent(w, w.aHidp, w.aAtt, w.dHidp, req, nuv(91)),
                                     memoEvent(w.aAtt, "ownauth", {nuv(90), nuv(91)})};
          }};
}

// Codes obtained through own-auth flows, oldest first.
std::vector<Term> ownAuthCodes(const View& v) {
  std::vector<Term> out;
  auto memos = findMemos(v, "ownauth");
  std::reverse(memos.begin(), memos.end());
  for (const Term& memo : memos) {
    auto resp = v.findResponse(memo.at(3));
    if (!resp) continue;
    auto uv = validateUrl(resp->header(hLocation()));
    if (!ok(uv)) continue;
    Term code = dictGet(get(uv).params(), s("code"));
    if (!(code == Term::seq({}))) out.push_back(code);
  }
  return out;
}

// State-leak: serve a page whose script replays the redirection endpoint
// with the attacker's codes and the state nonce leaked via the Referer.
Recipe csrfPageRecipe(const World& w) {
  return {"csrf-page", [w](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            if (v.events.empty()) return std::nullopt;
            const Term& e = v.events.front();
            if (!(e.isSeq() && e.size() == 3)) return std::nullopt;
            auto rq = validateRequest(e.at(2));  // plain HTTP request
            if (!ok(rq)) return std::nullopt;
            Term referer = get(rq).header(hReferer());
            auto uv = validateUrl(referer);
            if (!ok(uv)) return std::nullopt;
            Term state = dictGet(get(uv).params(), s("state"));
            if (state == Term::seq({})) return std::nullopt;  // fix in place: nothing leaked
            std::vector<Term> commands;
            for (const Term& code : ownAuthCodes(v)) {
              Term params = Term::seq({});
              params = dictPut(params, s("code"), code);
              params = dictPut(params, s("state"), state);
              if (w.reg->toggles.issParamCheck) {
                params = dictPut(params, s("iss"), w.dHidp);
                params = dictPut(params, s("client_id"), s(w.cRp.c_str()));
              }
              Term target =
                  Url::make(protoS(), w.dRp, oauth::pRedirectionEndpoint(), params, Term::bot()).t;
              commands.push_back(
                  Term::seq({browser::cHref(), target, Term::bot(), Term::bot()}));
            }
            if (commands.empty()) return std::nullopt;
            HttpResponse resp = HttpResponse::make(get(rq).nonce(), status200(), Term::seq({}),
                                                   Term::seq({s("att_script"),
                                                              Term::seq(std::move(commands))}));
            return std::vector<Term>{Term::seq({e.at(1), e.at(0), resp.t})};
          }};
}

// Naive-RP: the attacker IdP answers the authorization request by bouncing
// straight back to the RP's redirection endpoint, claiming the honest IdP
// in the idp hint and supplying its own code at the honest IdP.
Recipe naiveRedirectRecipe(const World& w) {
  return {"naive-redirect", [w](const View& v, rt::Chooser& ch)
                                -> std::optional<std::vector<Term>> {
            if (v.events.empty()) return std::nullopt;
            auto opened = v.openRequest(v.events.front());
            if (!opened || !(opened->domain == w.dAidp) || !(opened->request.path() == s("/auth")))
              return std::nullopt;
            Term state = dictGet(opened->request.params(), s("state"));
            auto codes = ownAuthCodes(v);
            if (codes.empty()) return std::nullopt;
            size_t which = ch.pick(codes.size(), "whichcode");
            Term params = Term::seq({});
            params = dictPut(params, s("idp"), w.dHidp);
            params = dictPut(params, s("iss"), w.dHidp);
            params = dictPut(params, s("client_id"), s(w.cRp.c_str()));
            params = dictPut(params, s("code"), codes[which]);
            params = dictPut(params, s("state"), state);
            Term loc = Url::make(protoS(), w.dRp, oauth::pRedirectionEndpoint(), params,
                                 Term::bot())
                           .t;
            Term headers = dictPut(Term::seq({}), hLocation(), loc);
            HttpResponse resp =
                HttpResponse::make(opened->request.nonce(), status303(), headers, Term::seq({}));
            Term wire = Term::app(Op::EncS, {resp.t, opened->symKey});
            return std::vector<Term>{Term::seq({opened->from, opened->to, wire})};
          }};
}

// Honest-fixed coverage: replay a recorded message to its original
// destination (the sink that can actually decrypt it).
Recipe replayRecipe(const World& w) {
  return {"replay", [w](const View& v, rt::Chooser& ch) -> std::optional<std::vector<Term>> {
            std::vector<const Term*> candidates;
            for (const Term& e : v.events) {
              if (!(e.isSeq() && e.size() == 3) || isMemoMsg(e.at(2))) continue;
              candidates.push_back(&e);
              if (candidates.size() >= 2) break;
            }
            if (candidates.empty()) return std::nullopt;
            size_t mi = ch.pick(candidates.size(), "replay.msg");
            const Term& e = *candidates[mi];
            return std::vector<Term>{Term::seq({e.at(0), w.aAtt, e.at(2)})};
          }};
}

// Honest-fixed coverage: a blind CSRF attempt against the fixed RP using
// string-valued guesses (the attacker has no honest nonces).
Recipe blindCsrfRecipe(const World& w) {
  return {"blind-csrf", [w](const View& v, rt::Chooser&) -> std::optional<std::vector<Term>> {
            Term params = Term::seq({});
            params = dictPut(params, s("code"), s("guess"));
            params = dictPut(params, s("state"), s("guess"));
            params = dictPut(params, s("iss"), w.dHidp);
            params = dictPut(params, s("client_id"), s(w.cRp.c_str()));
            HttpRequest req = HttpRequest::make(nuv(90), mGet(), w.dRp,
                                                oauth::pRedirectionEndpoint(), params,
                                                Term::seq({}), Term::seq({}));
            return std::vector<Term>{httpsEvent(w, w.aRp, w.aAtt, w.dRp, req, nuv(91)),
                                     memoEvent(w.aAtt, "csrf", {nuv(90), nuv(91)})};
          }};
}

// ---------------------------------------------------------------------------

struct Builder {
  World w;
  Scenario sc;

  void assemble(std::vector<Recipe> recipes, std::vector<Term> urlMenu,
                std::vector<Term> linkMenu) {
    auto reg = w.reg;
    auto scripts = std::make_shared<browser::ScriptMap>();
    (*scripts)["att_script"] = std::make_shared<AttackerScript>();
    (*scripts)["script_rp_index"] = std::make_shared<oauth::ScriptRpIndex>(reg, linkMenu);
    (*scripts)["script_rp_implicit"] = std::make_shared<oauth::ScriptRpImplicit>();
    (*scripts)["script_idp_form"] =
        std::make_shared<oauth::ScriptIdpForm>(std::vector<Term>{s("/auth")});

    browser::BrowserConfig bcfg;
    bcfg.urlMenu = std::move(urlMenu);
    bcfg.addressMenu = {w.aAtt};

    rt::System sys;
    sys.procs.push_back({"b", PartyKind::Browser, {w.aB}, w.browserState(),
                         std::make_shared<browser::BrowserRelation>(scripts, bcfg)});
    sys.procs.push_back({"rp", PartyKind::RelyingParty, {w.aRp}, w.rpState(),
                         std::make_shared<oauth::RpRelation>(reg, "rp",
                                                             std::vector<Term>{w.aAtt})});
    sys.procs.push_back({"hidp", PartyKind::IdentityProvider, {w.aHidp}, w.idpState(),
                         std::make_shared<oauth::IdpRelation>(reg, "hidp",
                                                              std::vector<Term>{w.aAtt})});
    sys.procs.push_back({"att", w.web ? PartyKind::WebAttacker : PartyKind::NetworkAttacker,
                         {w.aAtt}, w.attackerState(),
                         std::make_shared<AttackerRelation>(
                             std::make_shared<std::vector<Recipe>>(std::move(recipes)), !w.web,
                             w.aAtt)});
    if (w.web)
      sys.procs.push_back({"dns", PartyKind::DnsServer, {w.aDns}, s("dnstable"),
                           std::make_shared<DnsServerRelation>(w.dnsTable())});

    rt::Configuration cfg;
    for (const auto& p : sys.procs) cfg.states[p.id] = p.initialState;
    cfg.nextNonce = reg->nextNonce;

    sc.registry = reg;
    sc.system = std::move(sys);
    sc.initial = std::move(cfg);
    sc.webAttackerSystem = w.web;
  }
};

using DS = DirectorStep;
using Sel = DirectorStep::Sel;
using Choices = std::vector<std::pair<std::string, int>>;

DS trig(const std::string& proc, Choices c = {}) { return {Sel::Trigger, proc, "", "", std::move(c)}; }
DS any(const std::string& proc, Choices c = {}) { return {Sel::AnyTo, proc, "", "", std::move(c)}; }
DS dnsReq(const std::string& proc, Choices c = {}) {
  return {Sel::DnsRequest, proc, "", "", std::move(c)};
}
DS https(const std::string& proc, const std::string& host, const std::string& path,
         Choices c = {}) {
  return {Sel::HttpsToHost, proc, host, path, std::move(c)};
}

// Shared sub-schedules -------------------------------------------------------

// Browser resolves DNS (against `dns` party) and delivers the HTTPS request.
void browserFetch(std::vector<DS>& sch, const std::string& dnsProc) {
  sch.push_back(dnsReq(dnsProc));
  sch.push_back(any("b"));
}

// RP-side DNS round trip, request delivery to `server`, and the RP's
// consumption of the response (with `rpChoices` resolving its picks).
void rpFetch(std::vector<DS>& sch, const std::string& dnsProc, const std::string& server,
             const std::string& host, const std::string& path, Choices serverChoices = {},
             Choices rpChoices = {}) {
  sch.push_back(dnsReq(dnsProc));
  sch.push_back(any("rp"));
  sch.push_back(https(server, host, path, std::move(serverChoices)));
  sch.push_back(any("rp", std::move(rpChoices)));
}

std::vector<std::string> upTo(std::initializer_list<const char*> xs) {
  std::vector<std::string> out;
  for (const char* x : xs) out.push_back(x);
  return out;
}

Scenario buildAttack307(const FixToggles& toggles) {
  Builder b;
  b.w.web = false;
  b.w.build(toggles);
  const World& w = b.w;
  Term authUrl = w.url(protoS(), w.dHidp, "/auth",
                       Term::seq({w.param("client_id", s(w.cAtt.c_str())),
                                  w.param("response_type", s("code"))}));
  b.assemble({dnsHonestRecipe(w), leakRecipe(w), introspectTokenRecipe(w, "pwgrant", true),
              receiveTokenRecipe(w, "pwgrant", true)},
             {authUrl}, {});
  auto& sch = b.sc.schedule;
  const int NONE = 4;  // recipe menu size; index 4 = emit nothing
  // User opens the honest IdP's auth endpoint with the malicious client id.
  sch.push_back(trig("b", {{"switch", 1}, {"newwindow", 1}, {"url", 0}}));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("hidp", "hidp.com", "/auth"));
  sch.push_back(any("b"));
  // Login form posts the credentials.
  sch.push_back(trig("b", {{"switch", 0}, {"window", 0}, {"path", 0}, {"id", 0}, {"secret", 0}}));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("hidp", "hidp.com", "/auth", {{"redirect", 0}}));
  // 307 redirect replays the credentials to the attacker's endpoint.
  sch.push_back(any("b"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("att", "attacker.com", "/redirectionEndpoint", {{"recipe", 1}}));
  // Password grant, then introspection plus a login session at the RP.
  sch.push_back(https("hidp", "hidp.com", "/token"));
  sch.push_back(any("att", {{"recipe", 2}}));  // token response -> introspect + start login
  sch.push_back(https("hidp", "hidp.com", "/introspect"));
  sch.push_back(any("rp", {{"mode", 1}, {"redirecturi", 0}}));
  sch.push_back(any("att", {{"recipe", 3}}));     // 303 -> receive-token POST
  sch.push_back(any("att", {{"recipe", NONE}}));  // introspection response: authorization
  sch.push_back(https("rp", "rp.com", "/receiveTokenFromImplicitGrant"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("rp"));
  sch.push_back(https("hidp", "hidp.com", "/introspect"));
  sch.push_back(any("rp", {{"goal", 1}}));        // mint the service token
  sch.push_back(any("att", {{"recipe", NONE}}));  // authentication
  b.sc.name = "attack-307";
  b.sc.expectedViolations = upTo({"authorization", "authentication", "monitor.passwords",
                                  "monitor.tokens"});
  b.sc.triggerable = {"b", "att"};
  return std::move(b.sc);
}

void mixupUserFlow(std::vector<DS>& sch, bool tokenMode, int aidpRedirectRecipeIdx,
                   int windowIdx, Choices browserStart) {
  // Browser loads the RP index page and starts a login with the attacker IdP.
  sch.push_back(trig("b", std::move(browserStart)));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("rp", "rp.com", "/"));
  sch.push_back(any("b"));
  sch.push_back(trig("b", {{"switch", 0}, {"window", windowIdx}, {"branch", 0}, {"id", 1},
                           {"interactive", 1}}));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("rp", "rp.com", "/startInteractiveLogin",
                      {{"mode", tokenMode ? 1 : 0}, {"redirecturi", 0}}));
  // Redirect to the attacker IdP, which bounces to the honest IdP.
  sch.push_back(any("b"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("att", "aidp.com", "/auth", {{"recipe", aidpRedirectRecipeIdx}}));
  sch.push_back(any("b"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("hidp", "hidp.com", "/auth"));
  sch.push_back(any("b"));
  // Credentials for the honest identity.
  sch.push_back(trig("b", {{"switch", 0}, {"window", windowIdx}, {"path", 0}, {"id", 0},
                           {"secret", 0}}));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("hidp", "hidp.com", "/auth", {{"redirect", 0}}));
  // Back to the RP's redirection endpoint.
  sch.push_back(any("b"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
}

Scenario buildMixupCode(const FixToggles& toggles) {
  Builder b;
  b.w.web = false;
  b.w.withAidp = true;
  b.w.build(toggles);
  const World& w = b.w;
  b.assemble({dnsHonestRecipe(w), aidpRedirectRecipe(w), codeLeakRecipe(w, true),
              codeLeakRecipe(w, false), introspectTokenRecipe(w, "redeem", false),
              redirectionWithStolenCodeRecipe(w)},
             {w.url(protoS(), w.dRp, "/")}, {});
  auto& sch = b.sc.schedule;
  const int NONE = 6;
  // Round one: leak a code, redeem it, introspect (authorization).
  mixupUserFlow(sch, false, 1, 0, {{"switch", 1}, {"newwindow", 1}, {"url", 0}});
  sch.push_back(https("rp", "rp.com", "/redirectionEndpoint"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("rp"));
  sch.push_back(https("att", "aidp.com", "/token", {{"recipe", 2}}));
  sch.push_back(https("hidp", "hidp.com", "/token"));
  sch.push_back(any("att", {{"recipe", 4}}));
  sch.push_back(https("hidp", "hidp.com", "/introspect"));
  sch.push_back(any("att", {{"recipe", NONE}}));  // authorization breaks here
  // Round two: leak a second code and log in as the user.
  mixupUserFlow(sch, false, 1, 1, {{"switch", 1}, {"newwindow", 1}, {"url", 0}});
  sch.push_back(https("rp", "rp.com", "/redirectionEndpoint"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("rp"));
  sch.push_back(https("att", "aidp.com", "/token", {{"recipe", 3}}));  // steal + start login
  sch.push_back(any("rp", {{"mode", 0}, {"redirecturi", 0}}));
  sch.push_back(any("att", {{"recipe", 5}}));  // redirection endpoint with stolen code
  sch.push_back(https("rp", "rp.com", "/redirectionEndpoint"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("rp"));
  sch.push_back(https("hidp", "hidp.com", "/token"));
  sch.push_back(any("rp"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("rp"));
  sch.push_back(https("hidp", "hidp.com", "/introspect"));
  sch.push_back(any("rp", {{"goal", 1}}));
  sch.push_back(any("att", {{"recipe", NONE}}));  // authentication breaks here
  b.sc.name = "mixup-code";
  b.sc.expectedViolations =
      upTo({"authorization", "authentication", "monitor.codes", "monitor.tokens"});
  b.sc.triggerable = {"b", "att"};
  return std::move(b.sc);
}

Scenario buildMixupImplicit(const FixToggles& toggles) {
  Builder b;
  b.w.web = false;
  b.w.withAidp = true;
  b.w.build(toggles);
  const World& w = b.w;
  b.assemble({dnsHonestRecipe(w), aidpRedirectRecipe(w), stealTokenRecipe(w),
              receiveTokenRecipe(w, "stolentoken", false)},
             {w.url(protoS(), w.dRp, "/")}, {});
  auto& sch = b.sc.schedule;
  const int NONE = 4;
  mixupUserFlow(sch, true, 1, 0, {{"switch", 1}, {"newwindow", 1}, {"url", 0}});
  sch.push_back(https("rp", "rp.com", "/redirectionEndpoint"));  // serves script_rp_implicit
  sch.push_back(any("b"));
  sch.push_back(trig("b", {{"switch", 0}, {"window", 0}}));  // script posts token + state
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("b"));
  sch.push_back(https("rp", "rp.com", "/receiveTokenFromImplicitGrant"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("rp"));
  sch.push_back(https("att", "aidp.com", "/introspect", {{"recipe", 2}}));  // token stolen
  sch.push_back(https("hidp", "hidp.com", "/introspect"));
  sch.push_back(any("rp", {{"mode", 1}, {"redirecturi", 0}}));  // attacker's own session
  sch.push_back(any("att", {{"recipe", NONE}}));                // authorization breaks here
  sch.push_back(any("att", {{"recipe", 3}}));                   // replay token into own session
  sch.push_back(https("rp", "rp.com", "/receiveTokenFromImplicitGrant"));
  sch.push_back(dnsReq("att", {{"recipe", 0}}));
  sch.push_back(any("rp"));
  sch.push_back(https("hidp", "hidp.com", "/introspect"));
  sch.push_back(any("rp", {{"goal", 1}}));
  sch.push_back(any("att", {{"recipe", NONE}}));  // authentication breaks here
  b.sc.name = "mixup-implicit";
  b.sc.expectedViolations = upTo({"authorization", "authentication", "monitor.tokens"});
  b.sc.triggerable = {"b", "att"};
  return std::move(b.sc);
}

// The user's honest code-mode login at the RP via the honest IdP (web
// attacker system, DNS served by the dns process).
void honestLoginFlow(std::vector<DS>& sch, Choices startTrig, Choices indexScript, int goal) {
  sch.push_back(trig("b", std::move(startTrig)));
  browserFetch(sch, "dns");
  sch.push_back(https("rp", "rp.com", "/"));
  sch.push_back(any("b"));
  sch.push_back(trig("b", std::move(indexScript)));
  browserFetch(sch, "dns");
  sch.push_back(https("rp", "rp.com", "/startInteractiveLogin", {{"mode", 0}, {"redirecturi", 0}}));
  sch.push_back(any("b"));
  browserFetch(sch, "dns");
  sch.push_back(https("hidp", "hidp.com", "/auth"));
  sch.push_back(any("b"));
  sch.push_back(trig("b", {{"switch", 0}, {"window", 0}, {"path", 0}, {"id", 0}, {"secret", 0}}));
  browserFetch(sch, "dns");
  sch.push_back(https("hidp", "hidp.com", "/auth", {{"redirect", 0}}));
  sch.push_back(any("b"));
  browserFetch(sch, "dns");
  sch.push_back(https("rp", "rp.com", "/redirectionEndpoint"));
  rpFetch(sch, "dns", "hidp", "hidp.com", "/token");
  rpFetch(sch, "dns", "hidp", "hidp.com", "/introspect", {}, {{"goal", goal}});
  sch.push_back(any("b"));  // final page lands in the browser
}

Scenario buildStateLeak(const FixToggles& toggles) {
  Builder b;
  b.w.web = true;
  b.w.build(toggles);
  const World& w = b.w;
  b.assemble({ownAuthRecipe(w), csrfPageRecipe(w)}, {w.url(protoS(), w.dRp, "/")},
             {w.url(protoP(), w.dAtt, "/")});
  auto& sch = b.sc.schedule;
  // Attacker acquires two codes for its own account.
  for (int i = 0; i < 2; ++i) {
    sch.push_back(trig("att", {{"recipe", 0}}));
    sch.push_back(https("hidp", "hidp.com", "/auth", {{"redirect", 0}}));
    sch.push_back(any("att", {{"recipe", 2}}));  // consume the redirect (recipe menu: none)
  }
  // Honest login, completing with the authorization goal.
  honestLoginFlow(sch, {{"switch", 1}, {"newwindow", 1}, {"url", 0}},
                  {{"switch", 0}, {"window", 0}, {"branch", 0}, {"id", 0}, {"interactive", 1}}, 0);
  // The index page on the redirection URL leaks state through the Referer.
  sch.push_back(trig("b", {{"switch", 0}, {"window", 0}, {"branch", 1}, {"link", 0}}));
  browserFetch(sch, "dns");
  sch.push_back(any("att", {{"recipe", 1}}));  // serve the CSRF page
  sch.push_back(any("b"));
  // First replay: completes a foreign authorization in the user's session.
  sch.push_back(trig("b", {{"switch", 0}, {"window", 0}, {"att.cmd", 0}}));
  browserFetch(sch, "dns");
  sch.push_back(https("rp", "rp.com", "/redirectionEndpoint"));
  rpFetch(sch, "dns", "hidp", "hidp.com", "/token");
  rpFetch(sch, "dns", "hidp", "hidp.com", "/introspect", {}, {{"goal", 0}});
  sch.push_back(any("b"));
  // Second replay: logs the user in under the attacker's identity.
  sch.push_back(trig("b", {{"switch", 0}, {"window", 0}, {"branch", 1}, {"link", 0}}));
  browserFetch(sch, "dns");
  sch.push_back(any("att", {{"recipe", 1}}));
  sch.push_back(any("b"));
  sch.push_back(trig("b", {{"switch", 0}, {"window", 0}, {"att.cmd", 1}}));
  browserFetch(sch, "dns");
  sch.push_back(https("rp", "rp.com", "/redirectionEndpoint"));
  rpFetch(sch, "dns", "hidp", "hidp.com", "/token");
  rpFetch(sch, "dns", "hidp", "hidp.com", "/introspect", {}, {{"goal", 1}});
  sch.push_back(any("b"));
  b.sc.name = "state-leak";
  b.sc.expectedViolations =
      upTo({"session-integrity-authz", "session-integrity-authn", "monitor.state"});
  b.sc.triggerable = {"b", "att"};
  return std::move(b.sc);
}

Scenario buildNaiveRp(const FixToggles& toggles) {
  Builder b;
  b.w.web = true;
  b.w.withAidp = true;
  b.w.build(toggles);
  const World& w = b.w;
  b.assemble({ownAuthRecipe(w), naiveRedirectRecipe(w)}, {w.url(protoS(), w.dRp, "/")}, {});
  auto& sch = b.sc.schedule;
  for (int i = 0; i < 2; ++i) {
    sch.push_back(trig("att", {{"recipe", 0}}));
    sch.push_back(https("hidp", "hidp.com", "/auth", {{"redirect", 0}}));
    sch.push_back(any("att", {{"recipe", 2}}));
  }
  auto round = [&](int goal, int whichCode, Choices startTrig) {
    sch.push_back(trig("b", std::move(startTrig)));
    browserFetch(sch, "dns");
    sch.push_back(https("rp", "rp.com", "/"));
    sch.push_back(any("b"));
    sch.push_back(trig("b", {{"switch", 0}, {"window", 0}, {"branch", 0}, {"id", 1},
                             {"interactive", 1}}));
    browserFetch(sch, "dns");
    sch.push_back(https("rp", "rp.com", "/startInteractiveLogin",
                        {{"mode", 0}, {"redirecturi", 0}}));
    sch.push_back(any("b"));
    browserFetch(sch, "dns");
    sch.push_back(https("att", "aidp.com", "/auth", {{"recipe", 1}, {"whichcode", whichCode}}));
    sch.push_back(any("b"));
    browserFetch(sch, "dns");
    sch.push_back(https("rp", "rp.com", "/redirectionEndpoint"));
    rpFetch(sch, "dns", "hidp", "hidp.com", "/token");
    rpFetch(sch, "dns", "hidp", "hidp.com", "/introspect", {}, {{"goal", goal}});
    sch.push_back(any("b"));
  };
  round(0, 0, {{"switch", 1}, {"newwindow", 1}, {"url", 0}});
  round(1, 1, {{"switch", 1}, {"newwindow", 1}, {"url", 0}});
  b.sc.name = "naive-rp";
  b.sc.expectedViolations = upTo({"session-integrity-authz", "session-integrity-authn"});
  b.sc.triggerable = {"b", "att"};
  return std::move(b.sc);
}

Scenario buildHonestFixed(const FixToggles& toggles) {
  Builder b;
  b.w.web = true;
  b.w.build(toggles);
  const World& w = b.w;
  b.assemble({replayRecipe(w), ownAuthRecipe(w), blindCsrfRecipe(w)},
             {w.url(protoS(), w.dRp, "/")},
             {w.url(protoP(), w.dAtt, "/")});
  b.sc.name = "honest-fixed";
  b.sc.expectedViolations = {};
  b.sc.triggerable = {"b", "rp", "att"};
  return std::move(b.sc);
}

}  // namespace

const std::vector<std::string>& scenarioNames() {
  static const std::vector<std::string> names = {"attack-307",  "mixup-code", "mixup-implicit",
                                                 "state-leak",  "naive-rp",   "honest-fixed"};
  return names;
}

Scenario buildScenario(const std::string& name,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  FixToggles t;  // fixed-mode defaults
  if (name == "attack-307") {
    t.redirectStatus = 307;
    t.clientSecretPresent = false;
  } else if (name == "mixup-code") {
    t.issParamCheck = false;
    t.clientSecretPresent = false;
  } else if (name == "mixup-implicit") {
    t.issParamCheck = false;
  } else if (name == "state-leak") {
    t.referrerPolicy = false;
    t.freshStatePerAttempt = false;
  } else if (name == "naive-rp") {
    t.naiveTracking = true;
  } else if (name == "honest-fixed") {
    // all fixes on
  } else {
    throw std::runtime_error("unknown scenario: " + name);
  }
  for (const auto& [k, v] : overrides) t.set(k, v);
  Scenario sc;
  bool attackEnabled = true;
  if (name == "attack-307") {
    sc = buildAttack307(t);
    attackEnabled = t.redirectStatus == 307 && !t.clientSecretPresent;
  } else if (name == "mixup-code") {
    sc = buildMixupCode(t);
    attackEnabled = !t.issParamCheck && !t.clientSecretPresent && !t.naiveTracking;
  } else if (name == "mixup-implicit") {
    sc = buildMixupImplicit(t);
    attackEnabled = !t.issParamCheck && !t.naiveTracking;
  } else if (name == "state-leak") {
    sc = buildStateLeak(t);
    attackEnabled = !t.referrerPolicy && !t.freshStatePerAttempt;
  } else if (name == "naive-rp") {
    sc = buildNaiveRp(t);
    attackEnabled = t.naiveTracking;
  } else {
    sc = buildHonestFixed(t);
  }
  if (!attackEnabled) sc.expectedViolations.clear();  // the fix is in place
  return sc;
}

bool DirectorPolicy::next(const rt::Configuration& cfg, const rt::System& sys, rt::Decision& d,
                          std::unique_ptr<rt::Chooser>& ch) {
  while (pos_ < sc_.schedule.size()) {
    const DirectorStep& ds = sc_.schedule[pos_];
    ++pos_;
    int procIdx = sys.indexOf(ds.proc);
    if (procIdx < 0) continue;
    const rt::Process& proc = sys.procs[procIdx];
    if (ds.sel == Sel::Trigger) {
      d = {true, 0, static_cast<size_t>(procIdx)};
      ch = std::make_unique<rt::ScriptedChooser>(ds.choices);
      return true;
    }
    // Match only events addressed to the process's own addresses; the
    // scripted schedules never rely on network-level interception.
    auto addressed = [&](const rt::PoolEvent& pe) {
      const Term& to = pe.event.at(0);
      for (const Term& adr : proc.addresses)
        if (adr == to) return true;
      return false;
    };
    bool matched = false;
    for (size_t i = 0; i < cfg.pool.size() && !matched; ++i) {
      const rt::PoolEvent& pe = cfg.pool[i];
      if (!addressed(pe)) continue;
      const Term& msg = pe.event.at(2);
      if (isMemoMsg(msg)) continue;
      switch (ds.sel) {
        case Sel::AnyTo:
          matched = true;
          break;
        case Sel::DnsRequest:
          matched = ok(validateDnsRequest(msg));
          break;
        case Sel::HttpsToHost: {
          Term key = sc_.registry->sslKey(ds.host);
          Term dec = normalize(Term::app(Op::DecA, {msg, key}));
          if (dec.isSeq() && dec.size() == 2) {
            auto rq = validateRequest(dec.at(0));
            matched = ok(rq) && (ds.path.empty() || get(rq).path() == s(ds.path.c_str()));
          }
          break;
        }
        default:
          break;
      }
      if (matched) {
        d = {false, i, static_cast<size_t>(procIdx)};
        ch = std::make_unique<rt::ScriptedChooser>(ds.choices);
        return true;
      }
    }
    if (!matched) ++skipped_;  // prerequisites vanished (e.g. a fix blocked the flow)
  }
  return false;
}

RunOutcome runScenario(const Scenario& sc, uint64_t seed, size_t maxSteps) {
  RunOutcome out;
  if (!sc.schedule.empty()) {
    DirectorPolicy pol(sc);
    out.trace = rt::run(sc.system, sc.initial, pol, maxSteps);
  } else {
    rt::SeededPolicy pol(seed, sc.triggerable);
    out.trace = rt::run(sc.system, sc.initial, pol, maxSteps);
  }
  out.trace.scenario = sc.name;
  out.trace.seed = seed;
  out.trace.toggles = sc.registry->toggles.asKeyValues();
  out.verdicts = props::evaluateAll(out.trace, *sc.registry, sc.webAttackerSystem);
  for (const auto& v : out.verdicts.verdicts)
    if (!v.holds) out.violated.push_back(v.property);
  std::vector<std::string> want = sc.expectedViolations;
  std::vector<std::string> got = out.violated;
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  out.matchesExpectation = want == got;
  return out;
}

rt::ExplorationReport exploreScenario(const Scenario& sc, int depth, int branch) {
  rt::ExploreOptions opts;
  opts.depth = depth;
  opts.branch = branch;
  opts.webAttackerSystem = sc.webAttackerSystem;
  return rt::explore(sc.system, sc.initial, *sc.registry, opts);
}

rt::Trace replayRun(const Scenario& sc, const std::vector<rt::ReplayStep>& steps) {
  rt::ReplayPolicy pol(steps);
  rt::Trace t = rt::run(sc.system, sc.initial, pol, steps.size() + 1);
  t.scenario = sc.name;
  t.toggles = sc.registry->toggles.asKeyValues();
  return t;
}

}  // namespace oasim::harness
