#include "oasim/rp.hpp"

#include "oasim/wire.hpp"

using namespace oasim::web;

namespace oasim::oauth {

Term pIndex() { static const Term t = Term::str("/"); return t; }
Term pStartInteractiveLogin() { static const Term t = Term::str("/startInteractiveLogin"); return t; }
Term pRedirectionEndpoint() { static const Term t = Term::str("/redirectionEndpoint"); return t; }
Term pPasswordLogin() { static const Term t = Term::str("/passwordLogin"); return t; }
Term pReceiveTokenFromImplicitGrant() {
  static const Term t = Term::str("/receiveTokenFromImplicitGrant");
  return t;
}

namespace {

Term s(const char* x) { return Term::str(x); }

Term kGrantType() { return s("grant_type"); }
Term kCode() { return s("code"); }
Term kToken() { return s("token"); }
Term kState() { return s("state"); }
Term kIss() { return s("iss"); }
Term kClientId() { return s("client_id"); }
Term kRedirectUri() { return s("redirect_uri"); }
Term kResponseType() { return s("response_type"); }
Term kAccessToken() { return s("access_token"); }
Term kIdp() { return s("idp"); }
Term kUser() { return s("user"); }
Term kProtectedResource() { return s("protected_resource"); }
Term kPassword() { return s("password"); }
Term kUsername() { return s("username"); }
Term kIntrospect() { return s("introspect"); }
Term kImplicit() { return s("implicit"); }
Term kClientCredentials() { return s("client_credentials"); }
Term kAuthorizationCode() { return s("authorization_code"); }
Term kLoginSessionId() { return s("loginSessionId"); }
Term kServiceToken() { return s("serviceToken"); }
Term scriptRpIndexName() { return s("script_rp_index"); }
Term scriptRpImplicitName() { return s("script_rp_implicit"); }

struct RpState {
  Term dnsAddress, idps, serviceTokens, loginSessions, keyMapping, sslKeys, pendingDNS,
      pendingRequests, corrupt;
};

RpState decodeRp(const Term& t) {
  if (!t.isSeq() || t.size() != 9) throw std::runtime_error("bad RP state");
  return {t.at(0), t.at(1), t.at(2), t.at(3), t.at(4), t.at(5), t.at(6), t.at(7), t.at(8)};
}

Term encodeRp(const RpState& r) {
  return Term::seq({r.dnsAddress, r.idps, r.serviceTokens, r.loginSessions, r.keyMapping,
                    r.sslKeys, r.pendingDNS, r.pendingRequests, r.corrupt});
}

struct IdpRecord {
  Term tokenEndpoint, authEndpoint, introspectEndpoint, clientId, clientPassword;
  bool valid = false;
};

IdpRecord idpRecordOf(const Term& idps, const Term& domain) {
  Term rec = dictGet(idps, domain);
  if (!rec.isSeq() || rec.size() != 5) return {};
  return {rec.at(0), rec.at(1), rec.at(2), rec.at(3), rec.at(4), true};
}

}  // namespace

Term idpRegistrationRecord(const Term& tokenEndpoint, const Term& authEndpoint,
                           const Term& introspectEndpoint, const Term& clientId,
                           const Term& clientPassword) {
  return Term::seq({tokenEndpoint, authEndpoint, introspectEndpoint, clientId, clientPassword});
}

Term initialRpState(const RpStateParts& p) {
  return Term::seq({p.dnsAddress, p.idps, Term::seq({}), Term::seq({}), p.keyMapping, p.sslKeys,
                    Term::seq({}), Term::seq({}), Term::bot()});
}

rt::RelationResult RpRelation::apply(const Term& event, const Term& state,
                                     rt::Chooser& ch) const {
  const Term& a = event.at(0);
  const Term& f = event.at(1);
  const Term& m = event.at(2);
  RpState st = decodeRp(state);
  const harness::FixToggles& tg = reg_->toggles;

  rt::RelationResult res;
  auto emit = [&](const Term& to, const Term& msg) {
    res.events.push_back(Term::seq({to, a, msg}));
  };
  auto finish = [&]() {
    res.state = encodeRp(st);
    return std::move(res);
  };
  auto stopUnchanged = [&]() {
    res.events.clear();
    res.state = state;
    return std::move(res);
  };
  auto nu = [](uint32_t i) { return Term::var(VarKind::Process, i); };

  // Corruption: collect and emit anything derivable.
  if (!st.corrupt.isBot() || m == rt::corruptMsg()) {
    st.corrupt = Term::seq({event, st.corrupt});
    std::vector<Term> recorded;
    Term cur = st.corrupt;
    while (cur.isSeq() && cur.size() == 2) {
      recorded.push_back(cur.at(0));
      cur = cur.at(1);
    }
    if (!recorded.empty() && !corruptMenu_.empty()) {
      size_t mi = ch.pick(recorded.size(), "corrupt.msg");
      size_t ai = ch.pick(corruptMenu_.size(), "corrupt.addr");
      emit(corruptMenu_[ai], recorded[mi]);
    }
    return finish();
  }

  // Encrypted HTTP response for a pending request.
  for (const Term& e : st.pendingRequests.args()) {
    if (!(e.isSeq() && e.size() == 4) || !e.at(2).isNonce()) continue;
    Term dec = normalize(Term::app(Op::DecS, {m, e.at(2)}));
    if (!(dec.isSeq() && dec.size() == 5 && dec.at(0) == tHttpResp())) continue;
    auto rv = validateResponse(dec);
    auto reqv = validateRequest(e.at(1));
    if (!ok(rv) || !ok(reqv)) return stopUnchanged();
    if (!(get(rv).nonce() == get(reqv).nonce())) return stopUnchanged();
    std::vector<Term> keep;
    for (const Term& x : st.pendingRequests.args())
      if (!(x == e)) keep.push_back(x);
    st.pendingRequests = Term::seq(std::move(keep));
    const Term reference = e.at(0);
    const Term body = get(rv).body();

    if (!reference.isSeq() || reference.size() < 6) return finish();
    const Term mode = reference.at(0);

    if (mode == kCode() || mode == kPassword() || mode == kClientCredentials()) {
      // Token response: go introspect the access token.
      // reference = <mode, idp, a', f', n', k'>
      const Term idp = reference.at(1);
      Term token = dictGet(body, kAccessToken());
      IdpRecord rec = idpRecordOf(st.idps, idp);
      if (!rec.valid) return finish();
      auto ev = validateUrl(rec.introspectEndpoint);
      if (!ok(ev)) return finish();
      Url ie = get(ev);
      Term params = dictPut(ie.params(), kToken(), token);
      HttpRequest msg = HttpRequest::make(nu(1), mGet(), ie.host(), ie.path(), params,
                                          Term::seq({}), Term::seq({}));
      Term ref = Term::seq({kIntrospect(), mode, idp, reference.at(2), reference.at(3),
                            reference.at(4), reference.at(5)});
      st.pendingDNS = dictPut(st.pendingDNS, nu(2), Term::seq({ref, msg.t}));
      emit(st.dnsAddress, DnsRequest::make(ie.host(), nu(2)).t);
      return finish();
    }

    if (mode == kIntrospect() && reference.size() == 7) {
      // reference = <introspect, mode', idp, a', f', n', k'>
      Term nb = normalize(body);
      if (!(nb.isSeq() && nb.size() == 3)) return finish();
      auto entry = [&](size_t i, const Term& key) -> std::optional<Term> {
        const Term& kv = nb.at(i);
        if (!(kv.isSeq() && kv.size() == 2 && kv.at(0) == key)) return std::nullopt;
        return kv.at(1);
      };
      auto resource = entry(0, kProtectedResource());
      auto clientId = entry(1, kClientId());
      auto user = entry(2, kUser());
      if (!resource || !clientId || !user) return finish();
      const Term innerMode = reference.at(1);
      const Term idp = reference.at(2);
      const Term fPrime = reference.at(4);
      const Term nPrime = reference.at(5);
      const Term kPrime = reference.at(6);
      if (innerMode == kClientCredentials()) return finish();  // no service token
      IdpRecord rec = idpRecordOf(st.idps, idp);
      if (!rec.valid) return finish();
      Term headers = Term::seq({});
      bool authn = ch.pickBool("goal");
      if (authn) {
        bool emptyClient = (*clientId == Term::seq({}) || clientId->isBot());
        bool okClient = (*clientId == rec.clientId) ||
                        (emptyClient && innerMode == kPassword() && rec.clientPassword.isBot());
        if (!okClient) return finish();
        if (*user == Term::seq({})) return finish();
        Term serviceToken = nu(3);
        st.serviceTokens = dictPut(st.serviceTokens, serviceToken, Term::seq({*user, idp}));
        Term cookie = Term::seq(
            {kServiceToken(), Term::seq({serviceToken, Term::bot(), Term::bot(), Term::top()})});
        headers = dictPut(headers, hSetCookie(), Term::seq({cookie}));
        res.meta.mint = rt::MintMeta{serviceToken, *user, idp, fPrime};
      }
      if (tg.referrerPolicy) headers = dictPut(headers, hReferrerPolicy(), rpOrigin());
      HttpResponse resp = HttpResponse::make(nPrime, status200(), headers,
                                             Term::seq({scriptRpIndexName(), Term::seq({})}));
      emit(fPrime, Term::app(Op::EncS, {resp.t, kPrime}));
      res.meta.ends = rt::EndsMeta{*resource, *clientId, *user, fPrime};
      return finish();
    }
    return finish();
  }

  // DNS response: release the pending HTTPS request.
  if (auto dv = validateDnsResponse(m); ok(dv)) {
    const DnsResponse& dns = get(dv);
    Term entry = dictGet(st.pendingDNS, dns.nonce());
    if (!(entry.isSeq() && entry.size() == 2)) return stopUnchanged();
    auto reqv = validateRequest(entry.at(1));
    if (!ok(reqv) || !(dns.domain() == get(reqv).host())) return stopUnchanged();
    std::vector<Term> pend(st.pendingRequests.args());
    pend.insert(pend.begin(), Term::seq({entry.at(0), entry.at(1), nu(4), dns.address()}));
    st.pendingRequests = Term::seq(std::move(pend));
    Term key = dictGet(st.keyMapping, get(reqv).host());
    Term msg = Term::app(Op::EncA, {Term::seq({entry.at(1), nu(4)}), key});
    st.pendingDNS = dictRemove(st.pendingDNS, dns.nonce());
    emit(dns.address(), msg);
    return finish();
  }

  // Trigger: start a client credentials grant.
  if (m == rt::triggerMsg()) {
    Term idpsNorm = normalize(st.idps);
    size_t n = idpsNorm.isSeq() ? idpsNorm.size() : 0;
    size_t i = ch.pick(n, "idp");  // NoBranch when no IdP is registered
    Term idp = idpsNorm.at(i).at(0);
    IdpRecord rec = idpRecordOf(st.idps, idp);
    if (!rec.valid) return stopUnchanged();
    auto ev = validateUrl(rec.tokenEndpoint);
    if (!ok(ev)) return stopUnchanged();
    Url te = get(ev);
    Term headers = dictPut(Term::seq({}), hAuthorization(),
                           Term::seq({rec.clientId, rec.clientPassword}));
    Term body = dictPut(Term::seq({}), kGrantType(), kClientCredentials());
    HttpRequest msg =
        HttpRequest::make(nu(5), mPost(), te.host(), te.path(), te.params(), headers, body);
    Term ref = Term::seq({kClientCredentials(), idp, Term::bot(), Term::bot(), Term::bot(),
                          Term::bot()});
    st.pendingDNS = dictPut(st.pendingDNS, nu(6), Term::seq({ref, msg.t}));
    emit(st.dnsAddress, DnsRequest::make(te.host(), nu(6)).t);
    return finish();
  }

  // Otherwise: an encrypted HTTP request to one of our domains.
  Term mdec, k, inDomain;
  bool decOk = false;
  for (const Term& kv : st.sslKeys.args()) {
    if (!(kv.isSeq() && kv.size() == 2)) continue;
    Term dec = normalize(Term::app(Op::DecA, {m, kv.at(1)}));
    if (dec.isSeq() && dec.size() == 2) {
      mdec = dec.at(0);
      k = dec.at(1);
      inDomain = kv.at(0);
      decOk = true;
      break;
    }
  }
  if (!decOk) return stopUnchanged();
  auto reqv = validateRequest(mdec);
  if (!ok(reqv) || !(get(reqv).host() == inDomain)) return stopUnchanged();
  const HttpRequest req = get(reqv);
  const Term n = req.nonce();
  const Term method = req.method();
  const Term path = req.path();
  const Term params = req.params();
  const Term headers = req.headers();
  const Term body = req.body();

  auto respond = [&](const Term& status, Term respHeaders, const Term& respBody) {
    if (tg.referrerPolicy) respHeaders = dictPut(respHeaders, hReferrerPolicy(), rpOrigin());
    HttpResponse resp = HttpResponse::make(n, status, respHeaders, respBody);
    emit(f, Term::app(Op::EncS, {resp.t, k}));
  };
  auto originOk = [&]() {
    return dictGet(headers, hOrigin()) == Term::seq({inDomain, protoS()});
  };

  if (path == pIndex()) {
    respond(status200(), Term::seq({}), Term::seq({scriptRpIndexName(), Term::seq({})}));
    return finish();
  }

  if (path == pStartInteractiveLogin() && method == mPost()) {
    if (!originOk()) return stopUnchanged();  // CSRF protection
    const Term idp = body;
    IdpRecord rec = idpRecordOf(st.idps, idp);
    if (!rec.valid) return stopUnchanged();
    Term stateNonce = nu(7);
    bool tokenMode = ch.pickBool("mode");
    Term mode = tokenMode ? kToken() : kCode();
    Term responseStatus = tg.redirectStatus == 307 ? status307() : status303();
    auto av = validateUrl(rec.authEndpoint);
    if (!ok(av)) return stopUnchanged();
    Url authEp = get(av);
    Term p2 = dictPut(authEp.params(), kResponseType(), mode);
    p2 = dictPut(p2, kClientId(), rec.clientId);
    p2 = dictPut(p2, kState(), stateNonce);
    authEp = authEp.withParams(p2);
    Term redirectUri = Term::bot();
    if (ch.pickBool("redirecturi")) {
      size_t nd = st.sslKeys.size();
      size_t di = ch.pick(nd == 0 ? 1 : nd, "redirectdomain");
      Term host = st.sslKeys.at(di).at(0);
      redirectUri = Url::make(protoS(), host, pRedirectionEndpoint(),
                              Term::seq({Term::seq({kIdp(), idp})}), Term::seq({}))
                        .t;
    }
    Term lsid = nu(8);
    st.loginSessions =
        dictPut(st.loginSessions, lsid, Term::seq({idp, stateNonce, mode, redirectUri}));
    Term respHeaders = dictPut(Term::seq({}), hLocation(), authEp.t);
    Term cookie =
        Term::seq({kLoginSessionId(), Term::seq({lsid, Term::top(), Term::top(), Term::top()})});
    respHeaders = dictPut(respHeaders, hSetCookie(), Term::seq({cookie}));
    if (tg.referrerPolicy) respHeaders = dictPut(respHeaders, hReferrerPolicy(), rpOrigin());
    HttpResponse resp = HttpResponse::make(n, responseStatus, respHeaders, Term::bot());
    emit(f, Term::app(Op::EncS, {resp.t, k}));
    return finish();
  }

  if (path == pRedirectionEndpoint()) {
    Term lsid = dictGet(dictGet(headers, hCookie()), kLoginSessionId());
    Term session = dictGet(st.loginSessions, lsid);
    if (!(session.isSeq() && session.size() == 4)) return stopUnchanged();
    Term idp = session.at(0);
    const Term stateNonce = session.at(1);
    const Term mode = session.at(2);
    const Term redirectUri = session.at(3);
    if (tg.naiveTracking) {
      // Naive user intention tracking: trust the idp request parameter.
      idp = dictGet(params, kIdp());
    } else if (tg.issParamCheck) {
      IdpRecord rec0 = idpRecordOf(st.idps, idp);
      if (!rec0.valid) return stopUnchanged();
      if (!(idp == dictGet(params, kIss())) || !(rec0.clientId == dictGet(params, kClientId())))
        return stopUnchanged();
    }
    IdpRecord rec = idpRecordOf(st.idps, idp);
    if (!rec.valid) return stopUnchanged();

    if (mode == kCode()) {
      if (!(dictGet(params, kState()) == stateNonce)) return stopUnchanged();
      Term code = dictGet(params, kCode());
      Term trHeaders = Term::seq({});
      Term trBody = dictPut(Term::seq({}), kGrantType(), kAuthorizationCode());
      trBody = dictPut(trBody, kCode(), code);
      if (!redirectUri.isBot()) trBody = dictPut(trBody, kRedirectUri(), redirectUri);
      if (rec.clientPassword.isBot()) {
        trBody = dictPut(trBody, kClientId(), rec.clientId);
      } else {
        trHeaders =
            dictPut(trHeaders, hAuthorization(), Term::seq({rec.clientId, rec.clientPassword}));
      }
      auto tv = validateUrl(rec.tokenEndpoint);
      if (!ok(tv)) return stopUnchanged();
      Url te = get(tv);
      HttpRequest msg =
          HttpRequest::make(nu(9), mPost(), te.host(), te.path(), te.params(), trHeaders, trBody);
      Term ref = Term::seq({kCode(), idp, a, f, n, k});
      st.pendingDNS = dictPut(st.pendingDNS, nu(10), Term::seq({ref, msg.t}));
      if (tg.freshStatePerAttempt) st.loginSessions = dictRemove(st.loginSessions, lsid);
      emit(st.dnsAddress, DnsRequest::make(te.host(), nu(10)).t);
      return finish();
    }
    if (mode == kToken()) {
      respond(status200(), Term::seq({}), Term::seq({scriptRpImplicitName(), idp}));
      return finish();
    }
    return stopUnchanged();
  }

  if (path == pPasswordLogin() && method == mPost()) {
    if (!originOk()) return stopUnchanged();  // CSRF protection
    Term nb = normalize(body);
    if (!(nb.isSeq() && nb.size() == 2 && nb.at(0).isSeq() && nb.at(0).size() == 2))
      return stopUnchanged();
    Term id = nb.at(0);
    Term password = nb.at(1);
    Term idp = id.at(1);
    IdpRecord rec = idpRecordOf(st.idps, idp);
    if (!rec.valid) return stopUnchanged();
    Term trHeaders = Term::seq({});
    Term trBody = dictPut(Term::seq({}), kGrantType(), kPassword());
    trBody = dictPut(trBody, kUsername(), id);
    trBody = dictPut(trBody, kPassword(), password);
    if (!rec.clientPassword.isBot())
      trHeaders =
          dictPut(trHeaders, hAuthorization(), Term::seq({rec.clientId, rec.clientPassword}));
    auto tv = validateUrl(rec.tokenEndpoint);
    if (!ok(tv)) return stopUnchanged();
    Url te = get(tv);
    HttpRequest msg =
        HttpRequest::make(nu(11), mPost(), te.host(), te.path(), te.params(), trHeaders, trBody);
    Term ref = Term::seq({kPassword(), idp, a, f, n, k});
    st.pendingDNS = dictPut(st.pendingDNS, nu(12), Term::seq({ref, msg.t}));
    emit(st.dnsAddress, DnsRequest::make(te.host(), nu(12)).t);
    return finish();
  }

  if (path == pReceiveTokenFromImplicitGrant() && method == mPost()) {
    if (!originOk()) return stopUnchanged();  // CSRF protection
    Term lsid = dictGet(dictGet(headers, hCookie()), kLoginSessionId());
    Term session = dictGet(st.loginSessions, lsid);
    if (!(session.isSeq() && session.size() == 4)) return stopUnchanged();
    const Term idp = session.at(0);
    const Term stateNonce = session.at(1);
    Term nb = normalize(body);
    if (!(nb.isSeq() && nb.size() == 3)) return stopUnchanged();
    if (!(nb.at(1) == stateNonce) || !(nb.at(2) == idp)) return stopUnchanged();
    Term token = nb.at(0);
    IdpRecord rec = idpRecordOf(st.idps, idp);
    if (!rec.valid) return stopUnchanged();
    auto ev2 = validateUrl(rec.introspectEndpoint);
    if (!ok(ev2)) return stopUnchanged();
    Url ie = get(ev2);
    Term p2 = dictPut(ie.params(), kToken(), token);
    HttpRequest msg =
        HttpRequest::make(nu(13), mGet(), ie.host(), ie.path(), p2, Term::seq({}), Term::seq({}));
    Term ref = Term::seq({kIntrospect(), kImplicit(), idp, a, f, n, k});
    st.pendingDNS = dictPut(st.pendingDNS, nu(14), Term::seq({ref, msg.t}));
    if (tg.freshStatePerAttempt) st.loginSessions = dictRemove(st.loginSessions, lsid);
    emit(st.dnsAddress, DnsRequest::make(ie.host(), nu(14)).t);
    return finish();
  }

  return stopUnchanged();
}

browser::ScriptOutput ScriptRpIndex::run(const browser::ScriptInput& in, rt::Chooser& ch,
                                         rt::ScriptRunMeta& meta) const {
  browser::ScriptOutput out{in.scriptstate, in.cookies, in.localStorage, in.sessionStorage,
                            Term::seq({})};
  bool link = ch.pickBool("branch");
  if (!link) {
    auto url = browser::findDocUrl(in.tree, in.docNonce);
    if (!url) return out;
    auto uv = validateUrl(*url);
    if (!ok(uv)) return out;
    Term idsNorm = normalize(in.ids);
    size_t n = idsNorm.isSeq() ? idsNorm.size() : 0;
    if (n == 0) return out;
    Term id = idsNorm.at(ch.pick(n, "id"));
    if (!(id.isSeq() && id.size() == 2)) return out;
    Term domain = id.at(1);
    bool interactive = ch.pickBool("interactive");
    meta.selectedId = id;
    meta.selectedDomain = domain;
    meta.interactive = interactive;
    if (interactive) {
      Term url2 = Url::make(protoS(), get(uv).host(), pStartInteractiveLogin(), Term::seq({}),
                            Term::seq({}))
                      .t;
      out.command = Term::seq({browser::cForm(), url2, mPost(), domain, Term::bot()});
      return out;
    }
    auto secret = reg_->secretOfId(id);
    if (!secret) return out;
    bool inSecrets = false;
    for (const Term& x : normalize(in.secrets).args())
      if (x == *secret) inSecrets = true;
    if (!inSecrets) return out;  // no password for this identity here
    Term url2 =
        Url::make(protoS(), get(uv).host(), pPasswordLogin(), Term::seq({}), Term::seq({})).t;
    out.command =
        Term::seq({browser::cForm(), url2, mPost(), Term::seq({id, *secret}), Term::bot()});
    return out;
  }
  // link branch: follow an arbitrary URL from the menu
  if (linkMenu_.empty()) return out;
  Term url = linkMenu_[ch.pick(linkMenu_.size(), "link")];
  Term win = Term::bot();
  if (auto w = browser::findDocWindow(in.tree, in.docNonce)) win = *w;
  out.command = Term::seq({browser::cHref(), url, win, Term::bot()});
  return out;
}

browser::ScriptOutput ScriptRpImplicit::run(const browser::ScriptInput& in, rt::Chooser&,
                                            rt::ScriptRunMeta&) const {
  browser::ScriptOutput out{in.scriptstate, in.cookies, in.localStorage, in.sessionStorage,
                            Term::seq({})};
  auto url = browser::findDocUrl(in.tree, in.docNonce);
  if (!url) return out;
  auto uv = validateUrl(*url);
  if (!ok(uv)) return out;
  Term fragment = get(uv).fragment();
  Term url2 = Url::make(protoS(), get(uv).host(), pReceiveTokenFromImplicitGrant(), Term::seq({}),
                        Term::seq({}))
                  .t;
  Term body = Term::seq({dictGet(fragment, Term::str("access_token")),
                         dictGet(fragment, Term::str("state")), in.scriptstate});
  out.command = Term::seq({browser::cForm(), url2, mPost(), body, Term::bot()});
  return out;
}

}  // namespace oasim::oauth
