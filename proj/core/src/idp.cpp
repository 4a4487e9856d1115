#include "oasim/idp.hpp"

#include "oasim/wire.hpp"

using namespace oasim::web;

namespace oasim::oauth {

namespace {

Term s(const char* x) { return Term::str(x); }

struct IdpState {
  Term sslKeys, srlist, authEp, tokenEp, introspectEp, clients, codes, atokens, corrupt;
};

IdpState decodeIdp(const Term& t) {
  if (!t.isSeq() || t.size() != 9) throw std::runtime_error("bad IdP state");
  return {t.at(0), t.at(1), t.at(2), t.at(3), t.at(4), t.at(5), t.at(6), t.at(7), t.at(8)};
}

Term encodeIdp(const IdpState& i) {
  return Term::seq({i.sslKeys, i.srlist, i.authEp, i.tokenEp, i.introspectEp, i.clients, i.codes,
                    i.atokens, i.corrupt});
}

}  // namespace

Term initialIdpState(const IdpStateParts& p) {
  return Term::seq({p.sslKeys, p.srlist, p.authEndpoint, p.tokenEndpoint, p.introspectEndpoint,
                    p.clients, Term::seq({}), Term::seq({}), Term::bot()});
}

rt::RelationResult IdpRelation::apply(const Term& event, const Term& state,
                                      rt::Chooser& ch) const {
  const Term& a = event.at(0);
  const Term& f = event.at(1);
  const Term& m = event.at(2);
  IdpState st = decodeIdp(state);
  const harness::FixToggles& tg = reg_->toggles;

  rt::RelationResult res;
  auto emit = [&](const Term& to, const Term& msg) {
    res.events.push_back(Term::seq({to, a, msg}));
  };
  auto finish = [&]() {
    res.state = encodeIdp(st);
    return std::move(res);
  };
  auto stopUnchanged = [&]() {
    res.events.clear();
    res.state = state;
    return std::move(res);
  };
  auto nu = [](uint32_t i) { return Term::var(VarKind::Process, i); };

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

  // Decrypt against one of our domain keys.
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

  Term redirectStatus = tg.redirectStatus == 307 ? status307() : status303();

  if (path == st.authEp) {  // authorization endpoint
    Term username = dictGet(body, s("username"));
    Term password = dictGet(body, s("password"));
    bool noCreds = username == Term::seq({}) || password == Term::seq({});
    if (method == mGet() || (method == mPost() && noCreds)) {
      Term respHeaders = Term::seq({});
      if (tg.referrerPolicy) respHeaders = dictPut(respHeaders, hReferrerPolicy(), rpOrigin());
      HttpResponse resp = HttpResponse::make(n, status200(), respHeaders,
                                             Term::seq({s("script_idp_form"), params}));
      emit(f, Term::app(Op::EncS, {resp.t, k}));
      return finish();
    }
    if (method != mPost()) return stopUnchanged();
    if (!(dictGet(headers, hOrigin()) == Term::seq({inDomain, protoS()})))
      return stopUnchanged();  // CSRF protection
    Term clientId = dictGet(body, s("client_id"));
    Term allowed = dictGet(st.clients, clientId);
    auto secret = reg_->secretOfId(username);
    if (!secret || !(password == *secret)) return stopUnchanged();
    if (allowed == Term::seq({})) return stopUnchanged();
    Term redirectUri = dictGet(body, s("redirect_uri"));
    if (!(redirectUri == Term::seq({}))) {
      if (!matchesAny(redirectUri, std::vector<Term>(allowed.args().begin(), allowed.args().end())))
        return stopUnchanged();
    } else {
      size_t i = ch.pick(allowed.size(), "redirect");
      redirectUri = allowed.at(i);
    }
    auto uv = validateUrl(redirectUri);
    if (!ok(uv)) return stopUnchanged();
    Url uri = get(uv);
    if (dictGet(body, s("response_type")) == s("code")) {
      std::vector<Term> codes(st.codes.args());
      codes.push_back(Term::seq(
          {nu(1), Term::seq({clientId, dictGet(body, s("redirect_uri")), username})}));
      st.codes = Term::seq(std::move(codes));
      Term p2 = dictPut(uri.params(), s("code"), nu(1));
      p2 = dictPut(p2, s("state"), dictGet(body, s("state")));
      uri = uri.withParams(p2);
      Term respHeaders = dictPut(Term::seq({}), hLocation(), uri.t);
      HttpResponse resp = HttpResponse::make(n, redirectStatus, respHeaders, Term::seq({}));
      emit(f, Term::app(Op::EncS, {resp.t, k}));
      return finish();
    }
    // response type token (implicit)
    std::vector<Term> atokens(st.atokens.args());
    atokens.push_back(Term::seq({nu(1), clientId, username}));
    st.atokens = Term::seq(std::move(atokens));
    Term frag = uri.fragment().isSeq() ? uri.fragment() : Term::seq({});
    frag = dictPut(frag, s("access_token"), nu(1));
    frag = dictPut(frag, s("token_type"), s("bearer"));
    frag = dictPut(frag, s("state"), dictGet(body, s("state")));
    uri = uri.withFragment(frag);
    Term respHeaders = dictPut(Term::seq({}), hLocation(), uri.t);
    HttpResponse resp = HttpResponse::make(n, redirectStatus, respHeaders, Term::seq({}));
    emit(f, Term::app(Op::EncS, {resp.t, k}));
    return finish();
  }

  if (path == st.tokenEp) {  // token endpoint
    if (method != mPost()) return stopUnchanged();
    Term auth = Term::bot();
    Term clientId = Term::bot();
    Term bodyClient = dictGet(body, s("client_id"));
    Term authHeader = dictGet(headers, hAuthorization());
    if (!(bodyClient == Term::seq({}))) {
      clientId = bodyClient;
      if (dictGet(st.clients, clientId) == Term::seq({})) return stopUnchanged();
      if (!reg_->secretOfClientId(clientId).isBot()) return stopUnchanged();
    } else if (authHeader.isSeq() && authHeader.size() == 2 &&
               !(authHeader.at(0) == Term::seq({}))) {
      clientId = authHeader.at(0);
      Term clientPw = authHeader.at(1);
      if (clientPw.isBot() || !(reg_->secretOfClientId(clientId) == clientPw))
        return stopUnchanged();
      auth = clientId;
    }
    Term grant = dictGet(body, s("grant_type"));
    if (grant == s("authorization_code")) {
      if (clientId.isBot()) return stopUnchanged();
      Term code = dictGet(body, s("code"));
      Term codeInfo = dictGet(st.codes, code);
      if (codeInfo == Term::seq({}) || !(codeInfo.isSeq() && codeInfo.size() == 3))
        return stopUnchanged();
      if (!(codeInfo.at(0) == clientId)) return stopUnchanged();
      if (!(codeInfo.at(1) == dictGet(body, s("redirect_uri")))) return stopUnchanged();
      st.codes = dictRemove(st.codes, code);  // authorization codes are single-use
      std::vector<Term> atokens(st.atokens.args());
      atokens.push_back(Term::seq({nu(1), clientId, codeInfo.at(2)}));
      st.atokens = Term::seq(std::move(atokens));
      Term respBody = Term::seq({Term::seq({s("access_token"), nu(1)}),
                                 Term::seq({s("token_type"), s("bearer")})});
      HttpResponse resp = HttpResponse::make(n, status200(), Term::seq({}), respBody);
      emit(f, Term::app(Op::EncS, {resp.t, k}));
      return finish();
    }
    if (grant == s("password")) {
      Term username = dictGet(body, s("username"));
      Term password = dictGet(body, s("password"));
      auto secret = reg_->secretOfId(username);
      if (!secret || !(password == *secret)) return stopUnchanged();
      std::vector<Term> atokens(st.atokens.args());
      atokens.push_back(Term::seq({nu(1), clientId, username}));
      st.atokens = Term::seq(std::move(atokens));
      Term respBody = Term::seq({Term::seq({s("access_token"), nu(1)}),
                                 Term::seq({s("token_type"), s("bearer")})});
      HttpResponse resp = HttpResponse::make(n, status200(), Term::seq({}), respBody);
      emit(f, Term::app(Op::EncS, {resp.t, k}));
      return finish();
    }
    if (grant == s("client_credentials")) {
      if (auth.isBot()) return stopUnchanged();
      std::vector<Term> atokens(st.atokens.args());
      atokens.push_back(Term::seq({nu(1), clientId, Term::bot()}));
      st.atokens = Term::seq(std::move(atokens));
      Term respBody = Term::seq({Term::seq({s("access_token"), nu(1)}),
                                 Term::seq({s("token_type"), s("bearer")})});
      HttpResponse resp = HttpResponse::make(n, status200(), Term::seq({}), respBody);
      emit(f, Term::app(Op::EncS, {resp.t, k}));
      return finish();
    }
    return stopUnchanged();
  }

  if (path == st.introspectEp) {  // introspection endpoint
    if (method != mGet()) return stopUnchanged();
    Term token = dictGet(params, s("token"));
    for (const Term& e : st.atokens.args()) {
      if (!(e.isSeq() && e.size() == 3 && e.at(0) == token)) continue;
      Term clientId = e.at(1);
      Term user = e.at(2);
      Term resource = reg_->resourceForIntrospection(self_, clientId, user);
      if (resource.isBot()) return stopUnchanged();
      Term respBody = Term::seq({Term::seq({s("protected_resource"), resource}),
                                 Term::seq({s("client_id"), clientId}),
                                 Term::seq({s("user"), user})});
      HttpResponse resp = HttpResponse::make(n, status200(), Term::seq({}), respBody);
      emit(f, Term::app(Op::EncS, {resp.t, k}));
      return finish();
    }
    return stopUnchanged();
  }

  return stopUnchanged();
}

browser::ScriptOutput ScriptIdpForm::run(const browser::ScriptInput& in, rt::Chooser& ch,
                                         rt::ScriptRunMeta& meta) const {
  browser::ScriptOutput out{in.scriptstate, in.cookies, in.localStorage, in.sessionStorage,
                            Term::seq({})};
  auto url = browser::findDocUrl(in.tree, in.docNonce);
  if (!url) return out;
  auto uv = validateUrl(*url);
  if (!ok(uv)) return out;
  if (postPaths_.empty()) return out;
  Term path = postPaths_[ch.pick(postPaths_.size(), "path")];
  Term ids = normalize(in.ids);
  Term secrets = normalize(in.secrets);
  if (!ids.isSeq() || ids.size() == 0 || !secrets.isSeq() || secrets.size() == 0) return out;
  Term id = ids.at(ch.pick(ids.size(), "id"));
  Term secret = secrets.at(ch.pick(secrets.size(), "secret"));
  meta.selectedId = id;
  Term formdata = in.scriptstate;
  formdata = dictPut(formdata, Term::str("username"), id);
  formdata = dictPut(formdata, Term::str("password"), secret);
  Term target = web::Url::make(get(uv).protocol(), get(uv).host(), path, get(uv).params(),
                               get(uv).fragment())
                    .t;
  meta.commandTargetHost = get(uv).host();
  out.command = Term::seq({browser::cForm(), target, mPost(), formdata, Term::bot()});
  return out;
}

}  // namespace oasim::oauth
