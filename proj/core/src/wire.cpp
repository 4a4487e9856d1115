#include "oasim/wire.hpp"

namespace oasim::web {

namespace {
Term makeStr(const char* s) { return Term::str(s); }
}

Term tUrl() { static const Term t = makeStr("URL"); return t; }
Term tHttpReq() { static const Term t = makeStr("HTTPReq"); return t; }
Term tHttpResp() { static const Term t = makeStr("HTTPResp"); return t; }
Term tDnsResolve() { static const Term t = makeStr("DNSResolve"); return t; }
Term tDnsResolved() { static const Term t = makeStr("DNSResolved"); return t; }
Term protoP() { static const Term t = makeStr("P"); return t; }
Term protoS() { static const Term t = makeStr("S"); return t; }

Term mGet() { static const Term t = makeStr("GET"); return t; }
Term mPost() { static const Term t = makeStr("POST"); return t; }
Term mHead() { static const Term t = makeStr("HEAD"); return t; }

Term hOrigin() { static const Term t = makeStr("Origin"); return t; }
Term hSetCookie() { static const Term t = makeStr("Set-Cookie"); return t; }
Term hCookie() { static const Term t = makeStr("Cookie"); return t; }
Term hLocation() { static const Term t = makeStr("Location"); return t; }
Term hReferer() { static const Term t = makeStr("Referer"); return t; }
Term hSts() { static const Term t = makeStr("Strict-Transport-Security"); return t; }
Term hAuthorization() { static const Term t = makeStr("Authorization"); return t; }
Term hReferrerPolicy() { static const Term t = makeStr("ReferrerPolicy"); return t; }
Term rpNoReferrer() { static const Term t = makeStr("noreferrer"); return t; }
Term rpOrigin() { static const Term t = makeStr("origin"); return t; }

Term status200() { static const Term t = makeStr("200"); return t; }
Term status303() { static const Term t = makeStr("303"); return t; }
Term status307() { static const Term t = makeStr("307"); return t; }

const std::vector<Term>& recognizedHeaders() {
  static const std::vector<Term> v = {hOrigin(),  hSetCookie(),     hCookie(),
                                      hLocation(), hReferer(),      hSts(),
                                      hAuthorization(), hReferrerPolicy()};
  return v;
}

Url Url::make(const Term& protocol, const Term& host, const Term& path, const Term& params,
              const Term& fragment) {
  return Url{Term::seq({tUrl(), protocol, host, path, params, fragment})};
}

Url Url::withProtocol(const Term& p) const {
  return make(p, host(), path(), params(), fragment());
}
Url Url::withPath(const Term& p) const {
  return make(protocol(), host(), p, params(), fragment());
}
Url Url::withParams(const Term& p) const {
  return make(protocol(), host(), path(), p, fragment());
}
Url Url::withFragment(const Term& f) const {
  return make(protocol(), host(), path(), params(), f);
}

Origin Origin::make(const Term& host, const Term& protocol) {
  return Origin{Term::seq({host, protocol})};
}

Cookie Cookie::make(const Term& name, const Term& value, bool secure, bool session,
                    bool httpOnly) {
  return Cookie{Term::seq({name, Term::seq({value, Term::boolean(secure),
                                            Term::boolean(session), Term::boolean(httpOnly)})})};
}

HttpRequest HttpRequest::make(const Term& nonce, const Term& method, const Term& host,
                              const Term& path, const Term& params, const Term& headers,
                              const Term& body) {
  return HttpRequest{Term::seq({tHttpReq(), nonce, method, host, path, params, headers, body})};
}

HttpRequest HttpRequest::withHeaders(const Term& h) const {
  return make(nonce(), method(), host(), path(), params(), h, body());
}
HttpRequest HttpRequest::withParams(const Term& p) const {
  return make(nonce(), method(), host(), path(), p, headers(), body());
}
HttpRequest HttpRequest::withBody(const Term& b) const {
  return make(nonce(), method(), host(), path(), params(), headers(), b);
}

HttpResponse HttpResponse::make(const Term& nonce, const Term& status, const Term& headers,
                                const Term& body) {
  return HttpResponse{Term::seq({tHttpResp(), nonce, status, headers, body})};
}

DnsRequest DnsRequest::make(const Term& domain, const Term& nonce) {
  return DnsRequest{Term::seq({tDnsResolve(), domain, nonce})};
}

DnsResponse DnsResponse::make(const Term& domain, const Term& address, const Term& nonce) {
  return DnsResponse{Term::seq({tDnsResolved(), domain, address, nonce})};
}

namespace {

bool isProto(const Term& t) { return t == protoP() || t == protoS(); }

std::optional<ShapeError> checkHeaders(const Term& headers, bool isRequest) {
  if (!headers.isSeq()) return ShapeError{"headers", "not a sequence"};
  for (const Term& h : headers.args()) {
    if (!h.isSeq() || h.size() != 2) return ShapeError{"headers", "entry is not a pair"};
    const Term& name = h.at(0);
    bool known = false;
    for (const Term& k : recognizedHeaders())
      if (name == k) known = true;
    if (!known) return ShapeError{"headers", "unrecognized header " + std::string(name.isStr() ? name.text() : "<non-string>")};
    const Term& v = h.at(1);
    if (name == hReferrerPolicy() && !(v == rpNoReferrer() || v == rpOrigin()))
      return ShapeError{"ReferrerPolicy", "value must be noreferrer or origin"};
    if (name == hLocation() || name == hReferer()) {
      if (auto u = validateUrl(v); !ok(u)) return ShapeError{"Location/Referer", "not a URL"};
    }
    // Origin values are not shape-checked: redirects replace them with
    // nested origin chains by design, and receivers compare against their
    // own origin anyway.
    if (name == hSetCookie()) {
      if (!v.isSeq()) return ShapeError{"Set-Cookie", "not a cookie sequence"};
      for (const Term& c : v.args())
        if (auto cv = validateCookie(c); !ok(cv)) return ShapeError{"Set-Cookie", "bad cookie"};
    }
  }
  return std::nullopt;
}

}  // namespace

Shaped<Url> validateUrl(const Term& raw) {
  Term t = normalize(raw);
  if (!t.isSeq() || t.size() != 6) return ShapeError{"url", "expected 6-element sequence"};
  if (t.at(0) != tUrl()) return ShapeError{"tag", "missing URL tag"};
  if (!isProto(t.at(1))) return ShapeError{"protocol", "must be P or S"};
  if (!t.at(2).isStr()) return ShapeError{"host", "must be a domain string"};
  if (!t.at(3).isStr()) return ShapeError{"path", "must be a string"};
  if (!t.at(4).isSeq()) return ShapeError{"parameters", "must be a dictionary"};
  return Url{t};
}

Shaped<Origin> validateOrigin(const Term& raw) {
  Term t = normalize(raw);
  if (!t.isSeq() || t.size() != 2) return ShapeError{"origin", "expected 2-element sequence"};
  if (!t.at(0).isStr()) return ShapeError{"host", "must be a domain string"};
  if (!isProto(t.at(1))) return ShapeError{"protocol", "must be P or S"};
  return Origin{t};
}

Shaped<Cookie> validateCookie(const Term& raw) {
  Term t = normalize(raw);
  if (!t.isSeq() || t.size() != 2) return ShapeError{"cookie", "expected <name,content>"};
  const Term& c = t.at(1);
  if (!c.isSeq() || c.size() != 4) return ShapeError{"content", "expected 4-element content"};
  for (size_t i = 1; i < 4; ++i)
    if (!(c.at(i).isTop() || c.at(i).isBot()))
      return ShapeError{"content", "flags must be boolean"};
  return Cookie{t};
}

Shaped<HttpRequest> validateRequest(const Term& raw) {
  Term t = normalize(raw);
  if (!t.isSeq() || t.size() != 8) return ShapeError{"request", "expected 8-element sequence"};
  if (t.at(0) != tHttpReq()) return ShapeError{"tag", "missing HTTPReq tag"};
  if (!t.at(1).isNonce()) return ShapeError{"nonce", "must be a nonce"};
  if (!t.at(2).isStr()) return ShapeError{"method", "must be a method string"};
  if (!t.at(3).isStr()) return ShapeError{"host", "must be a domain string"};
  if (!t.at(4).isStr()) return ShapeError{"path", "must be a string"};
  if (!t.at(5).isSeq()) return ShapeError{"parameters", "must be a dictionary"};
  if (auto e = checkHeaders(t.at(6), true)) return *e;
  return HttpRequest{t};
}

Shaped<HttpResponse> validateResponse(const Term& raw) {
  Term t = normalize(raw);
  if (!t.isSeq() || t.size() != 5) return ShapeError{"response", "expected 5-element sequence"};
  if (t.at(0) != tHttpResp()) return ShapeError{"tag", "missing HTTPResp tag"};
  if (!t.at(1).isNonce()) return ShapeError{"nonce", "must be a nonce"};
  if (!t.at(2).isStr()) return ShapeError{"status", "must be a status string"};
  if (auto e = checkHeaders(t.at(3), false)) return *e;
  return HttpResponse{t};
}

Shaped<DnsRequest> validateDnsRequest(const Term& raw) {
  Term t = normalize(raw);
  if (!t.isSeq() || t.size() != 3) return ShapeError{"dns", "expected 3-element sequence"};
  if (t.at(0) != tDnsResolve()) return ShapeError{"tag", "missing DNSResolve tag"};
  if (!t.at(1).isStr()) return ShapeError{"domain", "must be a domain string"};
  if (!t.at(2).isNonce()) return ShapeError{"nonce", "must be a nonce"};
  return DnsRequest{t};
}

Shaped<DnsResponse> validateDnsResponse(const Term& raw) {
  Term t = normalize(raw);
  if (!t.isSeq() || t.size() != 4) return ShapeError{"dns", "expected 4-element sequence"};
  if (t.at(0) != tDnsResolved()) return ShapeError{"tag", "missing DNSResolved tag"};
  if (!t.at(1).isStr()) return ShapeError{"domain", "must be a domain string"};
  if (!t.at(2).isAddr()) return ShapeError{"address", "must be an address"};
  if (!t.at(3).isNonce()) return ShapeError{"nonce", "must be a nonce"};
  return DnsResponse{t};
}

Term httpsWrap(const HttpRequest& req, const Term& symKey, const Term& serverPubKey) {
  return Term::app(Op::EncA, {Term::seq({req.t, symKey}), serverPubKey});
}

Term httpsWrapResponse(const HttpResponse& resp, const Term& symKey) {
  return Term::app(Op::EncS, {resp.t, symKey});
}

std::optional<std::pair<HttpRequest, Term>> httpsUnwrapRequest(const Term& t, const Term& privKey) {
  Term dec = normalize(Term::app(Op::DecA, {t, privKey}));
  if (!dec.isSeq() || dec.size() != 2) return std::nullopt;
  auto req = validateRequest(dec.at(0));
  if (!ok(req)) return std::nullopt;
  if (!dec.at(1).isNonce()) return std::nullopt;
  return std::make_pair(get(req), dec.at(1));
}

std::optional<HttpResponse> httpsUnwrapResponse(const Term& t, const Term& symKey) {
  Term dec = normalize(Term::app(Op::DecS, {t, symKey}));
  auto resp = validateResponse(dec);
  if (!ok(resp)) return std::nullopt;
  return get(resp);
}

std::pair<Term, Term> dnsPair(const Term& domain, const Term& nonce, const Term& answer) {
  return {DnsRequest::make(domain, nonce).t, DnsResponse::make(domain, answer, nonce).t};
}

}  // namespace oasim::web
