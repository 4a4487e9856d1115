#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oasim/term.hpp"

namespace oasim::web {

// Tag constants and the closed header/method/policy vocabularies.
Term tUrl();
Term tHttpReq();
Term tHttpResp();
Term tDnsResolve();
Term tDnsResolved();
Term protoP();  // plain http
Term protoS();  // https

Term mGet();
Term mPost();
Term mHead();

Term hOrigin();
Term hSetCookie();
Term hCookie();
Term hLocation();
Term hReferer();
Term hSts();
Term hAuthorization();
Term hReferrerPolicy();
Term rpNoReferrer();
Term rpOrigin();

Term status200();
Term status303();
Term status307();

const std::vector<Term>& recognizedHeaders();

struct ShapeError {
  std::string field;
  std::string detail;
};

template <typename T>
using Shaped = std::variant<T, ShapeError>;

template <typename T>
bool ok(const Shaped<T>& s) { return std::holds_alternative<T>(s); }
template <typename T>
const T& get(const Shaped<T>& s) { return std::get<T>(s); }
template <typename T>
const ShapeError& err(const Shaped<T>& s) { return std::get<ShapeError>(s); }

// URL <URL, protocol, host, path, parameters, fragment>
struct Url {
  Term t;
  Term protocol() const { return t.at(1); }
  Term host() const { return t.at(2); }
  Term path() const { return t.at(3); }
  Term params() const { return t.at(4); }
  Term fragment() const { return t.at(5); }
  bool isHttps() const { return protocol() == protoS(); }
  Url withProtocol(const Term& p) const;
  Url withPath(const Term& p) const;
  Url withParams(const Term& p) const;
  Url withFragment(const Term& f) const;
  static Url make(const Term& protocol, const Term& host, const Term& path,
                  const Term& params = Term::seq({}), const Term& fragment = Term::bot());
};

// Origin <host, protocol>
struct Origin {
  Term t;
  Term host() const { return t.at(0); }
  Term protocol() const { return t.at(1); }
  static Origin make(const Term& host, const Term& protocol);
};

// Full cookie <name, <value, secure, session, httpOnly>>
struct Cookie {
  Term t;
  Term name() const { return t.at(0); }
  Term value() const { return t.at(1).at(0); }
  bool secure() const { return t.at(1).at(1).isTop(); }
  bool session() const { return t.at(1).at(2).isTop(); }
  bool httpOnly() const { return t.at(1).at(3).isTop(); }
  static Cookie make(const Term& name, const Term& value, bool secure, bool session,
                     bool httpOnly);
};

// <HTTPReq, nonce, method, host, path, parameters, headers, body>
struct HttpRequest {
  Term t;
  Term nonce() const { return t.at(1); }
  Term method() const { return t.at(2); }
  Term host() const { return t.at(3); }
  Term path() const { return t.at(4); }
  Term params() const { return t.at(5); }
  Term headers() const { return t.at(6); }
  Term body() const { return t.at(7); }
  Term header(const Term& name) const { return dictGet(headers(), name); }
  HttpRequest withHeaders(const Term& h) const;
  HttpRequest withParams(const Term& p) const;
  HttpRequest withBody(const Term& b) const;
  static HttpRequest make(const Term& nonce, const Term& method, const Term& host,
                          const Term& path, const Term& params, const Term& headers,
                          const Term& body);
};

// <HTTPResp, nonce, status, headers, body>
struct HttpResponse {
  Term t;
  Term nonce() const { return t.at(1); }
  Term status() const { return t.at(2); }
  Term headers() const { return t.at(3); }
  Term body() const { return t.at(4); }
  Term header(const Term& name) const { return dictGet(headers(), name); }
  static HttpResponse make(const Term& nonce, const Term& status, const Term& headers,
                           const Term& body);
};

// <DNSResolve, domain, nonce> / <DNSResolved, domain, address, nonce>
struct DnsRequest {
  Term t;
  Term domain() const { return t.at(1); }
  Term nonce() const { return t.at(2); }
  static DnsRequest make(const Term& domain, const Term& nonce);
};

struct DnsResponse {
  Term t;
  Term domain() const { return t.at(1); }
  Term address() const { return t.at(2); }
  Term nonce() const { return t.at(3); }
  static DnsResponse make(const Term& domain, const Term& address, const Term& nonce);
};

Shaped<Url> validateUrl(const Term& t);
Shaped<Origin> validateOrigin(const Term& t);
Shaped<Cookie> validateCookie(const Term& t);
Shaped<HttpRequest> validateRequest(const Term& t);
Shaped<HttpResponse> validateResponse(const Term& t);
Shaped<DnsRequest> validateDnsRequest(const Term& t);
Shaped<DnsResponse> validateDnsResponse(const Term& t);

// HTTPS envelope: requests carry an ephemeral symmetric key under the
// server's public key; the response comes back under that key.
Term httpsWrap(const HttpRequest& req, const Term& symKey, const Term& serverPubKey);
Term httpsWrapResponse(const HttpResponse& resp, const Term& symKey);
std::optional<std::pair<HttpRequest, Term>> httpsUnwrapRequest(const Term& t, const Term& privKey);
std::optional<HttpResponse> httpsUnwrapResponse(const Term& t, const Term& symKey);

std::pair<Term, Term> dnsPair(const Term& domain, const Term& nonce, const Term& answer);

}  // namespace oasim::web
