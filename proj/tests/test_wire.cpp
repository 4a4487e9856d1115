#include "doctest.h"

#include "oasim/wire.hpp"
#include "test_helpers.hpp"

using namespace oasim;
using namespace oasim::web;

namespace {
Term s(const char* x) { return Term::str(x); }
}

TEST_CASE("request view per the running example") {
  Term t = Term::seq({tHttpReq(), Term::nonce(1), mGet(), s("example.com"), s("/s"),
                      Term::seq({Term::seq({s("p"), s("1")})}), Term::seq({}), Term::seq({})});
  auto v = validateRequest(t);
  REQUIRE(ok(v));
  CHECK(get(v).host() == s("example.com"));
  CHECK(get(v).t == t);  // re-validating the emitted term yields the same view
  auto again = validateRequest(get(v).t);
  REQUIRE(ok(again));
  CHECK(get(again).t == get(v).t);
}

TEST_CASE("response with httpOnly session cookie") {
  Term cookie = Cookie::make(s("SID"), Term::nonce(2), false, false, true).t;
  Term t = HttpResponse::make(Term::nonce(1), status200(),
                              Term::seq({Term::seq({hSetCookie(), Term::seq({cookie})})}),
                              Term::seq({s("somescript"), s("x")}))
               .t;
  auto v = validateResponse(t);
  REQUIRE(ok(v));
  auto c = validateCookie(dictGet(get(v).header(hSetCookie()), s("SID")).isSeq()
                              ? Term::seq({s("SID"), dictGet(get(v).header(hSetCookie()), s("SID"))})
                              : cookie);
  CHECK(ok(c));
}

TEST_CASE("wrong arity is a shape error") {
  Term t = Term::seq({tHttpReq(), Term::nonce(1), mGet()});
  CHECK_FALSE(ok(validateRequest(t)));
}

TEST_CASE("unrecognized header is a shape error") {
  Term t = HttpRequest::make(Term::nonce(1), mGet(), s("h.com"), s("/"), Term::seq({}),
                             Term::seq({Term::seq({s("X-Custom"), s("v")})}), Term::seq({}))
               .t;
  CHECK_FALSE(ok(validateRequest(t)));
}

TEST_CASE("referrer policy values are closed") {
  auto mk = [&](Term v) {
    return HttpResponse::make(Term::nonce(1), status200(),
                              Term::seq({Term::seq({hReferrerPolicy(), v})}), Term::seq({}))
        .t;
  };
  CHECK(ok(validateResponse(mk(rpOrigin()))));
  CHECK(ok(validateResponse(mk(rpNoReferrer()))));
  CHECK_FALSE(ok(validateResponse(mk(s("unsafe-url")))));
}

TEST_CASE("https round trip") {
  Term k = Term::nonce(10), sym = Term::nonce(11);
  testing::TermGen gen(5);
  for (int i = 0; i < 200; ++i) {
    HttpRequest req = HttpRequest::make(Term::nonce(1), mPost(), s("rp.com"), s("/x"),
                                        Term::seq({}), Term::seq({}), normalize(gen.term(3)));
    Term wire = httpsWrap(req, sym, Term::app(Op::Pub, {k}));
    auto back = httpsUnwrapRequest(wire, k);
    REQUIRE(back.has_value());
    CHECK(back->first.t == req.t);
    CHECK(back->second == sym);
    // wrong key fails
    CHECK_FALSE(httpsUnwrapRequest(wire, Term::nonce(99)).has_value());

    HttpResponse resp = HttpResponse::make(Term::nonce(1), status200(), Term::seq({}),
                                           normalize(gen.term(3)));
    Term rw = httpsWrapResponse(resp, sym);
    auto rback = httpsUnwrapResponse(rw, sym);
    REQUIRE(rback.has_value());
    CHECK(rback->t == resp.t);
    CHECK_FALSE(httpsUnwrapResponse(rw, Term::nonce(98)).has_value());
  }
}

TEST_CASE("dns pair is matched") {
  auto [req, resp] = dnsPair(s("rp.com"), Term::nonce(3), Term::addr("a_rp"));
  auto rq = validateDnsRequest(req);
  auto rs = validateDnsResponse(resp);
  REQUIRE(ok(rq));
  REQUIRE(ok(rs));
  CHECK(get(rq).nonce() == get(rs).nonce());
  CHECK(get(rq).domain() == get(rs).domain());
}

TEST_CASE("url helpers") {
  Url u = Url::make(protoS(), s("rp.com"), s("/redirectionEndpoint"),
                    Term::seq({Term::seq({s("idp"), s("hidp.com")})}));
  CHECK(u.isHttps());
  CHECK(u.fragment() == Term::bot());
  auto v = validateUrl(u.t);
  REQUIRE(ok(v));
  CHECK(u.withProtocol(protoP()).protocol() == protoP());
}
