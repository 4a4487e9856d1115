#include "doctest.h"

#include "oasim/serialize.hpp"
#include "oasim/term.hpp"
#include "test_helpers.hpp"

using namespace oasim;

namespace {

Term s(const char* x) { return Term::str(x); }

}  // namespace

TEST_CASE("projection of decrypted pair") {
  // proj1(dec_a(enc_a(<"a","b">, pub(k)), k)) reduces to "a"
  Term k = Term::nonce(1);
  Term enc = Term::app(Op::EncA, {Term::seq({s("a"), s("b")}), Term::app(Op::Pub, {k})});
  Term t = Term::proj(1, Term::app(Op::DecA, {enc, k}));
  CHECK(normalize(t) == s("a"));
}

TEST_CASE("atoms are in normal form") {
  Term n = Term::nonce(7);
  CHECK(normalize(n) == n);
  CHECK(n.inNormalForm());
}

TEST_CASE("out-of-range projection yields diamond") {
  Term t = Term::proj(3, Term::seq({s("a"), s("b")}));
  CHECK(normalize(t) == Term::dia());
  CHECK(normalize(Term::proj(0, Term::seq({s("a")}))) == Term::dia());
}

TEST_CASE("asymmetric decryption cancels encryption") {
  Term r = Term::nonce(3);
  Term k = Term::nonce(4);
  Term t = Term::app(Op::DecA, {Term::app(Op::EncA, {r, Term::app(Op::Pub, {k})}), k});
  CHECK(equiv(t, r));
}

TEST_CASE("equiv distinguishes different keys") {
  Term x = s("x");
  Term enc1 = Term::app(Op::EncS, {x, Term::nonce(1)});
  Term enc2 = Term::app(Op::EncS, {x, Term::nonce(2)});
  CHECK(equiv(enc1, enc1));
  CHECK_FALSE(equiv(enc1, enc2));
}

TEST_CASE("checksig and extractmsg") {
  Term m = s("m");
  Term k = Term::nonce(9);
  Term sg = Term::app(Op::Sig, {m, k});
  CHECK(normalize(Term::app(Op::CheckSig, {sg, m, Term::app(Op::Pub, {k})})) == Term::top());
  CHECK(normalize(Term::app(Op::ExtractMsg, {sg})) == m);
  // failed signature check stays unreduced
  Term bad = Term::app(Op::CheckSig, {sg, s("other"), Term::app(Op::Pub, {k})});
  CHECK(normalize(bad).isApp());
}

TEST_CASE("pattern matching per the worked example") {
  Term p = Term::seq({Term::top(), Term::wildcard()});
  CHECK(matches(Term::seq({Term::top(), s("42")}), p));
  CHECK_FALSE(matches(Term::seq({Term::bot(), s("42")}), p));
  CHECK(matches(Term::nonce(1), Term::wildcard()));

  Term t = Term::seq({Term::seq({Term::bot(), Term::top()}), Term::seq({Term::top(), s("23")}),
                      Term::seq({s("a"), s("b")}), Term::seq({Term::top(), Term::bot()})});
  Term want = Term::seq({Term::seq({Term::top(), s("23")}), Term::seq({Term::top(), Term::bot()})});
  CHECK(filterMatching(t, p) == want);
  CHECK(filterMatching(Term::seq({}), p) == Term::seq({}));
  CHECK(filterMatching(t, Term::wildcard()) == t);
}

TEST_CASE("independent wildcards bind independently") {
  Term p = Term::seq({Term::wildcard(), Term::wildcard()});
  CHECK(matches(Term::seq({s("a"), s("b")}), p));
}

TEST_CASE("pointer application") {
  Term tau = Term::seq({s("a"), s("b"),
                        Term::seq({s("c"), s("d"), Term::seq({s("e"), s("f")})})});
  uint32_t p1[] = {3, 3, 1};
  CHECK(applyPointer(tau, p1) == s("e"));
  CHECK(applyPointer(tau, {}) == tau);
  uint32_t p2[] = {9};
  CHECK(applyPointer(tau, p2) == Term::dia());
}

TEST_CASE("dictionary operations") {
  Term k1 = s("k1"), v1 = s("v1"), k2 = s("k2"), v2 = s("v2");
  Term d = dictPut(dictPut(Term::seq({}), k1, v1), k2, v2);
  CHECK(dictGet(d, k2) == v2);
  CHECK(dictGet(Term::seq({}), k1) == Term::seq({}));
  CHECK(dictRemove(dictPut(Term::seq({}), k1, v1), k1) == Term::seq({}));
  // put replaces in place
  Term d2 = dictPut(d, k1, s("v3"));
  CHECK(dictGet(d2, k1) == s("v3"));
  CHECK(d2.size() == 2);
  CHECK(d2.at(0).at(0) == k1);
}

TEST_CASE("dict keys stay pairwise distinct under put") {
  testing::TermGen gen(99);
  for (int i = 0; i < 200; ++i) {
    Term d = Term::seq({});
    for (int j = 0; j < 6; ++j) d = dictPut(d, gen.term(1), gen.term(1));
    for (size_t a = 0; a < d.size(); ++a)
      for (size_t b = a + 1; b < d.size(); ++b)
        CHECK_FALSE(equiv(d.at(a).at(0), d.at(b).at(0)));
  }
}

TEST_CASE("normalization is idempotent on random terms") {
  testing::TermGen gen(42);
  for (int i = 0; i < 2000; ++i) {
    Term t = gen.term(6);
    Term n = normalize(t);
    CHECK(normalize(n) == n);
    CHECK(n.inNormalForm());
  }
}

TEST_CASE("filterMatching keeps exactly the matching subsequence") {
  testing::TermGen gen(7);
  Term p = Term::seq({Term::top(), Term::wildcard()});
  for (int i = 0; i < 300; ++i) {
    std::vector<Term> elems;
    for (size_t j = 0; j < gen.pick(6); ++j) elems.push_back(gen.term(2));
    Term t = Term::seq(elems);
    Term f = filterMatching(t, p);
    size_t fi = 0;
    Term nt = normalize(t);
    for (const Term& e : nt.args()) {
      if (matches(e, p)) {
        REQUIRE(fi < f.size());
        CHECK(f.at(fi) == e);
        ++fi;
      }
    }
    CHECK(fi == f.size());
  }
}

TEST_CASE("canonical serialization round-trips") {
  testing::TermGen gen(1234);
  for (int i = 0; i < 1000; ++i) {
    Term t = gen.term(5);
    CHECK(parseTerm(toText(t)) == t);
  }
  // variables and addresses too
  Term t = Term::seq({Term::var(VarKind::Process, 3), Term::var(VarKind::Script, 1),
                      Term::wildcard(), Term::var(VarKind::FactRef, 2), Term::addr("a_rp"),
                      s("quote\"and\\slash")});
  CHECK(parseTerm(toText(t)) == t);
}

TEST_CASE("substitution and variable collection") {
  Term t = Term::seq({Term::var(VarKind::Process, 2), Term::var(VarKind::Process, 1),
                      Term::var(VarKind::Process, 2)});
  auto vars = collectVars(t, VarKind::Process);
  REQUIRE(vars.size() == 2);
  CHECK(vars[0] == 1);
  CHECK(vars[1] == 2);
  Term g = substituteProcessVars(t, {{1, Term::nonce(10)}, {2, Term::nonce(20)}});
  CHECK(g == Term::seq({Term::nonce(20), Term::nonce(10), Term::nonce(20)}));
  CHECK(g.ground());
}
