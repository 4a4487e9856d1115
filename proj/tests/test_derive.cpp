#include "doctest.h"

#include "oasim/derive.hpp"
#include "oracle.hpp"
#include "test_helpers.hpp"

using namespace oasim;

namespace {
Term s(const char* x) { return Term::str(x); }
}

TEST_CASE("payload of an encryption opens with the key") {
  // a in d({enc_a(<a,b,c>, pub(k)), k})
  Term k = Term::nonce(1);
  Term fact = Term::app(Op::EncA, {Term::seq({s("a"), s("b"), s("c")}), Term::app(Op::Pub, {k})});
  Knowledge K({fact, k});
  auto d = derive(s("a"), K);
  CHECK(d.ok);
  CHECK(recipeDerives(d.recipe, K, s("a")));
}

TEST_CASE("membership is derivable with the fact itself as recipe") {
  Term m = Term::seq({Term::nonce(5), s("payload")});
  Knowledge K({m});
  auto d = derive(m, K);
  REQUIRE(d.ok);
  CHECK(d.recipe == Term::var(VarKind::FactRef, 0));
}

TEST_CASE("private key is not derivable from its public key") {
  Term k = Term::nonce(9);
  Knowledge K({Term::app(Op::Pub, {k})});
  CHECK_FALSE(derive(k, K).ok);
  CHECK_FALSE(testing::oracleDerivable(k, K.facts()));
}

TEST_CASE("nested decryption chains saturate") {
  Term k1 = Term::nonce(1), k2 = Term::nonce(2), secret = Term::nonce(3);
  Term f1 = Term::app(Op::EncS, {k2, k1});
  Term f2 = Term::app(Op::EncS, {secret, k2});
  Knowledge K({f1, f2, k1});
  auto d = derive(secret, K);
  CHECK(d.ok);
  CHECK(recipeDerives(d.recipe, K, secret));
}

TEST_CASE("signature message extraction is public") {
  Term m = Term::seq({s("hello"), Term::nonce(4)});
  Knowledge K({Term::app(Op::Sig, {m, Term::nonce(8)})});
  auto d = derive(Term::nonce(4), K);
  CHECK(d.ok);
}

TEST_CASE("placeholders are free only when allowed") {
  Term goal = Term::seq({Term::var(VarKind::Process, 1), s("x")});
  Knowledge K(std::vector<Term>{});
  CHECK_FALSE(derive(goal, K).ok);
  CHECK(derive(goal, K, PlaceholderPolicy::processOnly()).ok);
}

TEST_CASE("composition of derivable parts") {
  Term k = Term::nonce(1);
  Knowledge K({k});
  Term goal = Term::app(Op::EncS, {Term::seq({s("m"), k}), k});
  auto d = derive(goal, K);
  REQUIRE(d.ok);
  CHECK(recipeDerives(d.recipe, K, goal));
}

TEST_CASE("derive agrees with the brute-force closure oracle") {
  testing::TermGen gen(2024);
  int yes = 0, no = 0;
  for (int i = 0; i < 1200; ++i) {
    std::vector<Term> facts;
    size_t nf = 1 + gen.pick(6);
    for (size_t j = 0; j < nf; ++j) facts.push_back(normalize(gen.term(3)));
    Term target = normalize(gen.term(4));
    Knowledge K(facts);
    auto d = derive(target, K);
    bool oracle = testing::oracleDerivable(target, facts);
    CAPTURE(i);
    CHECK(d.ok == oracle);
    if (d.ok) {
      ++yes;
      CHECK(recipeDerives(d.recipe, K, target));
    } else {
      ++no;
    }
  }
  // The generator should exercise both outcomes.
  CHECK(yes > 50);
  CHECK(no > 50);
}
