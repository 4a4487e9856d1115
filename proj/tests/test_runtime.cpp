#include "doctest.h"

#include "oasim/derive.hpp"
#include "oasim/runtime.hpp"
#include "oasim/serialize.hpp"
#include "oasim/wire.hpp"

using namespace oasim;
using namespace oasim::rt;

namespace {

Term s(const char* x) { return Term::str(x); }

// Echoes every non-trigger message back to the sender with a fresh nonce
// appended; stutters on triggers.
struct EchoRelation : Relation {
  RelationResult apply(const Term& event, const Term& state, Chooser& ch) const override {
    if (event.at(2) == triggerMsg()) throw NoBranch{};
    RelationResult r;
    r.state = state;
    Term reply = Term::seq({event.at(2), Term::var(VarKind::Process, 1)});
    r.events.push_back(Term::seq({event.at(1), event.at(0), reply}));
    return r;
  }
};

// Emits one message per trigger, choosing the payload from a menu.
struct MenuRelation : Relation {
  Term target;
  explicit MenuRelation(Term t) : target(std::move(t)) {}
  RelationResult apply(const Term& event, const Term& state, Chooser& ch) const override {
    if (event.at(2) != triggerMsg()) throw NoBranch{};
    size_t i = ch.pick(3, "payload");
    RelationResult r;
    r.state = state;
    r.events.push_back(Term::seq({target, event.at(0), s(i == 0 ? "a" : i == 1 ? "b" : "c")}));
    return r;
  }
};

// Spoofing process used to check the web-attacker sender rule.
struct SpoofRelation : Relation {
  Term foreign;
  explicit SpoofRelation(Term f) : foreign(std::move(f)) {}
  RelationResult apply(const Term& event, const Term& state, Chooser&) const override {
    RelationResult r;
    r.state = state;
    r.events.push_back(Term::seq({event.at(1), foreign, s("spoofed")}));
    r.events.push_back(Term::seq({event.at(1), event.at(0), s("own")}));
    return r;
  }
};

System twoProcSystem() {
  System sys;
  sys.procs.push_back({"alpha", PartyKind::RelyingParty, {Term::addr("a1")},
                       s("st-alpha"), std::make_shared<EchoRelation>()});
  sys.procs.push_back({"beta", PartyKind::RelyingParty, {Term::addr("a2")},
                       s("st-beta"), std::make_shared<MenuRelation>(Term::addr("a1"))});
  return sys;
}

Configuration initialConfig(const System& sys) {
  Configuration cfg;
  for (const Process& p : sys.procs) cfg.states[p.id] = p.initialState;
  return cfg;
}

}  // namespace

TEST_CASE("step consumes the event, prepends outputs, keeps other states") {
  System sys = twoProcSystem();
  Configuration cfg = initialConfig(sys);
  cfg.pool.push_back({Term::seq({Term::addr("a1"), Term::addr("a2"), s("hello")}), -1});
  cfg.pool.push_back({Term::seq({Term::addr("a2"), Term::addr("a2"), s("later")}), -1});

  Trace tr;
  Decision d{.trigger = false, .poolIndex = 0, .procIndex = 0};
  std::mt19937_64 rng(1);
  SeededChooser ch(rng);
  REQUIRE(applyStep(sys, cfg, d, ch, tr));

  REQUIRE(cfg.pool.size() == 2);
  CHECK(cfg.pool[0].event.at(0) == Term::addr("a2"));  // reply prepended
  CHECK(cfg.pool[0].producer == 0);
  CHECK(cfg.pool[1].event.at(2) == s("later"));  // untouched remainder
  CHECK(cfg.states.at("beta") == s("st-beta"));  // frame invariant
  REQUIRE(tr.steps.size() == 1);
  CHECK(tr.steps[0].bindings.size() == 1);  // one fresh nonce bound
}

TEST_CASE("stutter leaves the configuration unchanged") {
  System sys = twoProcSystem();
  Configuration cfg = initialConfig(sys);
  Trace tr;
  Decision d{.trigger = true, .poolIndex = 0, .procIndex = 0};
  std::mt19937_64 rng(2);
  SeededChooser ch(rng);
  CHECK_FALSE(applyStep(sys, cfg, d, ch, tr));
  CHECK(cfg.pool.empty());
  CHECK(tr.steps.size() == 1);
  CHECK(tr.steps[0].stutter);
}

TEST_CASE("fresh nonces are never reissued across steps") {
  System sys = twoProcSystem();
  Configuration cfg = initialConfig(sys);
  for (int i = 0; i < 5; ++i)
    cfg.pool.push_back({Term::seq({Term::addr("a1"), Term::addr("a2"), s("m")}), -1});
  Trace tr;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    // Deliver the last pool entry each time (replies pile up in front).
    Decision d{.trigger = false, .poolIndex = cfg.pool.size() - 1, .procIndex = 0};
    SeededChooser ch(rng);
    REQUIRE(applyStep(sys, cfg, d, ch, tr));
  }
  std::vector<uint64_t> ids;
  for (const auto& st : tr.steps)
    for (const auto& [v, n] : st.bindings) ids.push_back(n.nonceId());
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("web attacker emissions from foreign addresses are rejected") {
  System sys;
  sys.procs.push_back({"w", PartyKind::WebAttacker, {Term::addr("aw")}, s("k"),
                       std::make_shared<SpoofRelation>(Term::addr("victim"))});
  Configuration cfg;
  cfg.states["w"] = s("k");
  cfg.pool.push_back({Term::seq({Term::addr("aw"), Term::addr("x"), s("go")}), -1});
  Trace tr;
  Decision d{.trigger = false, .poolIndex = 0, .procIndex = 0};
  std::mt19937_64 rng(4);
  SeededChooser ch(rng);
  REQUIRE(applyStep(sys, cfg, d, ch, tr));
  REQUIRE(cfg.pool.size() == 1);
  CHECK(cfg.pool[0].event.at(2) == s("own"));
  REQUIRE(tr.steps[0].meta.rejected.size() == 1);
  CHECK(tr.steps[0].meta.rejected[0].at(2) == s("spoofed"));
}

TEST_CASE("network attacker may spoof any sender") {
  System sys;
  sys.procs.push_back({"na", PartyKind::NetworkAttacker, {Term::addr("an")}, s("k"),
                       std::make_shared<SpoofRelation>(Term::addr("victim"))});
  Configuration cfg;
  cfg.states["na"] = s("k");
  cfg.pool.push_back({Term::seq({Term::addr("elsewhere"), Term::addr("x"), s("go")}), -1});
  Trace tr;
  Decision d{.trigger = false, .poolIndex = 0, .procIndex = 0};
  std::mt19937_64 rng(5);
  SeededChooser ch(rng);
  REQUIRE(applyStep(sys, cfg, d, ch, tr));  // also listens on foreign addresses
  CHECK(cfg.pool.size() == 2);
  CHECK(tr.steps[0].meta.rejected.empty());
}

TEST_CASE("dns server answers known domains and ignores the rest") {
  Term table = Term::seq({Term::seq({s("idp.com"), Term::addr("a_idp")})});
  DnsServerRelation dns(table);
  std::mt19937_64 rng(6);
  SeededChooser ch(rng);

  Term req = web::DnsRequest::make(s("idp.com"), Term::nonce(7)).t;
  Term ev = Term::seq({Term::addr("a_dns"), Term::addr("a_b"), req});
  auto r = dns.apply(ev, s("state"), ch);
  REQUIRE(r.events.size() == 1);
  auto resp = web::validateDnsResponse(r.events[0].at(2));
  REQUIRE(web::ok(resp));
  CHECK(web::get(resp).address() == Term::addr("a_idp"));
  CHECK(web::get(resp).nonce() == Term::nonce(7));

  Term unknown = web::DnsRequest::make(s("nope.com"), Term::nonce(8)).t;
  auto r2 = dns.apply(Term::seq({Term::addr("a_dns"), Term::addr("a_b"), unknown}), s("x"), ch);
  CHECK(r2.events.empty());

  auto r3 = dns.apply(Term::seq({Term::addr("a_dns"), Term::addr("a_b"), s("garbage")}), s("x"), ch);
  CHECK(r3.events.empty());
}

TEST_CASE("replay policy reproduces a seeded run exactly") {
  System sys = twoProcSystem();
  Configuration cfg0 = initialConfig(sys);

  SeededPolicy pol(77, {"beta"});
  Trace t1 = run(sys, cfg0, pol, 30);
  REQUIRE(!t1.steps.empty());

  std::vector<ReplayStep> rs;
  for (const auto& st : t1.steps)
    rs.push_back({st.viaTrigger, st.poolIndex, st.proc, st.choiceInts});
  ReplayPolicy rp(rs);
  Trace t2 = run(sys, cfg0, rp, 1000);

  REQUIRE(t1.steps.size() == t2.steps.size());
  for (size_t i = 0; i < t1.steps.size(); ++i) {
    CHECK(t1.steps[i].event == t2.steps[i].event);
    CHECK(t1.steps[i].emitted == t2.steps[i].emitted);
  }
  CHECK(canonicalConfigHash(t1.steps.back().post) == canonicalConfigHash(t2.steps.back().post));
}

TEST_CASE("canonical hash is invariant under nonce renaming") {
  Configuration a, b;
  a.states["p"] = Term::seq({Term::nonce(10), Term::nonce(11), Term::nonce(10)});
  b.states["p"] = Term::seq({Term::nonce(70), Term::nonce(3), Term::nonce(70)});
  CHECK(canonicalConfigHash(a) == canonicalConfigHash(b));
  Configuration c;
  c.states["p"] = Term::seq({Term::nonce(70), Term::nonce(3), Term::nonce(3)});
  CHECK(canonicalConfigHash(a) != canonicalConfigHash(c));
}
