#include "oasim/properties.hpp"

#include <algorithm>

#include "oasim/wire.hpp"

namespace oasim::props {

namespace {

std::string attackerId(const harness::Registry& reg) {
  for (const auto& p : reg.parties)
    if (rt::isAttacker(p.kind)) return p.id;
  return "";
}

const Term& stateOf(const rt::Trace& trace, int64_t step, const std::string& party) {
  return trace.at(step).states.at(party);
}

Term corruptField(const rt::Trace& trace, int64_t step, const harness::Registry& reg,
                  const std::string& party) {
  const harness::Party* p = reg.party(party);
  if (!p) return Term::top();
  const Term& st = stateOf(trace, step, party);
  switch (p->kind) {
    case rt::PartyKind::Browser:
      return st.isSeq() && st.size() == 12 ? st.at(11) : Term::top();
    case rt::PartyKind::RelyingParty:
      return st.isSeq() && st.size() == 9 ? st.at(8) : Term::top();
    case rt::PartyKind::IdentityProvider:
      return st.isSeq() && st.size() == 9 ? st.at(8) : Term::top();
    case rt::PartyKind::DnsServer:
      return Term::bot();
    default:
      return Term::top();  // attackers are never honest
  }
}

}  // namespace

bool honestAt(const rt::Trace& trace, int64_t step, const harness::Registry& reg,
              const std::string& party) {
  return corruptField(trace, step, reg, party).isBot();
}

bool browserFullyCorruptedAt(const rt::Trace& trace, int64_t step, const harness::Registry& reg,
                             const std::string& browserParty) {
  return corruptField(trace, step, reg, browserParty) == rt::fullCorruptMsg();
}

Derivation attackerKnows(const rt::Trace& trace, int64_t step, const harness::Registry& reg,
                         const Term& target) {
  std::string att = attackerId(reg);
  if (att.empty()) return {};
  Knowledge k({stateOf(trace, step, att)});
  return derive(target, k);
}

namespace {

// Steps after which the attacker's knowledge differs from the previous
// state (its own steps), plus the very first state.
std::vector<int64_t> attackerSteps(const rt::Trace& trace, const harness::Registry& reg) {
  std::string att = attackerId(reg);
  std::vector<int64_t> out;
  for (const auto& s : trace.steps)
    if (!s.stutter && s.proc == att) out.push_back(s.index);
  return out;
}

// Excuse clause shared by authorization/authentication: the identity's
// owner is the attacker or a fully corrupted browser, or some trusted RP
// of its password is corrupted.
bool ownerSideCorrupted(const rt::Trace& trace, int64_t step, const harness::Registry& reg,
                        const std::string& idKey) {
  for (const auto& id : reg.identities()) {
    if (id.key() != idKey) continue;
    auto owner = reg.ownerOfId(id.term());
    if (!owner) return true;
    const harness::Party* op = reg.party(*owner);
    if (!op) return true;
    if (rt::isAttacker(op->kind)) return true;
    if (op->kind == rt::PartyKind::Browser && browserFullyCorruptedAt(trace, step, reg, *owner))
      return true;
    if (const auto* rps = reg.trustedRPs(id.term()))
      for (const std::string& r : *rps)
        if (!honestAt(trace, step, reg, r)) return true;
    return false;
  }
  return true;  // unknown identity: nothing to protect
}

}  // namespace

namespace {

std::optional<Witness> authorizationViolationAt(const rt::Trace& trace,
                                                const harness::Registry& reg, int64_t j,
                                                const Knowledge& k) {
  for (const auto& idp : reg.parties) {
    if (idp.kind != rt::PartyKind::IdentityProvider) continue;
    for (const Term& n : reg.allResources(idp.id)) {
      auto info = reg.resourceInfo(n);
      if (!info) continue;
      if (!info->rpParty.empty() && !honestAt(trace, j, reg, info->rpParty)) continue;
      auto d = derive(n, k);
      if (!d.ok) continue;
      if (!honestAt(trace, j, reg, idp.id)) continue;  // excuse (1)
      if (!info->idKey.empty() && ownerSideCorrupted(trace, j, reg, info->idKey))
        continue;  // excuse (2)
      return Witness{j, n, d.recipe,
                     "resourceOf(" + idp.id + "," +
                         (info->rpParty.empty() ? "bot" : info->rpParty) + "," +
                         (info->idKey.empty() ? "bot" : info->idKey) + ")"};
    }
  }
  return std::nullopt;
}

std::optional<Witness> authenticationViolationAt(const rt::Trace& trace,
                                                 const harness::Registry& reg, int64_t j,
                                                 const Knowledge& k) {
  for (const auto& s : trace.steps) {
    if (s.index > j) break;
    if (!s.meta.mint) continue;
    const rt::MintMeta& mnt = *s.meta.mint;
    if (!honestAt(trace, j, reg, s.proc)) continue;
    if (!mnt.idpDomain.isStr()) continue;
    const harness::Party* idp = reg.ownerOfDomain(std::string(mnt.idpDomain.text()));
    if (!idp || idp->kind != rt::PartyKind::IdentityProvider) continue;
    if (!honestAt(trace, j, reg, idp->id)) continue;  // excuse: i corrupted
    std::string idKey = reg.idKeyOf(mnt.user);
    if (idKey.empty()) continue;
    if (ownerSideCorrupted(trace, j, reg, idKey)) continue;
    auto d = derive(mnt.token, k);
    if (!d.ok) continue;
    return Witness{j, mnt.token, d.recipe, "service token for " + idKey + " at " + s.proc};
  }
  return std::nullopt;
}

}  // namespace

PropertyVerdict checkAuthorization(const rt::Trace& trace, const harness::Registry& reg) {
  PropertyVerdict v{"authorization", true, std::nullopt};
  std::string att = attackerId(reg);
  if (att.empty()) return v;
  for (int64_t j : attackerSteps(trace, reg)) {
    Knowledge k({stateOf(trace, j, att)});
    if (auto w = authorizationViolationAt(trace, reg, j, k)) {
      v.holds = false;
      v.witness = *w;
      return v;
    }
  }
  return v;
}

PropertyVerdict checkAuthentication(const rt::Trace& trace, const harness::Registry& reg) {
  PropertyVerdict v{"authentication", true, std::nullopt};
  std::string att = attackerId(reg);
  if (att.empty()) return v;
  for (int64_t j : attackerSteps(trace, reg)) {
    Knowledge k({stateOf(trace, j, att)});
    if (auto w = authenticationViolationAt(trace, reg, j, k)) {
      v.holds = false;
      v.witness = *w;
      return v;
    }
  }
  return v;
}

bool connected(const rt::Trace& trace, int64_t a, int64_t b) {
  if (a >= b) return false;
  const auto& sb = trace.steps[b];
  if (sb.eventProducer == a) return true;
  if (sb.meta.script && sb.meta.script->docNonce.isNonce()) {
    auto it = trace.docProvenance.find(sb.meta.script->docNonce.nonceId());
    if (it != trace.docProvenance.end() && it->second == a) return true;
  }
  return false;
}

bool OAuthSession::contains(int64_t q) const {
  return std::find(steps.begin(), steps.end(), q) != steps.end();
}

namespace {

bool domainOf(const harness::Registry& reg, const std::string& party, const Term& domain) {
  const harness::Party* p = reg.party(party);
  if (!p || !domain.isStr()) return false;
  for (const std::string& d : p->domains)
    if (d == domain.text()) return true;
  return false;
}

bool isStartsOA(const rt::Trace& trace, const harness::Registry& reg, int64_t q,
                const std::string& b, const std::string& r, const std::string& idp /*""=any*/) {
  const auto& s = trace.steps[q];
  if (s.stutter || s.proc != b) return false;
  if (!s.meta.script || s.meta.script->script != "script_rp_index") return false;
  const auto& sm = *s.meta.script;
  if (!sm.interactive.has_value() || !sm.selectedDomain || !sm.commandTargetHost) return false;
  if (!domainOf(reg, r, *sm.commandTargetHost)) return false;
  if (!idp.empty() && !domainOf(reg, idp, *sm.selectedDomain)) return false;
  if (idp.empty()) {
    bool anyIdp = false;
    for (const auto& p : reg.parties)
      if (domainOf(reg, p.id, *sm.selectedDomain)) anyIdp = true;
    if (!anyIdp) return false;
  }
  return true;
}

struct EndsInfo {
  std::string browser;
  std::string rp;
  std::string idp;
  Term resource;
};

std::optional<EndsInfo> endsInfoAt(const rt::Trace& trace, const harness::Registry& reg,
                                   int64_t q) {
  const auto& s = trace.steps[q];
  if (s.stutter || !s.meta.ends) return std::nullopt;
  const harness::Party* rp = reg.party(s.proc);
  if (!rp || rp->kind != rt::PartyKind::RelyingParty) return std::nullopt;
  const harness::Party* dest = reg.ownerOfAddress(s.meta.ends->destAddr);
  if (!dest || dest->kind != rt::PartyKind::Browser) return std::nullopt;
  if (s.eventProducer < 0) return std::nullopt;
  const std::string& from = trace.steps[s.eventProducer].proc;
  const harness::Party* idp = reg.party(from);
  if (!idp || idp->kind != rt::PartyKind::IdentityProvider) return std::nullopt;
  return EndsInfo{dest->id, rp->id, idp->id, s.meta.ends->resource};
}

}  // namespace

std::vector<OAuthSession> extractOAuthSessions(const rt::Trace& trace,
                                               const harness::Registry& reg,
                                               const std::string& b, const std::string& r,
                                               const std::string& idp) {
  std::vector<OAuthSession> sessions;
  int64_t n = static_cast<int64_t>(trace.steps.size());
  for (int64_t q0 = 0; q0 < n; ++q0) {
    if (!isStartsOA(trace, reg, q0, b, r, idp)) continue;
    OAuthSession o;
    o.browser = b;
    o.rp = r;
    o.idp = idp;
    o.steps.push_back(q0);
    const auto& start = *trace.steps[q0].meta.script;
    if (start.interactive && !*start.interactive && start.selectedId)
      o.selectedNia.push_back(*start.selectedId);
    for (int64_t q = q0 + 1; q < n && !o.ended; ++q) {
      if (trace.steps[q].stutter) continue;
      bool conn = false;
      for (int64_t p : o.steps)
        if (connected(trace, p, q)) { conn = true; break; }
      if (!conn) continue;
      if (isStartsOA(trace, reg, q, b, r, "")) continue;  // a new session starts there
      o.steps.push_back(q);
      const auto& s = trace.steps[q];
      if (s.meta.script && s.meta.script->script == "script_idp_form" && s.proc == b &&
          start.interactive && *start.interactive) {
        const auto& sm = *s.meta.script;
        if (sm.selectedId && sm.commandTargetHost && domainOf(reg, idp, *sm.commandTargetHost))
          o.selectedIa.push_back(*sm.selectedId);
      }
      if (auto e = endsInfoAt(trace, reg, q)) {
        if (e->browser == b && e->rp == r && e->idp == idp) {
          o.ended = true;
          o.endStep = q;
        }
      }
    }
    sessions.push_back(std::move(o));
  }
  return sessions;
}

namespace {

bool containsTerm(const std::vector<Term>& xs, const Term& t) {
  return std::any_of(xs.begin(), xs.end(), [&](const Term& x) { return equiv(x, t); });
}

}  // namespace

PropertyVerdict checkSessionIntegrityAuthz(const rt::Trace& trace, const harness::Registry& reg) {
  PropertyVerdict v{"session-integrity-authz", true, std::nullopt};
  int64_t n = static_cast<int64_t>(trace.steps.size());
  for (int64_t q = 0; q < n; ++q) {
    auto e = endsInfoAt(trace, reg, q);
    if (!e) continue;
    if (!honestAt(trace, q, reg, e->browser) || !honestAt(trace, q, reg, e->rp)) continue;
    auto sessions = extractOAuthSessions(trace, reg, e->browser, e->rp, e->idp);
    if (sessions.empty()) {
      v.holds = false;
      v.witness = Witness{q, e->resource, Term::seq({}),
                          "flow completed without any OAuth session of " + e->browser + " with " +
                              e->rp + " and " + e->idp};
      return v;
    }
    if (!honestAt(trace, q, reg, e->idp)) continue;
    bool okSome = false;
    for (const auto& o : sessions) {
      if (!o.contains(q)) continue;
      bool allIds = true;
      for (const auto& id : reg.identities()) {
        Term idt = id.term();
        bool selIa = containsTerm(o.selectedIa, idt);
        bool selNia = containsTerm(o.selectedNia, idt);
        bool resIa = equiv(e->resource, reg.resourceOf(e->idp, e->rp, id.key()));
        bool resNiaR = resIa;
        bool resNiaBot = equiv(e->resource, reg.resourceOf(e->idp, "", id.key()));
        bool iaBicond = (selIa == resIa);
        bool niaBicond = (selNia == (resNiaR || resNiaBot));
        if (!(iaBicond || niaBicond)) {
          allIds = false;
          break;
        }
      }
      if (allIds) {
        okSome = true;
        break;
      }
    }
    if (!okSome) {
      v.holds = false;
      v.witness = Witness{q, e->resource, Term::seq({}),
                          "completed flow not inside the user's session or with a mismatched "
                          "identity"};
      return v;
    }
  }
  return v;
}

PropertyVerdict checkSessionIntegrityAuthn(const rt::Trace& trace, const harness::Registry& reg) {
  PropertyVerdict v{"session-integrity-authn", true, std::nullopt};
  int64_t n = static_cast<int64_t>(trace.steps.size());
  for (int64_t q = 0; q < n; ++q) {
    const auto& s = trace.steps[q];
    if (s.stutter || !s.meta.mint) continue;
    const harness::Party* rp = reg.party(s.proc);
    if (!rp || rp->kind != rt::PartyKind::RelyingParty) continue;
    const harness::Party* dest = reg.ownerOfAddress(s.meta.mint->destAddr);
    if (!dest || dest->kind != rt::PartyKind::Browser) continue;
    if (!s.meta.mint->idpDomain.isStr()) continue;
    const harness::Party* idp = reg.ownerOfDomain(std::string(s.meta.mint->idpDomain.text()));
    if (!idp || idp->kind != rt::PartyKind::IdentityProvider) continue;
    if (!honestAt(trace, q, reg, dest->id) || !honestAt(trace, q, reg, rp->id)) continue;
    auto sessions = extractOAuthSessions(trace, reg, dest->id, rp->id, idp->id);
    if (sessions.empty()) {
      v.holds = false;
      v.witness = Witness{q, s.meta.mint->token, Term::seq({}),
                          "login completed without any OAuth session of " + dest->id + " with " +
                              rp->id + " and " + idp->id};
      return v;
    }
    if (!honestAt(trace, q, reg, idp->id)) continue;
    bool okSome = false;
    for (const auto& o : sessions) {
      if (!o.contains(q)) continue;
      bool allIds = true;
      for (const auto& id : reg.identities()) {
        Term idt = id.term();
        bool sel = containsTerm(o.selectedIa, idt) || containsTerm(o.selectedNia, idt);
        bool minted = equiv(idt, s.meta.mint->user);
        if (sel != minted) {
          allIds = false;
          break;
        }
      }
      if (allIds) {
        okSome = true;
        break;
      }
    }
    if (!okSome) {
      v.holds = false;
      v.witness = Witness{q, s.meta.mint->token, Term::seq({}),
                          "login outside the user's session or under a different identity"};
      return v;
    }
  }
  return v;
}

namespace {

struct MonitorCtx {
  const rt::Trace& trace;
  const harness::Registry& reg;
  std::string att;

  bool honestIdPDomain(const Term& domain, int64_t j) const {
    if (!domain.isStr()) return false;
    const harness::Party* p = reg.ownerOfDomain(std::string(domain.text()));
    return p && p->kind == rt::PartyKind::IdentityProvider && honestAt(trace, j, reg, p->id);
  }
};

void monitorAt(MonitorCtx& c, int64_t j, const Knowledge& k, MonitorReport& rep) {
  auto fire = [&](const std::string& name, const Term& t, const Term& recipe,
                  const std::string& roles) {
    for (auto& v : rep.verdicts) {
      if (v.property == name && v.holds) {
        v.holds = false;
        v.witness = Witness{j, t, recipe, roles};
      }
    }
  };

  // Passwords of honestly governed, honestly owned identities.
  for (const auto& id : c.reg.identities()) {
    const harness::Party* gov = c.reg.ownerOfDomain(id.domain);
    if (!gov || gov->kind != rt::PartyKind::IdentityProvider || !honestAt(c.trace, j, c.reg, gov->id))
      continue;
    if (ownerSideCorrupted(c.trace, j, c.reg, id.key())) continue;
    Term secret = *c.reg.secretOfId(id.term());
    if (auto d = derive(secret, k); d.ok)
      fire("monitor.passwords", secret, d.recipe, "secretOfID(" + id.key() + ")");
  }

  for (const auto& p : c.reg.parties) {
    if (p.kind == rt::PartyKind::IdentityProvider && honestAt(c.trace, j, c.reg, p.id)) {
      const Term& st = c.trace.at(j).states.at(p.id);
      if (!(st.isSeq() && st.size() == 9)) continue;
      // Authorization codes bound to honest clients and honest users.
      for (const Term& e : st.at(6).args()) {
        if (!(e.isSeq() && e.size() == 2 && e.at(1).isSeq() && e.at(1).size() == 3)) continue;
        auto rp = c.reg.rpOfClientId(e.at(1).at(0));
        if (!rp) continue;
        const harness::Party* rpp = c.reg.party(*rp);
        if (!rpp || rpp->kind != rt::PartyKind::RelyingParty || !honestAt(c.trace, j, c.reg, *rp))
          continue;
        std::string uKey = c.reg.idKeyOf(e.at(1).at(2));
        if (uKey.empty() || ownerSideCorrupted(c.trace, j, c.reg, uKey)) continue;
        if (auto d = derive(e.at(0), k); d.ok)
          fire("monitor.codes", e.at(0), d.recipe, "code for " + *rp + " / " + uKey);
      }
      // Access tokens bound to honest clients.
      for (const Term& e : st.at(7).args()) {
        if (!(e.isSeq() && e.size() == 3)) continue;
        auto rp = c.reg.rpOfClientId(e.at(1));
        if (!rp) continue;
        const harness::Party* rpp = c.reg.party(*rp);
        if (!rpp || rpp->kind != rt::PartyKind::RelyingParty || !honestAt(c.trace, j, c.reg, *rp))
          continue;
        if (!e.at(2).isBot()) {
          std::string uKey = c.reg.idKeyOf(e.at(2));
          if (uKey.empty() || ownerSideCorrupted(c.trace, j, c.reg, uKey)) continue;
        }
        if (auto d = derive(e.at(0), k); d.ok)
          fire("monitor.tokens", e.at(0), d.recipe, "token for " + *rp);
      }
    }
    if (p.kind == rt::PartyKind::RelyingParty && honestAt(c.trace, j, c.reg, p.id)) {
      const Term& st = c.trace.at(j).states.at(p.id);
      if (!(st.isSeq() && st.size() == 9)) continue;
      // Live login-session state nonces (session cookie held by an honest
      // browser, IdP honest).
      for (const Term& e : st.at(3).args()) {
        if (!(e.isSeq() && e.size() == 2 && e.at(1).isSeq() && e.at(1).size() == 4)) continue;
        const Term& lsid = e.at(0);
        const Term& g = e.at(1).at(0);
        const Term& stateNonce = e.at(1).at(1);
        if (!c.honestIdPDomain(g, j)) continue;
        bool cookieHeld = false;
        for (const auto& bp : c.reg.parties) {
          if (bp.kind != rt::PartyKind::Browser || !honestAt(c.trace, j, c.reg, bp.id)) continue;
          const Term& bst = c.trace.at(j).states.at(bp.id);
          if (!(bst.isSeq() && bst.size() == 12)) continue;
          for (const std::string& dom : p.domains) {
            for (const Term& cookie : dictGet(bst.at(3), Term::str(dom)).args()) {
              if (cookie.isSeq() && cookie.size() == 2 &&
                  cookie.at(0) == Term::str("loginSessionId") && cookie.at(1).isSeq() &&
                  cookie.at(1).size() == 4 && cookie.at(1).at(0) == lsid)
                cookieHeld = true;
            }
          }
        }
        if (!cookieHeld) continue;
        if (auto d = derive(stateNonce, k); d.ok)
          fire("monitor.state", stateNonce, d.recipe, "state of a live session at " + p.id);
      }
      // Symmetric HTTPS keys for requests to honest destinations.
      for (const Term& e : st.at(7).args()) {
        if (!(e.isSeq() && e.size() == 4)) continue;
        auto reqv = web::validateRequest(e.at(1));
        if (!web::ok(reqv)) continue;
        const harness::Party* destp =
            c.reg.ownerOfDomain(std::string(web::get(reqv).host().text()));
        if (!destp || rt::isAttacker(destp->kind) || !honestAt(c.trace, j, c.reg, destp->id))
          continue;
        if (auto d = derive(e.at(2), k); d.ok)
          fire("monitor.httpskeys", e.at(2), d.recipe, "HTTPS key minted by " + p.id);
      }
    }
  }
}

}  // namespace

bool MonitorReport::allHold() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const PropertyVerdict& v) { return v.holds; });
}

const PropertyVerdict* MonitorReport::find(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.property == name) return &v;
  return nullptr;
}

MonitorReport lemmaMonitors(const rt::Trace& trace, const harness::Registry& reg) {
  MonitorReport rep;
  for (const char* n :
       {"monitor.passwords", "monitor.codes", "monitor.tokens", "monitor.state",
        "monitor.httpskeys"})
    rep.verdicts.push_back({n, true, std::nullopt});
  MonitorCtx ctx{trace, reg, attackerId(reg)};
  if (ctx.att.empty()) return rep;
  for (int64_t j : attackerSteps(trace, reg)) {
    Knowledge k({trace.at(j).states.at(ctx.att)});
    monitorAt(ctx, j, k, rep);
    if (!rep.allHold() &&
        std::none_of(rep.verdicts.begin(), rep.verdicts.end(),
                     [](const PropertyVerdict& v) { return v.holds; }))
      break;  // every monitor already fired
  }
  return rep;
}

const PropertyVerdict* VerdictSet::find(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.property == name) return &v;
  return nullptr;
}

bool VerdictSet::violated(const std::string& name) const {
  const PropertyVerdict* v = find(name);
  return v && !v->holds;
}

std::vector<PropertyVerdict> checkAtStep(const rt::Trace& trace, const harness::Registry& reg,
                                         int64_t j, bool webAttackerSystem) {
  std::vector<PropertyVerdict> out;
  const auto& step = trace.steps[j];
  if (step.stutter) return out;
  std::string att = attackerId(reg);
  if (!att.empty() && step.proc == att) {
    Knowledge k({stateOf(trace, j, att)});
    if (auto w = authorizationViolationAt(trace, reg, j, k))
      out.push_back({"authorization", false, *w});
    if (auto w = authenticationViolationAt(trace, reg, j, k))
      out.push_back({"authentication", false, *w});
    MonitorReport rep;
    for (const char* n : {"monitor.passwords", "monitor.codes", "monitor.tokens", "monitor.state",
                          "monitor.httpskeys"})
      rep.verdicts.push_back({n, true, std::nullopt});
    MonitorCtx ctx{trace, reg, att};
    monitorAt(ctx, j, k, rep);
    for (auto& v : rep.verdicts)
      if (!v.holds) out.push_back(std::move(v));
  }
  if (webAttackerSystem && (step.meta.ends || step.meta.mint)) {
    if (auto v = checkSessionIntegrityAuthz(trace, reg); !v.holds) out.push_back(std::move(v));
    if (auto v = checkSessionIntegrityAuthn(trace, reg); !v.holds) out.push_back(std::move(v));
  }
  return out;
}

VerdictSet evaluateAll(const rt::Trace& trace, const harness::Registry& reg,
                       bool webAttackerSystem) {
  VerdictSet out;
  out.verdicts.push_back(checkAuthorization(trace, reg));
  out.verdicts.push_back(checkAuthentication(trace, reg));
  if (webAttackerSystem) {
    out.verdicts.push_back(checkSessionIntegrityAuthz(trace, reg));
    out.verdicts.push_back(checkSessionIntegrityAuthn(trace, reg));
  }
  MonitorReport rep = lemmaMonitors(trace, reg);
  for (auto& v : rep.verdicts) out.verdicts.push_back(std::move(v));
  return out;
}

bool verifyWitness(const rt::Trace& trace, const harness::Registry& reg,
                   const PropertyVerdict& verdict) {
  if (verdict.holds || !verdict.witness) return true;
  if (verdict.witness->recipe == Term::seq({})) return true;  // structural witness
  std::string att = attackerId(reg);
  if (att.empty()) return false;
  Knowledge k({trace.at(verdict.witness->step).states.at(att)});
  return recipeDerives(verdict.witness->recipe, k, verdict.witness->term);
}

}  // namespace oasim::props
