#include "oasim/attacker.hpp"

#include <algorithm>

#include "oasim/serialize.hpp"

using namespace oasim::web;

namespace oasim::attacker {

namespace {
Term kbTag() { static const Term t = Term::str("KB"); return t; }
}

// The recorded knowledge is kept as a duplicate-free sequence sorted by
// serialization. Dropping order and repeats preserves the derivable closure
// exactly while letting interleaving-equivalent attacker states collapse
// during exploration.
Term initialAttackerState(const Term& attDoms, const Term& sslKeys, const Term& extra) {
  return Term::seq({kbTag(), attDoms, sslKeys, extra, Term::seq({})});
}

Term View::privKey(const Term& domain) const {
  for (const Term& kv : attDoms.args())
    if (kv.isSeq() && kv.size() == 2 && kv.at(0) == domain) return kv.at(1);
  return Term::bot();
}

std::optional<View::OpenedRequest> View::openRequest(const Term& event) const {
  if (!(event.isSeq() && event.size() == 3)) return std::nullopt;
  const Term& msg = event.at(2);
  for (const Term& kv : attDoms.args()) {
    if (!(kv.isSeq() && kv.size() == 2)) continue;
    Term dec = normalize(Term::app(Op::DecA, {msg, kv.at(1)}));
    if (!(dec.isSeq() && dec.size() == 2)) continue;
    auto rv = validateRequest(dec.at(0));
    if (!ok(rv)) continue;
    return OpenedRequest{get(rv), dec.at(1), kv.at(0), event.at(1), event.at(0)};
  }
  return std::nullopt;
}

std::optional<View::OpenedRequest> View::findRequest(const Term& domain, const Term& path) const {
  for (const Term& e : events) {
    auto r = openRequest(e);
    if (!r) continue;
    if (!(r->request.host() == domain)) continue;
    if (path.isStr() && !(r->request.path() == path)) continue;
    return r;
  }
  return std::nullopt;
}

std::optional<web::HttpResponse> View::findResponse(const Term& key) const {
  for (const Term& e : events) {
    if (!(e.isSeq() && e.size() == 3)) continue;
    Term dec = normalize(Term::app(Op::DecS, {e.at(2), key}));
    auto rv = validateResponse(dec);
    if (ok(rv)) return get(rv);
  }
  return std::nullopt;
}

View decodeAttackerState(const Term& state, const Term& newEvent) {
  View v;
  if (newEvent.isSeq() && newEvent.size() == 3) v.events.push_back(newEvent);
  if (state.isSeq() && state.size() == 5 && state.at(0) == kbTag()) {
    v.attDoms = state.at(1);
    v.sslKeys = state.at(2);
    v.extra = state.at(3);
    for (const Term& e : state.at(4).args())
      if (e.isSeq() && e.size() == 3) v.events.push_back(e);
  }
  return v;
}

rt::RelationResult AttackerRelation::apply(const Term& event, const Term& state,
                                           rt::Chooser& ch) const {
  // Self-addressed notes are already part of the recorded knowledge;
  // consuming them can never enable anything new.
  const Term& msg = event.at(2);
  if (msg.isSeq() && msg.size() >= 2 && msg.at(0) == Term::str("memo")) throw rt::NoBranch{};
  View v = decodeAttackerState(state, event);
  rt::RelationResult res;
  std::vector<Term> emitted;
  if (!recipes_->empty()) {
    size_t ri = ch.pick(recipes_->size() + 1, "recipe");  // last choice: emit nothing
    if (ri < recipes_->size()) {
      if (auto evs = (*recipes_)[ri].gen(v, ch)) emitted = std::move(*evs);
    }
  }
  // Consuming a trigger without emitting records nothing of value; treat it
  // as the relation offering no branch so exploration does not chase
  // knowledge-neutral self-feeding chains.
  bool alreadyKnown = false;
  if (state.isSeq() && state.size() == 5) {
    for (const Term& e : state.at(4).args())
      if (e == event) alreadyKnown = true;
  }
  if (emitted.empty() && (event.at(2) == rt::triggerMsg() || alreadyKnown)) throw rt::NoBranch{};

  // Sort key with nonce identities masked, so the set order (and thus the
  // canonical hash) does not depend on the path that produced the nonces.
  auto sortKey = [](const Term& e) {
    const std::string& text = toTextCached(e);
    std::string key;
    key.reserve(text.size());
    bool quoted = false;
    for (size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c == '"' && (i == 0 || text[i - 1] != '\\')) quoted = !quoted;
      if (!quoted && (c == 'n' || c == '\xce') && i + 1 < text.size()) {
        // mask n<digits>; Greek nu placeholders start with 0xCE 0xBD
        size_t j = i + (c == 'n' ? 1 : 2);
        if (j < text.size() && isdigit(static_cast<unsigned char>(text[j]))) {
          while (j < text.size() && isdigit(static_cast<unsigned char>(text[j]))) ++j;
          key += "n*";
          i = j - 1;
          continue;
        }
      }
      key += c;
    }
    return key;
  };
  std::vector<std::pair<std::string, Term>> recorded;
  if (state.isSeq() && state.size() == 5) {
    for (const Term& e : state.at(4).args()) recorded.emplace_back(sortKey(e), e);
  }
  auto insert = [&](const Term& e) {
    for (const auto& [k, t] : recorded)
      if (t == e) return;
    recorded.emplace_back(sortKey(e), e);
  };
  if (event.at(2) != rt::triggerMsg()) insert(event);
  for (const Term& e : emitted) insert(e);
  std::stable_sort(recorded.begin(), recorded.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Term> sorted;
  sorted.reserve(recorded.size());
  for (auto& [k, t] : recorded) sorted.push_back(std::move(t));
  res.events = emitted;
  res.state =
      Term::seq({state.at(0), state.at(1), state.at(2), state.at(3), Term::seq(std::move(sorted))});
  return res;
}

browser::ScriptOutput AttackerScript::run(const browser::ScriptInput& in, rt::Chooser& ch,
                                          rt::ScriptRunMeta& meta) const {
  browser::ScriptOutput out{in.scriptstate, in.cookies, in.localStorage, in.sessionStorage,
                            Term::seq({})};
  Term menu = normalize(in.scriptstate);
  if (!menu.isSeq() || menu.size() == 0) return out;
  size_t i = ch.pick(menu.size(), "att.cmd");
  out.command = menu.at(i);
  if (out.command.isSeq() && out.command.size() >= 2) {
    auto uv = validateUrl(out.command.at(1));
    if (ok(uv)) meta.commandTargetHost = get(uv).host();
  }
  return out;
}

}  // namespace oasim::attacker
