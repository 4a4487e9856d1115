#include "oracle.hpp"

#include <unordered_set>

namespace oasim::testing {

namespace {

void subterms(const Term& t, std::unordered_set<Term, TermHash>& out) {
  if (!out.insert(t).second) return;
  for (const Term& a : t.args()) subterms(a, out);
}

bool isFreeConstant(const Term& t) {
  switch (t.tag()) {
    case Term::Tag::Str:
    case Term::Tag::Addr:
    case Term::Tag::Top:
    case Term::Tag::Bot:
    case Term::Tag::Dia:
      return true;
    default:
      return false;
  }
}

}  // namespace

bool oracleDerivable(const Term& rawTarget, const std::vector<Term>& rawFacts) {
  Term target = normalize(rawTarget);
  std::vector<Term> facts;
  for (const Term& f : rawFacts) facts.push_back(normalize(f));

  // Universe: normalized subterms of the facts and the target. Every
  // derivable term inside the universe is reachable by closing under all
  // symbol applications whose result stays in the universe (a composition
  // leaving the universe can only be destructed back into terms we already
  // have, so it never helps membership).
  std::unordered_set<Term, TermHash> universe;
  for (const Term& f : facts) subterms(f, universe);
  subterms(target, universe);

  std::unordered_set<Term, TermHash> known;
  for (const Term& f : facts) known.insert(f);
  for (const Term& u : universe)
    if (isFreeConstant(u)) known.insert(u);

  auto inUniverse = [&](const Term& t) { return universe.count(t) > 0; };

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Term> snapshot(known.begin(), known.end());
    auto add = [&](const Term& t) {
      if (known.insert(t).second) changed = true;
    };
    // Goal-directed sequence construction: any universe sequence whose
    // components are all known.
    for (const Term& u : universe) {
      if (known.count(u)) continue;
      if (u.isSeq()) {
        bool all = true;
        for (const Term& a : u.args())
          if (!known.count(a)) { all = false; break; }
        if (all && !u.args().empty()) add(u);
        if (u.args().empty()) add(u);
      }
    }
    // Unary applications.
    for (const Term& x : snapshot) {
      for (Op op : {Op::Pub, Op::ExtractMsg}) {
        Term t = normalize(Term::app(op, {x}));
        if (inUniverse(t)) add(t);
      }
      for (uint32_t i = 0; i <= 4; ++i) {
        Term t = normalize(Term::proj(i, x));
        if (inUniverse(t)) add(t);
      }
    }
    // Binary applications.
    for (const Term& x : snapshot) {
      for (const Term& y : snapshot) {
        for (Op op : {Op::EncA, Op::DecA, Op::EncS, Op::DecS, Op::Sig}) {
          Term t = normalize(Term::app(op, {x, y}));
          if (inUniverse(t)) add(t);
        }
      }
    }
  }
  return known.count(target) > 0;
}

}  // namespace oasim::testing
