#include "oasim/derive.hpp"

namespace oasim {

namespace {

// Goal-directed synthesis against a saturated set. Positive results are
// valid across saturation rounds; negatives are not cached.
std::optional<Term> synth(const Term& goal,
                          const std::unordered_map<Term, Term, TermHash>& known,
                          const PlaceholderPolicy& policy) {
  if (auto it = known.find(goal); it != known.end()) return it->second;
  switch (goal.tag()) {
    case Term::Tag::Str:
    case Term::Tag::Addr:
    case Term::Tag::Top:
    case Term::Tag::Bot:
    case Term::Tag::Dia:
      return goal;  // constants of the signature are public
    case Term::Tag::Nonce:
      return std::nullopt;  // nonces only via the fact set
    case Term::Tag::Var:
      switch (goal.varKind()) {
        case VarKind::Process: if (policy.process) return goal; break;
        case VarKind::Script: if (policy.script) return goal; break;
        default: break;
      }
      return std::nullopt;
    case Term::Tag::Seq:
    case Term::Tag::App: {
      std::vector<Term> recipes;
      recipes.reserve(goal.size());
      for (const Term& a : goal.args()) {
        auto r = synth(a, known, policy);
        if (!r) return std::nullopt;
        recipes.push_back(std::move(*r));
      }
      if (goal.isSeq()) return Term::seq(std::move(recipes));
      if (goal.op() == Op::Proj) return Term::proj(goal.projIndex(), std::move(recipes[0]));
      return Term::app(goal.op(), std::move(recipes));
    }
  }
  return std::nullopt;
}

}  // namespace

Knowledge::Knowledge(std::vector<Term> facts) {
  facts_.reserve(facts.size());
  for (Term& f : facts) facts_.push_back(normalize(f));
}

const std::unordered_map<Term, Term, TermHash>& Knowledge::analyzed() const {
  if (!saturated_) saturate();
  return known_;
}

void Knowledge::saturate() const {
  saturated_ = true;
  std::vector<Term> frontier;
  auto add = [&](const Term& t, Term recipe) {
    if (known_.emplace(t, std::move(recipe)).second) frontier.push_back(t);
  };
  for (size_t i = 0; i < facts_.size(); ++i)
    add(facts_[i], Term::var(VarKind::FactRef, static_cast<uint32_t>(i)));

  // Decomposition to a fixpoint; keys may become synthesizable as more
  // payloads open up, so retry stuck ciphertexts each round.
  std::vector<Term> stuck;
  PlaceholderPolicy noVars;
  while (!frontier.empty() || !stuck.empty()) {
    if (frontier.empty()) {
      std::vector<Term> retry;
      retry.swap(stuck);
      bool progressed = false;
      for (const Term& t : retry) {
        const Term recipe = known_.at(t);
        const Term& key = t.op() == Op::EncA ? t.args()[1].args()[0] : t.args()[1];
        if (auto kr = synth(key, known_, noVars)) {
          Op dec = t.op() == Op::EncA ? Op::DecA : Op::DecS;
          add(t.args()[0], Term::app(dec, {recipe, std::move(*kr)}));
          progressed = true;
        } else {
          stuck.push_back(t);
        }
      }
      if (!progressed) break;
      continue;
    }
    Term t = frontier.back();
    frontier.pop_back();
    const Term recipe = known_.at(t);
    if (t.isSeq()) {
      for (uint32_t i = 0; i < t.size(); ++i)
        add(t.at(i), Term::proj(i + 1, recipe));
    } else if (t.isApp()) {
      switch (t.op()) {
        case Op::Sig:
          add(t.args()[0], Term::app(Op::ExtractMsg, {recipe}));
          break;
        case Op::EncA: {
          const Term& k = t.args()[1];
          if (k.isApp() && k.op() == Op::Pub) {
            if (auto kr = synth(k.args()[0], known_, noVars)) {
              add(t.args()[0], Term::app(Op::DecA, {recipe, std::move(*kr)}));
            } else {
              stuck.push_back(t);
            }
          }
          break;
        }
        case Op::EncS: {
          if (auto kr = synth(t.args()[1], known_, noVars)) {
            add(t.args()[0], Term::app(Op::DecS, {recipe, std::move(*kr)}));
          } else {
            stuck.push_back(t);
          }
          break;
        }
        default:
          break;
      }
    }
  }
}

Derivation derive(const Term& target, const Knowledge& knowledge, PlaceholderPolicy policy) {
  Term goal = normalize(target);
  auto r = synth(goal, knowledge.analyzed(), policy);
  if (!r) return {};
  return {true, std::move(*r)};
}

Term applyRecipe(const Term& recipe, const Knowledge& knowledge) {
  if (recipe.isVar() && recipe.varKind() == VarKind::FactRef) {
    uint32_t i = recipe.varIndex();
    if (i < knowledge.facts().size()) return knowledge.facts()[i];
    return recipe;
  }
  if (recipe.isSeq() || recipe.isApp()) {
    std::vector<Term> args;
    args.reserve(recipe.size());
    for (const Term& a : recipe.args()) args.push_back(applyRecipe(a, knowledge));
    if (recipe.isSeq()) return Term::seq(std::move(args));
    if (recipe.op() == Op::Proj) return Term::proj(recipe.projIndex(), std::move(args[0]));
    return Term::app(recipe.op(), std::move(args));
  }
  return recipe;
}

bool recipeDerives(const Term& recipe, const Knowledge& knowledge, const Term& target) {
  return equiv(applyRecipe(recipe, knowledge), target);
}

}  // namespace oasim
