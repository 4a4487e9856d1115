#pragma once

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "oasim/term.hpp"

namespace oasim {

// Which placeholder kinds count as free in a derivation query.
struct PlaceholderPolicy {
  bool process = false;  // nu_i
  bool script = false;   // lambda_i
  static PlaceholderPolicy none() { return {}; }
  static PlaceholderPolicy processOnly() { return {.process = true}; }
  static PlaceholderPolicy scriptOnly() { return {.script = true}; }
};

// A set of ground facts together with its decomposition saturation.
// Analysis runs lazily once; the analyzed set is closed under
// sequence decomposition, decryption with derivable keys and
// signature message extraction.
class Knowledge {
 public:
  Knowledge() = default;
  explicit Knowledge(std::vector<Term> facts);

  const std::vector<Term>& facts() const { return facts_; }

  // Saturated term -> recipe over FactRef variables.
  const std::unordered_map<Term, Term, TermHash>& analyzed() const;

 private:
  std::vector<Term> facts_;
  mutable bool saturated_ = false;
  mutable std::unordered_map<Term, Term, TermHash> known_;  // term -> recipe
  void saturate() const;
};

struct Derivation {
  bool ok = false;
  Term recipe;  // over FactRef variables; meaningful iff ok
};

// Decide target ∈ d_V(facts) for the convergent signature; on success the
// recipe substituted with the facts normalizes to the target.
Derivation derive(const Term& target, const Knowledge& knowledge,
                  PlaceholderPolicy policy = PlaceholderPolicy::none());

// Substitute the knowledge facts for the FactRef variables of a recipe.
Term applyRecipe(const Term& recipe, const Knowledge& knowledge);

// Soundness self-check: recipe applied to the facts normalizes to target.
bool recipeDerives(const Term& recipe, const Knowledge& knowledge, const Term& target);

}  // namespace oasim
