#pragma once

#include <vector>

#include "oasim/term.hpp"

namespace oasim::testing {

// Brute-force derivability oracle, independent of the analyze/synthesize
// engine. Computes the closure of the fact set under every constructor and
// destructor application whose normalized result stays inside the subterm
// universe of facts+target, then answers membership. Constants are free.
bool oracleDerivable(const Term& target, const std::vector<Term>& facts);

}  // namespace oasim::testing
