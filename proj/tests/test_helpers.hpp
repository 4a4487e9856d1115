#pragma once

#include <random>
#include <vector>

#include "oasim/term.hpp"

namespace oasim::testing {

// Random ground term generator over a small atom universe, used by the
// normalization and derivability property tests.
class TermGen {
 public:
  explicit TermGen(uint64_t seed) : rng_(seed) {}

  Term atom() {
    switch (pick(6)) {
      case 0: return Term::str(strings_[pick(strings_.size())]);
      case 1: return Term::nonce(pick(5));
      case 2: return Term::top();
      case 3: return Term::bot();
      case 4: return Term::addr(addrs_[pick(addrs_.size())]);
      default: return Term::nonce(5 + pick(3));
    }
  }

  Term term(size_t depth) {
    if (depth == 0 || pick(4) == 0) return atom();
    switch (pick(8)) {
      case 0: {
        std::vector<Term> args;
        size_t n = pick(4);
        for (size_t i = 0; i < n; ++i) args.push_back(term(depth - 1));
        return Term::seq(std::move(args));
      }
      case 1: return Term::app(Op::Pub, {term(depth - 1)});
      case 2: return Term::app(Op::EncA, {term(depth - 1), Term::app(Op::Pub, {term(depth - 1)})});
      case 3: return Term::app(Op::EncS, {term(depth - 1), term(depth - 1)});
      case 4: return Term::app(Op::Sig, {term(depth - 1), term(depth - 1)});
      case 5: return Term::proj(1 + pick(4), term(depth - 1));
      case 6: return Term::app(Op::DecA, {term(depth - 1), term(depth - 1)});
      default: return Term::app(Op::DecS, {term(depth - 1), term(depth - 1)});
    }
  }

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

 private:
  std::mt19937_64 rng_;
  std::vector<const char*> strings_ = {"a", "b", "c", "d"};
  std::vector<const char*> addrs_ = {"x", "y"};
};

}  // namespace oasim::testing
