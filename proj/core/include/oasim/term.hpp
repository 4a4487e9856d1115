#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oasim {

// Function symbols of the signature. Projections carry their index
// separately, see Term::proj().
enum class Op : uint8_t {
  Pub,
  EncA,
  DecA,
  EncS,
  DecS,
  Sig,
  CheckSig,
  ExtractMsg,
  Proj,
};

std::string_view opName(Op op);

// Variable kinds: process placeholders (nu_i, replaced by fresh nonces per
// processing step), script placeholders (lambda_i), the pattern wildcard,
// and fact references used inside derivation recipes.
enum class VarKind : uint8_t {
  Process,
  Script,
  Wildcard,
  FactRef,
};

// Immutable symbolic term. Cheap to copy (shared nodes), structurally
// hashed, with a cached normal-form flag so normalize() is O(1) on terms
// that are already normal (the common case at runtime).
class Term {
 public:
  enum class Tag : uint8_t { Str, Addr, Top, Bot, Dia, Nonce, Var, Seq, App };
  struct Node;  // defined in term.cpp

  Term();  // empty sequence

  static Term str(std::string_view s);
  static Term addr(std::string_view a);
  static Term top();
  static Term bot();
  static Term dia();
  static Term nonce(uint64_t id);
  static Term var(VarKind k, uint32_t index);
  static Term wildcard();
  static Term seq(std::vector<Term> args);
  static Term app(Op op, std::vector<Term> args);
  static Term proj(uint32_t index, Term arg);
  static Term boolean(bool b) { return b ? top() : bot(); }

  Tag tag() const;
  bool isStr() const { return tag() == Tag::Str; }
  bool isAddr() const { return tag() == Tag::Addr; }
  bool isTop() const { return tag() == Tag::Top; }
  bool isBot() const { return tag() == Tag::Bot; }
  bool isDia() const { return tag() == Tag::Dia; }
  bool isNonce() const { return tag() == Tag::Nonce; }
  bool isVar() const { return tag() == Tag::Var; }
  bool isSeq() const { return tag() == Tag::Seq; }
  bool isApp() const { return tag() == Tag::App; }
  bool isStr(std::string_view s) const { return isStr() && text() == s; }

  std::string_view text() const;  // Str / Addr
  uint64_t nonceId() const;
  VarKind varKind() const;
  uint32_t varIndex() const;
  Op op() const;
  uint32_t projIndex() const;
  const std::vector<Term>& args() const;
  size_t size() const { return args().size(); }
  const Term& at(size_t i) const { return args()[i]; }

  size_t hash() const;
  bool ground() const;        // no Var nodes
  bool inNormalForm() const;  // cached
  const void* nodeId() const { return node_.get(); }
  // Keep-alive handle for caches keyed on nodeId(): holding it prevents the
  // address from being reused by another term.
  std::shared_ptr<const void> nodeAnchor() const { return node_; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  size_t operator()(const Term& t) const { return t.hash(); }
};

// Reduce to the unique normal form under the six rewrite rules
// (asymmetric/symmetric decryption, checksig, extractmsg, projection
// in/out of range). Total and idempotent.
Term normalize(const Term& t);

// Congruence: equality of normal forms.
bool equiv(const Term& a, const Term& b);

// One-sided wildcard matching. Independent wildcards may bind different
// terms; both sides are normalized first.
bool matches(const Term& t, const Term& pattern);
bool matchesAny(const Term& t, const std::vector<Term>& patterns);

// Keep only the immediate subterms of a sequence that match the pattern.
Term filterMatching(const Term& t, const Term& pattern);

// Left-to-right projection composition; out-of-range yields the diamond.
Term applyPointer(const Term& t, std::span<const uint32_t> pointer);

// Dictionaries are sequences of two-element sequences with distinct keys.
Term dictGet(const Term& dict, const Term& key);  // <> when absent
bool dictHas(const Term& dict, const Term& key);
Term dictPut(const Term& dict, const Term& key, const Term& value);
Term dictRemove(const Term& dict, const Term& key);

// Substitute process placeholders nu_i by bindings[i] everywhere.
// Placeholders without a binding are left in place.
Term substituteProcessVars(const Term& t, const std::vector<std::pair<uint32_t, Term>>& bindings);

// Collect the distinct indices of placeholders of the given kind, in
// ascending numeric order.
std::vector<uint32_t> collectVars(const Term& t, VarKind kind);

}  // namespace oasim
