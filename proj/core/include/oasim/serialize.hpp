#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "oasim/term.hpp"

namespace oasim {

// Canonical text form, the bit-exact interchange format used by trace and
// verdict files:
//   strings     "abc"         (with \" \\ \n \t escapes)
//   addresses   @name
//   specials    T, F, <>-diamond rendered as distinct ASCII-safe glyphs:
//               we use the UTF-8 glyphs (top/bot/diamond) directly
//   nonces      n<id>
//   variables   nu<k>, la<k>, *, $<k>
//   sequences   <a,b,c> using U+27E8/U+27E9 angle brackets
//   functions   pub(x), enc_a(x,y), ..., proj<i>(x)
std::string toText(const Term& t);

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

Term parseTerm(std::string_view text);

// Serialization memo keyed on the term's node identity (terms are
// immutable). Entries live in a process-wide cache that is reset when it
// grows past a bound; the reference stays valid until the next call.
const std::string& toTextCached(const Term& t);

// Drops the memo when it exceeds maxEntries. Call only from points where no
// reference returned by toTextCached is still in use.
void trimSerializationCache(size_t maxEntries);

// 64-bit FNV-1a, used for trace hashing and configuration dedup.
uint64_t fnv1a(std::string_view data);

}  // namespace oasim
