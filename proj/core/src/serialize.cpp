#include "oasim/serialize.hpp"

#include <cctype>
#include <charconv>
#include <unordered_map>

namespace oasim {

namespace {

constexpr std::string_view kLAngle = "⟨";
constexpr std::string_view kRAngle = "⟩";
constexpr std::string_view kTop = "⊤";
constexpr std::string_view kBot = "⊥";
constexpr std::string_view kDia = "◇";
constexpr std::string_view kNu = "ν";
constexpr std::string_view kLambda = "λ";

void escapeTo(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
}

void toTextRec(const Term& t, std::string& out) {
  switch (t.tag()) {
    case Term::Tag::Str:
      out += '"';
      escapeTo(out, t.text());
      out += '"';
      break;
    case Term::Tag::Addr:
      out += '@';
      out += t.text();
      break;
    case Term::Tag::Top: out += kTop; break;
    case Term::Tag::Bot: out += kBot; break;
    case Term::Tag::Dia: out += kDia; break;
    case Term::Tag::Nonce:
      out += 'n';
      out += std::to_string(t.nonceId());
      break;
    case Term::Tag::Var:
      switch (t.varKind()) {
        case VarKind::Process: out += kNu; out += std::to_string(t.varIndex()); break;
        case VarKind::Script: out += kLambda; out += std::to_string(t.varIndex()); break;
        case VarKind::Wildcard: out += '*'; break;
        case VarKind::FactRef: out += '$'; out += std::to_string(t.varIndex()); break;
      }
      break;
    case Term::Tag::Seq: {
      out += kLAngle;
      bool first = true;
      for (const Term& a : t.args()) {
        if (!first) out += ',';
        first = false;
        toTextRec(a, out);
      }
      out += kRAngle;
      break;
    }
    case Term::Tag::App: {
      out += opName(t.op());
      if (t.op() == Op::Proj) out += std::to_string(t.projIndex());
      out += '(';
      bool first = true;
      for (const Term& a : t.args()) {
        if (!first) out += ',';
        first = false;
        toTextRec(a, out);
      }
      out += ')';
      break;
    }
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Term parse() {
    Term t = term();
    skipWs();
    if (pos_ != s_.size()) fail("trailing input");
    return t;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) {
    throw ParseError("term parse error at byte " + std::to_string(pos_) + ": " + why);
  }

  void skipWs() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool tryConsume(std::string_view tok) {
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  uint64_t number() {
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected number");
    uint64_t v = 0;
    std::from_chars(s_.data() + start, s_.data() + pos_, v);
    return v;
  }

  std::string ident() {
    size_t start = pos_;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<Term> argList(std::string_view closer) {
    std::vector<Term> args;
    skipWs();
    if (tryConsume(closer)) return args;
    while (true) {
      args.push_back(term());
      skipWs();
      if (tryConsume(closer)) return args;
      if (!tryConsume(",")) fail("expected , or closer");
    }
  }

  Term term() {
    skipWs();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (tryConsume(kLAngle)) return Term::seq(argList(kRAngle));
    if (tryConsume(kTop)) return Term::top();
    if (tryConsume(kBot)) return Term::bot();
    if (tryConsume(kDia)) return Term::dia();
    if (tryConsume(kNu)) return Term::var(VarKind::Process, static_cast<uint32_t>(number()));
    if (tryConsume(kLambda)) return Term::var(VarKind::Script, static_cast<uint32_t>(number()));
    char c = s_[pos_];
    if (c == '"') {
      ++pos_;
      std::string text;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        char d = s_[pos_++];
        if (d == '\\' && pos_ < s_.size()) {
          char e = s_[pos_++];
          switch (e) {
            case 'n': text += '\n'; break;
            case 't': text += '\t'; break;
            default: text += e;
          }
        } else {
          text += d;
        }
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return Term::str(text);
    }
    if (c == '@') {
      ++pos_;
      return Term::addr(ident());
    }
    if (c == '*') {
      ++pos_;
      return Term::wildcard();
    }
    if (c == '$') {
      ++pos_;
      return Term::var(VarKind::FactRef, static_cast<uint32_t>(number()));
    }
    if (c == 'n' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      return Term::nonce(number());
    }
    // function application
    std::string name = ident();
    if (name.rfind("proj", 0) == 0 && name.size() > 4) {
      uint32_t idx = 0;
      std::from_chars(name.data() + 4, name.data() + name.size(), idx);
      skipWs();
      if (!tryConsume("(")) fail("expected ( after proj");
      auto args = argList(")");
      if (args.size() != 1) fail("proj takes one argument");
      return Term::proj(idx, args[0]);
    }
    Op op;
    if (name == "pub") op = Op::Pub;
    else if (name == "enc_a") op = Op::EncA;
    else if (name == "dec_a") op = Op::DecA;
    else if (name == "enc_s") op = Op::EncS;
    else if (name == "dec_s") op = Op::DecS;
    else if (name == "sig") op = Op::Sig;
    else if (name == "checksig") op = Op::CheckSig;
    else if (name == "extractmsg") op = Op::ExtractMsg;
    else fail("unknown symbol: " + name);
    skipWs();
    if (!tryConsume("(")) fail("expected ( after " + name);
    return Term::app(op, argList(")"));
  }
};

}  // namespace

std::string toText(const Term& t) {
  std::string out;
  toTextRec(t, out);
  return out;
}

namespace {
struct CachedText {
  std::string text;
  std::shared_ptr<const void> anchor;  // keeps the node address from being reused
};
std::unordered_map<const void*, CachedText>& textCache() {
  static std::unordered_map<const void*, CachedText> cache;
  return cache;
}
}  // namespace

const std::string& toTextCached(const Term& t) {
  auto [it, fresh] = textCache().try_emplace(t.nodeId());
  if (fresh) {
    toTextRec(t, it->second.text);
    it->second.anchor = t.nodeAnchor();
  }
  return it->second.text;
}

void trimSerializationCache(size_t maxEntries) {
  if (textCache().size() > maxEntries) textCache().clear();
}

Term parseTerm(std::string_view text) { return Parser(text).parse(); }

uint64_t fnv1a(std::string_view data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace oasim
