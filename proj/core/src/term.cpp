#include "oasim/term.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace oasim {

struct Term::Node {
  Tag tag{Tag::Seq};
  Op op{Op::Pub};
  VarKind vk{VarKind::Process};
  uint32_t index{0};  // proj index or var index
  uint64_t nid{0};
  std::string text;
  std::vector<Term> args;
  size_t h{0};
  bool ground{true};
  bool normal{true};
};

namespace {

size_t hashCombine(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

// Is there a redex at the root, given that all children are normal?
bool rootRedex(const Term::Node& n) {
  if (n.tag != Term::Tag::App) return false;
  const auto& a = n.args;
  switch (n.op) {
    case Op::DecA: {
      const Term& c = a[0];
      if (c.isApp() && c.op() == Op::EncA) {
        const Term& k = c.args()[1];
        if (k.isApp() && k.op() == Op::Pub && k.args()[0] == a[1]) return true;
      }
      return false;
    }
    case Op::DecS: {
      const Term& c = a[0];
      return c.isApp() && c.op() == Op::EncS && c.args()[1] == a[1];
    }
    case Op::CheckSig: {
      const Term& s = a[0];
      if (!(s.isApp() && s.op() == Op::Sig)) return false;
      if (s.args()[0] != a[1]) return false;
      const Term& p = a[2];
      return p.isApp() && p.op() == Op::Pub && p.args()[0] == s.args()[1];
    }
    case Op::ExtractMsg:
      return a[0].isApp() && a[0].op() == Op::Sig;
    case Op::Proj:
      return a[0].isSeq();  // reduces to component or diamond
    default:
      return false;
  }
}

std::shared_ptr<const Term::Node> finish(std::shared_ptr<Term::Node> n) {
  size_t h = hashCombine(0x5151, static_cast<size_t>(n->tag));
  switch (n->tag) {
    case Term::Tag::Str:
    case Term::Tag::Addr:
      h = hashCombine(h, std::hash<std::string>{}(n->text));
      break;
    case Term::Tag::Nonce:
      h = hashCombine(h, static_cast<size_t>(n->nid));
      break;
    case Term::Tag::Var:
      h = hashCombine(h, static_cast<size_t>(n->vk));
      h = hashCombine(h, n->index);
      n->ground = false;
      break;
    case Term::Tag::App:
      h = hashCombine(h, static_cast<size_t>(n->op));
      h = hashCombine(h, n->index);
      [[fallthrough]];
    case Term::Tag::Seq:
      for (const Term& t : n->args) {
        h = hashCombine(h, t.hash());
        n->ground = n->ground && t.ground();
        n->normal = n->normal && t.inNormalForm();
      }
      break;
    default:
      break;
  }
  n->h = h;
  if (n->normal && rootRedex(*n)) n->normal = false;
  return n;
}

const Term& emptySeqSingleton() {
  static const Term t = Term::seq({});
  return t;
}

}  // namespace

Term::Term() : node_(emptySeqSingleton().node_) {}

Term Term::str(std::string_view s) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::Str;
  n->text = std::string(s);
  return Term(finish(std::move(n)));
}

Term Term::addr(std::string_view a) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::Addr;
  n->text = std::string(a);
  return Term(finish(std::move(n)));
}

Term Term::top() {
  static const Term t = [] {
    auto n = std::make_shared<Node>();
    n->tag = Tag::Top;
    return Term(finish(std::move(n)));
  }();
  return t;
}

Term Term::bot() {
  static const Term t = [] {
    auto n = std::make_shared<Node>();
    n->tag = Tag::Bot;
    return Term(finish(std::move(n)));
  }();
  return t;
}

Term Term::dia() {
  static const Term t = [] {
    auto n = std::make_shared<Node>();
    n->tag = Tag::Dia;
    return Term(finish(std::move(n)));
  }();
  return t;
}

Term Term::nonce(uint64_t id) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::Nonce;
  n->nid = id;
  return Term(finish(std::move(n)));
}

Term Term::var(VarKind k, uint32_t index) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::Var;
  n->vk = k;
  n->index = index;
  return Term(finish(std::move(n)));
}

Term Term::wildcard() { return var(VarKind::Wildcard, 0); }

Term Term::seq(std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::Seq;
  n->args = std::move(args);
  return Term(finish(std::move(n)));
}

Term Term::app(Op op, std::vector<Term> args) {
  size_t want = 0;
  switch (op) {
    case Op::Pub:
    case Op::ExtractMsg:
    case Op::Proj:
      want = 1;
      break;
    case Op::EncA:
    case Op::DecA:
    case Op::EncS:
    case Op::DecS:
    case Op::Sig:
      want = 2;
      break;
    case Op::CheckSig:
      want = 3;
      break;
  }
  if (args.size() != want) throw std::invalid_argument("bad arity for " + std::string(opName(op)));
  auto n = std::make_shared<Node>();
  n->tag = Tag::App;
  n->op = op;
  n->args = std::move(args);
  return Term(finish(std::move(n)));
}

Term Term::proj(uint32_t index, Term arg) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::App;
  n->op = Op::Proj;
  n->index = index;
  n->args = {std::move(arg)};
  return Term(finish(std::move(n)));
}

Term::Tag Term::tag() const { return node_->tag; }

std::string_view Term::text() const { return node_->text; }
uint64_t Term::nonceId() const { return node_->nid; }
VarKind Term::varKind() const { return node_->vk; }
uint32_t Term::varIndex() const { return node_->index; }
Op Term::op() const { return node_->op; }
uint32_t Term::projIndex() const { return node_->index; }

const std::vector<Term>& Term::args() const { return node_->args; }

size_t Term::hash() const { return node_->h; }
bool Term::ground() const { return node_->ground; }
bool Term::inNormalForm() const { return node_->normal; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.h != y.h || x.tag != y.tag) return false;
  switch (x.tag) {
    case Term::Tag::Str:
    case Term::Tag::Addr:
      return x.text == y.text;
    case Term::Tag::Top:
    case Term::Tag::Bot:
    case Term::Tag::Dia:
      return true;
    case Term::Tag::Nonce:
      return x.nid == y.nid;
    case Term::Tag::Var:
      return x.vk == y.vk && x.index == y.index;
    case Term::Tag::App:
      if (x.op != y.op || x.index != y.index) return false;
      [[fallthrough]];
    case Term::Tag::Seq:
      if (x.args.size() != y.args.size()) return false;
      for (size_t i = 0; i < x.args.size(); ++i)
        if (!(x.args[i] == y.args[i])) return false;
      return true;
  }
  return false;
}

std::string_view opName(Op op) {
  switch (op) {
    case Op::Pub: return "pub";
    case Op::EncA: return "enc_a";
    case Op::DecA: return "dec_a";
    case Op::EncS: return "enc_s";
    case Op::DecS: return "dec_s";
    case Op::Sig: return "sig";
    case Op::CheckSig: return "checksig";
    case Op::ExtractMsg: return "extractmsg";
    case Op::Proj: return "proj";
  }
  return "?";
}

Term normalize(const Term& t) {
  if (t.inNormalForm()) return t;
  if (t.isSeq()) {
    std::vector<Term> args;
    args.reserve(t.size());
    for (const Term& a : t.args()) args.push_back(normalize(a));
    return Term::seq(std::move(args));
  }
  // App with some reducible part.
  std::vector<Term> args;
  args.reserve(t.size());
  for (const Term& a : t.args()) args.push_back(normalize(a));
  switch (t.op()) {
    case Op::DecA: {
      const Term& c = args[0];
      if (c.isApp() && c.op() == Op::EncA) {
        const Term& k = c.args()[1];
        if (k.isApp() && k.op() == Op::Pub && k.args()[0] == args[1]) return c.args()[0];
      }
      break;
    }
    case Op::DecS: {
      const Term& c = args[0];
      if (c.isApp() && c.op() == Op::EncS && c.args()[1] == args[1]) return c.args()[0];
      break;
    }
    case Op::CheckSig: {
      const Term& s = args[0];
      if (s.isApp() && s.op() == Op::Sig && s.args()[0] == args[1]) {
        const Term& p = args[2];
        if (p.isApp() && p.op() == Op::Pub && p.args()[0] == s.args()[1]) return Term::top();
      }
      break;
    }
    case Op::ExtractMsg: {
      const Term& s = args[0];
      if (s.isApp() && s.op() == Op::Sig) return s.args()[0];
      break;
    }
    case Op::Proj: {
      const Term& s = args[0];
      if (s.isSeq()) {
        uint32_t i = t.projIndex();
        if (i >= 1 && i <= s.size()) return s.at(i - 1);
        return Term::dia();
      }
      break;
    }
    default:
      break;
  }
  if (t.op() == Op::Proj) return Term::proj(t.projIndex(), std::move(args[0]));
  return Term::app(t.op(), std::move(args));
}

bool equiv(const Term& a, const Term& b) { return normalize(a) == normalize(b); }

namespace {

bool matchRec(const Term& t, const Term& p) {
  if (p.isVar() && p.varKind() == VarKind::Wildcard) return true;
  if (t.tag() != p.tag()) return false;
  switch (t.tag()) {
    case Term::Tag::Str:
    case Term::Tag::Addr:
      return t.text() == p.text();
    case Term::Tag::Top:
    case Term::Tag::Bot:
    case Term::Tag::Dia:
      return true;
    case Term::Tag::Nonce:
      return t.nonceId() == p.nonceId();
    case Term::Tag::Var:
      return t.varKind() == p.varKind() && t.varIndex() == p.varIndex();
    case Term::Tag::App:
      if (t.op() != p.op() || t.projIndex() != p.projIndex()) return false;
      [[fallthrough]];
    case Term::Tag::Seq: {
      if (t.size() != p.size()) return false;
      for (size_t i = 0; i < t.size(); ++i)
        if (!matchRec(t.at(i), p.at(i))) return false;
      return true;
    }
  }
  return false;
}

}  // namespace

bool matches(const Term& t, const Term& pattern) {
  return matchRec(normalize(t), normalize(pattern));
}

bool matchesAny(const Term& t, const std::vector<Term>& patterns) {
  Term n = normalize(t);
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const Term& p) { return matchRec(n, normalize(p)); });
}

Term filterMatching(const Term& t, const Term& pattern) {
  Term n = normalize(t);
  if (!n.isSeq()) return n;
  Term p = normalize(pattern);
  std::vector<Term> kept;
  for (const Term& e : n.args())
    if (matchRec(e, p)) kept.push_back(e);
  return Term::seq(std::move(kept));
}

Term applyPointer(const Term& t, std::span<const uint32_t> pointer) {
  Term cur = normalize(t);
  for (uint32_t i : pointer) {
    if (cur.isSeq() && i >= 1 && i <= cur.size()) {
      cur = cur.at(i - 1);
    } else {
      return Term::dia();
    }
  }
  return cur;
}

Term dictGet(const Term& dict, const Term& key) {
  Term d = normalize(dict);
  if (!d.isSeq()) return Term::seq({});
  for (const Term& e : d.args()) {
    if (e.isSeq() && e.size() == 2 && equiv(e.at(0), key)) return e.at(1);
  }
  return Term::seq({});
}

bool dictHas(const Term& dict, const Term& key) {
  Term d = normalize(dict);
  if (!d.isSeq()) return false;
  for (const Term& e : d.args())
    if (e.isSeq() && e.size() == 2 && equiv(e.at(0), key)) return true;
  return false;
}

Term dictPut(const Term& dict, const Term& key, const Term& value) {
  Term d = normalize(dict);
  std::vector<Term> out;
  bool replaced = false;
  if (d.isSeq()) {
    for (const Term& e : d.args()) {
      if (!replaced && e.isSeq() && e.size() == 2 && equiv(e.at(0), key)) {
        out.push_back(Term::seq({key, value}));
        replaced = true;
      } else {
        out.push_back(e);
      }
    }
  }
  if (!replaced) out.push_back(Term::seq({key, value}));
  return Term::seq(std::move(out));
}

Term dictRemove(const Term& dict, const Term& key) {
  Term d = normalize(dict);
  std::vector<Term> out;
  if (d.isSeq()) {
    for (const Term& e : d.args()) {
      if (e.isSeq() && e.size() == 2 && equiv(e.at(0), key)) continue;
      out.push_back(e);
    }
  }
  return Term::seq(std::move(out));
}

Term substituteProcessVars(const Term& t, const std::vector<std::pair<uint32_t, Term>>& bindings) {
  if (t.ground()) return t;
  if (t.isVar() && t.varKind() == VarKind::Process) {
    for (const auto& [idx, v] : bindings)
      if (idx == t.varIndex()) return v;
    return t;
  }
  if (t.isSeq() || t.isApp()) {
    std::vector<Term> args;
    args.reserve(t.size());
    bool changed = false;
    for (const Term& a : t.args()) {
      Term r = substituteProcessVars(a, bindings);
      changed = changed || !(r == a);
      args.push_back(std::move(r));
    }
    if (!changed) return t;
    if (t.isSeq()) return Term::seq(std::move(args));
    if (t.op() == Op::Proj) return Term::proj(t.projIndex(), std::move(args[0]));
    return Term::app(t.op(), std::move(args));
  }
  return t;
}

namespace {
void collectVarsRec(const Term& t, VarKind kind, std::vector<uint32_t>& out) {
  if (t.ground()) return;
  if (t.isVar()) {
    if (t.varKind() == kind) out.push_back(t.varIndex());
    return;
  }
  for (const Term& a : t.args()) collectVarsRec(a, kind, out);
}
}  // namespace

std::vector<uint32_t> collectVars(const Term& t, VarKind kind) {
  std::vector<uint32_t> out;
  collectVarsRec(t, kind, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace oasim
