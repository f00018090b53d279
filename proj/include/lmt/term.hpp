#pragma once

// Core abstract syntax: simple types, terms and commands with two disjoint
// variable sorts (lambda and mu), numerals, values, free variables and
// alpha-equality.
//
// Representation is locally nameless: bound variables are de Bruijn indices
// (lambda binders and mu binders are counted in separate index spaces), free
// variables are globally fresh integer ids carrying a printing hint. Every
// term handled by the library is locally closed; recursion under a binder
// opens it with a fresh free name and closes it again afterwards. This makes
// alpha-equality a structural check (hints excluded) and capture impossible
// when grafting locally closed subterms.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lmt {

inline std::uint64_t fresh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

// ---------------------------------------------------------------------------
// Types: N | sigma -> tau
// ---------------------------------------------------------------------------

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Nat, Arrow } kind;
  TypePtr dom;  // Arrow only
  TypePtr cod;  // Arrow only
};

inline TypePtr nat_type() {
  static const TypePtr n = std::make_shared<Type>(Type{Type::Kind::Nat, nullptr, nullptr});
  return n;
}

inline TypePtr arrow(TypePtr dom, TypePtr cod) {
  return std::make_shared<Type>(Type{Type::Kind::Arrow, std::move(dom), std::move(cod)});
}

inline bool is_nat(const TypePtr& t) { return t->kind == Type::Kind::Nat; }

inline bool type_eq(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  if (a->kind == Type::Kind::Nat) return true;
  return type_eq(a->dom, b->dom) && type_eq(a->cod, b->cod);
}

inline std::string type_key(const TypePtr& t) {
  if (t->kind == Type::Kind::Nat) return "N";
  return "(" + type_key(t->dom) + ">" + type_key(t->cod) + ")";
}

// ---------------------------------------------------------------------------
// Terms and commands
// ---------------------------------------------------------------------------

struct Term;
struct Command;
using TermPtr = std::shared_ptr<const Term>;
using CommandPtr = std::shared_ptr<const Command>;

enum class TermKind : std::uint8_t { BVar, FVar, Lam, App, Mu, Zero, Suc, NRec };

// [target] term; the target is either a bound mu-index or a free mu-name.
struct Command {
  int tgt_index = -1;        // >= 0: de Bruijn index over mu binders
  std::uint64_t tgt_id = 0;  // != 0: free mu-variable
  std::string tgt_hint;
  TermPtr term;

  bool tgt_bound() const { return tgt_index >= 0; }
};

struct Term {
  TermKind kind;
  int index = -1;        // BVar: de Bruijn index over lambda binders
  std::uint64_t id = 0;  // FVar
  std::string hint;      // FVar
  TypePtr annot;         // Lam, Mu, NRec
  TermPtr a;             // Lam: body; App: fn; Suc: arg; NRec: base
  TermPtr b;             // App: arg; NRec: step
  TermPtr c;             // NRec: scrutinee
  CommandPtr cmd;        // Mu
};

inline TermPtr bvar(int index) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::BVar;
  t->index = index;
  return t;
}

inline TermPtr fvar(std::uint64_t id, std::string hint = "x") {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::FVar;
  t->id = id;
  t->hint = std::move(hint);
  return t;
}

inline TermPtr lam(TypePtr annot, TermPtr body) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Lam;
  t->annot = std::move(annot);
  t->a = std::move(body);
  return t;
}

inline TermPtr app(TermPtr fn, TermPtr arg) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::App;
  t->a = std::move(fn);
  t->b = std::move(arg);
  return t;
}

inline TermPtr mu(TypePtr annot, CommandPtr body) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Mu;
  t->annot = std::move(annot);
  t->cmd = std::move(body);
  return t;
}

inline TermPtr zero() {
  static const TermPtr z = [] {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Zero;
    return t;
  }();
  return z;
}

inline TermPtr suc(TermPtr arg) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Suc;
  t->a = std::move(arg);
  return t;
}

inline TermPtr nrec(TypePtr annot, TermPtr base, TermPtr step, TermPtr scrut) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::NRec;
  t->annot = std::move(annot);
  t->a = std::move(base);
  t->b = std::move(step);
  t->c = std::move(scrut);
  return t;
}

inline CommandPtr cmd_bound(int index, TermPtr term) {
  auto c = std::make_shared<Command>();
  c->tgt_index = index;
  c->term = std::move(term);
  return c;
}

inline CommandPtr cmd_free(std::uint64_t id, std::string hint, TermPtr term) {
  auto c = std::make_shared<Command>();
  c->tgt_id = id;
  c->tgt_hint = std::move(hint);
  c->term = std::move(term);
  return c;
}

// ---------------------------------------------------------------------------
// Numerals and values
// ---------------------------------------------------------------------------

// suc^n 0
inline TermPtr numeral(std::uint64_t n) {
  TermPtr t = zero();
  for (std::uint64_t i = 0; i < n; ++i) t = suc(t);
  return t;
}

// n iff t is syntactically suc^n 0
inline std::optional<std::uint64_t> as_numeral(const TermPtr& t) {
  std::uint64_t n = 0;
  const Term* cur = t.get();
  while (cur->kind == TermKind::Suc) {
    ++n;
    cur = cur->a.get();
  }
  if (cur->kind == TermKind::Zero) return n;
  return std::nullopt;
}

// v ::= 0 | suc v | \x.r
inline bool is_value(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Zero:
    case TermKind::Lam: return true;
    case TermKind::Suc: return is_value(t->a);
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

struct VarSets {
  std::set<std::uint64_t> lam;  // FV
  std::set<std::uint64_t> mu;   // FCV
};

inline void collect_free(const TermPtr& t, VarSets& out);

inline void collect_free(const CommandPtr& c, VarSets& out) {
  if (!c->tgt_bound()) out.mu.insert(c->tgt_id);
  collect_free(c->term, out);
}

inline void collect_free(const TermPtr& t, VarSets& out) {
  switch (t->kind) {
    case TermKind::BVar:
    case TermKind::Zero: return;
    case TermKind::FVar: out.lam.insert(t->id); return;
    case TermKind::Lam:
    case TermKind::Suc: collect_free(t->a, out); return;
    case TermKind::App:
      collect_free(t->a, out);
      collect_free(t->b, out);
      return;
    case TermKind::Mu: collect_free(t->cmd, out); return;
    case TermKind::NRec:
      collect_free(t->a, out);
      collect_free(t->b, out);
      collect_free(t->c, out);
      return;
  }
}

template <class Expr>
inline VarSets free_vars(const Expr& e) {
  VarSets out;
  collect_free(e, out);
  return out;
}

inline bool mu_free_in(std::uint64_t id, const TermPtr& t) {
  return free_vars(t).mu.count(id) > 0;
}
inline bool mu_free_in(std::uint64_t id, const CommandPtr& c) {
  return free_vars(c).mu.count(id) > 0;
}

// ---------------------------------------------------------------------------
// Alpha-equality: structural equality ignoring hints
// ---------------------------------------------------------------------------

inline bool alpha_eq(const TermPtr& x, const TermPtr& y);

inline bool alpha_eq(const CommandPtr& x, const CommandPtr& y) {
  if (x.get() == y.get()) return true;
  if (x->tgt_index != y->tgt_index || x->tgt_id != y->tgt_id) return false;
  return alpha_eq(x->term, y->term);
}

inline bool alpha_eq(const TermPtr& x, const TermPtr& y) {
  if (x.get() == y.get()) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case TermKind::BVar: return x->index == y->index;
    case TermKind::FVar: return x->id == y->id;
    case TermKind::Zero: return true;
    case TermKind::Suc: return alpha_eq(x->a, y->a);
    case TermKind::Lam: return type_eq(x->annot, y->annot) && alpha_eq(x->a, y->a);
    case TermKind::App: return alpha_eq(x->a, y->a) && alpha_eq(x->b, y->b);
    case TermKind::Mu: return type_eq(x->annot, y->annot) && alpha_eq(x->cmd, y->cmd);
    case TermKind::NRec:
      return type_eq(x->annot, y->annot) && alpha_eq(x->a, y->a) && alpha_eq(x->b, y->b) &&
             alpha_eq(x->c, y->c);
  }
  return false;
}

// Canonical serialization, usable as a hash/set key; two expressions have the
// same key iff they are alpha-equal.
inline void canon_key(const TermPtr& t, std::string& out);

inline void canon_key(const CommandPtr& c, std::string& out) {
  out += '[';
  if (c->tgt_bound())
    out += 'b' + std::to_string(c->tgt_index);
  else
    out += 'f' + std::to_string(c->tgt_id);
  out += ']';
  canon_key(c->term, out);
}

inline void canon_key(const TermPtr& t, std::string& out) {
  switch (t->kind) {
    case TermKind::BVar: out += 'B' + std::to_string(t->index); break;
    case TermKind::FVar: out += 'F' + std::to_string(t->id); break;
    case TermKind::Zero: out += 'Z'; break;
    case TermKind::Suc:
      out += 'S';
      canon_key(t->a, out);
      break;
    case TermKind::Lam:
      out += 'L' + type_key(t->annot) + '.';
      canon_key(t->a, out);
      break;
    case TermKind::App:
      out += '(';
      canon_key(t->a, out);
      out += ' ';
      canon_key(t->b, out);
      out += ')';
      break;
    case TermKind::Mu:
      out += 'M' + type_key(t->annot) + '.';
      canon_key(t->cmd, out);
      break;
    case TermKind::NRec:
      out += 'R' + type_key(t->annot) + '{';
      canon_key(t->a, out);
      out += ';';
      canon_key(t->b, out);
      out += ';';
      canon_key(t->c, out);
      out += '}';
      break;
  }
}

template <class Expr>
inline std::string canon_key(const Expr& e) {
  std::string out;
  canon_key(e, out);
  return out;
}

// Node count (terms and commands each count 1).
inline std::size_t term_size(const TermPtr& t);

inline std::size_t term_size(const CommandPtr& c) { return 1 + term_size(c->term); }

inline std::size_t term_size(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::BVar:
    case TermKind::FVar:
    case TermKind::Zero: return 1;
    case TermKind::Lam:
    case TermKind::Suc: return 1 + term_size(t->a);
    case TermKind::App: return 1 + term_size(t->a) + term_size(t->b);
    case TermKind::Mu: return 1 + term_size(t->cmd);
    case TermKind::NRec: return 1 + term_size(t->a) + term_size(t->b) + term_size(t->c);
  }
  return 1;
}

inline bool contains_mu(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::BVar:
    case TermKind::FVar:
    case TermKind::Zero: return false;
    case TermKind::Lam:
    case TermKind::Suc: return contains_mu(t->a);
    case TermKind::App: return contains_mu(t->a) || contains_mu(t->b);
    case TermKind::Mu: return true;
    case TermKind::NRec:
      return contains_mu(t->a) || contains_mu(t->b) || contains_mu(t->c);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Generic rewriting walker; the open/close/substitution operations below are
// thin instances of it. ldepth/mdepth count enclosing lambda/mu binders.
// ---------------------------------------------------------------------------

struct Rewriter {
  virtual ~Rewriter() = default;
  // Return a replacement, or nullptr to keep the variable.
  virtual TermPtr on_bvar(int /*index*/, int /*ldepth*/) { return nullptr; }
  virtual TermPtr on_fvar(std::uint64_t /*id*/, int /*ldepth*/) { return nullptr; }
  // Called with the already-rewritten body; return a replacement command, or
  // nullptr to keep the original target.
  virtual CommandPtr on_command(const Command& /*orig*/, const TermPtr& /*newBody*/,
                                int /*ldepth*/, int /*mdepth*/) {
    return nullptr;
  }
};

inline TermPtr rewrite(const TermPtr& t, Rewriter& r, int ld = 0, int md = 0);

inline CommandPtr rewrite(const CommandPtr& c, Rewriter& r, int ld = 0, int md = 0) {
  TermPtr body = rewrite(c->term, r, ld, md);
  if (CommandPtr replaced = r.on_command(*c, body, ld, md)) return replaced;
  if (body.get() == c->term.get()) return c;
  auto out = std::make_shared<Command>(*c);
  out->term = std::move(body);
  return out;
}

inline TermPtr rewrite(const TermPtr& t, Rewriter& r, int ld, int md) {
  switch (t->kind) {
    case TermKind::BVar:
      if (TermPtr rep = r.on_bvar(t->index, ld)) return rep;
      return t;
    case TermKind::FVar:
      if (TermPtr rep = r.on_fvar(t->id, ld)) return rep;
      return t;
    case TermKind::Zero: return t;
    case TermKind::Suc: {
      TermPtr a = rewrite(t->a, r, ld, md);
      return a.get() == t->a.get() ? t : suc(std::move(a));
    }
    case TermKind::Lam: {
      TermPtr body = rewrite(t->a, r, ld + 1, md);
      return body.get() == t->a.get() ? t : lam(t->annot, std::move(body));
    }
    case TermKind::App: {
      TermPtr f = rewrite(t->a, r, ld, md);
      TermPtr x = rewrite(t->b, r, ld, md);
      return (f.get() == t->a.get() && x.get() == t->b.get()) ? t : app(std::move(f), std::move(x));
    }
    case TermKind::Mu: {
      CommandPtr body = rewrite(t->cmd, r, ld, md + 1);
      return body.get() == t->cmd.get() ? t : mu(t->annot, std::move(body));
    }
    case TermKind::NRec: {
      TermPtr a = rewrite(t->a, r, ld, md);
      TermPtr b = rewrite(t->b, r, ld, md);
      TermPtr s = rewrite(t->c, r, ld, md);
      if (a.get() == t->a.get() && b.get() == t->b.get() && s.get() == t->c.get()) return t;
      return nrec(t->annot, std::move(a), std::move(b), std::move(s));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Opening and closing binders
// ---------------------------------------------------------------------------

// Replace the lambda index bound by the immediately enclosing binder with u
// (u locally closed, so no shifting is needed).
inline TermPtr open_lam(const TermPtr& body, const TermPtr& u) {
  struct R : Rewriter {
    const TermPtr& u;
    explicit R(const TermPtr& u) : u(u) {}
    TermPtr on_bvar(int index, int ld) override { return index == ld ? u : nullptr; }
  } r{u};
  return rewrite(body, r);
}

// Turn the free lambda variable id back into a bound index.
inline TermPtr close_lam(const TermPtr& t, std::uint64_t id) {
  struct R : Rewriter {
    std::uint64_t id;
    explicit R(std::uint64_t id) : id(id) {}
    TermPtr on_fvar(std::uint64_t vid, int ld) override {
      return vid == id ? bvar(ld) : nullptr;
    }
  } r{id};
  return rewrite(t, r);
}

// Replace the mu index bound by the immediately enclosing mu with a free name.
inline CommandPtr open_mu(const CommandPtr& c, std::uint64_t id, const std::string& hint) {
  struct R : Rewriter {
    std::uint64_t id;
    const std::string& hint;
    R(std::uint64_t id, const std::string& hint) : id(id), hint(hint) {}
    CommandPtr on_command(const Command& orig, const TermPtr& body, int, int md) override {
      if (orig.tgt_bound() && orig.tgt_index == md) return cmd_free(id, hint, body);
      return nullptr;
    }
  } r{id, hint};
  return rewrite(c, r);
}

template <class Expr>
inline Expr close_mu(const Expr& e, std::uint64_t id) {
  struct R : Rewriter {
    std::uint64_t id;
    explicit R(std::uint64_t id) : id(id) {}
    CommandPtr on_command(const Command& orig, const TermPtr& body, int, int md) override {
      if (!orig.tgt_bound() && orig.tgt_id == id) return cmd_bound(md, body);
      return nullptr;
    }
  } r{id};
  return rewrite(e, r);
}

// Convenience: open a Lam body with a fresh free variable.
struct OpenedLam {
  std::uint64_t id;
  TermPtr var;
  TermPtr body;
};

inline OpenedLam open_lam_fresh(const TermPtr& lamTerm, const std::string& hint = "x") {
  std::uint64_t id = fresh_id();
  TermPtr v = fvar(id, hint);
  return OpenedLam{id, v, open_lam(lamTerm->a, v)};
}

struct OpenedMu {
  std::uint64_t id;
  std::string hint;
  CommandPtr body;
};

inline OpenedMu open_mu_fresh(const TermPtr& muTerm, const std::string& hint = "a") {
  std::uint64_t id = fresh_id();
  return OpenedMu{id, hint, open_mu(muTerm->cmd, id, hint)};
}

}  // namespace lmt
