#pragma once

// Executable confluence machinery: eta-contexts, the ten-way term
// classification, the parallel reduction relation as a finite successor
// enumeration, and complete developments.
//
// classify_shape peels an eta-frame E[mu a.[a] _] only when the binder does
// not occur free in anything deeper (remaining frames and the core), and
// peels greedily outside-in. That longest-chain reading is what makes the
// ten shapes mutually exclusive.

#include <functional>
#include <unordered_set>
#include <vector>

#include "lmt/context.hpp"
#include "lmt/reduce.hpp"
#include "lmt/subst.hpp"
#include "lmt/term.hpp"

namespace lmt {

// ---------------------------------------------------------------------------
// Eta-contexts H ::= [] | E[mu a.[a]H], a not free in H
// ---------------------------------------------------------------------------

struct EtaCtx;
using EtaPtr = std::shared_ptr<const EtaCtx>;

struct EtaCtx {
  bool hole = true;
  CtxPtr outer;  // the E of the frame
  std::uint64_t binder = 0;
  std::string binderHint;
  TypePtr annot;  // annotation of the frame's mu
  EtaPtr inner;
};

inline EtaPtr eta_hole() {
  static const EtaPtr h = std::make_shared<EtaCtx>();
  return h;
}

inline EtaPtr eta_frame(CtxPtr outer, std::uint64_t binder, std::string hint, TypePtr annot,
                        EtaPtr inner) {
  auto f = std::make_shared<EtaCtx>();
  f->hole = false;
  f->outer = std::move(outer);
  f->binder = binder;
  f->binderHint = std::move(hint);
  f->annot = std::move(annot);
  f->inner = std::move(inner);
  return f;
}

inline int eta_depth(const EtaPtr& h) { return h->hole ? 0 : 1 + eta_depth(h->inner); }

// H[t]; capture avoiding for mu-variables: only each frame's own (globally
// fresh) binder is re-bound.
inline TermPtr plug_eta(const EtaPtr& h, const TermPtr& t) {
  if (h->hole) return t;
  TermPtr body = plug_eta(h->inner, t);
  CommandPtr c = close_mu(cmd_free(h->binder, h->binderHint, body), h->binder);
  return plug(h->outer, mu(h->annot, c));
}

inline void collect_free(const EtaPtr& h, VarSets& out) {
  if (h->hole) return;
  collect_free(h->outer, out);
  VarSets deeper;
  collect_free(h->inner, deeper);
  deeper.mu.erase(h->binder);
  out.lam.insert(deeper.lam.begin(), deeper.lam.end());
  out.mu.insert(deeper.mu.begin(), deeper.mu.end());
}

// ---------------------------------------------------------------------------
// Term classification (the ten mutually exclusive shapes)
// ---------------------------------------------------------------------------

enum class ShapeKind : std::uint8_t {
  Var,
  NumeralV,
  LamV,
  BetaRedex,
  NRecNumRedex,
  EtaWrappedStable,
  EtaWrappedMu,
  OtherApp,
  OtherNRec,
  OtherSuc,
};

inline const char* to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Var: return "Var";
    case ShapeKind::NumeralV: return "NumeralV";
    case ShapeKind::LamV: return "LamV";
    case ShapeKind::BetaRedex: return "BetaRedex";
    case ShapeKind::NRecNumRedex: return "NRecNumRedex";
    case ShapeKind::EtaWrappedStable: return "EtaWrappedStable";
    case ShapeKind::EtaWrappedMu: return "EtaWrappedMu";
    case ShapeKind::OtherApp: return "OtherApp";
    case ShapeKind::OtherNRec: return "OtherNRec";
    case ShapeKind::OtherSuc: return "OtherSuc";
  }
  return "?";
}

struct Shape {
  ShapeKind kind;
  // EtaWrappedStable: H (non-hole) and the stable-headed core.
  // EtaWrappedMu: H (possibly hole), spine context E around the mu, the
  // opened binder and annotation, and the opened command body.
  EtaPtr H;
  TermPtr core;
  CtxPtr E;
  TypePtr muAnnot;
  std::uint64_t binder = 0;
  std::string binderHint;
  CommandPtr body;
};

inline Shape classify_shape(const TermPtr& t) {
  std::vector<std::pair<CtxPtr, const Term*>> rawFrames;  // for eta rebuilding
  std::vector<std::tuple<CtxPtr, std::uint64_t, std::string, TypePtr>> frames;
  TermPtr cur = t;

  while (true) {
    auto [E, head] = decompose(cur);
    if (head->kind == TermKind::Mu) {
      OpenedMu o = open_mu_fresh(head, "e");
      bool selfTarget = !o.body->tgt_bound() && o.body->tgt_id == o.id;
      if (selfTarget && !mu_free_in(o.id, o.body->term)) {
        frames.emplace_back(E, o.id, o.hint, head->annot);
        cur = o.body->term;
        continue;
      }
      // Core mu whose command does not collapse: shape 7.
      EtaPtr H = eta_hole();
      for (auto it = frames.rbegin(); it != frames.rend(); ++it)
        H = eta_frame(std::get<0>(*it), std::get<1>(*it), std::get<2>(*it), std::get<3>(*it), H);
      Shape s{ShapeKind::EtaWrappedMu, H, nullptr, E, head->annot, o.id, o.hint, o.body};
      return s;
    }
    break;
  }

  if (!frames.empty()) {
    EtaPtr H = eta_hole();
    for (auto it = frames.rbegin(); it != frames.rend(); ++it)
      H = eta_frame(std::get<0>(*it), std::get<1>(*it), std::get<2>(*it), std::get<3>(*it), H);
    Shape s{ShapeKind::EtaWrappedStable, H, cur, nullptr, nullptr, 0, "", nullptr};
    return s;
  }

  Shape s{ShapeKind::Var, nullptr, nullptr, nullptr, nullptr, 0, "", nullptr};
  switch (t->kind) {
    case TermKind::FVar: s.kind = ShapeKind::Var; break;
    case TermKind::Zero: s.kind = ShapeKind::NumeralV; break;
    case TermKind::Suc: s.kind = as_numeral(t) ? ShapeKind::NumeralV : ShapeKind::OtherSuc; break;
    case TermKind::Lam: s.kind = ShapeKind::LamV; break;
    case TermKind::App:
      s.kind = t->a->kind == TermKind::Lam ? ShapeKind::BetaRedex : ShapeKind::OtherApp;
      break;
    case TermKind::NRec:
      s.kind = as_numeral(t->c) ? ShapeKind::NRecNumRedex : ShapeKind::OtherNRec;
      break;
    case TermKind::BVar: throw std::logic_error("classify_shape: dangling bound variable");
    case TermKind::Mu: throw std::logic_error("classify_shape: unreachable mu");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Parallel reduction: the exact finite set of one-parallel-step successors
// ---------------------------------------------------------------------------

namespace detail {

template <class Expr>
struct ExprSet {
  std::vector<Expr> items;
  std::unordered_set<std::string> keys;
  void add(const Expr& e) {
    if (keys.insert(canon_key(e)).second) items.push_back(e);
  }
};

}  // namespace detail

inline std::vector<TermPtr> par_reducts(const TermPtr& t);
inline std::vector<CommandPtr> par_reducts(const CommandPtr& c);

inline std::vector<CtxPtr> par_reducts(const CtxPtr& e) {
  detail::ExprSet<CtxPtr> out;
  switch (e->kind) {
    case CtxKind::Hole: out.add(e); break;
    case CtxKind::AppC:
      for (const CtxPtr& in : par_reducts(e->inner))
        for (const TermPtr& a : par_reducts(e->arg)) out.add(app_ctx(in, a));
      break;
    case CtxKind::SucC:
      for (const CtxPtr& in : par_reducts(e->inner)) out.add(suc_ctx(in));
      break;
    case CtxKind::NRecC:
      for (const CtxPtr& in : par_reducts(e->inner))
        for (const TermPtr& r : par_reducts(e->base))
          for (const TermPtr& s : par_reducts(e->step)) out.add(nrec_ctx(e->annot, r, s, in));
      break;
  }
  return out.items;
}

namespace detail {

// (t6): for t == E[mu a.c] with E the full spine (at least one frame here;
// the E == [] instance is the Mu node's own case).
inline void add_mu_jumps(const TermPtr& t, ExprSet<TermPtr>& out) {
  auto [E, head] = decompose(t);
  if (head->kind != TermKind::Mu) return;
  OpenedMu o = open_mu_fresh(head, "a");
  for (const CommandPtr& c2 : par_reducts(o.body))
    for (const CtxPtr& E2 : par_reducts(E)) {
      CommandPtr sub = subst_struct(c2, o.id, o.id, o.hint, E2);
      out.add(mu(annot_after(head->annot, E2), close_mu(sub, o.id)));
    }
}

}  // namespace detail

inline std::vector<TermPtr> par_reducts(const TermPtr& t) {
  detail::ExprSet<TermPtr> out;
  switch (t->kind) {
    case TermKind::FVar:
    case TermKind::Zero: out.add(t); break;
    case TermKind::BVar: throw std::logic_error("par_reducts: dangling bound variable");
    case TermKind::Lam: {
      OpenedLam o = open_lam_fresh(t);
      for (const TermPtr& b : par_reducts(o.body)) out.add(lam(t->annot, close_lam(b, o.id)));
      break;
    }
    case TermKind::Suc: {
      for (const TermPtr& u : par_reducts(t->a)) out.add(suc(u));  // (t4)
      detail::add_mu_jumps(t, out);                                // (t6)
      break;
    }
    case TermKind::App: {
      std::vector<TermPtr> fs = par_reducts(t->a);
      std::vector<TermPtr> xs = par_reducts(t->b);
      for (const TermPtr& f : fs)
        for (const TermPtr& x : xs) out.add(app(f, x));  // (t4)
      if (t->a->kind == TermKind::Lam) {                 // (t5)
        OpenedLam o = open_lam_fresh(t->a);
        for (const TermPtr& b : par_reducts(o.body))
          for (const TermPtr& x : xs) out.add(subst_lam(b, o.id, x));
      }
      detail::add_mu_jumps(t, out);  // (t6)
      break;
    }
    case TermKind::Mu: {
      OpenedMu o = open_mu_fresh(t, "a");
      for (const CommandPtr& c : par_reducts(o.body))  // (t6) with E == []
        out.add(mu(t->annot, close_mu(c, o.id)));
      bool selfTarget = !o.body->tgt_bound() && o.body->tgt_id == o.id;
      if (selfTarget && !mu_free_in(o.id, o.body->term)) {  // (t7)
        for (const TermPtr& u : par_reducts(o.body->term)) out.add(u);
      }
      break;
    }
    case TermKind::NRec: {
      std::vector<TermPtr> rs = par_reducts(t->a);
      std::vector<TermPtr> ss = par_reducts(t->b);
      for (const TermPtr& r : rs)
        for (const TermPtr& s : ss)
          for (const TermPtr& u : par_reducts(t->c)) out.add(nrec(t->annot, r, s, u));  // (t4)
      if (t->c->kind == TermKind::Zero) {  // (t8)
        for (const TermPtr& r : rs) out.add(r);
      } else if (auto n = as_numeral(t->c); n && *n > 0) {  // (t9)
        TermPtr pred = numeral(*n - 1);
        for (const TermPtr& r : rs)
          for (const TermPtr& s : ss) out.add(app(app(s, pred), nrec(t->annot, r, s, pred)));
      }
      detail::add_mu_jumps(t, out);  // (t6)
      break;
    }
  }
  return out.items;
}

inline std::vector<CommandPtr> par_reducts(const CommandPtr& c) {
  detail::ExprSet<CommandPtr> out;
  for (const TermPtr& u : par_reducts(c->term)) {  // (c1)
    auto rebuilt = std::make_shared<Command>(*c);
    rebuilt->term = u;
    out.add(rebuilt);
  }
  auto [E, head] = decompose(c->term);  // (c2), E may be []
  if (head->kind == TermKind::Mu) {
    if (c->tgt_bound()) throw std::logic_error("par_reducts: dangling bound mu target");
    OpenedMu o = open_mu_fresh(head, "b");
    for (const CommandPtr& d : par_reducts(o.body))
      for (const CtxPtr& E2 : par_reducts(E))
        out.add(subst_struct(d, o.id, c->tgt_id, c->tgt_hint, E2));
  }
  return out.items;
}

// ---------------------------------------------------------------------------
// Complete development
// ---------------------------------------------------------------------------

inline TermPtr complete_dev(const TermPtr& t);
inline CommandPtr complete_dev(const CommandPtr& c);

inline CtxPtr complete_dev(const CtxPtr& e) {
  switch (e->kind) {
    case CtxKind::Hole: return e;
    case CtxKind::AppC: return app_ctx(complete_dev(e->inner), complete_dev(e->arg));
    case CtxKind::SucC: return suc_ctx(complete_dev(e->inner));
    case CtxKind::NRecC:
      return nrec_ctx(e->annot, complete_dev(e->base), complete_dev(e->step),
                      complete_dev(e->inner));
  }
  return e;
}

// H°: the frames' contexts, developed and composed; the mu wrappers vanish.
inline CtxPtr complete_dev_eta(const EtaPtr& h) {
  if (h->hole) return hole();
  return compose(complete_dev(h->outer), complete_dev_eta(h->inner));
}

inline CommandPtr complete_dev(const CommandPtr& c) {
  auto [E, head] = decompose(c->term);
  if (head->kind == TermKind::Mu) {
    if (c->tgt_bound()) throw std::logic_error("complete_dev: dangling bound mu target");
    OpenedMu o = open_mu_fresh(head, "b");
    return subst_struct(complete_dev(o.body), o.id, c->tgt_id, c->tgt_hint, complete_dev(E));
  }
  auto rebuilt = std::make_shared<Command>(*c);
  rebuilt->term = complete_dev(c->term);
  return rebuilt;
}

inline TermPtr complete_dev(const TermPtr& t) {
  Shape s = classify_shape(t);
  switch (s.kind) {
    case ShapeKind::Var:
    case ShapeKind::NumeralV: return t;
    case ShapeKind::LamV: {
      OpenedLam o = open_lam_fresh(t);
      return lam(t->annot, close_lam(complete_dev(o.body), o.id));
    }
    case ShapeKind::BetaRedex: {
      OpenedLam o = open_lam_fresh(t->a);
      return subst_lam(complete_dev(o.body), o.id, complete_dev(t->b));
    }
    case ShapeKind::NRecNumRedex: {
      std::uint64_t n = *as_numeral(t->c);
      if (n == 0) return complete_dev(t->a);
      TermPtr pred = numeral(n - 1);
      return app(app(complete_dev(t->b), pred),
                 nrec(t->annot, complete_dev(t->a), complete_dev(t->b), pred));
    }
    case ShapeKind::EtaWrappedStable:
      return plug(complete_dev_eta(s.H), complete_dev(s.core));
    case ShapeKind::EtaWrappedMu: {
      CtxPtr ctx = compose(complete_dev_eta(s.H), complete_dev(s.E));
      CommandPtr dev = complete_dev(s.body);
      CommandPtr sub = subst_struct(dev, s.binder, s.binder, s.binderHint, ctx);
      return mu(annot_after(s.muAnnot, ctx), close_mu(sub, s.binder));
    }
    case ShapeKind::OtherApp: return app(complete_dev(t->a), complete_dev(t->b));
    case ShapeKind::OtherNRec:
      return nrec(t->annot, complete_dev(t->a), complete_dev(t->b), complete_dev(t->c));
    case ShapeKind::OtherSuc: return suc(complete_dev(t->a));
  }
  throw std::logic_error("complete_dev: unreachable");
}

// ---------------------------------------------------------------------------
// The development-closes property: every parallel reduct of t parallel
// reduces to the complete development of t.
// ---------------------------------------------------------------------------

struct DevReport {
  bool ok = true;
  std::size_t reducts_checked = 0;
  std::string detail;  // first violation, if any
};

namespace detail {

template <class Expr>
inline DevReport dev_closes_impl(const Expr& t) {
  DevReport report;
  Expr target = complete_dev(t);
  std::string targetKey = canon_key(target);
  for (const Expr& next : par_reducts(t)) {
    ++report.reducts_checked;
    bool found = false;
    for (const Expr& back : par_reducts(next)) {
      if (canon_key(back) == targetKey) {
        found = true;
        break;
      }
    }
    if (!found) {
      report.ok = false;
      report.detail = "reduct " + canon_key(next) + " does not parallel-reduce to " + targetKey;
      return report;
    }
  }
  return report;
}

}  // namespace detail

inline DevReport dev_closes(const TermPtr& t) { return detail::dev_closes_impl(t); }
inline DevReport dev_closes(const CommandPtr& c) { return detail::dev_closes_impl(c); }

}  // namespace lmt
