#pragma once

// Evaluation contexts E ::= [] | E t | suc E | nrec r s E, hole plugging,
// composition, the singular subclass, and spine decomposition of a term into
// E[head]. Context components are locally closed terms, and the hole path
// never crosses a binder, so plugging is plain structural hole filling.

#include <utility>

#include "lmt/term.hpp"

namespace lmt {

struct EvalCtx;
using CtxPtr = std::shared_ptr<const EvalCtx>;

enum class CtxKind : std::uint8_t { Hole, AppC, SucC, NRecC };

struct EvalCtx {
  CtxKind kind;
  CtxPtr inner;   // AppC, SucC, NRecC
  TermPtr arg;    // AppC
  TypePtr annot;  // NRecC
  TermPtr base;   // NRecC
  TermPtr step;   // NRecC
};

inline CtxPtr hole() {
  static const CtxPtr h = std::make_shared<EvalCtx>(EvalCtx{CtxKind::Hole, nullptr, nullptr, nullptr, nullptr, nullptr});
  return h;
}

inline CtxPtr app_ctx(CtxPtr inner, TermPtr arg) {
  return std::make_shared<EvalCtx>(
      EvalCtx{CtxKind::AppC, std::move(inner), std::move(arg), nullptr, nullptr, nullptr});
}

inline CtxPtr suc_ctx(CtxPtr inner) {
  return std::make_shared<EvalCtx>(
      EvalCtx{CtxKind::SucC, std::move(inner), nullptr, nullptr, nullptr, nullptr});
}

inline CtxPtr nrec_ctx(TypePtr annot, TermPtr base, TermPtr step, CtxPtr inner) {
  return std::make_shared<EvalCtx>(EvalCtx{CtxKind::NRecC, std::move(inner), nullptr,
                                           std::move(annot), std::move(base), std::move(step)});
}

inline bool is_hole(const CtxPtr& e) { return e->kind == CtxKind::Hole; }

// Singular: exactly one frame deep.
inline bool is_singular(const CtxPtr& e) {
  return e->kind != CtxKind::Hole && e->inner->kind == CtxKind::Hole;
}

// E[t]
inline TermPtr plug(const CtxPtr& e, const TermPtr& t) {
  switch (e->kind) {
    case CtxKind::Hole: return t;
    case CtxKind::AppC: return app(plug(e->inner, t), e->arg);
    case CtxKind::SucC: return suc(plug(e->inner, t));
    case CtxKind::NRecC: return nrec(e->annot, e->base, e->step, plug(e->inner, t));
  }
  return t;
}

// EF, satisfying plug(compose(E,F), t) == plug(E, plug(F, t)).
inline CtxPtr compose(const CtxPtr& e, const CtxPtr& f) {
  switch (e->kind) {
    case CtxKind::Hole: return f;
    case CtxKind::AppC: return app_ctx(compose(e->inner, f), e->arg);
    case CtxKind::SucC: return suc_ctx(compose(e->inner, f));
    case CtxKind::NRecC: return nrec_ctx(e->annot, e->base, e->step, compose(e->inner, f));
  }
  return f;
}

inline int ctx_depth(const CtxPtr& e) {
  return e->kind == CtxKind::Hole ? 0 : 1 + ctx_depth(e->inner);
}

inline void collect_free(const CtxPtr& e, VarSets& out) {
  switch (e->kind) {
    case CtxKind::Hole: return;
    case CtxKind::AppC:
      collect_free(e->arg, out);
      collect_free(e->inner, out);
      return;
    case CtxKind::SucC: collect_free(e->inner, out); return;
    case CtxKind::NRecC:
      collect_free(e->base, out);
      collect_free(e->step, out);
      collect_free(e->inner, out);
      return;
  }
}

inline bool alpha_eq(const CtxPtr& x, const CtxPtr& y) {
  if (x.get() == y.get()) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case CtxKind::Hole: return true;
    case CtxKind::AppC: return alpha_eq(x->inner, y->inner) && alpha_eq(x->arg, y->arg);
    case CtxKind::SucC: return alpha_eq(x->inner, y->inner);
    case CtxKind::NRecC:
      return type_eq(x->annot, y->annot) && alpha_eq(x->base, y->base) &&
             alpha_eq(x->step, y->step) && alpha_eq(x->inner, y->inner);
  }
  return false;
}

inline void canon_key(const CtxPtr& e, std::string& out) {
  switch (e->kind) {
    case CtxKind::Hole: out += '_'; return;
    case CtxKind::AppC:
      out += '(';
      canon_key(e->inner, out);
      out += ' ';
      canon_key(e->arg, out);
      out += ')';
      return;
    case CtxKind::SucC:
      out += 'S';
      canon_key(e->inner, out);
      return;
    case CtxKind::NRecC:
      out += 'R' + type_key(e->annot) + '{';
      canon_key(e->base, out);
      out += ';';
      canon_key(e->step, out);
      out += ';';
      canon_key(e->inner, out);
      out += '}';
      return;
  }
}

// The type of E[t] given t : rho, read off the context's shape. For an app
// frame whose inner type is not an arrow (only possible on ill-typed raw
// terms) the type is kept unchanged.
inline TypePtr annot_after(const TypePtr& rho, const CtxPtr& e) {
  switch (e->kind) {
    case CtxKind::Hole: return rho;
    case CtxKind::AppC: {
      TypePtr inner = annot_after(rho, e->inner);
      return inner->kind == Type::Kind::Arrow ? inner->cod : inner;
    }
    case CtxKind::SucC: return nat_type();
    case CtxKind::NRecC: return e->annot;
  }
  return rho;
}

// Spine decomposition: the unique E and head with t == E[head], where the
// head is not an App/Suc/NRec node. A decomposition t == E[mu a.c] exists
// iff the head is a Mu.
inline std::pair<CtxPtr, TermPtr> decompose(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::App: {
      auto [e, h] = decompose(t->a);
      return {app_ctx(std::move(e), t->b), h};
    }
    case TermKind::Suc: {
      auto [e, h] = decompose(t->a);
      return {suc_ctx(std::move(e)), h};
    }
    case TermKind::NRec: {
      auto [e, h] = decompose(t->c);
      return {nrec_ctx(t->annot, t->a, t->b, std::move(e)), h};
    }
    default: return {hole(), t};
  }
}

inline bool has_mu_head(const TermPtr& t) {
  const Term* cur = t.get();
  while (true) {
    switch (cur->kind) {
      case TermKind::App:
      case TermKind::Suc: cur = cur->a.get(); break;
      case TermKind::NRec: cur = cur->c.get(); break;
      case TermKind::Mu: return true;
      default: return false;
    }
  }
}

}  // namespace lmt
