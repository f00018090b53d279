#pragma once

// Capture-avoiding lambda substitution t[x := r] and the generalized
// structural substitution t[a := b E], which rewrites every command [a]q
// into [b]E[q'] and is homomorphic elsewhere. With locally nameless syntax
// both are plain walks: bound variables are indices, replacements are
// locally closed, so capture cannot occur.

#include "lmt/context.hpp"
#include "lmt/term.hpp"

namespace lmt {

namespace detail {

struct LamSubst : Rewriter {
  std::uint64_t id;
  const TermPtr& replacement;
  LamSubst(std::uint64_t id, const TermPtr& replacement) : id(id), replacement(replacement) {}
  TermPtr on_fvar(std::uint64_t vid, int) override { return vid == id ? replacement : nullptr; }
};

struct StructSubst : Rewriter {
  std::uint64_t from;
  std::uint64_t to;
  const std::string& toHint;
  const CtxPtr& ctx;
  StructSubst(std::uint64_t from, std::uint64_t to, const std::string& toHint, const CtxPtr& ctx)
      : from(from), to(to), toHint(toHint), ctx(ctx) {}
  CommandPtr on_command(const Command& orig, const TermPtr& body, int, int) override {
    if (!orig.tgt_bound() && orig.tgt_id == from) return cmd_free(to, toHint, plug(ctx, body));
    return nullptr;
  }
};

}  // namespace detail

template <class Expr>
inline Expr subst_lam(const Expr& e, std::uint64_t x, const TermPtr& r) {
  detail::LamSubst rw{x, r};
  return rewrite(e, rw);
}

// t[alpha := beta E]
template <class Expr>
inline Expr subst_struct(const Expr& e, std::uint64_t alpha, std::uint64_t beta,
                         const std::string& betaHint, const CtxPtr& ctx) {
  detail::StructSubst rw{alpha, beta, betaHint, ctx};
  return rewrite(e, rw);
}

// t[alpha := beta []], i.e. renaming of a free mu-variable.
template <class Expr>
inline Expr rename_mu(const Expr& e, std::uint64_t alpha, std::uint64_t beta,
                      const std::string& betaHint) {
  return subst_struct(e, alpha, beta, betaHint, hole());
}

// Structural substitution applied to a context's term components.
inline CtxPtr subst_struct_ctx(const CtxPtr& e, std::uint64_t alpha, std::uint64_t beta,
                               const std::string& betaHint, const CtxPtr& ctx) {
  switch (e->kind) {
    case CtxKind::Hole: return e;
    case CtxKind::AppC:
      return app_ctx(subst_struct_ctx(e->inner, alpha, beta, betaHint, ctx),
                     subst_struct(e->arg, alpha, beta, betaHint, ctx));
    case CtxKind::SucC: return suc_ctx(subst_struct_ctx(e->inner, alpha, beta, betaHint, ctx));
    case CtxKind::NRecC:
      return nrec_ctx(e->annot, subst_struct(e->base, alpha, beta, betaHint, ctx),
                      subst_struct(e->step, alpha, beta, betaHint, ctx),
                      subst_struct_ctx(e->inner, alpha, beta, betaHint, ctx));
  }
  return e;
}

}  // namespace lmt
