#pragma once

// Negative translation of types, CPS translation of terms into the mu-free
// fragment, and the representability construction with bottom = N. The
// translation consumes well-typed input (it threads source types to place
// the continuation annotations) and only ever compares normal forms or
// types; it is not reduction preserving.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lmt/term.hpp"
#include "lmt/typing.hpp"

namespace lmt {

struct CpsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnmappedMuVar : CpsError {
  using CpsError::CpsError;
};
struct NonLambdaT : CpsError {
  using CpsError::CpsError;
};
struct NotClosed : CpsError {
  using CpsError::CpsError;
};
struct ArityMismatch : CpsError {
  using CpsError::CpsError;
};

// not rho == rho -> bottom
inline TypePtr neg_type(const TypePtr& rho, const TypePtr& bottom) { return arrow(rho, bottom); }

inline TypePtr cps_type(const TypePtr& rho, const TypePtr& bottom);

// N~ == N, (sigma -> tau)~ == sigma* -> tau*
inline TypePtr cps_type_tilde(const TypePtr& rho, const TypePtr& bottom) {
  if (rho->kind == Type::Kind::Nat) return nat_type();
  return arrow(cps_type(rho->dom, bottom), cps_type(rho->cod, bottom));
}

// rho* == not not rho~
inline TypePtr cps_type(const TypePtr& rho, const TypePtr& bottom) {
  return neg_type(neg_type(cps_type_tilde(rho, bottom), bottom), bottom);
}

// t@r == \k. t (\l. l r k), for t : (sigma->tau)*, r : sigma*.
inline TermPtr cps_app(const TermPtr& t, const TermPtr& r, const TypePtr& sigma,
                       const TypePtr& tau, const TypePtr& bottom) {
  std::uint64_t k = fresh_id(), l = fresh_id();
  TermPtr inner = app(app(fvar(l, "l"), r), fvar(k, "k"));
  TermPtr lamL = lam(cps_type_tilde(arrow(sigma, tau), bottom), close_lam(inner, l));
  return lam(neg_type(cps_type_tilde(tau, bottom), bottom), close_lam(app(t, lamL), k));
}

// the negative of t: \k. k t, for t : N.
inline TermPtr natneg(const TermPtr& t, const TypePtr& bottom) {
  std::uint64_t k = fresh_id();
  return lam(neg_type(nat_type(), bottom), close_lam(app(fvar(k, "k"), t), k));
}

// Continuation variables: mu-variable id -> (lambda id, hint) of k_alpha.
using ContVarMap = std::map<std::uint64_t, std::pair<std::uint64_t, std::string>>;

namespace detail {

struct CpsResult {
  TermPtr term;
  TypePtr srcType;
};

inline CpsResult cps_term_at(const TypeEnv& env, const TermPtr& t, ContVarMap& conts,
                             const TypePtr& bottom) {
  switch (t->kind) {
    case TermKind::BVar: throw std::logic_error("cps: dangling bound variable");
    case TermKind::FVar: {
      TypePtr rho = infer_term(env, t);
      std::uint64_t k = fresh_id();
      TermPtr body = app(t, fvar(k, "k"));
      return {lam(neg_type(cps_type_tilde(rho, bottom), bottom), close_lam(body, k)), rho};
    }
    case TermKind::Zero: return {natneg(zero(), bottom), nat_type()};
    case TermKind::Suc: {
      CpsResult arg = cps_term_at(env, t->a, conts, bottom);
      std::uint64_t k = fresh_id(), l = fresh_id();
      TermPtr lamL = lam(nat_type(), close_lam(app(fvar(k, "k"), suc(fvar(l, "l"))), l));
      TermPtr body = app(arg.term, lamL);
      return {lam(neg_type(nat_type(), bottom), close_lam(body, k)), nat_type()};
    }
    case TermKind::Lam: {
      OpenedLam o = open_lam_fresh(t);
      CpsResult body = cps_term_at(env.with_lam(o.id, t->annot), o.body, conts, bottom);
      TypePtr src = arrow(t->annot, body.srcType);
      TermPtr inner = lam(cps_type(t->annot, bottom), close_lam(body.term, o.id));
      std::uint64_t k = fresh_id();
      TermPtr wrapped = app(fvar(k, "k"), inner);
      return {lam(neg_type(cps_type_tilde(src, bottom), bottom), close_lam(wrapped, k)), src};
    }
    case TermKind::App: {
      CpsResult fn = cps_term_at(env, t->a, conts, bottom);
      CpsResult arg = cps_term_at(env, t->b, conts, bottom);
      if (fn.srcType->kind != Type::Kind::Arrow)
        throw std::logic_error("cps: application of non-arrow (ill-typed input)");
      return {cps_app(fn.term, arg.term, fn.srcType->dom, fn.srcType->cod, bottom),
              fn.srcType->cod};
    }
    case TermKind::NRec: {
      CpsResult base = cps_term_at(env, t->a, conts, bottom);
      CpsResult step = cps_term_at(env, t->b, conts, bottom);
      CpsResult scr = cps_term_at(env, t->c, conts, bottom);
      const TypePtr& rho = t->annot;
      // s' == \x p. (s*@negx)@p
      std::uint64_t x = fresh_id(), p = fresh_id();
      TermPtr sx = cps_app(step.term, natneg(fvar(x, "x"), bottom), nat_type(),
                           arrow(rho, rho), bottom);
      TermPtr sxp = cps_app(sx, fvar(p, "p"), rho, rho, bottom);
      TermPtr sPrime = lam(nat_type(), close_lam(lam(cps_type(rho, bottom), close_lam(sxp, p)), x));
      // \k. t* (\l. nrec r* s' l k)
      std::uint64_t k = fresh_id(), l = fresh_id();
      TermPtr rec = nrec(cps_type(rho, bottom), base.term, sPrime, fvar(l, "l"));
      TermPtr lamL = lam(nat_type(), close_lam(app(rec, fvar(k, "k")), l));
      TermPtr body = app(scr.term, lamL);
      return {lam(neg_type(cps_type_tilde(rho, bottom), bottom), close_lam(body, k)), rho};
    }
    case TermKind::Mu: {
      OpenedMu o = open_mu_fresh(t, "a");
      std::uint64_t k = fresh_id();
      std::string kHint = "k" + o.hint;
      conts[o.id] = {k, kHint};
      // c* for the opened command: ([a]t)* == t* k_a
      const CommandPtr& c = o.body;
      if (c->tgt_bound()) throw std::logic_error("cps: dangling bound mu target");
      CpsResult body = cps_term_at(env, c->term, conts, bottom);
      auto it = conts.find(c->tgt_id);
      if (it == conts.end())
        throw UnmappedMuVar("cps: free mu-variable without continuation mapping");
      TermPtr translatedCmd = app(body.term, fvar(it->second.first, it->second.second));
      conts.erase(o.id);
      return {lam(neg_type(cps_type_tilde(t->annot, bottom), bottom),
                  close_lam(translatedCmd, k)),
              t->annot};
    }
  }
  throw std::logic_error("cps: unreachable");
}

}  // namespace detail

// CPS translation of a term; every free mu-variable must be in conts.
inline TermPtr cps_term(const TermPtr& t, ContVarMap conts = {},
                        const TypePtr& bottom = nat_type(), const TypeEnv& env = {}) {
  return detail::cps_term_at(env, t, conts, bottom).term;
}

// CPS translation of a command: ([a]t)* == t* k_a.
inline TermPtr cps_term(const CommandPtr& c, ContVarMap conts = {},
                        const TypePtr& bottom = nat_type(), const TypeEnv& env = {}) {
  if (c->tgt_bound()) throw std::logic_error("cps: dangling bound mu target");
  auto it = conts.find(c->tgt_id);
  if (it == conts.end()) throw UnmappedMuVar("cps: free mu-variable without continuation mapping");
  detail::CpsResult body = detail::cps_term_at(env, c->term, conts, bottom);
  return app(body.term, fvar(it->second.first, it->second.second));
}

// ---------------------------------------------------------------------------
// lambda-T normalization (the target-side evaluator)
// ---------------------------------------------------------------------------

namespace detail {

// Leftmost-outermost one-step of the lambda-T rules: beta, nrec 0, and the
// unrestricted (suc) rule that fires on any scrutinee suc t.
inline TermPtr lt_step(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::BVar:
    case TermKind::FVar:
    case TermKind::Zero: return nullptr;
    case TermKind::Mu: throw NonLambdaT("lambda-T evaluator hit a mu binder");
    case TermKind::Lam: {
      OpenedLam o = open_lam_fresh(t);
      if (TermPtr b = lt_step(o.body)) return lam(t->annot, close_lam(b, o.id));
      return nullptr;
    }
    case TermKind::Suc: {
      if (TermPtr a = lt_step(t->a)) return suc(a);
      return nullptr;
    }
    case TermKind::App: {
      if (t->a->kind == TermKind::Lam) return open_lam(t->a->a, t->b);
      if (TermPtr f = lt_step(t->a)) return app(f, t->b);
      if (TermPtr x = lt_step(t->b)) return app(t->a, x);
      return nullptr;
    }
    case TermKind::NRec: {
      if (t->c->kind == TermKind::Zero) return t->a;
      if (t->c->kind == TermKind::Suc)
        return app(app(t->b, t->c->a), nrec(t->annot, t->a, t->b, t->c->a));
      if (TermPtr r = lt_step(t->a)) return nrec(t->annot, r, t->b, t->c);
      if (TermPtr s = lt_step(t->b)) return nrec(t->annot, t->a, s, t->c);
      if (TermPtr u = lt_step(t->c)) return nrec(t->annot, t->a, t->b, u);
      return nullptr;
    }
  }
  return nullptr;
}

}  // namespace detail

inline TermPtr lt_normalize(const TermPtr& t, std::size_t maxSteps = 1000000) {
  if (contains_mu(t)) throw NonLambdaT("lt_normalize: input contains a mu binder");
  TermPtr cur = t;
  for (std::size_t i = 0; i < maxSteps; ++i) {
    TermPtr next = detail::lt_step(cur);
    if (!next) return cur;
    cur = next;
  }
  throw StepBudgetExceeded("lt_normalize: no normal form within " + std::to_string(maxSteps) +
                           " steps");
}

// ---------------------------------------------------------------------------
// Representability: a closed t : N^n -> N becomes the mu-free
// t' == \x1...\xn. (t*@negx1@...@negxn)(\x:N.x), with bottom = N.
// ---------------------------------------------------------------------------

inline TermPtr represent(const TermPtr& t, std::size_t arity) {
  VarSets fv = free_vars(t);
  if (!fv.lam.empty() || !fv.mu.empty()) throw NotClosed("represent: term is not closed");
  TypePtr ty = infer_term({}, t);
  TypePtr walk = ty;
  for (std::size_t i = 0; i < arity; ++i) {
    if (walk->kind != Type::Kind::Arrow || !is_nat(walk->dom))
      throw ArityMismatch("represent: type is not N^n -> N at the given arity");
    walk = walk->cod;
  }
  if (!is_nat(walk)) throw ArityMismatch("represent: result type is not N");

  TypePtr bottom = nat_type();
  TermPtr acc = cps_term(t, {}, bottom);
  TypePtr src = ty;
  std::vector<std::uint64_t> xs;
  for (std::size_t i = 0; i < arity; ++i) {
    std::uint64_t x = fresh_id();
    xs.push_back(x);
    acc = cps_app(acc, natneg(fvar(x, "x"), bottom), src->dom, src->cod, bottom);
    src = src->cod;
  }
  std::uint64_t v = fresh_id();
  TermPtr idN = lam(nat_type(), close_lam(fvar(v, "v"), v));
  acc = app(acc, idN);
  for (auto it = xs.rbegin(); it != xs.rend(); ++it)
    acc = lam(nat_type(), close_lam(acc, *it));
  return acc;
}

}  // namespace lmt
