#pragma once

// Syntax-directed type inference for terms, commands and evaluation
// contexts. Annotations on Lam/Mu/NRec make types unique, so there is a
// single inference routine rather than a checker/inferrer split. Errors
// carry the path (child indices) of the offending subexpression.

#include <map>
#include <string>
#include <vector>

#include "lmt/context.hpp"
#include "lmt/term.hpp"

namespace lmt {

struct TypeEnv {
  std::map<std::uint64_t, TypePtr> lam;  // Gamma
  std::map<std::uint64_t, TypePtr> mu;   // Delta

  TypeEnv with_lam(std::uint64_t id, TypePtr ty) const {
    TypeEnv out = *this;
    out.lam[id] = std::move(ty);
    return out;
  }
  TypeEnv with_mu(std::uint64_t id, TypePtr ty) const {
    TypeEnv out = *this;
    out.mu[id] = std::move(ty);
    return out;
  }
};

enum class TypeErrorKind {
  UnboundLamVar,
  UnboundMuVar,
  ArrowExpected,
  ArgMismatch,
  NatExpected,
  AnnotMismatch,
  PassivateMismatch,
  HoleTypeMismatch,
};

inline const char* to_string(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::UnboundLamVar: return "UnboundLamVar";
    case TypeErrorKind::UnboundMuVar: return "UnboundMuVar";
    case TypeErrorKind::ArrowExpected: return "ArrowExpected";
    case TypeErrorKind::ArgMismatch: return "ArgMismatch";
    case TypeErrorKind::NatExpected: return "NatExpected";
    case TypeErrorKind::AnnotMismatch: return "AnnotMismatch";
    case TypeErrorKind::PassivateMismatch: return "PassivateMismatch";
    case TypeErrorKind::HoleTypeMismatch: return "HoleTypeMismatch";
  }
  return "TypeError";
}

struct TypeError : std::runtime_error {
  TypeErrorKind kind;
  std::vector<int> path;
  TypeError(TypeErrorKind kind, std::vector<int> path, const std::string& what)
      : std::runtime_error(what), kind(kind), path(std::move(path)) {}
};

namespace detail {

[[noreturn]] inline void type_fail(TypeErrorKind kind, const std::vector<int>& path,
                                   const std::string& msg) {
  std::string where = "at path [";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) where += '.';
    where += std::to_string(path[i]);
  }
  where += "]";
  throw TypeError(kind, path, std::string(to_string(kind)) + " " + where + ": " + msg);
}

inline TypePtr infer_term_at(const TypeEnv& env, const TermPtr& t, std::vector<int>& path);

inline void check_command_at(const TypeEnv& env, const CommandPtr& c, std::vector<int>& path) {
  if (c->tgt_bound()) throw std::logic_error("typing: dangling bound mu target");
  auto it = env.mu.find(c->tgt_id);
  if (it == env.mu.end())
    type_fail(TypeErrorKind::UnboundMuVar, path, "mu-variable not bound in Delta");
  path.push_back(0);
  TypePtr bodyTy = infer_term_at(env, c->term, path);
  path.pop_back();
  if (!type_eq(bodyTy, it->second))
    type_fail(TypeErrorKind::PassivateMismatch, path,
              "command body has type " + type_key(bodyTy) + " but target expects " +
                  type_key(it->second));
}

inline TypePtr infer_term_at(const TypeEnv& env, const TermPtr& t, std::vector<int>& path) {
  switch (t->kind) {
    case TermKind::BVar: throw std::logic_error("typing: dangling bound lambda variable");
    case TermKind::FVar: {
      auto it = env.lam.find(t->id);
      if (it == env.lam.end())
        type_fail(TypeErrorKind::UnboundLamVar, path, "lambda-variable not bound in Gamma");
      return it->second;
    }
    case TermKind::Zero: return nat_type();
    case TermKind::Suc: {
      path.push_back(0);
      TypePtr a = infer_term_at(env, t->a, path);
      if (!is_nat(a)) type_fail(TypeErrorKind::NatExpected, path, "suc argument must have type N");
      path.pop_back();
      return nat_type();
    }
    case TermKind::Lam: {
      OpenedLam o = open_lam_fresh(t);
      TypeEnv inner = env.with_lam(o.id, t->annot);
      path.push_back(0);
      TypePtr bodyTy = infer_term_at(inner, o.body, path);
      path.pop_back();
      return arrow(t->annot, bodyTy);
    }
    case TermKind::App: {
      path.push_back(0);
      TypePtr fnTy = infer_term_at(env, t->a, path);
      if (fnTy->kind != Type::Kind::Arrow)
        type_fail(TypeErrorKind::ArrowExpected, path,
                  "applied term has non-arrow type " + type_key(fnTy));
      path.pop_back();
      path.push_back(1);
      TypePtr argTy = infer_term_at(env, t->b, path);
      if (!type_eq(argTy, fnTy->dom))
        type_fail(TypeErrorKind::ArgMismatch, path,
                  "argument has type " + type_key(argTy) + ", expected " + type_key(fnTy->dom));
      path.pop_back();
      return fnTy->cod;
    }
    case TermKind::Mu: {
      OpenedMu o = open_mu_fresh(t);
      TypeEnv inner = env.with_mu(o.id, t->annot);
      path.push_back(0);
      check_command_at(inner, o.body, path);
      path.pop_back();
      return t->annot;
    }
    case TermKind::NRec: {
      path.push_back(0);
      TypePtr baseTy = infer_term_at(env, t->a, path);
      if (!type_eq(baseTy, t->annot))
        type_fail(TypeErrorKind::AnnotMismatch, path,
                  "nrec base has type " + type_key(baseTy) + ", annotation says " +
                      type_key(t->annot));
      path.pop_back();
      path.push_back(1);
      TypePtr stepTy = infer_term_at(env, t->b, path);
      TypePtr want = arrow(nat_type(), arrow(t->annot, t->annot));
      if (!type_eq(stepTy, want))
        type_fail(TypeErrorKind::AnnotMismatch, path,
                  "nrec step has type " + type_key(stepTy) + ", expected " + type_key(want));
      path.pop_back();
      path.push_back(2);
      TypePtr scrTy = infer_term_at(env, t->c, path);
      if (!is_nat(scrTy))
        type_fail(TypeErrorKind::NatExpected, path, "nrec scrutinee must have type N");
      path.pop_back();
      return t->annot;
    }
  }
  throw std::logic_error("typing: unreachable");
}

}  // namespace detail

// The unique rho with Gamma;Delta |- t : rho.
inline TypePtr infer_term(const TypeEnv& env, const TermPtr& t) {
  std::vector<int> path;
  return detail::infer_term_at(env, t, path);
}

// Succeeds iff Gamma;Delta |- c.
inline void check_command(const TypeEnv& env, const CommandPtr& c) {
  std::vector<int> path;
  detail::check_command_at(env, c, path);
}

// sigma with Gamma;Delta |- E : rho => sigma, so that
// infer_term(env, plug(E, t)) == infer_context(env, E, infer_term(env, t)).
inline TypePtr infer_context(const TypeEnv& env, const CtxPtr& e, const TypePtr& holeType) {
  std::vector<int> path;
  switch (e->kind) {
    case CtxKind::Hole: return holeType;
    case CtxKind::AppC: {
      TypePtr innerTy = infer_context(env, e->inner, holeType);
      if (innerTy->kind != Type::Kind::Arrow)
        detail::type_fail(TypeErrorKind::HoleTypeMismatch, path,
                          "app frame needs an arrow, inner context yields " + type_key(innerTy));
      TypePtr argTy = infer_term(env, e->arg);
      if (!type_eq(argTy, innerTy->dom))
        detail::type_fail(TypeErrorKind::ArgMismatch, path,
                          "context argument has type " + type_key(argTy) + ", expected " +
                              type_key(innerTy->dom));
      return innerTy->cod;
    }
    case CtxKind::SucC: {
      TypePtr innerTy = infer_context(env, e->inner, holeType);
      if (!is_nat(innerTy))
        detail::type_fail(TypeErrorKind::HoleTypeMismatch, path,
                          "suc frame needs N, inner context yields " + type_key(innerTy));
      return nat_type();
    }
    case CtxKind::NRecC: {
      TypePtr baseTy = infer_term(env, e->base);
      if (!type_eq(baseTy, e->annot))
        detail::type_fail(TypeErrorKind::AnnotMismatch, path,
                          "nrec frame base has type " + type_key(baseTy));
      TypePtr stepTy = infer_term(env, e->step);
      TypePtr want = arrow(nat_type(), arrow(e->annot, e->annot));
      if (!type_eq(stepTy, want))
        detail::type_fail(TypeErrorKind::AnnotMismatch, path,
                          "nrec frame step has type " + type_key(stepTy));
      TypePtr innerTy = infer_context(env, e->inner, holeType);
      if (!is_nat(innerTy))
        detail::type_fail(TypeErrorKind::HoleTypeMismatch, path,
                          "nrec frame needs N, inner context yields " + type_key(innerTy));
      return e->annot;
    }
  }
  throw std::logic_error("typing: unreachable context");
}

inline bool well_typed(const TypeEnv& env, const TermPtr& t) {
  try {
    infer_term(env, t);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

}  // namespace lmt
