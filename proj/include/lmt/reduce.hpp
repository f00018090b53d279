#pragma once

// One-step reduction: the eight rules at the root, their compatible closure
// with position labels, strategies and normalization, joinability search,
// the A/B classification, and the catch/throw encodings with their law
// checker.
//
// The three mu-consumption rules (musuc, muR, muN) are implemented directly
// so every step carries a precise rule tag; the unified singular-context
// form is kept as a tested derived law. Enumeration order is fixed
// (pre-order on paths, rule order as declared) so traces are reproducible.

#include <deque>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lmt/context.hpp"
#include "lmt/subst.hpp"
#include "lmt/term.hpp"

namespace lmt {

enum class RuleTag : std::uint8_t { Beta, MuSuc, MuR, MuEta, MuI, NRecZero, NRecSuc, MuNat };

enum class RuleClass : std::uint8_t { A, B };

inline RuleClass classify(RuleTag rule) {
  switch (rule) {
    case RuleTag::MuEta:
    case RuleTag::MuI: return RuleClass::B;
    default: return RuleClass::A;
  }
}

inline const char* to_string(RuleTag rule) {
  switch (rule) {
    case RuleTag::Beta: return "beta";
    case RuleTag::MuSuc: return "musuc";
    case RuleTag::MuR: return "muR";
    case RuleTag::MuEta: return "mueta";
    case RuleTag::MuI: return "mui";
    case RuleTag::NRecZero: return "0";
    case RuleTag::NRecSuc: return "suc";
    case RuleTag::MuNat: return "muN";
  }
  return "?";
}

// suc_prime switches the (suc) rule to the unrestricted variant that fires
// on any scrutinee of shape suc t. It exists only to reproduce the
// non-confluence counterexample and is excluded from every invariant suite.
struct RuleOptions {
  bool suc_prime = false;
};

struct BShrinkViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct StepBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// mu alpha.c consumed by frame E: mu alpha. c[alpha := alpha E], rebinding
// alpha and re-annotating with the frame's result type.
inline TermPtr mu_consume(const TermPtr& muTerm, const CtxPtr& frame) {
  OpenedMu o = open_mu_fresh(muTerm, "a");
  CommandPtr body = subst_struct(o.body, o.id, o.id, o.hint, frame);
  return mu(annot_after(muTerm->annot, frame), close_mu(body, o.id));
}

inline void check_b_shrink(RuleTag rule, std::size_t before, std::size_t after) {
  if (classify(rule) == RuleClass::B && after >= before)
    throw BShrinkViolation("B-step did not shrink the term: rule " +
                           std::string(to_string(rule)) + ", " + std::to_string(before) +
                           " -> " + std::to_string(after));
}

}  // namespace detail

// All rule instances firing at the root of a term. Each node shape admits at
// most one root rule, but the list interface keeps the fixed rule order
// explicit.
inline std::vector<std::pair<RuleTag, TermPtr>> root_step(const TermPtr& t,
                                                          const RuleOptions& opts = {}) {
  std::vector<std::pair<RuleTag, TermPtr>> out;
  switch (t->kind) {
    case TermKind::App: {
      const TermPtr& fn = t->a;
      if (fn->kind == TermKind::Lam) {
        out.emplace_back(RuleTag::Beta, open_lam(fn->a, t->b));
      } else if (fn->kind == TermKind::Mu) {
        out.emplace_back(RuleTag::MuR, detail::mu_consume(fn, app_ctx(hole(), t->b)));
      }
      break;
    }
    case TermKind::Suc: {
      if (t->a->kind == TermKind::Mu)
        out.emplace_back(RuleTag::MuSuc, detail::mu_consume(t->a, suc_ctx(hole())));
      break;
    }
    case TermKind::Mu: {
      // mu a.[a]u -> u provided a not in FCV(u)
      if (t->cmd->tgt_bound() && t->cmd->tgt_index == 0) {
        OpenedMu o = open_mu_fresh(t);
        if (!mu_free_in(o.id, o.body->term)) {
          TermPtr res = o.body->term;
          detail::check_b_shrink(RuleTag::MuEta, term_size(t), term_size(res));
          out.emplace_back(RuleTag::MuEta, res);
        }
      }
      break;
    }
    case TermKind::NRec: {
      const TermPtr& scrut = t->c;
      if (scrut->kind == TermKind::Zero) {
        out.emplace_back(RuleTag::NRecZero, t->a);
      } else if (scrut->kind == TermKind::Suc) {
        // (suc) only fires on a syntactic numeral; the restriction keeps
        // primitive recursion off terms that might reduce to mu a.c.
        bool fires = opts.suc_prime || as_numeral(scrut).has_value();
        if (fires) {
          const TermPtr& pred = scrut->a;
          out.emplace_back(RuleTag::NRecSuc,
                           app(app(t->b, pred), nrec(t->annot, t->a, t->b, pred)));
        }
      } else if (scrut->kind == TermKind::Mu) {
        out.emplace_back(RuleTag::MuNat,
                         detail::mu_consume(scrut, nrec_ctx(t->annot, t->a, t->b, hole())));
      }
      break;
    }
    default: break;
  }
  return out;
}

// Root (mui) on commands: [a]mu b.c -> c[b := a []].
inline std::vector<std::pair<RuleTag, CommandPtr>> root_step(const CommandPtr& c,
                                                             const RuleOptions& = {}) {
  std::vector<std::pair<RuleTag, CommandPtr>> out;
  if (c->term->kind == TermKind::Mu) {
    OpenedMu o = open_mu_fresh(c->term, c->tgt_hint.empty() ? "a" : c->tgt_hint);
    CommandPtr res = rename_mu(o.body, o.id, c->tgt_id, c->tgt_hint);
    detail::check_b_shrink(RuleTag::MuI, term_size(c), term_size(res));
    out.emplace_back(RuleTag::MuI, res);
  }
  return out;
}

// A one-step reduct of a whole expression: the rewrite position, the rule
// that fired there, and the full resulting expression.
struct Redex {
  std::vector<int> path;
  RuleTag rule;
  TermPtr term_result;     // set when the subject is a term
  CommandPtr cmd_result;   // set when the subject is a command
};

namespace detail {

inline void prepend_child(std::vector<Redex>& rs, int child) {
  for (auto& r : rs) r.path.insert(r.path.begin(), child);
}

}  // namespace detail

inline std::vector<Redex> reducts(const TermPtr& t, const RuleOptions& opts = {});

inline std::vector<Redex> reducts(const CommandPtr& c, const RuleOptions& opts = {}) {
  std::vector<Redex> out;
  for (auto& [rule, res] : root_step(c, opts)) out.push_back(Redex{{}, rule, nullptr, res});
  std::vector<Redex> inner = reducts(c->term, opts);
  detail::prepend_child(inner, 0);
  for (auto& r : inner) {
    auto rebuilt = std::make_shared<Command>(*c);
    rebuilt->term = r.term_result;
    out.push_back(Redex{std::move(r.path), r.rule, nullptr, rebuilt});
  }
  return out;
}

inline std::vector<Redex> reducts(const TermPtr& t, const RuleOptions& opts) {
  std::vector<Redex> out;
  for (auto& [rule, res] : root_step(t, opts)) out.push_back(Redex{{}, rule, res, nullptr});

  auto add_child = [&](int child, const TermPtr& sub, auto rebuild) {
    std::vector<Redex> inner = reducts(sub, opts);
    detail::prepend_child(inner, child);
    for (auto& r : inner)
      out.push_back(Redex{std::move(r.path), r.rule, rebuild(r.term_result), nullptr});
  };

  switch (t->kind) {
    case TermKind::Lam: {
      OpenedLam o = open_lam_fresh(t);
      std::vector<Redex> inner = reducts(o.body, opts);
      detail::prepend_child(inner, 0);
      for (auto& r : inner)
        out.push_back(Redex{std::move(r.path), r.rule,
                            lam(t->annot, close_lam(r.term_result, o.id)), nullptr});
      break;
    }
    case TermKind::App:
      add_child(0, t->a, [&](const TermPtr& f) { return app(f, t->b); });
      add_child(1, t->b, [&](const TermPtr& x) { return app(t->a, x); });
      break;
    case TermKind::Mu: {
      OpenedMu o = open_mu_fresh(t);
      std::vector<Redex> inner = reducts(o.body, opts);
      detail::prepend_child(inner, 0);
      for (auto& r : inner)
        out.push_back(Redex{std::move(r.path), r.rule,
                            mu(t->annot, close_mu(r.cmd_result, o.id)), nullptr});
      break;
    }
    case TermKind::Suc:
      add_child(0, t->a, [&](const TermPtr& u) { return suc(u); });
      break;
    case TermKind::NRec:
      add_child(0, t->a, [&](const TermPtr& r) { return nrec(t->annot, r, t->b, t->c); });
      add_child(1, t->b, [&](const TermPtr& s) { return nrec(t->annot, t->a, s, t->c); });
      add_child(2, t->c, [&](const TermPtr& u) { return nrec(t->annot, t->a, t->b, u); });
      break;
    default: break;
  }
  return out;
}

inline bool is_normal(const TermPtr& t, const RuleOptions& opts = {}) {
  return reducts(t, opts).empty();
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

struct Strategy {
  enum class Kind { LeftmostOutermost, Random } kind = Kind::LeftmostOutermost;
  std::uint64_t seed = 0;

  static Strategy leftmost_outermost() { return {}; }
  static Strategy seeded_random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

struct TraceStep {
  std::vector<int> path;
  RuleTag rule;
};

struct NormalizeResult {
  TermPtr term;
  std::vector<TraceStep> trace;
};

constexpr std::size_t kDefaultStepBudget = 100000;

inline NormalizeResult normalize(const TermPtr& start, const Strategy& strategy = {},
                                 std::size_t maxSteps = kDefaultStepBudget,
                                 const RuleOptions& opts = {}) {
  NormalizeResult out{start, {}};
  std::mt19937_64 rng(strategy.seed);
  while (true) {
    std::vector<Redex> rs = reducts(out.term, opts);
    if (rs.empty()) return out;
    if (out.trace.size() >= maxSteps)
      throw StepBudgetExceeded("normalize: no normal form within " + std::to_string(maxSteps) +
                               " steps");
    std::size_t pick = 0;
    if (strategy.kind == Strategy::Kind::Random)
      pick = std::uniform_int_distribution<std::size_t>(0, rs.size() - 1)(rng);
    out.trace.push_back(TraceStep{rs[pick].path, rs[pick].rule});
    out.term = rs[pick].term_result;
  }
}

// Re-run a trace step by step; throws if some step no longer matches.
inline TermPtr replay(const TermPtr& start, const std::vector<TraceStep>& trace,
                      const RuleOptions& opts = {}) {
  TermPtr cur = start;
  for (const TraceStep& step : trace) {
    bool found = false;
    for (const Redex& r : reducts(cur, opts)) {
      if (r.path == step.path && r.rule == step.rule) {
        cur = r.term_result;
        found = true;
        break;
      }
    }
    if (!found) throw std::runtime_error("replay: trace step does not match any redex");
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Joinability search (confluence witness)
// ---------------------------------------------------------------------------

// Breadth-first closure of one-step reducts from a and from b, up to `budget`
// levels; returns a common reduct up to alpha-equality if one appears.
inline std::optional<TermPtr> join_search(const TermPtr& a, const TermPtr& b,
                                          std::size_t budget,
                                          const RuleOptions& opts = {}) {
  std::unordered_map<std::string, TermPtr> seenA{{canon_key(a), a}};
  std::unordered_map<std::string, TermPtr> seenB{{canon_key(b), b}};
  std::vector<TermPtr> frontA{a}, frontB{b};

  auto meet = [&]() -> std::optional<TermPtr> {
    for (const auto& [k, t] : seenA)
      if (seenB.count(k)) return t;
    return std::nullopt;
  };
  if (auto m = meet()) return m;

  auto expand = [&](std::vector<TermPtr>& front, std::unordered_map<std::string, TermPtr>& seen) {
    std::vector<TermPtr> next;
    for (const TermPtr& t : front) {
      for (const Redex& r : reducts(t, opts)) {
        std::string k = canon_key(r.term_result);
        if (seen.emplace(k, r.term_result).second) next.push_back(r.term_result);
      }
    }
    front = std::move(next);
  };

  for (std::size_t level = 0; level < budget; ++level) {
    if (frontA.empty() && frontB.empty()) break;
    expand(frontA, seenA);
    expand(frontB, seenB);
    if (auto m = meet()) return m;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// catch / throw
// ---------------------------------------------------------------------------

// catch_a t == mu a.[a]t; binds the free mu-variable a in t.
inline TermPtr catch_term(const TypePtr& annot, std::uint64_t alpha, const std::string& hint,
                          const TermPtr& t) {
  return mu(annot, close_mu(cmd_free(alpha, hint, t), alpha));
}

// throw t b == mu g.[b]t with g fresh (the binder is simply never referenced).
inline TermPtr throw_term(const TypePtr& annot, const TermPtr& t, std::uint64_t beta,
                          const std::string& hint) {
  return mu(annot, cmd_free(beta, hint, t));
}

struct CatchThrowInstance {
  CtxPtr E;      // surrounding context for clauses 1 and 2
  TermPtr t;     // subject term
  TypePtr annot; // type at which catch/throw wrap t
};

struct CatchThrowViolation {
  int clause;
  std::size_t instance;
  std::string detail;
};

struct CatchThrowReport {
  std::size_t checked = 0;
  std::vector<CatchThrowViolation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool reaches(const TermPtr& from, const TermPtr& to, std::size_t levels,
                    const RuleOptions& opts = {}) {
  std::unordered_set<std::string> seen{canon_key(from)};
  std::string want = canon_key(to);
  if (seen.count(want)) return true;
  std::vector<TermPtr> front{from};
  for (std::size_t i = 0; i < levels && !front.empty(); ++i) {
    std::vector<TermPtr> next;
    for (const TermPtr& t : front)
      for (const Redex& r : reducts(t, opts)) {
        std::string k = canon_key(r.term_result);
        if (k == want) return true;
        if (seen.insert(k).second) next.push_back(r.term_result);
      }
    front = std::move(next);
  }
  return false;
}

inline bool one_step_to(const TermPtr& from, const TermPtr& to, const RuleOptions& opts = {}) {
  for (const Redex& r : reducts(from, opts))
    if (alpha_eq(r.term_result, to)) return true;
  return false;
}

}  // namespace detail

// Verifies the seven catch/throw reduction laws on the supplied instances.
inline CatchThrowReport check_catch_throw_laws(const std::vector<CatchThrowInstance>& instances) {
  CatchThrowReport report;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const CatchThrowInstance& in = instances[i];
    const TypePtr& A = in.annot;
    TypePtr after = annot_after(A, in.E);
    std::uint64_t al = fresh_id(), be = fresh_id(), ga = fresh_id();
    auto fail = [&](int clause, const std::string& detail) {
      report.violations.push_back(CatchThrowViolation{clause, i, detail});
    };
    std::size_t searchLevels = static_cast<std::size_t>(ctx_depth(in.E)) + 3;

    // 1. E[catch_a t] ->> catch_a E[t[a := a E]]
    {
      TermPtr lhs = plug(in.E, catch_term(A, al, "a", in.t));
      TermPtr rhs = catch_term(after, al, "a",
                               plug(in.E, subst_struct(in.t, al, al, "a", in.E)));
      if (!detail::reaches(lhs, rhs, searchLevels)) fail(1, "lift of catch failed");
    }
    // 2. E[throw t a] ->> throw t a
    {
      TermPtr lhs = plug(in.E, throw_term(A, in.t, al, "a"));
      TermPtr rhs = throw_term(after, in.t, al, "a");
      if (!detail::reaches(lhs, rhs, searchLevels)) fail(2, "lift of throw failed");
    }
    // 3. catch_a (catch_b t) -> catch_a (t[b := a []])
    {
      TermPtr lhs = catch_term(A, al, "a", catch_term(A, be, "b", in.t));
      TermPtr rhs = catch_term(A, al, "a", rename_mu(in.t, be, al, "a"));
      if (!detail::one_step_to(lhs, rhs)) fail(3, "catch/catch collapse failed");
    }
    // 4. throw (throw t b) a -> throw t b
    {
      TermPtr lhs = throw_term(A, throw_term(A, in.t, be, "b"), al, "a");
      TermPtr rhs = throw_term(A, in.t, be, "b");
      if (!detail::one_step_to(lhs, rhs)) fail(4, "throw/throw collapse failed");
    }
    // 5. throw (catch_b t) a -> throw (t[b := a []]) a
    {
      TermPtr lhs = throw_term(A, catch_term(A, be, "b", in.t), al, "a");
      TermPtr rhs = throw_term(A, rename_mu(in.t, be, al, "a"), al, "a");
      if (!detail::one_step_to(lhs, rhs)) fail(5, "throw-of-catch failed");
    }
    // 6. catch_a (throw t a) -> catch_a t
    {
      TermPtr lhs = catch_term(A, al, "a", throw_term(A, in.t, al, "a"));
      TermPtr rhs = catch_term(A, al, "a", in.t);
      if (!detail::one_step_to(lhs, rhs)) fail(6, "catch-of-throw failed");
    }
    // 7. catch_a t -> t provided a not in FCV(t)
    {
      if (!mu_free_in(ga, in.t)) {
        TermPtr lhs = catch_term(A, ga, "g", in.t);
        if (!detail::one_step_to(lhs, in.t)) fail(7, "vacuous catch failed");
      }
    }
    ++report.checked;
  }
  return report;
}

}  // namespace lmt
