#pragma once

// Random well-typed term generation and the independent oracles behind the
// property suites: exhaustive normal-form search, longest A-reduction
// length, and the B-then-A postponement check.
//
// Generation is type-directed: a typing derivation is grown and the term
// extracted, which is the only tractable way to hit mu/nrec interactions.
// Oracle budgets count explored states; hitting a budget raises, it never
// silently passes.

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lmt/reduce.hpp"
#include "lmt/subst.hpp"
#include "lmt/term.hpp"
#include "lmt/typing.hpp"

namespace lmt {

struct GenerationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenConfig {
  std::uint64_t seed = 0;
  int maxNodes = 40;
  int arrowDepth = 2;
  int muBudget = 3;
  bool closedOnly = true;
  TypePtr targetType;  // null: any sampled type
};

namespace detail {

class TermGen {
 public:
  TermGen(const GenConfig& cfg, const TypeEnv& env) : cfg_(cfg), env_(env), rng_(cfg.seed) {}

  TermPtr run() {
    for (int attempt = 0; attempt < 64; ++attempt) {
      TypePtr target = cfg_.targetType ? cfg_.targetType : sample_type(cfg_.arrowDepth);
      if (min_size(target) > cfg_.maxNodes) continue;
      budget_ = cfg_.maxNodes;
      muLeft_ = cfg_.muBudget;
      scopeLam_.clear();
      scopeMu_.clear();
      if (!cfg_.closedOnly) {
        for (const auto& [id, ty] : env_.lam) scopeLam_.push_back({id, ty});
        for (const auto& [id, ty] : env_.mu) scopeMu_.push_back({id, ty});
      }
      try {
        TermPtr t = gen(target, 0);
        if (static_cast<int>(term_size(t)) <= cfg_.maxNodes) return t;
      } catch (const GenerationFailed&) {
      }
    }
    throw GenerationFailed("gen_typed: budget cannot realize the target type");
  }

 private:
  struct Binding {
    std::uint64_t id;
    TypePtr ty;
  };

  const GenConfig& cfg_;
  const TypeEnv& env_;
  std::mt19937_64 rng_;
  int budget_ = 0;
  int muLeft_ = 0;
  std::vector<Binding> scopeLam_;
  std::vector<Binding> scopeMu_;

  std::size_t roll(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  bool chance(int percent) { return static_cast<int>(roll(100)) < percent; }

  TypePtr sample_type(int depth) {
    if (depth > 0 && chance(30)) return arrow(sample_type(depth - 1), sample_type(depth - 1));
    return nat_type();
  }

  static int min_size(const TypePtr& ty) {
    return ty->kind == Type::Kind::Nat ? 1 : 1 + min_size(ty->cod);
  }

  static TermPtr minimal(const TypePtr& ty) {
    if (ty->kind == Type::Kind::Nat) return zero();
    return lam(ty->dom, minimal(ty->cod));
  }

  void spend(int n) {
    if (budget_ < n) throw GenerationFailed("out of node budget");
    budget_ -= n;
  }

  std::vector<const Binding*> vars_of(const TypePtr& ty) {
    std::vector<const Binding*> out;
    for (const Binding& b : scopeLam_)
      if (type_eq(b.ty, ty)) out.push_back(&b);
    return out;
  }

  TermPtr gen(const TypePtr& ty, int depth) {
    // When the budget runs low, bail out to the cheapest inhabitant.
    if (budget_ <= min_size(ty) + 1 || depth > 12) return leaf(ty);

    enum Choice { CVar, CZeroOrNum, CSuc, CLam, CApp, CMu, CNRec };
    std::vector<std::pair<Choice, int>> weighted;
    if (!vars_of(ty).empty()) weighted.push_back({CVar, 22});
    if (ty->kind == Type::Kind::Nat) {
      weighted.push_back({CZeroOrNum, 12});
      weighted.push_back({CSuc, 14});
    } else {
      weighted.push_back({CLam, 30});
    }
    weighted.push_back({CApp, 16});
    if (muLeft_ > 0) weighted.push_back({CMu, 22});
    weighted.push_back({CNRec, 12});

    int total = 0;
    for (auto& [c, w] : weighted) total += w;
    int pick = static_cast<int>(roll(static_cast<std::size_t>(total)));
    Choice choice = weighted.front().first;
    for (auto& [c, w] : weighted) {
      if (pick < w) {
        choice = c;
        break;
      }
      pick -= w;
    }

    switch (choice) {
      case CVar: {
        auto vs = vars_of(ty);
        spend(1);
        const Binding* b = vs[roll(vs.size())];
        return fvar(b->id, "x");
      }
      case CZeroOrNum: {
        int n = static_cast<int>(roll(5));
        spend(n + 1);
        return numeral(static_cast<std::uint64_t>(n));
      }
      case CSuc: {
        spend(1);
        return suc(gen(nat_type(), depth + 1));
      }
      case CLam: {
        spend(1);
        std::uint64_t x = fresh_id();
        scopeLam_.push_back({x, ty->dom});
        TermPtr body = gen(ty->cod, depth + 1);
        scopeLam_.pop_back();
        return lam(ty->dom, close_lam(body, x));
      }
      case CApp: {
        spend(1);
        TypePtr sigma = sample_type(std::max(0, cfg_.arrowDepth - 1));
        TermPtr fn = gen(arrow(sigma, ty), depth + 1);
        TermPtr arg = gen(sigma, depth + 1);
        return app(fn, arg);
      }
      case CMu: {
        spend(2);
        --muLeft_;
        std::uint64_t a = fresh_id();
        scopeMu_.push_back({a, ty});
        // Bias towards the innermost binder so jumps stay likely.
        const Binding& tgt =
            chance(70) ? scopeMu_.back() : scopeMu_[roll(scopeMu_.size())];
        TermPtr body = gen(tgt.ty, depth + 1);
        scopeMu_.pop_back();
        return mu(ty, close_mu(cmd_free(tgt.id, "a", body), a));
      }
      case CNRec: {
        spend(1);
        TermPtr base = gen(ty, depth + 1);
        TermPtr step = gen(arrow(nat_type(), arrow(ty, ty)), depth + 1);
        TermPtr scrut = gen(nat_type(), depth + 1);
        return nrec(ty, base, step, scrut);
      }
    }
    return leaf(ty);
  }

  TermPtr leaf(const TypePtr& ty) {
    auto vs = vars_of(ty);
    if (!vs.empty() && chance(60)) {
      spend(1);
      return fvar(vs[roll(vs.size())]->id, "x");
    }
    spend(min_size(ty));
    return minimal(ty);
  }
};

}  // namespace detail

// A term t with infer_term(env, t) defined; deterministic in cfg.seed.
inline TermPtr gen_typed(const GenConfig& cfg, const TypeEnv& env = {}) {
  detail::TermGen g(cfg, env);
  return g.run();
}

// ---------------------------------------------------------------------------
// Exhaustive normal-form oracle
// ---------------------------------------------------------------------------

// Breadth-first closure of reducts up to `budget` explored states; the set
// of normal forms reached, deduplicated up to alpha-equality.
inline std::vector<TermPtr> oracle_normal_forms(const TermPtr& t, std::size_t budget = 10000,
                                                const RuleOptions& opts = {}) {
  std::unordered_set<std::string> seen{canon_key(t)};
  std::deque<TermPtr> queue{t};
  std::vector<TermPtr> normals;
  std::unordered_set<std::string> normalKeys;
  std::size_t explored = 0;
  while (!queue.empty()) {
    if (++explored > budget)
      throw OracleBudgetExceeded("oracle_normal_forms: frontier nonempty at cutoff");
    TermPtr cur = queue.front();
    queue.pop_front();
    std::vector<Redex> rs = reducts(cur, opts);
    if (rs.empty()) {
      if (normalKeys.insert(canon_key(cur)).second) normals.push_back(cur);
      continue;
    }
    for (const Redex& r : rs)
      if (seen.insert(canon_key(r.term_result)).second) queue.push_back(r.term_result);
  }
  return normals;
}

// ---------------------------------------------------------------------------
// Longest A-only reduction length (the paper's ||t|| bound, by search)
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t longest_a(const TermPtr& t, std::unordered_map<std::string, std::size_t>& memo,
                             std::unordered_set<std::string>& onPath, std::size_t budget,
                             std::size_t& explored) {
  std::string key = canon_key(t);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  if (onPath.count(key))
    throw OracleBudgetExceeded("max_reduction_length: cycle (input not strongly normalizing)");
  if (++explored > budget) throw OracleBudgetExceeded("max_reduction_length: budget exhausted");
  onPath.insert(key);
  std::size_t best = 0;
  for (const Redex& r : reducts(t)) {
    if (classify(r.rule) != RuleClass::A) continue;
    best = std::max(best, 1 + longest_a(r.term_result, memo, onPath, budget, explored));
  }
  onPath.erase(key);
  memo[key] = best;
  return best;
}

}  // namespace detail

inline std::size_t max_reduction_length(const TermPtr& t, std::size_t budget = 10000) {
  std::unordered_map<std::string, std::size_t> memo;
  std::unordered_set<std::string> onPath;
  std::size_t explored = 0;
  return detail::longest_a(t, memo, onPath, budget, explored);
}

// ---------------------------------------------------------------------------
// Postponement: every B-then-A pair from t can be advanced
// ---------------------------------------------------------------------------

struct PostponeReport {
  std::size_t pairs_checked = 0;
  std::size_t advanced = 0;
  std::size_t budget_exhausted = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

namespace detail {

// Node-budget bounded reachability t ->>_{AB} goal.
inline bool reaches_within(const TermPtr& from, const std::string& goalKey, std::size_t budget,
                           bool& hitBudget) {
  std::unordered_set<std::string> seen{canon_key(from)};
  if (seen.count(goalKey)) return true;
  std::deque<TermPtr> queue{from};
  std::size_t explored = 0;
  while (!queue.empty()) {
    if (++explored > budget) {
      hitBudget = true;
      return false;
    }
    TermPtr cur = queue.front();
    queue.pop_front();
    for (const Redex& r : reducts(cur)) {
      std::string k = canon_key(r.term_result);
      if (k == goalKey) return true;
      if (seen.insert(k).second) queue.push_back(r.term_result);
    }
  }
  return false;
}

}  // namespace detail

// For every pair t1 ->B t2 ->A t3, look for t4 with t1 ->A t4 ->>AB t3.
inline PostponeReport postpone_check(const TermPtr& t1, std::size_t budget = 1000) {
  PostponeReport report;
  std::vector<Redex> rs1 = reducts(t1);
  std::vector<TermPtr> aReducts;
  for (const Redex& r : rs1)
    if (classify(r.rule) == RuleClass::A) aReducts.push_back(r.term_result);
  for (const Redex& rB : rs1) {
    if (classify(rB.rule) != RuleClass::B) continue;
    for (const Redex& rA : reducts(rB.term_result)) {
      if (classify(rA.rule) != RuleClass::A) continue;
      ++report.pairs_checked;
      std::string goal = canon_key(rA.term_result);
      bool found = false;
      bool hitBudget = false;
      for (const TermPtr& t4 : aReducts) {
        if (detail::reaches_within(t4, goal, budget, hitBudget)) {
          found = true;
          break;
        }
      }
      if (found) {
        ++report.advanced;
      } else if (hitBudget) {
        ++report.budget_exhausted;
      } else {
        report.failures.push_back("pair " + std::string(to_string(rB.rule)) + " then " +
                                  to_string(rA.rule) + " cannot be advanced from " +
                                  canon_key(t1));
      }
    }
  }
  return report;
}

}  // namespace lmt
