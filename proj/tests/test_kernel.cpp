#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lmt/context.hpp"
#include "lmt/subst.hpp"
#include "lmt/term.hpp"

using namespace lmt;

namespace {

TermPtr lam1(const char* hint, const TypePtr& ty, TermPtr (*mk)(const TermPtr&)) {
  std::uint64_t x = fresh_id();
  return lam(ty, close_lam(mk(fvar(x, hint)), x));
}

TermPtr identity_nat() {
  std::uint64_t x = fresh_id();
  return lam(nat_type(), close_lam(fvar(x, "x"), x));
}

}  // namespace

TEST_CASE("numerals") {
  CHECK(alpha_eq(numeral(0), zero()));
  CHECK(alpha_eq(numeral(1), suc(zero())));
  CHECK(alpha_eq(numeral(3), suc(suc(suc(zero())))));

  CHECK(as_numeral(suc(zero())) == 1);
  CHECK(as_numeral(zero()) == 0);
  std::uint64_t a = fresh_id();
  TermPtr notNum = suc(mu(nat_type(), close_mu(cmd_free(a, "a", zero()), a)));
  CHECK_FALSE(as_numeral(notNum).has_value());

  for (std::uint64_t n : {0ull, 1ull, 7ull, 100ull, 10000ull}) CHECK(as_numeral(numeral(n)) == n);

  VarSets fv = free_vars(numeral(9));
  CHECK(fv.lam.empty());
  CHECK(fv.mu.empty());
}

TEST_CASE("values") {
  CHECK(is_value(identity_nat()));
  CHECK(is_value(suc(suc(zero()))));
  std::uint64_t a = fresh_id();
  CHECK_FALSE(is_value(mu(nat_type(), close_mu(cmd_free(a, "a", zero()), a))));
  CHECK_FALSE(is_value(suc(fvar(fresh_id(), "x"))));
  CHECK_FALSE(is_value(app(identity_nat(), zero())));
}

TEST_CASE("free variables") {
  std::uint64_t x = fresh_id(), y = fresh_id(), a = fresh_id();

  // [a]x has free vars ({x}, {a})
  CommandPtr c = cmd_free(a, "a", fvar(x, "x"));
  VarSets fv = free_vars(c);
  CHECK(fv.lam == std::set<std::uint64_t>{x});
  CHECK(fv.mu == std::set<std::uint64_t>{a});

  // mu a.[a]0 is closed
  TermPtr t = mu(nat_type(), close_mu(cmd_free(a, "a", zero()), a));
  fv = free_vars(t);
  CHECK(fv.lam.empty());
  CHECK(fv.mu.empty());

  // \x:N. x y frees only y
  TermPtr body = app(fvar(x, "x"), fvar(y, "y"));
  TermPtr l = lam(nat_type(), close_lam(body, x));
  fv = free_vars(l);
  CHECK(fv.lam == std::set<std::uint64_t>{y});
  CHECK(fv.mu.empty());
}

TEST_CASE("alpha equality") {
  std::uint64_t x = fresh_id(), y = fresh_id(), a = fresh_id(), b = fresh_id();

  TermPtr lx = lam(nat_type(), close_lam(fvar(x, "x"), x));
  TermPtr ly = lam(nat_type(), close_lam(fvar(y, "y"), y));
  CHECK(alpha_eq(lx, ly));

  TermPtr ma = mu(nat_type(), close_mu(cmd_free(a, "a", zero()), a));
  TermPtr mb = mu(nat_type(), close_mu(cmd_free(b, "b", zero()), b));
  CHECK(alpha_eq(ma, mb));

  // free names are significant
  CHECK_FALSE(alpha_eq(fvar(x, "x"), fvar(y, "y")));

  // annotations are significant
  TermPtr lx2 = lam(arrow(nat_type(), nat_type()), close_lam(fvar(x, "x"), x));
  CHECK_FALSE(alpha_eq(lx, lx2));
}

TEST_CASE("plug") {
  std::uint64_t r = fresh_id(), s = fresh_id();
  TermPtr rT = fvar(r, "r"), sT = fvar(s, "s");

  CHECK(alpha_eq(plug(hole(), zero()), zero()));
  CHECK(alpha_eq(plug(app_ctx(hole(), rT), sT), app(sT, rT)));
  // plug(nrec r s (suc []), 0) = nrec r s (suc 0)
  CtxPtr e = nrec_ctx(nat_type(), rT, sT, suc_ctx(hole()));
  CHECK(alpha_eq(plug(e, zero()), nrec(nat_type(), rT, sT, suc(zero()))));
}

TEST_CASE("compose") {
  std::uint64_t s = fresh_id();
  TermPtr sT = fvar(s, "s");
  CtxPtr f = suc_ctx(hole());

  CHECK(alpha_eq(compose(hole(), f), f));
  // ([] s)(suc []) = (suc []) s
  CHECK(alpha_eq(compose(app_ctx(hole(), sT), f), app_ctx(suc_ctx(hole()), sT)));
  CtxPtr e = nrec_ctx(nat_type(), zero(), sT, app_ctx(hole(), sT));
  CHECK(alpha_eq(compose(e, hole()), e));
}

namespace {

// Tiny structural random generators for raw (possibly ill-typed) material.
struct RawGen {
  std::mt19937_64 rng;
  std::vector<std::uint64_t> lams, mus;

  explicit RawGen(std::uint64_t seed) : rng(seed) {
    for (int i = 0; i < 3; ++i) lams.push_back(fresh_id());
    for (int i = 0; i < 3; ++i) mus.push_back(fresh_id());
  }

  std::size_t roll(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }

  TypePtr type(int d = 1) {
    if (d > 0 && roll(3) == 0) return arrow(type(d - 1), type(d - 1));
    return nat_type();
  }

  TermPtr term(int size) {
    if (size <= 1) {
      switch (roll(3)) {
        case 0: return zero();
        case 1: return fvar(lams[roll(lams.size())], "x");
        default: return numeral(roll(3));
      }
    }
    switch (roll(6)) {
      case 0: return suc(term(size - 1));
      case 1: return app(term(size / 2), term(size / 2));
      case 2: {
        std::uint64_t x = fresh_id();
        lams.push_back(x);
        TermPtr b = term(size - 1);
        lams.pop_back();
        return lam(type(), close_lam(b, x));
      }
      case 3: {
        std::uint64_t a = fresh_id();
        mus.push_back(a);
        CommandPtr c = command(size - 1);
        mus.pop_back();
        return mu(type(), close_mu(c, a));
      }
      case 4: return nrec(type(), term(size / 3), term(size / 3), term(size / 3));
      default: return term(1);
    }
  }

  CommandPtr command(int size) { return cmd_free(mus[roll(mus.size())], "a", term(size)); }

  CtxPtr ctx(int depth) {
    if (depth <= 0) return hole();
    switch (roll(3)) {
      case 0: return app_ctx(ctx(depth - 1), term(2));
      case 1: return suc_ctx(ctx(depth - 1));
      default: return nrec_ctx(type(), term(2), term(2), ctx(depth - 1));
    }
  }
};

}  // namespace

TEST_CASE("plug/compose law on random contexts") {
  RawGen g(20240601);
  for (int i = 0; i < 200; ++i) {
    CtxPtr e = g.ctx(static_cast<int>(g.roll(4)));
    CtxPtr f = g.ctx(static_cast<int>(g.roll(4)));
    TermPtr t = g.term(3);
    CHECK(alpha_eq(plug(compose(e, f), t), plug(e, plug(f, t))));
  }
}

TEST_CASE("alpha_eq is an equivalence and survives boundary renaming") {
  RawGen g(7);
  for (int i = 0; i < 100; ++i) {
    TermPtr t = g.term(6);
    CHECK(alpha_eq(t, t));
    // Opening a binder with a fresh name and closing again is identity.
    if (t->kind == TermKind::Lam) {
      OpenedLam o = open_lam_fresh(t);
      CHECK(alpha_eq(lam(t->annot, close_lam(o.body, o.id)), t));
    }
    if (t->kind == TermKind::Mu) {
      OpenedMu o = open_mu_fresh(t);
      CHECK(alpha_eq(mu(t->annot, close_mu(o.body, o.id)), t));
    }
  }
}

TEST_CASE("subst_lam basics") {
  std::uint64_t x = fresh_id(), y = fresh_id();
  // (x y)[x := 0] = 0 y
  TermPtr t = app(fvar(x, "x"), fvar(y, "y"));
  CHECK(alpha_eq(subst_lam(t, x, zero()), app(zero(), fvar(y, "y"))));

  // (\y. x)[x := y] avoids capture
  std::uint64_t yb = fresh_id();
  TermPtr l = lam(nat_type(), close_lam(fvar(x, "x"), yb));  // binder unused, body = x
  TermPtr res = subst_lam(l, x, fvar(y, "y"));
  // result must be \_:N. y with y still free
  REQUIRE(res->kind == TermKind::Lam);
  CHECK(free_vars(res).lam == std::set<std::uint64_t>{y});
  CHECK(alpha_eq(res, lam(nat_type(), fvar(y, "y"))));

  // (mu a.[a]x)[x := 0] = mu a.[a]0
  std::uint64_t a = fresh_id();
  TermPtr m = mu(nat_type(), close_mu(cmd_free(a, "a", fvar(x, "x")), a));
  TermPtr want = mu(nat_type(), close_mu(cmd_free(a, "a", zero()), a));
  CHECK(alpha_eq(subst_lam(m, x, zero()), want));

  // identity law
  RawGen g(99);
  for (int i = 0; i < 60; ++i) {
    TermPtr r = g.term(5);
    CHECK(alpha_eq(subst_lam(r, g.lams[0], fvar(g.lams[0], "x")), r));
  }
}

TEST_CASE("subst_struct basics") {
  std::uint64_t x = fresh_id(), a = fresh_id(), b = fresh_id(), gvar = fresh_id();
  std::uint64_t s = fresh_id();
  TermPtr sT = fvar(s, "s");

  // ([a]x)[a := b ([] s)] = [b](x s)
  CommandPtr c = cmd_free(a, "a", fvar(x, "x"));
  CommandPtr got = subst_struct(c, a, b, "b", app_ctx(hole(), sT));
  CommandPtr want = cmd_free(b, "b", app(fvar(x, "x"), sT));
  CHECK(alpha_eq(got, want));

  // ([g]0)[a := b []] with g != a is untouched
  CommandPtr cg = cmd_free(gvar, "g", zero());
  CHECK(alpha_eq(subst_struct(cg, a, b, "b", hole()), cg));

  // nested commands under another binder substitute only alpha-targets
  std::uint64_t inner = fresh_id();
  CommandPtr nested =
      cmd_free(a, "a", mu(nat_type(), close_mu(cmd_free(inner, "g", fvar(x, "x")), inner)));
  CommandPtr nestedGot = subst_struct(nested, a, a, "a", suc_ctx(hole()));
  CommandPtr nestedWant = cmd_free(
      a, "a", suc(mu(nat_type(), close_mu(cmd_free(inner, "g", fvar(x, "x")), inner))));
  CHECK(alpha_eq(nestedGot, nestedWant));
}

TEST_CASE("rename_mu") {
  std::uint64_t x = fresh_id(), a = fresh_id(), b = fresh_id();
  CommandPtr c = cmd_free(a, "a", zero());
  CHECK(alpha_eq(rename_mu(c, a, b, "b"), cmd_free(b, "b", zero())));

  TermPtr m = mu(nat_type(), close_mu(cmd_free(a, "a", zero()), a));
  CHECK(alpha_eq(rename_mu(m, a, b, "b"), m));  // bound occurrences do not rename

  CommandPtr cs = cmd_free(a, "a", suc(fvar(x, "x")));
  CHECK(alpha_eq(rename_mu(cs, a, b, "b"), cmd_free(b, "b", suc(fvar(x, "x")))));
}

TEST_CASE("subst_struct identity and FCV bookkeeping") {
  RawGen g(4242);
  for (int i = 0; i < 150; ++i) {
    TermPtr t = g.term(6);
    std::uint64_t a = g.mus[0], b = g.mus[1];
    CHECK(alpha_eq(subst_struct(t, a, a, "a", hole()), t));

    CtxPtr e = g.ctx(static_cast<int>(g.roll(3)));
    TermPtr res = subst_struct(t, a, b, "b", e);
    VarSets before = free_vars(t), after = free_vars(res);
    VarSets ctxVars;
    collect_free(e, ctxVars);
    // FCV(result) is within (FCV(t) \ {a}) + {b} + FCV(E)
    for (std::uint64_t v : after.mu) {
      bool allowed = (before.mu.count(v) && v != a) || v == b || ctxVars.mu.count(v);
      CHECK(allowed);
    }
  }
}

TEST_CASE("subst_struct commutation against two-route oracle") {
  RawGen g(515151);
  for (int i = 0; i < 150; ++i) {
    TermPtr t = g.term(5);
    std::uint64_t a = g.mus[0], b = g.mus[1], c = g.mus[2];
    if (a == c || b == c) continue;
    CtxPtr f = g.ctx(static_cast<int>(g.roll(3)));
    CtxPtr e = g.ctx(static_cast<int>(g.roll(3)));
    VarSets eVars;
    collect_free(e, eVars);
    if (eVars.mu.count(c)) continue;  // lemma side condition: c not free in E
    TermPtr lhs = subst_struct(subst_struct(t, c, c, "c", f), a, b, "b", e);
    TermPtr rhs = subst_struct(subst_struct(t, a, b, "b", e), c, c, "c",
                               subst_struct_ctx(f, a, b, "b", e));
    CHECK(alpha_eq(lhs, rhs));
  }
}
