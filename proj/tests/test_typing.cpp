#include <catch2/catch_amalgamated.hpp>

#include "lmt/subst.hpp"
#include "lmt/testkit.hpp"
#include "lmt/typing.hpp"

using namespace lmt;

namespace {

TypePtr nn() { return arrow(nat_type(), nat_type()); }

TermPtr succ_step() {
  // \x:N. \y:N. S y
  std::uint64_t x = fresh_id(), y = fresh_id();
  TermPtr inner = lam(nat_type(), close_lam(suc(fvar(y, "y")), y));
  return lam(nat_type(), close_lam(inner, x));
}

}  // namespace

TEST_CASE("infer_term examples") {
  std::uint64_t x = fresh_id(), a = fresh_id();

  TermPtr idN = lam(nat_type(), close_lam(fvar(x, "x"), x));
  CHECK(type_eq(infer_term({}, idN), nn()));

  TermPtr m = mu(nat_type(), close_mu(cmd_free(a, "a", zero()), a));
  CHECK(type_eq(infer_term({}, m), nat_type()));

  TermPtr r = nrec(nat_type(), zero(), succ_step(), numeral(2));
  CHECK(type_eq(infer_term({}, r), nat_type()));
}

TEST_CASE("infer_term errors") {
  std::uint64_t x = fresh_id(), a = fresh_id();

  CHECK_THROWS_MATCHES(infer_term({}, fvar(x, "x")), TypeError,
                       Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                         return e.kind == TypeErrorKind::UnboundLamVar;
                       }));

  // application of a non-arrow
  CHECK_THROWS_MATCHES(infer_term({}, app(zero(), zero())), TypeError,
                       Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                         return e.kind == TypeErrorKind::ArrowExpected && e.path == std::vector<int>{0};
                       }));

  // argument mismatch, path points at the argument
  TermPtr idN = lam(nat_type(), close_lam(fvar(x, "x"), x));
  TermPtr bad = app(idN, idN);
  CHECK_THROWS_MATCHES(infer_term({}, bad), TypeError,
                       Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                         return e.kind == TypeErrorKind::ArgMismatch && e.path == std::vector<int>{1};
                       }));

  // suc of an arrow
  CHECK_THROWS_MATCHES(infer_term({}, suc(idN)), TypeError,
                       Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                         return e.kind == TypeErrorKind::NatExpected;
                       }));

  // unbound mu target inside a command
  TermPtr m = mu(nat_type(), cmd_free(a, "a", zero()));
  CHECK_THROWS_MATCHES(infer_term({}, m), TypeError,
                       Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                         return e.kind == TypeErrorKind::UnboundMuVar;
                       }));
}

TEST_CASE("check_command examples") {
  std::uint64_t a = fresh_id();
  TypeEnv env;

  CHECK_THROWS_MATCHES(check_command(env, cmd_free(a, "a", zero())), TypeError,
                       Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                         return e.kind == TypeErrorKind::UnboundMuVar;
                       }));

  env = env.with_mu(a, nat_type());
  CHECK_NOTHROW(check_command(env, cmd_free(a, "a", zero())));

  TypeEnv envArrow = TypeEnv{}.with_mu(a, nn());
  CHECK_THROWS_MATCHES(check_command(envArrow, cmd_free(a, "a", zero())), TypeError,
                       Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                         return e.kind == TypeErrorKind::PassivateMismatch;
                       }));
}

TEST_CASE("infer_context examples and compatibility") {
  CHECK(type_eq(infer_context({}, hole(), nn()), nn()));
  CHECK(type_eq(infer_context({}, suc_ctx(hole()), nat_type()), nat_type()));
  CHECK(type_eq(infer_context({}, app_ctx(hole(), zero()), nn()), nat_type()));

  // Fact: typing of E[t] factors through contextual typing.
  GenConfig cfg;
  cfg.maxNodes = 18;
  for (int i = 0; i < 80; ++i) {
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    cfg.targetType = nat_type();
    TermPtr t = gen_typed(cfg);
    CtxPtr e = (i % 3 == 0)   ? suc_ctx(hole())
               : (i % 3 == 1) ? app_ctx(hole(), zero())
                              : nrec_ctx(nat_type(), zero(), succ_step(), hole());
    if (e->kind == CtxKind::AppC) continue;  // hole type N cannot feed an app frame
    TypePtr direct = infer_term({}, plug(e, t));
    TypePtr viaCtx = infer_context({}, e, infer_term({}, t));
    CHECK(type_eq(direct, viaCtx));
  }
}

TEST_CASE("weakening") {
  GenConfig cfg;
  cfg.maxNodes = 24;
  for (int i = 0; i < 100; ++i) {
    cfg.seed = 2000 + static_cast<std::uint64_t>(i);
    cfg.targetType = nullptr;
    TermPtr t = gen_typed(cfg);
    TypePtr ty = infer_term({}, t);
    TypeEnv bigger =
        TypeEnv{}.with_lam(fresh_id(), nn()).with_mu(fresh_id(), nat_type());
    CHECK(type_eq(infer_term(bigger, t), ty));
  }
}

TEST_CASE("typing preserved under substitution") {
  // lambda substitution
  GenConfig cfg;
  cfg.maxNodes = 20;
  for (int i = 0; i < 100; ++i) {
    cfg.seed = 3000 + static_cast<std::uint64_t>(i);
    std::uint64_t x = fresh_id();
    TypeEnv env = TypeEnv{}.with_lam(x, nat_type());
    cfg.closedOnly = false;
    cfg.targetType = nullptr;
    TermPtr t = gen_typed(cfg, env);
    TypePtr ty = infer_term(env, t);
    cfg.closedOnly = true;
    cfg.targetType = nat_type();
    TermPtr r = gen_typed(cfg);
    CHECK(type_eq(infer_term({}, subst_lam(t, x, r)), ty));
  }

  // structural substitution: Delta,a:rho |- t and E : rho => sigma gives
  // Delta,b:sigma |- t[a := b E]
  for (int i = 0; i < 100; ++i) {
    cfg.seed = 4000 + static_cast<std::uint64_t>(i);
    std::uint64_t a = fresh_id(), b = fresh_id();
    TypeEnv env = TypeEnv{}.with_mu(a, nat_type());
    cfg.closedOnly = false;
    cfg.targetType = nullptr;
    TermPtr t = gen_typed(cfg, env);
    TypePtr ty = infer_term(env, t);
    CtxPtr e = suc_ctx(hole());
    TypePtr sigma = infer_context({}, e, nat_type());
    TermPtr sub = subst_struct(t, a, b, "b", e);
    CHECK(type_eq(infer_term(TypeEnv{}.with_mu(b, sigma), sub), ty));
  }
}

TEST_CASE("strengthening: unused mu-entries are irrelevant") {
  GenConfig cfg;
  cfg.maxNodes = 24;
  for (int i = 0; i < 100; ++i) {
    cfg.seed = 5000 + static_cast<std::uint64_t>(i);
    TermPtr t = gen_typed(cfg);
    std::uint64_t ghost = fresh_id();
    REQUIRE_FALSE(mu_free_in(ghost, t));
    TypePtr plain = infer_term({}, t);
    TypePtr asNat = infer_term(TypeEnv{}.with_mu(ghost, nat_type()), t);
    TypePtr asArrow = infer_term(TypeEnv{}.with_mu(ghost, nn()), t);
    CHECK(type_eq(plain, asNat));
    CHECK(type_eq(plain, asArrow));
  }
}
