#pragma once

// Term-building helpers shared by the test suites: bind-by-free-name
// wrappers and the paper's worked example program.

#include "lmt/reduce.hpp"
#include "lmt/term.hpp"

namespace lmt::testing {

inline TermPtr mklam(const TypePtr& ty, std::uint64_t x, const TermPtr& body) {
  return lam(ty, close_lam(body, x));
}

inline TermPtr mkmu(const TypePtr& ty, std::uint64_t a, const CommandPtr& c) {
  return mu(ty, close_mu(c, a));
}

inline TypePtr nat2() { return arrow(nat_type(), nat_type()); }
inline TypePtr nat3() { return arrow(nat_type(), nat2()); }

// \n:N. \m:N. nrec{N}(m; \x:N. \y:N. S y; n)
inline TermPtr plus_term() {
  std::uint64_t n = fresh_id(), m = fresh_id(), x = fresh_id(), y = fresh_id();
  TermPtr step = mklam(nat_type(), x, mklam(nat_type(), y, suc(fvar(y, "y"))));
  TermPtr body = nrec(nat_type(), fvar(m, "m"), step, fvar(n, "n"));
  return mklam(nat_type(), n, mklam(nat_type(), m, body));
}

// \n:N. \m:N. nrec{N}(0; \x:N. \y:N. add m y; n)
inline TermPtr times_term() {
  std::uint64_t n = fresh_id(), m = fresh_id(), x = fresh_id(), y = fresh_id();
  TermPtr add = plus_term();
  TermPtr step = mklam(nat_type(), x,
                       mklam(nat_type(), y, app(app(add, fvar(m, "m")), fvar(y, "y"))));
  TermPtr body = nrec(nat_type(), zero(), step, fvar(n, "n"));
  return mklam(nat_type(), n, mklam(nat_type(), m, body));
}

// The table f0 = 3, f1 = 0, f2 = 5 encoded with nrec:
// \w:N. nrec{N}(3; \z:N. \u:N. nrec{N}(0; \z2:N. \u2:N. 5; z); w)
inline TermPtr table_305() {
  std::uint64_t w = fresh_id(), z = fresh_id(), u = fresh_id(), z2 = fresh_id(),
                u2 = fresh_id();
  TermPtr innerStep = mklam(nat_type(), z2, mklam(nat_type(), u2, numeral(5)));
  TermPtr inner = nrec(nat_type(), zero(), innerStep, fvar(z, "z"));
  TermPtr step = mklam(nat_type(), z, mklam(nat_type(), u, inner));
  return mklam(nat_type(), w, nrec(nat_type(), numeral(3), step, fvar(w, "w")));
}

// The worked program: F == \x. catch_a (nrec 1 H (S x)) with
// H == \y m. nrec (throw 0 'a; \z _. m * S z; f y).
inline TermPtr program_f(const TermPtr& f) {
  std::uint64_t x = fresh_id(), y = fresh_id(), m = fresh_id(), z = fresh_id(),
                w = fresh_id(), a = fresh_id();
  TermPtr mul = times_term();
  TermPtr hInnerStep = mklam(
      nat_type(), z,
      mklam(nat_type(), w, app(app(mul, fvar(m, "m")), suc(fvar(z, "z")))));
  TermPtr hBody = nrec(nat_type(), throw_term(nat_type(), zero(), a, "a"), hInnerStep,
                       app(f, fvar(y, "y")));
  TermPtr H = mklam(nat_type(), y, mklam(nat_type(), m, hBody));
  TermPtr caught =
      catch_term(nat_type(), a, "a", nrec(nat_type(), numeral(1), H, suc(fvar(x, "x"))));
  return mklam(nat_type(), x, caught);
}

}  // namespace lmt::testing
