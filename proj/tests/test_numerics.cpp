// Exact quadratic-field arithmetic, certified ball arithmetic, and integer
// polynomials.  Oracles are hand-computable identities (golden-ratio algebra,
// known floors, textbook polynomial products) plus randomized containment and
// ring-law properties under a fixed seed.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "sparsity/ball.hpp"
#include "sparsity/util.hpp"
#include "sparsity/poly.hpp"
#include "sparsity/qfield.hpp"

using namespace sparsity;

TEST_CASE("golden ratio satisfies phi^2 = phi + 1 exactly") {
  QuadExpr phi = QuadExpr::parse("(1+sqrt(5))/2");
  QuadExpr lhs = phi.pow_ui(2);
  QuadExpr rhs = phi + QuadExpr(mpq_class(1));
  CHECK(lhs.cmp(rhs) == 0);
  CHECK(lhs.sign() == 1);
  // phi is irrational; phi^2 - phi - 1 collapses to rational zero.
  CHECK_FALSE(phi.is_rational());
  QuadExpr zero = lhs - rhs;
  CHECK(zero.is_rational());
  CHECK(zero.to_mpq() == 0);
}

TEST_CASE("exact floors of golden-ratio powers") {
  QuadExpr phi = QuadExpr::parse("(1+sqrt(5))/2");
  // phi   = 1.618...   -> floor 1
  // phi^5 = (11+5*sqrt(5))/2 = 11.09... -> floor 11
  // phi^10 = 122.99... -> floor 122
  CHECK(phi.floor() == 1);
  CHECK(phi.pow_ui(5).floor() == 11);
  CHECK(phi.pow_ui(10).floor() == 122);
  // Negative values floor toward -infinity: -phi -> -2.
  CHECK((-phi).floor() == -2);
}

TEST_CASE("square roots of perfect rational squares collapse to rationals") {
  QuadExpr r = QuadExpr::sqrt_of(mpq_class(4, 9));
  CHECK(r.is_rational());
  CHECK(r.to_mpq() == mpq_class(2, 3));
  // sqrt(8) = 2*sqrt(2): the radicand is reduced to its squarefree core.
  QuadExpr s = QuadExpr::sqrt_of(mpq_class(8));
  CHECK_FALSE(s.is_rational());
  CHECK(s.radicand() == 2);
  CHECK(s.num_surd_coeff() == 2);
}

TEST_CASE("parsing round trips and rejects malformed input") {
  for (const char* text : {"(1+sqrt(5))/2", "1/sqrt(5)", "sqrt(2)", "3/2", "1.25"}) {
    QuadExpr v = QuadExpr::parse(text);
    QuadExpr again = QuadExpr::parse(v.str());
    CHECK(v.cmp(again) == 0);
  }
  CHECK(QuadExpr::parse("1.5").cmp(QuadExpr(mpq_class(3, 2))) == 0);
  // 1/sqrt(5) * sqrt(5) = 1.
  QuadExpr inv = QuadExpr::parse("1/sqrt(5)");
  CHECK((inv * QuadExpr::sqrt_of(mpq_class(5))).cmp(QuadExpr(mpq_class(1))) == 0);
  CHECK_THROWS(QuadExpr::parse("sqrt(-1)"));
  CHECK_THROWS(QuadExpr::parse("1+"));
  CHECK_THROWS(QuadExpr::parse(""));
}

TEST_CASE("exact comparison separates sqrt(2) from nearby rationals") {
  QuadExpr r2 = QuadExpr::sqrt_of(mpq_class(2));
  // 1.41421356^2 < 2 < 1.41421357^2
  CHECK(r2.cmp(QuadExpr(mpq_class(141421356, 100000000))) > 0);
  CHECK(r2.cmp(QuadExpr(mpq_class(141421357, 100000000))) < 0);
  CHECK(r2.cmp(r2) == 0);
}

TEST_CASE("quadratic field arithmetic matches double arithmetic approximately") {
  std::mt19937_64 rng(20240517);
  std::uniform_int_distribution<long> num(-12, 12);
  std::uniform_int_distribution<long> den(1, 9);
  QuadExpr r5 = QuadExpr::sqrt_of(mpq_class(5));
  for (int it = 0; it < 200; ++it) {
    mpq_class a(num(rng), den(rng)), b(num(rng), den(rng));
    a.canonicalize();
    b.canonicalize();
    QuadExpr x = QuadExpr(a) + QuadExpr(b) * r5;
    QuadExpr y = QuadExpr(b) - QuadExpr(a) * r5;
    double xd = a.get_d() + b.get_d() * std::sqrt(5.0);
    double yd = b.get_d() - a.get_d() * std::sqrt(5.0);
    CHECK(std::abs((x + y).approx_double() - (xd + yd)) < 1e-9);
    CHECK(std::abs((x * y).approx_double() - (xd * yd)) < 1e-7);
    if (y.sign() != 0) CHECK(std::abs((x / y).approx_double() - (xd / yd)) < 1e-7);
    // sign() agrees with the double approximation whenever the latter is
    // comfortably away from zero.
    if (std::abs(xd) > 1e-6) CHECK(x.sign() == (xd > 0 ? 1 : -1));
  }
}

TEST_CASE("balls certify exact rational endpoints") {
  Ball third = Ball::exact_q(mpq_class(1, 3), kPrecStart);
  CHECK(third.lower_q() <= mpq_class(1, 3));
  CHECK(third.upper_q() >= mpq_class(1, 3));
  CHECK(third.upper_q() - third.lower_q() < mpq_class(1, 1000000));
  CHECK_FALSE(third.contains_zero());
  CHECK(third.certainly_ge_q(mpq_class(33, 100)));
  CHECK(third.certainly_le_q(mpq_class(34, 100)));
  CHECK_FALSE(third.certainly_le_q(mpq_class(1, 4)));
}

TEST_CASE("ball square root of 2 brackets the true value") {
  Ball two = Ball::exact_z(mpz_class(2), 128);
  Ball r = two.sqrt_val();
  Ball sq = r * r;
  CHECK(sq.lower_q() <= 2);
  CHECK(sq.upper_q() >= 2);
  CHECK(r.certainly_ge_q(mpq_class(141421356, 100000000)));
  CHECK(r.certainly_le_q(mpq_class(141421357, 100000000)));
}

TEST_CASE("ball division by an interval containing zero is refused") {
  Ball num = Ball::exact_z(mpz_class(1), kPrecStart);
  Ball straddle = Ball::from_double(0.0, 0.5, kPrecStart);
  CHECK(straddle.contains_zero());
  CHECK_THROWS(num / straddle);
  // enclose_q spans the full requested interval.
  Ball e = Ball::enclose_q(mpq_class(-1, 2), mpq_class(1, 3), kPrecStart);
  CHECK(e.contains_zero());
  CHECK(e.lower_q() <= mpq_class(-1, 2));
  CHECK(e.upper_q() >= mpq_class(1, 3));
}

TEST_CASE("ball arithmetic contains exact rational results") {
  std::mt19937_64 rng(987654321);
  std::uniform_int_distribution<long> num(-50, 50);
  std::uniform_int_distribution<long> den(1, 20);
  for (int it = 0; it < 300; ++it) {
    mpq_class a(num(rng), den(rng)), b(num(rng), den(rng));
    a.canonicalize();
    b.canonicalize();
    Ball ba = Ball::exact_q(a, kPrecStart);
    Ball bb = Ball::exact_q(b, kPrecStart);
    auto contains = [](const Ball& x, const mpq_class& v) {
      return x.lower_q() <= v && v <= x.upper_q();
    };
    CHECK(contains(ba + bb, a + b));
    CHECK(contains(ba - bb, a - b));
    CHECK(contains(ba * bb, a * b));
    if (b != 0 && !bb.contains_zero()) CHECK(contains(ba / bb, mpq_class(a / b)));
    CHECK(contains(ba.abs_val(), mpq_class(abs(a))));
    CHECK(contains(ba.pow_ui(3), mpq_class(a * a * a)));
  }
}

TEST_CASE("certainly_lt orders separated balls and refuses overlapping ones") {
  Ball lo = Ball::exact_z(mpz_class(1), kPrecStart);
  Ball hi = Ball::exact_z(mpz_class(2), kPrecStart);
  CHECK(lo.certainly_lt(hi));
  CHECK_FALSE(hi.certainly_lt(lo));
  Ball wide = Ball::from_double(1.5, 1.0, kPrecStart);  // overlaps both
  CHECK_FALSE(lo.certainly_lt(wide));
  CHECK_FALSE(wide.certainly_lt(hi));
}

TEST_CASE("complex balls square to the expected modulus") {
  // (1 + i)^2 = 2i, |1+i|^2 = 2.
  CBall z(Ball::exact_z(mpz_class(1), kPrecStart), Ball::exact_z(mpz_class(1), kPrecStart));
  CBall sq = z * z;
  CHECK(sq.re.contains_zero());
  CHECK(sq.im.lower_q() <= 2);
  CHECK(sq.im.upper_q() >= 2);
  Ball m = z.abs_sq();
  CHECK(m.lower_q() <= 2);
  CHECK(m.upper_q() >= 2);
}

namespace {
ZPoly make_poly(std::initializer_list<long> coeffs_low_first) {
  std::vector<mpz_class> c;
  for (long v : coeffs_low_first) c.emplace_back(v);
  return ZPoly(std::move(c));
}
}  // namespace

TEST_CASE("polynomial product and difference of squares") {
  ZPoly xp1 = make_poly({1, 1});
  ZPoly sq = xp1 * xp1;
  CHECK(sq.c == std::vector<mpz_class>({1, 2, 1}));
  ZPoly xm1 = make_poly({-1, 1});
  CHECK((xp1 * xm1).c == std::vector<mpz_class>({-1, 0, 1}));
  CHECK((xp1 + xm1).c == std::vector<mpz_class>({0, 2}));
  CHECK((xp1 - xp1).is_zero());
}

TEST_CASE("reversal, self-reciprocal detection, content") {
  ZPoly fib = make_poly({-1, -1, 1});  // x^2 - x - 1
  CHECK(fib.reversed().c == std::vector<mpz_class>({1, -1, -1}));
  CHECK_FALSE(fib.self_reciprocal());
  // Lehmer's degree-10 polynomial is self-reciprocal.
  ZPoly lehmer = make_poly({1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1});
  CHECK(lehmer.self_reciprocal());
  CHECK(lehmer.is_monic());
  ZPoly scaled = make_poly({2, 4, 6});
  CHECK(scaled.content() == 2);
  CHECK(scaled.primitive_part().c == std::vector<mpz_class>({1, 2, 3}));
  CHECK(make_poly({-1, -1, 1}).derivative().c == std::vector<mpz_class>({-1, 2}));
}

TEST_CASE("polynomial evaluation in integers, rationals, and balls") {
  ZPoly fib = make_poly({-1, -1, 1});
  CHECK(fib.eval_z(mpz_class(3)) == 5);
  CHECK(fib.eval_q(mpq_class(1, 2)) == mpq_class(-5, 4));
  Ball at = Ball::exact_q(mpq_class(1, 2), kPrecStart);
  Ball v = fib.eval_ball(at);
  CHECK(v.lower_q() <= mpq_class(-5, 4));
  CHECK(v.upper_q() >= mpq_class(-5, 4));
  // Cauchy bound dominates every root in absolute value: for x^2-x-1 the
  // positive root is phi = 1.618 and the bound is 1 + max|c_i| = 2.
  CHECK(fib.cauchy_root_bound() >= mpq_class(1618, 1000));
}

TEST_CASE("integer roots and gcd of integer polynomials") {
  // (x-2)(x-3) = x^2 - 5x + 6
  ZPoly f = make_poly({6, -5, 1});
  auto roots = integer_roots(f);
  REQUIRE(roots.size() == 2);
  CHECK(((roots[0] == 2 && roots[1] == 3) || (roots[0] == 3 && roots[1] == 2)));
  CHECK(integer_roots(make_poly({-1, -1, 1})).empty());
  // gcd((x-2)(x-3), (x-2)(x+7)) is proportional to x-2.
  ZPoly g = make_poly({-14, 5, 1});
  ZPoly d = poly_gcd(f, g);
  REQUIRE(d.degree() == 1);
  CHECK(d.eval_z(mpz_class(2)) == 0);
}

TEST_CASE("polynomial ring laws hold on random small inputs") {
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<int> deg(0, 5);
  std::uniform_int_distribution<long> coeff(-9, 9);
  auto random_poly = [&]() {
    std::vector<mpz_class> c(static_cast<size_t>(deg(rng)) + 1);
    for (auto& v : c) v = coeff(rng);
    return ZPoly(std::move(c));
  };
  for (int it = 0; it < 100; ++it) {
    ZPoly f = random_poly(), g = random_poly(), h = random_poly();
    CHECK(((f + g) * h).c == (f * h + g * h).c);
    CHECK((f * g).c == (g * f).c);
    CHECK(((f * g) * h).c == (f * (g * h)).c);
    // Evaluation is a ring homomorphism.
    mpq_class x(coeff(rng), 7);
    x.canonicalize();
    CHECK((f * g).eval_q(x) == f.eval_q(x) * g.eval_q(x));
    CHECK((f + g).eval_q(x) == f.eval_q(x) + g.eval_q(x));
  }
}
