// Certified spectral classification of linear recurrences: Pisot and Salem
// verdicts with interval-enclosed dominant roots, closed-form reconstruction
// with an exact residual bound, and difference-expression zero sets with a
// certified cutoff.  Oracles: published minimal polynomials and root values
// (golden ratio, plastic number, Lehmer's number), plus hand-unrolled terms.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "sparsity/recurrence.hpp"
#include "sparsity/sequences.hpp"
#include "sparsity/util.hpp"

using namespace sparsity;

namespace {
std::vector<mpz_class> zvec(std::initializer_list<long> vs) {
  std::vector<mpz_class> out;
  for (long v : vs) out.emplace_back(v);
  return out;
}

RecurrenceSpec named_rec(const std::string& name) {
  SequenceSpec s = SequenceSpec::parse(name);
  return s.rec;
}

// |lambda - target| <= tol, certified from the ball's outer bounds.
bool lambda_within(const SpectralData& sd, const mpq_class& target, const mpq_class& tol) {
  if (!sd.lambda) return false;
  return sd.lambda->certainly_ge_q(target - tol) && sd.lambda->certainly_le_q(target + tol);
}
}  // namespace

TEST_CASE("characteristic polynomial and unrolling of fibonacci") {
  RecurrenceSpec fib = named_rec("fibonacci");
  ZPoly cp = char_poly(fib);
  CHECK(cp.c == zvec({-1, -1, 1}));  // x^2 - x - 1
  auto terms = unroll(fib, 10);
  // Raw terms before canonicalization; the window view drops the zero and
  // the duplicate one.
  CHECK(terms == zvec({0, 1, 1, 2, 3, 5, 8, 13, 21, 34}));
  CHECK(unroll(named_rec("lucas"), 5) == zvec({2, 1, 3, 4, 7}));
}

TEST_CASE("classical recurrences classify as Pisot") {
  for (const char* name : {"fibonacci", "lucas", "pell", "pell_lucas", "order3_fibonacci",
                           "order4_fibonacci", "order5_fibonacci", "order6_fibonacci", "padovan",
                           "perrin"}) {
    SpectralData sd = classify(char_poly(named_rec(name)));
    INFO("sequence: " << name);
    CHECK(sd.cls == SpectralClass::Pisot);
    CHECK(sd.squarefree_ok);
    CHECK(sd.rational_root_free);
    CHECK(sd.irreducibility_verified);
    REQUIRE(sd.lambda.has_value());
    CHECK(sd.lambda->certainly_ge_q(mpq_class(1)));
    REQUIRE(!sd.roots.empty());
    CHECK(sd.roots[0].is_dominant);
    CHECK(sd.roots[0].is_real);
  }
}

TEST_CASE("dominant roots match published values to 1e-4") {
  // Golden ratio 1.6180339887...
  CHECK(lambda_within(classify(char_poly(named_rec("fibonacci"))), mpq_class(16180340, 10000000),
                      mpq_class(1, 10000)));
  // Plastic number 1.3247179572..., the smallest Pisot number.
  SpectralData plastic = classify(char_poly(named_rec("padovan")));
  CHECK(lambda_within(plastic, mpq_class(132471, 100000), mpq_class(1, 10000)));
  CHECK(lambda_within(classify(char_poly(named_rec("perrin"))), mpq_class(132471, 100000),
                      mpq_class(1, 10000)));
  // Silver ratio 1 + sqrt(2) = 2.4142135623...
  CHECK(lambda_within(classify(char_poly(named_rec("pell"))), mpq_class(24142136, 10000000),
                      mpq_class(1, 10000)));
}

TEST_CASE("lehmer's degree-ten polynomial is Salem with the published root") {
  SpectralData sd = classify(ZPoly(zvec({1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1})));
  CHECK(sd.cls == SpectralClass::Salem);
  CHECK(sd.class_str() == "salem");
  // Lehmer's number 1.1762808182...
  CHECK(lambda_within(sd, mpq_class(117628, 100000), mpq_class(1, 10000)));
  // A Salem spectrum keeps conjugates on the unit circle.
  size_t on_circle = 0;
  for (const auto& r : sd.roots)
    if (r.on_unit_circle) ++on_circle;
  CHECK(on_circle == 8);
}

TEST_CASE("reducible and reciprocal-factor polynomials are rejected") {
  SpectralData sd = classify(ZPoly(zvec({6, -5, 1})));  // (x-2)(x-3)
  CHECK(sd.cls == SpectralClass::Rejected);
  CHECK_FALSE(sd.reject_reason.empty());
  // (x-2)(x-1)^2: the 2^n + n recurrence; the repeated rational root kills
  // both the squarefreeness and the dominance structure.
  SpectralData pw = classify(char_poly(named_rec("recurrence:1,3,6;2,-5,4")));
  CHECK(pw.cls == SpectralClass::Rejected);
}

TEST_CASE("binet reconstruction of fibonacci is certified below one half") {
  SpectralData sd = binet(named_rec("fibonacci"), 70);
  REQUIRE(sd.cls == SpectralClass::Pisot);
  CHECK(sd.checked_through >= 69);
  CHECK(sd.residual_bound < mpq_class(1, 2));
  REQUIRE(sd.alpha.has_value());
  // alpha = 1/sqrt(5) = 0.4472135954999579... bracketed to 1e-9.
  CHECK(sd.alpha->re.certainly_ge_q(mpq_class("4472135945/10000000000")));
  CHECK(sd.alpha->re.certainly_le_q(mpq_class("4472135965/10000000000")));
  CHECK(sd.alpha->im.contains_zero());
  CHECK(sd.betas.size() + 1 == sd.roots.size());
}

TEST_CASE("zero set: the defining relation of fibonacci vanishes identically") {
  RecurrenceSpec fib = named_rec("fibonacci");
  ZeroOffsets sig;
  sig.u = {2};
  sig.v = {1, 0};  // d_n = a_{n+2} - a_{n+1} - a_n
  ZeroSetReport rep = zero_set(fib, sig, mpz_class(0));
  CHECK(rep.verdict == ZeroVerdict::IdenticallyZero);
  // Independent confirmation by direct unrolling well past the scan.
  auto terms = unroll(fib, 40);
  for (size_t n = 0; n + 2 < terms.size(); ++n)
    CHECK(terms[n + 2] - terms[n + 1] - terms[n] == 0);
}

TEST_CASE("zero set: consecutive-difference expression has one certified zero") {
  RecurrenceSpec fib;
  fib.init = zvec({1, 1});
  fib.coeff = zvec({1, 1});
  ZeroOffsets sig;
  sig.u = {1};
  sig.v = {0};  // d_n = a_{n+1} - a_n, zero only at n = 0 (1 - 1)
  ZeroSetReport rep = zero_set(fib, sig, mpz_class(0));
  REQUIRE(rep.verdict == ZeroVerdict::Finite);
  CHECK(rep.zeros == std::vector<long>({0}));
  CHECK(rep.n0 >= 0);
  CHECK(rep.scanned_through >= rep.n0);
  // Re-scanning to twice the certified cutoff finds no further zeros.
  ZeroScanConfig twice;
  twice.rescan_factor = 2;
  ZeroSetReport rep2 = zero_set(fib, sig, mpz_class(0), twice);
  CHECK(rep2.verdict == ZeroVerdict::Finite);
  CHECK(rep2.zeros == rep.zeros);
  CHECK(rep2.scanned_through >= 2 * rep.n0);
}

TEST_CASE("zero set with constant offset r shifts the solution set") {
  RecurrenceSpec fib;
  fib.init = zvec({1, 1});
  fib.coeff = zvec({1, 1});
  ZeroOffsets sig;
  sig.u = {1};
  sig.v = {0};
  // d_n = -3 + a_{n+1} - a_n: a_{n+1} - a_n = 3 exactly at n = 4 (8 - 5).
  ZeroSetReport rep = zero_set(fib, sig, mpz_class(-3));
  REQUIRE(rep.verdict == ZeroVerdict::Finite);
  CHECK(rep.zeros == std::vector<long>({4}));
}

TEST_CASE("zero set refuses recurrences without a certified dominant root") {
  // a_{n+2} = a_n from 1, 2: the characteristic roots sit on the unit
  // circle, so no dominance cutoff exists and no finite verdict is honest;
  // the engine must refuse loudly rather than guess.
  RecurrenceSpec per;
  per.init = zvec({1, 2});
  per.coeff = zvec({1, 0});
  ZeroOffsets sig;
  sig.u = {1};
  sig.v = {0};
  CHECK_THROWS_AS(zero_set(per, sig, mpz_class(0)), Error);
}
