// Additive-equation enumeration (meet-in-the-middle vs brute-force oracle),
// decomposition certificates with bounded transfer, empirical decomposition
// bounds, lambda-balance splits driven by a scaffold witness, and the
// consecutive-ratio threshold.  Oracles: the defining recurrences give exact
// solution counts (every Fibonacci value past the second is the sum of the
// previous two; every power of two doubles), and the decomposition bounds
// for those families are hand-derivable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <utility>
#include <vector>

#include "sparsity/equations.hpp"
#include "sparsity/geometry.hpp"
#include "sparsity/sequences.hpp"
#include "sparsity/util.hpp"

using namespace sparsity;

namespace {
SequenceWindow gen_count(const std::string& spec, size_t count) {
  GenerateOptions opt;
  opt.count = count;
  return generate(SequenceSpec::parse(spec), opt);
}

mpz_class side_sum(const SequenceWindow& w, const std::vector<size_t>& idx) {
  mpz_class s = 0;
  for (size_t i : idx) s += w.values[i];
  return s;
}

bool same_solutions(const Enumeration& a, const Enumeration& b) {
  if (a.solutions.size() != b.solutions.size()) return false;
  for (size_t i = 0; i < a.solutions.size(); ++i) {
    if (a.solutions[i].m != b.solutions[i].m) return false;
    if (a.solutions[i].n != b.solutions[i].n) return false;
  }
  return true;
}
}  // namespace

TEST_CASE("unit-shift equation on fibonacci has exactly two solutions") {
  SequenceWindow w = gen_count("fibonacci", 40);
  Enumeration e = enumerate_solutions(w, 1, 1, mpz_class(1), 30);
  REQUIRE(e.solutions.size() == 2);  // 1+1=2 and 1+2=3
  for (const auto& sol : e.solutions)
    CHECK(sol.r + side_sum(w, sol.m) == side_sum(w, sol.n));
}

TEST_CASE("recurrence equations count one solution per window step") {
  SequenceWindow fib = gen_count("fibonacci", 40);
  Enumeration ef = enumerate_solutions(fib, 1, 2, mpz_class(0), 30);
  CHECK(ef.solutions.size() == 30);
  SequenceWindow p2 = gen_count("power_tower:2", 40);
  Enumeration ep = enumerate_solutions(p2, 1, 2, mpz_class(0), 30);
  CHECK(ep.solutions.size() == 30);  // 2^i = 2^{i-1} + 2^{i-1}
  Enumeration eq = enumerate_solutions(p2, 1, 1, mpz_class(0), 30);
  CHECK(eq.solutions.size() == 31);  // the diagonal
  // Every reported solution re-verifies, and spreads are as defined.
  for (const auto& sol : ep.solutions) {
    CHECK(sol.r + side_sum(p2, sol.m) == side_sum(p2, sol.n));
    CHECK(sol.spread == 1);
  }
}

TEST_CASE("balanced four-term equation on fibonacci") {
  SequenceWindow w = gen_count("fibonacci", 40);
  Enumeration e = enumerate_solutions(w, 2, 2, mpz_class(0), 25);
  CHECK(e.solutions.size() == 399);
  for (const auto& sol : e.solutions) CHECK(side_sum(w, sol.m) == side_sum(w, sol.n));
}

TEST_CASE("meet-in-the-middle agrees with the brute-force oracle") {
  SequenceWindow fib = gen_count("fibonacci", 20);
  SequenceWindow p2 = gen_count("power_tower:2", 20);
  for (const SequenceWindow* w : {&fib, &p2}) {
    for (int k = 1; k <= 2; ++k)
      for (int l = 1; l <= 2; ++l)
        for (long r = -2; r <= 2; ++r) {
          Enumeration fast = enumerate_solutions(*w, k, l, mpz_class(r), 8);
          Enumeration naive = enumerate_solutions_naive(*w, k, l, mpz_class(r), 8);
          CHECK(same_solutions(fast, naive));
        }
  }
}

TEST_CASE("enumeration refuses windows that cannot certify the index bound") {
  SequenceWindow w = gen_count("fibonacci", 10);
  CHECK_THROWS_AS(enumerate_solutions(w, 1, 1, mpz_class(0), 10), Error);
}

TEST_CASE("growth constants certify completeness beyond the index bound") {
  SequenceWindow w = gen_count("fibonacci", 40);
  auto growth = std::make_optional(std::make_pair(mpq_class(1), mpq_class(3, 2)));
  Enumeration e = enumerate_solutions(w, 1, 2, mpz_class(0), 30, growth);
  CHECK(e.completeness.proved);
  CHECK(e.completeness.m_prime == 15);
  CHECK_FALSE(e.completeness.detail.empty());
  // Without growth data no completeness claim is made.
  Enumeration plain = enumerate_solutions(w, 1, 2, mpz_class(0), 30);
  CHECK_FALSE(plain.completeness.proved);
}

TEST_CASE("a recurrence step decomposes with unit transfer") {
  SequenceWindow w = gen_count("fibonacci", 40);
  SolutionTuple sol;
  sol.k = 1;
  sol.l = 2;
  sol.r = 0;
  sol.m = {2};
  sol.n = {1, 0};  // 3 = 2 + 1
  sol.spread = 2;
  auto cert = decompose(w, sol, mpz_class(2));
  REQUIRE(cert.has_value());
  CHECK(abs(cert->s_prime) == 1);  // the smaller of the two possible transfers
  CHECK_FALSE(decompose(w, sol, mpz_class(0)).has_value());
}

TEST_CASE("decomposition bounds for the recurrence equations") {
  SequenceWindow fib = gen_count("fibonacci", 40);
  DecompositionBound bf = find_decomposition_bound(fib, 1, 2, mpz_class(0), 30, mpz_class(30), 10);
  REQUIRE(bf.bound.has_value());
  CHECK(bf.bound->first == 0);
  CHECK(bf.bound->second == 2);
  CHECK(bf.exceptions.empty());

  SequenceWindow p2 = gen_count("power_tower:2", 40);
  DecompositionBound bp = find_decomposition_bound(p2, 1, 2, mpz_class(0), 30, mpz_class(30), 10);
  REQUIRE(bp.bound.has_value());
  CHECK(bp.bound->first == 0);
  CHECK(bp.bound->second == 1);
}

TEST_CASE("lambda balance splits a doubled power-of-two equation exactly") {
  SequenceWindow w = gen_count("power_tower:2", 40);
  auto model = default_model(w);
  REQUIRE(model.has_value());
  GeometricWitness wit = construct_witness(w, *model);
  SolutionTuple sol;
  sol.k = 2;
  sol.l = 2;
  sol.r = 0;
  sol.m = {7, 3};
  sol.n = {7, 3};  // 128 + 8 = 128 + 8
  sol.spread = 4;
  LambdaBalance lb = lambda_balance_decompose(w, sol, wit, mpq_class(1, 4));
  CHECK(lb.s_bound == 0);  // Theta = 0 and r = 0
  REQUIRE(lb.cert.has_value());
  CHECK(lb.cert->s_prime == 0);
}

TEST_CASE("lambda balance refuses an unbalanced fibonacci identity") {
  SequenceWindow w = gen_count("fibonacci", 40);
  auto model = default_model(w);
  REQUIRE(model.has_value());
  GeometricWitness wit = construct_witness(w, *model);
  SolutionTuple sol;
  sol.k = 2;
  sol.l = 2;
  sol.r = 0;
  sol.m = {4, 1};
  sol.n = {3, 3};  // 8 + 2 = 5 + 5, but no proper sub-balance exists
  sol.spread = 3;
  LambdaBalance lb = lambda_balance_decompose(w, sol, wit, mpq_class(1, 10));
  CHECK(lb.s_bound == 4);  // ceil(4 * Theta) with Theta = 3r, r = 0.2763...
  CHECK_FALSE(lb.cert.has_value());
  CHECK_FALSE(lb.note.empty());
}

TEST_CASE("consecutive-ratio threshold marks where doubling stops") {
  SequenceWindow fac = gen_count("factorials", 12);
  auto t = ratio_threshold(fac, mpz_class(2));
  REQUIRE(t.has_value());
  CHECK(*t == 1);  // 2 <= 2*1, but 6 > 2*2 and beyond
  SequenceWindow p2 = gen_count("power_tower:2", 34);
  auto tp = ratio_threshold(p2, mpz_class(2));
  REQUIRE(tp.has_value());
  CHECK(*tp == 33);  // doubling holds through the whole window
}

TEST_CASE("bounded-spread slices group solutions by offset pattern") {
  SequenceWindow p2 = gen_count("power_tower:2", 40);
  auto slices = bounded_spread_slice(p2, 1, 2, mpz_class(0), 2, 30);
  REQUIRE(!slices.empty());
  // The doubling pattern a_{b+1} = a_b + a_b appears at every base index.
  bool found = false;
  for (const auto& s : slices) {
    if (s.u == std::vector<long>({1}) && s.v == std::vector<long>({0, 0})) {
      found = true;
      CHECK(s.bases.size() == 30);
    }
  }
  CHECK(found);
}
