// Ratio sets, the minimum signed ratio-sum table, discreteness evidence,
// scaffold witnesses (certified deviation from a geometric model), and the
// bounded-support claim they imply.  Oracles: powers of two have the exact
// ratio set {1, 2, 4, ...} with eps_k = 2^{1-k}, the identity model fits them
// with zero deviation, and the golden-ratio model fits fibonacci with a
// deviation strictly below one half.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "sparsity/geometry.hpp"
#include "sparsity/sequences.hpp"
#include "sparsity/util.hpp"

using namespace sparsity;

namespace {
std::vector<mpz_class> zvec(std::initializer_list<long> vs) {
  std::vector<mpz_class> out;
  for (long v : vs) out.emplace_back(v);
  return out;
}

SequenceWindow gen_count(const std::string& spec, size_t count) {
  GenerateOptions opt;
  opt.count = count;
  return generate(SequenceSpec::parse(spec), opt);
}
}  // namespace

TEST_CASE("ratio sets enumerate exact pairwise quotients at least one") {
  RatioSet q = ratio_set(zvec({1, 2, 4, 8}));
  CHECK(q.depth == 4);
  CHECK(q.ratios == std::vector<mpq_class>({1, 2, 4, 8}));
  RatioSet fib = ratio_set(zvec({1, 2, 3, 5}));
  CHECK(fib.ratios == std::vector<mpq_class>({mpq_class(1), mpq_class(3, 2), mpq_class(5, 3),
                                              mpq_class(2), mpq_class(5, 2), mpq_class(3),
                                              mpq_class(5)}));
  // Depth prefix: only the first two values contribute.
  RatioSet pre = ratio_set(zvec({1, 2, 3, 5}), 2);
  CHECK(pre.ratios == std::vector<mpq_class>({1, 2}));
  CHECK_THROWS(ratio_set(zvec({3, 2})));  // not ascending
}

TEST_CASE("epsilon table of powers of two halves at each level") {
  SequenceWindow w = gen_count("power_tower:2", 30);
  RatioSet q = ratio_set(w.values, 30);
  EpsilonTable tab = epsilon_table(q, 3);
  REQUIRE(tab.entries.size() == 3);
  CHECK(tab.entries[0].k == 1);
  CHECK(tab.entries[0].eps == 1);
  CHECK(tab.entries[1].eps == mpq_class(1, 2));
  CHECK(tab.entries[2].eps == mpq_class(1, 4));
  CHECK_FALSE(tab.budget_exhausted);
  // Attaining tuples start at one, stay weakly decreasing, and sum to eps.
  for (const auto& e : tab.entries) {
    REQUIRE(!e.tuple.empty());
    CHECK(e.tuple[0] == 1);
    mpq_class s = 0;
    for (const auto& t : e.tuple) s += t;
    CHECK(abs(s) == e.eps);
  }
}

TEST_CASE("epsilon values never increase with k") {
  SequenceWindow w = gen_count("fibonacci", 25);
  EpsilonTable tab = epsilon_table(ratio_set(w.values, 25), 4);
  REQUIRE(tab.entries.size() >= 2);
  CHECK(tab.entries[0].eps == 1);
  for (size_t i = 1; i < tab.entries.size(); ++i) {
    CHECK(tab.entries[i].eps <= tab.entries[i - 1].eps);
    CHECK(tab.entries[i].eps > 0);
  }
}

TEST_CASE("discreteness proxy separates powers of two from the naturals") {
  SequenceWindow p2 = gen_count("power_tower:2", 30);
  DiscretenessReport stable =
      discreteness_proxy(ratio_set(p2.values, 30), mpq_class(4), mpq_class(1, 10));
  CHECK(stable.verdict == Discreteness::Stable);
  REQUIRE(!stable.rows.empty());
  CHECK(stable.rows.back().count == 3);  // {1, 2, 4}

  std::vector<mpz_class> nat;
  for (long v = 1; v <= 60; ++v) nat.emplace_back(v);
  DiscretenessReport acc = discreteness_proxy(ratio_set(nat), mpq_class(4), mpq_class(1, 10));
  CHECK(acc.verdict == Discreteness::Accumulating);
  CHECK(acc.pair_hi > acc.pair_lo);
  CHECK(acc.pair_hi - acc.pair_lo < mpq_class(1, 10));
}

TEST_CASE("identity model fits powers of two with zero deviation") {
  SequenceWindow w = gen_count("power_tower:2", 40);
  auto model = default_model(w);
  REQUIRE(model.has_value());
  CHECK(model->kind == LambdaModelKind::Identity);
  GeometricWitness wit = construct_witness(w, *model);
  CHECK(wit.ok);
  CHECK(wit.r == 0);
  CHECK(wit.Theta == 0);
  CHECK(wit.c_lower == 2);
  CHECK(wit.growth_ok);
  CHECK(wit.growth_delta == 1);
  CHECK(wit.growth_b == 2);
  for (const auto& cl : wit.clauses) CHECK(cl.ok);
  // Identity scaffold: every element is its own anchor.
  CHECK(wit.anchor_values.size() == w.size());
}

TEST_CASE("golden-ratio model fits fibonacci within deviation one half") {
  SequenceWindow w = gen_count("fibonacci", 60);
  auto model = default_model(w);
  REQUIRE(model.has_value());
  CHECK(model->kind == LambdaModelKind::PowerModel);
  GeometricWitness wit = construct_witness(w, *model);
  CHECK(wit.ok);
  // The max deviation over the positive window is attained at the first
  // element: |F_1 - phi/sqrt(5)| = (5 - sqrt(5))/10 = 0.2763932...  The
  // certified bound must enclose it tightly from above.
  CHECK(wit.r < mpq_class(1, 2));
  CHECK(wit.r > mpq_class(27639, 100000));
  CHECK(wit.r < mpq_class(27640, 100000));
  CHECK(wit.Theta == 3 * wit.r);
  CHECK(wit.theta_max <= wit.Theta);
  CHECK(wit.c_lower > 1);
  CHECK(wit.growth_ok);
  CHECK(wit.growth_b == mpq_class(3, 2));
}

TEST_CASE("deviation overrides that cannot be certified are refused") {
  SequenceWindow w = gen_count("fibonacci", 40);
  auto model = default_model(w);
  REQUIRE(model.has_value());
  WitnessConfig cfg;
  cfg.r_override = mpq_class(1, 100);  // fibonacci deviates by almost 1/2
  CHECK_THROWS_AS(construct_witness(w, *model, cfg), Error);
}

TEST_CASE("no certified model exists for primes or explicit windows") {
  GenerateOptions b;
  b.value_bound = 1000;
  SequenceWindow primes = generate(SequenceSpec::parse("primes"), b);
  CHECK_FALSE(default_model(primes).has_value());
  SequenceWindow expl = window_from_values(zvec({3, 17, 40}));
  CHECK_FALSE(default_model(expl).has_value());
}

TEST_CASE("bounded support: three-fold signed sums of powers of two decompose") {
  SequenceWindow w = gen_count("power_tower:2", 40);
  auto model = default_model(w);
  REQUIRE(model.has_value());
  GeometricWitness wit = construct_witness(w, *model);
  EpsilonTable eps = epsilon_table(ratio_set(w.values, 30), 3);
  // Targets drawn from the three-fold signed sumset: 5 = 4+1, -70 = -64-4-2,
  // 100 = 64+32+4, 1000 = 1024-16-8.
  std::vector<mpz_class> targets = {mpz_class(5), mpz_class(-70), mpz_class(100),
                                    mpz_class(1000)};
  SupportClaimReport rep = check_bounded_support(w, wit, eps, 3, targets);
  CHECK(rep.all_ok);
  CHECK(rep.n == 3);
  CHECK(rep.d0 == wit.Theta);
  CHECK(rep.d == 3 * rep.d0);
  // With Theta = 0 the remainder is forced to zero and parts are genuinely
  // bounded by c * |target|.
  for (const auto& s : rep.samples) {
    CHECK(s.ok);
    CHECK(s.q == 0);
    mpz_class sum = s.q;
    for (const auto& p : s.parts) sum += p;
    CHECK(sum == s.target);
    for (const auto& p : s.parts) CHECK(mpq_class(abs(p)) < rep.c * mpq_class(abs(s.target)));
  }
}

TEST_CASE("bounded support on fibonacci carries a nonzero remainder budget") {
  SequenceWindow w = gen_count("fibonacci", 40);
  auto model = default_model(w);
  REQUIRE(model.has_value());
  GeometricWitness wit = construct_witness(w, *model);
  EpsilonTable eps = epsilon_table(ratio_set(w.values, 20), 2);
  // 7 = 5+2 and 89+34 = 123 live in the two-fold sumset.
  std::vector<mpz_class> targets = {mpz_class(7), mpz_class(123)};
  SupportClaimReport rep = check_bounded_support(w, wit, eps, 2, targets);
  CHECK(rep.all_ok);
  CHECK(rep.d > 0);
  for (const auto& s : rep.samples) {
    CHECK(s.ok);
    CHECK(mpq_class(abs(s.q)) <= rep.d);
    mpz_class sum = s.q;
    for (const auto& p : s.parts) sum += p;
    CHECK(sum == s.target);
  }
}
