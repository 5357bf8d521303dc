// Arithmetic-progression search (fast vs brute-force oracle), strong
// containment, the per-fold AP probe, and half-graph order-property
// witnesses.  Oracles: hand-built sets with known maximal progressions,
// squares (whose three-term APs like 1,25,49 are classical and which admit
// no four-term AP), and the naturals, which realize every half-graph length.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "sparsity/progressions.hpp"
#include "sparsity/sequences.hpp"
#include "sparsity/util.hpp"

using namespace sparsity;

namespace {
SequenceWindow gen_count(const std::string& spec, size_t count) {
  GenerateOptions opt;
  opt.count = count;
  return generate(SequenceSpec::parse(spec), opt);
}

SequenceWindow gen_bound(const std::string& spec, long bound) {
  GenerateOptions opt;
  opt.value_bound = bound;
  return generate(SequenceSpec::parse(spec), opt);
}
}  // namespace

TEST_CASE("longest AP in a small hand-checked set") {
  std::vector<int64_t> s = {1, 3, 5, 7, 10};
  auto ap = longest_ap(s);
  REQUIRE(ap.has_value());
  CHECK(ap->start == 1);
  CHECK(ap->diff == 2);
  CHECK(ap->length == 4);
  auto brute = longest_ap_brute(s);
  REQUIRE(brute.has_value());
  CHECK(brute->length == 4);
  // Below min_length the answer is empty, not a short witness.
  CHECK_FALSE(longest_ap({1, 2, 10, 20}, 3).has_value());
  CHECK(longest_ap({1, 2, 10, 20}, 2).has_value());
}

TEST_CASE("squares up to 100 contain a three-term AP but length stops there") {
  std::vector<int64_t> sq;
  for (int64_t k = 1; k * k <= 10000; ++k) sq.push_back(k * k);
  auto ap = longest_ap(sq);
  REQUIRE(ap.has_value());
  CHECK(ap->length == 3);  // e.g. 1, 25, 49; four-term APs of squares do not exist
  auto brute = longest_ap_brute(sq);
  REQUIRE(brute.has_value());
  CHECK(brute->length == 3);
  CHECK(ap->diff == brute->diff);
  CHECK(ap->start == brute->start);
}

TEST_CASE("fast and brute AP search agree on random sets") {
  std::mt19937_64 rng(31415926);
  std::uniform_int_distribution<int> size_d(3, 40);
  std::uniform_int_distribution<int64_t> val_d(1, 200);
  for (int it = 0; it < 300; ++it) {
    std::set<int64_t> vals;
    const int sz = size_d(rng);
    while (static_cast<int>(vals.size()) < sz) vals.insert(val_d(rng));
    std::vector<int64_t> s(vals.begin(), vals.end());
    auto fast = longest_ap(s, 2);
    auto brute = longest_ap_brute(s, 2);
    REQUIRE(fast.has_value() == brute.has_value());
    if (fast) {
      CHECK(fast->length == brute->length);
      CHECK(fast->diff == brute->diff);
      CHECK(fast->start == brute->start);
    }
  }
}

TEST_CASE("AP witnesses verify against windows, tampered ones do not") {
  SequenceWindow w = gen_bound("squares", 10000);
  APWitness good;
  good.start = 1;
  good.diff = 24;
  good.length = 3;  // 1, 25, 49
  CHECK(verify_ap(w, good));
  APWitness bad = good;
  bad.length = 4;  // 73 is not a square
  CHECK_FALSE(verify_ap(w, bad));
}

TEST_CASE("strong containment demands absent reflections") {
  // In {2,3,4,5} the AP 3,4,5 is present but 2 = 3-1 reflects into the set,
  // while the AP starting at 2 has no reflection inside the positives.
  SequenceWindow w = window_from_values({mpz_class(2), mpz_class(3), mpz_class(4), mpz_class(5)});
  auto wits = strongly_contained_aps(w, 3);
  REQUIRE(!wits.empty());
  for (const auto& ap : wits) {
    CHECK(ap.strongly_contained);
    CHECK(verify_ap(w, ap));
    // Reflected points really are absent.
    for (int64_t i = 1; i < ap.length; ++i)
      CHECK_FALSE(w.contains(mpz_class(ap.start - i * ap.diff)));
  }
  // Powers of two carry no three-term AP at all, strongly contained or not.
  SequenceWindow p2 = gen_count("power_tower:2", 30);
  CHECK(strongly_contained_aps(p2, 3).empty());
}

TEST_CASE("AP probe sees growing progressions in square sumsets, none in fibonacci") {
  SequenceWindow sq = gen_bound("squares", 20000);
  APSparseProbe probe = ap_sparse_probe(sq, 3, 20000);
  REQUIRE(probe.entries.size() == 3);
  const auto& fold3 = probe.entries[2];
  REQUIRE(fold3.at_full.longest.has_value());
  // Sigma_3 of the squares covers a full progression; stride-limited dense
  // scanning still certifies very long runs.
  CHECK(fold3.at_full.longest->length >= 2500);
  CHECK(fold3.growing);

  // Fibonacci sumsets do contain incidental progressions, but their length
  // stops growing with the bound — the signature of a sparse image.
  SequenceWindow fib = gen_bound("fibonacci", 20000);
  APSparseProbe fprobe = ap_sparse_probe(fib, 3, 20000);
  for (const auto& e : fprobe.entries) {
    CHECK_FALSE(e.growing);
    if (e.at_full.longest && e.at_half.longest)
      CHECK(e.at_full.longest->length < 2 * e.at_half.longest->length);
  }
}

TEST_CASE("order property: naturals realize any half-graph length") {
  SequenceWindow w = gen_count("naturals", 400);
  OrderPropertySearch s = order_property_witness(w, 10);
  REQUIRE(s.witness.has_value());
  CHECK(s.witness->k == 10);
  CHECK(s.witness->b.size() == 10);
  CHECK(s.witness->c.size() == 10);
  CHECK(verify_order_property(w, *s.witness));
  // Tampering with one comparison point must break the biconditional.
  OrderPropertyWitness bad = *s.witness;
  bad.c[0] += 1;
  CHECK_FALSE(verify_order_property(w, bad));
}

TEST_CASE("order property: fibonacci admits short witnesses") {
  SequenceWindow w = gen_bound("fibonacci", 100000);
  OrderPropertySearch s = order_property_witness(w, 3);
  REQUIRE(s.witness.has_value());
  CHECK(verify_order_property(w, *s.witness));
}

TEST_CASE("order property: powers of two refuse lengths 3 through 6 with bounds") {
  SequenceWindow w = gen_bound("power_tower:2", 1000000);
  for (long k = 3; k <= 6; ++k) {
    OrderPropertySearch s = order_property_witness(w, k);
    CHECK_FALSE(s.witness.has_value());
    CHECK(s.k == k);
    // A refusal must document how much was searched.
    CHECK(s.pairs_examined + s.grid_cells_examined > 0);
  }
}
