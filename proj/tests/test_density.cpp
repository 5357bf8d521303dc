// Counting functions, density ladders (lower and Banach), logarithmic growth
// profiles, the per-fold delta probe, and the perturbation inflation bound.
// Oracles: arithmetic progressions have exactly computable densities, powers
// of two and factorials have bounded A(n)/log n while squares do not.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <vector>

#include "sparsity/density.hpp"
#include "sparsity/sequences.hpp"
#include "sparsity/sumset.hpp"
#include "sparsity/util.hpp"

using namespace sparsity;

namespace {
SequenceWindow gen_bound(const std::string& spec, long bound) {
  GenerateOptions opt;
  opt.value_bound = bound;
  return generate(SequenceSpec::parse(spec), opt);
}

mpq_class qabs(const mpq_class& v) { return v < 0 ? mpq_class(-v) : v; }
}  // namespace

TEST_CASE("counting matches hand counts and guards its horizon") {
  SequenceWindow w = gen_bound("fibonacci", 100);
  CHECK(counting(w, 55) == 9);
  CHECK(counting(w, 54) == 8);
  CHECK(counting(w, 1) == 1);
  CHECK(counting(w, 100) == 10);
  CHECK_THROWS_AS(counting(w, 101), Error);
}

TEST_CASE("lower density of the progression 7k+3 converges to 1/7") {
  SequenceWindow w = gen_bound("polynomial:3,7", 100000);
  DensityLadder at_top = lower_density_estimate(w, 100000, 100000);
  REQUIRE(at_top.samples.size() == 1);
  CHECK(qabs(at_top.samples[0].ratio - mpq_class(1, 7)) < mpq_class(1, 1000));
  // A full ladder dips lower at small scales but never below the exact
  // count; the minimum is attained somewhere and reported with its scale.
  DensityLadder full = lower_density_estimate(w, 16, 100000);
  CHECK(full.min_ratio <= at_top.samples[0].ratio);
  CHECK(full.argmin_n >= 16);
  for (const auto& s : full.samples) CHECK(s.count == counting(w, s.n));
}

TEST_CASE("banach density of multiples of ten is exactly one tenth") {
  SequenceWindow w = gen_bound("polynomial:0,10", 20000);
  BanachLadder lad = banach_density_estimate(w, 1000);
  REQUIRE(!lad.samples.empty());
  const BanachSample& top = lad.samples.back();
  CHECK(top.len == 1000);
  CHECK(top.ratio == mpq_class(1, 10));
  // Length-1 windows can always be centered on a member.
  CHECK(lad.samples.front().ratio == 1);
  CHECK_FALSE(lad.clamped);
}

TEST_CASE("banach density dominates the aligned prefix density") {
  std::mt19937_64 rng(555333);
  std::uniform_int_distribution<long> val(1, 500);
  for (int it = 0; it < 20; ++it) {
    std::set<long> vals;
    for (int i = 0; i < 60; ++i) vals.insert(val(rng));
    std::vector<mpz_class> zs;
    for (long v : vals) zs.emplace_back(v);
    SequenceWindow w = window_from_values(std::move(zs));
    w.complete_through = 500;
    BanachLadder lad = banach_density_estimate(w, 256);
    for (const auto& s : lad.samples) {
      mpq_class aligned(static_cast<long>(counting(w, s.len)), static_cast<long>(s.len));
      aligned.canonicalize();
      CHECK(s.ratio >= aligned);
      // The reported best window really contains that many members.
      int64_t direct = 0;
      for (const auto& v : w.values)
        if (v > s.best_start && v <= s.best_start + s.len) ++direct;
      CHECK(direct == s.max_count);
    }
  }
}

TEST_CASE("log-growth ratio is bounded for powers of two, divergent for squares") {
  SequenceWindow p2 = gen_bound("power_tower:2", 100000);
  LogGrowthProfile prof = log_growth_ratio(p2, 10, 100000);
  CHECK(prof.sup_ratio > 1.0);
  CHECK(prof.sup_ratio < 2.5);
  // The running sup settles: no growth between the last two decades.
  CHECK(prof.running_sup_at(100000) <= 1.10 * prof.running_sup_at(1000));

  SequenceWindow sq = gen_bound("squares", 100000);
  LogGrowthProfile sprof = log_growth_ratio(sq, 10, 100000);
  CHECK(sprof.running_sup_at(100000) > 5.0 * sprof.running_sup_at(10));
  CHECK(sprof.arg_sup > 10000);
}

TEST_CASE("delta probe refutes squares via a progression and passes fibonacci") {
  SequenceWindow sq = gen_bound("squares", 20000);
  DeltaSparseProbe probe = delta_sparse_probe(sq, 3, 20000, 16);
  REQUIRE(probe.entries.size() == 3);
  CHECK_FALSE(probe.entries[0].coset.witness.has_value());
  const auto& fold3 = probe.entries[2];
  CHECK(fold3.fold == 3);
  REQUIRE(fold3.coset.witness.has_value());
  CHECK(fold3.coset.witness->modulus == 4);
  // Densities grow with the fold for squares.
  CHECK(probe.entries[2].density.min_ratio > probe.entries[0].density.min_ratio);

  SequenceWindow fib = gen_bound("fibonacci", 20000);
  DeltaSparseProbe fprobe = delta_sparse_probe(fib, 4, 20000, 16);
  for (const auto& e : fprobe.entries) CHECK_FALSE(e.coset.witness.has_value());
}

TEST_CASE("perturbation of the even coset by one unit keeps density and inflation") {
  std::vector<mpz_class> evens;
  for (long v = 2; v <= 4000; v += 2) evens.emplace_back(v);
  SequenceWindow w = window_from_values(std::move(evens));
  SumsetImage X = signed_closure(w, 4000);
  REQUIRE(X.img.is_symmetric());
  PerturbationCheck chk = perturbation_density_check(X, {1});
  CHECK(chk.s == 1);
  CHECK(chk.t == 1);
  CHECK(chk.inflation_bound_ok);
  REQUIRE(!chk.samples.empty());
  for (const auto& s : chk.samples) CHECK(s.inflation_ok);
  // Shifting evens by one gives odds: at the top scale both densities are
  // within a whisker of 1/2.
  CHECK(qabs(chk.base_ladder.samples.back().ratio - mpq_class(1, 2)) < mpq_class(1, 100));
  CHECK(qabs(chk.shifted_ladder.samples.back().ratio - mpq_class(1, 2)) < mpq_class(1, 100));
}

TEST_CASE("perturbation check rejects empty and oversized offset sets") {
  std::vector<mpz_class> evens;
  for (long v = 2; v <= 100; v += 2) evens.emplace_back(v);
  SequenceWindow w = window_from_values(std::move(evens));
  SumsetImage X = signed_closure(w, 100);
  CHECK_THROWS_AS(perturbation_density_check(X, {}), Error);
  CHECK_THROWS_AS(perturbation_density_check(X, {200}), Error);
}

TEST_CASE("image density ladder counts positive members of a sumset") {
  std::vector<mpz_class> evens;
  for (long v = 2; v <= 2000; v += 2) evens.emplace_back(v);
  SequenceWindow w = window_from_values(std::move(evens));
  SumsetImage sig = sigma_union(one_sided_base(w, 2000), 1);
  DensityLadder lad = image_density_ladder(sig, 16, 2000);
  CHECK(qabs(lad.min_ratio - mpq_class(1, 2)) <= mpq_class(1, 16));
  CHECK(lad.samples.back().count == 1000);
  CHECK_THROWS_AS(image_density_ladder(sig, 16, 4000), Error);
}
