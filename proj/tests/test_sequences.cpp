// Sequence specs, window generation, and ingestion.  Oracles are the opening
// terms of classical sequences (Fibonacci, Lucas, squares, primes, powers of
// two) plus round-trip identities for the serialization formats.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

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

SequenceWindow gen_bound(const std::string& spec, long bound) {
  GenerateOptions opt;
  opt.value_bound = bound;
  return generate(SequenceSpec::parse(spec), opt);
}
}  // namespace

TEST_CASE("fibonacci window holds the canonical distinct values") {
  SequenceWindow w = gen_bound("fibonacci", 100);
  CHECK(w.values == zvec({1, 2, 3, 5, 8, 13, 21, 34, 55, 89}));
  CHECK(w.complete_through == 100);
  CHECK(w.contains(mpz_class(55)));
  CHECK_FALSE(w.contains(mpz_class(4)));
  CHECK(w.count_upto(mpz_class(55)) == 9);
  CHECK(w.count_upto(mpz_class(1)) == 1);
}

TEST_CASE("count-mode generation returns the smallest distinct values") {
  SequenceWindow w = gen_count("fibonacci", 8);
  CHECK(w.values == zvec({1, 2, 3, 5, 8, 13, 21, 34}));
  CHECK(w.complete_through == 34);
  SequenceWindow t = gen_count("power_tower:2", 5);
  CHECK(t.values == zvec({1, 2, 4, 8, 16}));
}

TEST_CASE("named specs produce their textbook openings") {
  CHECK(gen_count("lucas", 6).values == zvec({1, 2, 3, 4, 7, 11}));
  CHECK(gen_count("pell", 6).values == zvec({1, 2, 5, 12, 29, 70}));
  CHECK(gen_count("padovan", 7).values == zvec({1, 2, 3, 4, 5, 7, 9}));
  CHECK(gen_count("perrin", 6).values == zvec({2, 3, 5, 7, 10, 12}));
  CHECK(gen_bound("primes", 30).values == zvec({2, 3, 5, 7, 11, 13, 17, 19, 23, 29}));
  CHECK(gen_bound("squares", 100).values == zvec({1, 4, 9, 16, 25, 36, 49, 64, 81, 100}));
  CHECK(gen_bound("odd_squares", 130).values == zvec({1, 9, 25, 49, 81, 121}));
  CHECK(gen_count("naturals", 5).values == zvec({0, 1, 2, 3, 4}));
  CHECK(gen_count("factorials", 5).values == zvec({1, 2, 6, 24, 120}));
}

TEST_CASE("polynomial specs evaluate low-first coefficients at n = 0, 1, ...") {
  SequenceWindow sq = gen_bound("polynomial:0,0,1", 100);
  CHECK(sq.values == zvec({1, 4, 9, 16, 25, 36, 49, 64, 81, 100}));
  SequenceWindow ap = gen_bound("polynomial:3,7", 50);
  CHECK(ap.values == zvec({3, 10, 17, 24, 31, 38, 45}));
}

TEST_CASE("recurrence spec with exponential-plus-linear closed form") {
  // a_{n+3} = 4 a_{n+2} - 5 a_{n+1} + 2 a_n seeded 1, 3, 6 gives a_n = 2^n + n.
  SequenceWindow w = gen_count("recurrence:1,3,6;2,-5,4", 8);
  CHECK(w.values == zvec({1, 3, 6, 11, 20, 37, 70, 135}));
  for (size_t i = 0; i + 3 < w.values.size(); ++i)
    CHECK(w.values[i + 3] == 4 * w.values[i + 2] - 5 * w.values[i + 1] + 2 * w.values[i]);
}

TEST_CASE("floor-geometric spec with integer ratio is exact powers") {
  SequenceWindow w = gen_count("floor_geometric:1;2", 6);
  CHECK(w.values == zvec({1, 2, 4, 8, 16, 32}));
}

TEST_CASE("explicit specs keep the given support, sorted and deduplicated") {
  SequenceWindow w = gen_bound("explicit:7,3,3,11", 100);
  CHECK(w.values == zvec({3, 7, 11}));
  CHECK(w.complete_through >= 11);
}

TEST_CASE("spec text round trips through parse and str") {
  for (const char* text : {"fibonacci", "power_tower:2", "polynomial:0,0,1", "primes",
                           "recurrence:0,1;1,1", "explicit:3,1,2", "factorials"}) {
    SequenceSpec s = SequenceSpec::parse(text);
    SequenceSpec again = SequenceSpec::parse(s.str());
    CHECK(again.str() == s.str());
  }
  CHECK_THROWS(SequenceSpec::parse("no_such_generator"));
  CHECK_THROWS(SequenceSpec::parse("recurrence:1,2"));  // missing coefficients
  CHECK_THROWS(SequenceSpec::parse(""));
}

TEST_CASE("window serialization round trips through text ingestion") {
  SequenceWindow w = gen_bound("fibonacci", 200);
  SequenceWindow back = ingest(serialize_text(w));
  CHECK(back.values == w.values);
  // Text files carry no completeness metadata; ingestion certifies only up
  // to the largest listed value.
  CHECK(back.complete_through == w.values.back());
  // The JSON export is a one-way report format, not an ingest format.
  std::string j = serialize_json(w);
  CHECK(j.find("sequence_window_v1") != std::string::npos);
  CHECK(j.find("\"144\"") != std::string::npos);
}

TEST_CASE("ingest accepts bare number lists and rejects garbage") {
  SequenceWindow w = ingest("3\n1\n2\n");
  CHECK(w.values == zvec({1, 2, 3}));
  SequenceWindow ja = ingest("[5, 2, 9]");
  CHECK(ja.values == zvec({2, 5, 9}));
  CHECK_THROWS_AS(ingest("1\nnot-a-number\n"), Error);
  CHECK_THROWS(ingest(""));
}

TEST_CASE("window_from_values filters to positive support by default") {
  SequenceWindow w = window_from_values(zvec({5, -3, 0, 2, 5}));
  CHECK(w.values == zvec({2, 5}));
  // Windows model subsets of the naturals: zero is admitted on request,
  // negatives never are.
  SequenceWindow all = window_from_values(zvec({5, -3, 0, 2}), false);
  CHECK(all.values == zvec({0, 2, 5}));
}

TEST_CASE("unrolled initial terms from a characteristic polynomial") {
  // Power sums of the roots of x^2 - x - 1 start 2, 1 (Lucas seeds).
  CHECK(trace_sequence_initials(zvec({-1, -1, 1})) == zvec({2, 1}));
  // x^3 - x - 1 (plastic ratio) gives the Perrin seeds 3, 0, 2.
  CHECK(trace_sequence_initials(zvec({-1, -1, 0, 1})) == zvec({3, 0, 2}));
}

TEST_CASE("generation guards: bit cap and missing limits") {
  GenerateOptions opt;
  opt.count = 40;
  opt.bit_cap = 16;
  CHECK_THROWS_AS(generate(SequenceSpec::parse("power_tower:2"), opt), Error);
  GenerateOptions none;
  CHECK_THROWS(generate(SequenceSpec::parse("fibonacci"), none));
}

TEST_CASE("explicit generators exhaust gracefully under count requests") {
  GenerateOptions opt;
  opt.count = 50;
  SequenceWindow w = generate(SequenceSpec::parse("explicit:1,2,3"), opt);
  CHECK(w.values == zvec({1, 2, 3}));
}
