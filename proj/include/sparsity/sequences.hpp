// Sequence generators and canonical windows.
//
// A window is the finite prefix of an infinite subset of the naturals,
// canonicalized: sorted strictly increasing, deduplicated, nonnegative
// (strictly positive under positive_only, the default).  raw_index keeps, for
// every canonical element, the first generator index that produced it; exact
// recurrence identities and Binet-style models are always checked against raw
// indices, never against canonical positions.  complete_through records the
// value up to which the enumeration of the set is certified complete; every
// bounded search downstream refuses to read past it.
//
// Generators: power towers q1^(q2^(...^(qt^n))), factorials, bit-exact
// floor(c * b^n) over real quadratic fields, linear recurrences
// a_{n+1} = c_d a_n + ... + c_0 a_{n-d}, integer polynomials in n, primes
// (deterministic sieve), explicit lists, each optionally perturbed by a
// finite offset set F (A + F, with an optional subset selector into F).
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsity/qfield.hpp"
#include "sparsity/util.hpp"

namespace sparsity {

enum class GenKind { PowerTower, Factorial, FloorGeometric, Recurrence, Polynomial, Primes, Explicit };

struct RecurrenceSpec {
  std::vector<mpz_class> init;   // a_0 .. a_d
  std::vector<mpz_class> coeff;  // c_0 .. c_d

  void validate() const;
  int order() const { return static_cast<int>(coeff.size()) - 1; }  // = d
};

struct SequenceSpec {
  GenKind kind = GenKind::Explicit;
  std::vector<unsigned long> tower;         // PowerTower: q_1, ..., q_t
  QuadExpr fg_c, fg_b;                      // FloorGeometric
  RecurrenceSpec rec;                       // Recurrence
  std::vector<mpz_class> poly;              // Polynomial: low-first coefficients
  std::vector<mpz_class> explicit_values;   // Explicit
  std::vector<mpz_class> offsets;           // perturbation F; empty = no perturbation
  std::vector<size_t> offsets_subset;       // indices into offsets; empty = all
  bool positive_only = true;
  std::string name;

  // CLI surface syntax, e.g. "power_tower:2", "recurrence:0,1;1,1",
  // "floor_geometric:1/sqrt(5);(1+sqrt(5))/2", "polynomial:0,0,1",
  // "fibonacci", "primes", "explicit:1,2,3".
  static SequenceSpec parse(const std::string& text);
  std::string str() const;
};

struct SequenceWindow {
  std::vector<mpz_class> values;   // canonical
  std::vector<long> raw_index;     // first generator index per element; -1 if unknown
  mpz_class complete_through = 0;  // enumeration certified complete up to here
  SequenceSpec spec;

  size_t size() const { return values.size(); }
  bool contains(const mpz_class& v) const;
  // Count |A intersect [1, n]| by binary search (never counts 0).
  size_t count_upto(const mpz_class& n) const;
};

struct GenerateOptions {
  size_t count = 0;                       // stop after this many canonical elements (0 = unbounded)
  std::optional<mpz_class> value_bound;   // and/or: collect all elements <= bound
  unsigned long bit_cap = 1u << 20;       // reject raw values above this many bits
};

SequenceWindow generate(const SequenceSpec& spec, const GenerateOptions& opts);
SequenceWindow generate_count(const SequenceSpec& spec, size_t count);

// Canonicalizes explicit values into a window (tests and ingestion).
SequenceWindow window_from_values(std::vector<mpz_class> vals, bool positive_only = true);

// File ingestion: one integer per line, or a JSON array; rejects empty input
// and non-integer tokens with a line/position diagnostic.
SequenceWindow ingest(const std::string& file_content);
SequenceWindow ingest_file(const std::string& path);

std::string serialize_text(const SequenceWindow& w);
std::string serialize_json(const SequenceWindow& w);

// Power sums p_k = sum of k-th powers of the roots of a monic polynomial
// (Newton's identities, exact); p_0 .. p_{deg-1} seed trace sequences.
std::vector<mpz_class> trace_sequence_initials(const std::vector<mpz_class>& monic_low_first);

}  // namespace sparsity
