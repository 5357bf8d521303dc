// Iterated sumset engine.
//
// Dense route: bit-parallel shift-OR convolution over a symmetric universe
// [-B, B].  k-fold sums and unions Sigma_n = U_{k<=n} k(X) are computed over
// the widened internal window [-nB0, nB0] (B0 = base universe) so sums that
// exit the requested range at intermediate steps and return are still found;
// the image is exact for the truncated source set, and `truncated` records
// whether any source element fell outside the base universe.
//
// Sparse route: meet-in-the-middle search for representations of a single
// target as a sum of at most n (optionally signed) window elements drawn
// from the first M+1 canonical elements, repeats allowed.  "Not found" is
// always qualified by (n, M): the engine never asserts non-membership beyond
// its enumeration bounds.
//
// Coset detection scans residue classes of every modulus up to max_modulus
// for full cosets m*Z + r (or one-sided progressions) contained in the image
// on a verified range shrunk by slack = fold * (smallest source element) to
// avoid boundary artifacts; a returned witness is re-checked by direct
// membership scan, and a "none" answer carries the search bounds.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsity/sequences.hpp"
#include "sparsity/util.hpp"

namespace sparsity {

struct Provenance {
  std::string kind;          // "signed_closure" | "one_sided_base" | "iterated_sumset" | "sigma" | "sparse_realized"
  int fold = 1;              // k (for sigma: max k)
  bool signed_base = false;
  mpz_class smallest_source = 0;  // smallest positive source element
};

class DenseImage {
 public:
  explicit DenseImage(int64_t bound);

  int64_t bound() const { return bound_; }
  bool test(int64_t x) const;
  void set(int64_t x);
  size_t popcount() const;
  std::vector<int64_t> members() const;
  bool is_symmetric() const;

  // dst |= src shifted by s (indices are values; out-of-range bits drop).
  static void or_shifted(DenseImage& dst, const DenseImage& src, int64_t s);

 private:
  int64_t bound_;
  std::vector<uint64_t> bits_;
  size_t idx(int64_t x) const { return static_cast<size_t>(x + bound_); }
};

struct SumsetImage {
  DenseImage img;
  Provenance prov;
  bool truncated = false;
  std::vector<int64_t> base_elements;  // source elements inside the universe

  int64_t bound() const { return img.bound(); }
};

inline constexpr int64_t kDenseUniverseCap = int64_t(1) << 27;  // bits per side

// X = {+-a : a in window, a <= bound} (signed) or {a : a <= bound} (one-sided).
SumsetImage signed_closure(const SequenceWindow& w, int64_t bound);
SumsetImage one_sided_base(const SequenceWindow& w, int64_t bound);

SumsetImage iterated_sumset(const SumsetImage& base, int k);  // exactly-k-fold sums
SumsetImage sigma_union(const SumsetImage& base, int n);      // U_{1<=k<=n} k(X)

std::string image_to_json(const SumsetImage& s);

enum class CosetMode { Auto, Full, OneSided };

struct CosetWitness {
  long modulus = 0;
  long residue = 0;
  bool one_sided = false;
  int64_t range_lo = 0, range_hi = 0;  // verified range
  int fold = 0;
};

struct CosetScan {
  std::optional<CosetWitness> witness;
  long max_modulus = 0;
  int64_t scan_lo = 0, scan_hi = 0;  // range actually scanned
  int64_t slack = 0;
};

CosetScan detect_coset(const SumsetImage& s, long max_modulus, long margin = 10,
                       CosetMode mode = CosetMode::Auto);

struct SparseTerm {
  size_t index;  // canonical window index
  int sign;      // +1 / -1
};

struct SparseResult {
  bool found = false;
  std::vector<SparseTerm> terms;  // sum of sign*value equals the target
  int max_terms = 0;
  size_t index_bound = 0;
};

SparseResult sparse_membership(const SequenceWindow& w, const mpz_class& target, int n, bool use_signs,
                               size_t M);

// Realizes membership of every target in [-range, range] through the sparse
// engine (n terms, signed, index bound M) as a dense image for coset scans.
SumsetImage realize_sparse_range(const SequenceWindow& w, int n, int64_t range, size_t M);

}  // namespace sparsity
