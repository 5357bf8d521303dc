// Arithmetic-progression search and half-graph order-property witnesses.
//
// longest_ap finds a maximum-length AP in a finite integer set by hash-set
// extension over sorted pairs, pruned so every maximal AP is walked exactly
// once from its true start (a-d absent); the independent brute-force oracle
// walks every pair with no pruning.  Ties break by smallest difference, then
// smallest start.
//
// A progression (a+id, i<n) is strongly contained when every reflected point
// a-id (1<=i<n) is absent; when a <= d and the set is positive, reflected
// points are negative and absence is automatic.  The order-property search
// turns strongly contained progressions into half-graph tuples b_i=(i-1)d,
// c_i=a+b_i with c_j-b_i in A iff i<=j — the instability pattern for the
// formula y-x in A — verifying both directions of the biconditional by
// direct membership.  "None found" answers always carry the search bounds;
// nothing here ever claims the pattern is absent beyond them.
//
// The ap probe inspects Sigma_k(A) images: exact AP search when the image is
// small, a bounded-stride scan (differences <= stride_cap, flagged) when it
// is dense, with lengths compared at half and full bound to expose growth.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <vector>

#include "sparsity/sequences.hpp"
#include "sparsity/sumset.hpp"

namespace sparsity {

struct APWitness {
  mpz_class start;
  mpz_class diff;       // >= 1
  int64_t length = 0;   // number of terms
  bool strongly_contained = false;
};

// Maximum-length AP among the values of S (duplicates ignored); nullopt when
// the best length is below min_length.  min_length >= 2.
std::optional<APWitness> longest_ap(const std::vector<int64_t>& S, int64_t min_length = 3);
std::optional<APWitness> longest_ap_brute(const std::vector<int64_t>& S, int64_t min_length = 3);

// Terms present; for strongly_contained witnesses, reflected points absent.
bool verify_ap(const SequenceWindow& w, const APWitness& ap);

// All maximal strongly contained APs of length >= min_length whose first two
// terms lie among the first `subwindow` canonical values (0 = no cap).
// Walks and membership checks run against the full window.
std::vector<APWitness> strongly_contained_aps(const SequenceWindow& w, int64_t min_length,
                                              size_t subwindow = 0);

struct APSearchResult {
  std::optional<APWitness> longest;
  bool stride_limited = false;  // dense path: only differences <= stride_cap scanned
  int64_t stride_cap = 0;
  int64_t bound = 0;
  size_t member_count = 0;
};

struct APSparseEntry {
  int fold = 0;
  APSearchResult at_half;  // bound/2
  APSearchResult at_full;  // bound
  bool growing = false;    // full-length >= 2 * half-length
};

struct APSparseProbe {
  std::vector<APSparseEntry> entries;
  int64_t bound = 0;
  int64_t min_length = 0;
};

APSparseProbe ap_sparse_probe(const SequenceWindow& w, int max_fold, int64_t bound,
                              int64_t min_length = 3, size_t dense_threshold = 4096,
                              int64_t stride_cap = 64);

// Longest AP inside a finite image restricted to [1, bound]: exact when the
// member count is at most dense_threshold, stride-limited otherwise.
APSearchResult image_longest_ap(const SumsetImage& img, int64_t bound, int64_t min_length,
                                size_t dense_threshold, int64_t stride_cap);

struct OrderPropertyWitness {
  long k = 0;
  std::vector<mpz_class> b, c;   // c_j - b_i in A  iff  i <= j
  mpz_class ap_start, ap_diff;   // generating progression
};

struct OrderPropertyOptions {
  size_t subwindow = 2048;  // canonical prefix examined for start pairs
  size_t grid_d = 64;       // fallback grid: distinct consecutive gaps tried
  size_t grid_a = 256;      // fallback grid: start values tried
};

struct OrderPropertySearch {
  std::optional<OrderPropertyWitness> witness;
  long k = 0;
  size_t subwindow = 0;
  size_t pairs_examined = 0;
  size_t grid_cells_examined = 0;
};

// Searches for a length-k half-graph witness: primary pass over start pairs
// from the canonical prefix, fallback over a (gap, start) grid.  Every
// returned witness has been re-verified by verify_order_property.
OrderPropertySearch order_property_witness(const SequenceWindow& w, long k,
                                           const OrderPropertyOptions& opts = {});

// Direct biconditional check of c_j - b_i in A iff i <= j; errors when a
// positive query exceeds the window's certified coverage.
bool verify_order_property(const SequenceWindow& w, const OrderPropertyWitness& wit);

}  // namespace sparsity
