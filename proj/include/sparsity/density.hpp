// Counting, density estimators, and the delta-sparsity probes.
//
// A(n) = |A ∩ [1,n]| counts positive members only ([n] = {1,...,n}, so 0 is
// never counted even when a window contains it).  liminf / limsup quantities
// are estimated over geometric ladders of scales (factor 2, final point
// pinned to the requested endpoint) and always reported as full ladders:
// finite windows cannot certify limits, so the evidence must expose its
// scale dependence.  Ladder arithmetic is exact rational; floats appear only
// in rendered output.
//
// The delta probe builds one-sided Sigma_n(A) images (exact on [1, B] when
// the window is complete through B, since positive summands cannot cancel)
// and reports, per fold, a density ladder plus any one-sided progression
// witness.  The perturbation check compares X and X+F densities and verifies
// the finite-inflation bound C(n) <= t * B(n+s) with s = max|F|, t = |F|,
// where B counts X over the symmetric range [-(n+s), n+s].
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "sparsity/sequences.hpp"
#include "sparsity/sumset.hpp"

namespace sparsity {

// |w ∩ [1,n]|; errors when the window is not complete through n.
int64_t counting(const SequenceWindow& w, int64_t n);

struct DensitySample {
  int64_t n = 0;
  int64_t count = 0;
  mpq_class ratio;
};

struct DensityLadder {
  std::vector<DensitySample> samples;
  mpq_class min_ratio;
  int64_t argmin_n = 0;

  double min_ratio_d() const { return min_ratio.get_d(); }
};

// min over the ladder of A(n)/n — an upper estimate of liminf A(n)/n.
DensityLadder lower_density_estimate(const SequenceWindow& w, int64_t n_lo, int64_t n_hi);

// Same ladder over the positive members of a finite image.
DensityLadder image_density_ladder(const SumsetImage& img, int64_t n_lo, int64_t n_hi);

struct BanachSample {
  int64_t len = 0;
  int64_t max_count = 0;
  int64_t best_start = 0;  // window (best_start, best_start + len]
  mpq_class ratio;
};

struct BanachLadder {
  std::vector<BanachSample> samples;
  bool clamped = false;     // requested max length exceeded coverage
  int64_t coverage = 0;     // windows placed within [0, coverage]
};

// max over placements of |A ∩ (m, m+len]| / len, for a factor-2 ladder of
// lengths ending exactly at max_len; placements stay inside the certified
// coverage of the window.
BanachLadder banach_density_estimate(const SequenceWindow& w, int64_t max_len);

struct LogGrowthSample {
  int64_t n = 0;
  int64_t count = 0;
  double ratio = 0;  // A(n) / log n
};

struct LogGrowthProfile {
  // Sampled at n_lo and at every window value in (n_lo, n_hi]: between
  // jumps of A(n) the ratio only decays, so these points carry the sup.
  std::vector<LogGrowthSample> samples;
  double sup_ratio = 0;
  int64_t arg_sup = 0;

  double running_sup_at(int64_t n) const;  // sup over samples with .n <= n
};

LogGrowthProfile log_growth_ratio(const SequenceWindow& w, int64_t n_lo, int64_t n_hi);

struct DeltaSparseEntry {
  int fold = 0;
  DensityLadder density;  // of Sigma_fold(A) ∩ [1, bound]
  CosetScan coset;        // one-sided progression scan
};

struct DeltaSparseProbe {
  std::vector<DeltaSparseEntry> entries;
  int64_t bound = 0;
};

DeltaSparseProbe delta_sparse_probe(const SequenceWindow& w, int max_fold, int64_t bound,
                                    long max_modulus, long margin = 10);

struct PerturbationSample {
  int64_t n = 0;
  int64_t count_base = 0;       // |X ∩ [1,n]|
  int64_t count_shifted = 0;    // |(X+F) ∩ [1,n]|
  int64_t base_two_sided = 0;   // |X ∩ [-(n+s), n+s]|
  bool inflation_ok = true;     // count_shifted <= t * base_two_sided
};

struct PerturbationCheck {
  std::vector<PerturbationSample> samples;
  DensityLadder base_ladder;     // X ∩ N
  DensityLadder shifted_ladder;  // (X+F) ∩ N
  int64_t s = 0;                 // max |f|
  int64_t t = 0;                 // |F|
  bool inflation_bound_ok = true;
};

// X must be a symmetric image; F a nonempty finite offset set.
PerturbationCheck perturbation_density_check(const SumsetImage& X, const std::vector<int64_t>& F);

}  // namespace sparsity
