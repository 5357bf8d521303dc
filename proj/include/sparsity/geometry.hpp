// Geometric structure analysis for integer sequences.
//
// A set of positive reals is "geometric" when its ratio set {s/t : t <= s} is
// closed and discrete.  This module provides the finite, checkable shadows of
// that notion:
//   * exact rational ratio sets of window prefixes,
//   * a depth-stabilization proxy for discreteness (stable counts and gaps as
//     the prefix grows vs. accumulating ratio pairs),
//   * minimum-signed-ratio-sum tables: eps_k = min |q_1 + ... + q_k| over
//     tuples of inverted ratios with |q_1| = 1 and no vanishing subset sum
//     (the quantitative engine behind bounded-support representations),
//   * multiplicative-scaffold witnesses: greedy anchor values b_m with model
//     values lambda_m, a block map f, certified deviation bounds r and
//     Theta = 3r, a certified anchor growth ratio c > 1, and exponential
//     growth constants (delta, b) verified pairwise on the window,
//   * a bounded-support checker: every sampled nonzero element of the n-fold
//     signed sumset admits a representation a_1 + ... + a_k + q with k <= n,
//     |a_i| < c|a| and |q| <= d, for (c, d) computed from Theta and the
//     eps-table.
//
// Every inequality reported as verified is checked with outward rounding
// (ball arithmetic) or exact rational arithmetic; a "pass" is rigorous for
// the window at hand and never a claim about the infinite sequence.
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sparsity/ball.hpp"
#include "sparsity/sequences.hpp"

namespace sparsity {

// ---------------------------------------------------------------------------
// Ratio sets
// ---------------------------------------------------------------------------

struct RatioSet {
  std::vector<mpz_class> source;  // positive values used, strictly ascending
  std::vector<mpq_class> ratios;  // {s/t : s,t in source, t <= s}, sorted, distinct
  size_t depth = 0;               // = source.size()
};

// Exact pairwise ratio set of the first `depth` values (0 = all).  Values must
// be positive and weakly ascending; duplicates are collapsed.
RatioSet ratio_set(const std::vector<mpz_class>& values, size_t depth = 0);

// ---------------------------------------------------------------------------
// Discreteness proxy
// ---------------------------------------------------------------------------

struct DiscretenessRow {
  size_t depth = 0;
  size_t count = 0;       // |ratios(prefix depth) ∩ [1, b]|
  bool has_gap = false;   // at least two members in range
  mpq_class min_gap = 0;  // smallest consecutive gap in range (when has_gap)
};

enum class Discreteness { Stable, Accumulating };

struct DiscretenessReport {
  std::vector<DiscretenessRow> rows;  // increasing depths; last row = full depth
  Discreteness verdict = Discreteness::Accumulating;
  // Closest consecutive pair in [1, b] at full depth (when it exists):
  mpq_class pair_lo = 0, pair_hi = 0;
  std::string note;
};

// Reports |Q ∩ [1, b]| and the minimum consecutive gap as the source prefix
// grows.  Stabilized count + gap >= gap_eps at full depth is evidence of
// discreteness; a growing count or a gap below gap_eps is evidence against,
// with the accumulating pair attached.  Never a verdict about the infinite
// set.  Requires b > 1.
DiscretenessReport discreteness_proxy(const RatioSet& q, const mpq_class& b,
                                      const mpq_class& gap_eps);

// ---------------------------------------------------------------------------
// Minimum signed ratio-sum table
// ---------------------------------------------------------------------------

struct EpsilonEntry {
  int k = 0;
  mpq_class eps;                 // exact min |q_1+...+q_k| over admissible tuples
  std::vector<mpq_class> tuple;  // an attaining tuple, q_1 = 1, weakly decreasing
};

struct EpsilonConfig {
  unsigned long node_budget = 20'000'000;  // search nodes across the whole table
};

struct EpsilonTable {
  std::vector<EpsilonEntry> entries;  // k = 1, 2, ... (truncated if budget runs out)
  unsigned long nodes = 0;
  bool budget_exhausted = false;
  std::string note;
};

// eps_k = min |q_1 + ... + q_k| over tuples with q_i in {±1/rho : rho a ratio},
// q_1 = 1, and every nonempty subset sum nonzero (exact rational branch and
// bound; repeats allowed).  eps_1 = 1 always.  An admissible tuple summing to
// exactly zero is impossible by the filter; seeing one is a hard error.
EpsilonTable epsilon_table(const RatioSet& q, int K, const EpsilonConfig& cfg = {});

// ---------------------------------------------------------------------------
// Scaffold witnesses
// ---------------------------------------------------------------------------

enum class LambdaModelKind { Identity, PowerModel, ExplicitValues };

// Candidate model g for the scaffold: g assigns each window element a positive
// real (as a certified enclosure) that the element is supposed to track.
struct LambdaModel {
  LambdaModelKind kind = LambdaModelKind::Identity;
  // PowerModel: g(n) = coef * base^n at the element's raw generator index n.
  std::optional<Ball> coef, base;
  // ExplicitValues: one enclosure per window position.
  std::vector<Ball> values;

  std::string describe() const;
};

// Built-in model for a window: identity for power towers and factorials,
// alpha*lambda^n from the spectral solver for linear recurrences (when the
// classification is not rejected and alpha is certified positive), c*b^n for
// floor-geometric specs.  nullopt when no certified model is available.
std::optional<LambdaModel> default_model(const SequenceWindow& w);

struct WitnessClause {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct GeometricWitness {
  // Greedy anchors: b_0 = first element; b_{m+1} = first element > b_m with
  // value >= b_m + 2r.  Every element belongs to the block of the last anchor
  // at or below it.
  std::vector<size_t> anchor_pos;         // positions into the window
  std::vector<mpz_class> anchor_values;   // b_m
  std::vector<Ball> lambda;               // lambda_m = g(b_m), certified > 0
  std::vector<size_t> f;                  // block index per window position
  mpq_class r = 0;          // certified deviation bound: |a_n - g(n)| <= r for all n
  mpq_class Theta = 0;      // = 3r; certified |a_n - lambda_f(n)| <= Theta
  mpq_class theta_max = 0;  // certified upper bound on max_n |a_n - lambda_f(n)|
  mpq_class c_lower = 0;    // certified lower bound on min_m lambda_{m+1}/lambda_m

  // Exponential growth constants: a_q/a_p >= delta * b^(q-p) for all positions
  // p < q of the positive part of the window, verified exactly pair by pair.
  bool growth_ok = false;
  mpq_class growth_delta = 0, growth_b = 0;
  std::string growth_note;

  std::vector<WitnessClause> clauses;  // every verified inequality, named
  bool ok = false;                     // all clauses (including growth) pass
  std::string model_desc;
};

struct WitnessConfig {
  // Deviation bound to use instead of the computed one; every per-element
  // deviation must certify below it, else the construction fails.
  std::optional<mpq_class> r_override;
  size_t growth_max_positions = 400;  // exact pair sweep cap
  int growth_grid = 64;               // growth base grid: b = 1 + j/grid
};

// Builds and re-verifies a scaffold witness on the window.  Throws Error when
// a clause cannot be certified structurally (model value not positive, raw
// index missing for a power model, deviation above r_override); clause-level
// inequality failures are reported in `clauses` with ok = false instead.
GeometricWitness construct_witness(const SequenceWindow& w, const LambdaModel& model,
                                   const WitnessConfig& cfg = {});

// ---------------------------------------------------------------------------
// Bounded-support representation checker
// ---------------------------------------------------------------------------

struct SupportSample {
  mpz_class target;
  bool ok = false;
  std::vector<mpz_class> parts;  // signed elements, |part| < c*|target|
  mpz_class q = 0;               // remainder, |q| <= d
};

struct SupportClaimReport {
  int n = 0;                    // sum arity
  mpq_class d0, c0, c, d;       // d0 = Theta, c0 = max(1/eps_k), d = n*d0, c = c0 + c0*d + d0
  std::vector<SupportSample> samples;
  bool all_ok = false;
  std::string note;
};

// For each sampled nonzero target in the n-fold signed sumset, searches for a
// representation target = a_1 + ... + a_k + q with k <= n, a_i = ± window
// elements, |a_i| < c*|target| and |q| <= d, where (c, d) derive from the
// witness deviation bound Theta and the eps-table (which must cover k <= n).
SupportClaimReport check_bounded_support(const SequenceWindow& w, const GeometricWitness& wit,
                                         const EpsilonTable& eps, int n,
                                         const std::vector<mpz_class>& targets);

}  // namespace sparsity
