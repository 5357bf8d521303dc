// Linear recurrence analysis with certified verdicts.
//
// char_poly builds the monic characteristic polynomial of
// a_{n+1} = c_d a_n + ... + c_0 a_{n-d}.  classify decides whether a monic
// integer polynomial presents a Pisot or a Salem number: squarefreeness and
// rational-root structure are checked exactly; the remaining roots are
// certified by disjoint inclusion disks (companion-matrix seeds refined by
// Newton at escalating MPFR precision, radii from the deg*|f/f'| bound), or,
// for self-reciprocal polynomials, by exact sign-change brackets of the trace
// polynomial g with f(z) = z^m g(z + 1/z) — that route certifies roots as
// exactly on the unit circle, which no floating comparison against 1 can do.
// A Pisot verdict implies irreducibility outright (a monic proper factor
// carrying only roots strictly inside the unit disk would need constant term
// 0, i.e. a rational root, which was excluded); Salem verdicts carry an
// explicit irreducibility-unverified caveat.
//
// binet solves for a_n = alpha*lambda^n + sum_i beta_i mu_i^n with ball
// arithmetic and certifies |a_n - reconstruction| < 1/2 on every raw index
// checked, so rounding the model recovers the sequence exactly.
//
// zero_set analyses d_n = r + sum_i a_{n+u_i} - sum_j a_{n+v_j}: identically
// zero (decided exactly: d_n is annihilated by (x-1)*f, so order+2 leading
// zeros suffice), finite with a certified dominance cutoff N0 and an exact
// scan, or undetermined when the dominant coefficient's enclosure cannot be
// bounded away from zero.
#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "sparsity/ball.hpp"
#include "sparsity/poly.hpp"
#include "sparsity/sequences.hpp"
#include "sparsity/util.hpp"

namespace sparsity {

enum class SpectralClass { Pisot, Salem, Rejected };

struct RootEnclosure {
  CBall z;
  bool is_real = false;
  bool on_unit_circle = false;  // certified exactly on |z| = 1 (bracket route)
  bool is_dominant = false;
};

struct SpectralData {
  ZPoly poly;
  SpectralClass cls = SpectralClass::Rejected;
  std::string reject_reason;         // set iff cls == Rejected
  std::optional<Ball> lambda;        // dominant real root, certified > 1
  std::vector<RootEnclosure> roots;  // complete root list, dominant first
  bool squarefree_ok = false;
  bool rational_root_free = false;
  bool irreducibility_verified = false;
  mpfr_prec_t precision_used = kPrecStart;

  // Spectral decomposition (filled by binet, empty after classify).
  std::optional<CBall> alpha;  // dominant coefficient; imaginary part certified to straddle 0
  std::vector<CBall> betas;    // aligned with roots[1..]
  mpq_class residual_bound = 0;  // certified sup over checked raw indices
  long checked_through = -1;     // raw indices [0, checked_through] verified

  std::string class_str() const;
};

// x^{d+1} - c_d x^d - ... - c_1 x - c_0, exact.
ZPoly char_poly(const RecurrenceSpec& spec);

// Certified Pisot/Salem/rejected verdict for a monic integer polynomial of
// degree >= 1.  Consumes only the polynomial.
SpectralData classify(const ZPoly& f);

// Exact unrolling of a_0 .. a_{len-1} on raw indices.
std::vector<mpz_class> unroll(const RecurrenceSpec& spec, size_t len);

// Spectral decomposition verified against the exact unrolling at every raw
// index in [0, raw_length).  Requires a Pisot or Salem classification.
SpectralData binet(const RecurrenceSpec& spec, long raw_length);

struct ZeroOffsets {
  std::vector<long> u, v;  // d_n = r + sum_i a_{n+u_i} - sum_j a_{n+v_j}
};

enum class ZeroVerdict { IdenticallyZero, Finite, Undetermined };

struct ZeroScanConfig {
  long n0_cap = 100000;    // refuse dominance cutoffs beyond this
  long rescan_factor = 1;  // exact scan extends to rescan_factor * N0
};

struct ZeroSetReport {
  ZeroOffsets offsets;
  mpz_class r = 0;
  ZeroVerdict verdict = ZeroVerdict::Undetermined;
  std::vector<long> zeros;    // raw indices with d_n = 0 (Finite verdict)
  long n0 = -1;               // certified: d_n != 0 for every n > n0
  long scanned_through = -1;  // exact scan actually covered [0, scanned_through]
  std::string note;           // dominance data / undetermined reason
};

ZeroSetReport zero_set(const RecurrenceSpec& spec, const ZeroOffsets& sig, const mpz_class& r,
                       const ZeroScanConfig& cfg = {});

}  // namespace sparsity
