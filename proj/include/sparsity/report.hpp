// Whole-sequence property classification and the machine-checked
// implication graph between the sparsity properties.
//
// classify runs every probe against shared windows built from one config:
// signed-sumset coset scans, one-sided density ladders with progression
// witnesses, plain and strongly-contained AP growth searches, the geometric
// witness construction, and half-graph order-property searches.  Verdicts
// are three-valued: a refutation or a support always embeds a finite witness
// that has been re-verified by direct membership against the engine that
// produced it, and a no_counterexample always carries its search bounds.
// Finite windows cannot certify limit statements, so no probe ever claims a
// property is proven.
//
// A one-sided progression witness is reused as evidence downstream exactly
// where it logically applies (it is itself an arbitrarily-long AP at window
// scale, and it yields a derived strongly-contained AP); each reuse is
// re-verified against the target fold image.  The consistency checker then
// confirms the known implications between properties on the finished report:
//
//   ap => ap*,  ap => banach,  ap* => delta,  banach => delta,
//   sufficiently_sparse => banach,  raab <=> not delta-sparse
//
// checked in refutation form (e.g. a delta refutation must come with a banach
// refutation).  Only implications whose premise witness converts into a
// witness for the conclusion are enforced; existential witnesses (geometric
// model, order property) are never played against sparsity refutations, since
// both can be genuinely true on a finite window.  Suite runs over the
// built-in corpus are deterministic: byte-identical JSON for identical
// config, no timestamps.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sparsity/sequences.hpp"

namespace sparsity {

enum class Verdict { WitnessRefuted, NoCounterexample, WitnessSupported };

const char* verdict_name(Verdict v);

struct PropertyResult {
  Verdict verdict = Verdict::NoCounterexample;
  std::string detail;  // witness description, or the search bounds behind a no_counterexample
  std::string error;   // probe failure; when set, the verdict carries no claim
};

struct ClassifyConfig {
  int64_t bound = 20000;            // dense universe / completeness horizon
  int max_fold = 4;                 // sumset folds scanned (signed and one-sided)
  // Largest progression modulus scanned.  Kept small enough that any reported
  // coset still has hundreds of multiples inside the verified horizon; a cap
  // near the horizon would let a lucky residue class of a genuinely sparse
  // set masquerade as a coset.
  long coset_max_modulus = 64;
  long coset_margin = 10;           // verified-range margin for coset scans
  int64_t ap_min_length = 3;        // shortest AP worth reporting
  int64_t ap_refute_length = 12;    // growth witnesses below this never refute
  size_t ap_dense_threshold = 4096; // exact AP search up to this many members
  size_t ap_star_subwindow = 512;   // start-pair prefix for strong containment
  long order_k_lo = 3;              // half-graph lengths tried (descending)
  long order_k_hi = 6;
  // Deep signed-sum probe: when the dense scan finds nothing, extend the
  // window far past the dense horizon and test whether few-term signed sums
  // still cover every small multiple of gcd.  Catches sets whose coset needs
  // summands exponentially larger than the targets they hit.
  int sparse_fold = 3;              // signed terms allowed per realization
  int64_t sparse_gate = 64;         // cheap first radius (multiples of gcd)
  int64_t sparse_range = 512;       // confirming radius (multiples of gcd)
  size_t sparse_depth_margin = 8;   // extra window terms past sparse_range
  size_t sparse_shallow_cap = 160;  // skip probe when window is this dense
  int sparse_deep_fraction = 8;     // >= 1/this of targets must need deep terms
  unsigned long bit_cap = 1u << 20; // generation guard on raw value size
};

inline constexpr int kReportSchemaVersion = 1;
extern const char* const kEngineVersion;

// Fixed property key order used in every report.
extern const std::vector<std::string> kPropertyNames;

struct PropertyReport {
  std::string sequence;  // canonical spec string
  ClassifyConfig config;
  std::vector<std::pair<std::string, PropertyResult>> properties;
  std::vector<std::string> violations;               // consistency-checker findings
  std::vector<std::pair<std::string, long>> counters;  // deterministic work counters
  std::string error;  // whole-report failure (e.g. window generation)

  const PropertyResult* find(const std::string& name) const;
};

PropertyReport classify_window(const SequenceWindow& w, const ClassifyConfig& cfg);
PropertyReport classify_sequence(const SequenceSpec& spec, const ClassifyConfig& cfg);

// Verdict-level check of the known implications; returns violation messages.
// Properties with embedded errors are skipped.
std::vector<std::string> check_figure_consistency(const PropertyReport& rep);

std::string report_to_json(const PropertyReport& rep, int indent = 2);

// The built-in corpus: the eleven named recurrence sequences plus powers of
// two, factorials, squares, and primes.
std::vector<std::string> builtin_corpus();

struct SuiteResult {
  std::vector<PropertyReport> reports;
  size_t violation_count = 0;
  size_t error_count = 0;
  int exit_code = 0;  // nonzero iff a soundness invariant failed (or strict + errors)
};

SuiteResult run_suite(const std::vector<std::string>& specs, const ClassifyConfig& cfg,
                      bool strict = false);
std::string suite_to_json(const SuiteResult& s, int indent = 2);

}  // namespace sparsity
