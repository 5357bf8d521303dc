#include "sparsity/progressions.hpp"

#include <algorithm>
#include <unordered_set>

namespace sparsity {

namespace {

// longer wins; then smaller difference; then smaller start
bool better(const APWitness& cand, const APWitness& best) {
  if (cand.length != best.length) return cand.length > best.length;
  if (cand.diff != best.diff) return cand.diff < best.diff;
  return cand.start < best.start;
}

std::vector<int64_t> sorted_unique(std::vector<int64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::optional<APWitness> longest_ap(const std::vector<int64_t>& S, int64_t min_length) {
  if (min_length < 2) throw Error("longest_ap: min_length must be >= 2");
  const std::vector<int64_t> v = sorted_unique(S);
  if (v.size() < 2) return std::nullopt;
  std::unordered_set<int64_t> present(v.begin(), v.end());
  APWitness best;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    for (size_t j = i + 1; j < v.size(); ++j) {
      const int64_t a = v[i], d = v[j] - v[i];
      if (present.count(a - d)) continue;  // not the start of a maximal AP
      int64_t len = 2, x = v[j];
      while (present.count(x + d)) {
        x += d;
        ++len;
      }
      APWitness cand{mpz_class(static_cast<long>(a)), mpz_class(static_cast<long>(d)), len, false};
      if (best.length == 0 || better(cand, best)) best = cand;
    }
  }
  if (best.length < min_length) return std::nullopt;
  // witness soundness: every term present
  for (int64_t t = 0; t < best.length; ++t) {
    mpz_class term = best.start + t * best.diff;
    if (!present.count(term.get_si())) throw Error("longest_ap internal verification failed");
  }
  return best;
}

std::optional<APWitness> longest_ap_brute(const std::vector<int64_t>& S, int64_t min_length) {
  if (min_length < 2) throw Error("longest_ap: min_length must be >= 2");
  const std::vector<int64_t> v = sorted_unique(S);
  if (v.size() < 2) return std::nullopt;
  std::unordered_set<int64_t> present(v.begin(), v.end());
  APWitness best;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    for (size_t j = i + 1; j < v.size(); ++j) {
      const int64_t a = v[i], d = v[j] - v[i];
      int64_t len = 2, x = v[j];
      while (present.count(x + d)) {
        x += d;
        ++len;
      }
      // interior starts yield shorter walks of the same progression, so the
      // maximum is still attained at the true start pair
      APWitness cand{mpz_class(static_cast<long>(a)), mpz_class(static_cast<long>(d)), len, false};
      if (best.length == 0 || better(cand, best)) best = cand;
    }
  }
  if (best.length < min_length) return std::nullopt;
  return best;
}

bool verify_ap(const SequenceWindow& w, const APWitness& ap) {
  if (ap.diff < 1 || ap.length < 1) return false;
  for (int64_t t = 0; t < ap.length; ++t) {
    if (!w.contains(ap.start + t * ap.diff)) return false;
  }
  if (ap.strongly_contained) {
    for (int64_t t = 1; t < ap.length; ++t) {
      mpz_class refl = ap.start - t * ap.diff;
      if (refl >= 0 && w.contains(refl)) return false;
    }
  }
  return true;
}

std::vector<APWitness> strongly_contained_aps(const SequenceWindow& w, int64_t min_length,
                                              size_t subwindow) {
  if (min_length < 2) throw Error("strongly_contained_aps: min_length must be >= 2");
  std::vector<APWitness> out;
  const auto& v = w.values;
  if (v.size() < 2) return out;
  const size_t nmax = (subwindow == 0) ? v.size() : std::min(subwindow, v.size());
  std::unordered_set<mpz_class, MpzHash> present(v.begin(), v.end());
  const mpz_class& vmax = v.back();

  for (size_t i = 0; i + 1 < nmax; ++i) {
    const mpz_class& a = v[i];
    for (size_t j = i + 1; j < nmax; ++j) {
      mpz_class d = v[j] - v[i];
      if (a + (min_length - 1) * d > vmax) break;  // no room for min_length terms
      // walk forward against the full window
      int64_t len = 2;
      mpz_class x = v[j];
      while (present.count(x + d)) {
        x += d;
        ++len;
      }
      if (len < min_length) continue;
      // strong containment: every reflected point absent
      bool strong = true;
      for (int64_t t = 1; t < len && strong; ++t) {
        mpz_class refl = a - t * d;
        if (refl < 0) break;  // further reflections only more negative
        if (present.count(refl)) strong = false;
      }
      if (!strong) continue;
      out.push_back({a, d, len, true});
    }
  }
  return out;
}

namespace {

APSearchResult stride_longest(const DenseImage& img, int64_t bound, int64_t min_length,
                              int64_t stride_cap, size_t members) {
  APSearchResult res;
  res.stride_limited = true;
  res.stride_cap = stride_cap;
  res.bound = bound;
  res.member_count = members;
  APWitness best;
  for (int64_t d = 1; d <= stride_cap; ++d) {
    for (int64_t a = 1; a <= bound; ++a) {
      if (!img.test(a) || (a - d >= 1 && img.test(a - d))) continue;
      int64_t len = 1, x = a;
      while (x + d <= bound && img.test(x + d)) {
        x += d;
        ++len;
      }
      APWitness cand{mpz_class(static_cast<long>(a)), mpz_class(static_cast<long>(d)), len, false};
      if (best.length == 0 || better(cand, best)) best = cand;
    }
  }
  if (best.length >= min_length && best.length >= 2) res.longest = best;
  return res;
}

}  // namespace

APSearchResult image_longest_ap(const SumsetImage& img, int64_t bound, int64_t min_length,
                                size_t dense_threshold, int64_t stride_cap) {
  if (bound > img.bound()) throw Error("image_longest_ap: bound exceeds the image universe");
  std::vector<int64_t> members;
  for (int64_t x : img.img.members()) {
    if (x >= 1 && x <= bound) members.push_back(x);
  }
  if (members.size() <= dense_threshold) {
    APSearchResult res;
    res.bound = bound;
    res.member_count = members.size();
    res.longest = longest_ap(members, min_length);
    return res;
  }
  return stride_longest(img.img, bound, min_length, stride_cap, members.size());
}

APSparseProbe ap_sparse_probe(const SequenceWindow& w, int max_fold, int64_t bound,
                              int64_t min_length, size_t dense_threshold, int64_t stride_cap) {
  if (max_fold < 1) throw Error("ap probe: max fold must be >= 1");
  if (w.complete_through < bound)
    throw Error("ap probe: window complete only through " + w.complete_through.get_str() +
                ", need " + std::to_string(bound));
  APSparseProbe probe;
  probe.bound = bound;
  probe.min_length = min_length;
  SumsetImage base = one_sided_base(w, bound);
  for (int k = 1; k <= max_fold; ++k) {
    SumsetImage sig = sigma_union(base, k);
    APSparseEntry e;
    e.fold = k;
    e.at_half = image_longest_ap(sig, bound / 2, min_length, dense_threshold, stride_cap);
    e.at_full = image_longest_ap(sig, bound, min_length, dense_threshold, stride_cap);
    const int64_t lh = e.at_half.longest ? e.at_half.longest->length : 1;
    const int64_t lf = e.at_full.longest ? e.at_full.longest->length : 1;
    e.growing = lf >= 2 * lh && lf >= min_length;
    probe.entries.push_back(std::move(e));
  }
  return probe;
}

bool verify_order_property(const SequenceWindow& w, const OrderPropertyWitness& wit) {
  const long k = wit.k;
  if (k < 2 || wit.b.size() != static_cast<size_t>(k) || wit.c.size() != static_cast<size_t>(k))
    return false;
  for (long i = 1; i <= k; ++i) {
    for (long j = 1; j <= k; ++j) {
      mpz_class q = wit.c[j - 1] - wit.b[i - 1];
      if (q > w.complete_through)
        throw Error("order-property verification: query " + q.get_str() +
                    " exceeds certified window coverage " + w.complete_through.get_str());
      const bool in_a = q >= 0 && w.contains(q);
      if (in_a != (i <= j)) return false;
    }
  }
  return true;
}

OrderPropertySearch order_property_witness(const SequenceWindow& w, long k,
                                           const OrderPropertyOptions& opts) {
  if (k < 2) throw Error("order property: k must be >= 2");
  OrderPropertySearch search;
  search.k = k;
  const auto& v = w.values;
  if (v.size() < 2) return search;
  const size_t nmax = std::min(opts.subwindow, v.size());
  search.subwindow = nmax;
  std::unordered_set<mpz_class, MpzHash> present(v.begin(), v.end());

  // c_j - b_i = a + (j-i)d: terms a+td (0<=t<k) must be members, reflected
  // points a-td (1<=t<k) absent.  All positive queries stay within coverage
  // because a+(k-1)d <= complete_through is required up front.
  auto try_pattern = [&](const mpz_class& a, const mpz_class& d) -> bool {
    if (d < 1) return false;
    if (a + (k - 1) * d > w.complete_through) return false;
    for (long t = 0; t < k; ++t) {
      if (!present.count(a + t * d)) return false;
    }
    for (long t = 1; t < k; ++t) {
      mpz_class refl = a - t * d;
      if (refl < 0) break;
      if (present.count(refl)) return false;
    }
    return true;
  };
  auto build = [&](const mpz_class& a, const mpz_class& d) {
    OrderPropertyWitness wit;
    wit.k = k;
    wit.ap_start = a;
    wit.ap_diff = d;
    for (long i = 1; i <= k; ++i) {
      wit.b.push_back((i - 1) * d);
      wit.c.push_back(a + (i - 1) * d);
    }
    if (!verify_order_property(w, wit)) throw Error("order-property witness failed re-verification");
    search.witness = std::move(wit);
  };

  for (size_t i = 0; i + 1 < nmax && !search.witness; ++i) {
    for (size_t j = i + 1; j < nmax; ++j) {
      mpz_class d = v[j] - v[i];
      if (v[i] + (k - 1) * d > w.complete_through) break;  // d only grows with j
      ++search.pairs_examined;
      if (try_pattern(v[i], d)) {
        build(v[i], d);
        break;
      }
    }
  }
  if (search.witness) return search;

  // Fallback grid: distinct consecutive gaps (ascending) x leading starts.
  std::vector<mpz_class> gaps;
  for (size_t i = 0; i + 1 < v.size() && gaps.size() < 4 * opts.grid_d; ++i)
    gaps.push_back(v[i + 1] - v[i]);
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
  if (gaps.size() > opts.grid_d) gaps.resize(opts.grid_d);
  const size_t amax = std::min(opts.grid_a, v.size());
  for (const mpz_class& d : gaps) {
    for (size_t i = 0; i < amax; ++i) {
      ++search.grid_cells_examined;
      if (try_pattern(v[i], d)) {
        build(v[i], d);
        return search;
      }
    }
  }
  return search;
}

}  // namespace sparsity
