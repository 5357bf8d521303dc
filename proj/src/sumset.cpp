#include "sparsity/sumset.hpp"

#include <algorithm>
#include <functional>

#include <nlohmann/json.hpp>

namespace sparsity {

DenseImage::DenseImage(int64_t bound) : bound_(bound) {
  if (bound < 0) throw Error("dense image: negative bound");
  if (bound > kDenseUniverseCap)
    throw Error("dense image: universe bound " + std::to_string(bound) +
                " exceeds the dense cap (" + std::to_string(kDenseUniverseCap) +
                "); use the sparse engine");
  bits_.assign(static_cast<size_t>((2 * bound + 1 + 63) / 64), 0);
}

bool DenseImage::test(int64_t x) const {
  if (x < -bound_ || x > bound_) return false;
  const size_t i = idx(x);
  return (bits_[i >> 6] >> (i & 63)) & 1;
}

void DenseImage::set(int64_t x) {
  if (x < -bound_ || x > bound_) throw Error("dense image: set out of range");
  const size_t i = idx(x);
  bits_[i >> 6] |= uint64_t(1) << (i & 63);
}

size_t DenseImage::popcount() const {
  size_t n = 0;
  for (uint64_t w : bits_) n += static_cast<size_t>(__builtin_popcountll(w));
  return n;
}

std::vector<int64_t> DenseImage::members() const {
  std::vector<int64_t> out;
  for (size_t wi = 0; wi < bits_.size(); ++wi) {
    uint64_t w = bits_[wi];
    while (w) {
      const int b = __builtin_ctzll(w);
      w &= w - 1;
      out.push_back(static_cast<int64_t>(wi * 64 + static_cast<size_t>(b)) - bound_);
    }
  }
  return out;
}

bool DenseImage::is_symmetric() const {
  for (int64_t x = 1; x <= bound_; ++x)
    if (test(x) != test(-x)) return false;
  return true;
}

void DenseImage::or_shifted(DenseImage& dst, const DenseImage& src, int64_t s) {
  // dst bit (v) |= src bit (v - s); in index space: dst[i] |= src[i - shift]
  // with shift = s + (dst.bound - src.bound).
  const int64_t shift = s + (dst.bound_ - src.bound_);
  const int64_t src_bits = 2 * src.bound_ + 1;
  const int64_t dst_bits = 2 * dst.bound_ + 1;
  // Destination index range touched: [shift, shift + src_bits).
  int64_t lo = std::max<int64_t>(0, shift);
  int64_t hi = std::min(dst_bits, shift + src_bits);
  if (lo >= hi) return;
  // Word-wise OR with bit offset: shift = 64*adj_word + bit_off exactly.
  const int bit_off = static_cast<int>(((shift % 64) + 64) % 64);
  const int64_t adj_word = (shift - bit_off) / 64;
  const size_t dw = dst.bits_.size();
  for (size_t j = 0; j < src.bits_.size(); ++j) {
    const uint64_t w = src.bits_[j];
    if (!w) continue;
    const int64_t d0 = static_cast<int64_t>(j) + adj_word;
    if (bit_off == 0) {
      if (d0 >= 0 && d0 < static_cast<int64_t>(dw)) dst.bits_[static_cast<size_t>(d0)] |= w;
    } else {
      if (d0 >= 0 && d0 < static_cast<int64_t>(dw)) dst.bits_[static_cast<size_t>(d0)] |= w << bit_off;
      const int64_t d1 = d0 + 1;
      if (d1 >= 0 && d1 < static_cast<int64_t>(dw)) dst.bits_[static_cast<size_t>(d1)] |= w >> (64 - bit_off);
    }
  }
  // Mask bits beyond the valid index range [0, dst_bits).
  const int64_t last_bit = dst_bits - 1;
  const size_t last_word = static_cast<size_t>(last_bit >> 6);
  const int used = static_cast<int>((last_bit & 63) + 1);
  if (used < 64) dst.bits_[last_word] &= (uint64_t(1) << used) - 1;
  for (size_t j = last_word + 1; j < dw; ++j) dst.bits_[j] = 0;
}

namespace {

SumsetImage base_from_window(const SequenceWindow& w, int64_t bound, bool with_signs) {
  if (bound <= 0) throw Error("sumset base: bound must be positive");
  SumsetImage s{DenseImage(bound), Provenance{}, false, {}};
  s.prov.kind = with_signs ? "signed_closure" : "one_sided_base";
  s.prov.fold = 1;
  s.prov.signed_base = with_signs;
  mpz_class smallest = 0;
  for (const auto& v : w.values) {
    if (v > 0 && (smallest == 0 || v < smallest)) smallest = v;
    if (!v.fits_slong_p() || v > bound || v < -bound) {
      s.truncated = true;
      continue;
    }
    const int64_t x = v.get_si();
    s.img.set(x);
    s.base_elements.push_back(x);
    if (with_signs && x != 0) {
      s.img.set(-x);
      s.base_elements.push_back(-x);
    }
  }
  std::sort(s.base_elements.begin(), s.base_elements.end());
  s.prov.smallest_source = smallest;
  if (s.base_elements.empty()) throw Error("sumset base: no window elements within the universe bound");
  return s;
}

}  // namespace

SumsetImage signed_closure(const SequenceWindow& w, int64_t bound) { return base_from_window(w, bound, true); }
SumsetImage one_sided_base(const SequenceWindow& w, int64_t bound) { return base_from_window(w, bound, false); }

SumsetImage iterated_sumset(const SumsetImage& base, int k) {
  if (k < 1) throw Error("iterated_sumset: k must be >= 1");
  const int64_t internal = base.bound() * k;
  if (internal > kDenseUniverseCap)
    throw Error("iterated_sumset: widened universe " + std::to_string(internal) +
                " exceeds the dense cap; lower the bound or use the sparse engine");
  DenseImage cur(internal);
  for (int64_t e : base.base_elements) cur.set(e);  // 1-fold
  for (int step = 2; step <= k; ++step) {
    DenseImage next(internal);
    for (int64_t e : base.base_elements) DenseImage::or_shifted(next, cur, e);
    cur = std::move(next);
  }
  SumsetImage out{std::move(cur), base.prov, base.truncated, base.base_elements};
  out.prov.kind = "iterated_sumset";
  out.prov.fold = k;
  return out;
}

SumsetImage sigma_union(const SumsetImage& base, int n) {
  if (n < 1) throw Error("sigma: n must be >= 1");
  const int64_t internal = base.bound() * n;
  if (internal > kDenseUniverseCap)
    throw Error("sigma: widened universe exceeds the dense cap; lower the bound or use the sparse engine");
  DenseImage acc(internal);
  DenseImage cur(internal);
  for (int64_t e : base.base_elements) {
    cur.set(e);
    acc.set(e);
  }
  for (int step = 2; step <= n; ++step) {
    DenseImage next(internal);
    for (int64_t e : base.base_elements) DenseImage::or_shifted(next, cur, e);
    cur = std::move(next);
    DenseImage::or_shifted(acc, cur, 0);
  }
  SumsetImage out{std::move(acc), base.prov, base.truncated, base.base_elements};
  out.prov.kind = "sigma";
  out.prov.fold = n;
  return out;
}

std::string image_to_json(const SumsetImage& s) {
  nlohmann::json j;
  j["format"] = "sumset_image_v1";
  j["bound"] = s.bound();
  j["provenance"] = {{"kind", s.prov.kind},
                     {"fold", s.prov.fold},
                     {"signed_base", s.prov.signed_base},
                     {"smallest_source", s.prov.smallest_source.get_str()}};
  j["truncated"] = s.truncated;
  j["popcount"] = s.img.popcount();
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& [start, len] : run_length_encode(s.img.members())) runs.push_back({start, len});
  j["members_rle"] = std::move(runs);
  return j.dump(2);
}

CosetScan detect_coset(const SumsetImage& s, long max_modulus, long margin, CosetMode mode) {
  CosetScan scan;
  scan.max_modulus = max_modulus;
  // n-fold images live on a universe widened to n times the source bound, but
  // beyond the source bound the image thins out only because the source was
  // truncated there.  Demand runs at source scale, where the computed image
  // agrees with the true sumset (exactly for one-sided sums; as a subset for
  // signed sums, which keeps any witness found sound).
  const int64_t B = s.prov.fold > 1 ? s.bound() / s.prov.fold : s.bound();
  mpz_class slack_z = s.prov.smallest_source * s.prov.fold;
  const int64_t slack = slack_z.fits_slong_p() ? std::min<int64_t>(slack_z.get_si(), B) : B;
  scan.slack = slack;
  const int64_t hi = B - slack;
  scan.scan_lo = -hi;
  scan.scan_hi = hi;
  if (max_modulus < 1) throw Error("detect_coset: max_modulus must be >= 1");
  if (hi < margin * max_modulus)
    throw Error("detect_coset: universe bound " + std::to_string(B) +
                " too small for max_modulus " + std::to_string(max_modulus) +
                " at margin " + std::to_string(margin));

  auto try_full = [&](long m, long r) -> std::optional<CosetWitness> {
    // every x in [-hi, hi] with x = r (mod m) must be present
    int64_t start = r;  // smallest nonnegative representative
    // walk down below -hi: first member >= -hi in the class
    int64_t x0 = start - ((start + hi) / m) * m;
    while (x0 < -hi) x0 += m;
    if (x0 > hi) return std::nullopt;
    int64_t count = 0;
    for (int64_t x = x0; x <= hi; x += m, ++count)
      if (!s.img.test(x)) return std::nullopt;
    if (count < margin) return std::nullopt;
    return CosetWitness{m, r, false, -hi, hi, s.prov.fold};
  };
  auto try_one_sided = [&](long m, long r) -> std::optional<CosetWitness> {
    // find the first present member of the class in [0, hi], then require a
    // complete run through hi with at least `margin` members
    int64_t x0 = -1;
    for (int64_t x = r; x <= hi; x += m)
      if (s.img.test(x)) {
        x0 = x;
        break;
      }
    if (x0 < 0) return std::nullopt;
    int64_t count = 0;
    for (int64_t x = x0; x <= hi; x += m, ++count)
      if (!s.img.test(x)) return std::nullopt;
    if (count < margin) return std::nullopt;
    return CosetWitness{m, r, true, x0, hi, s.prov.fold};
  };

  if (mode != CosetMode::OneSided) {
    for (long m = 1; m <= max_modulus; ++m)
      for (long r = 0; r < m; ++r)
        if (auto wit = try_full(m, r)) {
          scan.witness = wit;
          return scan;
        }
  }
  if (mode != CosetMode::Full) {
    for (long m = 1; m <= max_modulus; ++m)
      for (long r = 0; r < m; ++r)
        if (auto wit = try_one_sided(m, r)) {
          scan.witness = wit;
          return scan;
        }
  }
  return scan;
}

namespace {

struct SideEntry {
  mpz_class sum;
  std::vector<SparseTerm> terms;
};

// All multisets of size <= max_terms over the (index, sign) pool, enumerated
// with nondecreasing (index, sign) so each multiset appears exactly once.
// The callback sees each multiset's sum and terms in a fixed order.
template <typename Fn>
void enumerate_side_cb(const std::vector<mpz_class>& vals, size_t pool, bool use_signs,
                       int max_terms, Fn&& fn) {
  std::vector<SparseTerm> cur;
  mpz_class sum = 0;
  // signs ordered: +1 before -1 for determinism
  const int signs[2] = {1, -1};
  const int nsigns = use_signs ? 2 : 1;
  std::function<void(size_t, int, int)> rec = [&](size_t start_idx, int start_sign, int remaining) {
    fn(sum, cur);
    if (remaining == 0) return;
    for (size_t i = start_idx; i < pool; ++i) {
      for (int si = (i == start_idx ? start_sign : 0); si < nsigns; ++si) {
        cur.push_back({i, signs[si]});
        sum += signs[si] > 0 ? vals[i] : -vals[i];
        rec(i, si, remaining - 1);
        sum -= signs[si] > 0 ? vals[i] : -vals[i];
        cur.pop_back();
      }
    }
  };
  rec(0, 0, max_terms);
}

void enumerate_side(const std::vector<mpz_class>& vals, size_t pool, bool use_signs, int max_terms,
                    std::vector<SideEntry>* out) {
  enumerate_side_cb(vals, pool, use_signs, max_terms,
                    [&](const mpz_class& sum, const std::vector<SparseTerm>& terms) {
                      out->push_back({sum, terms});
                    });
}

}  // namespace

SparseResult sparse_membership(const SequenceWindow& w, const mpz_class& target, int n, bool use_signs,
                               size_t M) {
  if (n < 1) throw Error("sparse_membership: n must be >= 1");
  SparseResult res;
  res.max_terms = n;
  const size_t pool = std::min(w.size(), M + 1);
  if (pool == 0) throw Error("sparse_membership: empty window");
  res.index_bound = pool - 1;

  const int h_left = (n + 1) / 2;
  const int h_right = n / 2;
  std::vector<SideEntry> left, right;
  enumerate_side(w.values, pool, use_signs, h_left, &left);
  std::sort(left.begin(), left.end(), [](const SideEntry& a, const SideEntry& b) {
    const int c = cmp(a.sum, b.sum);
    if (c != 0) return c < 0;
    if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size();
    for (size_t i = 0; i < a.terms.size(); ++i) {
      if (a.terms[i].index != b.terms[i].index) return a.terms[i].index < b.terms[i].index;
      if (a.terms[i].sign != b.terms[i].sign) return a.terms[i].sign > b.terms[i].sign;
    }
    return false;
  });
  if (h_right > 0) {
    enumerate_side(w.values, pool, use_signs, h_right, &right);
  } else {
    right.push_back({mpz_class(0), {}});
  }

  // Deterministic scan: right entries in enumeration order; left by binary search.
  const SideEntry* best_l = nullptr;
  const SideEntry* best_r = nullptr;
  size_t best_total = static_cast<size_t>(n) + 1;
  for (const auto& r : right) {
    mpz_class need = target - r.sum;
    auto it = std::lower_bound(left.begin(), left.end(), need,
                               [](const SideEntry& e, const mpz_class& v) { return e.sum < v; });
    for (; it != left.end() && it->sum == need; ++it) {
      const size_t total = it->terms.size() + r.terms.size();
      if (total == 0 || total > static_cast<size_t>(n)) continue;
      if (total < best_total) {
        best_total = total;
        best_l = &*it;
        best_r = &r;
      }
    }
  }
  if (!best_l) return res;
  res.found = true;
  res.terms = best_l->terms;
  res.terms.insert(res.terms.end(), best_r->terms.begin(), best_r->terms.end());
  std::sort(res.terms.begin(), res.terms.end(), [](const SparseTerm& a, const SparseTerm& b) {
    if (a.index != b.index) return a.index < b.index;
    return a.sign > b.sign;
  });
  // exactness check
  mpz_class check = 0;
  for (const auto& t : res.terms) check += t.sign > 0 ? w.values[t.index] : -w.values[t.index];
  if (check != target) throw Error("sparse_membership internal verification failed");
  return res;
}

SumsetImage realize_sparse_range(const SequenceWindow& w, int n, int64_t range, size_t M) {
  if (n < 1) throw Error("realize_sparse_range: n must be >= 1");
  SumsetImage s{DenseImage(range), Provenance{}, false, {}};
  s.prov.kind = "sparse_realized";
  s.prov.fold = n;
  s.prov.signed_base = true;
  mpz_class smallest = 0;
  for (const auto& v : w.values)
    if (v > 0 && (smallest == 0 || v < smallest)) smallest = v;
  s.prov.smallest_source = smallest;

  const size_t pool = std::min(w.size(), M + 1);
  if (pool == 0) throw Error("realize_sparse_range: empty window");

  // Meet-in-the-middle with the tables built once for the whole target range.
  // A left half-sum can only matter if some right half-sum pulls it into
  // [-range, range], so left entries outside every such band are discarded as
  // they are produced; for windows that grow fast this keeps the table tiny.
  const int h_left = (n + 1) / 2;
  const int h_right = n / 2;
  std::vector<SideEntry> right;
  if (h_right > 0) {
    enumerate_side(w.values, pool, true, h_right, &right);
  } else {
    right.push_back({mpz_class(0), {}});
  }
  std::vector<mpz_class> right_sums;
  right_sums.reserve(right.size());
  for (const auto& r : right) right_sums.push_back(r.sum);
  std::sort(right_sums.begin(), right_sums.end());

  const mpz_class band(static_cast<long>(range));
  std::vector<SideEntry> kept;
  enumerate_side_cb(w.values, pool, true, h_left,
                    [&](const mpz_class& sum, const std::vector<SparseTerm>& terms) {
                      // keep iff some right sum rs satisfies |sum + rs| <= range
                      mpz_class lo = -band - sum;
                      auto it = std::lower_bound(right_sums.begin(), right_sums.end(), lo);
                      if (it == right_sums.end()) return;
                      if (*it > band - sum) return;
                      kept.push_back({sum, terms});
                    });
  std::sort(kept.begin(), kept.end(),
            [](const SideEntry& a, const SideEntry& b) { return a.sum < b.sum; });

  for (int64_t t = -range; t <= range; ++t) {
    const mpz_class target(static_cast<long>(t));
    bool hit = false;
    for (const auto& r : right) {
      mpz_class need = target - r.sum;
      auto it = std::lower_bound(kept.begin(), kept.end(), need,
                                 [](const SideEntry& e, const mpz_class& v) { return e.sum < v; });
      for (; it != kept.end() && it->sum == need; ++it) {
        const size_t total = it->terms.size() + r.terms.size();
        if (total == 0 || total > static_cast<size_t>(n)) continue;
        // exactness check: recompute the realization from the window values
        mpz_class check = 0;
        for (const auto& term : it->terms)
          check += term.sign > 0 ? w.values[term.index] : -w.values[term.index];
        for (const auto& term : r.terms)
          check += term.sign > 0 ? w.values[term.index] : -w.values[term.index];
        if (check != target) throw Error("realize_sparse_range internal verification failed");
        hit = true;
        break;
      }
      if (hit) break;
    }
    if (hit) s.img.set(t);
  }
  return s;
}

}  // namespace sparsity
