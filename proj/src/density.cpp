#include "sparsity/density.hpp"

#include <algorithm>
#include <cmath>

namespace sparsity {

int64_t counting(const SequenceWindow& w, int64_t n) {
  if (n < 0) throw Error("counting: n must be nonnegative");
  return static_cast<int64_t>(w.count_upto(mpz_class(static_cast<long>(n))));
}

namespace {

std::vector<int64_t> geometric_ladder(int64_t n_lo, int64_t n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw Error("density ladder: need 1 <= n_lo <= n_hi");
  std::vector<int64_t> pts;
  for (int64_t n = n_lo; n < n_hi; n *= 2) {
    pts.push_back(n);
    if (n > n_hi / 2) break;  // avoid overflow; final point added below
  }
  if (pts.empty() || pts.back() != n_hi) pts.push_back(n_hi);
  return pts;
}

template <typename CountFn>
DensityLadder ladder_from_counts(int64_t n_lo, int64_t n_hi, CountFn count) {
  DensityLadder lad;
  bool first = true;
  for (int64_t n : geometric_ladder(n_lo, n_hi)) {
    const int64_t c = count(n);
    mpq_class q(static_cast<long>(c), static_cast<long>(n));
    q.canonicalize();
    lad.samples.push_back({n, c, q});
    if (first || q < lad.min_ratio) {
      lad.min_ratio = q;
      lad.argmin_n = n;
      first = false;
    }
  }
  return lad;
}

}  // namespace

DensityLadder lower_density_estimate(const SequenceWindow& w, int64_t n_lo, int64_t n_hi) {
  return ladder_from_counts(n_lo, n_hi, [&](int64_t n) { return counting(w, n); });
}

DensityLadder image_density_ladder(const SumsetImage& img, int64_t n_lo, int64_t n_hi) {
  if (n_hi > img.bound())
    throw Error("image density ladder: scale " + std::to_string(n_hi) +
                " exceeds the image bound " + std::to_string(img.bound()));
  // Prefix counts over positive members only.
  std::vector<int64_t> members;
  for (int64_t v : img.img.members())
    if (v >= 1 && v <= n_hi) members.push_back(v);
  return ladder_from_counts(n_lo, n_hi, [&](int64_t n) {
    return static_cast<int64_t>(std::upper_bound(members.begin(), members.end(), n) - members.begin());
  });
}

BanachLadder banach_density_estimate(const SequenceWindow& w, int64_t max_len) {
  if (max_len < 1) throw Error("banach: max window length must be >= 1");
  BanachLadder lad;
  if (!w.complete_through.fits_slong_p())
    throw Error("banach: window coverage exceeds machine range");
  lad.coverage = w.complete_through.get_si();
  if (max_len > lad.coverage) {
    max_len = lad.coverage;
    lad.clamped = true;
  }
  if (max_len < 1) throw Error("banach: window coverage is empty");

  // Positive members within coverage, as machine integers.
  std::vector<int64_t> vals;
  for (const auto& v : w.values) {
    if (v < 1) continue;
    if (v > lad.coverage) break;
    vals.push_back(v.get_si());
  }

  std::vector<int64_t> lens = geometric_ladder(1, max_len);
  for (int64_t len : lens) {
    // A window (m, m+len] of len integers; the best placement starts at a
    // member (v[i] = m+1), or the count is 0.
    int64_t best = 0, best_start = 0;
    size_t j = 0;
    for (size_t i = 0; i < vals.size(); ++i) {
      if (vals[i] + len - 1 > lad.coverage) break;  // window must stay inside coverage
      if (j < i) j = i;
      while (j < vals.size() && vals[j] <= vals[i] + len - 1) ++j;
      const int64_t cnt = static_cast<int64_t>(j - i);
      if (cnt > best) {
        best = cnt;
        best_start = vals[i] - 1;
      }
    }
    mpq_class q(static_cast<long>(best), static_cast<long>(len));
    q.canonicalize();
    lad.samples.push_back({len, best, best_start, q});
  }
  return lad;
}

double LogGrowthProfile::running_sup_at(int64_t n) const {
  double sup = 0;
  for (const auto& s : samples) {
    if (s.n > n) break;
    sup = std::max(sup, s.ratio);
  }
  return sup;
}

LogGrowthProfile log_growth_ratio(const SequenceWindow& w, int64_t n_lo, int64_t n_hi) {
  if (n_lo < 2) throw Error("log growth: n_lo must be >= 2 (log n must be positive)");
  if (w.complete_through < n_hi)
    throw Error("log growth: window complete only through " + w.complete_through.get_str());
  LogGrowthProfile prof;
  auto push = [&](int64_t n) {
    const int64_t c = counting(w, n);
    const double ratio = static_cast<double>(c) / std::log(static_cast<double>(n));
    prof.samples.push_back({n, c, ratio});
    if (ratio > prof.sup_ratio) {
      prof.sup_ratio = ratio;
      prof.arg_sup = n;
    }
  };
  // A(n)/log n decays strictly between members, so the sup over [n_lo, n_hi]
  // is attained at n_lo or at a member value.
  push(n_lo);
  for (const auto& v : w.values) {
    if (v <= n_lo) continue;
    if (v > n_hi) break;
    push(v.get_si());
  }
  return prof;
}

DeltaSparseProbe delta_sparse_probe(const SequenceWindow& w, int max_fold, int64_t bound,
                                    long max_modulus, long margin) {
  if (max_fold < 1) throw Error("delta probe: max fold must be >= 1");
  if (w.complete_through < bound)
    throw Error("delta probe: window complete only through " + w.complete_through.get_str() +
                ", need " + std::to_string(bound));
  DeltaSparseProbe probe;
  probe.bound = bound;
  SumsetImage base = one_sided_base(w, bound);
  for (int n = 1; n <= max_fold; ++n) {
    DeltaSparseEntry e;
    e.fold = n;
    SumsetImage sig = sigma_union(base, n);
    e.density = image_density_ladder(sig, std::min<int64_t>(16, bound), bound);
    e.coset = detect_coset(sig, max_modulus, margin, CosetMode::OneSided);
    probe.entries.push_back(std::move(e));
  }
  return probe;
}

PerturbationCheck perturbation_density_check(const SumsetImage& X, const std::vector<int64_t>& F) {
  if (F.empty()) throw Error("perturbation check: offset set F must be nonempty");
  PerturbationCheck chk;
  chk.t = static_cast<int64_t>(F.size());
  for (int64_t f : F) chk.s = std::max(chk.s, std::abs(f));
  const int64_t B = X.bound();
  const int64_t eff = B - chk.s;  // X+F exact on [-(B-s), B-s]
  if (eff < 1) throw Error("perturbation check: offsets exceed the image bound");

  DenseImage shifted(B + chk.s);
  for (int64_t f : F) DenseImage::or_shifted(shifted, X.img, f);

  auto count_range = [](const DenseImage& img, int64_t lo, int64_t hi) {
    int64_t c = 0;
    for (int64_t x = lo; x <= hi; ++x)
      if (img.test(x)) ++c;
    return c;
  };

  bool first = true;
  for (int64_t n = 1; ; n = (n > eff / 2 ? eff : n * 2)) {
    PerturbationSample smp;
    smp.n = n;
    smp.count_base = count_range(X.img, 1, n);
    smp.count_shifted = count_range(shifted, 1, n);
    smp.base_two_sided = count_range(X.img, -(n + chk.s), std::min(n + chk.s, B));
    smp.inflation_ok = smp.count_shifted <= chk.t * smp.base_two_sided;
    if (!smp.inflation_ok) chk.inflation_bound_ok = false;
    chk.samples.push_back(smp);

    mpq_class qb(static_cast<long>(smp.count_base), static_cast<long>(n));
    mpq_class qs(static_cast<long>(smp.count_shifted), static_cast<long>(n));
    qb.canonicalize();
    qs.canonicalize();
    chk.base_ladder.samples.push_back({n, smp.count_base, qb});
    chk.shifted_ladder.samples.push_back({n, smp.count_shifted, qs});
    if (first || qb < chk.base_ladder.min_ratio) {
      chk.base_ladder.min_ratio = qb;
      chk.base_ladder.argmin_n = n;
    }
    if (first || qs < chk.shifted_ladder.min_ratio) {
      chk.shifted_ladder.min_ratio = qs;
      chk.shifted_ladder.argmin_n = n;
    }
    first = false;
    if (n == eff) break;
  }
  return chk;
}

}  // namespace sparsity
