#include "sparsity/equations.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "sparsity/util.hpp"

namespace sparsity {

namespace {

struct SideTuple {
  std::vector<size_t> idx;  // weakly decreasing
  mpz_class sum;
};

// All weakly decreasing index tuples of the given length over positions
// [0, M], with their value sums.
std::vector<SideTuple> side_tuples(const SequenceWindow& w, int len, size_t M) {
  std::vector<SideTuple> out;
  SideTuple cur;
  cur.sum = 0;
  // Depth-first: each next index is <= the previous one.
  std::vector<std::pair<size_t, bool>> stack;  // (next candidate, pushed?)
  // Simple recursion via lambda.
  auto rec = [&](auto&& self, size_t max_idx, int left) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (size_t j = max_idx + 1; j-- > 0;) {
      cur.idx.push_back(j);
      cur.sum += w.values[j];
      self(self, j, left - 1);
      cur.sum -= w.values[j];
      cur.idx.pop_back();
    }
  };
  (void)stack;
  rec(rec, M, len);
  return out;
}

long tuple_spread(const SolutionTuple& s) {
  bool any = false;
  size_t lo = 0, hi = 0;
  for (size_t i : s.m) {
    if (!any || i < lo) lo = i;
    if (!any || i > hi) hi = i;
    any = true;
  }
  for (size_t i : s.n) {
    if (!any || i < lo) lo = i;
    if (!any || i > hi) hi = i;
    any = true;
  }
  return any ? static_cast<long>(hi - lo) : 0;
}

void sort_solutions(std::vector<SolutionTuple>& sols) {
  std::sort(sols.begin(), sols.end(), [](const SolutionTuple& a, const SolutionTuple& b) {
    if (a.m != b.m) return a.m < b.m;
    return a.n < b.n;
  });
}

void validate_enum_args(const SequenceWindow& w, int k, int l, size_t M) {
  if (k < 0 || l < 0) throw UsageError("equation sides must have nonnegative arity");
  if (k > 6 || l > 6) throw UsageError("equation arity capped at 6 per side");
  if (M >= w.size()) throw UsageError("window must extend beyond the index bound M");
}

EnumerationCertificate growth_certificate(const SequenceWindow& w, int k, int l,
                                          const mpz_class& r, size_t M,
                                          const std::pair<mpq_class, mpq_class>& growth) {
  EnumerationCertificate cert;
  const mpq_class& delta = growth.first;
  const mpq_class& b = growth.second;
  if (w.values.empty() || w.values[0] <= 0) {
    cert.detail = "growth certificate needs an all-positive window";
    return cert;
  }
  if (delta <= 0 || b <= 1 || k + l < 2) {
    cert.detail = "growth constants unusable for a completeness certificate";
    return cert;
  }
  size_t m_prime = M / 2;
  // A solution with one index p > M and all others <= m_prime forces
  //   a_p <= |r| + (k+l-1) * a_{m_prime},  while  a_p >= delta*b^(M+1-m_prime)*a_{m_prime}.
  mpq_class pow = 1;
  for (size_t t = 0; t < M + 1 - m_prime; ++t) pow *= b;
  mpq_class lhs = delta * pow * mpq_class(w.values[m_prime]);
  mpq_class rhs = mpq_class(abs(r)) + mpq_class(k + l - 1) * mpq_class(w.values[m_prime]);
  std::ostringstream os;
  if (lhs > rhs) {
    cert.proved = true;
    cert.m_prime = m_prime;
    os << "no solution mixes an index > " << M << " with all other indices <= " << m_prime
       << ": the growth law forces such a value above " << lhs.get_d()
       << " while the small side caps it at " << rhs.get_d()
       << " (law verified pairwise on this window; beyond it the bound extrapolates)";
  } else {
    os << "growth constants too weak to certify completeness at M' = " << m_prime;
  }
  cert.detail = os.str();
  return cert;
}

// Smallest |s'| over all proper (I, J), not both empty, with the attaining
// masks (iteration order: I ascending, J ascending; strict improvements only).
struct TransferMin {
  bool found = false;
  mpz_class s_prime;
  unsigned i_mask = 0, j_mask = 0;
};

TransferMin min_transfer(const SequenceWindow& w, const SolutionTuple& sol) {
  TransferMin best;
  const unsigned i_full = (1u << sol.k) - 1, j_full = (1u << sol.l) - 1;
  for (unsigned im = 0; im <= i_full; ++im) {
    if (sol.k > 0 && im == i_full) continue;  // I must be proper
    mpz_class sum_i = 0;
    for (int b = 0; b < sol.k; ++b)
      if (im & (1u << b)) sum_i += w.values[sol.m[b]];
    for (unsigned jm = 0; jm <= j_full; ++jm) {
      if (sol.l > 0 && jm == j_full) continue;  // J must be proper
      if (im == 0 && jm == 0) continue;  // not both empty
      mpz_class sum_j = 0;
      for (int b = 0; b < sol.l; ++b)
        if (jm & (1u << b)) sum_j += w.values[sol.n[b]];
      mpz_class s_prime = sum_j - sum_i - sol.r;
      if (!best.found || abs(s_prime) < abs(best.s_prime)) {
        best.found = true;
        best.s_prime = s_prime;
        best.i_mask = im;
        best.j_mask = jm;
      }
    }
  }
  // k = 0 and l = 0 leaves no admissible (I, J) at all.
  if (sol.k == 0 && sol.l == 0) best.found = false;
  return best;
}

std::vector<int> mask_positions(unsigned mask, int len) {
  std::vector<int> out;
  for (int b = 0; b < len; ++b)
    if (mask & (1u << b)) out.push_back(b + 1);
  return out;
}

// Exact re-verification of a split certificate against its base solution.
void verify_certificate(const SequenceWindow& w, const SolutionTuple& sol, const mpz_class& s_prime,
                        unsigned i_mask, unsigned j_mask) {
  mpz_class sum_m = 0, sum_n = 0, sum_i = 0, sum_j = 0;
  for (int b = 0; b < sol.k; ++b) {
    sum_m += w.values[sol.m[b]];
    if (i_mask & (1u << b)) sum_i += w.values[sol.m[b]];
  }
  for (int b = 0; b < sol.l; ++b) {
    sum_n += w.values[sol.n[b]];
    if (j_mask & (1u << b)) sum_j += w.values[sol.n[b]];
  }
  if (sol.r + sum_m != sum_n)
    throw Error("decomposition certificate: base tuple fails its defining equation");
  if (sol.r + s_prime + sum_i != sum_j)
    throw Error("decomposition certificate: first sub-equation fails exact re-verification");
  if ((sum_m - sum_i) != s_prime + (sum_n - sum_j))
    throw Error("decomposition certificate: second sub-equation fails exact re-verification");
}

}  // namespace

Enumeration enumerate_solutions(const SequenceWindow& w, int k, int l, const mpz_class& r,
                                size_t M,
                                const std::optional<std::pair<mpq_class, mpq_class>>& growth) {
  validate_enum_args(w, k, l, M);
  Enumeration out;
  out.index_bound = M;

  std::vector<SideTuple> left = side_tuples(w, k, M);
  std::vector<SideTuple> right = side_tuples(w, l, M);
  std::map<mpz_class, std::vector<const SideTuple*>> by_sum;
  for (const SideTuple& t : left) by_sum[t.sum].push_back(&t);
  for (const SideTuple& t : right) {
    auto it = by_sum.find(t.sum - r);
    if (it == by_sum.end()) continue;
    for (const SideTuple* m : it->second) {
      SolutionTuple s;
      s.m = m->idx;
      s.n = t.idx;
      s.k = k;
      s.l = l;
      s.r = r;
      s.spread = tuple_spread(s);
      out.solutions.push_back(std::move(s));
    }
  }
  sort_solutions(out.solutions);

  if (growth)
    out.completeness = growth_certificate(w, k, l, r, M, *growth);
  else
    out.completeness.detail = "bounded only: no growth constants supplied";
  return out;
}

Enumeration enumerate_solutions_naive(const SequenceWindow& w, int k, int l, const mpz_class& r,
                                      size_t M) {
  validate_enum_args(w, k, l, M);
  Enumeration out;
  out.index_bound = M;
  std::vector<SideTuple> left = side_tuples(w, k, M);
  std::vector<SideTuple> right = side_tuples(w, l, M);
  for (const SideTuple& a : left)
    for (const SideTuple& b : right)
      if (r + a.sum == b.sum) {
        SolutionTuple s;
        s.m = a.idx;
        s.n = b.idx;
        s.k = k;
        s.l = l;
        s.r = r;
        s.spread = tuple_spread(s);
        out.solutions.push_back(std::move(s));
      }
  sort_solutions(out.solutions);
  out.completeness.detail = "bounded only: brute-force reference";
  return out;
}

std::optional<DecompositionCertificate> decompose(const SequenceWindow& w,
                                                  const SolutionTuple& sol, const mpz_class& s) {
  if (s < 0) throw UsageError("decompose: transfer bound must be nonnegative");
  for (size_t i : sol.m)
    if (i >= w.size()) throw UsageError("decompose: solution index beyond window");
  for (size_t i : sol.n)
    if (i >= w.size()) throw UsageError("decompose: solution index beyond window");

  TransferMin best = min_transfer(w, sol);
  if (!best.found || abs(best.s_prime) > s) return std::nullopt;
  verify_certificate(w, sol, best.s_prime, best.i_mask, best.j_mask);
  DecompositionCertificate cert;
  cert.base = sol;
  cert.s_prime = best.s_prime;
  cert.I = mask_positions(best.i_mask, sol.k);
  cert.J = mask_positions(best.j_mask, sol.l);
  return cert;
}

DecompositionBound find_decomposition_bound(const SequenceWindow& w, int k, int l,
                                            const mpz_class& r, size_t M, const mpz_class& s_max,
                                            long t_max) {
  if (s_max < 0 || t_max < 0) throw UsageError("find_decomposition_bound: bounds must be nonnegative");
  Enumeration en = enumerate_solutions(w, k, l, r, M);
  DecompositionBound out;
  out.solutions_considered = en.solutions.size();

  std::vector<std::optional<mpz_class>> min_abs;
  min_abs.reserve(en.solutions.size());
  for (const SolutionTuple& sol : en.solutions) {
    TransferMin tm = min_transfer(w, sol);
    if (tm.found)
      min_abs.push_back(mpz_class(abs(tm.s_prime)));
    else
      min_abs.push_back(std::nullopt);
  }

  for (mpz_class s = 0; s <= s_max; ++s) {
    long t_needed = 0;
    for (size_t i = 0; i < en.solutions.size(); ++i) {
      bool decomposable = min_abs[i] && *min_abs[i] <= s;
      if (!decomposable) t_needed = std::max(t_needed, en.solutions[i].spread);
    }
    if (t_needed <= t_max) {
      out.bound = {s, t_needed};
      std::ostringstream os;
      os << "every solution with spread > " << t_needed << " splits with |s'| <= " << s << " ("
         << en.solutions.size() << " solutions at M = " << M << ")";
      out.note = os.str();
      return out;
    }
  }

  for (size_t i = 0; i < en.solutions.size(); ++i) {
    bool decomposable = min_abs[i] && *min_abs[i] <= s_max;
    if (!decomposable && en.solutions[i].spread > t_max) out.exceptions.push_back(en.solutions[i]);
  }
  std::ostringstream os;
  os << out.exceptions.size() << " high-spread solutions stay undecomposable up to s = "
     << s_max.get_str() << ", t = " << t_max;
  out.note = os.str();
  return out;
}

std::vector<PatternSlice> bounded_spread_slice(const SequenceWindow& w, int k, int l,
                                               const mpz_class& r, long t, size_t M) {
  if (t < 0) throw UsageError("bounded_spread_slice: spread bound must be nonnegative");
  Enumeration en = enumerate_solutions(w, k, l, r, M);
  std::map<std::pair<std::vector<long>, std::vector<long>>, std::vector<size_t>> groups;
  for (const SolutionTuple& sol : en.solutions) {
    if (sol.spread > t) continue;
    size_t base = SIZE_MAX;
    for (size_t i : sol.m) base = std::min(base, i);
    for (size_t i : sol.n) base = std::min(base, i);
    if (base == SIZE_MAX) base = 0;  // k = l = 0
    std::vector<long> u, v;
    for (size_t i : sol.m) u.push_back(static_cast<long>(i - base));
    for (size_t i : sol.n) v.push_back(static_cast<long>(i - base));
    groups[{u, v}].push_back(base);
  }

  std::vector<PatternSlice> out;
  for (auto& [key, bases] : groups) {
    PatternSlice ps;
    ps.u = key.first;
    ps.v = key.second;
    std::sort(bases.begin(), bases.end());
    ps.bases = bases;
    long max_off = 0;
    for (long o : ps.u) max_off = std::max(max_off, o);
    for (long o : ps.v) max_off = std::max(max_off, o);
    ps.max_base = M - static_cast<size_t>(max_off);

    // Scan-level summary of the base set within [first, max_base].
    const size_t R = ps.max_base;
    const size_t b0 = bases.front();
    std::ostringstream os;
    if (bases.size() == R - b0 + 1) {
      os << "cofinite at window scale: every base from " << b0 << " through " << R;
    } else {
      size_t guard = std::max<size_t>(3, (R - b0) / 4);
      if (bases.back() + guard <= R) {
        os << "finite at window scale: no base beyond " << bases.back() << " (headroom "
           << (R - bases.back()) << ")";
      } else {
        // Try eventual periodicity over the membership bitmap.
        std::vector<char> mem(R + 1, 0);
        for (size_t b : bases) mem[b] = 1;
        bool periodic = false;
        for (size_t p = 1; !periodic && p <= (R - b0) / 3; ++p) {
          size_t start = b0;
          while (start + 2 * p <= R) {
            bool match = true;
            for (size_t i = start; i + p <= R && match; ++i)
              if (mem[i] != mem[i + p]) match = false;
            if (match) break;
            ++start;
          }
          if (start + 2 * p <= R) {
            periodic = true;
            os << "eventually periodic at window scale: period " << p << " from base " << start;
          }
        }
        if (!periodic) os << "irregular at window scale";
      }
    }
    ps.summary = os.str();
    out.push_back(std::move(ps));
  }
  return out;
}

LambdaBalance lambda_balance_decompose(const SequenceWindow& w, const SolutionTuple& sol,
                                       const GeometricWitness& wit, const mpq_class& tolerance) {
  if (tolerance <= 0) throw UsageError("lambda_balance_decompose: tolerance must be positive");
  if (wit.f.size() != w.size())
    throw UsageError("lambda_balance_decompose: witness does not cover the window");
  for (size_t i : sol.m)
    if (i >= w.size()) throw UsageError("lambda_balance_decompose: solution index beyond window");
  for (size_t i : sol.n)
    if (i >= w.size()) throw UsageError("lambda_balance_decompose: solution index beyond window");

  LambdaBalance out;
  // s = max(|r|, ceil((k+l) * Theta)).
  mpq_class kl_theta = mpq_class(sol.k + sol.l) * wit.Theta;
  mpz_class ceil_kt;
  mpz_cdiv_q(ceil_kt.get_mpz_t(), kl_theta.get_num().get_mpz_t(), kl_theta.get_den().get_mpz_t());
  out.s_bound = abs(sol.r);
  if (ceil_kt > out.s_bound) out.s_bound = ceil_kt;

  const unsigned i_full = sol.k > 0 ? (1u << sol.k) - 1 : 0;
  const unsigned j_full = sol.l > 0 ? (1u << sol.l) - 1 : 0;
  size_t refused = 0;
  for (unsigned istar = 1; istar <= i_full; ++istar) {
    for (unsigned jstar = 1; jstar <= j_full; ++jstar) {
      if (istar == i_full && jstar == j_full) continue;  // complements both empty
      // Lambda gap for the starred subsets.
      std::optional<Ball> gap;
      auto add = [&](const Ball& b, int sign) {
        Ball term = sign > 0 ? b : -b;
        gap = gap ? (*gap + term) : term;
      };
      for (int b = 0; b < sol.k; ++b)
        if (istar & (1u << b)) add(wit.lambda[wit.f[sol.m[b]]], +1);
      for (int b = 0; b < sol.l; ++b)
        if (jstar & (1u << b)) add(wit.lambda[wit.f[sol.n[b]]], -1);
      mpq_class gap_hi = gap->abs_val().upper_q();
      if (gap_hi > tolerance) {
        if (gap->contains_zero()) ++refused;  // possibly balanced, not certifiable
        continue;
      }
      // Candidate balance: exact integer transfer from the starred subsets.
      mpz_class s_prime = 0;
      for (int b = 0; b < sol.k; ++b)
        if (istar & (1u << b)) s_prime += w.values[sol.m[b]];
      for (int b = 0; b < sol.l; ++b)
        if (jstar & (1u << b)) s_prime -= w.values[sol.n[b]];
      if (abs(s_prime) > out.s_bound) continue;
      unsigned i_mask = i_full & ~istar;
      unsigned j_mask = j_full & ~jstar;
      verify_certificate(w, sol, s_prime, i_mask, j_mask);
      DecompositionCertificate cert;
      cert.base = sol;
      cert.s_prime = s_prime;
      cert.I = mask_positions(i_mask, sol.k);
      cert.J = mask_positions(j_mask, sol.l);
      out.cert = std::move(cert);
      std::ostringstream os;
      os << "lambda sums agree within " << gap_hi.get_d() << " <= tolerance; |s'| = "
         << mpz_class(abs(s_prime)).get_str() << " <= s = " << out.s_bound.get_str();
      out.note = os.str();
      return out;
    }
  }
  std::ostringstream os;
  os << "no certifiable lambda balance among proper starred subsets";
  if (refused) os << " (" << refused << " candidates straddle zero beyond the tolerance)";
  out.note = os.str();
  return out;
}

std::optional<size_t> ratio_threshold(const SequenceWindow& w, const mpz_class& kstar) {
  if (kstar < 1) throw UsageError("ratio_threshold: factor must be at least 1");
  for (size_t p = w.size(); p-- > 1;)
    if (w.values[p] <= kstar * w.values[p - 1]) return p;
  return std::nullopt;
}

}  // namespace sparsity
