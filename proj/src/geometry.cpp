#include "sparsity/geometry.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "sparsity/recurrence.hpp"
#include "sparsity/util.hpp"

namespace sparsity {

namespace {

mpq_class q_of(const mpz_class& num, const mpz_class& den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::string q_str(const mpq_class& q) { return q_to_string(q); }

double q_d(const mpq_class& q) { return q.get_d(); }

}  // namespace

// ---------------------------------------------------------------------------
// Ratio sets
// ---------------------------------------------------------------------------

RatioSet ratio_set(const std::vector<mpz_class>& values, size_t depth) {
  RatioSet out;
  size_t take = (depth == 0 || depth > values.size()) ? values.size() : depth;
  out.source.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    const mpz_class& v = values[i];
    if (v <= 0) throw UsageError("ratio_set: values must be positive");
    if (i > 0 && v < values[i - 1]) throw UsageError("ratio_set: values must be ascending");
    if (out.source.empty() || out.source.back() != v) out.source.push_back(v);
  }
  out.depth = out.source.size();
  if (out.depth > 2000) throw UsageError("ratio_set: depth too large for exact pair enumeration");
  out.ratios.reserve(out.depth * (out.depth + 1) / 2);
  for (size_t i = 0; i < out.depth; ++i)
    for (size_t j = 0; j <= i; ++j) out.ratios.push_back(q_of(out.source[i], out.source[j]));
  std::sort(out.ratios.begin(), out.ratios.end());
  out.ratios.erase(std::unique(out.ratios.begin(), out.ratios.end()), out.ratios.end());
  return out;
}

// ---------------------------------------------------------------------------
// Discreteness proxy
// ---------------------------------------------------------------------------

DiscretenessReport discreteness_proxy(const RatioSet& q, const mpq_class& b,
                                      const mpq_class& gap_eps) {
  if (b <= 1) throw UsageError("discreteness_proxy: range bound must exceed 1");
  if (gap_eps < 0) throw UsageError("discreteness_proxy: gap threshold must be nonnegative");
  if (q.depth == 0) throw UsageError("discreteness_proxy: empty ratio set");

  DiscretenessReport rep;
  // Checkpoints: about five prefix depths, ending at the full depth.
  std::vector<size_t> depths;
  size_t step = std::max<size_t>(1, q.depth / 5);
  for (size_t d = step; d < q.depth; d += step) depths.push_back(d);
  depths.push_back(q.depth);

  mpq_class best_lo = 0, best_hi = 0;
  for (size_t d : depths) {
    RatioSet sub = ratio_set(q.source, d);
    DiscretenessRow row;
    row.depth = d;
    std::optional<mpq_class> prev;
    std::optional<mpq_class> min_gap;
    for (const mpq_class& r : sub.ratios) {
      if (r > b) break;  // ratios sorted; everything below is in [1, b]
      ++row.count;
      if (prev) {
        mpq_class gap = r - *prev;
        if (!min_gap || gap < *min_gap) {
          min_gap = gap;
          if (d == q.depth) {
            best_lo = *prev;
            best_hi = r;
          }
        }
      }
      prev = r;
    }
    row.has_gap = min_gap.has_value();
    if (min_gap) row.min_gap = *min_gap;
    rep.rows.push_back(std::move(row));
  }

  const DiscretenessRow& last = rep.rows.back();
  bool count_stable =
      rep.rows.size() < 2 || rep.rows[rep.rows.size() - 2].count == last.count;
  bool gap_ok = !last.has_gap || last.min_gap >= gap_eps;
  std::ostringstream note;
  if (count_stable && gap_ok) {
    rep.verdict = Discreteness::Stable;
    note << "count " << last.count << " in [1, " << q_str(b) << "] stable across depths";
    if (last.has_gap) note << "; min gap " << q_str(last.min_gap);
  } else {
    rep.verdict = Discreteness::Accumulating;
    rep.pair_lo = best_lo;
    rep.pair_hi = best_hi;
    if (!count_stable)
      note << "count in [1, " << q_str(b) << "] still growing with depth ("
           << rep.rows[rep.rows.size() - 2].count << " -> " << last.count << ")";
    if (!gap_ok) {
      if (!count_stable) note << "; ";
      note << "ratios " << q_str(best_lo) << " and " << q_str(best_hi) << " are within "
           << q_str(last.min_gap) << " < " << q_str(gap_eps);
    }
  }
  rep.note = note.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Minimum signed ratio-sum table
// ---------------------------------------------------------------------------

namespace {

struct EpsSearch {
  const std::vector<mpq_class>& cand;  // descending: +1, ..., -1
  unsigned long& budget;
  bool& exhausted;
  std::optional<mpq_class> best;
  std::vector<mpq_class> best_tuple;
  std::vector<mpq_class> stack;  // current tuple, stack[0] = 1

  // True iff every nonempty subset of the current k-tuple has nonzero sum.
  bool admissible() const {
    int n = static_cast<int>(stack.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      mpq_class s = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) s += stack[i];
      if (s == 0) return false;
    }
    return true;
  }

  void dfs(size_t min_idx, const mpq_class& sum, int left) {
    if (exhausted) return;
    if (budget == 0) {
      exhausted = true;
      return;
    }
    --budget;
    if (left == 0) {
      mpq_class v = abs(sum);
      if (best && v >= *best) return;
      if (!admissible()) return;
      if (v == 0)
        throw Error("epsilon_table: admissible tuple sums to zero (filter invariant broken)");
      best = v;
      best_tuple = stack;
      return;
    }
    for (size_t j = min_idx; j < cand.size(); ++j) {
      // Reachable sums from here lie in [sum + left*cand.back(), sum + left*cand[j]].
      if (best) {
        mpq_class hi = sum + left * cand[j];
        if (hi < 0 && -hi >= *best) return;  // cand[j] only shrinks with j
        mpq_class lo = sum + left * cand.back();
        if (lo > 0 && lo >= *best) return;  // independent of j
      }
      stack.push_back(cand[j]);
      dfs(j, sum + cand[j], left - 1);
      stack.pop_back();
      if (exhausted) return;
    }
  }
};

}  // namespace

EpsilonTable epsilon_table(const RatioSet& q, int K, const EpsilonConfig& cfg) {
  if (K < 1 || K > 10) throw UsageError("epsilon_table: K must be in [1, 10]");
  if (q.ratios.empty() || q.ratios.front() != 1)
    throw UsageError("epsilon_table: ratio set must contain 1");

  // Candidate values: ±1/rho for each ratio rho, sorted descending.
  std::vector<mpq_class> cand;
  cand.reserve(2 * q.ratios.size());
  for (const mpq_class& rho : q.ratios) cand.push_back(1 / rho);
  std::sort(cand.begin(), cand.end(), std::greater<mpq_class>());
  {
    std::vector<mpq_class> neg;
    neg.reserve(cand.size());
    for (auto it = cand.rbegin(); it != cand.rend(); ++it) neg.push_back(-*it);
    cand.insert(cand.end(), neg.begin(), neg.end());
  }

  EpsilonTable table;
  unsigned long budget = cfg.node_budget;
  for (int k = 1; k <= K; ++k) {
    bool exhausted = false;
    EpsSearch search{cand, budget, exhausted, std::nullopt, {}, {}};
    search.stack.push_back(mpq_class(1));  // q_1 = 1 (global sign symmetry)
    search.dfs(0, mpq_class(1), k - 1);
    if (exhausted) {
      table.budget_exhausted = true;
      std::ostringstream note;
      note << "node budget exhausted at k = " << k << "; table truncated at k = " << (k - 1);
      table.note = note.str();
      break;
    }
    if (!search.best)
      throw Error("epsilon_table: no admissible tuple found (ratio set degenerate)");
    EpsilonEntry e;
    e.k = k;
    e.eps = *search.best;
    e.tuple = search.best_tuple;
    table.entries.push_back(std::move(e));
  }
  table.nodes = cfg.node_budget - budget;
  return table;
}

// ---------------------------------------------------------------------------
// Lambda models
// ---------------------------------------------------------------------------

std::string LambdaModel::describe() const {
  switch (kind) {
    case LambdaModelKind::Identity:
      return "identity";
    case LambdaModelKind::PowerModel: {
      std::ostringstream os;
      os << "coef*base^n";
      if (coef && base)
        os << " (coef ~ " << coef->mid_d() << ", base ~ " << base->mid_d() << ")";
      return os.str();
    }
    case LambdaModelKind::ExplicitValues: {
      std::ostringstream os;
      os << "explicit(" << values.size() << " values)";
      return os.str();
    }
  }
  return "unknown";
}

std::optional<LambdaModel> default_model(const SequenceWindow& w) {
  LambdaModel m;
  switch (w.spec.kind) {
    case GenKind::PowerTower:
    case GenKind::Factorial:
      m.kind = LambdaModelKind::Identity;
      return m;
    case GenKind::FloorGeometric:
      m.kind = LambdaModelKind::PowerModel;
      m.coef = Ball::from_quad(w.spec.fg_c, kPrecStart);
      m.base = Ball::from_quad(w.spec.fg_b, kPrecStart);
      if (m.coef->lower_q() <= 0 || m.base->lower_q() <= 1) return std::nullopt;
      return m;
    case GenKind::Recurrence: {
      long max_raw = -1;
      for (long ri : w.raw_index) max_raw = std::max(max_raw, ri);
      if (max_raw < 0) return std::nullopt;
      SpectralData sd;
      try {
        sd = binet(w.spec.rec, max_raw);
      } catch (const Error&) {
        return std::nullopt;
      }
      if (sd.cls == SpectralClass::Rejected || !sd.alpha || !sd.lambda) return std::nullopt;
      Ball a = sd.alpha->re;
      if (a.contains_zero() || a.lower_q() <= 0) return std::nullopt;
      m.kind = LambdaModelKind::PowerModel;
      m.coef = a;
      m.base = *sd.lambda;
      return m;
    }
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Scaffold witness construction
// ---------------------------------------------------------------------------

namespace {

// Model value per window position, as certified enclosures.
std::vector<Ball> model_values(const SequenceWindow& w, const LambdaModel& model) {
  std::vector<Ball> g;
  g.reserve(w.size());
  switch (model.kind) {
    case LambdaModelKind::Identity:
      for (const mpz_class& v : w.values) g.push_back(Ball::exact_z(v, kPrecStart));
      break;
    case LambdaModelKind::PowerModel: {
      if (!model.coef || !model.base)
        throw UsageError("construct_witness: power model needs coef and base");
      for (size_t i = 0; i < w.size(); ++i) {
        long ri = w.raw_index[i];
        if (ri < 0)
          throw Error("construct_witness: power model needs a raw generator index per element");
        g.push_back(*model.coef * model.base->pow_ui(static_cast<unsigned long>(ri)));
      }
      break;
    }
    case LambdaModelKind::ExplicitValues:
      if (model.values.size() != w.size())
        throw UsageError("construct_witness: explicit model must cover every window position");
      g = model.values;
      break;
  }
  return g;
}

}  // namespace

GeometricWitness construct_witness(const SequenceWindow& w, const LambdaModel& model,
                                   const WitnessConfig& cfg) {
  if (w.size() == 0) throw UsageError("construct_witness: empty window");
  GeometricWitness wit;
  wit.model_desc = model.describe();

  // The identity model is its own exact arithmetic: g(n) = a_n, so deviations
  // and anchor ratios are integer computations with no enclosure slack.
  const bool exact_identity = model.kind == LambdaModelKind::Identity;
  std::vector<Ball> g = model_values(w, model);

  // Certified deviation bound r >= |a_n - g(n)| for every n.
  std::vector<mpq_class> dev;
  dev.reserve(w.size());
  mpq_class dev_max = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    mpq_class u = exact_identity
                      ? mpq_class(0)
                      : (Ball::exact_z(w.values[i], kPrecStart) - g[i]).abs_val().upper_q();
    dev.push_back(u);
    if (u > dev_max) dev_max = u;
  }
  if (cfg.r_override) {
    for (size_t i = 0; i < w.size(); ++i)
      if (dev[i] > *cfg.r_override) {
        std::ostringstream os;
        os << "construct_witness: model deviation at position " << i << " ("
           << q_str(dev[i]) << ") exceeds the requested bound " << q_str(*cfg.r_override);
        throw Error(os.str());
      }
    wit.r = *cfg.r_override;
  } else {
    wit.r = dev_max;
  }
  wit.Theta = 3 * wit.r;

  // Greedy anchors: next anchor is the first later element at distance >= 2r.
  mpq_class two_r = 2 * wit.r;
  wit.anchor_pos.push_back(0);
  wit.f.assign(w.size(), 0);
  for (size_t i = 1; i < w.size(); ++i) {
    const mpz_class& prev_anchor = w.values[wit.anchor_pos.back()];
    if (w.values[i] > prev_anchor && mpq_class(w.values[i]) >= mpq_class(prev_anchor) + two_r)
      wit.anchor_pos.push_back(i);
    wit.f[i] = wit.anchor_pos.size() - 1;
  }
  for (size_t p : wit.anchor_pos) {
    wit.anchor_values.push_back(w.values[p]);
    wit.lambda.push_back(g[p]);
  }
  for (size_t m = 0; m < wit.lambda.size(); ++m) {
    bool positive = exact_identity ? wit.anchor_values[m] > 0 : wit.lambda[m].lower_q() > 0;
    if (!positive) {
      std::ostringstream os;
      os << "construct_witness: model value at anchor " << m << " is not certifiably positive";
      throw Error(os.str());
    }
  }

  // Clause: block map shape (weakly increasing surjection onto [0, max]).
  {
    WitnessClause cl{"block_map_shape", true, ""};
    for (size_t i = 1; i < wit.f.size() && cl.ok; ++i) {
      if (wit.f[i] < wit.f[i - 1] || wit.f[i] > wit.f[i - 1] + 1) cl.ok = false;
    }
    if (wit.f.front() != 0) cl.ok = false;
    if (wit.f.back() + 1 != wit.anchor_pos.size()) cl.ok = false;
    std::ostringstream os;
    os << wit.anchor_pos.size() << " blocks over " << w.size() << " elements";
    cl.detail = os.str();
    wit.clauses.push_back(std::move(cl));
  }

  // Clause: anchor ratio growth lambda_{m+1} >= c * lambda_m with c > 1.
  {
    WitnessClause cl{"anchor_ratio_growth", true, ""};
    if (wit.lambda.size() < 2) {
      cl.detail = "fewer than two anchors; ratio condition vacuous";
      wit.c_lower = 0;
    } else {
      std::optional<mpq_class> cmin;
      for (size_t m = 0; m + 1 < wit.lambda.size(); ++m) {
        mpq_class lo = exact_identity
                           ? q_of(wit.anchor_values[m + 1], wit.anchor_values[m])
                           : (wit.lambda[m + 1] / wit.lambda[m]).lower_q();
        if (!cmin || lo < *cmin) cmin = lo;
      }
      wit.c_lower = *cmin;
      cl.ok = wit.c_lower > 1;
      std::ostringstream os;
      os << "certified ratio lower bound c = " << q_d(wit.c_lower);
      if (!cl.ok) os << " (must exceed 1)";
      cl.detail = os.str();
    }
    wit.clauses.push_back(std::move(cl));
  }

  // Clause: block deviation |a_n - lambda_f(n)| <= Theta.
  {
    WitnessClause cl{"block_deviation_bound", true, ""};
    size_t violations = 0, first_bad = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      mpq_class u =
          exact_identity
              ? mpq_class(abs(w.values[i] - wit.anchor_values[wit.f[i]]))
              : (Ball::exact_z(w.values[i], kPrecStart) - wit.lambda[wit.f[i]]).abs_val().upper_q();
      if (u > wit.theta_max) wit.theta_max = u;
      if (u > wit.Theta) {
        if (violations == 0) first_bad = i;
        ++violations;
      }
    }
    cl.ok = violations == 0;
    std::ostringstream os;
    if (cl.ok)
      os << "max |a_n - lambda_f(n)| <= " << q_d(wit.theta_max) << " <= Theta = "
         << q_d(wit.Theta);
    else
      os << violations << " positions exceed Theta, first at " << first_bad;
    cl.detail = os.str();
    wit.clauses.push_back(std::move(cl));
  }

  // Growth constants: largest grid base b = 1 + j/grid with a_q >= b^(q-p) a_p
  // for every pair of positive positions; delta is then the exact minimum of
  // a_q / (a_p b^(q-p)), at least 1 by construction.
  {
    WitnessClause cl{"pairwise_growth_law", false, ""};
    std::vector<mpz_class> pos;
    for (const mpz_class& v : w.values)
      if (v > 0) pos.push_back(v);
    size_t L = pos.size();
    if (L < 2) {
      cl.detail = "fewer than two positive elements; growth fit skipped";
      wit.growth_note = cl.detail;
    } else if (L > cfg.growth_max_positions) {
      std::ostringstream os;
      os << "window has " << L << " positive elements; exact pair sweep capped at "
         << cfg.growth_max_positions << ", growth fit skipped";
      cl.detail = os.str();
      wit.growth_note = cl.detail;
    } else {
      const int grid = cfg.growth_grid;
      mpz_class den_base = grid;
      for (int j = grid; j >= 1 && !wit.growth_ok; --j) {
        mpz_class num_base = grid + j;
        std::vector<mpz_class> num_pow(L), den_pow(L);
        num_pow[0] = 1;
        den_pow[0] = 1;
        for (size_t t = 1; t < L; ++t) {
          num_pow[t] = num_pow[t - 1] * num_base;
          den_pow[t] = den_pow[t - 1] * den_base;
        }
        // Quick consecutive-pair scan first (the usual failure point), then
        // the full sweep from the longest gaps down.
        bool fail = false;
        for (size_t p = 0; p + 1 < L && !fail; ++p)
          if (pos[p + 1] * den_pow[1] < pos[p] * num_pow[1]) fail = true;
        std::optional<mpq_class> dmin;
        for (size_t gap = L - 1; gap >= 1 && !fail; --gap) {
          for (size_t p = 0; p + gap < L; ++p) {
            mpz_class lhs = pos[p + gap] * den_pow[gap];
            mpz_class rhs = pos[p] * num_pow[gap];
            if (lhs < rhs) {
              fail = true;
              break;
            }
            mpq_class ratio = q_of(lhs, rhs);
            if (!dmin || ratio < *dmin) dmin = ratio;
          }
        }
        if (!fail && dmin) {
          wit.growth_ok = true;
          wit.growth_b = q_of(num_base, den_base);
          wit.growth_delta = *dmin;
        }
      }
      std::ostringstream os;
      if (wit.growth_ok)
        os << "a_q/a_p >= " << q_str(wit.growth_delta) << " * (" << q_str(wit.growth_b)
           << ")^(q-p) verified on all " << (L * (L - 1) / 2) << " pairs";
      else
        os << "no grid base above 1 + 1/" << grid
           << " satisfies the pairwise growth law (sub-exponential growth on this window)";
      cl.detail = os.str();
      wit.growth_note = cl.detail;
      cl.ok = wit.growth_ok;
    }
    wit.clauses.push_back(std::move(cl));
  }

  wit.ok = true;
  for (const WitnessClause& cl : wit.clauses) wit.ok = wit.ok && cl.ok;
  return wit;
}

// ---------------------------------------------------------------------------
// Bounded-support representation checker
// ---------------------------------------------------------------------------

namespace {

// Search target = sum of `left` more signed elements (indices <= max_idx into
// elems, repeats allowed) plus a remainder of magnitude <= d.
bool support_dfs(const std::vector<mpz_class>& elems, size_t max_idx, int left,
                 const mpz_class& remaining, const mpq_class& d,
                 std::vector<mpz_class>& parts, mpz_class& q_out) {
  mpq_class rem_abs = abs(mpq_class(remaining));
  if (rem_abs <= d) {
    q_out = remaining;
    return true;
  }
  if (left == 0) return false;
  // Prune: even `left` copies of the largest available element cannot bring
  // the remainder within d.
  if (rem_abs > mpq_class(left) * mpq_class(elems[max_idx]) + d) return false;
  for (size_t j = max_idx + 1; j-- > 0;) {
    for (int sign : {+1, -1}) {
      mpz_class part = sign * elems[j];
      parts.push_back(part);
      if (support_dfs(elems, j, left - 1, mpz_class(remaining - part), d, parts, q_out))
        return true;
      parts.pop_back();
    }
  }
  return false;
}

}  // namespace

SupportClaimReport check_bounded_support(const SequenceWindow& w, const GeometricWitness& wit,
                                         const EpsilonTable& eps, int n,
                                         const std::vector<mpz_class>& targets) {
  if (n < 1) throw UsageError("check_bounded_support: arity must be at least 1");
  if (static_cast<int>(eps.entries.size()) < n)
    throw UsageError("check_bounded_support: eps-table does not cover the requested arity");

  SupportClaimReport rep;
  rep.n = n;
  rep.d0 = wit.Theta;
  rep.c0 = 0;
  for (int k = 1; k <= n; ++k) {
    mpq_class inv = 1 / eps.entries[k - 1].eps;
    if (inv > rep.c0) rep.c0 = inv;
  }
  rep.d = n * rep.d0;
  rep.c = rep.c0 + rep.c0 * rep.d + rep.d0;

  rep.all_ok = true;
  for (const mpz_class& a : targets) {
    SupportSample s;
    s.target = a;
    if (a == 0) {
      s.ok = false;
      rep.all_ok = false;
      rep.samples.push_back(std::move(s));
      continue;
    }
    // Eligible parts: positive window elements with value < c * |a|.
    mpq_class cap = rep.c * abs(mpq_class(a));
    std::vector<mpz_class> elems;
    for (const mpz_class& v : w.values)
      if (v > 0 && mpq_class(v) < cap) elems.push_back(v);
    if (!elems.empty()) {
      std::vector<mpz_class> parts;
      mpz_class q;
      if (support_dfs(elems, elems.size() - 1, n, a, rep.d, parts, q)) {
        s.ok = true;
        s.parts = std::move(parts);
        s.q = q;
      }
    }
    if (!s.ok) rep.all_ok = false;
    rep.samples.push_back(std::move(s));
  }
  std::ostringstream os;
  os << rep.samples.size() << " targets checked at arity " << n << " with c = " << q_d(rep.c)
     << ", d = " << q_str(rep.d);
  rep.note = os.str();
  return rep;
}

}  // namespace sparsity
