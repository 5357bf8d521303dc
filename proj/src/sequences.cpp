#include "sparsity/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sparsity {
namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<mpz_class> parse_mpz_list(const std::string& s, const char* what) {
  std::vector<mpz_class> out;
  for (const auto& tok : split(s, ',')) {
    std::string t = tok;
    t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
    if (t.empty()) throw UsageError(std::string(what) + ": empty entry in list '" + s + "'");
    out.push_back(parse_mpz(t, what));
  }
  return out;
}

// --- raw generators -------------------------------------------------------

class RawGen {
 public:
  virtual ~RawGen() = default;
  virtual mpz_class next() = 0;  // value at the next raw index (0,1,2,...)
  // True when raw output is certified nondecreasing from the start, so the
  // canonical prefix is complete as soon as `count` distinct values are seen.
  virtual bool monotone() const = 0;
};

class PowerTowerGen : public RawGen {
 public:
  PowerTowerGen(std::vector<unsigned long> qs, unsigned long bit_cap) : qs_(std::move(qs)), bit_cap_(bit_cap) {
    if (qs_.empty()) throw UsageError("power_tower: need at least one base");
    for (unsigned long q : qs_)
      if (q < 2) throw UsageError("power_tower: bases must be >= 2");
  }
  mpz_class next() override {
    // exponent tower evaluated top-down: e = q_t^n, then q_{t-1}^e, ...
    mpz_class e(n_);
    for (size_t i = qs_.size(); i-- > 0;) {
      const double bits_est = mpz_get_d(e.get_mpz_t()) * std::log2(static_cast<double>(qs_[i]));
      if (!e.fits_ulong_p() || bits_est > static_cast<double>(bit_cap_))
        throw Error("power_tower: value at raw index " + std::to_string(n_) + " exceeds the bit cap");
      mpz_class v;
      mpz_ui_pow_ui(v.get_mpz_t(), qs_[i], e.get_ui());
      e = v;
    }
    ++n_;
    return e;
  }
  bool monotone() const override { return true; }

 private:
  std::vector<unsigned long> qs_;
  unsigned long bit_cap_;
  long n_ = 0;
};

class FactorialGen : public RawGen {
 public:
  mpz_class next() override {
    if (n_ == 0) {
      ++n_;
      return mpz_class(1);
    }
    acc_ *= n_;
    ++n_;
    return acc_;
  }
  bool monotone() const override { return true; }

 private:
  mpz_class acc_ = 1;
  long n_ = 0;
};

class FloorGeometricGen : public RawGen {
 public:
  FloorGeometricGen(const QuadExpr& c, const QuadExpr& b) : cur_(c), b_(b) {
    if (c.sign() <= 0) throw UsageError("floor_geometric: c must be positive");
    if (b.cmp(QuadExpr(mpq_class(1))) <= 0) throw UsageError("floor_geometric: b must be > 1");
  }
  mpz_class next() override {
    mpz_class v = cur_.floor();  // exact floor in Q(sqrt(d))
    cur_ = cur_ * b_;
    return v;
  }
  bool monotone() const override { return true; }  // c*b^n strictly increasing => floor nondecreasing

 private:
  QuadExpr cur_, b_;
};

class RecurrenceGen : public RawGen {
 public:
  explicit RecurrenceGen(const RecurrenceSpec& spec) : spec_(spec) { spec_.validate(); }
  mpz_class next() override {
    const size_t k = static_cast<size_t>(n_);
    const size_t order = spec_.coeff.size();
    mpz_class v;
    if (k < order) {
      v = spec_.init[k];
      state_.push_back(v);
    } else {
      v = 0;
      // a_{n+1} = c_d a_n + ... + c_0 a_{n-d}; state_ holds the last d+1 values
      for (size_t i = 0; i < order; ++i) v += spec_.coeff[i] * state_[i];
      state_.erase(state_.begin());
      state_.push_back(v);
    }
    ++n_;
    return v;
  }
  bool monotone() const override { return false; }

 private:
  RecurrenceSpec spec_;
  std::vector<mpz_class> state_;
  long n_ = 0;
};

class PolynomialGen : public RawGen {
 public:
  explicit PolynomialGen(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw UsageError("polynomial: empty coefficient list");
  }
  mpz_class next() override {
    mpz_class x(n_), acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    ++n_;
    return acc;
  }
  bool monotone() const override { return false; }

 private:
  std::vector<mpz_class> c_;
  long n_ = 0;
};

class PrimesGen : public RawGen {
 public:
  mpz_class next() override {
    for (;;) {
      ++cursor_;
      if (cursor_ >= static_cast<long>(sieve_.size())) grow();
      if (sieve_[static_cast<size_t>(cursor_)]) return mpz_class(cursor_);
    }
  }
  bool monotone() const override { return true; }

 private:
  void grow() {
    size_t limit = sieve_.empty() ? (1u << 16) : sieve_.size() * 2;
    sieve_.assign(limit, true);
    sieve_[0] = false;
    if (limit > 1) sieve_[1] = false;
    for (size_t p = 2; p * p < limit; ++p)
      if (sieve_[p])
        for (size_t q = p * p; q < limit; q += p) sieve_[q] = false;
  }
  std::vector<bool> sieve_;
  long cursor_ = 0;
};

class ExplicitGen : public RawGen {
 public:
  explicit ExplicitGen(std::vector<mpz_class> vals) : vals_(std::move(vals)) {}
  mpz_class next() override {
    if (n_ >= static_cast<long>(vals_.size())) throw Error("explicit sequence exhausted (only " + std::to_string(vals_.size()) + " values)");
    return vals_[static_cast<size_t>(n_++)];
  }
  bool monotone() const override { return false; }
  size_t count() const { return vals_.size(); }

 private:
  std::vector<mpz_class> vals_;
  long n_ = 0;
};

std::unique_ptr<RawGen> make_gen(const SequenceSpec& spec, unsigned long bit_cap) {
  switch (spec.kind) {
    case GenKind::PowerTower: return std::make_unique<PowerTowerGen>(spec.tower, bit_cap);
    case GenKind::Factorial: return std::make_unique<FactorialGen>();
    case GenKind::FloorGeometric: return std::make_unique<FloorGeometricGen>(spec.fg_c, spec.fg_b);
    case GenKind::Recurrence: return std::make_unique<RecurrenceGen>(spec.rec);
    case GenKind::Polynomial: return std::make_unique<PolynomialGen>(spec.poly);
    case GenKind::Primes: return std::make_unique<PrimesGen>();
    case GenKind::Explicit: return std::make_unique<ExplicitGen>(spec.explicit_values);
  }
  throw Error("unknown generator kind");
}

}  // namespace

void RecurrenceSpec::validate() const {
  if (init.empty() || init.size() != coeff.size())
    throw UsageError("recurrence: need |initial values| == |coefficients| >= 1");
}

bool SequenceWindow::contains(const mpz_class& v) const {
  return std::binary_search(values.begin(), values.end(), v);
}

size_t SequenceWindow::count_upto(const mpz_class& n) const {
  if (n > complete_through)
    throw Error("count_upto(" + n.get_str() + "): window only complete through " + complete_through.get_str());
  auto it = std::upper_bound(values.begin(), values.end(), n);
  size_t cnt = static_cast<size_t>(it - values.begin());
  // never count 0 (the interval convention is [1, n])
  if (!values.empty() && values.front() == 0 && cnt > 0) --cnt;
  return cnt;
}

SequenceWindow generate(const SequenceSpec& spec, const GenerateOptions& opts) {
  if (opts.count == 0 && !opts.value_bound) throw UsageError("generate: need a count or a value bound");
  if (spec.kind == GenKind::Explicit && spec.offsets.empty()) {
    std::vector<mpz_class> vals = spec.explicit_values;
    SequenceWindow w = window_from_values(std::move(vals), spec.positive_only);
    w.spec = spec;
    return w;
  }

  // Effective offset multiset (A + F); {0} means "no perturbation".
  std::vector<mpz_class> offs;
  if (spec.offsets.empty()) {
    offs = {mpz_class(0)};
  } else if (spec.offsets_subset.empty()) {
    offs = spec.offsets;
  } else {
    for (size_t idx : spec.offsets_subset) {
      if (idx >= spec.offsets.size()) throw UsageError("offset subset index out of range");
      offs.push_back(spec.offsets[idx]);
    }
  }
  const mpz_class min_off = *std::min_element(offs.begin(), offs.end());

  auto gen = make_gen(spec, opts.bit_cap);
  const mpz_class low_bound = spec.positive_only ? 1 : 0;
  std::map<mpz_class, long> collected;  // value -> first raw index
  long raw = 0;
  long first_rejected = -1;
  const size_t want = opts.count == 0 ? static_cast<size_t>(-1) : opts.count;
  // The pull budget guards against stalled generators, so it must scale with
  // the work actually requested: in value-bounded mode a dense stream (e.g. a
  // residue class) legitimately needs on the order of `bound` pulls before the
  // raw cursor passes the bound.
  unsigned long budget = 64 + 16 * (opts.count ? static_cast<unsigned long>(opts.count) : 4096) + 1024;
  if (opts.value_bound && opts.count == 0) {
    mpz_class cap = *opts.value_bound * 4 + 65536;
    budget = cap.fits_ulong_p() ? std::max(budget, cap.get_ui())
                                : std::numeric_limits<unsigned long>::max();
  }
  unsigned long pulls = 0;

  // Tail guard for non-monotone raw streams: the window is sealed only after
  // d+2 consecutive strictly increasing raw values, each exceeding twice the
  // largest candidate kept so far.
  const int guard_needed =
      gen->monotone() ? 0 : std::max(3, (spec.kind == GenKind::Recurrence ? spec.rec.order() : 0) + 2);
  int guard_run = 0;
  mpz_class prev_raw_value = 0;
  bool have_prev = false;

  mpz_class base_bound_limit;  // for value-bounded collection: base values needed up to bound - min_off
  if (opts.value_bound) base_bound_limit = *opts.value_bound - min_off;

  auto enough = [&]() -> bool {
    size_t have = 0;
    if (opts.value_bound) {
      // all collected; completion is decided by the raw cursor passing the bound
      have = collected.size();
      if (opts.count && have >= want) return true;
      return false;
    }
    return collected.size() >= want;
  };

  bool exhausted_explicit = false;
  while (true) {
    if (pulls++ > budget) {
      std::string diag = "generator produced too few admissible values within the raw-pull budget";
      if (first_rejected >= 0) diag += "; first rejected raw index " + std::to_string(first_rejected);
      throw Error(diag);
    }
    mpz_class v;
    try {
      v = gen->next();
    } catch (const Error& e) {
      if (spec.kind == GenKind::Explicit) {
        exhausted_explicit = true;
      } else {
        throw;
      }
    }
    if (exhausted_explicit) break;

    if (mpz_sizeinbase(v.get_mpz_t(), 2) > opts.bit_cap)
      throw Error("raw value at index " + std::to_string(raw) + " exceeds the bit cap");

    // Tail-guard bookkeeping on the raw stream.
    if (have_prev && v > prev_raw_value) {
      ++guard_run;
    } else if (have_prev) {
      guard_run = 0;
    }
    prev_raw_value = v;
    have_prev = true;

    for (const mpz_class& f : offs) {
      const mpz_class y = v + f;
      if (y < low_bound) {
        if (first_rejected < 0) first_rejected = raw;
        continue;
      }
      if (opts.value_bound && y > *opts.value_bound && opts.count == 0) continue;  // outside requested range
      auto it = collected.find(y);
      if (it == collected.end()) collected.emplace(y, raw);
    }
    ++raw;

    // Termination checks.
    bool candidates_done = false;
    if (opts.value_bound && opts.count == 0) {
      candidates_done = v > base_bound_limit;
    } else if (enough()) {
      candidates_done = true;
    }
    if (!candidates_done) continue;

    if (gen->monotone()) break;
    // Non-monotone: require the guard AND the raw cursor beyond all kept candidates.
    if (guard_run >= guard_needed && !collected.empty()) {
      mpz_class top;
      if (opts.value_bound && opts.count == 0) {
        top = base_bound_limit;
      } else {
        // the window max once trimmed to `want` smallest
        auto it = collected.begin();
        std::advance(it, std::min(collected.size(), want) - 1);
        top = it->first;
      }
      if (v > 2 * top + 2) break;
    }
  }

  SequenceWindow w;
  w.spec = spec;
  for (const auto& [val, ri] : collected) {
    if (opts.count && w.values.size() >= want) break;
    w.values.push_back(val);
    w.raw_index.push_back(ri);
  }
  if (w.values.empty()) throw Error("generator produced an empty window");
  if (opts.value_bound && opts.count == 0) {
    w.complete_through = *opts.value_bound;
  } else {
    w.complete_through = w.values.back();
  }
  return w;
}

SequenceWindow generate_count(const SequenceSpec& spec, size_t count) {
  GenerateOptions o;
  o.count = count;
  return generate(spec, o);
}

SequenceWindow window_from_values(std::vector<mpz_class> vals, bool positive_only) {
  if (vals.empty()) throw Error("empty sequence");
  std::map<mpz_class, long> collected;
  const mpz_class low = positive_only ? 1 : 0;
  for (size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] < low) continue;
    collected.emplace(vals[i], static_cast<long>(i));
  }
  if (collected.empty()) throw Error("sequence has no admissible (nonnegative) values");
  SequenceWindow w;
  w.spec.kind = GenKind::Explicit;
  w.spec.positive_only = positive_only;
  for (const auto& [val, ri] : collected) {
    w.values.push_back(val);
    w.raw_index.push_back(ri);
    w.spec.explicit_values.push_back(val);
  }
  w.complete_through = w.values.back();
  return w;
}

SequenceWindow ingest(const std::string& content) {
  size_t i = 0;
  while (i < content.size() && std::isspace(static_cast<unsigned char>(content[i]))) ++i;
  if (i >= content.size()) throw UsageError("ingest: empty input");
  std::vector<mpz_class> vals;
  if (content[i] == '[') {
    json j;
    try {
      j = json::parse(content);
    } catch (const json::exception& e) {
      throw UsageError(std::string("ingest: JSON parse error: ") + e.what());
    }
    if (!j.is_array() || j.empty()) throw UsageError("ingest: JSON input must be a non-empty array of integers");
    for (size_t k = 0; k < j.size(); ++k) {
      const auto& el = j[k];
      if (el.is_number_integer()) {
        vals.emplace_back(static_cast<long>(el.get<int64_t>()));
      } else if (el.is_string()) {
        vals.push_back(parse_mpz(el.get<std::string>(), "ingest"));
      } else {
        throw UsageError("ingest: array entry " + std::to_string(k) + " is not an integer");
      }
    }
  } else {
    std::istringstream is(content);
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::string t = line;
      t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
      if (t.empty()) continue;
      try {
        vals.push_back(mpz_class(t));
      } catch (const std::invalid_argument&) {
        throw UsageError("ingest: line " + std::to_string(lineno) + " is not an integer: '" + line + "'");
      }
    }
    if (vals.empty()) throw UsageError("ingest: no values found");
  }
  return window_from_values(std::move(vals), /*positive_only=*/false);
}

SequenceWindow ingest_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open sequence file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return ingest(buf.str());
}

std::string serialize_text(const SequenceWindow& w) {
  std::ostringstream os;
  for (const auto& v : w.values) os << v.get_str() << "\n";
  return os.str();
}

std::string serialize_json(const SequenceWindow& w) {
  json j;
  j["format"] = "sequence_window_v1";
  j["spec"] = w.spec.str();
  j["count"] = w.values.size();
  j["complete_through"] = w.complete_through.get_str();
  json vals = json::array();
  for (const auto& v : w.values) vals.push_back(v.get_str());
  j["values"] = std::move(vals);
  j["raw_index"] = w.raw_index;
  return j.dump(2);
}

std::vector<mpz_class> trace_sequence_initials(const std::vector<mpz_class>& monic_low_first) {
  if (monic_low_first.empty() || monic_low_first.back() != 1)
    throw Error("trace initials: polynomial must be monic");
  const size_t n = monic_low_first.size() - 1;
  // b_i = coefficient of x^{n-i}; Newton: p_k = -k b_k - sum_{i=1}^{k-1} b_i p_{k-i}
  std::vector<mpz_class> b(n + 1);
  for (size_t i = 0; i <= n; ++i) b[i] = monic_low_first[n - i];
  std::vector<mpz_class> p(n);
  if (n == 0) return p;
  p[0] = static_cast<unsigned long>(n);  // p_0 = number of roots
  for (size_t k = 1; k < n; ++k) {
    mpz_class acc = -mpz_class(static_cast<unsigned long>(k)) * b[k];
    for (size_t i = 1; i < k; ++i) acc -= b[i] * p[k - i];
    p[k] = acc;
  }
  return p;
}

namespace {

SequenceSpec named_spec(const std::string& name) {
  auto rec = [&](std::vector<long> init, std::vector<long> coeff) {
    SequenceSpec s;
    s.kind = GenKind::Recurrence;
    for (long v : init) s.rec.init.emplace_back(v);
    for (long v : coeff) s.rec.coeff.emplace_back(v);
    s.name = name;
    return s;
  };
  auto polyn = [&](std::vector<long> coeffs) {
    SequenceSpec s;
    s.kind = GenKind::Polynomial;
    for (long v : coeffs) s.poly.emplace_back(v);
    s.name = name;
    return s;
  };
  auto order_fib = [&](int n) {
    std::vector<long> init(static_cast<size_t>(n), 0), coeff(static_cast<size_t>(n), 1);
    init.back() = 1;
    return rec(init, coeff);
  };
  if (name == "fibonacci") return rec({0, 1}, {1, 1});
  if (name == "lucas") return rec({2, 1}, {1, 1});
  if (name == "pell") return rec({0, 1}, {1, 2});
  if (name == "pell_lucas") return rec({2, 2}, {1, 2});
  if (name == "order3_fibonacci") return order_fib(3);
  if (name == "order4_fibonacci") return order_fib(4);
  if (name == "order5_fibonacci") return order_fib(5);
  if (name == "order6_fibonacci") return order_fib(6);
  if (name == "padovan") return rec({1, 1, 1}, {1, 1, 0});
  if (name == "perrin") return rec({3, 0, 2}, {1, 1, 0});
  if (name == "lehmer") {
    // Trace sequence of x^10 + x^9 - x^7 - x^6 - x^5 - x^4 - x^3 + x + 1.
    const std::vector<mpz_class> f = {1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1};
    SequenceSpec s;
    s.kind = GenKind::Recurrence;
    s.rec.init = trace_sequence_initials(f);
    // a_{n+1} = c_9 a_n + ... + c_0 a_{n-9} with x^10 = c_9 x^9 + ... + c_0
    for (size_t i = 0; i < 10; ++i) s.rec.coeff.push_back(-f[i]);
    s.name = name;
    return s;
  }
  if (name == "pow2_plus_n") return rec({1, 3, 6}, {2, -5, 4});  // 2^n + n
  if (name == "squares") return polyn({0, 0, 1});
  if (name == "odd_squares") return polyn({1, 4, 4});  // (2n+1)^2
  if (name == "naturals") {
    SequenceSpec s = polyn({0, 1});
    s.positive_only = false;
    return s;
  }
  if (name == "factorials" || name == "factorial") {
    SequenceSpec s;
    s.kind = GenKind::Factorial;
    s.name = "factorials";
    return s;
  }
  if (name == "primes") {
    SequenceSpec s;
    s.kind = GenKind::Primes;
    s.name = "primes";
    return s;
  }
  throw UsageError("unknown sequence name: '" + name + "'");
}

}  // namespace

SequenceSpec SequenceSpec::parse(const std::string& text) {
  const size_t colon = text.find(':');
  const std::string head = text.substr(0, colon == std::string::npos ? text.size() : colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  SequenceSpec s;
  if (head == "power_tower") {
    s.kind = GenKind::PowerTower;
    for (const auto& t : split(args, ',')) {
      const mpz_class q = parse_mpz(t, "power_tower");
      if (q < 2 || !q.fits_ulong_p()) throw UsageError("power_tower: bases must be small integers >= 2");
      s.tower.push_back(q.get_ui());
    }
    if (s.tower.empty()) throw UsageError("power_tower: missing bases");
    s.name = text;
    return s;
  }
  if (head == "floor_geometric") {
    const auto parts = split(args, ';');
    if (parts.size() != 2) throw UsageError("floor_geometric: expected 'c_expr;b_expr'");
    auto strip_key = [](std::string t) {
      const size_t eq = t.find('=');
      return eq == std::string::npos ? t : t.substr(eq + 1);
    };
    s.kind = GenKind::FloorGeometric;
    s.fg_c = QuadExpr::parse(strip_key(parts[0]));
    s.fg_b = QuadExpr::parse(strip_key(parts[1]));
    s.name = text;
    return s;
  }
  if (head == "recurrence") {
    const auto parts = split(args, ';');
    if (parts.size() != 2) throw UsageError("recurrence: expected 'a_0,..,a_d;c_0,..,c_d'");
    s.kind = GenKind::Recurrence;
    s.rec.init = parse_mpz_list(parts[0], "recurrence initial values");
    s.rec.coeff = parse_mpz_list(parts[1], "recurrence coefficients");
    s.rec.validate();
    s.name = text;
    return s;
  }
  if (head == "polynomial") {
    s.kind = GenKind::Polynomial;
    s.poly = parse_mpz_list(args, "polynomial");
    s.name = text;
    return s;
  }
  if (head == "explicit") {
    s.kind = GenKind::Explicit;
    s.explicit_values = parse_mpz_list(args, "explicit");
    s.name = text;
    return s;
  }
  return named_spec(text);
}

std::string SequenceSpec::str() const {
  if (!name.empty()) return name;
  std::ostringstream os;
  switch (kind) {
    case GenKind::PowerTower: {
      os << "power_tower:";
      for (size_t i = 0; i < tower.size(); ++i) os << (i ? "," : "") << tower[i];
      break;
    }
    case GenKind::Factorial: os << "factorials"; break;
    case GenKind::FloorGeometric: os << "floor_geometric:" << fg_c.str() << ";" << fg_b.str(); break;
    case GenKind::Recurrence: {
      os << "recurrence:";
      for (size_t i = 0; i < rec.init.size(); ++i) os << (i ? "," : "") << rec.init[i].get_str();
      os << ";";
      for (size_t i = 0; i < rec.coeff.size(); ++i) os << (i ? "," : "") << rec.coeff[i].get_str();
      break;
    }
    case GenKind::Polynomial: {
      os << "polynomial:";
      for (size_t i = 0; i < poly.size(); ++i) os << (i ? "," : "") << poly[i].get_str();
      break;
    }
    case GenKind::Primes: os << "primes"; break;
    case GenKind::Explicit: os << "explicit(" << explicit_values.size() << " values)"; break;
  }
  if (!offsets.empty()) {
    os << "+F{";
    for (size_t i = 0; i < offsets.size(); ++i) os << (i ? "," : "") << offsets[i].get_str();
    os << "}";
  }
  return os.str();
}

}  // namespace sparsity
