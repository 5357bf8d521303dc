// sparsity-lab: command-line front end.  Every subcommand is a thin adapter
// from flags to library calls; all verdict logic lives in the library.
//
// Exit codes: 0 ok, 1 runtime error or invariant violation, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sparsity/density.hpp"
#include "sparsity/equations.hpp"
#include "sparsity/geometry.hpp"
#include "sparsity/progressions.hpp"
#include "sparsity/recurrence.hpp"
#include "sparsity/report.hpp"
#include "sparsity/sequences.hpp"
#include "sparsity/sumset.hpp"
#include "sparsity/util.hpp"

namespace {

using namespace sparsity;
using ordered_json = nlohmann::ordered_json;

std::string fmt_d(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

mpz_class parse_z(const std::string& s, const char* what) {
  try {
    return mpz_class(s);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(what) + ": '" + s + "' is not an integer");
  }
}

std::vector<mpz_class> parse_z_list(const std::string& s, const char* what) {
  std::vector<mpz_class> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_z(tok, what));
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

std::vector<long> parse_long_list(const std::string& s, const char* what) {
  std::vector<long> out;
  for (const mpz_class& z : parse_z_list(s, what)) out.push_back(to_long_checked(z, what));
  return out;
}

// Writes JSON to a path, with "-" meaning stdout.
void emit_json(const std::string& text, const std::string& path) {
  if (path == "-" || path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text << "\n";
}

// --------------------------------------------------------------------------
// Config file: one `key = value` per line, '#' comments.
// --------------------------------------------------------------------------

void apply_config_file(const std::string& path, ClassifyConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw UsageError("config: cannot read '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto eq = line.find('=');
    auto trim = [](std::string s) {
      const char* ws = " \t\r";
      s.erase(0, s.find_first_not_of(ws));
      if (auto e = s.find_last_not_of(ws); e != std::string::npos) s.erase(e + 1);
      else s.clear();
      return s;
    };
    if (eq == std::string::npos) {
      if (!trim(line).empty())
        throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    long v;
    try {
      v = std::stol(val);
    } catch (const std::exception&) {
      throw UsageError("config line " + std::to_string(lineno) + ": '" + val +
                       "' is not an integer");
    }
    if (key == "bound") cfg.bound = v;
    else if (key == "max_fold") cfg.max_fold = static_cast<int>(v);
    else if (key == "coset_max_modulus") cfg.coset_max_modulus = v;
    else if (key == "coset_margin") cfg.coset_margin = v;
    else if (key == "ap_min_length") cfg.ap_min_length = v;
    else if (key == "ap_refute_length") cfg.ap_refute_length = v;
    else if (key == "ap_dense_threshold") cfg.ap_dense_threshold = static_cast<size_t>(v);
    else if (key == "ap_star_subwindow") cfg.ap_star_subwindow = static_cast<size_t>(v);
    else if (key == "order_k_lo") cfg.order_k_lo = v;
    else if (key == "order_k_hi") cfg.order_k_hi = v;
    else if (key == "sparse_fold") cfg.sparse_fold = static_cast<int>(v);
    else if (key == "sparse_gate") cfg.sparse_gate = v;
    else if (key == "sparse_range") cfg.sparse_range = v;
    else if (key == "sparse_depth_margin") cfg.sparse_depth_margin = static_cast<size_t>(v);
    else if (key == "sparse_shallow_cap") cfg.sparse_shallow_cap = static_cast<size_t>(v);
    else if (key == "sparse_deep_fraction") cfg.sparse_deep_fraction = static_cast<int>(v);
    else if (key == "bit_cap") cfg.bit_cap = static_cast<unsigned long>(v);
    else
      throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

// --------------------------------------------------------------------------
// Window sources shared by the subcommands.
// --------------------------------------------------------------------------

struct Source {
  std::string spec;
  std::string file;

  void add_to(CLI::App* sub) {
    sub->add_option("--spec", spec,
                    "sequence spec, e.g. fibonacci, power_tower:2, primes, squares, "
                    "recurrence:0,1;1,1, polynomial:0,0,1, explicit:1,2,3");
    sub->add_option("--file", file, "file with one integer per line (or a JSON array)")
        ->check(CLI::ExistingFile);
  }

  SequenceWindow load(int64_t bound, size_t count, unsigned long bit_cap) const {
    if (spec.empty() == file.empty())
      throw UsageError("need exactly one of --spec or --file");
    if (!file.empty()) return ingest_file(file);
    SequenceSpec sp = SequenceSpec::parse(spec);
    GenerateOptions o;
    o.bit_cap = bit_cap;
    if (count > 0) o.count = count;
    else o.value_bound = mpz_class(static_cast<long>(bound));
    return generate(sp, o);
  }
};

void print_window_head(const SequenceWindow& w, std::ostream& os) {
  os << "sequence: " << w.spec.str() << "\n"
     << "elements: " << w.size() << " (complete through " << w.complete_through.get_str()
     << ")\n";
}

std::string coset_str(const CosetWitness& cw) {
  std::ostringstream os;
  os << (cw.one_sided ? "one-sided progression " : "full coset ") << cw.modulus
     << (cw.one_sided ? "k + " : "Z + ") << cw.residue << " across [" << cw.range_lo << ", "
     << cw.range_hi << "]";
  return os.str();
}

std::string ap_str(const APWitness& ap) {
  std::ostringstream os;
  os << ap.start.get_str() << " + " << ap.diff.get_str() << "j, length " << ap.length
     << (ap.strongly_contained ? " (strongly contained)" : "");
  return os.str();
}

std::string terms_str(const SequenceWindow& w, const std::vector<SparseTerm>& terms) {
  std::ostringstream os;
  for (size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    os << (t.sign > 0 ? (i ? " + " : "") : (i ? " - " : "-"))
       << w.values[t.index].get_str() << "[i=" << t.index << "]";
  }
  return os.str();
}

// --------------------------------------------------------------------------
// Subcommand bodies.  Each returns the process exit code.
// --------------------------------------------------------------------------

int run_generate(const Source& src, int64_t bound, size_t count, unsigned long bit_cap,
                 const std::string& json_out, bool quiet) {
  SequenceWindow w = src.load(bound, count, bit_cap);
  if (!json_out.empty()) {
    emit_json(serialize_json(w), json_out);
    return 0;
  }
  if (quiet) {
    std::cout << serialize_text(w);
    return 0;
  }
  print_window_head(w, std::cout);
  std::cout << serialize_text(w);
  return 0;
}

int run_sumset(const Source& src, int64_t bound, size_t count, unsigned long bit_cap, int fold,
               bool use_signed, bool exact_fold, bool coset, long max_modulus,
               const std::string& target, int max_sum, long index_bound,
               const std::string& json_out) {
  SequenceWindow w = src.load(bound, count, bit_cap);

  if (!target.empty()) {  // sparse membership of a single target
    const mpz_class t = parse_z(target, "--target");
    const size_t M = index_bound >= 0 ? static_cast<size_t>(index_bound) : w.size() - 1;
    SparseResult r = sparse_membership(w, t, max_sum, use_signed, M);
    if (!json_out.empty()) {
      ordered_json j;
      j["target"] = t.get_str();
      j["max_terms"] = r.max_terms;
      j["index_bound"] = r.index_bound;
      j["found"] = r.found;
      if (r.found) {
        ordered_json terms = ordered_json::array();
        for (const auto& term : r.terms)
          terms.push_back({{"index", term.index},
                           {"sign", term.sign},
                           {"value", w.values[term.index].get_str()}});
        j["terms"] = terms;
      }
      emit_json(j.dump(2), json_out);
    } else {
      print_window_head(w, std::cout);
      if (r.found)
        std::cout << t.get_str() << " = " << terms_str(w, r.terms) << "  (" << r.terms.size()
                  << " terms, indices <= " << r.index_bound << ")\n";
      else
        std::cout << t.get_str() << ": no representation with <= " << max_sum
                  << (use_signed ? " signed" : "") << " terms, indices <= " << r.index_bound
                  << "\n";
    }
    return 0;
  }

  SumsetImage base = use_signed ? signed_closure(w, bound) : one_sided_base(w, bound);
  SumsetImage img = exact_fold ? iterated_sumset(base, fold) : sigma_union(base, fold);
  std::optional<CosetScan> scan;
  if (coset) scan = detect_coset(img, max_modulus);

  if (!json_out.empty()) {
    ordered_json j = ordered_json::parse(image_to_json(img));
    if (scan) {
      ordered_json c;
      c["max_modulus"] = scan->max_modulus;
      c["scan_lo"] = scan->scan_lo;
      c["scan_hi"] = scan->scan_hi;
      if (scan->witness) {
        c["modulus"] = scan->witness->modulus;
        c["residue"] = scan->witness->residue;
        c["one_sided"] = scan->witness->one_sided;
        c["range_lo"] = scan->witness->range_lo;
        c["range_hi"] = scan->witness->range_hi;
      }
      j["coset"] = c;
    }
    emit_json(j.dump(2), json_out);
    return 0;
  }

  print_window_head(w, std::cout);
  std::cout << (exact_fold ? "exact " : "") << "Sigma_" << fold << "(" << (use_signed ? "+-" : "")
            << "A) on [" << -img.bound() << ", " << img.bound() << "]: " << img.img.popcount()
            << " members\n";
  std::vector<int64_t> mem = img.img.members();
  std::cout << "first members:";
  for (size_t i = 0; i < mem.size() && i < 20; ++i) std::cout << " " << mem[i];
  if (mem.size() > 20) std::cout << " ...";
  std::cout << "\n";
  if (scan) {
    if (scan->witness) std::cout << "coset: " << coset_str(*scan->witness) << "\n";
    else
      std::cout << "coset: none with modulus <= " << scan->max_modulus << " on ["
                << scan->scan_lo << ", " << scan->scan_hi << "]\n";
  }
  return 0;
}

int run_density(const Source& src, int64_t bound, unsigned long bit_cap, int fold,
                int64_t banach_len, bool log_growth, const std::string& json_out) {
  SequenceWindow w = src.load(bound, 0, bit_cap);
  const int64_t lo = std::min<int64_t>(16, bound);

  DensityLadder ladder;
  if (fold > 0) {
    SumsetImage img = sigma_union(one_sided_base(w, bound), fold);
    ladder = image_density_ladder(img, lo, bound);
  } else {
    ladder = lower_density_estimate(w, lo, bound);
  }
  BanachLadder bl = banach_density_estimate(w, banach_len > 0 ? banach_len : bound / 2);
  std::optional<LogGrowthProfile> lg;
  if (log_growth) lg = log_growth_ratio(w, 10, bound);

  if (!json_out.empty()) {
    ordered_json j;
    j["sequence"] = w.spec.str();
    j["fold"] = fold;
    ordered_json ls = ordered_json::array();
    for (const auto& s : ladder.samples)
      ls.push_back({{"n", s.n}, {"count", s.count}, {"ratio", q_to_string(s.ratio)}});
    j["ladder"] = ls;
    j["min_ratio"] = q_to_string(ladder.min_ratio);
    j["argmin_n"] = ladder.argmin_n;
    ordered_json bs = ordered_json::array();
    for (const auto& s : bl.samples)
      bs.push_back({{"len", s.len},
                    {"max_count", s.max_count},
                    {"best_start", s.best_start},
                    {"ratio", q_to_string(s.ratio)}});
    j["banach"] = bs;
    if (lg) {
      j["log_growth_sup"] = lg->sup_ratio;
      j["log_growth_arg"] = lg->arg_sup;
    }
    emit_json(j.dump(2), json_out);
    return 0;
  }

  print_window_head(w, std::cout);
  std::cout << (fold > 0 ? "density ladder of Sigma_" + std::to_string(fold) + "(A)"
                         : "density ladder of A")
            << " on [" << lo << ", " << bound << "]:\n";
  for (const auto& s : ladder.samples)
    std::cout << "  A(" << s.n << ") = " << s.count << "   ratio " << fmt_d(s.ratio.get_d())
              << "\n";
  std::cout << "min ratio " << fmt_d(ladder.min_ratio.get_d()) << " at n = " << ladder.argmin_n
            << "\n";
  std::cout << "banach ladder (best window per length):\n";
  for (const auto& s : bl.samples)
    std::cout << "  len " << s.len << ": " << s.max_count << " members starting at "
              << s.best_start << "   ratio " << fmt_d(s.ratio.get_d()) << "\n";
  if (lg)
    std::cout << "sup A(n)/log n = " << fmt_d(lg->sup_ratio) << " at n = " << lg->arg_sup << "\n";
  return 0;
}

int run_aps(const Source& src, int64_t bound, unsigned long bit_cap, int max_fold,
            int64_t min_length, bool brute, bool strong, size_t subwindow,
            const std::string& json_out) {
  SequenceWindow w = src.load(bound, 0, bit_cap);

  std::vector<int64_t> vals;
  for (const mpz_class& v : w.values)
    if (v > 0 && v <= bound) vals.push_back(to_long_checked(v, "window value"));
  std::optional<APWitness> best = longest_ap(vals, min_length);
  if (brute) {
    std::optional<APWitness> ref = longest_ap_brute(vals, min_length);
    const int64_t a = best ? best->length : 0, b = ref ? ref->length : 0;
    if (a != b)
      throw Error("longest_ap disagrees with the brute-force oracle: " + std::to_string(a) +
                  " vs " + std::to_string(b));
  }

  std::optional<APSparseProbe> probe;
  if (max_fold > 0) probe = ap_sparse_probe(w, max_fold, bound, min_length);
  std::vector<APWitness> strongs;
  if (strong) strongs = strongly_contained_aps(w, min_length, subwindow);

  if (!json_out.empty()) {
    ordered_json j;
    j["sequence"] = w.spec.str();
    j["bound"] = bound;
    j["min_length"] = min_length;
    if (best)
      j["longest"] = {{"start", best->start.get_str()},
                      {"diff", best->diff.get_str()},
                      {"length", best->length}};
    if (brute) j["brute_checked"] = true;
    if (probe) {
      ordered_json folds = ordered_json::array();
      for (const auto& e : probe->entries)
        folds.push_back(
            {{"fold", e.fold},
             {"half_length", e.at_half.longest ? e.at_half.longest->length : 0},
             {"full_length", e.at_full.longest ? e.at_full.longest->length : 0},
             {"growing", e.growing}});
      j["sumset_folds"] = folds;
    }
    if (strong) {
      ordered_json arr = ordered_json::array();
      for (const auto& ap : strongs)
        arr.push_back({{"start", ap.start.get_str()},
                       {"diff", ap.diff.get_str()},
                       {"length", ap.length}});
      j["strongly_contained"] = arr;
    }
    emit_json(j.dump(2), json_out);
    return 0;
  }

  print_window_head(w, std::cout);
  if (best) std::cout << "longest AP in A on [1, " << bound << "]: " << ap_str(*best) << "\n";
  else std::cout << "no AP of length >= " << min_length << " in A on [1, " << bound << "]\n";
  if (brute) std::cout << "brute-force oracle agrees\n";
  if (probe) {
    std::cout << "longest AP per sumset fold (at " << bound / 2 << " -> " << bound << "):\n";
    for (const auto& e : probe->entries)
      std::cout << "  fold " << e.fold << ": "
                << (e.at_half.longest ? e.at_half.longest->length : 0) << " -> "
                << (e.at_full.longest ? e.at_full.longest->length : 0)
                << (e.growing ? "  (growing)" : "") << "\n";
  }
  if (strong) {
    std::cout << strongs.size() << " strongly contained AP(s) of length >= " << min_length
              << "\n";
    for (size_t i = 0; i < strongs.size() && i < 10; ++i)
      std::cout << "  " << ap_str(strongs[i]) << "\n";
    if (strongs.size() > 10) std::cout << "  ...\n";
  }
  return 0;
}

int run_geometry(const Source& src, int64_t bound, unsigned long bit_cap, size_t depth,
                 int epsilon_k, const std::string& json_out) {
  SequenceWindow w = src.load(bound, 0, bit_cap);

  std::optional<LambdaModel> model = default_model(w);
  std::optional<GeometricWitness> wit;
  if (model) wit = construct_witness(w, *model);
  std::optional<EpsilonTable> eps;
  if (epsilon_k > 0) eps = epsilon_table(ratio_set(w.values, depth), epsilon_k);

  if (!json_out.empty()) {
    ordered_json j;
    j["sequence"] = w.spec.str();
    if (!model) j["model"] = nullptr;
    else {
      j["model"] = model->describe();
      ordered_json clauses = ordered_json::array();
      for (const auto& c : wit->clauses)
        clauses.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
      j["witness"] = {{"ok", wit->ok},
                      {"anchors", wit->anchor_values.size()},
                      {"r", q_to_string(wit->r)},
                      {"Theta", q_to_string(wit->Theta)},
                      {"c_lower", q_to_string(wit->c_lower)},
                      {"growth_delta", q_to_string(wit->growth_delta)},
                      {"growth_b", q_to_string(wit->growth_b)},
                      {"clauses", clauses}};
    }
    if (eps) {
      ordered_json arr = ordered_json::array();
      for (const auto& e : eps->entries) arr.push_back({{"k", e.k}, {"eps", q_to_string(e.eps)}});
      j["epsilon_table"] = arr;
    }
    emit_json(j.dump(2), json_out);
    return 0;
  }

  print_window_head(w, std::cout);
  if (!model) {
    std::cout << "no calibrated lambda model for this sequence shape\n";
  } else {
    std::cout << "model: " << model->describe() << "\n"
              << "witness " << (wit->ok ? "certified" : "NOT certified") << ": "
              << wit->anchor_values.size() << " anchors, r = " << fmt_d(wit->r.get_d())
              << ", Theta = " << fmt_d(wit->Theta.get_d())
              << ", anchor ratio >= " << fmt_d(wit->c_lower.get_d()) << "\n";
    if (wit->growth_ok)
      std::cout << "growth law: a_q/a_p >= " << q_to_string(wit->growth_delta) << " * ("
                << q_to_string(wit->growth_b) << ")^(q-p) on all window pairs\n";
    for (const auto& c : wit->clauses)
      if (!c.ok) std::cout << "  failed clause [" << c.name << "]: " << c.detail << "\n";
  }
  if (eps) {
    std::cout << "epsilon table (ratio-set depth " << depth << "):\n";
    for (const auto& e : eps->entries)
      std::cout << "  eps_" << e.k << " = " << q_to_string(e.eps) << "\n";
    if (eps->budget_exhausted) std::cout << "  (search budget exhausted: " << eps->note << ")\n";
  }
  return 0;
}

int run_equations(const Source& src, int64_t bound, unsigned long bit_cap, int k, int l,
                  const std::string& r_str, long M, bool naive, bool decompose_flag,
                  const std::string& s_max_str, long t_max, const std::string& threshold_str,
                  const std::string& json_out) {
  const mpz_class r = parse_z(r_str, "--r");
  SequenceWindow w = src.load(bound, static_cast<size_t>(M) + 2, bit_cap);
  if (w.size() <= static_cast<size_t>(M))
    throw UsageError("window has " + std::to_string(w.size()) +
                     " elements; need more than the index bound M = " + std::to_string(M));

  Enumeration e = enumerate_solutions(w, k, l, r, static_cast<size_t>(M));
  if (naive) {
    Enumeration ref = enumerate_solutions_naive(w, k, l, r, static_cast<size_t>(M));
    if (e.solutions.size() != ref.solutions.size())
      throw Error("enumeration disagrees with the naive oracle: " +
                  std::to_string(e.solutions.size()) + " vs " +
                  std::to_string(ref.solutions.size()));
  }
  std::optional<DecompositionBound> db;
  if (decompose_flag)
    db = find_decomposition_bound(w, k, l, r, static_cast<size_t>(M),
                                  parse_z(s_max_str, "--s-max"), t_max);
  std::optional<size_t> thresh;
  if (!threshold_str.empty())
    thresh = ratio_threshold(w, parse_z(threshold_str, "--threshold"));

  if (!json_out.empty()) {
    ordered_json j;
    j["sequence"] = w.spec.str();
    j["k"] = k;
    j["l"] = l;
    j["r"] = r.get_str();
    j["index_bound"] = e.index_bound;
    j["solutions"] = e.solutions.size();
    ordered_json sols = ordered_json::array();
    for (const auto& s : e.solutions) sols.push_back({{"m", s.m}, {"n", s.n}, {"spread", s.spread}});
    j["tuples"] = sols;
    j["completeness"] = {{"proved", e.completeness.proved},
                         {"m_prime", e.completeness.m_prime},
                         {"detail", e.completeness.detail}};
    if (naive) j["naive_checked"] = true;
    if (db) {
      if (db->bound)
        j["decomposition_bound"] = {{"s", db->bound->first.get_str()},
                                    {"t", db->bound->second}};
      else j["decomposition_bound"] = nullptr;
      j["decomposition_exceptions"] = db->exceptions.size();
    }
    if (thresh) j["ratio_threshold"] = *thresh;
    emit_json(j.dump(2), json_out);
    return 0;
  }

  print_window_head(w, std::cout);
  std::cout << "equation: sum of " << k << " elements = " << r.get_str() << " + sum of " << l
            << " elements, indices <= " << M << "\n"
            << "solutions: " << e.solutions.size() << "\n";
  for (size_t i = 0; i < e.solutions.size() && i < 10; ++i) {
    const auto& s = e.solutions[i];
    std::cout << "  m = (";
    for (size_t t = 0; t < s.m.size(); ++t) std::cout << (t ? "," : "") << s.m[t];
    std::cout << ")  n = (";
    for (size_t t = 0; t < s.n.size(); ++t) std::cout << (t ? "," : "") << s.n[t];
    std::cout << ")  spread " << s.spread << "\n";
  }
  if (e.solutions.size() > 10) std::cout << "  ...\n";
  std::cout << "completeness: " << (e.completeness.proved ? "proved; " : "not proved; ")
            << e.completeness.detail << "\n";
  if (naive) std::cout << "naive oracle agrees\n";
  if (db) {
    if (db->bound)
      std::cout << "decomposition bound: (s, t) = (" << db->bound->first.get_str() << ", "
                << db->bound->second << ")";
    else std::cout << "decomposition bound: none within the caps";
    std::cout << "  [" << db->solutions_considered << " solutions considered, "
              << db->exceptions.size() << " exceptions]\n";
  }
  if (thresh) std::cout << "ratio threshold: last position with a_p <= k* a_{p-1} is " << *thresh
                        << "\n";
  return 0;
}

int run_recurrence(const std::string& spec_str, const std::string& poly_str, long binet_length,
                   const std::string& zero_u, const std::string& zero_v,
                   const std::string& zero_r_str, const std::string& json_out) {
  if (spec_str.empty() == poly_str.empty())
    throw UsageError("need exactly one of --spec or --poly");

  std::optional<RecurrenceSpec> rec;
  ZPoly f;
  if (!poly_str.empty()) {
    f = ZPoly(parse_z_list(poly_str, "--poly"));
    if (!zero_u.empty() || !zero_v.empty())
      throw UsageError("--zero-u/--zero-v need a --spec recurrence, not a bare polynomial");
  } else {
    SequenceSpec sp = SequenceSpec::parse(spec_str);
    if (sp.kind != GenKind::Recurrence)
      throw UsageError("--spec must name a linear recurrence for this subcommand");
    rec = sp.rec;
    f = char_poly(*rec);
  }

  SpectralData sd = rec && binet_length > 0 ? binet(*rec, binet_length) : classify(f);

  std::optional<ZeroSetReport> zr;
  if (!zero_u.empty() || !zero_v.empty()) {
    ZeroOffsets sig;
    if (!zero_u.empty()) sig.u = parse_long_list(zero_u, "--zero-u");
    if (!zero_v.empty()) sig.v = parse_long_list(zero_v, "--zero-v");
    zr = zero_set(*rec, sig, parse_z(zero_r_str, "--zero-r"));
  }

  if (!json_out.empty()) {
    ordered_json j;
    ordered_json coeffs = ordered_json::array();
    for (const auto& c : sd.poly.c) coeffs.push_back(c.get_str());
    j["char_poly_low_first"] = coeffs;
    j["class"] = sd.class_str();
    if (!sd.reject_reason.empty()) j["reject_reason"] = sd.reject_reason;
    if (sd.lambda) j["lambda"] = sd.lambda->str();
    j["roots"] = sd.roots.size();
    j["irreducibility_verified"] = sd.irreducibility_verified;
    if (sd.checked_through >= 0) {
      j["binet"] = {{"residual_bound", q_to_string(sd.residual_bound)},
                    {"checked_through", sd.checked_through}};
      if (sd.alpha) j["alpha"] = sd.alpha->re.str();
    }
    if (zr) {
      ordered_json z;
      z["verdict"] = zr->verdict == ZeroVerdict::IdenticallyZero ? "identically_zero"
                     : zr->verdict == ZeroVerdict::Finite        ? "finite"
                                                                 : "undetermined";
      z["zeros"] = zr->zeros;
      z["n0"] = zr->n0;
      z["scanned_through"] = zr->scanned_through;
      z["note"] = zr->note;
      j["zero_set"] = z;
    }
    emit_json(j.dump(2), json_out);
    return 0;
  }

  std::cout << "characteristic polynomial (low first):";
  for (const auto& c : sd.poly.c) std::cout << " " << c.get_str();
  std::cout << "\nclass: " << sd.class_str();
  if (!sd.reject_reason.empty()) std::cout << " (" << sd.reject_reason << ")";
  std::cout << "\n";
  if (sd.lambda) std::cout << "lambda: " << sd.lambda->str() << "\n";
  std::cout << "roots: " << sd.roots.size()
            << (sd.irreducibility_verified ? " (irreducibility verified)" : "") << "\n";
  if (sd.checked_through >= 0)
    std::cout << "binet: residual bound " << fmt_d(sd.residual_bound.get_d())
              << " on raw indices [0, " << sd.checked_through << "]"
              << (sd.alpha ? ", alpha = " + sd.alpha->re.str() : "") << "\n";
  if (zr) {
    std::cout << "zero set: ";
    if (zr->verdict == ZeroVerdict::IdenticallyZero) std::cout << "identically zero";
    else if (zr->verdict == ZeroVerdict::Finite) {
      std::cout << "finite {";
      for (size_t i = 0; i < zr->zeros.size(); ++i) std::cout << (i ? "," : "") << zr->zeros[i];
      std::cout << "}, certified none past " << zr->n0;
    } else std::cout << "undetermined (" << zr->note << ")";
    std::cout << "\n";
  }
  return 0;
}

void print_report_text(const PropertyReport& rep, std::ostream& os) {
  os << "sequence: " << rep.sequence << "\n";
  if (!rep.error.empty()) {
    os << "  error: " << rep.error << "\n";
    return;
  }
  for (const auto& [name, r] : rep.properties) {
    char line[80];
    std::snprintf(line, sizeof line, "  %-22s %-19s", name.c_str(), verdict_name(r.verdict));
    os << line << (r.error.empty() ? r.detail : "error: " + r.error) << "\n";
  }
  if (rep.violations.empty()) {
    os << "consistency: ok\n";
  } else {
    os << "consistency VIOLATIONS:\n";
    for (const auto& v : rep.violations) os << "  " << v << "\n";
  }
}

int run_classify(const Source& src, ClassifyConfig cfg, const std::string& json_out) {
  PropertyReport rep;
  if (!src.file.empty()) {
    SequenceWindow w = ingest_file(src.file);
    // trim the horizon to what the file certifies
    if (w.complete_through < cfg.bound)
      cfg.bound = to_long_checked(w.complete_through, "file horizon");
    rep = classify_window(w, cfg);
  } else {
    if (src.spec.empty()) throw UsageError("need exactly one of --spec or --file");
    rep = classify_sequence(SequenceSpec::parse(src.spec), cfg);
  }
  if (!json_out.empty()) emit_json(report_to_json(rep), json_out);
  else print_report_text(rep, std::cout);
  return rep.violations.empty() && rep.error.empty() ? 0 : 1;
}

int run_suite_cmd(const std::string& corpus_path, ClassifyConfig cfg, bool strict,
                  const std::string& json_out) {
  std::vector<std::string> specs;
  if (corpus_path.empty()) {
    specs = builtin_corpus();
  } else {
    std::ifstream f(corpus_path);
    if (!f) throw UsageError("cannot read corpus file '" + corpus_path + "'");
    std::string line;
    while (std::getline(f, line)) {
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      std::stringstream ss(line);
      std::string tok;
      if (ss >> tok) specs.push_back(tok);
    }
  }
  SuiteResult s = run_suite(specs, cfg, strict);
  if (!json_out.empty()) {
    emit_json(suite_to_json(s), json_out);
  } else {
    for (const auto& rep : s.reports) {
      print_report_text(rep, std::cout);
      std::cout << "\n";
    }
    std::cout << s.reports.size() << " report(s), " << s.violation_count << " violation(s), "
              << s.error_count << " error(s)\n";
  }
  return s.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparsity-lab: empirical classification of integer sequences against a\n"
               "sparsity hierarchy (sumset cosets, densities, progressions, geometric\n"
               "witnesses, equation decompositions, recurrence spectra)."};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "key=value defaults file (keys: bound, max_fold, coset_max_modulus, "
                 "coset_margin, ap_min_length, ap_refute_length, ap_dense_threshold, "
                 "ap_star_subwindow, order_k_lo, order_k_hi, sparse_fold, sparse_gate, "
                 "sparse_range, sparse_depth_margin, sparse_shallow_cap, "
                 "sparse_deep_fraction, bit_cap)");

  ClassifyConfig cfg;  // defaults; --config and per-command flags override

  // generate
  auto* g = app.add_subcommand("generate", "enumerate a sequence window");
  Source g_src;
  g_src.add_to(g);
  int64_t g_bound = cfg.bound;
  size_t g_count = 0;
  std::string g_json;
  bool g_quiet = false;
  g->add_option("--bound", g_bound, "collect all elements <= bound");
  g->add_option("--count", g_count, "collect the first N elements instead");
  g->add_option("--json", g_json, "write JSON to this path ('-' = stdout)");
  g->add_flag("--values-only", g_quiet, "print just the values (pipe-friendly)");

  // sumset
  auto* su = app.add_subcommand("sumset", "iterated sumsets, coset scans, sparse membership");
  Source su_src;
  su_src.add_to(su);
  int64_t su_bound = cfg.bound;
  size_t su_count = 0;
  int su_fold = 2, su_max_sum = 3;
  bool su_signed = false, su_exact = false, su_coset = false;
  long su_modulus = cfg.coset_max_modulus, su_index_bound = -1;
  std::string su_target, su_json;
  su->add_option("--bound", su_bound, "dense universe bound");
  su->add_option("--count", su_count, "generate the first N elements instead of all <= bound");
  su->add_option("--fold", su_fold, "number of summands n");
  su->add_flag("--signed", su_signed, "allow +- signs on summands");
  su->add_flag("--exact-fold", su_exact, "exactly n summands instead of the union over <= n");
  su->add_flag("--coset", su_coset, "scan the image for a full coset / progression");
  su->add_option("--max-modulus", su_modulus, "largest modulus the coset scan tries");
  su->add_option("--target", su_target, "sparse route: find one representation of this target");
  su->add_option("--max-sum", su_max_sum, "sparse route: term budget");
  su->add_option("--index-bound", su_index_bound, "sparse route: largest window index used");
  su->add_option("--json", su_json, "write JSON to this path ('-' = stdout)");

  // density
  auto* de = app.add_subcommand("density", "counting-function ladders and Banach windows");
  Source de_src;
  de_src.add_to(de);
  int64_t de_bound = cfg.bound, de_banach = 0;
  int de_fold = 0;
  bool de_log = false;
  std::string de_json;
  de->add_option("--bound", de_bound, "ladder horizon");
  de->add_option("--fold", de_fold, "ladder of Sigma_fold(A) instead of A (0 = window)");
  de->add_option("--banach-len", de_banach, "longest Banach window (default bound/2)");
  de->add_flag("--log-growth", de_log, "also report sup A(n)/log n");
  de->add_option("--json", de_json, "write JSON to this path ('-' = stdout)");

  // aps
  auto* ap = app.add_subcommand("aps", "arithmetic progressions in A and its sumsets");
  Source ap_src;
  ap_src.add_to(ap);
  int64_t ap_bound = cfg.bound, ap_minlen = cfg.ap_min_length;
  int ap_fold = 0;
  bool ap_brute = false, ap_strong = false;
  size_t ap_sub = cfg.ap_star_subwindow;
  std::string ap_json;
  ap->add_option("--bound", ap_bound, "search horizon");
  ap->add_option("--min-length", ap_minlen, "shortest AP reported");
  ap->add_option("--max-sum", ap_fold, "also scan Sigma_n(A) for n up to this (0 = skip)");
  ap->add_flag("--brute", ap_brute, "cross-check the window search against brute force");
  ap->add_flag("--strong", ap_strong, "list strongly contained APs");
  ap->add_option("--subwindow", ap_sub, "start-pair prefix for the strong scan");
  ap->add_option("--json", ap_json, "write JSON to this path ('-' = stdout)");

  // geometry
  auto* ge = app.add_subcommand("geometry", "scaffold witnesses and the epsilon table");
  Source ge_src;
  ge_src.add_to(ge);
  int64_t ge_bound = cfg.bound;
  size_t ge_depth = 30;
  int ge_eps = 0;
  std::string ge_json;
  ge->add_option("--bound", ge_bound, "window horizon");
  ge->add_option("--depth", ge_depth, "ratio-set depth for the epsilon table");
  ge->add_option("--epsilon", ge_eps, "compute eps_1..eps_K (0 = skip)");
  ge->add_option("--json", ge_json, "write JSON to this path ('-' = stdout)");

  // equations
  auto* eq = app.add_subcommand("equations", "solution sets of k-vs-l element equations");
  Source eq_src;
  eq_src.add_to(eq);
  int64_t eq_bound = cfg.bound;
  int eq_k = 1, eq_l = 1;
  std::string eq_r = "0";
  long eq_M = 30, eq_tmax = 10;
  bool eq_naive = false, eq_dec = false;
  std::string eq_smax = "30", eq_thresh, eq_json;
  eq->add_option("--k", eq_k, "summands on the left")->required();
  eq->add_option("--l", eq_l, "summands on the right")->required();
  eq->add_option("--r", eq_r, "constant offset");
  eq->add_option("--index-bound", eq_M, "largest window index M");
  eq->add_option("--bound", eq_bound, "fallback horizon when the window needs generating");
  eq->add_flag("--naive", eq_naive, "cross-check against the brute-force enumeration");
  eq->add_flag("--decompose", eq_dec, "find the least (s, t) decomposition bound");
  eq->add_option("--s-max", eq_smax, "largest transfer constant tried");
  eq->add_option("--t-max", eq_tmax, "largest spread threshold tried");
  eq->add_option("--threshold", eq_thresh, "report the ratio threshold for this k*");
  eq->add_option("--json", eq_json, "write JSON to this path ('-' = stdout)");

  // recurrence
  auto* re = app.add_subcommand("recurrence", "spectral classification and zero sets");
  std::string re_spec, re_poly, re_u, re_v, re_r = "0", re_json;
  long re_len = 40;
  re->add_option("--spec", re_spec, "recurrence spec or built-in name (e.g. fibonacci)");
  re->add_option("--poly", re_poly, "characteristic polynomial, low-first coefficients");
  re->add_option("--length", re_len, "raw indices verified by the spectral solver (0 = classify only)");
  re->add_option("--zero-u", re_u, "zero set: plus-side offsets u_1,u_2,...");
  re->add_option("--zero-v", re_v, "zero set: minus-side offsets v_1,v_2,...");
  re->add_option("--zero-r", re_r, "zero set: constant term");
  re->add_option("--json", re_json, "write JSON to this path ('-' = stdout)");

  // classify
  auto* cl = app.add_subcommand("classify", "full property report for one sequence");
  Source cl_src;
  cl_src.add_to(cl);
  std::optional<int64_t> cl_bound;
  std::optional<int> cl_maxsum;
  std::string cl_json;
  cl->add_option("--bound", cl_bound, "dense horizon");
  cl->add_option("--max-sum", cl_maxsum, "sumset folds scanned");
  cl->add_option("--json", cl_json, "write the report JSON to this path ('-' = stdout)");

  // suite
  auto* st = app.add_subcommand("suite", "reports for the built-in corpus (or a spec list)");
  std::string st_corpus, st_json;
  bool st_strict = false;
  st->add_option("--corpus", st_corpus, "file with one sequence spec per line");
  st->add_flag("--strict", st_strict, "nonzero exit on per-sequence errors too");
  st->add_option("--json", st_json, "write the bundle JSON to this path ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) apply_config_file(config_path, cfg);

    if (*g) return run_generate(g_src, g_bound, g_count, cfg.bit_cap, g_json, g_quiet);
    if (*su)
      return run_sumset(su_src, su_bound, su_count, cfg.bit_cap, su_fold, su_signed, su_exact,
                        su_coset, su_modulus, su_target, su_max_sum, su_index_bound, su_json);
    if (*de)
      return run_density(de_src, de_bound, cfg.bit_cap, de_fold, de_banach, de_log, de_json);
    if (*ap)
      return run_aps(ap_src, ap_bound, cfg.bit_cap, ap_fold, ap_minlen, ap_brute, ap_strong,
                     ap_sub, ap_json);
    if (*ge) return run_geometry(ge_src, ge_bound, cfg.bit_cap, ge_depth, ge_eps, ge_json);
    if (*eq)
      return run_equations(eq_src, eq_bound, cfg.bit_cap, eq_k, eq_l, eq_r, eq_M, eq_naive,
                           eq_dec, eq_smax, eq_tmax, eq_thresh, eq_json);
    if (*re) return run_recurrence(re_spec, re_poly, re_len, re_u, re_v, re_r, re_json);
    if (*cl) {
      if (cl_bound) cfg.bound = *cl_bound;
      if (cl_maxsum) cfg.max_fold = *cl_maxsum;
      return run_classify(cl_src, cfg, cl_json);
    }
    if (*st) return run_suite_cmd(st_corpus, cfg, st_strict, st_json);
    throw UsageError("no subcommand");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
