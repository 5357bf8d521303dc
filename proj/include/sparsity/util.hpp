// Shared small utilities: error types, big-integer helpers, deterministic
// hashing for mpz values, and run-length encoding used by the JSON layer.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsity {

// All recoverable failures surface as Error; the CLI maps them to exit code 1
// (invariant/resource violations) or 2 (usage), see tools/main.cpp.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

inline long to_long_checked(const mpz_class& z, const char* what) {
  if (!z.fits_slong_p()) throw Error(std::string(what) + ": value " + z.get_str() + " out of machine range");
  return z.get_si();
}

// Deterministic hash for mpz values (used by hash-set membership in AP search).
struct MpzHash {
  size_t operator()(const mpz_class& z) const {
    const mpz_srcptr p = z.get_mpz_t();
    size_t h = static_cast<size_t>(mpz_sgn(p)) + 0x9e3779b97f4a7c15ULL;
    const size_t n = mpz_size(p);
    for (size_t i = 0; i < n; ++i) {
      const mp_limb_t limb = mpz_getlimbn(p, static_cast<mp_size_t>(i));
      h ^= static_cast<size_t>(limb) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline mpz_class parse_mpz(const std::string& s, const char* what) {
  try {
    return mpz_class(s);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(what) + ": '" + s + "' is not an integer");
  }
}

// Parses "p" or "p/q" into an exact rational.
inline mpq_class parse_mpq(const std::string& s, const char* what) {
  try {
    mpq_class q(s);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(what) + ": '" + s + "' is not a rational p/q");
  }
}

// Run-length encoding of a strictly increasing list of machine integers:
// [(start, len), ...]. Used for compact JSON of sumset members.
inline std::vector<std::pair<int64_t, int64_t>> run_length_encode(const std::vector<int64_t>& xs) {
  std::vector<std::pair<int64_t, int64_t>> runs;
  for (size_t i = 0; i < xs.size();) {
    size_t j = i + 1;
    while (j < xs.size() && xs[j] == xs[j - 1] + 1) ++j;
    runs.emplace_back(xs[i], static_cast<int64_t>(j - i));
    i = j;
  }
  return runs;
}

inline std::string q_to_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace sparsity
