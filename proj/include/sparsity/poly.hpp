// Exact integer polynomial arithmetic (low-degree, big coefficients):
// arithmetic, derivatives, exact gcd (for square-freeness certificates),
// reciprocal/self-reciprocal structure, the trace transform g with
// f(z) = z^m g(z + 1/z) for even self-reciprocal f, exact evaluation over
// Z / Q, and certified evaluation over real/complex balls.
#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "sparsity/ball.hpp"
#include "sparsity/util.hpp"

namespace sparsity {

struct ZPoly {
  std::vector<mpz_class> c;  // coefficient of x^i at index i; normalized

  ZPoly() = default;
  explicit ZPoly(std::vector<mpz_class> coeffs) : c(std::move(coeffs)) { normalize(); }

  void normalize() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  const mpz_class& lead() const { return c.back(); }
  bool is_monic() const { return !c.empty() && c.back() == 1; }
  mpz_class coeff(int i) const {
    return (i >= 0 && i < static_cast<int>(c.size())) ? c[static_cast<size_t>(i)] : mpz_class(0);
  }

  ZPoly operator+(const ZPoly& o) const;
  ZPoly operator-(const ZPoly& o) const;
  ZPoly operator*(const ZPoly& o) const;
  ZPoly scaled(const mpz_class& k) const;
  ZPoly derivative() const;
  ZPoly reversed() const;  // reciprocal polynomial x^deg * f(1/x)
  bool self_reciprocal() const;

  mpz_class content() const;
  ZPoly primitive_part() const;

  mpz_class eval_z(const mpz_class& x) const;
  mpq_class eval_q(const mpq_class& x) const;
  Ball eval_ball(const Ball& x) const;
  CBall eval_cball(const CBall& x) const;

  // Remainder of *this modulo a monic divisor (exact over Z).
  ZPoly rem_monic(const ZPoly& monic_divisor) const;

  // Cauchy bound: every complex root has |z| <= 1 + max|c_i|/|lead|.
  mpq_class cauchy_root_bound() const;

  std::string str() const;
};

// Primitive gcd over Z[x] (sign-normalized to positive leading coefficient).
ZPoly poly_gcd(const ZPoly& a, const ZPoly& b);

// All integer roots (exact; exhaustive over the Cauchy bound).
std::vector<mpz_class> integer_roots(const ZPoly& f);

// For even-degree self-reciprocal f of degree 2m: returns g of degree m with
// f(z) = z^m * g(z + 1/z).  Throws if the shape preconditions fail.
ZPoly trace_transform(const ZPoly& f);

}  // namespace sparsity
