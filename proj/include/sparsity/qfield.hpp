// Exact arithmetic in real quadratic fields Q(sqrt(d)).
//
// Elements are stored as (p + q*sqrt(d)) / den with integer p, q, den > 0 and
// d >= 0 square-free after normalization (square factors of the radicand are
// folded into q; perfect-square radicands collapse to rationals, flagged by
// q == 0).  Signs, comparisons and floors are decided exactly by comparing
// p^2 against q^2*d, so floor-of-geometric generators are bit-exact rather
// than rounded through floating point.  A tiny expression parser accepts the
// CLI surface syntax for the parameters c and b: integers, decimals,
// rationals, sqrt(rational), parentheses and + - * /.
#pragma once

#include <gmpxx.h>

#include <string>

#include "sparsity/util.hpp"

namespace sparsity {

class QuadExpr {
 public:
  QuadExpr() : p_(0), q_(0), den_(1), d_(0) {}
  explicit QuadExpr(const mpq_class& r);
  QuadExpr(mpz_class p, mpz_class q, mpz_class den, mpz_class d);

  static QuadExpr sqrt_of(const mpq_class& r);
  // Parses an expression such as "(1+sqrt(5))/2", "1/sqrt(5)", "1.5", "2".
  static QuadExpr parse(const std::string& text);

  QuadExpr operator+(const QuadExpr& o) const;
  QuadExpr operator-(const QuadExpr& o) const;
  QuadExpr operator*(const QuadExpr& o) const;
  QuadExpr operator/(const QuadExpr& o) const;
  QuadExpr operator-() const;
  QuadExpr pow_ui(unsigned long e) const;

  int sign() const;                       // exact: -1, 0, +1
  int cmp(const QuadExpr& o) const;       // exact three-way comparison
  mpz_class floor() const;                // exact floor
  bool is_rational() const { return q_ == 0; }
  mpq_class to_mpq() const;               // requires is_rational()

  const mpz_class& num_rational_part() const { return p_; }
  const mpz_class& num_surd_coeff() const { return q_; }
  const mpz_class& denominator() const { return den_; }
  const mpz_class& radicand() const { return d_; }

  std::string str() const;
  double approx_double() const;

 private:
  void normalize();
  static void align(const QuadExpr& a, const QuadExpr& b, mpz_class* d);

  mpz_class p_, q_, den_, d_;  // (p + q*sqrt(d)) / den, den > 0
};

}  // namespace sparsity
