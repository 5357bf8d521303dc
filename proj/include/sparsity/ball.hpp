// Certified real interval arithmetic ("balls": midpoint +/- radius) on top of
// MPFR, plus rectangular complex balls.  Midpoints are computed at a working
// precision with round-to-nearest; radii absorb input radii, propagation
// bounds, and one ulp of the freshly rounded midpoint, all accumulated with
// upward rounding.  Every certified inequality in the artifact (deviation
// bounds, root disk radii, dominance cutoffs) goes through the directed
// bounds exposed here; nothing downstream trusts a bare double.
//
// Precision policy: callers start at 64 bits and double the working precision
// on any failed certification, capping at kPrecCap (then: hard error).
#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

#include "sparsity/qfield.hpp"
#include "sparsity/util.hpp"

namespace sparsity {

inline constexpr mpfr_prec_t kPrecStart = 64;
inline constexpr mpfr_prec_t kPrecCap = 4096;

// Minimal RAII wrapper for a raw mpfr value (used for Newton iteration where
// ball bookkeeping is not wanted; results get re-certified afterwards).
class MpReal {
 public:
  explicit MpReal(mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
  MpReal(const MpReal& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
  MpReal& operator=(const MpReal& o) {
    if (this != &o) { mpfr_set_prec(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    return *this;
  }
  ~MpReal() { mpfr_clear(x_); }
  mpfr_ptr get() { return x_; }
  mpfr_srcptr get() const { return x_; }

 private:
  mpfr_t x_;
};

class Ball {
 public:
  explicit Ball(mpfr_prec_t prec = kPrecStart);
  Ball(const Ball& o);
  Ball(Ball&& o) noexcept;
  Ball& operator=(const Ball& o);
  Ball& operator=(Ball&& o) noexcept;
  ~Ball();

  static Ball exact_z(const mpz_class& z, mpfr_prec_t prec);
  static Ball exact_q(const mpq_class& q, mpfr_prec_t prec);
  static Ball from_double(double mid, double rad, mpfr_prec_t prec);
  static Ball from_quad(const QuadExpr& v, mpfr_prec_t prec);
  static Ball from_mpfr(mpfr_srcptr mid, mpfr_prec_t prec);  // radius = 1 ulp
  // Ball containing the exact interval [lo, hi].
  static Ball enclose_q(const mpq_class& lo, const mpq_class& hi, mpfr_prec_t prec);
  // Midpoint copied from an mpfr value, radius >= rad (plus one ulp).
  static Ball from_mpfr_rad_q(mpfr_srcptr mid, const mpq_class& rad, mpfr_prec_t prec);

  mpfr_prec_t prec() const { return prec_; }

  Ball operator+(const Ball& o) const;
  Ball operator-(const Ball& o) const;
  Ball operator*(const Ball& o) const;
  Ball operator/(const Ball& o) const;  // throws if divisor ball contains 0
  Ball operator-() const;
  Ball abs_val() const;
  Ball sqrt_val() const;  // throws if entirely negative
  Ball pow_ui(unsigned long e) const;

  bool contains_zero() const;
  int certain_sign() const;  // +1 / -1 when certified, 0 when straddling
  // Exact rational outer bounds (lower_q() <= true value <= upper_q()).
  mpq_class upper_q() const;
  mpq_class lower_q() const;
  double mid_d() const;
  double rad_d() const;
  mpfr_srcptr mid() const { return m_; }

  // Certified comparisons (false means "not certified", not "greater").
  bool certainly_lt(const Ball& o) const;
  bool certainly_le_q(const mpq_class& c) const;
  bool certainly_ge_q(const mpq_class& c) const;

  std::string str() const;

 private:
  void bump_ulp();  // adds one ulp of the midpoint to the radius

  mpfr_t m_;
  mpfr_t r_;  // always at kRadPrec, rounded upward
  mpfr_prec_t prec_;

  static constexpr mpfr_prec_t kRadPrec = 64;
};

struct CBall {
  Ball re, im;

  explicit CBall(mpfr_prec_t prec = kPrecStart) : re(prec), im(prec) {}
  CBall(Ball r, Ball i) : re(std::move(r)), im(std::move(i)) {}

  CBall operator+(const CBall& o) const { return {re + o.re, im + o.im}; }
  CBall operator-(const CBall& o) const { return {re - o.re, im - o.im}; }
  CBall operator*(const CBall& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  CBall operator/(const CBall& o) const {
    Ball den = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / den, (im * o.re - re * o.im) / den};
  }
  Ball abs_sq() const { return re * re + im * im; }
  mpq_class abs_upper_q() const;
  mpq_class abs_lower_q() const;  // >= 0
  bool contains(const CBall& pt_enclosure) const = delete;
};

}  // namespace sparsity
