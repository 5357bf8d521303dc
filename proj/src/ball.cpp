#include "sparsity/ball.hpp"

#include <sstream>

namespace sparsity {

Ball::Ball(mpfr_prec_t prec) : prec_(prec) {
  mpfr_init2(m_, prec);
  mpfr_init2(r_, kRadPrec);
  mpfr_set_zero(m_, 1);
  mpfr_set_zero(r_, 1);
}

Ball::Ball(const Ball& o) : prec_(o.prec_) {
  mpfr_init2(m_, prec_);
  mpfr_init2(r_, kRadPrec);
  mpfr_set(m_, o.m_, MPFR_RNDN);
  mpfr_set(r_, o.r_, MPFR_RNDU);
}

Ball::Ball(Ball&& o) noexcept : prec_(o.prec_) {
  mpfr_init2(m_, prec_);
  mpfr_init2(r_, kRadPrec);
  mpfr_swap(m_, o.m_);
  mpfr_swap(r_, o.r_);
}

Ball& Ball::operator=(const Ball& o) {
  if (this != &o) {
    mpfr_set_prec(m_, o.prec_);
    mpfr_set(m_, o.m_, MPFR_RNDN);
    mpfr_set(r_, o.r_, MPFR_RNDU);
    prec_ = o.prec_;
  }
  return *this;
}

Ball& Ball::operator=(Ball&& o) noexcept {
  if (this != &o) {
    mpfr_swap(m_, o.m_);
    mpfr_swap(r_, o.r_);
    std::swap(prec_, o.prec_);
  }
  return *this;
}

Ball::~Ball() {
  mpfr_clear(m_);
  mpfr_clear(r_);
}

void Ball::bump_ulp() {
  if (mpfr_zero_p(m_)) return;  // round-to-nearest hit an exact value
  mpfr_t ulp;
  mpfr_init2(ulp, kRadPrec);
  mpfr_set_ui_2exp(ulp, 1, mpfr_get_exp(m_) - prec_, MPFR_RNDU);
  mpfr_add(r_, r_, ulp, MPFR_RNDU);
  mpfr_clear(ulp);
}

Ball Ball::exact_z(const mpz_class& z, mpfr_prec_t prec) {
  Ball b(prec);
  mpfr_set_z(b.m_, z.get_mpz_t(), MPFR_RNDN);
  b.bump_ulp();
  return b;
}

Ball Ball::exact_q(const mpq_class& q, mpfr_prec_t prec) {
  Ball b(prec);
  mpfr_set_q(b.m_, q.get_mpq_t(), MPFR_RNDN);
  b.bump_ulp();
  return b;
}

Ball Ball::from_double(double mid, double rad, mpfr_prec_t prec) {
  Ball b(prec);
  mpfr_set_d(b.m_, mid, MPFR_RNDN);
  mpfr_set_d(b.r_, rad, MPFR_RNDU);
  b.bump_ulp();
  return b;
}

Ball Ball::from_mpfr(mpfr_srcptr mid, mpfr_prec_t prec) {
  Ball b(prec);
  mpfr_set(b.m_, mid, MPFR_RNDN);
  b.bump_ulp();
  return b;
}

Ball Ball::enclose_q(const mpq_class& lo, const mpq_class& hi, mpfr_prec_t prec) {
  if (lo > hi) throw Error("Ball::enclose_q: empty interval");
  Ball b(prec);
  const mpq_class mid = (lo + hi) / 2;
  const mpq_class rad = (hi - lo) / 2;
  mpfr_set_q(b.m_, mid.get_mpq_t(), MPFR_RNDN);
  mpfr_set_q(b.r_, rad.get_mpq_t(), MPFR_RNDU);
  b.bump_ulp();
  return b;
}

Ball Ball::from_mpfr_rad_q(mpfr_srcptr mid, const mpq_class& rad, mpfr_prec_t prec) {
  if (rad < 0) throw Error("Ball::from_mpfr_rad_q: negative radius");
  Ball b(prec);
  mpfr_set(b.m_, mid, MPFR_RNDN);
  mpfr_set_q(b.r_, rad.get_mpq_t(), MPFR_RNDU);
  b.bump_ulp();
  return b;
}

Ball Ball::from_quad(const QuadExpr& v, mpfr_prec_t prec) {
  Ball p = exact_z(v.num_rational_part(), prec);
  Ball result = p;
  if (v.num_surd_coeff() != 0) {
    Ball q = exact_z(v.num_surd_coeff(), prec);
    Ball d = exact_z(v.radicand(), prec);
    result = p + q * d.sqrt_val();
  }
  return result / exact_z(v.denominator(), prec);
}

Ball Ball::operator+(const Ball& o) const {
  Ball out(std::max(prec_, o.prec_));
  mpfr_add(out.m_, m_, o.m_, MPFR_RNDN);
  mpfr_add(out.r_, r_, o.r_, MPFR_RNDU);
  out.bump_ulp();
  return out;
}

Ball Ball::operator-(const Ball& o) const {
  Ball out(std::max(prec_, o.prec_));
  mpfr_sub(out.m_, m_, o.m_, MPFR_RNDN);
  mpfr_add(out.r_, r_, o.r_, MPFR_RNDU);
  out.bump_ulp();
  return out;
}

Ball Ball::operator*(const Ball& o) const {
  Ball out(std::max(prec_, o.prec_));
  mpfr_mul(out.m_, m_, o.m_, MPFR_RNDN);
  // rad = |a|rb + |b|ra + ra*rb
  mpfr_t t, u;
  mpfr_init2(t, kRadPrec);
  mpfr_init2(u, kRadPrec);
  mpfr_abs(t, m_, MPFR_RNDU);
  mpfr_mul(t, t, o.r_, MPFR_RNDU);
  mpfr_abs(u, o.m_, MPFR_RNDU);
  mpfr_mul(u, u, r_, MPFR_RNDU);
  mpfr_add(t, t, u, MPFR_RNDU);
  mpfr_mul(u, r_, o.r_, MPFR_RNDU);
  mpfr_add(out.r_, t, u, MPFR_RNDU);
  mpfr_clear(t);
  mpfr_clear(u);
  out.bump_ulp();
  return out;
}

Ball Ball::operator/(const Ball& o) const {
  // Need a certified positive lower bound on |denominator|.
  mpfr_t lo;
  mpfr_init2(lo, kRadPrec);
  mpfr_abs(lo, o.m_, MPFR_RNDD);
  mpfr_sub(lo, lo, o.r_, MPFR_RNDD);
  if (!(mpfr_sgn(lo) > 0)) {
    mpfr_clear(lo);
    throw Error("ball division: divisor interval contains zero");
  }
  Ball out(std::max(prec_, o.prec_));
  mpfr_div(out.m_, m_, o.m_, MPFR_RNDN);
  // rad = (ra + (|mid|+ulp)*rb) / lo
  mpfr_t t, u;
  mpfr_init2(t, kRadPrec);
  mpfr_init2(u, kRadPrec);
  mpfr_abs(t, out.m_, MPFR_RNDU);
  if (!mpfr_zero_p(out.m_)) {
    mpfr_set_ui_2exp(u, 1, mpfr_get_exp(out.m_) - out.prec_, MPFR_RNDU);
    mpfr_add(t, t, u, MPFR_RNDU);
  }
  mpfr_mul(t, t, o.r_, MPFR_RNDU);
  mpfr_add(t, t, r_, MPFR_RNDU);
  mpfr_div(out.r_, t, lo, MPFR_RNDU);
  mpfr_clear(t);
  mpfr_clear(u);
  mpfr_clear(lo);
  out.bump_ulp();
  return out;
}

Ball Ball::operator-() const {
  Ball out(prec_);
  mpfr_neg(out.m_, m_, MPFR_RNDN);
  mpfr_set(out.r_, r_, MPFR_RNDU);
  return out;
}

Ball Ball::abs_val() const {
  Ball out(prec_);
  mpfr_abs(out.m_, m_, MPFR_RNDN);
  mpfr_set(out.r_, r_, MPFR_RNDU);
  return out;
}

Ball Ball::sqrt_val() const {
  mpfr_t hi, lo;
  mpfr_init2(hi, prec_);
  mpfr_init2(lo, prec_);
  mpfr_add(hi, m_, r_, MPFR_RNDU);
  if (mpfr_sgn(hi) < 0) {
    mpfr_clear(hi);
    mpfr_clear(lo);
    throw Error("ball sqrt of negative interval");
  }
  mpfr_sub(lo, m_, r_, MPFR_RNDD);
  if (mpfr_sgn(lo) < 0) mpfr_set_zero(lo, 1);
  mpfr_sqrt(hi, hi, MPFR_RNDU);
  mpfr_sqrt(lo, lo, MPFR_RNDD);
  Ball out(prec_);
  mpfr_add(out.m_, lo, hi, MPFR_RNDN);
  mpfr_div_2ui(out.m_, out.m_, 1, MPFR_RNDN);
  mpfr_t half;
  mpfr_init2(half, kRadPrec);
  mpfr_sub(half, hi, lo, MPFR_RNDU);
  mpfr_div_2ui(half, half, 1, MPFR_RNDU);
  mpfr_set(out.r_, half, MPFR_RNDU);
  mpfr_clear(half);
  mpfr_clear(hi);
  mpfr_clear(lo);
  out.bump_ulp();
  return out;
}

Ball Ball::pow_ui(unsigned long e) const {
  Ball acc = exact_z(1, prec_);
  Ball base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

bool Ball::contains_zero() const { return certain_sign() == 0; }

int Ball::certain_sign() const {
  mpfr_t t;
  mpfr_init2(t, kRadPrec);
  mpfr_abs(t, m_, MPFR_RNDD);
  const bool exceeds = mpfr_cmp(t, r_) > 0;
  mpfr_clear(t);
  if (!exceeds) return 0;
  return mpfr_sgn(m_) > 0 ? 1 : -1;
}

namespace {
mpq_class mpfr_to_q(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return mpq_class(0);
  mpz_class mant;
  const mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), x);
  mpq_class q(mant);
  if (e >= 0) {
    mpz_class shift;
    mpz_ui_pow_ui(shift.get_mpz_t(), 2, static_cast<unsigned long>(e));
    q *= mpq_class(shift);
  } else {
    mpz_class shift;
    mpz_ui_pow_ui(shift.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    q /= mpq_class(shift);
  }
  q.canonicalize();
  return q;
}
}  // namespace

mpq_class Ball::upper_q() const {
  mpfr_t t;
  mpfr_init2(t, prec_ + kRadPrec);
  mpfr_add(t, m_, r_, MPFR_RNDU);
  mpq_class q = mpfr_to_q(t);
  mpfr_clear(t);
  return q;
}

mpq_class Ball::lower_q() const {
  mpfr_t t;
  mpfr_init2(t, prec_ + kRadPrec);
  mpfr_sub(t, m_, r_, MPFR_RNDD);
  mpq_class q = mpfr_to_q(t);
  mpfr_clear(t);
  return q;
}

double Ball::mid_d() const { return mpfr_get_d(m_, MPFR_RNDN); }
double Ball::rad_d() const { return mpfr_get_d(r_, MPFR_RNDU); }

bool Ball::certainly_lt(const Ball& o) const {
  mpfr_t a, b;
  mpfr_init2(a, kRadPrec + prec_);
  mpfr_init2(b, kRadPrec + o.prec_);
  mpfr_add(a, m_, r_, MPFR_RNDU);
  mpfr_sub(b, o.m_, o.r_, MPFR_RNDD);
  const bool lt = mpfr_cmp(a, b) < 0;
  mpfr_clear(a);
  mpfr_clear(b);
  return lt;
}

bool Ball::certainly_le_q(const mpq_class& c) const { return upper_q() <= c; }
bool Ball::certainly_ge_q(const mpq_class& c) const { return lower_q() >= c; }

std::string Ball::str() const {
  std::ostringstream os;
  os.precision(17);
  os << mid_d() << " +/- " << rad_d();
  return os.str();
}

mpq_class CBall::abs_upper_q() const {
  Ball s = abs_sq();
  return s.sqrt_val().upper_q();
}

mpq_class CBall::abs_lower_q() const {
  Ball s = abs_sq();
  mpq_class lo = s.lower_q();
  if (lo <= 0) return mpq_class(0);
  return s.sqrt_val().lower_q() > 0 ? s.sqrt_val().lower_q() : mpq_class(0);
}

}  // namespace sparsity
