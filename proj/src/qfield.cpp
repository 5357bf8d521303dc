#include "sparsity/qfield.hpp"

#include <cctype>
#include <utility>

namespace sparsity {
namespace {

// Splits n = s^2 * rest with rest square-free up to trial division by primes
// below 1000, plus a final perfect-square check.  Parameters in practice are
// tiny (5, 2, 3, ...), so this is exact for every input we accept.
void extract_square_part(mpz_class n, mpz_class* square_root, mpz_class* rest) {
  mpz_class s = 1;
  for (unsigned long f = 2; f < 1000; ++f) {
    const mpz_class f2 = mpz_class(f) * f;
    while (mpz_divisible_p(n.get_mpz_t(), f2.get_mpz_t())) {
      n /= f2;
      s *= f;
    }
  }
  if (mpz_perfect_square_p(n.get_mpz_t())) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    s *= r;
    n = 1;
  }
  *square_root = s;
  *rest = n;
}

}  // namespace

QuadExpr::QuadExpr(const mpq_class& r) : p_(r.get_num()), q_(0), den_(r.get_den()), d_(0) { normalize(); }

QuadExpr::QuadExpr(mpz_class p, mpz_class q, mpz_class den, mpz_class d)
    : p_(std::move(p)), q_(std::move(q)), den_(std::move(den)), d_(std::move(d)) {
  if (den_ == 0) throw Error("quadratic expression: zero denominator");
  normalize();
}

void QuadExpr::normalize() {
  if (den_ < 0) {
    den_ = -den_;
    p_ = -p_;
    q_ = -q_;
  }
  if (d_ < 0) throw Error("quadratic expression: negative radicand");
  if (q_ != 0 && d_ > 1) {
    mpz_class s, rest;
    extract_square_part(d_, &s, &rest);
    if (rest == 1) {  // perfect square: collapse to rational
      p_ += q_ * s;
      q_ = 0;
      d_ = 0;
    } else if (s > 1) {
      q_ *= s;
      d_ = rest;
    }
  }
  if (q_ == 0 || d_ == 0 || d_ == 1) {
    if (q_ != 0 && (d_ == 1)) p_ += q_;
    q_ = 0;
    d_ = 0;
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), p_.get_mpz_t(), q_.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), den_.get_mpz_t());
  if (g > 1) {
    p_ /= g;
    q_ /= g;
    den_ /= g;
  }
}

void QuadExpr::align(const QuadExpr& a, const QuadExpr& b, mpz_class* d) {
  if (a.q_ == 0) {
    *d = b.d_;
  } else if (b.q_ == 0) {
    *d = a.d_;
  } else if (a.d_ == b.d_) {
    *d = a.d_;
  } else {
    throw Error("quadratic expression: mixing sqrt(" + a.d_.get_str() + ") and sqrt(" + b.d_.get_str() +
                ") is unsupported");
  }
}

QuadExpr QuadExpr::sqrt_of(const mpq_class& r) {
  if (r < 0) throw Error("sqrt of negative rational");
  // sqrt(n/m) = sqrt(n*m)/m
  return QuadExpr(0, 1, r.get_den(), r.get_num() * r.get_den());
}

QuadExpr QuadExpr::operator+(const QuadExpr& o) const {
  mpz_class d;
  align(*this, o, &d);
  return QuadExpr(p_ * o.den_ + o.p_ * den_, q_ * o.den_ + o.q_ * den_, den_ * o.den_, d);
}

QuadExpr QuadExpr::operator-(const QuadExpr& o) const { return *this + (-o); }

QuadExpr QuadExpr::operator-() const { return QuadExpr(-p_, -q_, den_, d_); }

QuadExpr QuadExpr::operator*(const QuadExpr& o) const {
  mpz_class d;
  align(*this, o, &d);
  return QuadExpr(p_ * o.p_ + q_ * o.q_ * d, p_ * o.q_ + q_ * o.p_, den_ * o.den_, d);
}

QuadExpr QuadExpr::operator/(const QuadExpr& o) const {
  if (o.sign() == 0) throw Error("quadratic expression: division by zero");
  // 1/((p+q*sqrt(d))/den) = den*(p - q*sqrt(d)) / (p^2 - q^2 d)
  const mpz_class norm = o.p_ * o.p_ - o.q_ * o.q_ * o.d_;
  QuadExpr inv(o.den_ * o.p_, -o.den_ * o.q_, norm, o.d_);
  return *this * inv;
}

QuadExpr QuadExpr::pow_ui(unsigned long e) const {
  QuadExpr acc(mpq_class(1));
  QuadExpr base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

int QuadExpr::sign() const {
  // den_ > 0, so the sign is the sign of p + q*sqrt(d).
  if (q_ == 0) return sgn(p_);
  if (p_ == 0) return sgn(q_);
  const int sp = sgn(p_), sq = sgn(q_);
  if (sp == sq) return sp;
  // Opposite signs: compare p^2 against q^2*d.
  const mpz_class lhs = p_ * p_, rhs = q_ * q_ * d_;
  const int c = ::cmp(lhs, rhs);
  if (c == 0) return 0;  // only possible when d is a perfect square (folded away)
  return c > 0 ? sp : sq;
}

int QuadExpr::cmp(const QuadExpr& o) const { return (*this - o).sign(); }

mpz_class QuadExpr::floor() const {
  if (q_ == 0) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), p_.get_mpz_t(), den_.get_mpz_t());
    return f;
  }
  // Start from a floating approximation, then correct exactly.
  mpz_class k(approx_double() < 0 ? static_cast<long>(approx_double()) - 2 : static_cast<long>(approx_double()));
  // v - k >= 0 must hold; walk k down first, then up, each step verified exactly.
  auto ge_k = [&](const mpz_class& kk) { return cmp(QuadExpr(mpq_class(kk))) >= 0; };
  while (!ge_k(k)) --k;
  while (ge_k(k + 1)) ++k;
  return k;
}

mpq_class QuadExpr::to_mpq() const {
  if (q_ != 0) throw Error("quadratic expression is irrational: " + str());
  mpq_class r(p_);
  r /= mpq_class(den_);
  return r;
}

double QuadExpr::approx_double() const {
  mpf_class acc(p_, 128);
  if (q_ != 0) {
    mpf_class root(d_, 128);
    mpf_sqrt(root.get_mpf_t(), root.get_mpf_t());
    acc += mpf_class(q_, 128) * root;
  }
  acc /= mpf_class(den_, 128);
  return acc.get_d();
}

std::string QuadExpr::str() const {
  if (q_ == 0) {
    mpq_class r(p_);
    r /= mpq_class(den_);
    return q_to_string(r);
  }
  std::string s = "(" + p_.get_str();
  s += q_ >= 0 ? "+" : "-";
  s += mpz_class(abs(q_)).get_str() + "*sqrt(" + d_.get_str() + "))";
  if (den_ != 1) s += "/" + den_.get_str();
  return s;
}

namespace {

// Recursive-descent parser for the c/b parameter grammar.
class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  QuadExpr parse() {
    QuadExpr v = expr();
    skip_ws();
    if (pos_ != s_.size()) throw UsageError("unexpected trailing text in expression: '" + s_.substr(pos_) + "'");
    return v;
  }

 private:
  QuadExpr expr() {
    QuadExpr v = term();
    for (;;) {
      skip_ws();
      if (peek() == '+') {
        ++pos_;
        v = v + term();
      } else if (peek() == '-') {
        ++pos_;
        v = v - term();
      } else {
        return v;
      }
    }
  }

  QuadExpr term() {
    QuadExpr v = factor();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        v = v * factor();
      } else if (peek() == '/') {
        ++pos_;
        v = v / factor();
      } else {
        return v;
      }
    }
  }

  QuadExpr factor() {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      return -factor();
    }
    return primary();
  }

  QuadExpr primary() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      QuadExpr v = expr();
      expect(')');
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (s_.compare(pos_, 4, "sqrt") == 0) {
      pos_ += 4;
      expect('(');
      QuadExpr arg = expr();
      expect(')');
      if (!arg.is_rational()) throw UsageError("nested surds are unsupported");
      return QuadExpr::sqrt_of(arg.to_mpq());
    }
    throw UsageError("cannot parse expression at: '" + s_.substr(pos_) + "'");
  }

  QuadExpr number() {
    const size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    mpz_class intpart(pos_ > start ? s_.substr(start, pos_ - start) : "0");
    mpq_class value(intpart);
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      const size_t fstart = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == fstart) throw UsageError("malformed decimal literal");
      const std::string frac = s_.substr(fstart, pos_ - fstart);
      mpz_class num(frac);
      mpz_class den = 1;
      for (size_t i = 0; i < frac.size(); ++i) den *= 10;
      value += mpq_class(num, den);
      value.canonicalize();
    }
    return QuadExpr(value);
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) throw UsageError(std::string("expected '") + c + "' in expression");
    ++pos_;
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

QuadExpr QuadExpr::parse(const std::string& text) { return ExprParser(text).parse(); }

}  // namespace sparsity
