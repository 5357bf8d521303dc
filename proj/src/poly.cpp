#include "sparsity/poly.hpp"

#include <algorithm>
#include <sstream>

namespace sparsity {

ZPoly ZPoly::operator+(const ZPoly& o) const {
  std::vector<mpz_class> out(std::max(c.size(), o.c.size()), mpz_class(0));
  for (size_t i = 0; i < c.size(); ++i) out[i] += c[i];
  for (size_t i = 0; i < o.c.size(); ++i) out[i] += o.c[i];
  return ZPoly(std::move(out));
}

ZPoly ZPoly::operator-(const ZPoly& o) const {
  std::vector<mpz_class> out(std::max(c.size(), o.c.size()), mpz_class(0));
  for (size_t i = 0; i < c.size(); ++i) out[i] += c[i];
  for (size_t i = 0; i < o.c.size(); ++i) out[i] -= o.c[i];
  return ZPoly(std::move(out));
}

ZPoly ZPoly::operator*(const ZPoly& o) const {
  if (is_zero() || o.is_zero()) return ZPoly();
  std::vector<mpz_class> out(c.size() + o.c.size() - 1, mpz_class(0));
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < o.c.size(); ++j) out[i + j] += c[i] * o.c[j];
  return ZPoly(std::move(out));
}

ZPoly ZPoly::scaled(const mpz_class& k) const {
  std::vector<mpz_class> out = c;
  for (auto& x : out) x *= k;
  return ZPoly(std::move(out));
}

ZPoly ZPoly::derivative() const {
  if (c.size() <= 1) return ZPoly();
  std::vector<mpz_class> out(c.size() - 1);
  for (size_t i = 1; i < c.size(); ++i) out[i - 1] = c[i] * static_cast<unsigned long>(i);
  return ZPoly(std::move(out));
}

ZPoly ZPoly::reversed() const {
  std::vector<mpz_class> out(c.rbegin(), c.rend());
  return ZPoly(std::move(out));
}

bool ZPoly::self_reciprocal() const {
  if (is_zero()) return false;
  for (size_t i = 0; i < c.size(); ++i)
    if (c[i] != c[c.size() - 1 - i]) return false;
  return true;
}

mpz_class ZPoly::content() const {
  mpz_class g = 0;
  for (const auto& x : c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

ZPoly ZPoly::primitive_part() const {
  if (is_zero()) return *this;
  mpz_class g = content();
  if (lead() < 0) g = -g;
  std::vector<mpz_class> out = c;
  for (auto& x : out) x /= g;
  return ZPoly(std::move(out));
}

mpz_class ZPoly::eval_z(const mpz_class& x) const {
  mpz_class acc = 0;
  for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

mpq_class ZPoly::eval_q(const mpq_class& x) const {
  mpq_class acc = 0;
  for (size_t i = c.size(); i-- > 0;) acc = acc * x + mpq_class(c[i]);
  return acc;
}

Ball ZPoly::eval_ball(const Ball& x) const {
  Ball acc(x.prec());
  for (size_t i = c.size(); i-- > 0;) acc = acc * x + Ball::exact_z(c[i], x.prec());
  return acc;
}

CBall ZPoly::eval_cball(const CBall& x) const {
  const mpfr_prec_t p = x.re.prec();
  CBall acc(p);
  for (size_t i = c.size(); i-- > 0;) {
    acc = acc * x;
    acc.re = acc.re + Ball::exact_z(c[i], p);
  }
  return acc;
}

ZPoly ZPoly::rem_monic(const ZPoly& f) const {
  if (!f.is_monic()) throw Error("rem_monic: divisor must be monic");
  std::vector<mpz_class> r = c;
  const int df = f.degree();
  while (static_cast<int>(r.size()) - 1 >= df) {
    const mpz_class q = r.back();
    const size_t shift = r.size() - 1 - static_cast<size_t>(df);
    if (q != 0)
      for (int i = 0; i <= df; ++i) r[shift + static_cast<size_t>(i)] -= q * f.c[static_cast<size_t>(i)];
    r.pop_back();
    while (!r.empty() && r.back() == 0 && static_cast<int>(r.size()) - 1 >= df) r.pop_back();
  }
  return ZPoly(std::move(r));
}

mpq_class ZPoly::cauchy_root_bound() const {
  if (is_zero()) return mpq_class(0);
  mpz_class mx = 0;
  for (size_t i = 0; i + 1 < c.size(); ++i) mx = std::max(mx, mpz_class(abs(c[i])));
  mpq_class b(mx);
  b /= mpq_class(abs(lead()));
  return b + 1;
}

std::string ZPoly::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = c.size(); i-- > 0;) {
    if (c[i] == 0) continue;
    if (!first) os << (c[i] > 0 ? " + " : " - ");
    else if (c[i] < 0) os << "-";
    first = false;
    const mpz_class a = abs(c[i]);
    if (a != 1 || i == 0) os << a.get_str();
    if (i >= 1) {
      os << "x";
      if (i >= 2) os << "^" << i;
    }
  }
  return os.str();
}

ZPoly poly_gcd(const ZPoly& a, const ZPoly& b) {
  // Rational Euclid on primitive parts; degrees here are tiny (<= ~12).
  auto to_q = [](const ZPoly& p) {
    std::vector<mpq_class> v(p.c.size());
    for (size_t i = 0; i < p.c.size(); ++i) v[i] = mpq_class(p.c[i]);
    return v;
  };
  std::vector<mpq_class> x = to_q(a), y = to_q(b);
  auto norm = [](std::vector<mpq_class>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
  };
  norm(x);
  norm(y);
  while (!y.empty()) {
    // x = x mod y
    while (x.size() >= y.size() && !x.empty()) {
      const mpq_class q = x.back() / y.back();
      const size_t shift = x.size() - y.size();
      for (size_t i = 0; i < y.size(); ++i) x[shift + i] -= q * y[i];
      norm(x);
      if (x.size() >= y.size() && !x.empty() && x.back() == 0) norm(x);
      if (x.empty()) break;
      if (x.size() < y.size()) break;
    }
    std::swap(x, y);
  }
  if (x.empty()) return ZPoly();
  // Clear denominators, take primitive part.
  mpz_class den = 1;
  for (const auto& q : x) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
  std::vector<mpz_class> zz(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    mpq_class scaled = x[i] * mpq_class(den);
    zz[i] = scaled.get_num();
  }
  return ZPoly(std::move(zz)).primitive_part();
}

std::vector<mpz_class> integer_roots(const ZPoly& f) {
  std::vector<mpz_class> roots;
  if (f.is_zero()) throw Error("integer_roots of zero polynomial");
  const mpq_class bound = f.cauchy_root_bound();
  if (bound > 1000000) throw Error("integer root scan bound too large: " + q_to_string(bound));
  const long b = static_cast<long>(bound.get_d()) + 1;
  for (long r = -b; r <= b; ++r)
    if (f.eval_z(mpz_class(r)) == 0) roots.emplace_back(r);
  return roots;
}

ZPoly trace_transform(const ZPoly& f) {
  if (!f.self_reciprocal()) throw Error("trace transform requires a self-reciprocal polynomial");
  const int deg = f.degree();
  if (deg <= 0 || deg % 2 != 0) throw Error("trace transform requires even positive degree");
  const int m = deg / 2;
  // p_j(w) = z^j + z^-j as a polynomial in w = z + 1/z.
  std::vector<ZPoly> p(static_cast<size_t>(m) + 1);
  p[0] = ZPoly({mpz_class(2)});
  if (m >= 1) p[1] = ZPoly({mpz_class(0), mpz_class(1)});
  for (int j = 2; j <= m; ++j)
    p[static_cast<size_t>(j)] =
        ZPoly({mpz_class(0), mpz_class(1)}) * p[static_cast<size_t>(j - 1)] - p[static_cast<size_t>(j - 2)];
  ZPoly g({f.coeff(m)});
  for (int j = 1; j <= m; ++j) g = g + p[static_cast<size_t>(j)].scaled(f.coeff(m + j));
  return g;
}

}  // namespace sparsity
