// Exact coefficient arithmetic: arbitrary-precision rationals extended by i,
// plus the integer combinatorics (double factorials, binomials, Bernoulli
// numbers) used throughout the recursion formulas.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trengine {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat_of(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Rational parsed from "p/q" or "p"; throws on malformed input.
inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_rat: empty string");
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("parse_rat: bad rational '" + s + "'");
  r.canonicalize();
  return r;
}

// Gaussian rational a + b*i. Most curves only ever populate the real part;
// two-branch curves of x = z + 1/z type put chart data on the imaginary axis.
struct GRat {
  Rat re, im;

  GRat() = default;
  GRat(const Rat& r) : re(r) {}
  GRat(long n) : re(n) {}
  GRat(const Rat& r, const Rat& i) : re(r), im(i) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  GRat conj() const { return GRat(re, Rat(-im)); }
  Rat norm2() const { return re * re + im * im; }

  GRat operator-() const { return GRat(Rat(-re), Rat(-im)); }

  GRat& operator+=(const GRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GRat& operator-=(const GRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }

  friend GRat operator+(GRat a, const GRat& b) { return a += b; }
  friend GRat operator-(GRat a, const GRat& b) { return a -= b; }

  friend GRat operator*(const GRat& a, const GRat& b) {
    if (a.is_real() && b.is_real()) return GRat(Rat(a.re * b.re));
    return GRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  GRat& operator*=(const GRat& o) { return *this = *this * o; }

  friend GRat operator/(const GRat& a, const GRat& b) {
    if (b.is_zero()) throw std::domain_error("GRat: division by zero");
    if (b.is_real()) return GRat(Rat(a.re / b.re), Rat(a.im / b.re));
    Rat n = b.norm2();
    GRat c = a * b.conj();
    return GRat(Rat(c.re / n), Rat(c.im / n));
  }
  GRat& operator/=(const GRat& o) { return *this = *this / o; }

  friend bool operator==(const GRat& a, const GRat& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const GRat& a, const GRat& b) { return !(a == b); }

  // "p/q", "p/q+r/si", "r/si", "-r/si", ...
  std::string str() const {
    if (is_real()) return re.get_str();
    std::string s;
    if (sgn(re) != 0) s = re.get_str();
    std::string ims = im.get_str();
    if (!s.empty() && ims[0] != '-') s += "+";
    return s + ims + "i";
  }
};

inline GRat parse_grat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_grat: empty string");
  if (s.back() != 'i') return GRat(parse_rat(s));
  std::string body = s.substr(0, s.size() - 1);
  // split off a leading real part if a sign separates two terms
  for (size_t pos = body.size(); pos-- > 1;) {
    if (body[pos] == '+' || body[pos] == '-') {
      if (body[pos - 1] == '/' ) continue;
      std::string rep = body.substr(0, pos);
      std::string ims = (body[pos] == '+') ? body.substr(pos + 1) : body.substr(pos);
      return GRat(parse_rat(rep), parse_rat(ims));
    }
  }
  return GRat(Rat(0), parse_rat(body));
}

// ---- integer combinatorics ----------------------------------------------

namespace detail {
inline std::vector<Int>& odd_dfact_cache() {
  static std::vector<Int> c{Int(1)};  // (2*0+1)!! = 1
  return c;
}
inline std::mutex& comb_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// (2k+1)!! for k >= 0, with the extension (-1)!! = 1 at k = -1.
inline Int odd_double_factorial(long k) {
  if (k < 0) {
    if (k == -1) return Int(1);
    throw std::invalid_argument("odd_double_factorial: k < -1");
  }
  std::lock_guard<std::mutex> lock(detail::comb_mutex());
  auto& c = detail::odd_dfact_cache();
  while ((long)c.size() <= k) {
    long m = (long)c.size();
    c.push_back(c.back() * (2 * m + 1));
  }
  return c[k];
}

// (2k-1)!! with (-1)!! = 1.
inline Int odd_double_factorial_down(long k) { return odd_double_factorial(k - 1); }

inline Int factorial(long n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  Int r;
  mpz_fac_ui(r.get_mpz_t(), (unsigned long)n);
  return r;
}

inline Int binomial(long n, long k) {
  if (k < 0 || k > n) return Int(0);
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), (unsigned long)n, (unsigned long)k);
  return r;
}

// Bernoulli numbers B_n (B_1 = -1/2), memoized via
// sum_{j=0}^{m} C(m+1, j) B_j = 0.
inline Rat bernoulli(long n) {
  if (n < 0) throw std::invalid_argument("bernoulli: negative index");
  static std::vector<Rat> cache{Rat(1)};
  std::lock_guard<std::mutex> lock(detail::comb_mutex());
  while ((long)cache.size() <= n) {
    long m = (long)cache.size();
    Rat acc(0);
    for (long j = 0; j < m; ++j) acc += Rat(binomial(m + 1, j)) * cache[j];
    Rat b = -acc / Rat(m + 1);
    b.canonicalize();
    cache.push_back(b);
  }
  return cache[n];
}

inline Rat rat_pow(const Rat& u, long e) {
  Rat r(1);
  Rat base = e >= 0 ? u : Rat(1) / u;
  unsigned long k = (unsigned long)(e >= 0 ? e : -e);
  while (k) {
    if (k & 1ul) r *= base;
    base *= base;
    k >>= 1;
  }
  r.canonicalize();
  return r;
}

// Exact square root of a rational, if it is a perfect square.
inline std::optional<Rat> rat_sqrt(const Rat& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (sgn(q) == 0) return Rat(0);
  Int num = q.get_num(), den = q.get_den();
  if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
  if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
  Int rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  Rat r(rn, rd);
  r.canonicalize();
  return r;
}

// Square root in Q(i) of a real rational: sqrt(q) for q >= 0, i*sqrt(-q)
// for q < 0; empty if the magnitude is not a perfect square.
inline std::optional<GRat> grat_sqrt_of_rat(const Rat& q) {
  if (sgn(q) >= 0) {
    auto r = rat_sqrt(q);
    if (!r) return std::nullopt;
    return GRat(*r);
  }
  auto r = rat_sqrt(Rat(-q));
  if (!r) return std::nullopt;
  return GRat(Rat(0), *r);
}

}  // namespace trengine
