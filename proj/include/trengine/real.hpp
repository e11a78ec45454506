// Thin value-type wrapper around MPFR plus the evaluation context for the
// formal constant Lambda (default pi^2). Precision comes from the
// TRENGINE_LAMBDA_PRECISION environment variable (bits, default 128).
#pragma once

#include <mpfr.h>

#include <cstdlib>
#include <string>
#include <utility>

#include "trengine/rational.hpp"

namespace trengine {

inline int lambda_precision_bits() {
  static int bits = [] {
    const char* env = std::getenv("TRENGINE_LAMBDA_PRECISION");
    long b = env ? std::strtol(env, nullptr, 10) : 128;
    if (b < 80) b = 80;
    if (b > 16384) b = 16384;
    return (int)b;
  }();
  return bits;
}

class Real {
 public:
  Real() { mpfr_init2(v_, lambda_precision_bits()); mpfr_set_zero(v_, 1); }
  Real(double d) : Real() { mpfr_set_d(v_, d, MPFR_RNDN); }
  Real(long n) : Real() { mpfr_set_si(v_, n, MPFR_RNDN); }
  Real(const Rat& q) : Real() { mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }
  Real(const Int& z) : Real() { mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN); }
  Real(const Real& o) : Real() { mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, lambda_precision_bits()); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  static Real pi() {
    Real r;
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static Real exp1() {
    Real one(1L);
    return exp(one);
  }

  friend Real operator+(const Real& a, const Real& b) {
    Real r;
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a, const Real& b) {
    Real r;
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, const Real& b) {
    Real r;
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(const Real& a, const Real& b) {
    Real r;
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  Real operator-() const {
    Real r;
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }
  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

  static Real abs(const Real& a) {
    Real r;
    mpfr_abs(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  static Real sqrt(const Real& a) {
    Real r;
    mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  static Real exp(const Real& a) {
    Real r;
    mpfr_exp(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  static Real log(const Real& a) {
    Real r;
    mpfr_log(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  // a^b for a > 0
  static Real pow(const Real& a, const Real& b) {
    Real r;
    mpfr_pow(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  static Real pow_si(const Real& a, long e) {
    Real r;
    mpfr_pow_si(r.v_, a.v_, e, MPFR_RNDN);
    return r;
  }
  // Gamma(a); continuous extension of the factorial, relative error within
  // the working precision.
  static Real gamma(const Real& a) {
    Real r;
    mpfr_gamma(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  static Real max(const Real& a, const Real& b) { return a < b ? b : a; }
  static Real min(const Real& a, const Real& b) { return a < b ? a : b; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Decimal form with enough digits for bit-stable output files.
  std::string str(int digits = 17) const {
    char* s = nullptr;
    std::string fmt = "%." + std::to_string(digits) + "Rg";
    mpfr_asprintf(&s, fmt.c_str(), v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }

 private:
  mpfr_t v_;
};

// Complex value at evaluation time.
struct CReal {
  Real re, im;
  Real abs() const { return Real::sqrt(re * re + im * im); }
};

// lhs <= rhs up to the interval-style slack used for all numeric
// inequality checks on evaluated Lambda-polynomials.
inline bool leq_with_slack(const Real& lhs, const Real& rhs, double rel = 1e-20) {
  Real slack = (Real::abs(lhs) + Real::abs(rhs) + Real(1e-60)) * Real(rel);
  return lhs <= rhs + slack;
}

// Default numeric value of the formal constant: pi^2.
inline const Real& lambda_default() {
  static Real l = Real::pi() * Real::pi();
  return l;
}

}  // namespace trengine
