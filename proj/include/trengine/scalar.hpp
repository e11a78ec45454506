// Scalar: exact polynomial in one formal constant Lambda with Gaussian
// rational coefficients. The zero scalar has an empty coefficient list;
// leading zero coefficients are always trimmed.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "trengine/rational.hpp"
#include "trengine/real.hpp"

namespace trengine {

class Scalar {
 public:
  Scalar() = default;
  explicit Scalar(const GRat& c) {
    if (!c.is_zero()) c_.push_back(c);
  }
  explicit Scalar(const Rat& r) : Scalar(GRat(r)) {}

  static Scalar zero() { return Scalar(); }
  static Scalar one() { return Scalar(GRat(Rat(1))); }
  static Scalar of_long(long n) { return Scalar(GRat(rat_of(n))); }
  static Scalar of_rat(long num, long den) { return Scalar(GRat(rat_of(num, den))); }
  static Scalar imaginary_unit() { return Scalar(GRat(Rat(0), Rat(1))); }
  // c * Lambda^k
  static Scalar lambda_term(const GRat& c, int k) {
    Scalar s;
    if (c.is_zero()) return s;
    s.c_.assign(k + 1, GRat());
    s.c_[k] = c;
    return s;
  }

  bool is_zero() const { return c_.empty(); }
  // degree-0 (pure Gaussian rational) scalars are the ring units
  bool is_constant() const { return c_.size() <= 1; }
  bool is_real_rational() const { return c_.empty() || (c_.size() == 1 && c_[0].is_real()); }
  int lambda_degree() const { return (int)c_.size() - 1; }

  const GRat& constant_term() const {
    static const GRat z{};
    return c_.empty() ? z : c_[0];
  }
  const GRat& coeff(int k) const {
    static const GRat z{};
    return (k < 0 || k >= (int)c_.size()) ? z : c_[k];
  }
  // As exact rational; throws if the scalar carries Lambda or i.
  Rat as_rational() const {
    if (is_zero()) return Rat(0);
    if (!is_real_rational()) throw std::domain_error("Scalar: not a plain rational");
    return c_[0].re;
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    Scalar r;
    r.c_.resize(std::max(a.c_.size(), b.c_.size()));
    for (size_t k = 0; k < r.c_.size(); ++k) {
      if (k < a.c_.size()) r.c_[k] += a.c_[k];
      if (k < b.c_.size()) r.c_[k] += b.c_[k];
    }
    r.trim();
    return r;
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }
  Scalar operator-() const {
    Scalar r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar r;
    if (a.is_zero() || b.is_zero()) return r;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, GRat());
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) {
        if (b.c_[j].is_zero()) continue;
        r.c_[i + j] += a.c_[i] * b.c_[j];
      }
    }
    r.trim();
    return r;
  }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a.c_ == b.c_); }

  // Division: exact when the divisor is a unit (degree 0) or when polynomial
  // division leaves no remainder; rejected otherwise.
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_zero()) throw std::domain_error("Scalar: division by zero");
    if (b.is_constant()) {
      Scalar r = a;
      for (auto& c : r.c_) c /= b.c_[0];
      r.trim();
      return r;
    }
    // long division in Lambda; must be exact
    Scalar rem = a;
    Scalar quot;
    int db = b.lambda_degree();
    if (!a.is_zero() && a.lambda_degree() >= db) {
      quot.c_.assign(a.lambda_degree() - db + 1, GRat());
      while (!rem.is_zero() && rem.lambda_degree() >= db) {
        int k = rem.lambda_degree() - db;
        GRat q = rem.c_.back() / b.c_.back();
        quot.c_[k] = q;
        Scalar sub = Scalar::lambda_term(q, k) * b;
        rem = rem - sub;
      }
      quot.trim();
    }
    if (!rem.is_zero())
      throw std::domain_error("Scalar: inexact division by Lambda-polynomial");
    return quot;
  }

  Scalar pow(unsigned e) const {
    Scalar r = Scalar::one(), base = *this;
    while (e) {
      if (e & 1u) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }

  CReal eval(const Real& lambda) const {
    CReal out{Real(0L), Real(0L)};
    Real lp(1L);
    for (size_t k = 0; k < c_.size(); ++k) {
      if (!c_[k].is_zero()) {
        out.re += Real(c_[k].re) * lp;
        out.im += Real(c_[k].im) * lp;
      }
      lp *= lambda;
    }
    return out;
  }
  Real eval_abs(const Real& lambda) const { return eval(lambda).abs(); }
  // Real part of the default-Lambda evaluation (for positivity and reports).
  Real eval_re_default() const { return eval(lambda_default()).re; }

  // Compact one-token form for CSV cells: "1/24", "2/3L+1", "(1/2+1/3i)L^2".
  std::string str() const {
    if (is_zero()) return "0";
    std::string out;
    for (int k = lambda_degree(); k >= 0; --k) {
      if (c_[k].is_zero()) continue;
      std::string cs = c_[k].str();
      if (!c_[k].is_real() && k > 0) cs = "(" + cs + ")";
      if (!out.empty() && cs[0] != '-' && cs[0] != '(') out += "+";
      if (!out.empty() && cs[0] == '(') out += "+";
      out += cs;
      if (k == 1)
        out += "L";
      else if (k > 1)
        out += "L^" + std::to_string(k);
    }
    return out;
  }

  // JSON: plain rationals (and Gaussian rationals) as strings, anything with
  // a Lambda power as {"lambda_poly": [c0, c1, ...]}. Bit-exact round trip.
  nlohmann::json to_json() const {
    if (is_constant()) return constant_term().str();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : c_) arr.push_back(c.str());
    return nlohmann::json{{"lambda_poly", arr}};
  }
  static Scalar from_json(const nlohmann::json& j) {
    Scalar s;
    if (j.is_string()) {
      GRat g = parse_grat(j.get<std::string>());
      if (!g.is_zero()) s.c_.push_back(g);
      return s;
    }
    if (j.is_number_integer()) {
      return Scalar::of_long(j.get<long>());
    }
    if (j.is_object() && j.contains("lambda_poly")) {
      for (const auto& e : j.at("lambda_poly"))
        s.c_.push_back(parse_grat(e.get<std::string>()));
      s.trim();
      return s;
    }
    throw std::invalid_argument("Scalar::from_json: unrecognized encoding");
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<GRat> c_;  // c_[k] multiplies Lambda^k
};

inline Scalar operator*(const Rat& r, const Scalar& s) { return Scalar(r) * s; }

}  // namespace trengine
