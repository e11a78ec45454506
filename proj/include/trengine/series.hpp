// Degree-capped formal power series over Scalar in one variable. All
// operations are exact modulo variable^(cap+1); caps must match.
#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trengine/scalar.hpp"

namespace trengine {

class Series {
 public:
  Series() : cap_(0), c_(1) {}
  explicit Series(int cap) : cap_(cap), c_(cap + 1) {
    if (cap < 0) throw std::invalid_argument("Series: negative cap");
  }
  static Series zero(int cap) { return Series(cap); }
  static Series one(int cap) {
    Series s(cap);
    s.c_[0] = Scalar::one();
    return s;
  }
  static Series variable(int cap) {
    Series s(cap);
    if (cap >= 1) s.c_[1] = Scalar::one();
    return s;
  }
  static Series build(int cap, const std::function<Scalar(int)>& coeff) {
    Series s(cap);
    for (int k = 0; k <= cap; ++k) s.c_[k] = coeff(k);
    return s;
  }

  int cap() const { return cap_; }
  const Scalar& operator[](int k) const {
    static const Scalar z{};
    return (k < 0 || k > cap_) ? z : c_[k];
  }
  void set(int k, const Scalar& v) {
    if (k >= 0 && k <= cap_) c_[k] = v;
  }
  bool is_zero() const {
    for (const auto& c : c_)
      if (!c.is_zero()) return false;
    return true;
  }
  int valuation() const {  // cap_+1 when zero
    for (int k = 0; k <= cap_; ++k)
      if (!c_[k].is_zero()) return k;
    return cap_ + 1;
  }

  friend bool operator==(const Series& a, const Series& b) {
    return a.cap_ == b.cap_ && a.c_ == b.c_;
  }

  friend Series operator+(const Series& a, const Series& b) {
    check_caps(a, b);
    Series r(a.cap_);
    for (int k = 0; k <= a.cap_; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend Series operator-(const Series& a, const Series& b) {
    check_caps(a, b);
    Series r(a.cap_);
    for (int k = 0; k <= a.cap_; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  Series operator-() const {
    Series r(cap_);
    for (int k = 0; k <= cap_; ++k) r.c_[k] = -c_[k];
    return r;
  }

  // Cauchy product modulo variable^(cap+1).
  friend Series operator*(const Series& a, const Series& b) {
    check_caps(a, b);
    Series r(a.cap_);
    for (int i = 0; i <= a.cap_; ++i) {
      if (a.c_[i].is_zero()) continue;
      for (int j = 0; i + j <= a.cap_; ++j) {
        if (b.c_[j].is_zero()) continue;
        r.c_[i + j] += a.c_[i] * b.c_[j];
      }
    }
    return r;
  }

  friend Series operator*(const Scalar& s, const Series& a) {
    Series r(a.cap_);
    for (int k = 0; k <= a.cap_; ++k) r.c_[k] = s * a.c_[k];
    return r;
  }

  Series shifted(int p) const {  // multiply by variable^p
    Series r(cap_);
    for (int k = 0; k <= cap_; ++k) {
      int d = k + p;
      if (d >= 0 && d <= cap_) r.c_[d] = c_[k];
    }
    return r;
  }

  Series truncated(int new_cap) const {
    Series r(new_cap);
    for (int k = 0; k <= new_cap && k <= cap_; ++k) r.c_[k] = c_[k];
    return r;
  }

  Series derivative() const {
    Series r(cap_);
    for (int k = 1; k <= cap_; ++k) r.c_[k - 1] = Scalar(rat_of(k)) * c_[k];
    return r;
  }
  // antiderivative with zero constant term
  Series integral() const {
    Series r(cap_);
    for (int k = 0; k + 1 <= cap_; ++k) r.c_[k + 1] = c_[k] / Scalar(rat_of(k + 1));
    return r;
  }

  // Multiplicative inverse; the constant term must be a unit of the
  // coefficient ring (a nonzero Lambda-free value).
  Series reciprocal() const {
    const Scalar& c0 = c_[0];
    if (c0.is_zero() || !c0.is_constant())
      throw std::domain_error("Series::reciprocal: constant term is not a unit");
    Series r(cap_);
    Scalar inv0 = Scalar::one() / c0;
    r.c_[0] = inv0;
    for (int k = 1; k <= cap_; ++k) {
      Scalar acc;
      for (int j = 1; j <= k; ++j) {
        if (c_[j].is_zero()) continue;
        acc += c_[j] * r.c_[k - j];
      }
      r.c_[k] = -(inv0 * acc);
    }
    return r;
  }

  // a/b allowing a common zero of order val(b) at the origin.
  friend Series divide(const Series& a, const Series& b) {
    check_caps(a, b);
    int v = b.valuation();
    if (v > b.cap_) throw std::domain_error("Series: division by zero series");
    if (v == 0) return a * b.reciprocal();
    if (a.valuation() < v)
      throw std::domain_error("Series: division would need negative powers");
    return a.shifted(-v) * b.shifted(-v).reciprocal();
  }

  // f(g) for g with zero constant term.
  Series compose(const Series& g) const {
    check_caps(*this, g);
    if (!g.c_[0].is_zero())
      throw std::invalid_argument("Series::compose: inner constant term nonzero");
    Series r(cap_);
    for (int k = cap_; k >= 0; --k) {
      r = r * g;
      r.c_[0] += c_[k];
    }
    return r;
  }

  std::pair<Series, Series> even_odd_split() const {
    Series ev(cap_), od(cap_);
    for (int k = 0; k <= cap_; ++k) ((k % 2 == 0) ? ev : od).c_[k] = c_[k];
    return {ev, od};
  }
  Series odd_part() const { return even_odd_split().second; }
  Series even_part() const { return even_odd_split().first; }

 private:
  static void check_caps(const Series& a, const Series& b) {
    if (a.cap_ != b.cap_) throw std::invalid_argument("Series: cap mismatch");
  }
  int cap_;
  std::vector<Scalar> c_;
};

// Solves x(z) - x(a) = zeta^2 for z - a as a series w(zeta), given the
// expansion x_series of x - x(a) in z - a (no constant or linear term,
// nonzero quadratic term). branch_sign flips the linear coefficient, i.e.
// picks the sheet. Newton iteration on truncated series; the square root of
// the quadratic coefficient must stay inside Q(i).
inline Series solve_local_coordinate(const Series& x_series, int branch_sign = +1) {
  const int cap = x_series.cap();
  if (!x_series[0].is_zero() || !x_series[1].is_zero())
    throw std::invalid_argument("solve_local_coordinate: constant/linear term present");
  const Scalar& q = x_series[2];
  if (q.is_zero())
    throw std::domain_error("solve_local_coordinate: non-simple ramification");
  if (!q.is_constant() || !q.constant_term().is_real())
    throw std::domain_error("solve_local_coordinate: quadratic coefficient outside Q");
  auto root = grat_sqrt_of_rat(Rat(1) / q.constant_term().re);
  if (!root)
    throw std::domain_error("solve_local_coordinate: non-square quadratic coefficient");
  GRat c1 = branch_sign >= 0 ? *root : -*root;

  Series w(cap);
  w.set(1, Scalar(c1));
  Series target = Series::variable(cap) * Series::variable(cap);
  Series xprime = x_series.derivative();
  int correct = 1;
  while (correct <= cap) {
    Series err = x_series.compose(w) - target;
    if (err.is_zero()) break;
    Series upd = divide(err, xprime.compose(w));
    w = w - upd;
    correct *= 2;
  }
  return w;
}

}  // namespace trengine
