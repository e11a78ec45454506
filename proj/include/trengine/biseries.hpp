// Degree-capped bivariate series over Scalar, used for the regularized
// bidifferential expansions at pairs of ramification points.
#pragma once

#include <stdexcept>
#include <vector>

#include "trengine/series.hpp"

namespace trengine {

class BiSeries {
 public:
  BiSeries() : cap_(0), c_(1) {}
  explicit BiSeries(int cap) : cap_(cap) {
    if (cap < 0) throw std::invalid_argument("BiSeries: negative cap");
    c_.assign((size_t)(cap + 1) * (cap + 1), Scalar());
  }

  int cap() const { return cap_; }
  const Scalar& at(int i, int j) const {
    static const Scalar z{};
    if (i < 0 || j < 0 || i > cap_ || j > cap_) return z;
    return c_[idx(i, j)];
  }
  void set(int i, int j, const Scalar& v) {
    if (i >= 0 && j >= 0 && i <= cap_ && j <= cap_) c_[idx(i, j)] = v;
  }
  void add_to(int i, int j, const Scalar& v) {
    if (i >= 0 && j >= 0 && i <= cap_ && j <= cap_) c_[idx(i, j)] += v;
  }

  bool is_zero() const {
    for (const auto& s : c_)
      if (!s.is_zero()) return false;
    return true;
  }

  static BiSeries outer(const Series& f, const Series& g) {
    if (f.cap() != g.cap()) throw std::invalid_argument("BiSeries::outer: cap mismatch");
    BiSeries r(f.cap());
    for (int i = 0; i <= r.cap_; ++i) {
      if (f[i].is_zero()) continue;
      for (int j = 0; j <= r.cap_; ++j) {
        if (g[j].is_zero()) continue;
        r.c_[r.idx(i, j)] = f[i] * g[j];
      }
    }
    return r;
  }

  friend BiSeries operator+(const BiSeries& a, const BiSeries& b) {
    check(a, b);
    BiSeries r(a.cap_);
    for (size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend BiSeries operator-(const BiSeries& a, const BiSeries& b) {
    check(a, b);
    BiSeries r(a.cap_);
    for (size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }

  friend BiSeries operator*(const BiSeries& a, const BiSeries& b) {
    check(a, b);
    BiSeries r(a.cap_);
    for (int i = 0; i <= a.cap_; ++i)
      for (int j = 0; j <= a.cap_; ++j) {
        const Scalar& av = a.c_[a.idx(i, j)];
        if (av.is_zero()) continue;
        for (int p = 0; i + p <= a.cap_; ++p)
          for (int q = 0; j + q <= a.cap_; ++q) {
            const Scalar& bv = b.c_[b.idx(p, q)];
            if (bv.is_zero()) continue;
            r.c_[r.idx(i + p, j + q)] += av * bv;
          }
      }
    return r;
  }

  friend BiSeries operator*(const Scalar& s, const BiSeries& a) {
    BiSeries r(a.cap_);
    for (size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = s * a.c_[k];
    return r;
  }

  // Inverse by back-substitution on total degree; constant term must be a
  // unit scalar.
  BiSeries reciprocal() const {
    const Scalar& c0 = at(0, 0);
    if (c0.is_zero() || !c0.is_constant())
      throw std::domain_error("BiSeries::reciprocal: constant term is not a unit");
    BiSeries r(cap_);
    Scalar inv0 = Scalar::one() / c0;
    r.set(0, 0, inv0);
    for (int d = 1; d <= 2 * cap_; ++d) {
      for (int i = std::max(0, d - cap_); i <= std::min(d, cap_); ++i) {
        int j = d - i;
        // sum over (p,q) < (i,j) componentwise-or-equal, excluding (i,j)
        Scalar acc;
        for (int p = 0; p <= i; ++p)
          for (int q = 0; q <= j; ++q) {
            if (p == 0 && q == 0) continue;
            const Scalar& av = at(p, q);
            if (av.is_zero()) continue;
            acc += av * r.at(i - p, j - q);
          }
        r.set(i, j, -(inv0 * acc));
      }
    }
    return r;
  }

  // d/du: top row (i = cap) of the result is not determined and left zero.
  BiSeries derivative_u() const {
    BiSeries r(cap_);
    for (int i = 0; i < cap_; ++i)
      for (int j = 0; j <= cap_; ++j) {
        const Scalar& v = at(i + 1, j);
        if (!v.is_zero()) r.set(i, j, Scalar(rat_of(i + 1)) * v);
      }
    return r;
  }
  BiSeries derivative_v() const {
    BiSeries r(cap_);
    for (int i = 0; i <= cap_; ++i)
      for (int j = 0; j < cap_; ++j) {
        const Scalar& v = at(i, j + 1);
        if (!v.is_zero()) r.set(i, j, Scalar(rat_of(j + 1)) * v);
      }
    return r;
  }

  // Exact division by (u - v). Entries of total degree <= cap-1 are exact
  // (with a remainder check); the rest of the rectangle is not determined
  // by capped data and is left as-is. Used for cross-validation only.
  BiSeries divide_by_difference() const {
    BiSeries q(cap_);
    // total-degree d of quotient comes from total-degree d+1 of *this
    for (int d = 0; d < 2 * cap_; ++d) {
      // coefficient of u^i v^{d+1-i}: v[i] = q[i-1] - q[i] (second index implied)
      // solve downward from i = d+1
      Scalar carry;  // q[i] at current i
      // i = d+1: v_{d+1,0} = q_{d,0}
      if (d + 1 <= cap_) {
        carry = at(d + 1, 0);
        if (d <= cap_) q.set(d, 0, carry);
      } else {
        carry = Scalar();
      }
      for (int i = d; i >= 1; --i) {
        int j = d + 1 - i;
        if (i > cap_ || j > cap_) {
          carry = Scalar();
          continue;
        }
        // q[i-1][j] = v[i][j] + q[i][j-1]  (with q[i][j-1] = carry)
        Scalar next = at(i, j) + carry;
        q.set(i - 1, j, next);
        carry = next;
      }
      // remainder: v[0][d+1] + q[0][d] must vanish
      if (d + 1 <= cap_) {
        Scalar rem = at(0, d + 1) + q.at(0, d);
        if (!rem.is_zero())
          throw std::domain_error("BiSeries: inexact division by (u - v)");
      }
    }
    return q;
  }

  bool is_symmetric() const {
    for (int i = 0; i <= cap_; ++i)
      for (int j = i + 1; j <= cap_; ++j)
        if (!(at(i, j) == at(j, i))) return false;
    return true;
  }

 private:
  static void check(const BiSeries& a, const BiSeries& b) {
    if (a.cap_ != b.cap_) throw std::invalid_argument("BiSeries: cap mismatch");
  }
  size_t idx(int i, int j) const { return (size_t)i * (cap_ + 1) + j; }
  int cap_;
  std::vector<Scalar> c_;
};

}  // namespace trengine
