// Independent reference models: psi-class intersection numbers through the
// DVV form of the Virasoro constraints (string equation + recursion pivoting
// on the largest exponent, memoized over sorted exponent multisets), the
// closed-form Painleve I amplitudes built on top of them, and the two known
// large-genus asymptotic formulas. This module deliberately shares no code
// with the amplitude engine so the two can check each other.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "trengine/rational.hpp"
#include "trengine/real.hpp"
#include "trengine/scalar.hpp"

namespace trengine {

struct PsiKey {
  long g = 0;
  std::vector<long> d;  // sorted ascending

  static PsiKey make(long g, std::vector<long> d) {
    std::sort(d.begin(), d.end());
    return PsiKey{g, std::move(d)};
  }
  bool operator==(const PsiKey& o) const { return g == o.g && d == o.d; }
};

struct PsiKeyHash {
  size_t operator()(const PsiKey& k) const {
    uint64_t h = 1469598103934665603ull ^ (uint64_t)k.g;
    for (long x : k.d) {
      h ^= (uint64_t)(x + 1);
      h *= 1099511628211ull;
    }
    return (size_t)h;
  }
};

// <tau_{d_1} ... tau_{d_n}>_g, exact. Zero when the dimension constraint
// sum d_i = 3g - 3 + n fails; throws on unstable (g, n).
class PsiOracle {
 public:
  Rat intersection(long g, std::vector<long> d) {
    long n = (long)d.size();
    if (n < 1 || 2 * g - 2 + n <= 0)
      throw std::invalid_argument("psi_intersection: unstable key");
    for (long x : d)
      if (x < 0) throw std::invalid_argument("psi_intersection: negative exponent");
    std::sort(d.begin(), d.end());
    long dim = 3 * g - 3 + n;
    long total = 0;
    for (long x : d) total += x;
    if (total != dim) return Rat(0);
    return eval(PsiKey{g, std::move(d)});
  }

  size_t cache_size() const {
    std::shared_lock lock(mu_);
    return memo_.size();
  }
  void clear() {
    std::unique_lock lock(mu_);
    memo_.clear();
  }

 private:
  // key satisfies the dimension constraint and is stable
  Rat eval(const PsiKey& key) {
    const long g = key.g;
    const long n = (long)key.d.size();
    if (g == 0 && n == 3) return Rat(1);
    if (g == 1 && n == 1) return rat_of(1, 24);
    {
      std::shared_lock lock(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }

    Rat value(0);
    if (key.d.front() == 0) {
      // string equation: remove one tau_0, lower one other exponent
      std::vector<long> rest(key.d.begin() + 1, key.d.end());
      for (size_t j = 0; j < rest.size(); ++j) {
        if (rest[j] == 0) continue;
        std::vector<long> next = rest;
        next[j] -= 1;
        value += intersection(g, std::move(next));
      }
    } else {
      // recursion on the largest exponent P:
      // (2P+1)!! <tau_P rest> = sum_j [(2(P+d_j-1)+1)!!/(2d_j-1)!!] <tau_{P+d_j-1} rest\j>
      //   + 1/2 sum_{a+b=P-2} (2a+1)!!(2b+1)!! [ <tau_a tau_b rest>_{g-1}
      //       + sum' <tau_a I>_{g1} <tau_b J>_{g2} ]
      const long P = key.d.back();
      std::vector<long> rest(key.d.begin(), key.d.end() - 1);
      Rat acc(0);

      for (size_t j = 0; j < rest.size(); ++j) {
        if (j > 0 && rest[j] == rest[j - 1]) {
          // identical legs give identical terms; reuse by multiplicity
          continue;
        }
        long mult = 1;
        for (size_t j2 = j + 1; j2 < rest.size() && rest[j2] == rest[j]; ++j2) ++mult;
        std::vector<long> next = rest;
        next[j] += P - 1;
        Rat coeff(odd_double_factorial(P + rest[j] - 1),
                  odd_double_factorial_down(rest[j]));
        coeff.canonicalize();
        acc += Rat(mult) * coeff * intersection(g, std::move(next));
      }

      for (long a = 0; a <= P - 2; ++a) {
        long b = P - 2 - a;
        Rat cf(odd_double_factorial(a) * odd_double_factorial(b));
        Rat bracket(0);
        if (g >= 1) {
          std::vector<long> next = rest;
          next.push_back(a);
          next.push_back(b);
          bracket += intersection(g - 1, std::move(next));
        }
        bracket += split_sum(g, rest, a, b);
        acc += cf * bracket / Rat(2);
      }

      value = acc / Rat(odd_double_factorial(P));
      value.canonicalize();
    }

    {
      std::unique_lock lock(mu_);
      memo_.emplace(key, value);
    }
    return value;
  }

  // sum over g1+g2 = g and ordered sub-multiset splits I ⊔ J = rest of
  // <tau_a I>_{g1} <tau_b J>_{g2}, skipping unstable factors.
  Rat split_sum(long g, const std::vector<long>& rest, long a, long b) {
    // run-length encode the multiset
    std::vector<std::pair<long, long>> runs;  // (value, multiplicity)
    for (long x : rest) {
      if (!runs.empty() && runs.back().first == x)
        runs.back().second++;
      else
        runs.emplace_back(x, 1);
    }
    const size_t m = runs.size();
    std::vector<long> take(m, 0);
    Rat out(0);
    while (true) {
      long sz1 = 0, sum1 = 0;
      Rat ways(1);
      for (size_t r = 0; r < m; ++r) {
        sz1 += take[r];
        sum1 += take[r] * runs[r].first;
        ways *= Rat(binomial(runs[r].second, take[r]));
      }
      long sz2 = (long)rest.size() - sz1;
      for (long g1 = 0; g1 <= g; ++g1) {
        long g2 = g - g1;
        long n1 = 1 + sz1, n2 = 1 + sz2;
        if (2 * g1 - 2 + n1 <= 0 || 2 * g2 - 2 + n2 <= 0) continue;
        // dimension pre-check on the first factor (the complement follows)
        long sumI = a + sum1;
        if (sumI != 3 * g1 - 3 + n1) continue;
        std::vector<long> I, J;
        I.push_back(a);
        J.push_back(b);
        for (size_t r = 0; r < m; ++r) {
          for (long c = 0; c < take[r]; ++c) I.push_back(runs[r].first);
          for (long c = 0; c < runs[r].second - take[r]; ++c) J.push_back(runs[r].first);
        }
        Rat f1 = intersection(g1, std::move(I));
        if (sgn(f1) == 0) continue;
        Rat f2 = intersection(g2, std::move(J));
        out += ways * f1 * f2;
      }
      // odometer over sub-multisets
      size_t r = 0;
      while (r < m && take[r] == runs[r].second) take[r++] = 0;
      if (r == m) break;
      take[r]++;
    }
    return out;
  }

  mutable std::shared_mutex mu_;
  std::unordered_map<PsiKey, Rat, PsiKeyHash> memo_;
};

inline PsiOracle& psi_oracle() {
  static PsiOracle o;
  return o;
}

inline Rat psi_intersection(long g, std::vector<long> d) {
  return psi_oracle().intersection(g, std::move(d));
}

// ---- Painleve I closed forms ---------------------------------------------

// F_{g;k_1..k_n}(u) = <tau_{k_1}...tau_{k_n} tau_2^{3g-3+n-|k|}>_g
//                     / (6^{2g-2+n} (3g-3+n-|k|)!) * u^{-(5g-5+2n-|k|)},
// zero when |k| > 3g-3+n. The n = 0 case is the free energy.
inline Rat pi_amplitude_rational(long g, const std::vector<long>& k, const Rat& u) {
  if (sgn(u) <= 0) throw std::invalid_argument("pi_amplitude: u must be positive");
  long n = (long)k.size();
  if (2 * g - 2 + n <= 0) throw std::invalid_argument("pi_amplitude: unstable (g,n)");
  long total = 0;
  for (long x : k) total += x;
  long m = 3 * g - 3 + n - total;
  if (m < 0) return Rat(0);
  std::vector<long> full = k;
  for (long i = 0; i < m; ++i) full.push_back(2);
  Rat num = (n + m > 0) ? psi_intersection(g, std::move(full)) : Rat(0);
  if (n + m == 0) return Rat(0);  // only (g,n) = (1,0) style degenerate input; unreachable
  Rat denom = rat_pow(rat_of(6), 2 * g - 2 + n) * Rat(factorial(m));
  Rat val = num / denom * rat_pow(u, -(5 * g - 5 + 2 * n - total));
  val.canonicalize();
  return val;
}

inline Scalar pi_amplitude_closed_form(long g, const std::vector<long>& k, const Rat& u) {
  return Scalar(pi_amplitude_rational(g, k, u));
}

inline Rat pi_free_energy_closed_form(long g, const Rat& u) {
  if (g < 2) throw std::invalid_argument("pi_free_energy: g >= 2 required");
  if (sgn(u) <= 0) throw std::invalid_argument("pi_free_energy: u must be positive");
  std::vector<long> t2(3 * g - 3, 2);
  Rat val = psi_intersection(g, std::move(t2)) /
            (rat_pow(rat_of(6), 2 * g - 2) * Rat(factorial(3 * g - 3)));
  val *= rat_pow(u, -(5 * g - 5));
  val.canonicalize();
  return val;
}

// Numeric variant for irrational comparison parameters u.
inline Real pi_amplitude_numeric(long g, const std::vector<long>& k, const Real& u) {
  long n = (long)k.size();
  if (2 * g - 2 + n <= 0) throw std::invalid_argument("pi_amplitude: unstable (g,n)");
  long total = 0;
  for (long x : k) total += x;
  long m = 3 * g - 3 + n - total;
  if (m < 0) return Real(0L);
  std::vector<long> full = k;
  for (long i = 0; i < m; ++i) full.push_back(2);
  Rat coeff = psi_intersection(g, std::move(full)) /
              (rat_pow(rat_of(6), 2 * g - 2 + n) * Rat(factorial(m)));
  coeff.canonicalize();
  return Real(coeff) * Real::pow_si(u, -(5 * g - 5 + 2 * n - total));
}

// ---- large-genus asymptotics ---------------------------------------------

// F_g ~ (1/sqrt(30g)) (5/(24 sqrt 3))^{2g-2} Gamma(2g-2) / ((2 pi)^{3/2} u^{5g-5})
inline Real kapaev_asymptotic(long g, const Real& u) {
  if (g < 2) throw std::invalid_argument("kapaev_asymptotic: g >= 2 required");
  Real pi = Real::pi();
  Real pref = Real(1L) / Real::sqrt(Real(30L * g));
  Real rate = Real::pow_si(Real(5L) / (Real(24L) * Real::sqrt(Real(3L))), 2 * g - 2);
  Real gam = Real::gamma(Real(2L * g - 2L));
  Real tail = Real::pow(Real(2L) * pi, Real(1.5)) * Real::pow_si(u, 5 * g - 5);
  return pref * rate * gam / tail;
}

// <tau_2^{3g-3}>_g ~ (1/4pi) (3/(10 sqrt 5))^{2g-2} Gamma(5g-5)
inline Real tau2_asymptotic(long g) {
  if (g < 2) throw std::invalid_argument("tau2_asymptotic: g >= 2 required");
  Real rate = Real::pow_si(Real(3L) / (Real(10L) * Real::sqrt(Real(5L))), 2 * g - 2);
  return rate * Real::gamma(Real(5L * g - 5L)) / (Real(4L) * Real::pi());
}

// Exact Aggarwal-route bound on <tau_2^{3g-3}>_g:
// (12g-11)!! / (15^{3g-3} 24^g g!) (3/2)^{3g-4}
inline Rat aggarwal_tau2_bound(long g) {
  if (g < 2) throw std::invalid_argument("aggarwal_tau2_bound: g >= 2 required");
  Rat dfac(odd_double_factorial(6 * g - 6));  // (2(6g-6)+1)!! = (12g-11)!!
  Rat val = dfac / (rat_pow(rat_of(15), 3 * g - 3) * rat_pow(rat_of(24), g) * Rat(factorial(g)));
  val *= rat_pow(rat_of(3, 2), 3 * g - 4);
  val.canonicalize();
  return val;
}

struct AsymptoticRecord {
  long g;
  Real exact;
  Real prediction;
  Real ratio;  // exact / prediction
};

inline AsymptoticRecord pi_free_energy_record(long g, const Rat& u) {
  Real exact(pi_free_energy_closed_form(g, u));
  Real pred = kapaev_asymptotic(g, Real(u));
  return {g, exact, pred, exact / pred};
}

inline AsymptoticRecord tau2_record(long g) {
  Real exact(psi_intersection(g, std::vector<long>(3 * g - 3, 2)));
  Real pred = tau2_asymptotic(g);
  return {g, exact, pred, exact / pred};
}

}  // namespace trengine
