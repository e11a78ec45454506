// Shared helpers for the test suites: deterministic random scalars/series
// and a few independent mini-oracles.
#pragma once

#include <random>
#include <vector>

#include "trengine/scalar.hpp"
#include "trengine/series.hpp"

namespace trtest {

using namespace trengine;

inline Rat random_rat(std::mt19937_64& rng, long max_abs = 12) {
  std::uniform_int_distribution<long> num(-max_abs, max_abs);
  std::uniform_int_distribution<long> den(1, max_abs);
  return rat_of(num(rng), den(rng));
}

inline Scalar random_scalar(std::mt19937_64& rng, int max_lambda_deg = 2,
                            bool allow_imag = true) {
  std::uniform_int_distribution<int> deg(0, max_lambda_deg);
  std::uniform_int_distribution<int> coin(0, 3);
  Scalar s;
  int d = deg(rng);
  for (int k = 0; k <= d; ++k) {
    Rat re = random_rat(rng);
    Rat im = (allow_imag && coin(rng) == 0) ? random_rat(rng) : Rat(0);
    s += Scalar::lambda_term(GRat(re, im), k);
  }
  return s;
}

inline Series random_series(std::mt19937_64& rng, int cap, bool unit_constant = false) {
  Series f(cap);
  for (int k = 0; k <= cap; ++k) f.set(k, Scalar(random_rat(rng)));
  if (unit_constant) {
    Scalar c0 = f[0];
    if (c0.is_zero()) f.set(0, Scalar::one());
  }
  return f;
}

// Independent oracle: reciprocal of f by classic long division of 1 by f,
// written without using Series::reciprocal.
inline std::vector<Rat> long_division_reciprocal(const std::vector<Rat>& f, int cap) {
  std::vector<Rat> q(cap + 1, Rat(0));
  std::vector<Rat> rem(cap + 2, Rat(0));
  rem[0] = 1;
  for (int k = 0; k <= cap; ++k) {
    Rat c = rem[k] / f[0];
    c.canonicalize();
    q[k] = c;
    for (int j = 0; j + k <= cap && j < (int)f.size(); ++j) rem[k + j] -= c * f[j];
  }
  return q;
}

// Independent oracle: plain double-loop convolution of rational coefficient
// lists, truncated at cap.
inline std::vector<Rat> convolve(const std::vector<Rat>& a, const std::vector<Rat>& b,
                                 int cap) {
  std::vector<Rat> out(cap + 1, Rat(0));
  for (int i = 0; i < (int)a.size() && i <= cap; ++i)
    for (int j = 0; j < (int)b.size() && i + j <= cap; ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace trtest
