// Generalised-period linear forms on the xi basis: evaluation/coefficient
// extraction at finite points and at infinity, the free-energy form, pairing
// with amplitudes, and wave-function coefficients.
//
// For the supported genus-0 curves, xi^{(a,i)}(z)/dz is (2i+1)!! times the
// zeta^{2i+1} coefficient of 1/(z - w_a(zeta)), plus a correction from the
// difference-kernel deviation of omega_{0,2} when one is present.
#pragma once

#include <json.hpp>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trengine/curves.hpp"
#include "trengine/qas.hpp"

namespace trengine {

struct PeriodVector {
  std::string label;
  int branch_count = 1;
  std::vector<std::vector<Scalar>> values;  // [branch][order]
  std::optional<Real> N_bound, v_rate;      // declared boundedness, if any

  int order_cap() const { return values.empty() ? -1 : (int)values[0].size() - 1; }
  const Scalar& value(int branch, int order) const {
    if (branch < 0 || branch >= (int)values.size() || order < 0 ||
        order >= (int)values[branch].size())
      throw std::out_of_range("PeriodVector: insufficient form cap");
    return values[branch][order];
  }

  nlohmann::json to_json() const {
    nlohmann::json vals = nlohmann::json::array();
    for (int a = 0; a < (int)values.size(); ++a)
      for (int i = 0; i < (int)values[a].size(); ++i)
        vals.push_back({{"branch", a}, {"order", i}, {"value", values[a][i].to_json()}});
    nlohmann::json c = nlohmann::json::object();
    if (N_bound) c["N"] = N_bound->to_double();
    if (v_rate) c["v"] = v_rate->to_double();
    return nlohmann::json{{"label", label}, {"constants", c}, {"values", vals}};
  }
  static PeriodVector from_json(const nlohmann::json& j) {
    PeriodVector p;
    p.label = j.value("label", "");
    int max_branch = 0, max_order = 0;
    for (const auto& e : j.at("values")) {
      max_branch = std::max(max_branch, e.at("branch").get<int>());
      max_order = std::max(max_order, e.at("order").get<int>());
    }
    p.branch_count = max_branch + 1;
    p.values.assign(p.branch_count, std::vector<Scalar>(max_order + 1));
    for (const auto& e : j.at("values"))
      p.values[e.at("branch").get<int>()][e.at("order").get<int>()] =
          Scalar::from_json(e.at("value"));
    if (j.contains("constants")) {
      const auto& c = j.at("constants");
      if (c.contains("N")) p.N_bound = Real(c.at("N").get<double>());
      if (c.contains("v")) p.v_rate = Real(c.at("v").get<double>());
    }
    return p;
  }
};

namespace detail {

// [zeta^{2i+1}] coefficients of powers of (p - w_a(zeta)); returns the
// series (p - w_a) and guards against p at the ramification point.
inline Series point_minus_chart(const LocalCurveData& d, int a, const Scalar& p, int cap) {
  if ((p - d.location[a]).is_zero())
    throw std::invalid_argument("xi evaluation: point collides with a ramification point");
  Series V(cap);
  V.set(0, p - d.location[a]);
  for (int k = 1; k <= std::min(cap, d.chart[a].cap()); ++k) V.set(k, -d.chart[a][k]);
  return V;
}

}  // namespace detail

// xi^{(a,i)}(p)/dz exactly, p a scalar point of the base coordinate.
inline Scalar xi_evaluate(const LocalCurveData& d, int a, int i, const Scalar& p, int cap) {
  if (cap < 2 * i + 1) throw std::invalid_argument("xi_evaluate: cap too small");
  Series V = detail::point_minus_chart(d, a, p, cap);
  Scalar main = Scalar(Rat(odd_double_factorial(i))) * V.reciprocal()[2 * i + 1];
  if (d.deviation.empty()) return main;
  // deviation part: -(2i+1)!! sum_m c_m/(2m+1) [zeta^{2i+1}] V^{2m+1}
  Scalar dev;
  Series pw = V;
  Series V2 = V * V;
  for (size_t m = 0; m < d.deviation.size(); ++m) {
    if (m > 0) pw = pw * V2;
    if (d.deviation[m].is_zero()) continue;
    dev += d.deviation[m] * pw[2 * i + 1] / Scalar(rat_of(2 * (long)m + 1));
  }
  return main - Scalar(Rat(odd_double_factorial(i))) * dev;
}

// F[xi^{(a,i)}] = -(2i-1)!! t_{(a,i)}, bounded with rate v = rho_t.
inline PeriodVector free_energy_form(const LocalCurveData& d, int cap) {
  if (cap > d.t_cap) throw std::invalid_argument("free_energy_form: t cap too small");
  PeriodVector p;
  p.label = "free-energy form";
  p.branch_count = d.branch_count;
  p.values.assign(d.branch_count, std::vector<Scalar>(cap + 1));
  for (int a = 0; a < d.branch_count; ++a)
    for (int i = 0; i <= cap; ++i)
      p.values[a][i] = -(Scalar(Rat(odd_double_factorial_down(i))) * d.t_at(a, i));
  if (d.constants) {
    p.v_rate = d.constants->rho_t.value;
    p.N_bound = d.constants->M_t.value / d.constants->rho_t.value;
  }
  return p;
}

// I_{(Z,p,k)}[xi^{(a,i)}]: residue at p of xi/(Z - Z(p))^k, with the chart Z
// given by its series in s = z - p (Z(0) = 0, Z'(0) != 0); k = 1 is plain
// evaluation in the chart.
inline PeriodVector coefficient_form(const LocalCurveData& d, const Scalar& p,
                                     const Series& Z, long k, int cap) {
  if (k < 1) throw std::invalid_argument("coefficient_form: k >= 1 required");
  if (!Z[0].is_zero() || Z[1].is_zero() || !Z[1].is_constant())
    throw std::invalid_argument("coefficient_form: chart not locally invertible");
  const int s_cap = Z.cap();
  if (s_cap < k) throw std::invalid_argument("coefficient_form: chart cap too small");
  PeriodVector out;
  out.label = "coefficient form k=" + std::to_string(k);
  out.branch_count = d.branch_count;
  out.values.assign(d.branch_count, std::vector<Scalar>(cap + 1));
  // (Z(s)/s)^{-k}
  Series zs = Z.shifted(-1);
  Series zpow = Series::one(s_cap);
  Series zrec = zs.reciprocal();
  for (long q = 0; q < k; ++q) zpow = zpow * zrec;
  for (int a = 0; a < d.branch_count; ++a) {
    const int zc = 2 * cap + 1;
    Series V = detail::point_minus_chart(d, a, p, zc);
    Series R = V.reciprocal();
    // f_{a,i}(s) = (2i+1)!! sum_j (-1)^j s^j [zeta^{2i+1}] R^{j+1} (+ deviation)
    std::vector<Series> fs;  // fs[i](s)
    fs.assign(cap + 1, Series(s_cap));
    Series Rp = R;
    for (long j = 0; j <= std::min<long>(s_cap, k - 1 + 1); ++j) {
      if (j > 0) Rp = Rp * R;
      for (int i = 0; i <= cap; ++i) {
        Scalar c = Rp[2 * i + 1];
        if (j % 2 == 1) c = -c;
        fs[i].set((int)j, fs[i][(int)j] + c);
      }
    }
    if (!d.deviation.empty()) {
      Series V2 = V * V;
      Series pw = V;  // V^{2m+1}
      for (size_t m = 0; m < d.deviation.size(); ++m) {
        if (m > 0) pw = pw * V2;
        if (d.deviation[m].is_zero()) continue;
        // -(1/(2m+1)) (V + s)^{2m+1} = -(1/(2m+1)) sum_j C(2m+1,j) s^j V^{2m+1-j}
        std::vector<Series> vpows(2 * m + 2, Series(zc));
        vpows[0] = Series::one(zc);
        for (size_t e = 1; e <= 2 * m + 1; ++e) vpows[e] = vpows[e - 1] * V;
        for (long j = 0; j <= std::min<long>((long)s_cap, (long)(2 * m + 1)); ++j) {
          Rat cf(binomial(2 * (long)m + 1, j));
          for (int i = 0; i <= cap; ++i) {
            Scalar c = vpows[2 * m + 1 - j][2 * i + 1];
            if (c.is_zero()) continue;
            fs[i].set((int)j,
                      fs[i][(int)j] - Scalar(Rat(cf / Rat(2 * (long)m + 1))) * c * d.deviation[m]);
          }
        }
      }
    }
    for (int i = 0; i <= cap; ++i) {
      Series res = fs[i] * zpow;
      out.values[a][i] = Scalar(Rat(odd_double_factorial(i))) * res[(int)k - 1];
    }
  }
  return out;
}

// evaluation form in the chart Z at p (the k = 1 case)
inline PeriodVector evaluation_form(const LocalCurveData& d, const Scalar& p, const Series& Z,
                                    int cap) {
  return coefficient_form(d, p, Z, 1, cap);
}

// Coefficient forms at infinity: Res_{z=inf} omega(z) base(z)^ell with
// base = z (use_x = false) or base = x(z) = alpha + gamma(z + 1/z)
// (use_x = true). These are the ribbon-graph / stationary-invariant forms.
inline PeriodVector infinity_coefficient_form(const LocalCurveData& d, bool use_x,
                                              const Rat& alpha, const Rat& gamma, long ell,
                                              int cap) {
  if (ell < 1) throw std::invalid_argument("infinity_coefficient_form: ell >= 1");
  PeriodVector out;
  out.label = std::string("coefficient form at infinity in ") + (use_x ? "x" : "z");
  out.branch_count = d.branch_count;
  out.values.assign(d.branch_count, std::vector<Scalar>(cap + 1));
  // A(s) = s^ell base(1/s)^ell is a polynomial of degree <= 2 ell
  Series A = Series::one(2 * (int)ell);
  {
    Series base(2 * (int)ell);  // s * base(1/s)
    if (use_x) {
      base.set(0, Scalar(gamma));
      base.set(1, Scalar(alpha));
      base.set(2, Scalar(gamma));
    } else {
      base.set(0, Scalar::one());
    }
    for (long q = 0; q < ell; ++q) A = A * base;
  }
  for (int a = 0; a < d.branch_count; ++a) {
    const int zc = 2 * cap + 1;
    // powers of w_a up to ell
    std::vector<Series> wpow(ell + 1, Series(zc));
    wpow[0] = Series::one(zc);
    Series w = d.chart[a].truncated(zc);
    for (long j = 1; j <= ell; ++j) wpow[j] = wpow[j - 1] * w;
    for (int i = 0; i <= cap; ++i) {
      // I = -(2i+1)!! sum_{j <= ell} A[ell-j] [zeta^{2i+1}] w^j
      Scalar acc;
      for (long j = 0; j <= ell; ++j) {
        const Scalar& c = wpow[j][2 * i + 1];
        if (c.is_zero()) continue;
        acc += A[(int)(ell - j)] * c;
      }
      out.values[a][i] = -(Scalar(Rat(odd_double_factorial(i))) * acc);
    }
  }
  if (d.period_v) out.v_rate = d.period_v->value;
  return out;
}

// (I_1 x ... x I_n)[omega_{g,n}] = sum over ordered mode tuples of
// F_{g;modes} prod_i I_i[xi^{mode_i}], computed as a finite exact sum.
inline Scalar pair_periods(AmplitudeEngine& engine, const std::vector<const PeriodVector*>& forms,
                           long g, long n) {
  if ((long)forms.size() != n) throw std::invalid_argument("pair: need one form per slot");
  if (n < 1 || 2 * g - 2 + n <= 0) throw std::invalid_argument("pair: unstable (g,n)");
  long budget = 3 * g - 3 + n;
  for (const auto* f : forms)
    if (f->order_cap() < budget)
      throw std::invalid_argument("pair: insufficient form cap (need orders to 3g-3+n)");
  const int nb = engine.qas().branch_count;
  Scalar total;
  std::vector<Mode> cur;
  // enumerate sorted multisets; weight by the permanent over distinct arrangements
  std::function<void(Mode, long)> rec = [&](Mode min_mode, long left) {
    if ((long)cur.size() == n) {
      Scalar F = engine.amplitude(g, cur);
      if (F.is_zero()) return;
      // permanent of M[i][s] = I_i[xi^{cur[s]}] divided by multiplicities
      std::vector<std::vector<Scalar>> M(n, std::vector<Scalar>(n));
      for (long i = 0; i < n; ++i)
        for (long s = 0; s < n; ++s)
          M[i][s] = forms[i]->value(mode_branch(cur[s]), mode_order(cur[s]));
      // Ryser-style DP over subsets is overkill at these sizes; use
      // recursive expansion with memo on (row, used-mask)
      long full = (1L << n) - 1;
      std::vector<Scalar> memo((size_t)1 << n);
      std::vector<bool> seen((size_t)1 << n, false);
      std::function<Scalar(long, long)> perm = [&](long row, long mask) -> Scalar {
        if (row == n) return Scalar::one();
        if (seen[mask]) return memo[mask];
        Scalar acc;
        for (long s = 0; s < n; ++s) {
          if (mask & (1L << s)) continue;
          if (M[row][s].is_zero()) continue;
          acc += M[row][s] * perm(row + 1, mask | (1L << s));
        }
        seen[mask] = true;
        memo[mask] = acc;
        return acc;
      };
      Scalar p = perm(0, 0);
      (void)full;
      Rat mults(1);
      for (size_t s = 0; s < cur.size();) {
        size_t e = s;
        while (e < cur.size() && cur[e] == cur[s]) ++e;
        mults *= Rat(factorial((long)(e - s)));
        s = e;
      }
      total += F * p / Scalar(mults);
      return;
    }
    for (int b = 0; b < nb; ++b)
      for (long k = 0; k <= left; ++k) {
        Mode m = make_mode(b, (int)k);
        if (m < min_mode) continue;
        cur.push_back(m);
        rec(m, left - k);
        cur.pop_back();
      }
  };
  rec(0, budget);
  return total;
}

// f_{z0,chi} = sum_{2g-2+n = chi, n >= 1} (1/n!) I^{x n}[omega_{g,n}]
inline std::vector<Scalar> wave_coefficients(AmplitudeEngine& engine, const PeriodVector& form,
                                             long chi_max) {
  if (chi_max < 1) throw std::invalid_argument("wave_coefficients: chi >= 1 required");
  std::vector<Scalar> out(chi_max + 1);
  for (long chi = 1; chi <= chi_max; ++chi) {
    Scalar acc;
    for (long g = 0; 2 * g - 2 + 1 <= chi; ++g) {
      long n = chi - 2 * g + 2;
      if (n < 1) continue;
      std::vector<const PeriodVector*> forms(n, &form);
      Scalar paired = pair_periods(engine, forms, g, n);
      acc += paired / Scalar(Rat(factorial(n)));
    }
    out[chi] = acc;
  }
  return out;
}

}  // namespace trengine
