// The bound machinery: comparison constants, tensor/amplitude domination by
// the Painleve I model, the Aggarwal inequality, the piecewise rate P(u),
// empirical prefactors, geometric-sum bounds, growth-rate constants, lower
// bounds for positive curves, and the semisimple-point constant propagation.
//
// Inequalities on Lambda-polynomial scalars are decided numerically at the
// default Lambda with relative slack 1e-20; plain rational cases compare
// exactly through the same path (the slack only ever widens the bound).
#pragma once

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trengine/curves.hpp"
#include "trengine/qas.hpp"
#include "trengine/reference.hpp"

namespace trengine {

struct ComparisonConstants {
  Real Q;
  Real u;
};

// Q = 2 M_theta max{(1 + rho M_phi)^2, 1 + 4 rho M_phi}, u = 3^{-4/3} rho
inline ComparisonConstants comparison_constants(const BoundednessConstants& bc) {
  Real mtheta = bc.M_theta.value, mphi = bc.M_phi.value, rho = bc.rho.value;
  Real a = (Real(1L) + rho * mphi) * (Real(1L) + rho * mphi);
  Real b = Real(1L) + Real(4L) * rho * mphi;
  Real Q = Real(2L) * mtheta * Real::max(a, b);
  Real u = Real::pow(Real(3L), Real(-4.0) / Real(3.0)) * rho;
  return {Q, u};
}

// P(u) = 2/(5u^2) for u < 2/5, 5/(10u - 2) for u >= 2/5
inline Real p_of_u(const Real& u) {
  if (u.sign() <= 0) throw std::invalid_argument("p_of_u: u must be positive");
  if (u < Real(rat_of(2, 5))) return Real(2L) / (Real(5L) * u * u);
  return Real(5L) / (Real(10L) * u - Real(2L));
}
inline Rat p_of_u_rat(const Rat& u) {
  if (sgn(u) <= 0) throw std::invalid_argument("p_of_u: u must be positive");
  Rat out = (u < rat_of(2, 5)) ? Rat(Rat(2) / (5 * u * u)) : Rat(Rat(5) / (10 * u - 2));
  out.canonicalize();
  return out;
}

// Painleve I quantum Airy structure tensors at a numeric parameter.
inline Real pihat_A(long i, long j, long k, const Real& u) {
  if (i || j || k) return Real(0L);
  return Real(1L) / (Real(6L) * u);
}
inline Real pihat_B(long i, long j, long k, const Real& u) {
  long e = k - i - j + 1;
  if (e < 0) return Real(0L);
  Rat df(odd_double_factorial(k), odd_double_factorial(i) * odd_double_factorial_down(j));
  df.canonicalize();
  return Real(df) / (Real(2L) * Real::pow_si(Real(3L) * u, e + 1));
}
inline Real pihat_C(long i, long j, long k, const Real& u) {
  long e = j + k - i + 2;
  if (e < 0) return Real(0L);
  Rat df(odd_double_factorial(j) * odd_double_factorial(k), odd_double_factorial(i));
  df.canonicalize();
  return Real(df) / (Real(2L) * Real::pow_si(Real(3L) * u, e + 1));
}
inline Real pihat_D(long i, const Real& u) {
  if (i == 0) return Real(1L) / (Real(16L) * Real::pow_si(Real(3L) * u, 2));
  if (i == 1) return Real(1L) / (Real(48L) * Real(3L) * u);
  return Real(0L);
}

// ---- reports ---------------------------------------------------------------

struct CheckFailure {
  std::string key;
  double lhs = 0, rhs = 0;
};

struct CheckReport {
  std::string check;
  std::string range;
  long passes = 0;
  std::vector<CheckFailure> failures;
  std::vector<std::pair<std::string, std::string>> constants;
  std::vector<std::string> notes;
  double worst_ratio = 0;  // max lhs/rhs seen (<= 1 means comfortably inside)

  bool ok() const { return failures.empty(); }
  void record(const std::string& key, const Real& lhs, const Real& rhs) {
    if (rhs.sign() > 0) {
      double r = (lhs / rhs).to_double();
      if (r > worst_ratio) worst_ratio = r;
    }
    if (leq_with_slack(lhs, rhs)) {
      ++passes;
    } else {
      failures.push_back({key, lhs.to_double(), rhs.to_double()});
    }
  }
  nlohmann::json to_json() const {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& x : failures)
      f.push_back({{"key", x.key}, {"lhs", x.lhs}, {"rhs", x.rhs}});
    nlohmann::json c = nlohmann::json::object();
    for (const auto& kv : constants) c[kv.first] = kv.second;
    return nlohmann::json{{"check", check},   {"range", range}, {"passes", passes},
                          {"failures", f},    {"constants", c}, {"notes", notes},
                          {"worst_ratio", worst_ratio}};
  }
};

inline std::string mode_list_str(const std::vector<Mode>& modes) {
  std::ostringstream os;
  for (size_t i = 0; i < modes.size(); ++i)
    os << (i ? " " : "") << "(" << mode_branch(modes[i]) << "," << mode_order(modes[i]) << ")";
  return os.str();
}

// ---- domination checks -----------------------------------------------------

// |A| <= Q Ahat(u), ... on all index triples with orders <= grid_limit.
inline CheckReport check_tensor_domination(const QuantumAiryStructure& qas,
                                           const BoundednessConstants& bc, int grid_limit) {
  auto [Q, u] = comparison_constants(bc);
  const Real& L = lambda_default();
  CheckReport rep;
  rep.check = "tensor_domination";
  rep.range = "orders <= " + std::to_string(grid_limit);
  rep.constants = {{"Q", Q.str()}, {"u", u.str()}};
  const int nb = qas.branch_count;
  for (int a = 0; a < nb; ++a)
    for (int i = 0; i <= grid_limit; ++i) {
      rep.record("D[" + std::to_string(a) + "," + std::to_string(i) + "]",
                 qas.D(a, i).eval_abs(L), Q * pihat_D(i, u));
      for (int b = 0; b < nb; ++b)
        for (int j = 0; j <= grid_limit; ++j)
          for (int c = 0; c < nb; ++c)
            for (int k = 0; k <= grid_limit; ++k) {
              std::string key = "[" + std::to_string(a) + "," + std::to_string(i) + "|" +
                                std::to_string(b) + "," + std::to_string(j) + "|" +
                                std::to_string(c) + "," + std::to_string(k) + "]";
              rep.record("A" + key, qas.A(a, i, b, j, c, k).eval_abs(L),
                         Q * pihat_A(i, j, k, u));
              rep.record("B" + key, qas.B(a, i, b, j, c, k).eval_abs(L),
                         Q * pihat_B(i, j, k, u));
              rep.record("C" + key, qas.C(a, i, b, j, c, k).eval_abs(L),
                         Q * pihat_C(i, j, k, u));
            }
    }
  return rep;
}

// |F_{g;alpha}| <= |a|^{3g-3+n} Q^{2g-2+n} Fhat^{PI}_{g;k}(u) over the table.
inline CheckReport check_amplitude_domination(const AmplitudeTable& table, int branch_count,
                                              const BoundednessConstants& bc) {
  auto [Q, u] = comparison_constants(bc);
  const Real& L = lambda_default();
  CheckReport rep;
  rep.check = "amplitude_domination";
  rep.constants = {{"Q", Q.str()}, {"u", u.str()}};
  long max_chi = 0;
  for (const auto& row : table.rows()) {
    long n = (long)row.modes.size();
    long chi = 2 * row.g - 2 + n;
    max_chi = std::max(max_chi, chi);
    std::vector<long> k;
    for (Mode m : row.modes) k.push_back(mode_order(m));
    Real rhs = Real::pow_si(Real((long)branch_count), 3 * row.g - 3 + n) *
               Real::pow_si(Q, chi) * pi_amplitude_numeric(row.g, k, u);
    rep.record("F[g=" + std::to_string(row.g) + ";" + mode_list_str(row.modes) + "]",
               row.value.eval_abs(L), rhs);
  }
  rep.range = "2g-2+n <= " + std::to_string(max_chi);
  return rep;
}

// Declared boundedness constants dominate the extracted theta, t, phi.
inline CheckReport check_coefficient_domination(const LocalCurveData& d,
                                                const BoundednessConstants& bc,
                                                int index_limit) {
  const Real& L = lambda_default();
  CheckReport rep;
  rep.check = "coefficient_domination";
  rep.range = "indices <= " + std::to_string(index_limit);
  rep.constants = {{"M_t", bc.M_t.value.str()},     {"M_theta", bc.M_theta.value.str()},
                   {"M_phi", bc.M_phi.value.str()}, {"rho_t", bc.rho_t.value.str()},
                   {"rho", bc.rho.value.str()}};
  int ti = std::min<long>(index_limit, d.t_cap);
  int th = std::min<long>(index_limit, d.theta_cap);
  int ph = std::min<long>(index_limit, d.phi_cap);
  for (int a = 0; a < d.branch_count; ++a) {
    for (int i = 0; i <= th; ++i)
      rep.record("theta[" + std::to_string(a) + "," + std::to_string(i) + "]",
                 d.theta_at(a, i).eval_abs(L),
                 bc.M_theta.value / Real::pow_si(bc.rho.value, i + 1));
    for (int i = 1; i <= ti; ++i)
      rep.record("t[" + std::to_string(a) + "," + std::to_string(i) + "]",
                 d.t_at(a, i).eval_abs(L),
                 bc.M_t.value / Real::pow_si(bc.rho_t.value, i + 1));
    for (int b = 0; b < d.branch_count; ++b)
      for (int i = 0; i <= ph; ++i)
        for (int j = 0; j <= ph; ++j)
          rep.record("phi[" + std::to_string(a) + "," + std::to_string(i) + "|" +
                         std::to_string(b) + "," + std::to_string(j) + "]",
                     d.phi_at(a, i, b, j).eval_abs(L),
                     bc.M_phi.value / Real::pow_si(bc.rho.value, i + j));
  }
  return rep;
}

// ---- Aggarwal bound --------------------------------------------------------

// (2(3g-3+n)+1)!!/(24^g g!) (3/2)^{n-1}
inline Rat aggarwal_bound(long g, long n) {
  if (n < 1 || 2 * g - 2 + n <= 0) throw std::invalid_argument("aggarwal_bound: unstable");
  Rat b(odd_double_factorial(3 * g - 3 + n));
  b /= rat_pow(rat_of(24), g) * Rat(factorial(g));
  b *= rat_pow(rat_of(3, 2), n - 1);
  b.canonicalize();
  return b;
}

inline bool aggarwal_check(long g, const std::vector<long>& d) {
  Rat lhs = psi_intersection(g, d);
  for (long x : d) lhs *= Rat(odd_double_factorial(x));
  lhs.canonicalize();
  return lhs <= aggarwal_bound(g, (long)d.size());
}

// sweep over all stable keys with 2g-2+n <= chi_max and |d| <= 3g-3+n
inline CheckReport aggarwal_sweep(long chi_max) {
  CheckReport rep;
  rep.check = "aggarwal_bound";
  rep.range = "2g-2+n <= " + std::to_string(chi_max);
  for (long g = 0; 2 * g - 2 + 1 <= chi_max; ++g) {
    for (long n = 1; 2 * g - 2 + n <= chi_max; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      Rat bound = aggarwal_bound(g, n);
      long budget = 3 * g - 3 + n;
      std::vector<long> cur;
      std::function<void(long, long)> rec = [&](long minv, long left) {
        if ((long)cur.size() == n) {
          Rat lhs = psi_intersection(g, cur);
          for (long x : cur) lhs *= Rat(odd_double_factorial(x));
          std::ostringstream key;
          key << "g=" << g << " d=";
          for (long x : cur) key << x << " ";
          rep.record(key.str(), Real(lhs), Real(bound));
          return;
        }
        for (long v = minv; v <= left; ++v) {
          cur.push_back(v);
          rec(v, left - v);
          cur.pop_back();
        }
      };
      rec(0, budget);
    }
  }
  return rep;
}

// ---- empirical prefactor and geometric sums --------------------------------

struct PrefactorEstimate {
  Rat S_est;              // max ratio over the range, exact at rational u
  std::vector<Rat> per_g_max;
  bool trend_bounded = true;  // no growth across the last three g values
  long chi_max = 0;
};

// S_est = max over 2g-2+n <= chi_max (n >= 0) and k of
//   Fhat_{g;k}(u) prod (2k_i+1)!! / [ (2u/27)^g P(u)^{3g-3+n} (3g-3+n)!/g! ]
inline PrefactorEstimate empirical_prefactor(const Rat& u, long chi_max) {
  if (chi_max < 1) throw std::invalid_argument("empirical_prefactor: empty range");
  if (sgn(u) <= 0) throw std::invalid_argument("empirical_prefactor: u must be positive");
  PrefactorEstimate est;
  est.chi_max = chi_max;
  Rat pu = p_of_u_rat(u);
  Rat two_u_27 = Rat(2 * u / 27);
  two_u_27.canonicalize();
  long g_top = (chi_max + 2) / 2;
  est.per_g_max.assign(g_top + 1, Rat(0));
  for (long g = 0; g <= g_top; ++g) {
    for (long n = (g >= 2 ? 0L : 1L); 2 * g - 2 + n <= chi_max; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      long D = 3 * g - 3 + n;
      Rat denom = rat_pow(two_u_27, g) * rat_pow(pu, D) * Rat(factorial(D)) / Rat(factorial(g));
      std::vector<long> cur;
      std::function<void(long, long)> rec = [&](long minv, long left) {
        if ((long)cur.size() == n) {
          Rat lhs = pi_amplitude_rational(g, cur, u);
          if (sgn(lhs) != 0) {
            for (long x : cur) lhs *= Rat(odd_double_factorial(x));
            // account for permutations of the sorted tuple? the bound is
            // per-tuple, so the max over sorted tuples is the max over all
            Rat ratio = lhs / denom;
            ratio.canonicalize();
            if (ratio > est.S_est) est.S_est = ratio;
            if (ratio > est.per_g_max[g]) est.per_g_max[g] = ratio;
          }
          return;
        }
        for (long v = minv; v <= left; ++v) {
          cur.push_back(v);
          rec(v, left - v);
          cur.pop_back();
        }
      };
      rec(0, D);
    }
  }
  // growth trend across the last three genus values with data
  std::vector<Rat> tail;
  for (long g = g_top; g >= 0 && (long)tail.size() < 3; --g)
    if (sgn(est.per_g_max[g]) > 0) tail.push_back(est.per_g_max[g]);
  for (size_t i = 0; i + 1 < tail.size(); ++i)
    if (tail[i] > tail[i + 1]) est.trend_bounded = false;  // tail is reversed (largest g first)
  return est;
}

struct GeometricSumCheck {
  Rat lhs;        // exact finite sum
  Real rhs;       // bound with the empirical prefactor
  Rat S_used;
  bool holds = false;
};

// sum_k v^{-|k|} Fhat_{g;k}(u) prod (2k_i+1)!!
//   <= (S(u/v)/v) (2u/27)^g (P(u/v)/v^2)^{3g-3+n} (3g-3+2n)!/(g! n!)
inline GeometricSumCheck geometric_sum_bound(long g, long n, const Rat& u, const Rat& v,
                                             long prefactor_range = 6) {
  if (n < 1) throw std::invalid_argument("geometric_sum_bound: n >= 1 required");
  if (sgn(u) <= 0 || sgn(v) <= 0)
    throw std::invalid_argument("geometric_sum_bound: u, v must be positive");
  if (2 * g - 2 + n <= 0) throw std::invalid_argument("geometric_sum_bound: unstable (g,n)");
  GeometricSumCheck out;
  long D = 3 * g - 3 + n;
  // ordered tuples k with |k| <= D
  std::vector<long> cur(n, 0);
  std::function<void(long, long)> rec = [&](long pos, long left) {
    if (pos == n) {
      Rat term = pi_amplitude_rational(g, cur, u);
      if (sgn(term) == 0) return;
      long tot = 0;
      for (long x : cur) {
        term *= Rat(odd_double_factorial(x));
        tot += x;
      }
      out.lhs += term * rat_pow(v, -tot);
      return;
    }
    for (long x = 0; x <= left; ++x) {
      cur[pos] = x;
      rec(pos + 1, left - x);
    }
  };
  rec(0, D);
  out.lhs.canonicalize();

  Rat uv = Rat(u / v);
  uv.canonicalize();
  PrefactorEstimate est = empirical_prefactor(uv, prefactor_range);
  out.S_used = est.S_est;
  Rat rate = Rat(p_of_u_rat(uv) / (v * v));
  Rat bound = est.S_est / v * rat_pow(Rat(2 * u / 27), g) * rat_pow(rate, D) *
              Rat(factorial(3 * g - 3 + 2 * n)) / Rat(factorial(g) * factorial(n));
  bound.canonicalize();
  out.rhs = Real(bound);
  out.holds = out.lhs <= bound;
  return out;
}

// ---- growth constants ------------------------------------------------------

struct GrowthConstants {
  GrowthShape shape;
  Real A_inv;                 // exponential growth rate A^{-1}
  std::optional<Real> B_inv;  // per-genus rate (2u/27) Q^2 (|a| P/v^2)^3
  std::optional<Real> C_inv;  // per-leg rate Q |a| P/v^2
};

inline GrowthConstants growth_constants(const BoundednessConstants& bc, int branch_count,
                                        GrowthShape shape, std::optional<Real> v = {}) {
  auto [Q, u] = comparison_constants(bc);
  Real na((long)branch_count);
  auto shaped = [&](const Real& vv, const Real& sqrt_arg_scale) {
    Real P = p_of_u(u / vv);
    Real A_inv = Q / Real::pow_si(vv, 3) * Real::sqrt(sqrt_arg_scale) *
                 Real::pow(na * P, Real(1.5));
    Real X = na * P / (vv * vv);
    GrowthConstants out{shape, A_inv, {}, {}};
    out.B_inv = (Real(2L) * u / Real(27L)) * Q * Q * X * X * X;
    out.C_inv = Q * X;
    return out;
  };
  switch (shape) {
    case GrowthShape::Amplitudes:
      return shaped(Real(1L), u / Real(2L));
    case GrowthShape::Periods: {
      if (!v) throw std::invalid_argument("growth_constants: periods shape needs v");
      return shaped(*v, u / Real(2L));
    }
    case GrowthShape::Free:
      return shaped(bc.rho_t.value, u / Real(2L));
    case GrowthShape::Wave: {
      if (!v) throw std::invalid_argument("growth_constants: wave shape needs v");
      return shaped(*v, Real(2L) * u);
    }
    case GrowthShape::MvVolumes: {
      // volume conversion 2^{4g-2+n} (4g-4+n)!/(6g-7+2n)! contributes the
      // Stirling rate 2^2 (4/27) per unit 2g-2+n on top of the amplitude rate
      GrowthConstants amp = shaped(Real(1L), u / Real(2L));
      amp.shape = shape;
      amp.A_inv = amp.A_inv * Real(rat_of(16, 27));
      amp.B_inv.reset();
      amp.C_inv.reset();
      return amp;
    }
  }
  throw std::logic_error("growth_constants: unknown shape");
}

// ---- lower bounds ----------------------------------------------------------

// F_{g;k} >= Q_-^{2g-2+n} Fhat^{Airy} for positive curves on equal-branch
// keys; when a strongly-positive profile (M_-, rho_-) is supplied, the
// Painleve I comparison at u_- = rho_-/3 with Q_- = 2 M_- is used instead.
inline CheckReport lower_bound_check(const LocalCurveData& d, AmplitudeEngine& engine,
                                     long chi_max,
                                     std::optional<std::pair<Real, Real>> strong = {}) {
  const Real& L = lambda_default();
  CheckReport rep;
  rep.check = strong ? "lower_bound_strong" : "lower_bound_airy";
  rep.range = "2g-2+n <= " + std::to_string(chi_max);
  if (!d.is_positive()) {
    rep.notes.push_back("curve is not positive; lower bound not applicable");
    rep.failures.push_back({"positivity", 0, 0});
    return rep;
  }
  Real Qm(1L), um(0L);
  if (strong) {
    Qm = Real(2L) * strong->first;
    um = strong->second / Real(3L);
  } else {
    Qm = d.theta_at(0, 0).eval(L).re;
    for (int a = 1; a < d.branch_count; ++a)
      Qm = Real::min(Qm, d.theta_at(a, 0).eval(L).re);
  }
  rep.constants = {{"Q_minus", Qm.str()}};
  if (strong) rep.constants.push_back({"u_minus", um.str()});
  for (int a = 0; a < d.branch_count; ++a) {
    for (long g = 0; 2 * g - 2 + 1 <= chi_max; ++g)
      for (long n = 1; 2 * g - 2 + n <= chi_max; ++n) {
        if (2 * g - 2 + n <= 0) continue;
        long budget = 3 * g - 3 + n;
        std::vector<long> cur;
        std::function<void(long, long)> rec = [&](long minv, long left) {
          if ((long)cur.size() == n) {
            std::vector<Mode> modes;
            for (long x : cur) modes.push_back(make_mode(a, (int)x));
            Real lhs = engine.amplitude(g, modes).eval(L).re;
            Real ref = strong ? pi_amplitude_numeric(g, cur, um)
                              : Real(psi_intersection(g, cur));
            Real rhs = Real::pow_si(Qm, 2 * g - 2 + n) * ref;
            // rhs <= lhs with slack
            std::ostringstream key;
            key << "a=" << a << " g=" << g << " k=";
            for (long x : cur) key << x << " ";
            if (leq_with_slack(rhs, lhs)) {
              rep.passes++;
              if (lhs.sign() > 0) {
                double r = (rhs / lhs).to_double();
                rep.worst_ratio = std::max(rep.worst_ratio, r);
              }
            } else {
              rep.failures.push_back({key.str(), rhs.to_double(), lhs.to_double()});
            }
            return;
          }
          for (long v = minv; v <= left; ++v) {
            cur.push_back(v);
            rec(v, left - v);
            cur.pop_back();
          }
        };
        rec(0, budget);
      }
  }
  return rep;
}

// ---- semisimple-point constant propagation ---------------------------------

struct FrobeniusConstants {
  Real rho_phi, M_phi, rho_t, M_t;
  std::optional<Real> rho;  // min(rho_theta, rho_R); needs the unresolved rho_theta
  std::string note = "rho_theta is non-constructive here and must be supplied to fix rho";
};

inline FrobeniusConstants frobenius_constants(const Real& M_R, const Real& rho_R,
                                              int branch_count, const Real& eps,
                                              std::optional<Real> rho_theta = {}) {
  if (M_R.sign() <= 0 || rho_R.sign() <= 0 || eps.sign() <= 0)
    throw std::invalid_argument("frobenius_constants: inputs must be positive");
  FrobeniusConstants out{Real(0L), Real(0L), Real(0L), Real(0L), {}, {}};
  Real e = Real::exp1();
  out.rho_phi = Real::exp(Real(-2L) * eps) * rho_R;
  Real na((long)branch_count);
  out.M_phi = Real::pi() * Real::exp(Real(2L) * eps) / ((e * eps) * (e * eps)) * M_R *
              (Real(1L) + Real(rat_of(11, 10)) * na * M_R) / rho_R;
  out.rho_t = Real(4L) * rho_R;
  out.M_t = Real::sqrt(Real::pi()) * na * M_R * rho_R * rho_R;
  if (rho_theta) out.rho = Real::min(*rho_theta, rho_R);
  return out;
}

}  // namespace trengine
