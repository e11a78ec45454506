#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "trengine/reference.hpp"

using namespace trengine;

TEST_CASE("psi intersection base values") {
  REQUIRE(psi_intersection(0, {0, 0, 0}) == Rat(1));
  REQUIRE(psi_intersection(1, {1}) == rat_of(1, 24));
  // string equation off <tau_0^3>_0
  REQUIRE(psi_intersection(0, {0, 0, 0, 1}) == Rat(1));
  // dimension vanishing: sum d != 3g-3+n
  REQUIRE(psi_intersection(0, {0, 0, 1}) == Rat(0));
  REQUIRE(psi_intersection(1, {0, 2}) == rat_of(1, 24));
  REQUIRE(psi_intersection(2, {4}) == rat_of(1, 1152));
  REQUIRE(psi_intersection(2, {2, 2, 2}) == rat_of(7, 240));
  REQUIRE_THROWS_AS(psi_intersection(0, {0, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(psi_intersection(1, {}), std::invalid_argument);
}

TEST_CASE("string and dilaton equations hold through 2g-2+n <= 8") {
  for (long g = 0; g <= 4; ++g) {
    for (long n = 1; 2 * g - 2 + n <= 7; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      long dim = 3 * g - 3 + n;
      // walk over partitions of dim into n parts
      std::vector<long> d;
      std::function<void(long, long)> rec = [&](long minv, long left) {
        if ((long)d.size() == n) {
          if (left != 0) return;
          Rat base = psi_intersection(g, d);
          // string: <tau_0 prod tau_{d_i}> = sum_j <... tau_{d_j - 1} ...>
          std::vector<long> with0 = d;
          with0.push_back(0);
          Rat lhs = psi_intersection(g, with0);
          Rat rhs(0);
          for (size_t j = 0; j < d.size(); ++j) {
            if (d[j] == 0) continue;
            std::vector<long> low = d;
            low[j] -= 1;
            rhs += psi_intersection(g, low);
          }
          REQUIRE(lhs == rhs);
          // dilaton: <tau_1 prod> = (2g-2+n) <prod>
          std::vector<long> with1 = d;
          with1.push_back(1);
          REQUIRE(psi_intersection(g, with1) == Rat(2 * g - 2 + n) * base);
          return;
        }
        for (long v = minv; v <= left; ++v) {
          d.push_back(v);
          rec(v, left - v);
          d.pop_back();
        }
      };
      rec(0, dim);
    }
  }
}

TEST_CASE("dilaton identity for tau_2 powers") {
  for (long g = 2; g <= 3; ++g) {
    std::vector<long> base(3 * g - 3, 2);
    std::vector<long> with1 = base;
    with1.push_back(1);
    REQUIRE(psi_intersection(g, with1) == Rat(5 * g - 5) * psi_intersection(g, base));
  }
}

TEST_CASE("Painleve I closed-form amplitudes") {
  // (g=0, k=(0,0,0)): 1/(6u)
  for (Rat u : {Rat(1), rat_of(1, 3), Rat(2)}) {
    Rat v = pi_amplitude_rational(0, {0, 0, 0}, u);
    REQUIRE(v == Rat(Rat(1) / (6 * u)));
  }
  REQUIRE(pi_amplitude_rational(1, {0}, Rat(1)) == rat_of(1, 144));
  // |k| > 3g-3+n gives zero
  REQUIRE(pi_amplitude_rational(1, {3}, Rat(1)) == Rat(0));
  REQUIRE_THROWS_AS(pi_amplitude_rational(1, {0}, Rat(0)), std::invalid_argument);
  REQUIRE_THROWS_AS(pi_amplitude_rational(1, {0}, Rat(-2)), std::invalid_argument);
}

TEST_CASE("Painleve I closed-form free energies") {
  // g=2, u=1: <tau_2^3>_2/(36*6)
  Rat f2 = pi_free_energy_closed_form(2, Rat(1));
  REQUIRE(f2 == Rat(rat_of(7, 240) / Rat(216)));
  // homogeneity: u = 2 scales by 2^{-5}
  REQUIRE(pi_free_energy_closed_form(2, Rat(2)) == Rat(f2 / Rat(32)));
  // matches the n = 0 amplitude path
  REQUIRE(pi_amplitude_rational(3, {}, rat_of(1, 3)) ==
          pi_free_energy_closed_form(3, rat_of(1, 3)));
  REQUIRE_THROWS_AS(pi_free_energy_closed_form(1, Rat(1)), std::invalid_argument);
}

TEST_CASE("Kapaev asymptotic formula values") {
  // g=2, u=1: (1/sqrt 60)(5/(24 sqrt 3))^2 Gamma(2)/(2 pi)^{3/2}
  double expect = (1.0 / std::sqrt(60.0)) * std::pow(5.0 / (24.0 * std::sqrt(3.0)), 2) /
                  std::pow(2.0 * M_PI, 1.5);
  REQUIRE(kapaev_asymptotic(2, Real(1L)).to_double() == Catch::Approx(expect).epsilon(1e-12));
  // u-scaling: value(g,2)/value(g,1) = 2^{-(5g-5)}
  for (long g : {2L, 4L}) {
    double r = (kapaev_asymptotic(g, Real(2L)) / kapaev_asymptotic(g, Real(1L))).to_double();
    REQUIRE(r == Catch::Approx(std::pow(2.0, -(5.0 * g - 5.0))).epsilon(1e-12));
  }
  // the exact-to-prediction ratio approaches 1
  double r3 = pi_free_energy_record(3, Rat(1)).ratio.to_double();
  double r6 = pi_free_energy_record(6, Rat(1)).ratio.to_double();
  REQUIRE(std::abs(r6 - 1.0) < std::abs(r3 - 1.0));
  REQUIRE_THROWS_AS(kapaev_asymptotic(1, Real(1L)), std::invalid_argument);
}

TEST_CASE("tau_2 power asymptotics") {
  // g=2: (1/4pi)(3/(10 sqrt 5))^2 Gamma(5)
  double expect = (1.0 / (4.0 * M_PI)) * std::pow(3.0 / (10.0 * std::sqrt(5.0)), 2) * 24.0;
  REQUIRE(tau2_asymptotic(2).to_double() == Catch::Approx(expect).epsilon(1e-12));
  auto rec = tau2_record(2);
  REQUIRE(rec.ratio.to_double() > 0);
  REQUIRE(rec.exact.to_double() == Catch::Approx(7.0 / 240.0).epsilon(1e-12));
  // growth-rate comparison: 3/(10 sqrt 5) < 72 sqrt(3)/625
  double lhs = 3.0 / (10.0 * std::sqrt(5.0));
  double rhs = 72.0 * std::sqrt(3.0) / 625.0;
  REQUIRE(lhs == Catch::Approx(0.1342).margin(5e-4));
  REQUIRE(rhs == Catch::Approx(0.1995).margin(5e-4));
  REQUIRE(lhs < rhs);
}

TEST_CASE("memo purity: cold cache reproduces identical values") {
  PsiOracle a, b;
  Rat v1 = a.intersection(3, {2, 2, 2, 2, 2, 2});
  Rat v2 = b.intersection(3, {2, 2, 2, 2, 2, 2});
  REQUIRE(v1 == v2);
  REQUIRE(a.cache_size() > 0);
}
