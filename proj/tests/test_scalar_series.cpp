#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "trengine/scalar.hpp"
#include "trengine/series.hpp"

using namespace trengine;
using trtest::convolve;
using trtest::long_division_reciprocal;
using trtest::random_scalar;
using trtest::random_series;

TEST_CASE("rationals stay canonical and Gaussian arithmetic closes") {
  GRat a(rat_of(2, 4));  // mpq canonicalizes to 1/2
  REQUIRE(a.re == rat_of(1, 2));
  GRat i(Rat(0), Rat(1));
  REQUIRE((i * i).re == Rat(-1));
  GRat z(rat_of(1, 2), rat_of(-3, 4));
  GRat w = z / z;
  REQUIRE(w == GRat(Rat(1)));
  REQUIRE((z * z.conj()).is_real());
}

TEST_CASE("scalar arithmetic, trimming, exact division") {
  Scalar zero;
  REQUIRE(zero.is_zero());
  Scalar a = Scalar::lambda_term(GRat(rat_of(2, 3)), 1) + Scalar::of_rat(1, 2);
  Scalar b = Scalar::lambda_term(GRat(Rat(-1)), 1);
  REQUIRE((a + b - a) == b);
  REQUIRE((a - a).is_zero());  // trimmed back to the empty list
  REQUIRE((a * b).lambda_degree() == 2);

  // exact polynomial division and its failure mode
  Scalar p = a * a * b;
  REQUIRE(p / a == a * b);
  REQUIRE_THROWS_AS((a + Scalar::one()) / b, std::domain_error);  // inexact
  REQUIRE_THROWS_AS(a / zero, std::domain_error);

  // units are exactly the Lambda-free nonzero scalars
  REQUIRE((Scalar::one() / Scalar::of_rat(-3, 7)) == Scalar::of_rat(-7, 3));
}

TEST_CASE("scalar serialization round-trips bit-exactly") {
  std::mt19937_64 rng(12345);
  for (int it = 0; it < 200; ++it) {
    Scalar s = random_scalar(rng, 3, true);
    Scalar back = Scalar::from_json(s.to_json());
    REQUIRE(back == s);
  }
  // spot checks of the wire format
  REQUIRE(Scalar::of_rat(3, 4).to_json().get<std::string>() == "3/4");
  Scalar gp = Scalar(GRat(rat_of(-1, 2), rat_of(5, 3)));
  REQUIRE(Scalar::from_json(gp.to_json()) == gp);
  auto lp = Scalar::lambda_term(GRat(rat_of(1, 6)), 1).to_json();
  REQUIRE(lp.contains("lambda_poly"));
}

TEST_CASE("numeric evaluation commutes with arithmetic at Lambda = pi^2") {
  std::mt19937_64 rng(777);
  const Real& L = lambda_default();
  for (int it = 0; it < 100; ++it) {
    Scalar a = random_scalar(rng), b = random_scalar(rng);
    CReal lhs = (a * b + a).eval(L);
    CReal ax = a.eval(L), bx = b.eval(L);
    CReal rhs{ax.re * bx.re - ax.im * bx.im + ax.re, ax.re * bx.im + ax.im * bx.re + ax.im};
    Real scale = lhs.abs() + rhs.abs() + Real(1L);
    REQUIRE(((lhs.re - rhs.re) * (lhs.re - rhs.re) + (lhs.im - rhs.im) * (lhs.im - rhs.im))
                .to_double() <= 1e-24 * scale.to_double() * scale.to_double());
  }
}

TEST_CASE("ring axioms hold exactly on random scalars and series") {
  std::mt19937_64 rng(99);
  for (int it = 0; it < 50; ++it) {
    Scalar a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE(a * (b + c) == a * b + a * c);
  }
  for (int it = 0; it < 20; ++it) {
    Series f = random_series(rng, 8), g = random_series(rng, 8), h = random_series(rng, 8);
    REQUIRE((f * g) * h == f * (g * h));
    REQUIRE(f * (g + h) == f * g + f * h);
  }
}

TEST_CASE("series multiplication examples") {
  int N = 2;
  Series onep = Series::one(N) + Series::variable(N);
  Series onem = Series::one(N) - Series::variable(N);
  Series prod = onep * onem;
  REQUIRE(prod[0] == Scalar::one());
  REQUIRE(prod[1].is_zero());
  REQUIRE(prod[2] == -Scalar::one());

  std::mt19937_64 rng5(5);
  Series f = random_series(rng5, 6);
  REQUIRE(f * Series::one(6) == f);

  // geometric series times (1 - z) = 1, checked against a direct convolution
  Series geo = Series::build(5, [](int) { return Scalar::one(); });
  std::vector<Rat> a(6, Rat(1)), b = {Rat(1), Rat(-1)};
  auto conv = convolve(a, b, 5);
  Series lhs = geo * (Series::one(5) - Series::variable(5));
  for (int k = 0; k <= 5; ++k) REQUIRE(lhs[k] == Scalar(conv[k]));
  REQUIRE(lhs == Series::one(5));

  REQUIRE_THROWS_AS(Series::one(3) * Series::one(4), std::invalid_argument);
}

TEST_CASE("series reciprocal examples and property") {
  // 1/(1-z) at N=3
  Series f = Series::one(3) - Series::variable(3);
  Series r = f.reciprocal();
  for (int k = 0; k <= 3; ++k) REQUIRE(r[k] == Scalar::one());

  // reciprocal of sin(x)/x via the long-division oracle:
  // sin(x)/x = 1 - x^2/6 + x^4/120; expect 1 + x^2/6 + 7x^4/360
  std::vector<Rat> sinc = {Rat(1), Rat(0), rat_of(-1, 6), Rat(0), rat_of(1, 120)};
  auto oracle = long_division_reciprocal(sinc, 4);
  REQUIRE(oracle[2] == rat_of(1, 6));
  REQUIRE(oracle[4] == rat_of(7, 360));
  Series s(4);
  for (int k = 0; k <= 4; ++k) s.set(k, Scalar(k < (int)sinc.size() ? sinc[k] : Rat(0)));
  Series sr = s.reciprocal();
  for (int k = 0; k <= 4; ++k) REQUIRE(sr[k] == Scalar(oracle[k]));

  // double reciprocal round-trip on random unit series
  std::mt19937_64 rng(4242);
  for (int it = 0; it < 20; ++it) {
    Series g = random_series(rng, 7, true);
    REQUIRE(g.reciprocal().reciprocal() == g);
  }

  Series bad(3);  // zero constant term
  bad.set(1, Scalar::one());
  REQUIRE_THROWS_AS(bad.reciprocal(), std::domain_error);
  Series lam(2);  // Lambda-carrying constant term is not a unit
  lam.set(0, Scalar::lambda_term(GRat(Rat(1)), 1));
  REQUIRE_THROWS_AS(lam.reciprocal(), std::domain_error);
}

TEST_CASE("local coordinate solve") {
  const int N = 16;
  // Airy chart: x = z^2 gives w(zeta) = zeta, and -zeta on the other sheet
  Series X(N);
  X.set(2, Scalar::one());
  Series w = solve_local_coordinate(X, +1);
  REQUIRE(w == Series::variable(N));
  Series wm = solve_local_coordinate(X, -1);
  REQUIRE(wm == -Series::variable(N));

  // x = z + 1/z near z = 1: x - 2 = d^2/(1+d); linear coefficient 1 and
  // x(w(zeta)) - 2 = zeta^2 through order 12
  Series X2 = Series::build(N, [](int k) {
    if (k < 2) return Scalar::zero();
    return (k % 2 == 0) ? Scalar::one() : -Scalar::one();
  });
  Series w2 = solve_local_coordinate(X2, +1);
  REQUIRE(w2[1] == Scalar::one());
  Series err = X2.compose(w2) - Series::variable(N) * Series::variable(N);
  for (int k = 0; k <= 12; ++k) REQUIRE(err[k].is_zero());

  // non-simple ramification rejected
  Series X3(N);
  X3.set(3, Scalar::one());
  REQUIRE_THROWS_AS(solve_local_coordinate(X3, +1), std::domain_error);
  // non-square quadratic coefficient rejected
  Series X4(N);
  X4.set(2, Scalar::of_long(2));
  REQUIRE_THROWS_AS(solve_local_coordinate(X4, +1), std::domain_error);
}

TEST_CASE("even/odd split") {
  Series f(3);
  f.set(1, Scalar::one());
  f.set(2, Scalar::one());
  auto [ev, od] = f.even_odd_split();
  REQUIRE(ev == Series::variable(3) * Series::variable(3));
  REQUIRE(od == Series::variable(3));

  // even part of exp at N=3: 1 + z^2/2
  Series ex = Series::build(3, [](int k) { return Scalar(Rat(Rat(1) / Rat(factorial(k)))); });
  Series expect(3);
  expect.set(0, Scalar::one());
  expect.set(2, Scalar::of_rat(1, 2));
  REQUIRE(ex.even_part() == expect);

  std::mt19937_64 rng(31);
  for (int it = 0; it < 20; ++it) {
    Series g = random_series(rng, 9);
    auto [e, o] = g.even_odd_split();
    REQUIRE(e + o == g);
    for (int k = 1; k <= 9; k += 2) REQUIRE(e[k].is_zero());
    for (int k = 0; k <= 9; k += 2) REQUIRE(o[k].is_zero());
  }
}
