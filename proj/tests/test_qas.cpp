#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <vector>

#include "trengine/curves.hpp"
#include "trengine/qas.hpp"
#include "trengine/reference.hpp"

using namespace trengine;

namespace {

AmplitudeEngine engine_for(const std::string& name, const Rat& u, long chi) {
  CatalogParams p;
  p.u = u;
  int cap = engine_order_cap(chi);
  return AmplitudeEngine(assemble_qas(build_catalog_curve(name, p, cap, cap)));
}

void for_each_order_tuple(long n, long budget,
                          const std::function<void(const std::vector<long>&)>& fn) {
  std::vector<long> cur;
  std::function<void(long, long)> rec = [&](long minv, long left) {
    if ((long)cur.size() == n) {
      fn(cur);
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

}  // namespace

TEST_CASE("initial conditions and basic values") {
  auto airy = engine_for("airy", Rat(1), 8);
  REQUIRE(airy.amplitude(0, {make_mode(0, 0), make_mode(0, 0), make_mode(0, 0)}) ==
          Scalar(Rat(1)));
  REQUIRE(airy.amplitude(1, {make_mode(0, 1)}) == Scalar(rat_of(1, 24)));
  auto pi = engine_for("painleve1", Rat(1), 6);
  REQUIRE(pi.amplitude(1, {make_mode(0, 0)}) == Scalar(rat_of(1, 144)));
}

TEST_CASE("unstable keys and order overflow are rejected") {
  auto airy = engine_for("airy", Rat(1), 4);
  REQUIRE_THROWS_AS(airy.amplitude(0, {make_mode(0, 0)}), std::invalid_argument);
  REQUIRE_THROWS_AS(airy.amplitude(0, {make_mode(0, 0), make_mode(0, 0)}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(airy.amplitude(1, {make_mode(0, 5000)}), std::invalid_argument);
}

TEST_CASE("vanishing beyond |k| = 3g-3+n is exact") {
  auto pi = engine_for("painleve1", Rat(1), 6);
  for (long k = 5; k <= 8; ++k)
    REQUIRE(pi.amplitude(2, {make_mode(0, (int)k)}).is_zero());
  REQUIRE(!pi.amplitude(2, {make_mode(0, 4)}).is_zero());
}

TEST_CASE("oracle equivalence: Airy amplitudes are psi intersections") {
  auto airy = engine_for("airy", Rat(1), 8);
  long checked = 0;
  for (long g = 0; g <= 5; ++g)
    for (long n = 1; 2 * g - 2 + n <= 8; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      for_each_order_tuple(n, 3 * g - 3 + n, [&](const std::vector<long>& k) {
        std::vector<Mode> modes;
        long s = 0;
        for (long x : k) {
          modes.push_back(make_mode(0, (int)x));
          s += x;
        }
        Scalar eng = airy.amplitude(g, modes);
        Rat expect = (s == 3 * g - 3 + n) ? psi_intersection(g, k) : Rat(0);
        REQUIRE(eng == Scalar(expect));
        ++checked;
      });
    }
  REQUIRE(checked >= 300);
}

TEST_CASE("oracle equivalence: Painleve I closed form at u = 1 and 1/3") {
  for (Rat u : {Rat(1), rat_of(1, 3)}) {
    auto pi = engine_for("painleve1", u, 6);
    for (long g = 0; g <= 4; ++g)
      for (long n = 1; 2 * g - 2 + n <= 6; ++n) {
        if (2 * g - 2 + n <= 0) continue;
        for_each_order_tuple(n, 3 * g - 3 + n, [&](const std::vector<long>& k) {
          std::vector<Mode> modes;
          for (long x : k) modes.push_back(make_mode(0, (int)x));
          REQUIRE(pi.amplitude(g, modes) == pi_amplitude_closed_form(g, k, u));
        });
      }
  }
}

TEST_CASE("Painleve I homogeneity in u") {
  // F_{g;k}(u) u^{5g-5+2n-|k|} is independent of u
  std::vector<Rat> us = {Rat(1), Rat(2), rat_of(1, 3)};
  std::vector<AmplitudeEngine> engines;
  for (const Rat& u : us) engines.push_back(engine_for("painleve1", u, 5));
  for (long g = 0; g <= 3; ++g)
    for (long n = 1; 2 * g - 2 + n <= 5; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      for_each_order_tuple(n, 3 * g - 3 + n, [&](const std::vector<long>& k) {
        long tot = 0;
        std::vector<Mode> modes;
        for (long x : k) {
          modes.push_back(make_mode(0, (int)x));
          tot += x;
        }
        long e = 5 * g - 5 + 2 * n - tot;
        Scalar ref;
        for (size_t i = 0; i < us.size(); ++i) {
          Scalar v = engines[i].amplitude(g, modes) * Scalar(rat_pow(us[i], e));
          if (i == 0)
            ref = v;
          else
            REQUIRE(v == ref);
        }
      });
    }
}

TEST_CASE("pivot symmetry of the recursion") {
  auto airy = engine_for("airy", Rat(1), 6);
  REQUIRE(airy.check_symmetry(0, {make_mode(0, 0), make_mode(0, 0), make_mode(0, 1)}));
  auto pi = engine_for("painleve1", Rat(1), 6);
  REQUIRE(pi.check_symmetry(1, {make_mode(0, 0), make_mode(0, 1)}));
  CatalogParams P;
  int cap = engine_order_cap(6);
  auto gue = AmplitudeEngine(assemble_qas(build_catalog_curve("gue", P, cap, cap)));
  REQUIRE(gue.check_symmetry(1, {make_mode(0, 0), make_mode(1, 1)}));

  // every stable key with 2g-2+n <= 6 for a one- and a two-branch curve
  for (long g = 0; g <= 3; ++g)
    for (long n = 1; 2 * g - 2 + n <= 5; ++n) {
      if (2 * g - 2 + n <= 0 || n > 4) continue;
      for_each_order_tuple(n, 3 * g - 3 + n, [&](const std::vector<long>& k) {
        std::vector<Mode> modes;
        for (long x : k) modes.push_back(make_mode(0, (int)x));
        REQUIRE(pi.check_symmetry(g, modes));
      });
    }
  REQUIRE(gue.check_symmetry(2, {make_mode(0, 1), make_mode(1, 0)}));
  REQUIRE(gue.check_symmetry(0, {make_mode(0, 0), make_mode(0, 1), make_mode(1, 0),
                                 make_mode(1, 0)}));
}

TEST_CASE("memo purity: cold cache recomputation is identical") {
  auto a = engine_for("painleve1", rat_of(1, 3), 6);
  auto b = engine_for("painleve1", rat_of(1, 3), 6);
  std::vector<Mode> key = {make_mode(0, 1), make_mode(0, 2)};
  REQUIRE(a.amplitude(2, key) == b.amplitude(2, key));
  REQUIRE(a.cache_size() == b.cache_size());
}

TEST_CASE("amplitude batch closure and contents") {
  auto airy = engine_for("airy", Rat(1), 8);
  AmplitudeTable t = airy.amplitude_batch(1, 3);
  // contains F_{0;0,0,0} = 1 and F_{1;1} = 1/24; every row matches a direct call
  bool saw_a = false, saw_d = false;
  for (const auto& r : t.rows()) {
    REQUIRE(airy.amplitude(r.g, r.modes) == r.value);
    long chi = 2 * r.g - 2 + (long)r.modes.size();
    REQUIRE(chi <= 2 * 1 - 2 + 3);
    REQUIRE((long)r.modes.size() <= 3);
    if (r.g == 0 && r.modes.size() == 3 && r.value == Scalar(Rat(1))) saw_a = true;
    if (r.g == 1 && r.modes.size() == 1 && r.value == Scalar(rat_of(1, 24))) saw_d = true;
  }
  REQUIRE(saw_a);
  REQUIRE(saw_d);

  REQUIRE(airy.amplitude_batch(2, 0).size() == 0);  // n_max = 0: empty

  auto pi = engine_for("painleve1", Rat(1), 6);
  AmplitudeTable t2 = pi.amplitude_batch(2, 1);
  long count_g2 = 0;
  for (const auto& r : t2.rows())
    if (r.g == 2 && r.modes.size() == 1) {
      ++count_g2;
      REQUIRE(mode_order(r.modes[0]) <= 4);  // 3g-3+n = 4
    }
  REQUIRE(count_g2 == 5);
}

TEST_CASE("work limit is an error, not truncation") {
  CatalogParams P;
  int cap = engine_order_cap(6);
  AmplitudeEngine tiny(assemble_qas(build_catalog_curve("airy", P, cap, cap)), 5);
  bool threw = false;
  try {
    tiny.amplitude_batch(2, 2);
  } catch (const WorkLimitExceeded& e) {
    threw = true;
    REQUIRE(e.key_count >= 5);
  }
  REQUIRE(threw);
}

TEST_CASE("parallel batch equals serial batch exactly") {
  auto serial = engine_for("painleve1", Rat(1), 6);
  auto parallel = engine_for("painleve1", Rat(1), 6);
  AmplitudeTable ts = serial.amplitude_batch(0, 8, 1);
  AmplitudeTable tp = parallel.amplitude_batch(0, 8, 4);
  REQUIRE(ts.size() == tp.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    REQUIRE(ts.rows()[i].g == tp.rows()[i].g);
    REQUIRE(ts.rows()[i].modes == tp.rows()[i].modes);
    REQUIRE(ts.rows()[i].value == tp.rows()[i].value);
  }
}
