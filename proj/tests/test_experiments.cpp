#include "doctest.h"

#include "txn/experiments.hpp"
#include "txn/random.hpp"

#include <numbers>
#include <set>

using namespace txn;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("rng streams") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(a.next() != c.next());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i)
    seeds.insert(derive_seed(42, i));
  CHECK(seeds.size() == 1000);
  // mean of the exponential
  Rng e(3);
  double s = 0;
  for (int i = 0; i < 200000; ++i)
    s += e.exponential(2.5);
  CHECK(s / 200000 == doctest::Approx(2.5).epsilon(0.01));
}

TEST_CASE("hbt coincidence rate") {
  HbtGeometry g;
  CHECK(hbt_coincidence_rate(g) == 2.0);
  g.d_ab = 0.5 * hbt_fringe_period(g);
  CHECK(std::abs(hbt_coincidence_rate(g)) < 1e-15);
  CHECK(hbt_fringe_period(g) == doctest::Approx(g.wavelength * g.distance / g.d12));
  CHECK(std::abs(hbt_scanned_period(g, 0.02, 2001) / hbt_fringe_period(g) - 1.0) < 1e-3);
  CHECK(g.far_field());
  g.d_ab = 1.0;
  CHECK_FALSE(g.far_field());
}

TEST_CASE("property: hbt rate stays in [0, 2] and is 2 at zero separation") {
  for (double d12 : {1e-4, 1e-3, 3e-3})
    for (double lambda : {4e-7, 6e-7})
      for (double dab = 0; dab < 0.05; dab += 1.3e-4) {
        HbtGeometry g{d12, dab, 10.0, lambda};
        const double r = hbt_coincidence_rate(g);
        CHECK(r >= 0.0);
        CHECK(r <= 2.0);
        g.d_ab = 0;
        CHECK(hbt_coincidence_rate(g) == 2.0);
      }
}

TEST_CASE("freedman-clauser transactional curve") {
  const auto perfect = [](double phi) { return fc_coincidence_ti(PolarimeterPair::symmetric(phi)); };
  CHECK(perfect(kPi / 2) == 0.0);
  CHECK(perfect(0.0) == 1.0);
  CHECK(perfect(kPi / 4) / perfect(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fc_coincidence_ti(PolarimeterPair::symmetric(kPi / 2, 0.97, 0.04)) > 0.0);
  // leakage keeps the affine form in cos^2
  const auto leaky = [](double phi) {
    return fc_coincidence_ti(PolarimeterPair::symmetric(phi, 0.9, 0.1));
  };
  const double a = leaky(kPi / 2), b = leaky(0.0) - a;
  for (double phi : {0.2, 0.7, 1.2})
    CHECK(leaky(phi) == doctest::Approx(a + b * std::cos(phi) * std::cos(phi)).epsilon(1e-14));
  CHECK_THROWS_AS(fc_coincidence_ti(PolarimeterPair::symmetric(0.0, 0.2, 0.5)), std::invalid_argument);
}

TEST_CASE("property: transactional curve depends only on the relative angle") {
  for (double delta : {-1.0, 0.3, 2.2})
    for (double phi : {0.0, 0.4, 1.0, 1.5}) {
      PolarimeterPair p{0.0, phi, 0.95, 0.03, 0.9, 0.05};
      PolarimeterPair q{delta, delta + phi, 0.95, 0.03, 0.9, 0.05};
      CHECK(fc_coincidence_ti(p) == doctest::Approx(fc_coincidence_ti(q)).epsilon(1e-13));
    }
}

TEST_CASE("freedman-clauser classical model") {
  const long n = 400000;
  for (double phi : {0.0, 0.5, 1.0, kPi / 2}) {
    const auto mc = fc_coincidence_classical(PolarimeterPair::symmetric(phi), n, 11);
    const double oracle = (2.0 + std::cos(2 * phi)) / 8.0 / (3.0 / 8.0);
    CHECK(std::abs(mc.value - oracle) < 3 * mc.std_error);
    CHECK(mc.value >= (1.0 / 8.0) / (3.0 / 8.0) - 3 * mc.std_error);
  }
  const auto zero = fc_coincidence_classical(PolarimeterPair::symmetric(0.0), n, 5);
  const auto right = fc_coincidence_classical(PolarimeterPair::symmetric(kPi / 2), n, 5);
  CHECK(right.value > 0.3 * zero.value);
  CHECK(zero.value > right.value);
  CHECK(fc_classical_oracle(kPi / 2) == doctest::Approx(1.0 / 8));
}

TEST_CASE("property: Monte Carlo error shrinks at the statistical rate") {
  auto spread = [](long n) {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 60; ++s)
      v.push_back(fc_coincidence_classical(PolarimeterPair::symmetric(0.6), n, derive_seed(9, s)).value);
    double m = 0;
    for (double x : v)
      m += x;
    m /= double(v.size());
    double var = 0;
    for (double x : v)
      var += (x - m) * (x - m);
    return std::sqrt(var / double(v.size() - 1));
  };
  const double ratio = spread(4000) / spread(16000);
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.7);
  const auto a = fc_coincidence_classical(PolarimeterPair::symmetric(0.6), 10000, 1);
  const auto b = fc_coincidence_classical(PolarimeterPair::symmetric(0.6), 40000, 1);
  CHECK(a.std_error / b.std_error == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("fc curve rows") {
  const std::vector<double> phis = {0.0, kPi / 4, kPi / 2};
  const auto rows = fc_curve(PolarimeterPair::symmetric(0.0), phis, 20000, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].ti == 0.0);
  CHECK(rows[2].classical > 0.0);
  CHECK(rows[0].ti > rows[1].ti);
  const auto again = fc_curve(PolarimeterPair::symmetric(0.0), phis, 20000, 3);
  CHECK(again[1].classical == rows[1].classical);
}

TEST_CASE("split photon histogram") {
  EmitterStream s;
  s.duration = 2e-3;
  const auto r = split_photon_run(s);
  CHECK_FALSE(r.degenerate);
  CHECK(r.zero_bin < 0.1 * r.plateau);
  CHECK(std::abs(r.zero_bin - r.accidental_oracle) < 3 * std::sqrt(r.accidental_oracle));
  CHECK(r.detected_a + r.detected_b + r.lost == r.primary_events + r.background_events);
  CHECK(r.delays.size() == r.counts.size());

  SUBCASE("reproducible bit for bit") {
    const auto again = split_photon_run(s);
    CHECK(again.counts == r.counts);
    s.rng_seed = 2;
    CHECK(split_photon_run(s).counts != r.counts);
  }
  SUBCASE("everything lost") {
    s.p_loss = 1.0;
    const auto lost = split_photon_run(s);
    CHECK(lost.detected_a == 0);
    CHECK(lost.detected_b == 0);
    CHECK(lost.counts.sum() == 0.0);
    CHECK(lost.degenerate);
  }
  SUBCASE("invalid streams") {
    s.window = 2 * s.mean_interval;
    CHECK_THROWS_AS(split_photon_run(s), std::invalid_argument);
  }
}

TEST_CASE("property: accidental oracle holds across seeds and rates") {
  int within = 0, total = 0;
  for (double bg : {2e-7, 5e-7, 1e-6})
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      EmitterStream s;
      s.duration = 2e-3;
      s.background_interval = bg;
      s.rng_seed = seed;
      const auto r = split_photon_run(s);
      ++total;
      within += std::abs(r.zero_bin - r.accidental_oracle) < 3 * std::sqrt(r.accidental_oracle);
    }
  // 3 sigma: expect all 12, allow one statistical straggler
  CHECK(within >= total - 1);
}
