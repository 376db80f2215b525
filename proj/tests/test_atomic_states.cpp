#include "doctest.h"

#include "txn/atomic_states.hpp"
#include "txn/quadrature.hpp"

#include <numbers>

using namespace txn;

namespace {
const double kPi = std::numbers::pi;
const auto s100 = EigenState::hydrogen_100();
const auto s210 = EigenState::hydrogen_210();
} // namespace

TEST_CASE("eigenstate amplitudes at hand-evaluated points") {
  // literals from 30-digit evaluation
  CHECK(eval_eigenstate(s100, 0.0, 1.234) == doctest::Approx(0.564189583547756287).epsilon(1e-15));
  CHECK(eval_eigenstate(s210, 3.7, kPi / 2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(eval_eigenstate(s210, 3.7, kPi / 2)) < 1e-16);
  CHECK(eval_eigenstate(s210, 2.0, 0.0) == doctest::Approx(0.0733813315868699499).epsilon(1e-14));
  CHECK_THROWS_AS(eval_eigenstate(s100, -0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(eval_eigenstate(s100, 1.0, 4.0), std::domain_error);
  CHECK_THROWS_AS(eval_eigenstate(EigenState{StateLabel::SUpper, 0.0}, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto rule = gauss_legendre<double>(7, 0.0, 2.0);
  // degree 13 is the limit for 7 nodes
  CHECK(rule.integrate([](double x) { return std::pow(x, 13); }) ==
        doctest::Approx(std::pow(2.0, 14) / 14).epsilon(1e-13));
  const auto comp = composite_gauss_legendre<double>(0.0, kPi, 8, 10);
  CHECK(comp.integrate([](double x) { return std::sin(x); }) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("orthonormality of the implemented states") {
  const auto n11 = norm_integral(s100, s100), n22 = norm_integral(s210, s210),
             n12 = norm_integral(s100, s210);
  CHECK(std::abs(n11.value - 1.0) < 1e-8);
  CHECK(std::abs(n22.value - 1.0) < 1e-8);
  CHECK(std::abs(n12.value) < 1e-8);
  CHECK(n11.converged);
  CHECK(n22.converged);
  // the 40 a0 cutoff drops an exponentially small tail
  CHECK(ground_state_tail(40.0) < 1e-30);
}

TEST_CASE("quadrature refinement changes results by < 1e-8") {
  QuadratureSpec fine;
  fine.radial_points *= 2;
  fine.angular_points *= 2;
  for (auto [a, b] : {std::pair{s100, s100}, std::pair{s210, s210}, std::pair{s100, s210}})
    CHECK(std::abs(norm_integral(a, b).value - norm_integral(a, b, fine).value) < 1e-8);
}

TEST_CASE("dipole strength against the closed form") {
  const double oracle = 2.0 * 128.0 * std::sqrt(2.0) / 243.0;
  const auto d = dipole_strength(s100, s210);
  CHECK(std::abs(d.q_a0 - oracle) / oracle < 1e-5);
  CHECK(d.si == doctest::Approx(oracle * 1.602176634e-19 * 5.29177210903e-11).epsilon(1e-5));
  CHECK(std::abs(dipole_strength(s100, s100).q_a0) < 1e-10);
  CHECK(std::abs(dipole_strength(s210, s210).q_a0) < 1e-10);
  // the rough 3 q a0 reading overestimates
  CHECK(d.q_a0 < 3.0);
}

TEST_CASE("transition energy: Rydberg default, printed form flagged") {
  const auto e = transition_energy();
  CHECK(e.rydberg_ev == doctest::Approx(10.2042698422455).epsilon(1e-10));
  CHECK(e.omega0 == doctest::Approx(1.55e16).epsilon(0.01));
  CHECK(e.wavelength == doctest::Approx(1.22e-7).epsilon(0.01));
  CHECK(e.printed_ev == doctest::Approx(7.65).epsilon(0.001));
  CHECK(e.discrepancy);
}

namespace {
Eigen::VectorXd z_grid(double z_max = 40.0, int n = 1601) {
  return Eigen::VectorXd::LinSpaced(n, -z_max, z_max);
}
} // namespace

TEST_CASE("slice profiles") {
  const auto z = z_grid();
  SUBCASE("pure ground state has no cross term") {
    const auto p = mixed_density_slice(SuperpositionState::two_level(1.0, 0.0), 0.3, z);
    CHECK(p.cross.cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.total - p.ground).cwiseAbs().maxCoeff() == 0.0);
    // slice of e^{-2r}/pi is (1 + 2|z|) e^{-2|z|} / 2
    for (Eigen::Index i = 0; i < z.size(); i += 97)
      CHECK(p.ground[i] ==
            doctest::Approx(0.5 * (1 + 2 * std::abs(z[i])) * std::exp(-2 * std::abs(z[i])))
                .epsilon(1e-10));
  }
  SUBCASE("equal mixture at the cosine peak integrates to one") {
    const double a = 1.0 / std::sqrt(2.0);
    const auto p = mixed_density_slice(SuperpositionState::two_level(a, a), 0.0, z);
    CHECK(std::abs(integrate_sampled(z, p.total) - 1.0) < 1e-6);
    const auto q = mixed_density_slice(SuperpositionState::two_level(a, a), kPi, z);
    CHECK((p.cross + q.cross).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("unnormalized states are rejected") {
    CHECK_THROWS_AS(mixed_density_slice(SuperpositionState::two_level(0.9, 0.9), 0.0, z),
                    std::invalid_argument);
  }
}

TEST_CASE("property: pure eigenstates are stationary") {
  const auto z = z_grid(20.0, 201);
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
    const auto p0 = mixed_density_slice(SuperpositionState::two_level(a, b), 0.0, z);
    for (double t : {0.4, 1.9, 3.3, 5.8}) {
      const auto p = mixed_density_slice(SuperpositionState::two_level(a, b), t, z);
      CHECK((p.total - p0.total).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("property: charge is conserved for any mixture and time") {
  const auto z = z_grid();
  for (double a : {0.1, 0.45, 0.8, 0.99})
    for (double phi : {-2.0, 0.0, 1.3})
      for (double t : {0.0, 0.7, 2.4}) {
        const auto p = mixed_density_slice(
            SuperpositionState::two_level(a, std::sqrt(1 - a * a), phi), t, z);
        CHECK(std::abs(integrate_sampled(z, p.total) - 1.0) < 1e-6);
      }
}

TEST_CASE("dipole moment and its derivatives") {
  const double d12 = 1.5, w = 2.0;
  CHECK(dipole_moment(SuperpositionState::two_level(1.0, 0.0), d12, w, 0.37) == 0.0);
  const double a = 1.0 / std::sqrt(2.0), phi = 0.6;
  const auto st = SuperpositionState::two_level(a, a, phi);
  CHECK(dipole_moment(st, d12, w, -phi / w) == doctest::Approx(d12 / 2).epsilon(1e-15));

  // first moment of the slices, differentiated numerically, against the velocity form
  const auto z = z_grid();
  const double oracle_d12 = dipole_strength(s100, s210).q_a0;
  auto moment = [&](double t) {
    const auto p = mixed_density_slice(st, w * t, z);
    return integrate_sampled(z, Eigen::VectorXd(z.array() * p.total.array()));
  };
  for (double t : {0.1, 0.9, 2.0}) {
    const double h = 1e-4;
    const double fd = (moment(t + h) - moment(t - h)) / (2 * h);
    const double v = dipole_velocity(st, oracle_d12, w, t);
    CHECK(std::abs(fd - v) < 1e-6 * std::max(std::abs(v), oracle_d12 * w / 2));
  }
  CHECK(dipole_acceleration(st, d12, w, 0.2) ==
        doctest::Approx(-w * w * dipole_moment(st, d12, w, 0.2)).epsilon(1e-14));
}
