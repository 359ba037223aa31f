#include <doctest.h>

#include <cmath>
#include <random>

#include "bvpb/maxwellian.hpp"
#include "bvpb/phase_space.hpp"

using namespace bvpb;

TEST_CASE("velocity grid symmetry and weights") {
  const VelocityGrid g = VelocityGrid::make_cubic(24, 6.0, {0.3, 0.0, -0.1}, 1.2);
  for (int a = 0; a < 3; ++a) {
    const auto& ax = g.axis(a);
    double wsum = 0.0;
    for (int i = 0; i < ax.count; ++i) {
      // mirror node about the center with equal weight
      const double mirrored = 2.0 * ax.center - ax.nodes[i];
      CHECK(mirrored == doctest::Approx(ax.nodes[ax.count - 1 - i]).epsilon(1e-14));
      CHECK(ax.weights[i] == doctest::Approx(ax.weights[ax.count - 1 - i]));
      CHECK(ax.weights[i] > 0.0);
      wsum += ax.weights[i];
    }
    CHECK(wsum == doctest::Approx(2.0 * ax.halfwidth).epsilon(1e-13));
  }
  double total = 0.0;
  const auto& w = g.flat_weights();
  for (double v : w) total += v;
  CHECK(total == doctest::Approx(g.box_volume()).epsilon(1e-12));
}

TEST_CASE("integrate_velocity: zero, Maxwellian mass, first moment") {
  const VelocityGrid g = VelocityGrid::make_cubic(48, 6.0, {0, 0, 0}, 1.0);
  std::vector<double> zero(g.node_count(), 0.0);
  CHECK(integrate_velocity(zero, g) == 0.0);

  const FluidState s0{1.0, {0, 0, 0}, 1.0};
  CHECK(integrate_velocity(maxwellian(s0, g), g) == doctest::Approx(1.0).epsilon(1e-6));

  // f = v1 * Maxwellian(rho=1, u=(0.3,0,0), theta=1) integrates to rho*u1.
  const FluidState s1{1.0, {0.3, 0, 0}, 1.0};
  std::vector<double> f = maxwellian(s1, g);
  std::size_t n = 0;
  for (int i = 0; i < g.axis(0).count; ++i)
    for (int j = 0; j < g.axis(1).count; ++j)
      for (int k = 0; k < g.axis(2).count; ++k, ++n) f[n] *= g.v1(i);
  CHECK(integrate_velocity(f, g) == doctest::Approx(0.3).epsilon(1e-6));

  std::vector<double> bad(10, 0.0);
  CHECK_THROWS_AS((void)integrate_velocity(bad, g), NumericsError);
}

TEST_CASE("moments of sampled Maxwellians") {
  const VelocityGrid g = VelocityGrid::make_cubic(48, 6.0, {0.25, 0, 0}, 1.0);

  const FluidState target{2.0, {0.5, 0, 0}, 0.8};
  const FluidState got = moments(maxwellian(target, g), g);
  CHECK(got.rho == doctest::Approx(target.rho).epsilon(1e-6));
  CHECK(got.u[0] == doctest::Approx(target.u[0]).epsilon(1e-6));
  CHECK(got.theta == doctest::Approx(target.theta).epsilon(1e-6));

  // Two half-mass Maxwellians at different u: mean velocity by symmetry.
  const FluidState a{0.5, {0.4, 0, 0}, 1.0};
  const FluidState b{0.5, {0.1, 0, 0}, 1.0};
  std::vector<double> fa = maxwellian(a, g), fb = maxwellian(b, g);
  std::vector<double> sum(fa.size());
  for (std::size_t n = 0; n < fa.size(); ++n) sum[n] = fa[n] + fb[n];
  const FluidState ms = moments(sum, g);
  CHECK(ms.rho == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ms.u[0] == doctest::Approx(0.25).epsilon(1e-5));

  // Moment linearity to machine precision.
  const RawMoments ma = raw_moments(fa, g), mb = raw_moments(fb, g), msum = raw_moments(sum, g);
  CHECK(msum.rho == doctest::Approx(ma.rho + mb.rho).epsilon(1e-14));
  CHECK(msum.energy == doctest::Approx(ma.energy + mb.energy).epsilon(1e-14));

  std::vector<double> vac(g.node_count(), 0.0);
  CHECK_THROWS_AS((void)moments(vac, g), PhysicsError);
}

TEST_CASE("grid symmetry kills odd integrands") {
  const VelocityGrid g = VelocityGrid::make_cubic(24, 6.0, {0.7, -0.2, 0.1}, 1.0);
  std::vector<double> f(g.node_count());
  std::size_t n = 0;
  for (int i = 0; i < g.axis(0).count; ++i)
    for (int j = 0; j < g.axis(1).count; ++j)
      for (int k = 0; k < g.axis(2).count; ++k, ++n) {
        const double c1 = g.v1(i) - g.axis(0).center;
        const double c2 = g.v2(j) - g.axis(1).center;
        const double c3 = g.v3(k) - g.axis(2).center;
        f[n] = c1 * c1 * c1 + c2 * c3 * c3;  // odd in (v - center)
      }
  CHECK(std::abs(integrate_velocity(f, g)) <= 1e-12 * g.box_volume());
}

TEST_CASE("quadrature exactness: degree <= 2 polynomials against a Gaussian") {
  const FluidState s{1.3, {0.2, -0.1, 0.0}, 0.9};
  const double rt = kGasConstant * s.theta;
  for (int nodes : {24, 48}) {
    const VelocityGrid g =
        VelocityGrid::make_cubic(nodes, 6.0, {s.u[0], s.u[1], s.u[2]}, s.theta);
    const std::vector<double> m = maxwellian(s, g);
    auto against = [&](auto&& poly) {
      std::vector<double> f(m.size());
      std::size_t n = 0;
      for (int i = 0; i < g.axis(0).count; ++i)
        for (int j = 0; j < g.axis(1).count; ++j)
          for (int k = 0; k < g.axis(2).count; ++k, ++n)
            f[n] = poly(g.v1(i), g.v2(j), g.v3(k)) * m[n];
      return integrate_velocity(f, g);
    };
    // Analytic Gaussian moments as the oracle.
    CHECK(against([](double, double, double) { return 1.0; }) ==
          doctest::Approx(s.rho).epsilon(1e-6));
    CHECK(against([](double v1, double, double) { return v1; }) ==
          doctest::Approx(s.rho * s.u[0]).epsilon(1e-6));
    CHECK(against([&](double v1, double, double) { return v1 * v1; }) ==
          doctest::Approx(s.rho * (rt + s.u[0] * s.u[0])).epsilon(1e-6));
    CHECK(against([&](double v1, double v2, double) { return v1 * v2; }) ==
          doctest::Approx(s.rho * s.u[0] * s.u[1]).epsilon(2e-6));
  }
}

TEST_CASE("n2 density") {
  const VelocityGrid g = VelocityGrid::make_cubic(48, 6.0, {0, 0, 0}, 1.0);
  std::vector<double> zero(g.node_count(), 0.0);
  CHECK(n2_density(zero, g) == 0.0);
  std::vector<double> f2 = maxwellian(FluidState{1.0, {0, 0, 0}, 1.0}, g);
  for (auto& v : f2) v *= 0.01;
  CHECK(n2_density(f2, g) == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("fluid state law p = k rho^{5/3} exp(S)") {
  const FluidState s{1.7, {0.3, 0, 0}, 0.85};
  const double p_by_law = kEntropyConst * std::pow(s.rho, 5.0 / 3.0) * std::exp(s.entropy());
  CHECK(s.pressure() == doctest::Approx(p_by_law).epsilon(1e-13));
  CHECK(s.internal_energy() == s.theta);
}
