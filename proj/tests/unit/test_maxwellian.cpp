#include <doctest.h>

#include <cmath>
#include <random>

#include "bvpb/collision.hpp"
#include "bvpb/maxwellian.hpp"

using namespace bvpb;

namespace {

std::vector<double> random_tensor(const VelocityGrid& g, const std::vector<double>& envelope,
                                  unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> f(g.node_count());
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = uni(rng) * envelope[n];
  return f;
}

}  // namespace

TEST_CASE("maxwellian values: peak, mass, translation invariance") {
  const VelocityGrid g = VelocityGrid::make_cubic(48, 6.0, {0, 0, 0}, 1.0);
  const FluidState s{1.4, {0, 0, 0}, 0.9};
  const std::vector<double> m = maxwellian(s, g);

  CHECK(maxwellian_peak(s) ==
        doctest::Approx(s.rho * std::pow(3.0 / (4.0 * M_PI * s.theta), 1.5)).epsilon(1e-14));
  CHECK(integrate_velocity(m, g) == doctest::Approx(s.rho).epsilon(1e-6));

  // Same (rho, theta), shifted u, sampled on the shifted grid: identical values.
  const FluidState s2{1.4, {0.6, -0.2, 0.1}, 0.9};
  const VelocityGrid g2 = VelocityGrid::make_cubic(48, 6.0, {0.6, -0.2, 0.1}, 1.0);
  const std::vector<double> m2 = maxwellian(s2, g2);
  double dmax = 0.0;
  for (std::size_t n = 0; n < m.size(); ++n) dmax = std::max(dmax, std::abs(m[n] - m2[n]));
  CHECK(dmax <= 1e-14);
}

TEST_CASE("inner product: definition collapse, symmetry, positivity") {
  const VelocityGrid g = VelocityGrid::make_cubic(32, 6.0, {0, 0, 0}, 1.0);
  const FluidState s{1.2, {0.1, 0, 0}, 1.1};
  const std::vector<double> m = maxwellian(s, g);
  // <M, M>_M = int M dv = rho.
  CHECK(inner_product(m, m, m, g) == doctest::Approx(s.rho).epsilon(1e-6));

  const auto f = random_tensor(g, m, 7);
  const auto h = random_tensor(g, m, 8);
  CHECK(inner_product(f, h, m, g) == doctest::Approx(inner_product(h, f, m, g)).epsilon(1e-14));
  CHECK(inner_product(f, f, m, g) >= 0.0);
}

TEST_CASE("analytic chi orthonormality within quadrature tolerance") {
  // Box sized to cover the hottest sampled state plus the u offsets
  // (the covering rule the presets use).
  const double reach = 0.3 + 6.0 * std::sqrt(kGasConstant * 1.4);
  const double theta_ref = (reach / 6.0) * (reach / 6.0) / kGasConstant;
  const VelocityGrid g = VelocityGrid::make_cubic(48, 6.0, {0, 0, 0}, theta_ref);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uth(0.7, 1.4), urho(0.5, 2.0), uu(-0.3, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const FluidState s{urho(rng), {uu(rng), uu(rng), uu(rng)}, uth(rng)};
    const ChiBasis b = ChiBasis::build(s, g);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j <= i; ++j) {
        const double ip = inner_product(b.analytic_chi(i), b.analytic_chi(j), b.m_field(), g);
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-6);
      }
  }
}

TEST_CASE("projections: P0 M = M, idempotence, moment annihilation") {
  const VelocityGrid g = VelocityGrid::make_cubic(32, 6.0, {0.2, 0, 0}, 1.0);
  const FluidState s{1.0, {0.2, 0.05, -0.1}, 1.05};
  const ChiBasis b = ChiBasis::build(s, g);
  const auto& m = b.m_field();
  const std::size_t nn = g.node_count();

  std::vector<double> out(nn), out2(nn);
  b.project_P0(m, out, g);
  double dmax = 0.0, mmax = 0.0;
  for (std::size_t n = 0; n < nn; ++n) {
    dmax = std::max(dmax, std::abs(out[n] - m[n]));
    mmax = std::max(mmax, m[n]);
  }
  CHECK(dmax <= 1e-8 * mmax);  // P0 M = M, so P1 M = 0

  const auto f = random_tensor(g, m, 3);
  b.project_P0(f, out, g);
  b.project_P0(out, out2, g);
  double idem = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < nn; ++n) {
    idem = std::max(idem, std::abs(out2[n] - out[n]));
    scale = std::max(scale, std::abs(out[n]));
  }
  CHECK(idem <= 1e-12 * std::max(scale, 1e-30));

  // All five xi-moments of P1 g vanish.
  b.project_P1(f, out, g);
  std::array<double, 5> mom{};
  std::size_t n = 0;
  for (int i = 0; i < g.axis(0).count; ++i)
    for (int j = 0; j < g.axis(1).count; ++j)
      for (int k = 0; k < g.axis(2).count; ++k, ++n) {
        const double w = g.weight(i, j, k);
        mom[0] += out[n] * w;
        mom[1] += out[n] * g.v1(i) * w;
        mom[2] += out[n] * g.v2(j) * w;
        mom[3] += out[n] * g.v3(k) * w;
        mom[4] += out[n] * 0.5 *
                  (g.v1(i) * g.v1(i) + g.v2(j) * g.v2(j) + g.v3(k) * g.v3(k)) * w;
      }
  for (int i = 0; i < 5; ++i) CHECK(std::abs(mom[i]) <= 1e-8);

  // Moment consistency: moments(P0 F1) = moments(F1).
  std::vector<double> f1(nn);
  for (std::size_t t = 0; t < nn; ++t) f1[t] = m[t] + 0.05 * f[t];
  b.project_P0(f1, out, g);
  const RawMoments m_f1 = raw_moments(f1, g), m_p0 = raw_moments(out, g);
  CHECK(m_p0.rho == doctest::Approx(m_f1.rho).epsilon(1e-10));
  CHECK(m_p0.mom[0] == doctest::Approx(m_f1.mom[0]).epsilon(1e-10));
  CHECK(m_p0.energy == doctest::Approx(m_f1.energy).epsilon(1e-10));
}

TEST_CASE("Pd/Pc: fixed point, zeroth-moment removal, complementarity") {
  const VelocityGrid g = VelocityGrid::make_cubic(32, 6.0, {0, 0, 0}, 1.0);
  const FluidState s{1.3, {0.1, 0, 0}, 0.95};
  // Discrete Maxwellian field: Pd's mass factor is then exact.
  RawMoments tm;
  tm.rho = s.rho;
  tm.mom = {s.rho * s.u[0], 0, 0};
  tm.energy = s.rho * (s.theta + 0.5 * s.speed_sq());
  const std::vector<double> mhat = DiscreteMaxwellian::match(tm, g).eval(g);
  const ChiBasis b = ChiBasis::build(s, mhat, g);
  const auto& m = b.m_field();
  const std::size_t nn = g.node_count();

  // F2 = (n2/rho) M is a fixed point of Pd up to the quadrature mass error.
  std::vector<double> f2(nn), out(nn);
  const double n2 = 0.02;
  for (std::size_t n = 0; n < nn; ++n) f2[n] = n2 / s.rho * m[n];
  b.project_Pd(f2, out, g);
  double dmax = 0.0;
  for (std::size_t n = 0; n < nn; ++n) dmax = std::max(dmax, std::abs(out[n] - f2[n]));
  CHECK(dmax <= 1e-10);

  const auto f = random_tensor(g, m, 11);
  b.project_Pc(f, out, g);
  CHECK(std::abs(integrate_velocity(out, g)) <= 1e-10);

  // Pc o Pd = 0.
  std::vector<double> pd(nn), pcpd(nn);
  b.project_Pd(f, pd, g);
  b.project_Pc(pd, pcpd, g);
  double cmax = 0.0;
  for (std::size_t n = 0; n < nn; ++n) cmax = std::max(cmax, std::abs(pcpd[n]));
  CHECK(cmax <= 1e-12);

  // P0 + P1 = Id and Pd + Pc = Id exactly by construction.
  std::vector<double> p0(nn), p1(nn), pc(nn);
  b.project_P0(f, p0, g);
  b.project_P1(f, p1, g);
  b.project_Pc(f, pc, g);
  for (std::size_t n = 0; n < nn; n += 997) {
    CHECK(p0[n] + p1[n] == doctest::Approx(f[n]).epsilon(1e-14));
    CHECK(pd[n] + pc[n] == doctest::Approx(f[n]).epsilon(1e-14));
  }
}

TEST_CASE("global reference selection") {
  // theta == 1 everywhere -> theta* = 0.75.
  std::vector<FluidState> states(5, FluidState{1.0, {0, 0, 0}, 1.0});
  const GlobalReference r1 = select_global_reference(states);
  CHECK(r1.star.theta == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r1.star.rho == doctest::Approx(1.0));

  // theta in [0.9, 1.1]: band (0.55, 0.9), 0.75*0.9 = 0.675 inside.
  states = {FluidState{1.0, {0, 0, 0}, 0.9}, FluidState{1.0, {0, 0, 0}, 1.1}};
  const GlobalReference r2 = select_global_reference(states);
  CHECK(r2.star.theta == doctest::Approx(0.675).epsilon(1e-12));
  CHECK(r2.band_ok(0.9));
  CHECK(r2.band_ok(1.1));

  // theta in [0.5, 1.5]: band empty -> error.
  states = {FluidState{1.0, {0, 0, 0}, 0.5}, FluidState{1.0, {0, 0, 0}, 1.5}};
  CHECK_THROWS_AS((void)select_global_reference(states), PhysicsError);
}

TEST_CASE("weighted norms with 1/M* stay finite for sub-2theta* Gaussians") {
  const VelocityGrid g = VelocityGrid::make_cubic(32, 6.0, {0, 0, 0}, 1.0);
  std::vector<FluidState> states = {FluidState{1.0, {0, 0, 0}, 0.95},
                                    FluidState{1.1, {0.1, 0, 0}, 1.05}};
  const GlobalReference ref = select_global_reference(states);
  const std::vector<double> mstar = maxwellian(ref.star, g);
  // g bounded by a Maxwellian of temperature < 2 theta*.
  const FluidState probe{1.0, {0, 0, 0}, 1.9 * ref.star.theta};
  const std::vector<double> q = maxwellian(probe, g);
  CHECK(std::isfinite(inner_product(q, q, mstar, g)));
}
