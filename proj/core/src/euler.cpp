#include "bvpb/euler.hpp"

#include <cmath>

#include "bvpb/errors.hpp"

namespace bvpb {

std::array<double, 3> euler_eigenvalues(const FluidState& s) {
  const double c = sound_speed(s.theta);
  return {s.u[0] - c, s.u[0], s.u[0] + c};
}

EulerEigenSystem eigen_system(const FluidState& state) {
  state.require_valid("eigen_system");
  EulerEigenSystem es;
  es.state = state;
  const double rho = state.rho, th = state.theta, u1 = state.u[0];
  const double sq = std::sqrt(10.0 * th);
  es.lambda = {u1 - sq / 3.0, u1, u1 + sq / 3.0};

  es.A1 = {{{u1, rho, 0.0},
            {2.0 * th / (3.0 * rho), u1, 2.0 / 3.0},
            {0.0, 2.0 / 3.0 * th, u1}}};

  es.L = {{{th, -0.5 * sq * rho, rho},
           {th, 0.0, -1.5 * rho},
           {th, 0.5 * sq * rho, rho}}};

  const double c13 = 3.0 / (10.0 * rho * th);
  const double c2 = 2.0 / (5.0 * rho * th);
  // R columns r_1, r_2, r_3.
  es.R = {{{c13 * rho, c2 * rho, c13 * rho},
           {-c13 * sq / 3.0, 0.0, c13 * sq / 3.0},
           {c13 * 2.0 / 3.0 * th, -c2 * th, c13 * 2.0 / 3.0 * th}}};
  return es;
}

std::array<double, 2> riemann_invariants(const FluidState& s, int family) {
  s.require_valid("riemann_invariants");
  if (family != 1 && family != 3) throw ConfigError("riemann_invariants: family must be 1 or 3");
  const double c3 = std::sqrt(10.0 * s.theta);  // = 3 * sound speed
  const double sign = (family == 1) ? 1.0 : -1.0;
  return {s.u[0] + sign * c3, s.entropy()};
}

std::array<double, 3> ShockData::rh_residuals() const {
  const Conserved3 l = to_conserved(left), r = to_conserved(right);
  const double pl = left.pressure(), pr = right.pressure();
  return {
      -speed * (r.rho - l.rho) + (r.m1 - l.m1),
      -speed * (r.m1 - l.m1) + (right.rho * right.u[0] * right.u[0] + pr -
                                left.rho * left.u[0] * left.u[0] - pl),
      -speed * (r.E - l.E) + (right.u[0] * (r.E + pr) - left.u[0] * (l.E + pl)),
  };
}

bool ShockData::lax_strict() const {
  const double ll = euler_eigenvalues(left)[family - 1];
  const double lr = euler_eigenvalues(right)[family - 1];
  return lr < speed && speed < ll;
}

namespace {

// Hugoniot point downstream of `up` at compression ratio rc in (1, 4);
// jsign = +1 for a 1-shock (flow crosses left to right), -1 for a 3-shock.
struct HugoniotPoint {
  FluidState down;
  double speed;
  double j;
};

HugoniotPoint hugoniot_downstream(const FluidState& up, double rc, double jsign) {
  const double pu = up.pressure();
  const double pd = pu * (4.0 * rc - 1.0) / (4.0 - rc);  // gamma = 5/3
  HugoniotPoint h;
  h.down.rho = rc * up.rho;
  h.down.theta = pd / (kGasConstant * h.down.rho);
  const double jj = std::sqrt((pd - pu) / (1.0 / up.rho - 1.0 / h.down.rho));
  h.j = jsign * jj;
  h.down.u = {up.u[0] - (pd - pu) / h.j, 0.0, 0.0};
  h.speed = up.u[0] - h.j / up.rho;
  return h;
}

double strength_measure(const FluidState& a, const FluidState& b) {
  const Conserved3 ca = to_conserved(a), cb = to_conserved(b);
  return std::abs(ca.rho - cb.rho) + std::abs(ca.m1 - cb.m1) + std::abs(ca.E - cb.E);
}

// Newton polish of (u_r, theta_r, s) on the exact R-H residuals at fixed rho_r.
void polish_rh(ShockData& sd) {
  for (int it = 0; it < 8; ++it) {
    const auto r = sd.rh_residuals();
    const double rmax = std::abs(r[0]) + std::abs(r[1]) + std::abs(r[2]);
    if (rmax < 1e-13 * (1.0 + std::abs(to_conserved(sd.left).E))) return;
    const double h = 1e-7;
    std::array<std::array<double, 3>, 3> J{};
    for (int c = 0; c < 3; ++c) {
      ShockData p = sd;
      if (c == 0) p.right.u[0] += h;
      if (c == 1) p.right.theta += h;
      if (c == 2) p.speed += h;
      const auto rp = p.rh_residuals();
      for (int i = 0; i < 3; ++i) J[i][c] = (rp[i] - r[i]) / h;
    }
    // 3x3 solve, partial pivoting.
    std::array<double, 3> b = r;
    std::array<std::array<double, 3>, 3> A = J;
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int rr = col + 1; rr < 3; ++rr)
        if (std::abs(A[rr][col]) > std::abs(A[piv][col])) piv = rr;
      std::swap(A[piv], A[col]);
      std::swap(b[piv], b[col]);
      for (int rr = col + 1; rr < 3; ++rr) {
        const double f = A[rr][col] / A[col][col];
        for (int cc = col; cc < 3; ++cc) A[rr][cc] -= f * A[col][cc];
        b[rr] -= f * b[col];
      }
    }
    for (int rr = 2; rr >= 0; --rr) {
      for (int cc = rr + 1; cc < 3; ++cc) b[rr] -= A[rr][cc] * b[cc];
      b[rr] /= A[rr][rr];
    }
    sd.right.u[0] -= b[0];
    sd.right.theta -= b[1];
    sd.speed -= b[2];
  }
}

ShockData connect_at_ratio(const FluidState& left, int family, double rc) {
  ShockData sd;
  sd.family = family;
  sd.left = left;
  if (family == 1) {
    // left is upstream; downstream (#) sits on the right.
    const HugoniotPoint h = hugoniot_downstream(left, rc, +1.0);
    sd.right = h.down;
    sd.speed = h.speed;
    sd.mass_flux = h.j;
  } else {
    // left is downstream (#); the upstream state sits on the right.
    // Build it as "downstream of right at ratio rc" inverted: treat the
    // unknown upstream as `up` with rho_up = rho_left / rc.
    FluidState up;
    up.rho = left.rho / rc;
    const double pl = left.pressure();
    const double pu = pl * (4.0 - rc) / (4.0 * rc - 1.0);
    up.theta = pu / (kGasConstant * up.rho);
    const double jj = std::sqrt((pl - pu) / (1.0 / up.rho - 1.0 / left.rho));
    const double j = -jj;  // 3-shock: flow crosses right to left
    // R-H momentum across the wave: u_up = u_down + (p_down - p_up)/j.
    up.u = {left.u[0] + (pl - pu) / j, 0.0, 0.0};
    sd.right = up;
    sd.speed = up.u[0] - j / up.rho;
    sd.mass_flux = j;
  }
  polish_rh(sd);
  sd.strength = strength_measure(sd.left, sd.right);
  return sd;
}

}  // namespace

ShockData hugoniot_connect(const FluidState& left, int family, double strength) {
  left.require_valid("hugoniot_connect");
  if (family != 1 && family != 3) throw ConfigError("hugoniot_connect: family must be 1 or 3");
  if (strength < 0.0) throw ConfigError("hugoniot_connect: strength must be >= 0");
  if (strength == 0.0) {
    ShockData sd;
    sd.family = family;
    sd.left = sd.right = left;
    sd.speed = euler_eigenvalues(left)[family - 1];
    sd.mass_flux = left.rho * (left.u[0] - sd.speed);
    return sd;
  }
  // Monotone 1D solve for the compression ratio matching the requested
  // strength measure.
  double lo = 1.0, hi = 1.5;
  auto measure = [&](double rc) { return connect_at_ratio(left, family, rc).strength; };
  while (measure(hi) < strength) {
    hi = 1.0 + 2.0 * (hi - 1.0);
    if (hi > 3.95) {
      hi = 3.95;
      if (measure(hi) < strength)
        throw ConfigError("hugoniot_connect: requested strength beyond the gamma=5/3 "
                          "compression limit");
      break;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (measure(mid) < strength)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * hi) break;
  }
  ShockData sd = connect_at_ratio(left, family, 0.5 * (lo + hi));
  if (!sd.lax_strict())
    throw PhysicsError("hugoniot_connect: Lax entropy conditions violated (inadmissible shock)");
  return sd;
}

BurgersExact::Value BurgersExact::eval(double x, double t) const {
  if (!(w_minus <= w_plus)) throw ConfigError("BurgersExact: requires w- <= w+ (rarefaction)");
  if (t < 0.0) throw ConfigError("BurgersExact: t must be >= 0");
  if (w_minus == w_plus) {
    Value v;
    v.w = w_minus;
    v.x0 = x - w_minus * t;
    return v;  // degenerate: constant data stays constant
  }
  const double wm = 0.5 * (w_plus + w_minus), wd = 0.5 * (w_plus - w_minus);
  auto w0 = [&](double y) { return wm + wd * std::tanh(y); };
  auto w0p = [&](double y) {
    const double c = std::cosh(y);
    // tanh' = sech^2; guard overflow far in the tails.
    return (std::abs(y) > 350.0) ? 0.0 : wd / (c * c);
  };

  // x0 + w0(x0) t = x is strictly increasing in x0; Newton with bisection
  // safeguard on the bracket [x - w+ t, x - w- t].
  double a = x - w_plus * t, b = x - w_minus * t;
  double x0 = x - wm * t;
  double f_prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 300; ++it) {
    const double f = x0 + w0(x0) * t - x;
    if (std::abs(f) <= 1e-13 * (1.0 + std::abs(x) + std::abs(t))) break;
    if (f > 0.0)
      b = x0;
    else
      a = x0;
    const double fp = 1.0 + w0p(x0) * t;
    double next = x0 - f / fp;
    // Newton can cycle across the stiff core; fall back to bisection unless
    // |f| at least halved since the last iterate.
    if (!(next > a && next < b) || std::abs(f) > 0.5 * f_prev) next = 0.5 * (a + b);
    f_prev = std::abs(f);
    if (next == x0) break;
    x0 = next;
  }
  const double f = x0 + w0(x0) * t - x;
  if (std::abs(f) > 1e-10 * (1.0 + std::abs(x) + std::abs(t)))
    throw NumericsError("BurgersExact: characteristic solve did not converge");

  Value v;
  v.x0 = x0;
  v.w = w0(x0);
  const double dx0 = 1.0 / (1.0 + w0p(x0) * t);
  v.wx = w0p(x0) * dx0;
  const double th = std::tanh(x0);
  const double w0pp = -2.0 * w0p(x0) * th;  // d/dy (wd sech^2 y)
  v.wxx = w0pp * dx0 * dx0 * dx0;
  return v;
}

}  // namespace bvpb
