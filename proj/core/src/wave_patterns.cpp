#include "bvpb/wave_patterns.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace bvpb {

namespace {

struct Ode2 {
  double j, s, C1, C2;
  const CollisionModel* model;

  std::array<double, 2> rhs(double u, double th) const {
    const double rho = j / (u - s);
    const double p = kGasConstant * rho * th;
    const double A = j * u + p - C1;
    const double B = j * (th + 0.5 * u * u) + p * u - C2;
    const double up = 3.0 * A / (4.0 * model->mu_of_theta(th));
    const double thp = (B - u * A) / model->kappa_of_theta(th);
    return {up, thp};
  }

  std::array<double, 2> conserved_residual(double u, double th) const {
    const double rho = j / (u - s);
    const double p = kGasConstant * rho * th;
    return {j * u + p - C1, j * (th + 0.5 * u * u) + p * u - C2};
  }

  // Jacobian at an endpoint where A = B = 0.
  std::array<std::array<double, 2>, 2> endpoint_jacobian(double u, double th) const {
    const double rho = j / (u - s);
    const double p = kGasConstant * rho * th;
    const double dpdu = -p / (u - s);
    const double dpdth = kGasConstant * rho;
    const double Au = j + dpdu, Ath = dpdth;
    const double Bu = j * u + p + u * dpdu;
    const double Bth = j + u * dpdth;
    const double mu = model->mu_of_theta(th), ka = model->kappa_of_theta(th);
    return {{{3.0 * Au / (4.0 * mu), 3.0 * Ath / (4.0 * mu)},
             {(Bu - u * Au) / ka, (Bth - u * Ath) / ka}}};
  }

  // Rest point of the profile ODE nearest a given state: Newton on
  // (A, B) = 0 so the shooting target is consistent to machine precision
  // with the dynamics (the R-H polish alone leaves ~1e-12).
  FluidState rest_point(const FluidState& guess) const {
    double u = guess.u[0], th = guess.theta;
    for (int it = 0; it < 20; ++it) {
      const auto r = conserved_residual(u, th);
      if (std::abs(r[0]) + std::abs(r[1]) < 1e-15 * (1.0 + std::abs(C1) + std::abs(C2))) break;
      const double rho = j / (u - s);
      const double p = kGasConstant * rho * th;
      const double Au = j - p / (u - s), Ath = kGasConstant * rho;
      const double Bu = j * u + p - u * p / (u - s), Bth = j + u * kGasConstant * rho;
      const double det = Au * Bth - Ath * Bu;
      if (std::abs(det) < 1e-300) break;
      u -= (Bth * r[0] - Ath * r[1]) / det;
      th -= (-Bu * r[0] + Au * r[1]) / det;
    }
    FluidState out = guess;
    out.u[0] = u;
    out.theta = th;
    out.rho = j / (u - s);
    return out;
  }
};

struct Eig2 {
  double l1, l2;                 // eigenvalues, l1 <= l2
  std::array<double, 2> v1, v2;  // eigenvectors
};

Eig2 eigen2(const std::array<std::array<double, 2>, 2>& J) {
  const double tr = J[0][0] + J[1][1];
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) throw NumericsError("shock profile: complex endpoint eigenvalues");
  const double sq = std::sqrt(disc);
  Eig2 e;
  e.l1 = 0.5 * (tr - sq);
  e.l2 = 0.5 * (tr + sq);
  auto vec = [&](double lam) -> std::array<double, 2> {
    // (J - lam I) v = 0; pick the better-conditioned row.
    const double a = J[0][0] - lam, b = J[0][1];
    const double c = J[1][0], d = J[1][1] - lam;
    std::array<double, 2> v{};
    if (std::abs(a) + std::abs(b) > std::abs(c) + std::abs(d))
      v = {-b, a};
    else
      v = {-d, c};
    const double n = std::hypot(v[0], v[1]);
    if (n < 1e-300) return {1.0, 0.0};
    return {v[0] / n, v[1] / n};
  };
  e.v1 = vec(e.l1);
  e.v2 = vec(e.l2);
  return e;
}

// Dormand-Prince RK45 coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

}  // namespace

ShockProfile ShockProfile::solve(const ShockData& shock, const CollisionModel& model) {
  if (shock.strength <= 0.0) throw ConfigError("ShockProfile: degenerate (zero-strength) shock");
  if (!shock.lax_strict()) throw PhysicsError("ShockProfile: shock is not Lax-admissible");
  ShockProfile p;
  p.shock_ = shock;
  p.j_ = shock.mass_flux;

  const FluidState& L = shock.left;
  const FluidState& R = shock.right;
  Ode2 ode;
  ode.j = p.j_;
  ode.s = shock.speed;
  ode.C1 = p.j_ * L.u[0] + L.pressure();
  ode.C2 = p.j_ * (L.theta + 0.5 * L.u[0] * L.u[0]) + L.pressure() * L.u[0];
  ode.model = &model;

  // The subsonic (|u-s| < c) endpoint is the saddle; the supersonic one is
  // an unstable node. The heteroclinic is the unique orbit through the
  // saddle, so shoot from the saddle toward the node.
  const bool left_subsonic = std::abs(L.u[0] - shock.speed) < sound_speed(L.theta);
  p.saddle_on_left_ = left_subsonic;
  const FluidState saddle = ode.rest_point(left_subsonic ? L : R);
  const FluidState node = ode.rest_point(left_subsonic ? R : L);
  p.far_left_ = left_subsonic ? saddle : node;
  p.far_right_ = left_subsonic ? node : saddle;
  const double dir = left_subsonic ? 1.0 : -1.0;  // integration direction in xi

  const auto Js = ode.endpoint_jacobian(saddle.u[0], saddle.theta);
  Eig2 es = eigen2(Js);
  if (!(es.l1 * es.l2 < 0.0))
    throw NumericsError("shock profile: supersonic endpoint is not a saddle");
  // Unstable direction of the tau = dir*xi flow.
  const double lam_unstable = (dir > 0) ? es.l2 : es.l1;
  std::array<double, 2> vu = (dir > 0) ? es.v2 : es.v1;
  const std::array<double, 2> to_node = {node.u[0] - saddle.u[0], node.theta - saddle.theta};
  if (vu[0] * to_node[0] + vu[1] * to_node[1] < 0.0) {
    vu[0] = -vu[0];
    vu[1] = -vu[1];
  }

  const auto Jn = ode.endpoint_jacobian(node.u[0], node.theta);
  const Eig2 en = eigen2(Jn);
  const double node_slow = std::min(std::abs(en.l1), std::abs(en.l2));
  if (node_slow <= 0.0) throw NumericsError("shock profile: degenerate node");
  p.tail_rate_saddle_ = std::abs(lam_unstable);
  p.tail_rate_node_ = node_slow;

  const double scale = std::max({std::abs(to_node[0]), std::abs(to_node[1]), 1e-8});
  const double eps = 1e-6 * shock.strength;
  double u = saddle.u[0] + eps * vu[0];
  double th = saddle.theta + eps * vu[1];

  const double rtol = 1e-10, atol = 1e-13 * scale;
  const double hmax = 0.02 / std::max(p.tail_rate_saddle_, node_slow);
  const double tau_max = 80.0 / p.tail_rate_saddle_ + 80.0 / node_slow;

  std::vector<double> txs, tus, tths;
  double tau = 0.0, h = 1e-3 * hmax;
  txs.push_back(tau);
  tus.push_back(u);
  tths.push_back(th);

  auto f = [&](double uu, double tt) {
    auto r = ode.rhs(uu, tt);
    return std::array<double, 2>{dir * r[0], dir * r[1]};
  };

  bool reached = false;
  int accepted = 0;
  int stagnant = 0;
  while (tau < tau_max && accepted < 2000000) {
    h = std::min(h, hmax);
    const auto k1 = f(u, th);
    const auto k2 = f(u + h * kA21 * k1[0], th + h * kA21 * k1[1]);
    const auto k3 = f(u + h * (kA31 * k1[0] + kA32 * k2[0]), th + h * (kA31 * k1[1] + kA32 * k2[1]));
    const auto k4 = f(u + h * (kA41 * k1[0] + kA42 * k2[0] + kA43 * k3[0]),
                      th + h * (kA41 * k1[1] + kA42 * k2[1] + kA43 * k3[1]));
    const auto k5 = f(u + h * (kA51 * k1[0] + kA52 * k2[0] + kA53 * k3[0] + kA54 * k4[0]),
                      th + h * (kA51 * k1[1] + kA52 * k2[1] + kA53 * k3[1] + kA54 * k4[1]));
    const auto k6 =
        f(u + h * (kA61 * k1[0] + kA62 * k2[0] + kA63 * k3[0] + kA64 * k4[0] + kA65 * k5[0]),
          th + h * (kA61 * k1[1] + kA62 * k2[1] + kA63 * k3[1] + kA64 * k4[1] + kA65 * k5[1]));
    const double un = u + h * (kB1 * k1[0] + kB3 * k3[0] + kB4 * k4[0] + kB5 * k5[0] + kB6 * k6[0]);
    const double thn =
        th + h * (kB1 * k1[1] + kB3 * k3[1] + kB4 * k4[1] + kB5 * k5[1] + kB6 * k6[1]);
    const auto k7 = f(un, thn);
    const double eu = h * (kE1 * k1[0] + kE3 * k3[0] + kE4 * k4[0] + kE5 * k5[0] + kE6 * k6[0] +
                           kE7 * k7[0]);
    const double eth = h * (kE1 * k1[1] + kE3 * k3[1] + kE4 * k4[1] + kE5 * k5[1] + kE6 * k6[1] +
                            kE7 * k7[1]);
    const double tol_u = atol + rtol * std::max(std::abs(u), std::abs(un));
    const double tol_t = atol + rtol * std::max(std::abs(th), std::abs(thn));
    const double err = std::max(std::abs(eu) / tol_u, std::abs(eth) / tol_t);
    if (err <= 1.0) {
      tau += h;
      const double du_step = std::abs(un - u), dth_step = std::abs(thn - th);
      u = un;
      th = thn;
      txs.push_back(tau);
      tus.push_back(u);
      tths.push_back(th);
      ++accepted;
      // Stop once the orbit is inside the integrator's noise floor around
      // the rest point (the tail below this is closed by an exact snap).
      const double du = std::abs(u - node.u[0]), dth = std::abs(th - node.theta);
      if (du <= 1e-11 * (1.0 + std::abs(node.u[0])) && dth <= 1e-11 * (1.0 + node.theta)) {
        reached = true;
        break;
      }
      stagnant = (du_step <= 2e-14 * (1.0 + std::abs(u)) && dth_step <= 2e-14 * (1.0 + th))
                     ? stagnant + 1
                     : 0;
      if (stagnant > 40 && du <= 1e-9 && dth <= 1e-9) {
        reached = true;
        break;
      }
    }
    const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    h *= fac;
    if (h < 1e-14 * hmax) throw NumericsError("shock profile: step size underflow");
  }
  if (!reached) {
    const double du = std::abs(u - node.u[0]) / scale;
    throw NumericsError("shock profile: shooting did not reach the far field (residual " +
                        std::to_string(du) + ")");
  }
  // Close the node-side tail: snap the final sample onto the rest point
  // (the orbit is within the integrator noise floor of it).
  tus.back() = node.u[0];
  tths.back() = node.theta;

  // Convert to ascending xi with exact ODE slopes.
  const std::size_t n = txs.size();
  p.xi_.resize(n);
  p.u_.resize(n);
  p.th_.resize(n);
  p.up_.resize(n);
  p.thp_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = (dir > 0) ? i : (n - 1 - i);
    p.xi_[i] = dir * txs[src];
    p.u_[i] = tus[src];
    p.th_[i] = tths[src];
    const auto r = ode.rhs(p.u_[i], p.th_[i]);
    p.up_[i] = r[0];
    p.thp_[i] = r[1];
  }

  // Center the profile where lambda_i = s (the sonic point).
  const double sgn = (shock.family == 1) ? -1.0 : 1.0;
  auto lam = [&](std::size_t i) { return p.u_[i] + sgn * sound_speed(p.th_[i]); };
  double xi0 = 0.0;
  bool found = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = lam(i) - shock.speed, b = lam(i + 1) - shock.speed;
    if (a == 0.0 || a * b < 0.0) {
      const double t = (a == b) ? 0.0 : a / (a - b);
      xi0 = p.xi_[i] + t * (p.xi_[i + 1] - p.xi_[i]);
      found = true;
      break;
    }
  }
  if (!found) throw NumericsError("shock profile: no sonic point found (profile not transonic)");
  for (auto& x : p.xi_) x -= xi0;
  return p;
}

WaveSample ShockProfile::eval(double xi) const {
  const FluidState& L = far_left_;
  const FluidState& R = far_right_;
  WaveSample ws;
  auto fill = [&](double u, double th, double up, double thp) {
    const double rho = j_ / (u - shock_.speed);
    ws.rho = rho;
    ws.u1 = u;
    ws.theta = th;
    ws.u1_x = up;
    ws.theta_x = thp;
    ws.rho_x = -rho / (u - shock_.speed) * up;
  };

  if (xi <= xi_.front()) {
    if (saddle_on_left_) {
      // Exponential closure along the launch direction.
      const double e = std::exp(tail_rate_saddle_ * (xi - xi_.front()));
      const double du = (u_.front() - L.u[0]) * e;
      const double dth = (th_.front() - L.theta) * e;
      fill(L.u[0] + du, L.theta + dth, tail_rate_saddle_ * du, tail_rate_saddle_ * dth);
    } else {
      fill(L.u[0], L.theta, 0.0, 0.0);  // node side, clamped
    }
    return ws;
  }
  if (xi >= xi_.back()) {
    if (!saddle_on_left_) {
      const double e = std::exp(-tail_rate_saddle_ * (xi - xi_.back()));
      const double du = (u_.back() - R.u[0]) * e;
      const double dth = (th_.back() - R.theta) * e;
      fill(R.u[0] + du, R.theta + dth, -tail_rate_saddle_ * du, -tail_rate_saddle_ * dth);
    } else {
      fill(R.u[0], R.theta, 0.0, 0.0);
    }
    return ws;
  }

  const auto it = std::upper_bound(xi_.begin(), xi_.end(), xi);
  const std::size_t i1 = std::size_t(it - xi_.begin());
  const std::size_t i0 = i1 - 1;
  const double hseg = xi_[i1] - xi_[i0];
  const double t = (xi - xi_[i0]) / hseg;
  auto hermite = [&](double y0, double y1, double d0, double d1, double& val, double& der) {
    const double t2 = t * t, t3 = t2 * t;
    val = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * hseg * d0 +
          (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * hseg * d1;
    der = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * hseg * d0 + (-6 * t2 + 6 * t) * y1 +
           (3 * t2 - 2 * t) * hseg * d1) /
          hseg;
  };
  double u, up, th, thp;
  hermite(u_[i0], u_[i1], up_[i0], up_[i1], u, up);
  hermite(th_[i0], th_[i1], thp_[i0], thp_[i1], th, thp);
  fill(u, th, up, thp);
  return ws;
}

double ShockProfile::lambda_i(double xi) const {
  const WaveSample ws = eval(xi);
  const double sgn = (shock_.family == 1) ? -1.0 : 1.0;
  return ws.u1 + sgn * sound_speed(ws.theta);
}

DiffusionWave DiffusionWave::make(double alpha2, const FluidState& sharp,
                                  const CollisionModel& model) {
  sharp.require_valid("DiffusionWave");
  DiffusionWave d;
  d.alpha2 = alpha2;
  d.a = 3.0 * model.kappa_of_theta(sharp.theta) / (5.0 * sharp.rho);
  d.u1_sharp = sharp.u[0];
  return d;
}

double DiffusionWave::theta(double x, double t) const {
  if (t < 0.0) throw ConfigError("DiffusionWave: t must be >= 0");
  const double s = 4.0 * a * (1.0 + t);
  const double z = x - u1_sharp * t;
  return alpha2 / std::sqrt(M_PI * s) * std::exp(-z * z / s);
}

double DiffusionWave::theta_x(double x, double t) const {
  const double z = x - u1_sharp * t;
  return -2.0 * z / (4.0 * a * (1.0 + t)) * theta(x, t);
}

double DiffusionWave::theta_xx(double x, double t) const {
  const double s = 4.0 * a * (1.0 + t);
  const double z = x - u1_sharp * t;
  return (-2.0 / s + 4.0 * z * z / (s * s)) * theta(x, t);
}

double DiffusionWave::theta_t(double x, double t) const {
  // From the closed form directly.
  const double s = 4.0 * a * (1.0 + t);
  const double z = x - u1_sharp * t;
  const double th = theta(x, t);
  return th * (-0.5 * (4.0 * a) / s + z * z * (4.0 * a) / (s * s) + 2.0 * z * u1_sharp / s);
}

double DiffusionWave::heat_residual(double x, double t) const {
  return theta_t(x, t) + u1_sharp * theta_x(x, t) - a * theta_xx(x, t);
}

void WaveAnsatz::export_csv(const SpaceGrid& grid, const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("WaveAnsatz::export_csv: cannot open " + path);
  out << "x,rho,m1,E,u1,theta\n";
  char buf[256];
  for (int i = 0; i < grid.cells; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", grid.center(i),
                  rho[i], m1[i], E[i], u1[i], theta[i]);
    out << buf;
  }
}

static RarefactionMeta make_rarefaction_meta(const FluidState& left, const FluidState& right) {
  left.require_valid("rarefaction_ansatz");
  right.require_valid("rarefaction_ansatz");
  const auto ril = riemann_invariants(left, 3);
  const auto rir = riemann_invariants(right, 3);
  const double tol = 1e-10;
  if (std::abs(ril[1] - rir[1]) > tol * (1.0 + std::abs(ril[1])))
    throw ConfigError("rarefaction_ansatz: states not on one R3 curve (entropy mismatch: S- = " +
                      std::to_string(ril[1]) + ", S+ = " + std::to_string(rir[1]) + ")");
  if (std::abs(ril[0] - rir[0]) > tol * (1.0 + std::abs(ril[0])))
    throw ConfigError("rarefaction_ansatz: states not on one R3 curve (Sigma_3^(1) mismatch: " +
                      std::to_string(ril[0]) + " vs " + std::to_string(rir[0]) + ")");
  RarefactionMeta meta;
  meta.left = left;
  meta.right = right;
  meta.burgers.w_minus = euler_eigenvalues(left)[2];
  meta.burgers.w_plus = euler_eigenvalues(right)[2];
  if (!(meta.burgers.w_minus <= meta.burgers.w_plus))
    throw ConfigError("rarefaction_ansatz: lambda_3 not increasing (not an expansive 3-wave)");
  meta.sigma1 = ril[0];
  meta.entropy = ril[1];
  return meta;
}

WaveSample rarefaction_sample(const RarefactionMeta& meta, double x, double t) {
  const auto bw = meta.burgers.eval(x, 1.0 + t);
  const double c3 = 0.75 * (bw.w - meta.sigma1);  // c3 = sqrt(10 theta)
  WaveSample ws;
  ws.u1 = meta.sigma1 + c3;
  ws.theta = c3 * c3 / 10.0;
  const double c3l = std::sqrt(10.0 * meta.left.theta);
  ws.rho = meta.left.rho * (c3 / c3l) * (c3 / c3l) * (c3 / c3l);
  ws.u1_x = 0.75 * bw.wx;
  ws.theta_x = c3 / 5.0 * 0.75 * bw.wx;
  ws.rho_x = 3.0 * ws.rho / c3 * 0.75 * bw.wx;
  return ws;
}

WaveAnsatz rarefaction_ansatz(const FluidState& left, const FluidState& right,
                              const SpaceGrid& grid, double t) {
  WaveAnsatz wa;
  wa.kind = WaveKind::rarefaction;
  wa.time = t;
  wa.rarefaction = make_rarefaction_meta(left, right);
  const int n = grid.cells;
  wa.rho.resize(n);
  wa.m1.resize(n);
  wa.E.resize(n);
  wa.u1.resize(n);
  wa.theta.resize(n);
  wa.rho_x.resize(n);
  wa.u1_x.resize(n);
  wa.theta_x.resize(n);
  for (int i = 0; i < n; ++i) {
    const WaveSample ws = rarefaction_sample(*wa.rarefaction, grid.center(i), t);
    wa.rho[i] = ws.rho;
    wa.u1[i] = ws.u1;
    wa.theta[i] = ws.theta;
    wa.m1[i] = ws.m1();
    wa.E[i] = ws.E();
    wa.rho_x[i] = ws.rho_x;
    wa.u1_x[i] = ws.u1_x;
    wa.theta_x[i] = ws.theta_x;
  }
  return wa;
}

FluidState rarefaction_right_state(const FluidState& left, double delta) {
  left.require_valid("rarefaction_right_state");
  if (delta <= 0.0) throw ConfigError("rarefaction_right_state: delta must be > 0");
  const double c3l = std::sqrt(10.0 * left.theta);
  auto state_at = [&](double dw) {
    const double c3 = c3l + 0.75 * dw;
    FluidState r;
    r.u = {left.u[0] + 0.75 * dw, 0.0, 0.0};
    r.theta = c3 * c3 / 10.0;
    r.rho = left.rho * std::pow(c3 / c3l, 3.0);
    return r;
  };
  auto measure = [&](double dw) {
    const FluidState r = state_at(dw);
    return std::abs(r.rho - left.rho) + std::abs(r.u[0] - left.u[0]) +
           std::abs(r.theta - left.theta);
  };
  double lo = 0.0, hi = delta;
  while (measure(hi) < delta) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (measure(mid) < delta ? lo : hi) = mid;
    if (hi - lo < 1e-15 * hi) break;
  }
  return state_at(0.5 * (lo + hi));
}

std::array<double, 3> decompose_initial_mass(const std::array<double, 3>& excess,
                                             const ShockData& s1, const ShockData& s3,
                                             double u1_sharp) {
  const Conserved3 l1 = to_conserved(s1.left), r1c = to_conserved(s1.right);
  const Conserved3 l3 = to_conserved(s3.left), r3c = to_conserved(s3.right);
  const std::array<double, 3> r1 = {r1c.rho - l1.rho, r1c.m1 - l1.m1, r1c.E - l1.E};
  const std::array<double, 3> r2 = {1.0, u1_sharp, 0.5 * u1_sharp * u1_sharp};
  const std::array<double, 3> r3 = {r3c.rho - l3.rho, r3c.m1 - l3.m1, r3c.E - l3.E};

  auto norm = [](const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  };
  const double n1 = norm(r1), n2 = norm(r2), n3 = norm(r3);
  if (n1 < 1e-300 || n3 < 1e-300)
    throw NumericsError("decompose_initial_mass: zero-strength shock direction");
  // Conditioning of the normalized direction matrix.
  const double detn =
      (r1[0] * (r2[1] * r3[2] - r2[2] * r3[1]) - r2[0] * (r1[1] * r3[2] - r1[2] * r3[1]) +
       r3[0] * (r1[1] * r2[2] - r1[2] * r2[1])) /
      (n1 * n2 * n3);
  if (std::abs(detn) < 1e-10)
    throw NumericsError("decompose_initial_mass: directions nearly collinear (|det| = " +
                        std::to_string(std::abs(detn)) + ")");

  std::array<std::array<double, 3>, 3> A = {{{r1[0], r2[0], r3[0]},
                                             {r1[1], r2[1], r3[1]},
                                             {r1[2], r2[2], r3[2]}}};
  std::array<double, 3> b = excess;
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = A[r][col] / A[col][col];
      for (int c = col; c < 3; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    for (int c = r + 1; c < 3; ++c) b[r] -= A[r][c] * b[c];
    b[r] /= A[r][r];
  }
  // Residual guard.
  const std::array<double, 3> res = {
      r1[0] * b[0] + r2[0] * b[1] + r3[0] * b[2] - excess[0],
      r1[1] * b[0] + r2[1] * b[1] + r3[1] * b[2] - excess[1],
      r1[2] * b[0] + r2[2] * b[1] + r3[2] * b[2] - excess[2]};
  const double rmax = std::max({std::abs(res[0]), std::abs(res[1]), std::abs(res[2])});
  const double emax =
      std::max({std::abs(excess[0]), std::abs(excess[1]), std::abs(excess[2]), 1.0});
  if (rmax > 1e-12 * emax) throw NumericsError("decompose_initial_mass: linear solve residual");
  return b;
}

WaveAnsatz composite_ansatz(const TwoShockMeta& meta, const SpaceGrid& grid, double t) {
  WaveAnsatz wa;
  wa.kind = WaveKind::two_shock;
  wa.time = t;
  wa.two_shock = meta;
  const int n = grid.cells;
  wa.rho.resize(n);
  wa.m1.resize(n);
  wa.E.resize(n);
  wa.u1.resize(n);
  wa.theta.resize(n);
  wa.rho_x.resize(n);
  wa.u1_x.resize(n);
  wa.theta_x.resize(n);

  const Conserved3 sharp = to_conserved(meta.sharp);
  const double us = meta.sharp.u[0];
  const DiffusionWave& dw = meta.diffusion;

  for (int i = 0; i < n; ++i) {
    const double x = grid.center(i);
    const WaveSample p1 = meta.prof1->eval(x - meta.s1.speed * t + meta.s1.shift);
    const WaveSample p3 = meta.prof3->eval(x - meta.s3.speed * t + meta.s3.shift);
    const double Th = dw.theta(x, t), Thx = dw.theta_x(x, t), Thxx = dw.theta_xx(x, t);

    const double rho = p1.rho + p3.rho - sharp.rho + Th;
    const double m1 = p1.m1() + p3.m1() - sharp.m1 + us * Th - dw.a * Thx;
    const double E = p1.E() + p3.E() - sharp.E + 0.5 * us * us * Th - dw.a * us * Thx;
    wa.rho[i] = rho;
    wa.m1[i] = m1;
    wa.E[i] = E;
    wa.u1[i] = m1 / rho;
    wa.theta[i] = E / rho - 0.5 * wa.u1[i] * wa.u1[i];

    auto m1x_of = [](const WaveSample& w) { return w.rho_x * w.u1 + w.rho * w.u1_x; };
    auto Ex_of = [](const WaveSample& w) {
      return w.rho_x * (w.theta + 0.5 * w.u1 * w.u1) + w.rho * (w.theta_x + w.u1 * w.u1_x);
    };
    const double rho_x = p1.rho_x + p3.rho_x + Thx;
    const double m1_x = m1x_of(p1) + m1x_of(p3) + us * Thx - dw.a * Thxx;
    const double E_x = Ex_of(p1) + Ex_of(p3) + 0.5 * us * us * Thx - dw.a * us * Thxx;
    wa.rho_x[i] = rho_x;
    wa.u1_x[i] = (m1_x - wa.u1[i] * rho_x) / rho;
    wa.theta_x[i] =
        (E_x - rho_x * (wa.theta[i] + 0.5 * wa.u1[i] * wa.u1[i]) - rho * wa.u1[i] * wa.u1_x[i]) /
        rho;
  }
  return wa;
}

void correction_g_bar_cell(const WaveSample& bg, const ChiBasis& basis,
                           const CollisionModel& model, const VelocityGrid& grid,
                           std::span<double> out) {
  const std::size_t nn = grid.node_count();
  const auto& m = basis.m_field();
  const FluidState& st = basis.state();
  std::vector<double> w(nn);
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  std::size_t n = 0;
  for (int i = 0; i < n1; ++i) {
    const double v1 = grid.v1(i);
    const double c1 = v1 - st.u[0];
    for (int j = 0; j < n2; ++j) {
      const double c2 = grid.v2(j) - st.u[1];
      for (int k = 0; k < n3; ++k, ++n) {
        const double c3 = grid.v3(k) - st.u[2];
        const double csq = c1 * c1 + c2 * c2 + c3 * c3;
        w[n] = v1 * (csq / (2.0 * bg.theta) * bg.theta_x + v1 * bg.u1_x) * m[n];
      }
    }
  }
  std::vector<double> p1w(nn);
  basis.project_P1(w, p1w, grid);
  invert_L_M(p1w, basis, model, grid, out);
  const double c = 1.5 / bg.theta;
  for (auto& v : out) v *= c;
}

}  // namespace bvpb
