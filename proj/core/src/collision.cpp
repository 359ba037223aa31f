#include "bvpb/collision.hpp"

#include <algorithm>
#include <cmath>

namespace bvpb {

void apply_L_M(std::span<const double> g, const ChiBasis& basis, const CollisionModel& model,
               const VelocityGrid& grid, std::span<double> out) {
  basis.project_P1(g, out, grid);
  const double nu = model.nu(basis.state().rho);
  for (auto& v : out) v = -nu * v;
}

void apply_N_M(std::span<const double> h, const ChiBasis& basis, const CollisionModel& model,
               const VelocityGrid& grid, std::span<double> out) {
  basis.project_Pc(h, out, grid);
  const double nu = model.nu(basis.state().rho);
  for (auto& v : out) v = -nu * v;
}

static void require_in_range(std::span<const double> g, std::span<const double> proj,
                             const ChiBasis& basis, const VelocityGrid& grid, const char* who) {
  // ||P g - g||_M <= 1e-8 ||g||_M, with the cell-Maxwellian weight.
  double num = 0.0, den = 0.0;
  const auto& w = grid.flat_weights();
  const auto& m = basis.m_field();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double d = proj[n] - g[n];
    num += d * d / m[n] * w[n];
    den += g[n] * g[n] / m[n] * w[n];
  }
  if (num > 1e-16 * std::max(den, 1e-300))
    throw NumericsError(std::string(who) + ": input not microscopic (projection violation)");
}

void invert_L_M(std::span<const double> g, const ChiBasis& basis, const CollisionModel& model,
                const VelocityGrid& grid, std::span<double> out) {
  basis.project_P1(g, out, grid);
  require_in_range(g, out, basis, grid, "invert_L_M");
  const double nu = model.nu(basis.state().rho);
  for (std::size_t n = 0; n < g.size(); ++n) out[n] = -g[n] / nu;
}

void invert_N_M(std::span<const double> h, const ChiBasis& basis, const CollisionModel& model,
                const VelocityGrid& grid, std::span<double> out) {
  basis.project_Pc(h, out, grid);
  require_in_range(h, out, basis, grid, "invert_N_M");
  const double nu = model.nu(basis.state().rho);
  for (std::size_t n = 0; n < h.size(); ++n) out[n] = -h[n] / nu;
}

// ---------------------------------------------------------------------------
// Discrete Maxwellian

namespace {

// Per-axis sums P_a(p) = sum_i w_i v_i^p exp(b v_i - c v_i^2), p = 0..4.
struct AxisSums {
  std::array<double, 5> p{};
};

AxisSums axis_sums(const VelocityAxis& ax, double b, double c) {
  AxisSums s;
  for (int i = 0; i < ax.count; ++i) {
    const double v = ax.nodes[i];
    const double e = ax.weights[i] * std::exp(b * v - c * v * v);
    double vp = e;
    for (int p = 0; p <= 4; ++p) {
      s.p[p] += vp;
      vp *= v;
    }
  }
  return s;
}

// Solve 5x5 linear system in place (partial pivoting).
void solve5(std::array<std::array<double, 5>, 5>& A, std::array<double, 5>& b) {
  for (int col = 0; col < 5; ++col) {
    int piv = col;
    for (int r = col + 1; r < 5; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-300) throw NumericsError("discrete Maxwellian: singular Jacobian");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 5; ++r) {
      const double f = A[r][col] / A[col][col];
      for (int c = col; c < 5; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 4; r >= 0; --r) {
    for (int c = r + 1; c < 5; ++c) b[r] -= A[r][c] * b[c];
    b[r] /= A[r][r];
  }
}

}  // namespace

DiscreteMaxwellian DiscreteMaxwellian::match(const RawMoments& target, const VelocityGrid& grid,
                                             double tol, int max_iter) {
  if (target.rho <= 0.0) throw PhysicsError("discrete Maxwellian: rho <= 0");
  // Analytic-parameter initial guess from the target's (rho, u, theta).
  FluidState s;
  s.rho = target.rho;
  for (int a = 0; a < 3; ++a) s.u[a] = target.mom[a] / target.rho;
  const double e = target.energy / target.rho - 0.5 * s.speed_sq();
  if (e <= 0.0) throw PhysicsError("discrete Maxwellian: negative temperature");
  s.theta = e;
  const double rt = kGasConstant * s.theta;

  DiscreteMaxwellian dm;
  auto& q = dm.params_;
  q[4] = 1.0 / (2.0 * rt);
  for (int a = 0; a < 3; ++a) q[1 + a] = s.u[a] / rt;
  q[0] = std::log(s.rho / std::pow(2.0 * M_PI * rt, 1.5)) - 0.5 * s.speed_sq() / rt;

  const double mscale = target.rho * std::sqrt(rt);
  const std::array<double, 5> scale = {target.rho, mscale, mscale, mscale,
                                       std::abs(target.energy) + target.rho * rt};

  for (int it = 0; it < max_iter; ++it) {
    const double ea = std::exp(q[0]);
    std::array<AxisSums, 3> P;
    for (int a = 0; a < 3; ++a) P[a] = axis_sums(grid.axis(a), q[1 + a], q[4]);
    auto mom = [&](int p0, int p1, int p2) { return ea * P[0].p[p0] * P[1].p[p1] * P[2].p[p2]; };

    const double m000 = mom(0, 0, 0);
    const double m100 = mom(1, 0, 0), m010 = mom(0, 1, 0), m001 = mom(0, 0, 1);
    const double m200 = mom(2, 0, 0), m020 = mom(0, 2, 0), m002 = mom(0, 0, 2);
    const double msq = m200 + m020 + m002;

    std::array<double, 5> r = {m000 - target.rho, m100 - target.mom[0], m010 - target.mom[1],
                               m001 - target.mom[2], 0.5 * msq - target.energy};
    double rmax = 0.0;
    for (int i = 0; i < 5; ++i) rmax = std::max(rmax, std::abs(r[i]) / scale[i]);
    dm.iters_ = it;
    if (rmax < tol) return dm;

    const double m110 = mom(1, 1, 0), m101 = mom(1, 0, 1), m011 = mom(0, 1, 1);
    const double m300 = mom(3, 0, 0), m030 = mom(0, 3, 0), m003 = mom(0, 0, 3);
    const double m120 = mom(1, 2, 0), m102 = mom(1, 0, 2);
    const double m210 = mom(2, 1, 0), m012 = mom(0, 1, 2);
    const double m201 = mom(2, 0, 1), m021 = mom(0, 2, 1);
    const double m400 = mom(4, 0, 0), m040 = mom(0, 4, 0), m004 = mom(0, 0, 4);
    const double m220 = mom(2, 2, 0), m202 = mom(2, 0, 2), m022 = mom(0, 2, 2);

    const double sq1 = m300 + m120 + m102;  // int v1 |v|^2
    const double sq2 = m210 + m030 + m012;
    const double sq3 = m201 + m021 + m003;
    const double sq4 = m400 + m040 + m004 + 2.0 * (m220 + m202 + m022);  // int |v|^4

    // d(moments)/d(a, b1, b2, b3, c); exponential family, so entries are
    // higher moments of the current iterate.
    std::array<std::array<double, 5>, 5> J = {{
        {m000, m100, m010, m001, -msq},
        {m100, m200, m110, m101, -sq1},
        {m010, m110, m020, m011, -sq2},
        {m001, m101, m011, m002, -sq3},
        {0.5 * msq, 0.5 * sq1, 0.5 * sq2, 0.5 * sq3, -0.5 * sq4},
    }};
    solve5(J, r);
    for (int i = 0; i < 5; ++i) q[i] -= r[i];
    if (!(q[4] > 0.0))
      throw NumericsError("discrete Maxwellian: Newton left the admissible cone (c <= 0)");
  }
  throw NumericsError("discrete Maxwellian: Newton did not converge");
}

void DiscreteMaxwellian::eval_into(std::span<double> out, const VelocityGrid& grid) const {
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  // Separable: exp(a) prod_a exp(b_a v - c v^2).
  std::array<std::vector<double>, 3> ax;
  for (int a = 0; a < 3; ++a) {
    const auto& axis = grid.axis(a);
    ax[a].resize(axis.count);
    for (int i = 0; i < axis.count; ++i) {
      const double v = axis.nodes[i];
      ax[a][i] = std::exp(params_[1 + a] * v - params_[4] * v * v);
    }
  }
  const double ea = std::exp(params_[0]);
  std::size_t n = 0;
  for (int i = 0; i < n1; ++i) {
    const double fi = ea * ax[0][i];
    for (int j = 0; j < n2; ++j) {
      const double fij = fi * ax[1][j];
      for (int k = 0; k < n3; ++k, ++n) out[n] = fij * ax[2][k];
    }
  }
}

std::vector<double> DiscreteMaxwellian::eval(const VelocityGrid& grid) const {
  std::vector<double> m(grid.node_count());
  eval_into(m, grid);
  return m;
}

FluidState relax_step_cell(std::span<double> f1, std::span<double> f2, const VelocityGrid& grid,
                           const CollisionModel& model, double dt) {
  if (dt <= 0.0) throw NumericsError("relax_step: dt must be > 0");
  const RawMoments m = raw_moments(f1, grid);
  FluidState s;
  s.rho = m.rho;
  for (int a = 0; a < 3; ++a) s.u[a] = m.mom[a] / m.rho;
  s.theta = m.energy / m.rho - 0.5 * s.speed_sq();
  if (model.nu0 == 0.0) return s;  // collisionless mode: relaxation is a no-op

  const DiscreteMaxwellian dm = DiscreteMaxwellian::match(m, grid);
  const double n2 = integrate_velocity(f2, grid);
  const double decay = std::exp(-model.nu(m.rho) * dt);
  const double blend = 1.0 - decay;
  const double c2 = n2 / m.rho;

  // Fused update; Mhat assembled on the fly from its separable factors.
  std::array<const VelocityAxis*, 3> axes = {&grid.axis(0), &grid.axis(1), &grid.axis(2)};
  std::array<std::vector<double>, 3> ax;
  for (int a = 0; a < 3; ++a) {
    ax[a].resize(axes[a]->count);
    for (int i = 0; i < axes[a]->count; ++i) {
      const double v = axes[a]->nodes[i];
      ax[a][i] = std::exp(dm.params()[1 + a] * v - dm.params()[4] * v * v);
    }
  }
  const double ea = std::exp(dm.params()[0]);
  std::size_t n = 0;
  for (int i = 0; i < axes[0]->count; ++i) {
    const double fi = ea * ax[0][i];
    for (int j = 0; j < axes[1]->count; ++j) {
      const double fij = fi * ax[1][j];
      for (int k = 0; k < axes[2]->count; ++k, ++n) {
        const double mh = fij * ax[2][k];
        f1[n] = decay * f1[n] + blend * mh;
        f2[n] = decay * f2[n] + blend * c2 * mh;
      }
    }
  }
  return s;
}

TransportCoefficients transport_coefficients(const FluidState& state, const VelocityGrid& grid,
                                             const CollisionModel& model) {
  state.require_valid("transport_coefficients");
  const ChiBasis basis = ChiBasis::build(state, grid);
  const auto& m = basis.m_field();
  const std::size_t nn = grid.node_count();
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  const double rt = kGasConstant * state.theta;

  // Shear basis Bhat_12 = c1 c2 M, heat basis Ahat_1 = c1 (|c|^2/(2Rtheta) - 5/2) M,
  // charge-diffusion basis c1 M.
  std::vector<double> bhat(nn), ahat(nn), chat(nn);
  std::size_t n = 0;
  for (int i = 0; i < n1; ++i) {
    const double c1 = grid.v1(i) - state.u[0];
    for (int j = 0; j < n2; ++j) {
      const double c2 = grid.v2(j) - state.u[1];
      for (int k = 0; k < n3; ++k, ++n) {
        const double c3 = grid.v3(k) - state.u[2];
        const double csq = c1 * c1 + c2 * c2 + c3 * c3;
        bhat[n] = c1 * c2 * m[n];
        ahat[n] = c1 * (csq / (2.0 * rt) - 2.5) * m[n];
        chat[n] = c1 * m[n];
      }
    }
  }

  std::vector<double> tmp(nn), inv(nn);
  TransportCoefficients tc;

  // mu = -(1/(R theta)) int v1 v2 L_M^{-1}[P1 Bhat_12] dv  (the shear part of
  // P1(v.grad M) carries Bhat/(R theta)).
  basis.project_P1(bhat, tmp, grid);
  invert_L_M(tmp, basis, model, grid, inv);
  n = 0;
  double acc = 0.0;
  const auto& w = grid.flat_weights();
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k, ++n) acc += grid.v1(i) * grid.v2(j) * inv[n] * w[n];
  tc.mu = -acc / rt;

  // kappa = -(1/theta) int (|v|^2/2) v1 L_M^{-1}[P1 Ahat_1] dv.
  basis.project_P1(ahat, tmp, grid);
  invert_L_M(tmp, basis, model, grid, inv);
  n = 0;
  acc = 0.0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k, ++n) {
        const double vsq = grid.v1(i) * grid.v1(i) + grid.v2(j) * grid.v2(j) +
                           grid.v3(k) * grid.v3(k);
        acc += 0.5 * vsq * grid.v1(i) * inv[n] * w[n];
      }
  tc.kappa = -acc / state.theta;

  // kappa1 = - int (v1-u1) N_M^{-1}[P_c (v1-u1) M] dv.
  basis.project_Pc(chat, tmp, grid);
  invert_N_M(tmp, basis, model, grid, inv);
  n = 0;
  acc = 0.0;
  for (int i = 0; i < n1; ++i) {
    const double c1 = grid.v1(i) - state.u[0];
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k, ++n) acc += c1 * inv[n] * w[n];
  }
  tc.kappa1 = -acc;
  return tc;
}

// ---------------------------------------------------------------------------
// Hard-sphere oracle

namespace {

// 26-point Lebedev-type octahedral rule on S^2 (degree-7 exactness),
// weights normalized to sum 1.
struct AngularRule {
  std::vector<std::array<double, 3>> nodes;
  std::vector<double> weights;  // include the 4*pi surface factor
};

const AngularRule& lebedev26() {
  static const AngularRule rule = [] {
    AngularRule r;
    const double a1 = 1.0 / 21.0, a2 = 4.0 / 105.0, a3 = 9.0 / 280.0;
    const double s2 = 1.0 / std::sqrt(2.0), s3 = 1.0 / std::sqrt(3.0);
    auto add = [&](double x, double y, double z, double w) {
      r.nodes.push_back({x, y, z});
      r.weights.push_back(w * 4.0 * M_PI);
    };
    for (int s = -1; s <= 1; s += 2) {
      add(s, 0, 0, a1);
      add(0, s, 0, a1);
      add(0, 0, s, a1);
    }
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sy = -1; sy <= 1; sy += 2) {
        add(sx * s2, sy * s2, 0, a2);
        add(sx * s2, 0, sy * s2, a2);
        add(0, sx * s2, sy * s2, a2);
      }
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sy = -1; sy <= 1; sy += 2)
        for (int sz = -1; sz <= 1; sz += 2) add(sx * s3, sy * s3, sz * s3, a3);
    return r;
  }();
  return rule;
}

// Triquadratic deposit stencil: 3 nodes per axis, exact for per-axis
// quadratics, so mass/momentum/energy deposits are exact.
struct Stencil {
  int base[3];          // first node index per axis
  double w[3][3];       // Lagrange weights per axis
  bool ok = false;
};

Stencil make_stencil(const std::array<double, 3>& p, const VelocityGrid& grid) {
  Stencil st;
  for (int a = 0; a < 3; ++a) {
    const auto& ax = grid.axis(a);
    if (p[a] < ax.nodes.front() || p[a] > ax.nodes.back()) return st;  // out of box
    int c = int(std::lround((p[a] - ax.nodes.front()) / ax.dv));
    c = std::clamp(c, 1, ax.count - 2);
    const double d = (p[a] - ax.nodes[c]) / ax.dv;
    st.base[a] = c - 1;
    st.w[a][0] = 0.5 * d * (d - 1.0);
    st.w[a][1] = 1.0 - d * d;
    st.w[a][2] = 0.5 * d * (d + 1.0);
  }
  st.ok = true;
  return st;
}

}  // namespace

std::vector<double> hard_sphere_q_oracle(std::span<const double> f, std::span<const double> g,
                                         const VelocityGrid& grid) {
  const std::size_t nn = grid.node_count();
  if (nn > 12 * 12 * 12)
    throw ConfigError("hard_sphere_q_oracle: grid larger than 12^3 refused (O(N^2) cost)");
  if (f.size() != nn || g.size() != nn) throw NumericsError("hard_sphere_q_oracle: size mismatch");

  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  std::vector<std::array<double, 3>> vel(nn);
  {
    std::size_t n = 0;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        for (int k = 0; k < n3; ++k, ++n) vel[n] = {grid.v1(i), grid.v2(j), grid.v3(k)};
  }
  const auto& w = grid.flat_weights();
  const auto& ang = lebedev26();

  std::vector<double> q(nn, 0.0);
  auto node_index = [&](const Stencil& st, int a, int b, int c) {
    return grid.index(st.base[0] + a, st.base[1] + b, st.base[2] + c);
  };

  for (std::size_t i = 0; i < nn; ++i) {
    if (f[i] == 0.0) continue;
    for (std::size_t j = 0; j < nn; ++j) {
      if (g[j] == 0.0) continue;
      const double rx = vel[i][0] - vel[j][0];
      const double ry = vel[i][1] - vel[j][1];
      const double rz = vel[i][2] - vel[j][2];
      if (rx == 0.0 && ry == 0.0 && rz == 0.0) continue;
      const double base_w = 0.25 * w[i] * w[j] * f[i] * g[j];
      for (std::size_t ka = 0; ka < ang.nodes.size(); ++ka) {
        const auto& om = ang.nodes[ka];
        const double s = rx * om[0] + ry * om[1] + rz * om[2];
        if (s == 0.0) continue;
        const std::array<double, 3> vp = {vel[i][0] - s * om[0], vel[i][1] - s * om[1],
                                          vel[i][2] - s * om[2]};
        const std::array<double, 3> vsp = {vel[j][0] + s * om[0], vel[j][1] + s * om[1],
                                           vel[j][2] + s * om[2]};
        const Stencil sp = make_stencil(vp, grid);
        if (!sp.ok) continue;
        // v*' stencil must also fit, so the (j,i) partner term survives too
        // and pair conservation is exact.
        if (!make_stencil(vsp, grid).ok) continue;
        const double W = base_w * std::abs(s) * ang.weights[ka];
        // Gain deposited at v', loss at node i.
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            const double wab = W * sp.w[0][a] * sp.w[1][b];
            for (int c = 0; c < 3; ++c) {
              const std::size_t tgt = node_index(sp, a, b, c);
              q[tgt] += wab * sp.w[2][c] / w[tgt];
            }
          }
        q[i] -= W / w[i];
      }
    }
  }
  return q;
}

std::vector<double> hard_sphere_L_M(std::span<const double> g, std::span<const double> m_field,
                                    const VelocityGrid& grid) {
  std::vector<double> out = hard_sphere_q_oracle(m_field, g, grid);
  const std::vector<double> qgm = hard_sphere_q_oracle(g, m_field, grid);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = 2.0 * (out[n] + qgm[n]);
  return out;
}

}  // namespace bvpb
