#include "bvpb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bvpb {

void SolverConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("SolverConfig: CFL must be in (0, 1]");
  if (!(t_end > 0.0)) throw ConfigError("SolverConfig: end time must be > 0");
  if (nu0 < 0.0) throw ConfigError("SolverConfig: nu0 must be >= 0");
  if (snapshot_every < 1) throw ConfigError("SolverConfig: snapshot_every must be >= 1");
}

KineticSolver::KineticSolver(SpaceGrid space, VelocityGrid velocity, CollisionModel model,
                             SolverConfig config)
    : space_(space), vel_(std::move(velocity)), model_(model), cfg_(config) {
  cfg_.validate();
  const int n1 = vel_.axis(0).count, n2 = vel_.axis(1).count, n3 = vel_.axis(2).count;
  v1_flat_.resize(vel_.node_count());
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k) v1_flat_[vel_.index(i, j, k)] = vel_.v1(i);
  zero_block_.assign(vel_.node_count(), 0.0);
  scratch_ = Tensor4(space_.cells, n1, n2, n3);
}

const double* KineticSolver::row(const Tensor4& t, const SimulationState& s, bool is_f1,
                                 int x) const {
  const int n = space_.cells;
  if (x >= 0 && x < n) return t.cell(x);
  if (cfg_.boundary == BoundaryMode::periodic) return t.cell((x % n + n) % n);
  if (!is_f1) return zero_block_.data();  // F2 ghost = 0
  return (x < 0) ? s.ghost_left_f1.data() : s.ghost_right_f1.data();
}

namespace {

inline double minmod(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::min(a, b);
  if (a < 0.0 && b < 0.0) return std::max(a, b);
  return 0.0;
}

}  // namespace

namespace {

struct FaceFluxMoments {
  double mass_l = 0, mom_l = 0, en_l = 0;
  double mass_r = 0, mom_r = 0, en_r = 0;
};

}  // namespace

void KineticSolver::transport_half(SimulationState& s, double dt, bool collect_moments) const {
  const int nx = space_.cells;
  const std::size_t bs = vel_.node_count();
  const double lam = dt / space_.dx;
  const bool second_order = cfg_.reconstruction == Reconstruction::minmod;
  const double* v1 = v1_flat_.data();

  for (int pass = 0; pass < 2; ++pass) {
    const bool is_f1 = pass == 0;
    Tensor4& cur = is_f1 ? s.field.f1 : s.field.f2;

    // Face flux at x+1/2 for node n, from rows x-1..x+2 (slopes vanish if
    // first order). Ghost rows are constant, so their slopes are zero.
    auto face_flux = [&](std::size_t n, const double* rm1, const double* r0, const double* rp1,
                         const double* rp2) -> double {
      const double v = v1[n];
      if (v > 0.0) {
        double q = r0[n];
        if (second_order) q += 0.5 * minmod(r0[n] - rm1[n], rp1[n] - r0[n]);
        return v * q;
      }
      double q = rp1[n];
      if (second_order) q -= 0.5 * minmod(rp1[n] - r0[n], rp2[n] - rp1[n]);
      return v * q;
    };

    // One forward-Euler flux sweep src -> dst (dst may alias a combine).
    auto sweep = [&](const Tensor4& src, Tensor4& dst) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int x = 0; x < nx; ++x) {
        const double* rm2 = row(src, s, is_f1, x - 2);
        const double* rm1 = row(src, s, is_f1, x - 1);
        const double* r0 = row(src, s, is_f1, x);
        const double* rp1 = row(src, s, is_f1, x + 1);
        const double* rp2 = row(src, s, is_f1, x + 2);
        double* out = dst.cell(x);
        for (std::size_t n = 0; n < bs; ++n) {
          const double fr = face_flux(n, rm1, r0, rp1, rp2);
          const double fl = face_flux(n, rm2, rm1, r0, rp1);
          out[n] = r0[n] - lam * (fr - fl);
        }
      }
    };

    // Boundary-face moment fluxes for the conservation audit (the scheme
    // telescopes, so totals(t) - totals(0) + outflow vanishes).
    auto boundary_moments = [&](const Tensor4& src) {
      const double* rm2 = row(src, s, is_f1, -2);
      const double* rm1 = row(src, s, is_f1, -1);
      const double* r0 = row(src, s, is_f1, 0);
      const double* rp1 = row(src, s, is_f1, 1);
      const double* rnm2 = row(src, s, is_f1, nx - 2);
      const double* rnm1 = row(src, s, is_f1, nx - 1);
      const double* rn = row(src, s, is_f1, nx);
      const double* rnp1 = row(src, s, is_f1, nx + 1);
      FaceFluxMoments fm;
      const auto& w = vel_.flat_weights();
      const int nv1 = vel_.axis(0).count, nv2 = vel_.axis(1).count, nv3 = vel_.axis(2).count;
      std::size_t n = 0;
      for (int i = 0; i < nv1; ++i)
        for (int j = 0; j < nv2; ++j)
          for (int k = 0; k < nv3; ++k, ++n) {
            const double fl = face_flux(n, rm2, rm1, r0, rp1) * w[n];
            const double fr = face_flux(n, rnm2, rnm1, rn, rnp1) * w[n];
            const double vsq = vel_.v1(i) * vel_.v1(i) + vel_.v2(j) * vel_.v2(j) +
                               vel_.v3(k) * vel_.v3(k);
            fm.mass_l += fl;
            fm.mass_r += fr;
            fm.mom_l += fl * vel_.v1(i);
            fm.mom_r += fr * vel_.v1(i);
            fm.en_l += fl * 0.5 * vsq;
            fm.en_r += fr * 0.5 * vsq;
          }
      return fm;
    };

    FaceFluxMoments fm = boundary_moments(cur);
    sweep(cur, scratch_);
    if (second_order) {
      // SSP-RK2 (Heun): the limited flux with a single Euler stage would cap
      // the time accuracy at first order.
      const FaceFluxMoments fm2 = boundary_moments(scratch_);
      fm.mass_l = 0.5 * (fm.mass_l + fm2.mass_l);
      fm.mass_r = 0.5 * (fm.mass_r + fm2.mass_r);
      fm.mom_l = 0.5 * (fm.mom_l + fm2.mom_l);
      fm.mom_r = 0.5 * (fm.mom_r + fm2.mom_r);
      fm.en_l = 0.5 * (fm.en_l + fm2.en_l);
      fm.en_r = 0.5 * (fm.en_r + fm2.en_r);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int x = 0; x < nx; ++x) {
        const double* rm2 = row(scratch_, s, is_f1, x - 2);
        const double* rm1 = row(scratch_, s, is_f1, x - 1);
        const double* r0 = row(scratch_, s, is_f1, x);
        const double* rp1 = row(scratch_, s, is_f1, x + 1);
        const double* rp2 = row(scratch_, s, is_f1, x + 2);
        double* out = cur.cell(x);  // combine in place: needs only row x of cur
        for (std::size_t n = 0; n < bs; ++n) {
          const double fr = face_flux(n, rm1, r0, rp1, rp2);
          const double fl = face_flux(n, rm2, rm1, r0, rp1);
          out[n] = 0.5 * (out[n] + r0[n] - lam * (fr - fl));
        }
      }
    } else {
      std::swap(cur, scratch_);
    }

    if (is_f1) {
      s.outflow.mass += dt * (fm.mass_r - fm.mass_l);
      s.outflow.mom1 += dt * (fm.mom_r - fm.mom_l);
      s.outflow.energy += dt * (fm.en_r - fm.en_l);
    } else {
      s.outflow.n2 += dt * (fm.mass_r - fm.mass_l);
    }

    if (collect_moments) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int x = 0; x < nx; ++x) {
        if (is_f1) {
          const RawMoments m = raw_moments(cur.cell_span(x), vel_);
          FluidState st;
          st.rho = m.rho;
          for (int a = 0; a < 3; ++a) st.u[a] = m.mom[a] / m.rho;
          st.theta = m.energy / m.rho - 0.5 * st.speed_sq();
          s.cell_states[x] = st;
        } else {
          s.n2[x] = integrate_velocity(cur.cell_span(x), vel_);
        }
      }
    } else if (!is_f1) {
      // n2 must stay fresh for the field solve that follows.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int x = 0; x < nx; ++x) s.n2[x] = integrate_velocity(cur.cell_span(x), vel_);
    }
  }
}

void KineticSolver::advect_v1(SimulationState& s, double dt) const {
  // Skip when the advection would move the distribution by less than a
  // round-off's worth of a node spacing.
  if (s.efield.max_abs() * dt < 1e-15 * vel_.axis(0).dv) return;
  const int nx = space_.cells;
  const int n1 = vel_.axis(0).count;
  const std::size_t plane = std::size_t(vel_.axis(1).count) * vel_.axis(2).count;

#ifdef _OPENMP
  const int nthreads = omp_get_max_threads();
#else
  const int nthreads = 1;
#endif
  std::vector<std::vector<double>> scratch_a(nthreads), scratch_b(nthreads),
      gflux_scratch(nthreads);
  std::vector<double> clipped(nx, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int x = 0; x < nx; ++x) {
    const double speed = s.efield.pi_x[x];
    if (speed == 0.0) continue;
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    auto& fa = scratch_a[tid];
    auto& fb = scratch_b[tid];
    fa.resize(plane * n1);
    fb.resize(plane * n1);
    double* f1 = s.field.f1.cell(x);
    double* f2 = s.field.f2.cell(x);
    const std::size_t bs = plane * n1;
    // Species split: F_A = F1 + F2 advects at +Pi_x, F_B = F1 - F2 at -Pi_x.
    for (std::size_t n = 0; n < bs; ++n) {
      fa[n] = f1[n] + f2[n];
      fb[n] = f1[n] - f2[n];
    }
    // Conservative MUSCL-minmod advection along v1 in mass form: node masses
    // F_i w1_i are updated by face fluxes so the trapezoid end weights do
    // not leak mass, and the second-order face values remove the O(dv1)
    // species-correlated heating bias of plain upwinding. The fluxes through
    // the box ends are clipped (conservation repair confined to the
    // outermost node, logged).
    auto& gflux = gflux_scratch[tid];
    gflux.resize(plane * std::size_t(n1 + 1));
    const auto& w1 = vel_.axis(0).weights;
    // The advection courant in v1 is tiny (field-limited dt), so the central
    // flux is used: it carries no dissipation acting on the bulk Maxwellian,
    // whose spurious heating would otherwise swamp the conservation budget.
    // A limited upwind flux takes over if the courant ever grows.
    const bool central = std::abs(speed) * dt <= 0.1 * vel_.axis(0).dv;
    auto advect = [&](double* f, double a) {
      double* G = gflux.data();
      for (std::size_t p = 0; p < plane; ++p) G[p] = 0.0;  // clipped bottom face
      for (int face = 1; face <= n1 - 1; ++face) {
        double* Gf = G + std::size_t(face) * plane;
        const double* fm = f + std::size_t(face - 2) * plane;  // valid if face >= 2
        const double* f0 = f + std::size_t(face - 1) * plane;
        const double* f1p = f + std::size_t(face) * plane;
        const double* f2p = f + std::size_t(face + 1) * plane;  // valid if face <= n1-2
        if (central) {
          for (std::size_t p = 0; p < plane; ++p) Gf[p] = 0.5 * a * (f0[p] + f1p[p]);
        } else if (a > 0.0) {
          for (std::size_t p = 0; p < plane; ++p) {
            const double dl = (face >= 2) ? f0[p] - fm[p] : 0.0;
            const double dr = f1p[p] - f0[p];
            Gf[p] = a * (f0[p] + 0.5 * minmod(dl, dr));
          }
        } else {
          for (std::size_t p = 0; p < plane; ++p) {
            const double dl = f1p[p] - f0[p];
            const double dr = (face <= n1 - 2) ? f2p[p] - f1p[p] : 0.0;
            Gf[p] = a * (f1p[p] - 0.5 * minmod(dl, dr));
          }
        }
      }
      double* Gtop = G + std::size_t(n1) * plane;
      for (std::size_t p = 0; p < plane; ++p) Gtop[p] = 0.0;  // clipped top face
      // Log the suppressed outflow at whichever end the flow leaves.
      {
        const double* fedge = (a > 0.0) ? f + std::size_t(n1 - 1) * plane : f;
        double edge = 0.0;
        for (std::size_t p = 0; p < plane; ++p) edge += std::abs(fedge[p]);
        clipped[x] += std::abs(a) * dt * edge;
      }
      for (int i = 0; i < n1; ++i) {
        double* fi = f + std::size_t(i) * plane;
        const double* Gm = G + std::size_t(i) * plane;
        const double* Gp = G + std::size_t(i + 1) * plane;
        const double r = dt / w1[i];
        for (std::size_t p = 0; p < plane; ++p) fi[p] -= r * (Gp[p] - Gm[p]);
      }
    };
    // Species split advects F_A at +Pi_x and F_B at -Pi_x.
    advect(fa.data(), speed);
    advect(fb.data(), -speed);
    for (std::size_t n = 0; n < bs; ++n) {
      f1[n] = 0.5 * (fa[n] + fb[n]);
      f2[n] = 0.5 * (fa[n] - fb[n]);
    }
  }
  double total_clip = 0.0;
  for (double v : clipped) total_clip += v;
  s.clipped_v1_flux += total_clip;
}

void KineticSolver::collide(SimulationState& s, double dt) const {
  if (model_.nu0 == 0.0) return;
  const int nx = space_.cells;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int x = 0; x < nx; ++x) {
    s.cell_states[x] =
        relax_step_cell(s.field.f1.cell_span(x), s.field.f2.cell_span(x), vel_, model_, dt);
  }
}

void KineticSolver::refresh_field(SimulationState& s) const {
  s.efield = (cfg_.boundary == BoundaryMode::periodic) ? solve_field_periodic(s.n2, space_)
                                                       : solve_field(s.n2, space_);
}

void KineticSolver::refresh_moment_cache(SimulationState& s) const {
  const int nx = space_.cells;
  s.cell_states.resize(nx);
  s.n2.resize(nx);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int x = 0; x < nx; ++x) {
    s.cell_states[x] = moments(s.field.f1.cell_span(x), vel_);
    s.n2[x] = n2_density(s.field.f2.cell_span(x), vel_);
  }
}

double KineticSolver::propose_dt(const SimulationState& s) const {
  double dt = cfg_.cfl * space_.dx / vel_.max_speed1();
  const double pmax = s.efield.max_abs();
  if (pmax > 0.0) dt = std::min(dt, cfg_.cfl * 0.5 * vel_.axis(0).dv / pmax);
  if (model_.nu0 > 0.0) {
    double rho_max = 0.0;
    for (const auto& st : s.cell_states) rho_max = std::max(rho_max, st.rho);
    dt = std::min(dt, cfg_.cfl / (model_.nu0 * rho_max));
  }
  return dt;
}

double KineticSolver::step(SimulationState& s, double dt_cap) const {
  const double dt = std::min(propose_dt(s), dt_cap);
  if (!(dt > 0.0)) throw NumericsError("step: nonpositive dt");

  transport_half(s, 0.5 * dt, false);
  refresh_field(s);
  advect_v1(s, 0.5 * dt);
  collide(s, dt);
  advect_v1(s, 0.5 * dt);
  transport_half(s, 0.5 * dt, true);
  refresh_field(s);

  // Field boundary work for the momentum/energy audit.
  const double pr = s.efield.pi_x.back(), pl = s.efield.pi_x.front();
  s.outflow.field_work += dt * 0.25 * (pr * pr - pl * pl);

  s.field.time += dt;
  s.dt_last = dt;
  s.step += 1;

  double mass = 0.0;
  for (const auto& st : s.cell_states) mass += st.rho;
  if (!std::isfinite(mass))
    throw NumericsError("step: NaN detected in cell moments at t = " +
                        std::to_string(s.field.time));
  return dt;
}

ConservationTotals KineticSolver::totals(const SimulationState& s) const {
  ConservationTotals t;
  for (int x = 0; x < space_.cells; ++x) {
    const RawMoments m = raw_moments(s.field.f1.cell_span(x), vel_);
    t.mass += m.rho;
    t.mom1 += m.mom[0];
    t.energy_kinetic += m.energy;
    t.n2 += s.n2[x];
  }
  t.mass *= space_.dx;
  t.mom1 *= space_.dx;
  t.energy_kinetic *= space_.dx;
  t.n2 *= space_.dx;
  t.energy_field = s.efield.energy(space_);
  return t;
}

SimulationState KineticSolver::initialize(const WaveAnsatz& ansatz,
                                          const PerturbationSpec& pert) const {
  const int nx = space_.cells;
  if (int(ansatz.rho.size()) != nx) throw ConfigError("initialize: ansatz/grid size mismatch");
  SimulationState s;
  s.field.f1 = Tensor4(nx, vel_.axis(0).count, vel_.axis(1).count, vel_.axis(2).count);
  s.field.f2 = Tensor4(nx, vel_.axis(0).count, vel_.axis(1).count, vel_.axis(2).count);
  s.field.time = 0.0;
  s.cell_states.resize(nx);
  s.n2.assign(nx, 0.0);

  auto gaussian = [](double x, double c, double w) {
    const double z = (x - c) / w;
    return std::exp(-0.5 * z * z);
  };

  std::vector<double> n2_seed(nx, 0.0);
  if (pert.f2_amplitude != 0.0) {
    for (int x = 0; x < nx; ++x)
      n2_seed[x] = pert.f2_amplitude * gaussian(space_.center(x), pert.f2_center, pert.f2_width);
    if (pert.f2_zero_mean) {
      double mean = 0.0;
      for (double v : n2_seed) mean += v;
      mean /= nx;
      for (auto& v : n2_seed) v -= mean;
    }
  }

  // Target states validated up front (exceptions must not cross the
  // parallel region below).
  std::vector<FluidState> targets(nx);
  for (int x = 0; x < nx; ++x) {
    FluidState st = ansatz.state(x);
    const double g = pert.amplitude == 0.0
                         ? 0.0
                         : pert.amplitude * gaussian(space_.center(x), pert.center, pert.width);
    if (g != 0.0) {
      if (pert.in_rho) st.rho *= 1.0 + g;
      if (pert.in_theta) st.theta *= 1.0 + g;
      if (pert.in_u1) st.u[0] += g;
    }
    if (!(st.rho > 0.0 && st.theta > 0.0))
      throw PhysicsError("initialize: perturbation pushes the state out of the physical regime");
    targets[x] = st;
  }

  bool failed = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int x = 0; x < nx; ++x) {
    if (failed) continue;
    const FluidState& st = targets[x];
    RawMoments target;
    target.rho = st.rho;
    for (int a = 0; a < 3; ++a) target.mom[a] = st.rho * st.u[a];
    target.energy = st.rho * (st.theta + 0.5 * st.speed_sq());
    try {
      const DiscreteMaxwellian dm = DiscreteMaxwellian::match(target, vel_);
      auto f1 = s.field.f1.cell_span(x);
      dm.eval_into(f1, vel_);

      const bool micro_seed = pert.chapman_enskog_lift || pert.micro_noise != 0.0;
      if (micro_seed) {
        const ChiBasis basis = ChiBasis::build(st, f1, vel_);
        if (pert.chapman_enskog_lift) {
          std::vector<double> gbar(vel_.node_count());
          correction_g_bar_cell(ansatz.sample(x), basis, model_, vel_, gbar);
          for (std::size_t n = 0; n < f1.size(); ++n) f1[n] += gbar[n];
        }
        if (pert.micro_noise != 0.0) {
          std::mt19937_64 rng(pert.seed * 1000003ULL + std::uint64_t(x));
          std::uniform_real_distribution<double> uni(-1.0, 1.0);
          std::vector<double> noise(vel_.node_count()), micro(vel_.node_count());
          for (std::size_t n = 0; n < noise.size(); ++n)
            noise[n] = pert.micro_noise * uni(rng) * f1[n];
          basis.project_P1(noise, micro, vel_);
          for (std::size_t n = 0; n < f1.size(); ++n) f1[n] += micro[n];
        }
      }

      if (n2_seed[x] != 0.0) {
        auto f2 = s.field.f2.cell_span(x);
        const double c = n2_seed[x] / st.rho;
        std::vector<double> mh(vel_.node_count());
        dm.eval_into(mh, vel_);
        for (std::size_t n = 0; n < f2.size(); ++n) f2[n] = c * mh[n];
      }
      s.cell_states[x] = st;
      s.n2[x] = n2_density(s.field.f2.cell_span(x), vel_);
    } catch (...) {
      failed = true;
    }
  }
  if (failed)
    throw NumericsError("initialize: discrete Maxwellian construction failed "
                        "(velocity grid too coarse or state out of range)");

  // Ghost rows pinned to the unperturbed far-field states of the ansatz.
  auto make_ghost = [&](const FluidState& st) {
    RawMoments t;
    t.rho = st.rho;
    for (int a = 0; a < 3; ++a) t.mom[a] = st.rho * st.u[a];
    t.energy = st.rho * (st.theta + 0.5 * st.speed_sq());
    std::vector<double> g(vel_.node_count());
    DiscreteMaxwellian::match(t, vel_).eval_into(g, vel_);
    return g;
  };
  s.ghost_left_f1 = make_ghost(ansatz.state(0));
  s.ghost_right_f1 = make_ghost(ansatz.state(nx - 1));

  refresh_field(s);
  return s;
}

}  // namespace bvpb
