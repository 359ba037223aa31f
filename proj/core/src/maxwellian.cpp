#include "bvpb/maxwellian.hpp"

#include <cmath>

namespace bvpb {

MaxwellianFactors maxwellian_factors(const FluidState& s, const VelocityGrid& grid) {
  s.require_valid("maxwellian");
  MaxwellianFactors f;
  const double rt = kGasConstant * s.theta;
  f.prefac = s.rho / std::pow(2.0 * M_PI * rt, 1.5);
  for (int a = 0; a < 3; ++a) {
    const auto& ax = grid.axis(a);
    f.axis[a].resize(ax.count);
    for (int i = 0; i < ax.count; ++i) {
      const double c = ax.nodes[i] - s.u[a];
      f.axis[a][i] = std::exp(-c * c / (2.0 * rt));
    }
  }
  return f;
}

void MaxwellianFactors::eval_into(std::span<double> out, const VelocityGrid& grid) const {
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  std::size_t n = 0;
  for (int i = 0; i < n1; ++i) {
    const double fi = prefac * axis[0][i];
    for (int j = 0; j < n2; ++j) {
      const double fij = fi * axis[1][j];
      for (int k = 0; k < n3; ++k, ++n) out[n] = fij * axis[2][k];
    }
  }
}

std::vector<double> maxwellian(const FluidState& state, const VelocityGrid& grid) {
  std::vector<double> m(grid.node_count());
  maxwellian_factors(state, grid).eval_into(m, grid);
  return m;
}

double maxwellian_peak(const FluidState& s) {
  return s.rho * std::pow(3.0 / (4.0 * M_PI * s.theta), 1.5);
}

double inner_product(std::span<const double> g1, std::span<const double> g2,
                     std::span<const double> wm, const VelocityGrid& grid) {
  if (g1.size() != grid.node_count() || g2.size() != g1.size() || wm.size() != g1.size())
    throw NumericsError("inner_product: node count mismatch");
  const auto& w = grid.flat_weights();
  double s = 0.0;
  for (std::size_t n = 0; n < g1.size(); ++n) s += g1[n] * g2[n] / wm[n] * w[n];
  if (!std::isfinite(s))
    throw NumericsError("inner_product: ill-conditioned (support outside weight core)");
  return s;
}

ChiBasis ChiBasis::build(const FluidState& state, const VelocityGrid& grid) {
  return build(state, maxwellian(state, grid), grid);
}

ChiBasis ChiBasis::build(const FluidState& state, std::span<const double> m_field,
                         const VelocityGrid& grid) {
  state.require_valid("ChiBasis");
  if (m_field.size() != grid.node_count()) throw NumericsError("ChiBasis: M field size mismatch");
  ChiBasis b;
  b.state_ = state;
  b.m_.assign(m_field.begin(), m_field.end());

  const std::size_t nn = grid.node_count();
  const double rt = kGasConstant * state.theta;
  const double srho = std::sqrt(state.rho);
  // chi_0 = M/sqrt(rho), chi_a = (v_a-u_a)/sqrt(R theta rho) M,
  // chi_4 = (|v-u|^2/(R theta) - 3) M / sqrt(6 rho).
  for (auto& t : b.analytic_) t.resize(nn);
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  std::size_t n = 0;
  for (int i = 0; i < n1; ++i) {
    const double c1 = grid.v1(i) - state.u[0];
    for (int j = 0; j < n2; ++j) {
      const double c2 = grid.v2(j) - state.u[1];
      for (int k = 0; k < n3; ++k, ++n) {
        const double c3 = grid.v3(k) - state.u[2];
        const double m = b.m_[n];
        const double csq = c1 * c1 + c2 * c2 + c3 * c3;
        b.analytic_[0][n] = m / srho;
        b.analytic_[1][n] = c1 / std::sqrt(rt * state.rho) * m;
        b.analytic_[2][n] = c2 / std::sqrt(rt * state.rho) * m;
        b.analytic_[3][n] = c3 / std::sqrt(rt * state.rho) * m;
        b.analytic_[4][n] = (csq / rt - 3.0) / std::sqrt(6.0 * state.rho) * m;
      }
    }
  }

  // Modified Gram-Schmidt with one re-orthogonalization pass against the
  // discrete <.,.>_M product. The paper's identities are exact in the
  // continuum; projections need them exact-ish on the grid.
  for (int j = 0; j < 5; ++j) b.ortho_[j] = b.analytic_[j];
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < 5; ++j) {
      auto& q = b.ortho_[j];
      for (int i = 0; i < j; ++i) {
        const double c = inner_product(q, b.ortho_[i], b.m_, grid);
        for (std::size_t t = 0; t < nn; ++t) q[t] -= c * b.ortho_[i][t];
      }
      const double nrm = std::sqrt(inner_product(q, q, b.m_, grid));
      if (nrm <= 0.0 || !std::isfinite(nrm))
        throw NumericsError("ChiBasis: degenerate basis (grid too coarse for state)");
      for (std::size_t t = 0; t < nn; ++t) q[t] /= nrm;
    }
  }
  return b;
}

void ChiBasis::project_P0(std::span<const double> g, std::span<double> out,
                          const VelocityGrid& grid) const {
  std::array<double, 5> c;
  for (int j = 0; j < 5; ++j) c[j] = inner_product(g, ortho_[j], m_, grid);
  for (std::size_t n = 0; n < g.size(); ++n) {
    double s = 0.0;
    for (int j = 0; j < 5; ++j) s += c[j] * ortho_[j][n];
    out[n] = s;
  }
}

void ChiBasis::project_P1(std::span<const double> g, std::span<double> out,
                          const VelocityGrid& grid) const {
  project_P0(g, out, grid);
  for (std::size_t n = 0; n < g.size(); ++n) out[n] = g[n] - out[n];
}

void ChiBasis::project_Pd(std::span<const double> g, std::span<double> out,
                          const VelocityGrid& grid) const {
  // <g, M>_M = int g dv.
  const double c = integrate_velocity(g, grid) / state_.rho;
  for (std::size_t n = 0; n < g.size(); ++n) out[n] = c * m_[n];
}

void ChiBasis::project_Pc(std::span<const double> g, std::span<double> out,
                          const VelocityGrid& grid) const {
  const double c = integrate_velocity(g, grid) / state_.rho;
  for (std::size_t n = 0; n < g.size(); ++n) out[n] = g[n] - c * m_[n];
}

std::vector<double> GlobalReference::inv_mstar(const VelocityGrid& grid) const {
  std::vector<double> w = maxwellian(star, grid);
  for (auto& v : w) v = 1.0 / v;
  return w;
}

bool GlobalReference::closeness_ok(const FluidState& s) const {
  const double d = std::abs(s.rho - star.rho) +
                   std::sqrt((s.u[0] - star.u[0]) * (s.u[0] - star.u[0]) +
                             (s.u[1] - star.u[1]) * (s.u[1] - star.u[1]) +
                             (s.u[2] - star.u[2]) * (s.u[2] - star.u[2])) +
                   std::abs(s.theta - star.theta);
  return d < eta0;
}

GlobalReference select_global_reference(std::span<const FluidState> states, double eta0) {
  if (states.empty()) throw PhysicsError("select_global_reference: no states");
  double tmin = states[0].theta, tmax = states[0].theta;
  double rho_sum = 0.0;
  std::array<double, 3> u_sum = {0, 0, 0};
  for (const auto& s : states) {
    s.require_valid("select_global_reference");
    tmin = std::min(tmin, s.theta);
    tmax = std::max(tmax, s.theta);
    rho_sum += s.rho;
    for (int a = 0; a < 3; ++a) u_sum[a] += s.u[a];
  }
  const double lo = 0.5 * tmax, hi = tmin;
  if (lo >= hi)
    throw PhysicsError("select_global_reference: band (max theta/2, min theta) empty — "
                       "wave too strong for single reference");
  const double inset = 0.05 * (hi - lo);
  double tstar = 0.75 * tmin;
  tstar = std::min(std::max(tstar, lo + inset), hi - inset);

  GlobalReference ref;
  ref.star.rho = rho_sum / states.size();
  for (int a = 0; a < 3; ++a) ref.star.u[a] = u_sum[a] / states.size();
  ref.star.theta = tstar;
  ref.eta0 = eta0;
  return ref;
}

}  // namespace bvpb
