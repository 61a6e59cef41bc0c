#include "hstokes/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hstokes/util.hpp"

namespace hstokes::solver {

namespace {

using fields::PhysicalBoundary;
using fields::PhysicalField;
using fields::SpectralBoundary;
using fields::SpectralField;
using kernels::KernelBundle;

// Per-mode frequency data and the ray/perp split of the boundary datum.
struct ModeData {
  std::array<double, 2> xi{};
  double s = 0.0;
  Complex dot{};                    // xi . phi_hat
  std::array<Complex, 2> ray{};     // (xi xi^T / s^2) phi_hat
  std::array<Complex, 2> perp{};    // phi_hat - ray
  std::array<Complex, 2> phi{};
};

ModeData mode_data(const SpectralBoundary& phi_hat, int mode) {
  ModeData md;
  const auto f = phi_hat.grid.frequencies(mode);
  md.xi = f;
  const int tdim = phi_hat.grid.tdim;
  double s2 = 0.0;
  for (int c = 0; c < tdim; ++c) {
    md.phi[c] = phi_hat.at(mode, c);
    s2 += f[c] * f[c];
    md.dot += f[c] * md.phi[c];
  }
  md.s = std::sqrt(s2);
  for (int c = 0; c < tdim; ++c) {
    md.ray[c] = s2 > 0.0 ? md.xi[c] * md.dot / s2 : Complex{};
    md.perp[c] = md.phi[c] - md.ray[c];
  }
  return md;
}

// Spectral-side norms used to normalize residual records.
double sup_mode_magnitude(const SpectralBoundary& b) {
  double sup = 0.0;
  for (int m = 0; m < b.grid.modes(); ++m) {
    double s2 = 0.0;
    for (int c = 0; c < b.components; ++c) s2 += std::norm(b.at(m, c));
    sup = std::max(sup, std::sqrt(s2));
  }
  return sup;
}

double l2_gamma_spectral(const SpectralBoundary& b) {
  double acc = 0.0;
  for (const auto& z : b.values) acc += std::norm(z);
  const double wtan = std::pow(b.grid.box_length / b.grid.n, b.grid.tdim) /
                      b.grid.modes();
  return std::sqrt(wtan * acc);
}

// Accumulates pointwise residual magnitudes into max/L2 aggregates with the
// Parseval-consistent volume (or boundary) measure.
class RecordBuilder {
 public:
  explicit RecordBuilder(double measure_scale) : measure_(measure_scale) {}
  void add(double magnitude, double weight = 1.0) {
    max_ = std::max(max_, magnitude);
    sum_ += weight * magnitude * magnitude;
  }
  ResidualRecord finish(double sup_scale, double l2_scale) const {
    ResidualRecord r;
    r.max_abs = max_;
    r.l2_abs = std::sqrt(measure_ * sum_);
    r.max_rel = sup_scale > 0.0 ? r.max_abs / sup_scale : r.max_abs;
    r.l2_rel = l2_scale > 0.0 ? r.l2_abs / l2_scale : r.l2_abs;
    return r;
  }

 private:
  double measure_, max_ = 0.0, sum_ = 0.0;
};

double spectral_volume_measure(const fields::TangentialGrid& g) {
  return std::pow(g.box_length / g.n, g.tdim) / g.modes();
}

}  // namespace

SolutionBundle solve_boundary_driven(const kernels::ResolventParams& params,
                                     const fields::TangentialGrid& tgrid,
                                     const fields::WallGrid& wgrid,
                                     const PhysicalBoundary& phi) {
  params.validate();
  tgrid.validate();
  wgrid.validate();
  phi.validate_shape();
  const int tdim = params.dim - 1;
  if (tgrid.tdim != tdim || phi.components != tdim || phi.grid.n != tgrid.n)
    throw std::invalid_argument(
        "solve_boundary_driven: phi must carry dim-1 components on the grid");

  SolutionBundle b{params,
                   fields::forward_dft(phi),
                   SpectralField(tgrid, wgrid, tdim),
                   SpectralField(tgrid, wgrid, 1),
                   SpectralField(tgrid, wgrid, 1),
                   SpectralField(tgrid, wgrid, tdim),
                   SpectralField(tgrid, wgrid, 1),
                   SpectralField(tgrid, wgrid, 1),
                   SpectralBoundary(tgrid, tdim),
                   {},
                   {},
                   {},
                   {},
                   {},
                   {},
                   {}};

  const int nlev = wgrid.count();
  parallel_for(tgrid.modes(), default_workers(), [&](long m) {
    const ModeData md = mode_data(b.phi_hat, static_cast<int>(m));
    const Complex i_dot{-md.dot.imag(), md.dot.real()};  // i * dot
    for (int l = 0; l < nlev; ++l) {
      const KernelBundle kb =
          kernels::kernel_bundle(params, {md.s, wgrid.levels[l]});
      if (md.s > 0.0) {
        for (int c = 0; c < tdim; ++c) {
          b.spec_u_prime.at(m, l, c) = -kb.dy1 * md.ray[c] + kb.m4 * md.perp[c];
          b.spec_dy_u_prime.at(m, l, c) =
              -kb.dy2 * md.ray[c] - kb.q * kb.m4 * md.perp[c];
        }
        b.spec_u_d.at(m, l, 0) = i_dot * kb.m0;
        b.spec_dy_u_d.at(m, l, 0) = i_dot * kb.dy1;
        b.spec_pressure.at(m, l, 0) = -i_dot / md.s * kb.pressure;
        b.spec_dy_pressure.at(m, l, 0) = i_dot * kb.pressure;
      } else {
        // xi = 0: only the tangential Robin kernel survives.
        for (int c = 0; c < tdim; ++c) {
          b.spec_u_prime.at(m, l, c) = kb.m4 * md.phi[c];
          b.spec_dy_u_prime.at(m, l, c) = -kb.q * kb.m4 * md.phi[c];
        }
      }
    }
    for (int c = 0; c < tdim; ++c)
      b.spec_trace_u_prime.at(m, c) = b.spec_u_prime.at(m, 0, c);
  });

  b.u_prime = fields::inverse_dft(b.spec_u_prime);
  b.u_d = fields::inverse_dft(b.spec_u_d);
  b.pressure = fields::inverse_dft(b.spec_pressure);
  b.dy_u_prime = fields::inverse_dft(b.spec_dy_u_prime);
  b.dy_u_d = fields::inverse_dft(b.spec_dy_u_d);
  b.dy_pressure = fields::inverse_dft(b.spec_dy_pressure);
  b.trace_u_prime = fields::inverse_dft(b.spec_trace_u_prime);
  return b;
}

InteriorResidual residual_interior(const SolutionBundle& b) {
  const auto& tgrid = b.spec_u_prime.grid;
  const auto& wgrid = b.spec_u_prime.wall;
  const int tdim = tgrid.tdim, nlev = wgrid.count();
  const auto wlev = wgrid.trapezoid_weights();
  const Complex lam = b.params.lambda;

  const double measure = spectral_volume_measure(tgrid);
  RecordBuilder momentum(measure), divergence(measure);
  const double sup_phi = sup_mode_magnitude(b.phi_hat);
  const double l2_phi = l2_gamma_spectral(b.phi_hat);

  for (int m = 0; m < tgrid.modes(); ++m) {
    const ModeData md = mode_data(b.phi_hat, m);
    const Complex i_dot{-md.dot.imag(), md.dot.real()};
    for (int l = 0; l < nlev; ++l) {
      const KernelBundle kb =
          kernels::kernel_bundle(b.params, {md.s, wgrid.levels[l]});
      const Complex helm = lam + md.s * md.s;
      double r2 = 0.0;
      Complex div{};
      if (md.s > 0.0) {
        for (int c = 0; c < tdim; ++c) {
          const Complex dyy = -kb.dy3 * md.ray[c] + kb.q * kb.q * kb.m4 * md.perp[c];
          const Complex r = helm * b.spec_u_prime.at(m, l, c) - dyy +
                            Complex(0.0, md.xi[c]) * b.spec_pressure.at(m, l, 0);
          r2 += std::norm(r);
          div += Complex(0.0, md.xi[c]) * b.spec_u_prime.at(m, l, c);
        }
        const Complex dyy_d = i_dot * kb.dy2;
        const Complex dy_pi = i_dot * kb.pressure;
        r2 += std::norm(helm * b.spec_u_d.at(m, l, 0) - dyy_d + dy_pi);
        div += b.spec_dy_u_d.at(m, l, 0);
      } else {
        for (int c = 0; c < tdim; ++c) {
          const Complex dyy = kb.q * kb.q * kb.m4 * md.phi[c];
          r2 += std::norm(helm * b.spec_u_prime.at(m, l, c) - dyy);
        }
      }
      momentum.add(std::sqrt(r2), wlev[l]);
      divergence.add(std::abs(div), wlev[l]);
    }
  }
  return {momentum.finish(sup_phi, l2_phi), divergence.finish(sup_phi, l2_phi)};
}

BoundaryResidual residual_boundary(const SolutionBundle& b,
                                   const PhysicalBoundary& phi) {
  phi.validate_shape();
  const SpectralBoundary phi_hat = fields::forward_dft(phi);
  const auto& tgrid = b.spec_u_prime.grid;
  if (phi_hat.grid.n != tgrid.n || phi_hat.components != tgrid.tdim)
    throw std::invalid_argument("residual_boundary: phi shape mismatch");

  const double measure = std::pow(tgrid.box_length / tgrid.n, tgrid.tdim) /
                         tgrid.modes();
  RecordBuilder dynamic(measure), trace(measure);
  const double sup_phi = sup_mode_magnitude(phi_hat);
  const double l2_phi = l2_gamma_spectral(phi_hat);
  const Complex robin = b.params.lambda + b.params.alpha;

  for (int m = 0; m < tgrid.modes(); ++m) {
    double r2 = 0.0;
    for (int c = 0; c < tgrid.tdim; ++c) {
      const Complex r = robin * b.spec_u_prime.at(m, 0, c) -
                        b.spec_dy_u_prime.at(m, 0, c) - phi_hat.at(m, c);
      r2 += std::norm(r);
    }
    dynamic.add(std::sqrt(r2));
    trace.add(std::abs(b.spec_u_d.at(m, 0, 0)));
  }
  return {dynamic.finish(sup_phi, l2_phi), trace.finish(sup_phi, l2_phi)};
}

BiharmonicRecord biharmonic_check(const SolutionBundle& b) {
  const auto& tgrid = b.spec_u_prime.grid;
  const auto& wgrid = b.spec_u_prime.wall;
  const auto wlev = wgrid.trapezoid_weights();
  const Complex lam = b.params.lambda;
  const double measure = spectral_volume_measure(tgrid);

  // Interior: (lambda + s^2 - d^2/dy^2)(s^2 - d^2/dy^2) u_d expands to
  // (lambda+s^2) s^2 u_d - (lambda + 2 s^2) u_d'' + u_d''''.
  double max_r = 0.0, max_scale = 0.0, sum_r = 0.0, sum_scale = 0.0;
  double max_row = 0.0, sup_dot = 0.0;
  for (int m = 0; m < tgrid.modes(); ++m) {
    const ModeData md = mode_data(b.phi_hat, m);
    const Complex i_dot{-md.dot.imag(), md.dot.real()};
    sup_dot = std::max(sup_dot, std::abs(md.dot));
    if (md.s > 0.0) {
      for (int l = 0; l < wgrid.count(); ++l) {
        const KernelBundle kb =
            kernels::kernel_bundle(b.params, {md.s, wgrid.levels[l]});
        const double s2 = md.s * md.s;
        const Complex t1 = (lam + s2) * s2 * b.spec_u_d.at(m, l, 0);
        const Complex t2 = -(lam + 2.0 * s2) * i_dot * kb.dy2;
        const Complex t3 = i_dot * kb.dy4;
        const double r = std::abs(t1 + t2 + t3);
        const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
        max_r = std::max(max_r, r);
        max_scale = std::max(max_scale, scale);
        sum_r += wlev[l] * r * r;
        sum_scale += wlev[l] * scale * scale;
      }
      // Boundary row (lambda + alpha - d/dy)(d/dy) u_d(0) + i xi.phi_hat.
      const KernelBundle kb0 = kernels::kernel_bundle(b.params, {md.s, 0.0});
      const Complex row =
          i_dot * ((lam + b.params.alpha) * kb0.dy1 - kb0.dy2) + i_dot;
      max_row = std::max(max_row, std::abs(row));
    }
  }
  BiharmonicRecord rec;
  rec.interior.max_abs = max_r;
  rec.interior.l2_abs = std::sqrt(measure * sum_r);
  rec.interior.max_rel = max_scale > 0.0 ? max_r / max_scale : max_r;
  rec.interior.l2_rel =
      sum_scale > 0.0 ? std::sqrt(sum_r / sum_scale) : rec.interior.l2_abs;
  rec.boundary_row.max_abs = max_row;
  rec.boundary_row.max_rel = sup_dot > 0.0 ? max_row / sup_dot : max_row;
  rec.boundary_row.l2_abs = rec.boundary_row.max_abs;
  rec.boundary_row.l2_rel = rec.boundary_row.max_rel;
  return rec;
}

SecondDerivatives second_normal_derivatives(const SolutionBundle& b) {
  const auto& tgrid = b.spec_u_prime.grid;
  const auto& wgrid = b.spec_u_prime.wall;
  const int tdim = tgrid.tdim, nlev = wgrid.count();
  SecondDerivatives d{SpectralField(tgrid, wgrid, tdim),
                      SpectralField(tgrid, wgrid, 1)};
  parallel_for(tgrid.modes(), default_workers(), [&](long m) {
    const ModeData md = mode_data(b.phi_hat, static_cast<int>(m));
    const Complex i_dot{-md.dot.imag(), md.dot.real()};
    for (int l = 0; l < nlev; ++l) {
      const KernelBundle kb =
          kernels::kernel_bundle(b.params, {md.s, wgrid.levels[l]});
      const Complex qq = kb.q * kb.q;
      if (md.s > 0.0) {
        for (int c = 0; c < tdim; ++c)
          d.dyy_u_prime.at(m, l, c) =
              -kb.dy3 * md.ray[c] + qq * kb.m4 * md.perp[c];
        d.dyy_u_d.at(m, l, 0) = i_dot * kb.dy2;
      } else {
        for (int c = 0; c < tdim; ++c)
          d.dyy_u_prime.at(m, l, c) = qq * kb.m4 * md.phi[c];
      }
    }
  });
  return d;
}

TestField solenoidal_test_field(const fields::TangentialGrid& tgrid,
                                const fields::WallGrid& wgrid,
                                std::span<const double> direction, double kappa,
                                std::uint64_t seed) {
  tgrid.validate();
  wgrid.validate();
  if (static_cast<int>(direction.size()) != tgrid.tdim)
    throw std::invalid_argument("solenoidal_test_field: direction must have tdim entries");
  if (!(kappa > 0.0))
    throw std::invalid_argument("solenoidal_test_field: kappa must be positive");

  const fields::SpectralBoundary g_hat = fields::random_band_limited(tgrid, 1, seed);
  fields::SpectralBoundary dg_hat(tgrid, 1);  // (a . grad') g
  for (int m = 0; m < tgrid.modes(); ++m) {
    const auto f = tgrid.frequencies(m);
    Complex a_dot_ixi{};
    for (int c = 0; c < tgrid.tdim; ++c) a_dot_ixi += direction[c] * Complex(0.0, f[c]);
    dg_hat.at(m, 0) = a_dot_ixi * g_hat.at(m, 0);
  }
  const fields::PhysicalBoundary g = fields::inverse_dft(g_hat);
  const fields::PhysicalBoundary dg = fields::inverse_dft(dg_hat);

  TestField t{PhysicalField(tgrid, wgrid, tgrid.tdim),
              PhysicalField(tgrid, wgrid, 1),
              PhysicalField(tgrid, wgrid, tgrid.tdim),
              PhysicalField(tgrid, wgrid, 1),
              fields::PhysicalBoundary(tgrid, tgrid.tdim)};
  for (int m = 0; m < tgrid.modes(); ++m) {
    for (int l = 0; l < wgrid.count(); ++l) {
      const double y = wgrid.levels[l];
      const double decay = std::exp(-kappa * y);
      const double w = y * decay;
      const double w1 = (1.0 - kappa * y) * decay;
      const double w2 = (kappa * kappa * y - 2.0 * kappa) * decay;
      for (int c = 0; c < tgrid.tdim; ++c) {
        t.v_prime.at(m, l, c) = direction[c] * w1 * g.at(m, 0);
        t.dy_v_prime.at(m, l, c) = direction[c] * w2 * g.at(m, 0);
      }
      t.v_d.at(m, l, 0) = -w * dg.at(m, 0);
      t.dy_v_d.at(m, l, 0) = -w1 * dg.at(m, 0);
    }
    for (int c = 0; c < tgrid.tdim; ++c)
      t.trace_v_prime.at(m, c) = direction[c] * g.at(m, 0);
  }
  return t;
}

WeakFormRecord weak_form_check(const SolutionBundle& b, const TestField& test) {
  const auto& tgrid = b.u_prime.grid;
  const auto& wgrid = b.u_prime.wall;
  const int tdim = tgrid.tdim, d = tdim + 1, nlev = wgrid.count();
  if (test.v_prime.grid.n != tgrid.n || test.v_prime.grid.tdim != tdim ||
      test.v_prime.wall.count() != nlev)
    throw std::invalid_argument("weak_form_check: test field grids differ");

  // Physical gradients: tangential spectrally, wall-normal analytic.
  // grad_u[i][j] = d u_i / d x_j with j = tdim meaning y; u_i = u_d at i = tdim.
  std::vector<std::vector<PhysicalField>> grad_u(d), grad_v(d);
  const SpectralField vps = fields::forward_dft(test.v_prime);
  const SpectralField vds = fields::forward_dft(test.v_d);
  for (int i = 0; i < d; ++i) {
    grad_u[i].resize(d);
    grad_v[i].resize(d);
  }
  for (int j = 0; j < tdim; ++j) {
    const PhysicalField dup =
        fields::inverse_dft(fields::tangential_derivative(b.spec_u_prime, j));
    const PhysicalField dud =
        fields::inverse_dft(fields::tangential_derivative(b.spec_u_d, j));
    const PhysicalField dvp = fields::inverse_dft(fields::tangential_derivative(vps, j));
    const PhysicalField dvd = fields::inverse_dft(fields::tangential_derivative(vds, j));
    for (int i = 0; i < tdim; ++i) {
      // Split multi-component derivative fields into per-component views.
      PhysicalField ui(tgrid, wgrid, 1), vi(tgrid, wgrid, 1);
      for (int m = 0; m < tgrid.modes(); ++m)
        for (int l = 0; l < nlev; ++l) {
          ui.at(m, l, 0) = dup.at(m, l, i);
          vi.at(m, l, 0) = dvp.at(m, l, i);
        }
      grad_u[i][j] = std::move(ui);
      grad_v[i][j] = std::move(vi);
    }
    grad_u[tdim][j] = dud;
    grad_v[tdim][j] = dvd;
  }
  for (int i = 0; i < tdim; ++i) {
    PhysicalField ui(tgrid, wgrid, 1), vi(tgrid, wgrid, 1);
    for (int m = 0; m < tgrid.modes(); ++m)
      for (int l = 0; l < nlev; ++l) {
        ui.at(m, l, 0) = b.dy_u_prime.at(m, l, i);
        vi.at(m, l, 0) = test.dy_v_prime.at(m, l, i);
      }
    grad_u[i][tdim] = std::move(ui);
    grad_v[i][tdim] = std::move(vi);
  }
  grad_u[tdim][tdim] = b.dy_u_d;
  grad_v[tdim][tdim] = test.dy_v_d;

  const auto wlev = wgrid.trapezoid_weights();
  const double wtan = std::pow(tgrid.box_length / tgrid.n, tgrid.tdim);
  Complex vol{}, grad{};
  for (int m = 0; m < tgrid.modes(); ++m)
    for (int l = 0; l < nlev; ++l) {
      const double w = wtan * wlev[l];
      Complex dot{};
      for (int c = 0; c < tdim; ++c)
        dot += b.u_prime.at(m, l, c) * std::conj(test.v_prime.at(m, l, c));
      dot += b.u_d.at(m, l, 0) * std::conj(test.v_d.at(m, l, 0));
      vol += w * dot;
      Complex dd{};
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const Complex du =
              0.5 * (grad_u[i][j].at(m, l, 0) + grad_u[j][i].at(m, l, 0));
          const Complex dv =
              0.5 * (grad_v[i][j].at(m, l, 0) + grad_v[j][i].at(m, l, 0));
          dd += du * std::conj(dv);
        }
      grad += w * 2.0 * dd;
    }

  Complex gamma{}, data{};
  const SpectralBoundary& phi_hat = b.phi_hat;
  const fields::PhysicalBoundary phi = fields::inverse_dft(phi_hat);
  for (int m = 0; m < tgrid.modes(); ++m) {
    Complex ug{}, pg{};
    for (int c = 0; c < tdim; ++c) {
      ug += b.trace_u_prime.at(m, c) * std::conj(test.trace_v_prime.at(m, c));
      pg += phi.at(m, c) * std::conj(test.trace_v_prime.at(m, c));
    }
    gamma += wtan * ug;
    data += wtan * pg;
  }

  WeakFormRecord rec;
  rec.volume_term = b.params.lambda * vol;
  rec.gradient_term = grad;
  rec.boundary_term = (b.params.lambda + b.params.alpha) * gamma;
  rec.data_term = data;
  rec.defect =
      rec.volume_term + rec.gradient_term + rec.boundary_term - rec.data_term;
  rec.scale = std::max({std::abs(rec.volume_term), std::abs(rec.gradient_term),
                        std::abs(rec.boundary_term), std::abs(rec.data_term)});
  return rec;
}

}  // namespace hstokes::solver
