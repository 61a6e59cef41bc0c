#include "hstokes/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hstokes/solver.hpp"

namespace hstokes::sweep {

namespace {

using fields::PhysicalBoundary;
using fields::PhysicalField;
using fields::SpectralBoundary;
using fields::SpectralField;
using fields::TangentialGrid;
using fields::WallGrid;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

TangentialGrid grid_of(const SweepConfig& cfg) {
  return TangentialGrid{cfg.dim - 1, cfg.n, cfg.box_length};
}

// Places coarse-grid coefficients on the matching wavenumbers of a finer
// grid, rescaled for the unnormalized forward transform so the physical
// field is unchanged. Coarse Nyquist rows are dropped (band-limited data
// never populates them).
SpectralBoundary embed_boundary(const SpectralBoundary& coarse,
                                const TangentialGrid& fine) {
  require(fine.tdim == coarse.grid.tdim && fine.n >= coarse.grid.n,
          "embed_boundary: fine grid must refine the coarse grid");
  SpectralBoundary out(fine, coarse.components);
  const double scale =
      static_cast<double>(fine.modes()) / coarse.grid.modes();
  for (int m = 0; m < coarse.grid.modes(); ++m) {
    const auto kv = coarse.grid.wavenumbers(m);
    bool nyquist = false;
    for (int a = 0; a < coarse.grid.tdim; ++a)
      if (kv[a] == -coarse.grid.n / 2) nyquist = true;
    if (nyquist) continue;
    std::array<int, 2> idx{0, 0};
    for (int a = 0; a < coarse.grid.tdim; ++a)
      idx[a] = kv[a] >= 0 ? kv[a] : fine.n + kv[a];
    const int fm = coarse.grid.tdim == 1 ? idx[0] : idx[0] * fine.n + idx[1];
    for (int c = 0; c < coarse.components; ++c)
      out.at(fm, c) = scale * coarse.at(m, c);
  }
  return out;
}

// Largest |wavenumber| carrying a coefficient above 1e-12 of the peak.
int measured_band(const SpectralBoundary& b) {
  double peak = 0.0;
  for (const auto& z : b.values) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return 0;
  int band = 0;
  for (int m = 0; m < b.grid.modes(); ++m) {
    double mag = 0.0;
    for (int c = 0; c < b.components; ++c) mag = std::max(mag, std::abs(b.at(m, c)));
    if (mag <= 1e-12 * peak) continue;
    const auto kv = b.grid.wavenumbers(m);
    for (int a = 0; a < b.grid.tdim; ++a)
      band = std::max(band, std::abs(kv[a]));
  }
  return band;
}

// Velocity components stacked into one field so pointwise magnitudes cover
// the full vector (u', u_d).
PhysicalField stack_velocity(const PhysicalField& u_prime,
                             const PhysicalField& u_d) {
  const int tdim = u_prime.components;
  PhysicalField out(u_prime.grid, u_prime.wall, tdim + 1);
  const int nlev = u_prime.wall.count();
  for (int m = 0; m < u_prime.grid.modes(); ++m)
    for (int l = 0; l < nlev; ++l) {
      for (int c = 0; c < tdim; ++c) out.at(m, l, c) = u_prime.at(m, l, c);
      out.at(m, l, tdim) = u_d.at(m, l, 0);
    }
  return out;
}

struct SolveNorms {
  double omega = 0.0;
  double gamma = 0.0;
};

SolveNorms solve_norms(const kernels::ResolventParams& params,
                       const TangentialGrid& tgrid, const WallGrid& wall,
                       const PhysicalBoundary& phi, double p) {
  const auto b = solver::solve_boundary_driven(params, tgrid, wall, phi);
  SolveNorms n;
  n.omega = fields::lp_norm_omega(stack_velocity(b.u_prime, b.u_d), p);
  n.gamma = fields::lp_norm_gamma(b.trace_u_prime, p);
  return n;
}

WallGrid doubled_wall(const WallGrid& wall) {
  return WallGrid::graded(wall.top(), 2 * (wall.count() - 1), wall.levels[1] / 2.0);
}

double rel_change(double fine, double base) {
  if (base == 0.0) return fine == 0.0 ? 0.0 : 1.0;
  return std::abs(fine - base) / base;
}

}  // namespace

void SweepConfig::validate() const {
  require(dim == 2 || dim == 3, "sweep config: dim must be 2 or 3");
  require(n >= 8 && n % 4 == 0, "sweep config: n must be a multiple of 4, >= 8");
  require(box_length > 0.0, "sweep config: box length must be positive");
  require(wall_levels >= 8, "sweep config: need at least 8 wall intervals");
  require(alpha >= 0.0, "sweep config: alpha must be nonnegative");
  require(p > 1.0 && std::isfinite(p), "sweep config: p must lie in (1, inf)");
  require(workers >= 1, "sweep config: workers must be >= 1");
}

WallGrid adapted_wall(const SweepConfig& cfg, Complex lambda) {
  const double decay = std::sqrt(lambda).real();
  const double y_top = 10.0 / std::min(decay, 1.0);
  // The 1/32 headroom also covers tangential modes decaying faster than the
  // lambda rate (Re q grows with s); 1/16 leaves L^4 norms ~1% shy.
  const double y1 = std::min(y_top / cfg.wall_levels,
                             1.0 / (32.0 * std::max(decay, 1.0)));
  return WallGrid::graded(y_top, cfg.wall_levels, y1);
}

PhysicalBoundary sample_boundary_data(const SweepConfig& cfg, std::uint64_t seed,
                                      bool halve_band) {
  cfg.validate();
  const TangentialGrid grid = grid_of(cfg);
  if (!halve_band)
    return fields::inverse_dft(
        fields::random_band_limited(grid, cfg.dim - 1, seed));
  const TangentialGrid half{cfg.dim - 1, cfg.n / 2, cfg.box_length};
  return fields::inverse_dft(embed_boundary(
      fields::random_band_limited(half, cfg.dim - 1, seed), grid));
}

double DecaySample::constant() const {
  if (phi_norm == 0.0) return 0.0;
  return (norm_omega + norm_gamma) * modulus / phi_norm;
}

DecayReport resolvent_decay(const SweepConfig& cfg, std::span<const double> moduli,
                            std::span<const double> angles,
                            const PhysicalBoundary& phi) {
  cfg.validate();
  require(moduli.size() * angles.size() >= 8,
          "resolvent_decay: need at least 8 lambda samples for a fit");

  std::vector<double> mods(moduli.begin(), moduli.end());
  std::vector<double> angs(angles.begin(), angles.end());
  std::sort(mods.begin(), mods.end());
  std::sort(angs.begin(), angs.end());

  const TangentialGrid tgrid = grid_of(cfg);
  const double phi_norm = fields::lp_norm_gamma(phi, cfg.p);

  DecayReport rep;
  rep.dim = cfg.dim;
  rep.p = cfg.p;
  rep.alpha = cfg.alpha;
  rep.seed = cfg.seed;

  const long nm = static_cast<long>(mods.size());
  const long na = static_cast<long>(angs.size());
  rep.samples.assign(nm * na, DecaySample{});
  for (long i = 0; i < nm * na; ++i) {
    auto& s = rep.samples[i];
    s.modulus = mods[i / na];
    s.angle = angs[i % na];
    s.alpha = cfg.alpha;
    s.p = cfg.p;
    s.phi_norm = phi_norm;
  }

  if (phi_norm == 0.0) {
    rep.degenerate = true;  // zero data solves to zero; nothing to fit
    return rep;
  }

  parallel_for(nm * na, cfg.workers, [&](long i) {
    auto& s = rep.samples[i];
    const Complex lambda = std::polar(s.modulus, s.angle);
    const kernels::ResolventParams params{lambda, cfg.alpha, cfg.dim};
    const SolveNorms n =
        solve_norms(params, tgrid, adapted_wall(cfg, lambda), phi, cfg.p);
    s.norm_omega = n.omega;
    s.norm_gamma = n.gamma;
  });

  std::vector<double> xs, ys;
  rep.min_constant = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.samples) {
    xs.push_back(s.modulus);
    ys.push_back((s.norm_omega + s.norm_gamma) / phi_norm);
    rep.max_constant = std::max(rep.max_constant, s.constant());
    rep.min_constant = std::min(rep.min_constant, s.constant());
  }
  const LineFit fit = fit_loglog(xs, ys);
  rep.fitted_slope = fit.slope;
  rep.fit_intercept = fit.intercept;
  rep.fit_residual = fit.residual;

  // Wall-resolution probe on the extreme samples: slowest decay (smallest
  // modulus, widest angle), fastest decay (largest modulus, first angle),
  // and the corner combining large modulus with the widest angle.
  const long widest =
      std::max_element(angs.begin(), angs.end(),
                       [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      angs.begin();
  std::vector<long> probes{widest, (nm - 1) * na + widest, (nm - 1) * na};
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  for (long i : probes) {
    const auto& s = rep.samples[i];
    const Complex lambda = std::polar(s.modulus, s.angle);
    const kernels::ResolventParams params{lambda, cfg.alpha, cfg.dim};
    const SolveNorms fine = solve_norms(
        params, tgrid, doubled_wall(adapted_wall(cfg, lambda)), phi, cfg.p);
    rep.wall_refinement_shift =
        std::max({rep.wall_refinement_shift, rel_change(fine.omega, s.norm_omega),
                  rel_change(fine.gamma, s.norm_gamma)});
  }
  rep.under_resolved = rep.wall_refinement_shift > 0.01;
  return rep;
}

DecayReport resolvent_decay(const SweepConfig& cfg, std::span<const double> moduli,
                            std::span<const double> angles) {
  return resolvent_decay(cfg, moduli, angles,
                         sample_boundary_data(cfg, cfg.seed));
}

AlphaUniformityReport alpha_uniformity(const SweepConfig& cfg,
                                       std::span<const double> moduli,
                                       std::span<const double> angles,
                                       std::span<const double> alphas) {
  cfg.validate();
  require(!alphas.empty(), "alpha_uniformity: need at least one alpha");

  const PhysicalBoundary phi = sample_boundary_data(cfg, cfg.seed);
  AlphaUniformityReport rep;
  rep.dim = cfg.dim;
  rep.p = cfg.p;
  rep.seed = cfg.seed;
  rep.alphas.assign(alphas.begin(), alphas.end());
  rep.min_constant = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    SweepConfig run = cfg;
    run.alpha = a;
    rep.per_alpha.push_back(resolvent_decay(run, moduli, angles, phi));
    const double c = rep.per_alpha.back().max_constant;
    rep.max_constant = std::max(rep.max_constant, c);
    rep.min_constant = std::min(rep.min_constant, c);
  }
  rep.spread =
      rep.min_constant > 0.0 ? rep.max_constant / rep.min_constant : 0.0;
  return rep;
}

namespace {

// Shared scaffolding of the two ratio experiments: per-draw ratios, spread,
// and a refinement probe evaluated through the supplied ratio functional.
template <typename RatioFn, typename RefineFn>
RatioReport ratio_report(const SweepConfig& cfg, Complex lambda,
                         std::span<const PhysicalBoundary> phis,
                         std::span<const std::uint64_t> seeds, RatioFn ratio_of,
                         RefineFn refined_ratio_of) {
  cfg.validate();
  const kernels::ResolventParams params{lambda, cfg.alpha, cfg.dim};
  params.validate();
  require(!phis.empty(), "ratio sweep: need at least one boundary sample");

  RatioReport rep;
  rep.dim = cfg.dim;
  rep.p = cfg.p;
  rep.lambda = lambda;
  rep.alpha = cfg.alpha;
  rep.min_ratio = std::numeric_limits<double>::infinity();

  for (size_t i = 0; i < phis.size(); ++i) {
    RatioSample s;
    s.seed = i < seeds.size() ? seeds[i] : 0;
    const auto [num, den, band] = ratio_of(phis[i]);
    s.band = band;
    s.phi_norm = den;
    if (den == 0.0) {
      s.degenerate = true;
      rep.degenerate = true;
    } else {
      s.ratio = num / den;
      rep.min_ratio = std::min(rep.min_ratio, s.ratio);
      rep.max_ratio = std::max(rep.max_ratio, s.ratio);
    }
    rep.samples.push_back(s);
  }
  if (!std::isfinite(rep.min_ratio)) {  // every sample was degenerate
    rep.min_ratio = 0.0;
    rep.degenerate = true;
  }
  rep.spread = rep.min_ratio > 0.0 ? rep.max_ratio / rep.min_ratio : 0.0;

  for (const auto& phi : phis) {
    const auto [num, den, band] = ratio_of(phi);
    if (den == 0.0) continue;
    rep.refinement_shift = rel_change(refined_ratio_of(phi), num / den);
    break;  // one probe on the first usable draw
  }
  return rep;
}

std::vector<PhysicalBoundary> alternating_draws(const SweepConfig& cfg,
                                                int phi_count,
                                                std::vector<std::uint64_t>& seeds) {
  require(phi_count >= 1, "ratio sweep: phi_count must be >= 1");
  std::vector<PhysicalBoundary> phis;
  for (int i = 0; i < phi_count; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    seeds.push_back(seed);
    phis.push_back(sample_boundary_data(cfg, seed, /*halve_band=*/i % 2 == 1));
  }
  return phis;
}

struct RatioParts {
  double num = 0.0;
  double den = 0.0;
  int band = 0;
};

RatioParts gradient_parts(const kernels::ResolventParams& params,
                          const TangentialGrid& tgrid, const WallGrid& wall,
                          const PhysicalBoundary& phi, double p) {
  RatioParts parts;
  parts.den = fields::lp_norm_gamma(phi, p);
  const SpectralBoundary phi_hat = fields::forward_dft(phi);
  parts.band = measured_band(phi_hat);
  if (parts.den == 0.0) return parts;
  const auto b = solver::solve_boundary_driven(params, tgrid, wall, phi);
  const PhysicalField vel = stack_velocity(b.u_prime, b.u_d);
  const PhysicalField dyv = stack_velocity(b.dy_u_prime, b.dy_u_d);
  parts.num = fields::sobolev_w1p_norm(vel, dyv, p) +
              fields::lp_norm_omega(b.pressure, p);
  return parts;
}

RatioParts proxy_parts(const kernels::ResolventParams& params,
                       const TangentialGrid& tgrid, const WallGrid& wall,
                       const PhysicalBoundary& phi, double p) {
  RatioParts parts;
  const SpectralBoundary phi_hat = fields::forward_dft(phi);
  parts.band = measured_band(phi_hat);

  // Discrete boundary surrogate ||phi||_p^p + sum_a ||d_a phi||_p^p.
  double den_pow = std::pow(fields::lp_norm_gamma(phi, p), p);
  for (int a = 0; a < tgrid.tdim; ++a)
    den_pow += std::pow(
        fields::lp_norm_gamma(
            fields::inverse_dft(fields::tangential_derivative(phi_hat, a)), p),
        p);
  parts.den = std::pow(den_pow, 1.0 / p);
  if (parts.den == 0.0) return parts;

  const auto b = solver::solve_boundary_driven(params, tgrid, wall, phi);
  const auto dyy = solver::second_normal_derivatives(b);

  const auto entry_norm = [&](const SpectralField& up, const SpectralField& ud) {
    return fields::lp_norm_omega(
        stack_velocity(fields::inverse_dft(up), fields::inverse_dft(ud)), p);
  };

  // Hessian entries of the velocity, accumulated as p-th powers with the
  // off-diagonal multiplicity 2.
  double hess_pow = 0.0;
  for (int a = 0; a < tgrid.tdim; ++a) {
    const SpectralField da_up = fields::tangential_derivative(b.spec_u_prime, a);
    const SpectralField da_ud = fields::tangential_derivative(b.spec_u_d, a);
    for (int c = a; c < tgrid.tdim; ++c) {
      const double mult = c == a ? 1.0 : 2.0;
      hess_pow += mult * std::pow(entry_norm(fields::tangential_derivative(da_up, c),
                                             fields::tangential_derivative(da_ud, c)),
                                  p);
    }
    hess_pow +=
        2.0 * std::pow(entry_norm(fields::tangential_derivative(b.spec_dy_u_prime, a),
                                  fields::tangential_derivative(b.spec_dy_u_d, a)),
                       p);
  }
  hess_pow += std::pow(entry_norm(dyy.dyy_u_prime, dyy.dyy_u_d), p);

  // Pressure gradient: tangential spectral derivatives plus the analytic
  // wall-normal derivative carried by the bundle.
  double grad_pi_pow = std::pow(fields::lp_norm_omega(b.dy_pressure, p), p);
  for (int a = 0; a < tgrid.tdim; ++a)
    grad_pi_pow += std::pow(
        fields::lp_norm_omega(fields::inverse_dft(fields::tangential_derivative(
                                  b.spec_pressure, a)),
                              p),
        p);

  parts.num = std::pow(hess_pow, 1.0 / p) + std::pow(grad_pi_pow, 1.0 / p);
  return parts;
}

}  // namespace

RatioReport gradient_estimate(const SweepConfig& cfg, Complex lambda,
                              std::span<const PhysicalBoundary> phis) {
  const TangentialGrid tgrid = grid_of(cfg);
  const WallGrid wall = adapted_wall(cfg, lambda);
  const kernels::ResolventParams params{lambda, cfg.alpha, cfg.dim};
  const auto ratio_of = [&](const PhysicalBoundary& phi) {
    const RatioParts parts = gradient_parts(params, tgrid, wall, phi, cfg.p);
    return std::tuple{parts.num, parts.den, parts.band};
  };
  const auto refined = [&](const PhysicalBoundary& phi) {
    const RatioParts parts =
        gradient_parts(params, tgrid, doubled_wall(wall), phi, cfg.p);
    return parts.num / parts.den;
  };
  return ratio_report(cfg, lambda, phis, {}, ratio_of, refined);
}

RatioReport gradient_estimate(const SweepConfig& cfg, Complex lambda,
                              int phi_count) {
  cfg.validate();
  std::vector<std::uint64_t> seeds;
  const auto phis = alternating_draws(cfg, phi_count, seeds);
  const TangentialGrid tgrid = grid_of(cfg);
  const WallGrid wall = adapted_wall(cfg, lambda);
  const kernels::ResolventParams params{lambda, cfg.alpha, cfg.dim};
  const auto ratio_of = [&](const PhysicalBoundary& phi) {
    const RatioParts parts = gradient_parts(params, tgrid, wall, phi, cfg.p);
    return std::tuple{parts.num, parts.den, parts.band};
  };
  const auto refined = [&](const PhysicalBoundary& phi) {
    const RatioParts parts =
        gradient_parts(params, tgrid, doubled_wall(wall), phi, cfg.p);
    return parts.num / parts.den;
  };
  return ratio_report(cfg, lambda, phis, seeds, ratio_of, refined);
}

RatioReport second_order_proxy(const SweepConfig& cfg, Complex lambda,
                               std::span<const PhysicalBoundary> phis) {
  const TangentialGrid tgrid = grid_of(cfg);
  const WallGrid wall = adapted_wall(cfg, lambda);
  const kernels::ResolventParams params{lambda, cfg.alpha, cfg.dim};
  const auto ratio_of = [&](const PhysicalBoundary& phi) {
    const RatioParts parts = proxy_parts(params, tgrid, wall, phi, cfg.p);
    return std::tuple{parts.num, parts.den, parts.band};
  };
  const auto refined = [&](const PhysicalBoundary& phi) {
    // Same spectral data on a grid with twice the tangential resolution.
    const TangentialGrid fine{cfg.dim - 1, 2 * cfg.n, cfg.box_length};
    const PhysicalBoundary phi_fine =
        fields::inverse_dft(embed_boundary(fields::forward_dft(phi), fine));
    const RatioParts parts = proxy_parts(params, fine, wall, phi_fine, cfg.p);
    return parts.num / parts.den;
  };
  return ratio_report(cfg, lambda, phis, {}, ratio_of, refined);
}

RatioReport second_order_proxy(const SweepConfig& cfg, Complex lambda,
                               int phi_count) {
  cfg.validate();
  std::vector<std::uint64_t> seeds;
  const auto phis = alternating_draws(cfg, phi_count, seeds);
  std::span<const PhysicalBoundary> span{phis};
  RatioReport rep = second_order_proxy(cfg, lambda, span);
  for (size_t i = 0; i < rep.samples.size() && i < seeds.size(); ++i)
    rep.samples[i].seed = seeds[i];
  return rep;
}

}  // namespace hstokes::sweep
