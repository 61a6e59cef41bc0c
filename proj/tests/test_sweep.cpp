#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hstokes/fields.hpp"
#include "hstokes/kernels.hpp"
#include "hstokes/sweep.hpp"

using namespace hstokes;
using namespace hstokes::sweep;
namespace F = hstokes::fields;
namespace K = hstokes::kernels;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
const double kWideAngle = kPi - kPi / 6.0 - kPi / 90.0;

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.dim = 2;
  cfg.n = 32;
  cfg.wall_levels = 96;
  cfg.p = 2.0;
  cfg.seed = 21;
  return cfg;
}

SweepConfig ratio_config() {
  SweepConfig cfg;
  cfg.dim = 2;
  cfg.n = 64;
  cfg.wall_levels = 160;
  cfg.p = 2.0;
  cfg.seed = 11;
  return cfg;
}

const std::vector<double> kModuli = logspace(1e2, 1e6, 9);
const std::vector<double> kAngles{-kWideAngle, 0.0, kWideAngle};

}  // namespace

TEST_CASE("sweep config validation rejects malformed setups") {
  SweepConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  SUBCASE("dimension") { cfg.dim = 4; }
  SUBCASE("odd tangential count") { cfg.n = 10; }
  SUBCASE("tiny tangential count") { cfg.n = 4; }
  SUBCASE("box length") { cfg.box_length = 0.0; }
  SUBCASE("wall levels") { cfg.wall_levels = 4; }
  SUBCASE("alpha") { cfg.alpha = -1.0; }
  SUBCASE("p at one") { cfg.p = 1.0; }
  SUBCASE("p infinite") { cfg.p = std::numeric_limits<double>::infinity(); }
  SUBCASE("workers") { cfg.workers = 0; }
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("adapted wall grids track the decay rate") {
  SweepConfig cfg = small_config();
  cfg.wall_levels = 100;

  // Fast decay: domain stays at 10, first level shrinks with Re sqrt(lambda).
  const F::WallGrid fast = adapted_wall(cfg, Complex{1e6, 0.0});
  CHECK(fast.count() == 101);
  CHECK(fast.levels[0] == 0.0);
  CHECK(fast.levels[1] == doctest::Approx(1.0 / 32000.0));
  CHECK(fast.top() == doctest::Approx(10.0));

  // Slow decay: the domain stretches so the truncated tail stays negligible.
  const F::WallGrid slow = adapted_wall(cfg, Complex{0.0625, 0.0});
  CHECK(slow.top() == doctest::Approx(40.0));

  // Order-one decay: the cap 1/32 is the binding constraint.
  const F::WallGrid mid = adapted_wall(cfg, Complex{4.0, 0.0});
  CHECK(mid.levels[1] == doctest::Approx(1.0 / 64.0));
}

TEST_CASE("boundary sampler is band-limited, real, and seeded") {
  SweepConfig cfg = small_config();
  const F::PhysicalBoundary phi = sample_boundary_data(cfg, 5);
  double max_imag = 0.0, max_abs = 0.0;
  for (const auto& z : phi.values) {
    max_imag = std::max(max_imag, std::abs(z.imag()));
    max_abs = std::max(max_abs, std::abs(z));
  }
  CHECK(max_abs > 0.0);
  CHECK(max_imag <= 1e-12 * max_abs);

  const F::SpectralBoundary hat = F::forward_dft(phi);
  int band = 0;
  for (int m = 0; m < hat.grid.modes(); ++m)
    if (std::abs(hat.at(m, 0)) > 1e-10 * max_abs)
      band = std::max(band, std::abs(hat.grid.wavenumbers(m)[0]));
  CHECK(band == cfg.n / 4);

  // The half-band variant draws on the coarse grid and embeds spectrally.
  const F::SpectralBoundary half =
      F::forward_dft(sample_boundary_data(cfg, 5, /*halve_band=*/true));
  int half_band = 0;
  double half_peak = 0.0;
  for (const auto& z : half.values) half_peak = std::max(half_peak, std::abs(z));
  for (int m = 0; m < half.grid.modes(); ++m)
    if (std::abs(half.at(m, 0)) > 1e-10 * half_peak)
      half_band = std::max(half_band, std::abs(half.grid.wavenumbers(m)[0]));
  CHECK(half_band == cfg.n / 8);

  const F::PhysicalBoundary again = sample_boundary_data(cfg, 5);
  CHECK(again.values == phi.values);
  const F::PhysicalBoundary other = sample_boundary_data(cfg, 6);
  CHECK(other.values != phi.values);
}

TEST_CASE("resolvent norms decay like the inverse modulus") {
  const SweepConfig cfg = small_config();
  const DecayReport rep = resolvent_decay(cfg, kModuli, kAngles);

  REQUIRE(rep.samples.size() == 27);
  CHECK(rep.fitted_slope > -1.05);
  CHECK(rep.fitted_slope < -0.95);
  CHECK(rep.fitted_slope == doctest::Approx(-1.0235).epsilon(0.01));
  CHECK_FALSE(rep.degenerate);
  CHECK_FALSE(rep.under_resolved);
  CHECK(rep.wall_refinement_shift < 0.01);
  CHECK(rep.max_constant == doctest::Approx(1.397).epsilon(0.01));
  CHECK(rep.min_constant >= 1.0);
  CHECK(rep.seed == cfg.seed);

  // Samples are ordered by modulus, then angle, and share the data norm.
  for (size_t i = 1; i < rep.samples.size(); ++i) {
    const auto& a = rep.samples[i - 1];
    const auto& b = rep.samples[i];
    CHECK(b.modulus >= a.modulus);
    if (b.modulus == a.modulus) CHECK(b.angle > a.angle);
    CHECK(b.phi_norm == a.phi_norm);
  }
  for (const auto& s : rep.samples) {
    CHECK(s.norm_omega > 0.0);
    CHECK(s.norm_gamma > 0.0);
    CHECK(s.constant() >= rep.min_constant);
    CHECK(s.constant() <= rep.max_constant);
  }
}

TEST_CASE("zero boundary data yields a degenerate decay report") {
  const SweepConfig cfg = small_config();
  const F::TangentialGrid grid{1, cfg.n, cfg.box_length};
  const F::PhysicalBoundary zero(grid, 1);
  const DecayReport rep = resolvent_decay(cfg, kModuli, kAngles, zero);
  CHECK(rep.degenerate);
  CHECK(rep.fitted_slope == 0.0);
  REQUIRE(rep.samples.size() == 27);
  for (const auto& s : rep.samples) {
    CHECK(s.norm_omega == 0.0);
    CHECK(s.phi_norm == 0.0);
  }

  const std::vector<double> one{100.0};
  CHECK_THROWS_AS(resolvent_decay(cfg, one, one), std::invalid_argument);
}

TEST_CASE("decay norms scale linearly with the data") {
  SweepConfig cfg = small_config();
  cfg.n = 16;
  cfg.wall_levels = 48;
  const std::vector<double> moduli = logspace(1e2, 1e4, 8);
  const std::vector<double> angles{0.0};

  const F::PhysicalBoundary phi = sample_boundary_data(cfg, 3);
  F::PhysicalBoundary scaled = phi;
  for (auto& z : scaled.values) z *= 3.0;

  const DecayReport base = resolvent_decay(cfg, moduli, angles, phi);
  const DecayReport big = resolvent_decay(cfg, moduli, angles, scaled);
  for (size_t i = 0; i < base.samples.size(); ++i) {
    CHECK(big.samples[i].norm_omega ==
          doctest::Approx(3.0 * base.samples[i].norm_omega).epsilon(1e-12));
    CHECK(big.samples[i].norm_gamma ==
          doctest::Approx(3.0 * base.samples[i].norm_gamma).epsilon(1e-12));
    CHECK(big.samples[i].phi_norm ==
          doctest::Approx(3.0 * base.samples[i].phi_norm).epsilon(1e-12));
  }
  CHECK(big.fitted_slope == doctest::Approx(base.fitted_slope).epsilon(1e-12));
  CHECK(big.max_constant == doctest::Approx(base.max_constant).epsilon(1e-12));
}

TEST_CASE("decay constants stay uniform in the damping coefficient") {
  const SweepConfig cfg = small_config();
  const std::vector<double> alphas{0.0, 1.0, 10.0, 100.0};
  const AlphaUniformityReport rep =
      alpha_uniformity(cfg, kModuli, kAngles, alphas);

  REQUIRE(rep.per_alpha.size() == 4);
  CHECK(rep.alphas == alphas);
  CHECK(rep.spread == doctest::Approx(1.556).epsilon(0.01));
  CHECK(rep.spread <= 2.0);
  for (const auto& r : rep.per_alpha) {
    CHECK(r.fitted_slope > -1.05);
    CHECK(r.fitted_slope < -0.95);
    CHECK_FALSE(r.degenerate);
  }

  // Identical alphas give identical constants (full determinism).
  const std::vector<double> twice{1.0, 1.0};
  const std::vector<double> eight = logspace(1e2, 1e4, 8);
  const std::vector<double> one_angle{0.0};
  SweepConfig tiny = small_config();
  tiny.n = 16;
  tiny.wall_levels = 48;
  const auto twin = alpha_uniformity(tiny, eight, one_angle, twice);
  CHECK(twin.per_alpha[0].max_constant == twin.per_alpha[1].max_constant);
  CHECK(twin.spread == 1.0);
}

TEST_CASE("gradient ratios are stable across band content") {
  const SweepConfig cfg = ratio_config();
  const RatioReport rep = gradient_estimate(cfg, Complex{4.0, 0.0}, 8);

  REQUIRE(rep.samples.size() == 8);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.spread == doctest::Approx(1.229).epsilon(0.01));
  CHECK(rep.spread < 10.0);
  CHECK(rep.refinement_shift < 0.01);
  for (size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    CHECK(s.seed == cfg.seed + i);
    CHECK(s.band == (i % 2 == 0 ? cfg.n / 4 : cfg.n / 8));
    CHECK(s.ratio > 0.0);
    CHECK(std::isfinite(s.ratio));
  }

  const RatioReport again = gradient_estimate(cfg, Complex{4.0, 0.0}, 8);
  for (size_t i = 0; i < rep.samples.size(); ++i)
    CHECK(again.samples[i].ratio == rep.samples[i].ratio);
}

TEST_CASE("gradient report flags zero boundary data") {
  const SweepConfig cfg = ratio_config();
  const F::TangentialGrid grid{1, cfg.n, cfg.box_length};
  std::vector<F::PhysicalBoundary> phis{F::PhysicalBoundary(grid, 1)};
  const RatioReport rep = gradient_estimate(cfg, Complex{4.0, 0.0}, phis);
  CHECK(rep.degenerate);
  REQUIRE(rep.samples.size() == 1);
  CHECK(rep.samples[0].degenerate);
  CHECK(rep.samples[0].phi_norm == 0.0);
  CHECK(rep.spread == 0.0);
  CHECK(rep.refinement_shift == 0.0);
}

TEST_CASE("second-order ratios survive tangential refinement") {
  SweepConfig cfg = ratio_config();
  const RatioReport rep = second_order_proxy(cfg, Complex{4.0, 0.0}, 4);
  REQUIRE(rep.samples.size() == 4);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.spread == doctest::Approx(1.079).epsilon(0.01));
  CHECK(rep.spread < 10.0);
  // Band-limited data on a doubled grid carries identical spectral content,
  // so at p = 2 the quadrature is alias-free and the ratio is reproduced to
  // rounding.
  CHECK(rep.refinement_shift < 1e-9);

  cfg.p = 4.0;
  const RatioReport quartic = second_order_proxy(cfg, Complex{4.0, 0.0}, 4);
  CHECK(quartic.spread < 10.0);
  CHECK(quartic.refinement_shift < 1e-6);
}

TEST_CASE("single-harmonic ratios match direct kernel quadrature") {
  SweepConfig cfg;
  cfg.dim = 2;
  cfg.n = 16;
  cfg.wall_levels = 120;
  cfg.p = 2.0;
  const double p = cfg.p;
  const int k = 3;
  const Complex a{0.7, -0.2};
  const Complex lambda = std::polar(5.0, kPi / 4.0);
  cfg.alpha = 0.8;

  const F::TangentialGrid grid{1, cfg.n, cfg.box_length};
  F::PhysicalBoundary phi(grid, 1);
  for (int j = 0; j < grid.modes(); ++j) {
    const double x = grid.point(j)[0];
    phi.at(j, 0) = a * std::exp(Complex{0.0, k * x});
  }

  std::vector<F::PhysicalBoundary> phis{phi};
  const RatioReport rep = second_order_proxy(cfg, lambda, phis);
  REQUIRE(rep.samples.size() == 1);
  CHECK(rep.samples[0].band == k);

  // For one harmonic every field has constant magnitude in x, so each norm
  // reduces to a weighted wall quadrature of kernel magnitudes.
  const K::ResolventParams params{lambda, cfg.alpha, cfg.dim};
  const F::WallGrid wall = adapted_wall(cfg, lambda);
  const auto w = wall.trapezoid_weights();
  const double L = cfg.box_length;
  const double s = static_cast<double>(k);
  const double amag = std::abs(a);

  double hess = 0.0, grad_pi = 0.0;
  for (int l = 0; l < wall.count(); ++l) {
    const K::KernelBundle kb = K::kernel_bundle(params, {s, wall.levels[l]});
    const double m0 = std::abs(kb.m0), d1 = std::abs(kb.dy1),
                 d2 = std::abs(kb.dy2), d3 = std::abs(kb.dy3),
                 pr = std::abs(kb.pressure);
    const double exx = amag * std::hypot(s * s * d1, s * s * s * m0);
    const double exy = amag * std::hypot(s * d2, s * s * d1);
    const double eyy = amag * std::hypot(d3, s * d2);
    hess += w[l] * L *
            (std::pow(exx, p) + 2.0 * std::pow(exy, p) + std::pow(eyy, p));
    grad_pi += w[l] * L * 2.0 * std::pow(s * amag * pr, p);
  }
  const double numerator = std::pow(hess, 1.0 / p) + std::pow(grad_pi, 1.0 / p);
  const double denominator =
      amag * std::pow(L, 1.0 / p) * std::pow(1.0 + std::pow(s, p), 1.0 / p);
  CHECK(rep.samples[0].ratio ==
        doctest::Approx(numerator / denominator).epsilon(1e-10));
}
