#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "hstokes/fields.hpp"
#include "hstokes/kernels.hpp"
#include "hstokes/util.hpp"

// Scaling experiments over the boundary-driven resolvent solver: decay of
// the solution norms in |lambda|, uniformity of the decay constant in the
// boundary damping alpha, and norm-ratio stability for gradient and
// second-order regularity estimates. Every run is deterministic given the
// seed of the boundary-data sampler.
namespace hstokes::sweep {

// Discretization recipe shared by all experiments. The wall grid adapts to
// each lambda: slow decay (small Re sqrt(lambda)) extends the domain so the
// truncated tail stays negligible, fast decay pins the first level well
// inside the boundary layer.
struct SweepConfig {
  int dim = 2;                  // 2 or 3
  int n = 128;                  // tangential points per axis
  double box_length = 2.0 * 3.14159265358979323846;
  int wall_levels = 192;        // number of wall intervals M
  double alpha = 0.0;
  double p = 2.0;               // Lebesgue exponent, in (1, inf)
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const;  // throws std::invalid_argument
};

// Graded wall grid for one lambda: Y = 10 / min(Re sqrt(lambda), 1) and
// first level y1 = min(Y/M, 1 / (32 max(Re sqrt(lambda), 1))).
fields::WallGrid adapted_wall(const SweepConfig& cfg, Complex lambda);

// Seeded band-limited boundary data on the config's grid. halve_band draws
// the coefficients on the half-resolution grid and embeds them spectrally,
// which confines the content to |k| <= n/8 instead of n/4.
fields::PhysicalBoundary sample_boundary_data(const SweepConfig& cfg,
                                              std::uint64_t seed,
                                              bool halve_band = false);

struct DecaySample {
  double modulus = 0.0;  // |lambda|
  double angle = 0.0;    // arg lambda
  double alpha = 0.0;
  double p = 2.0;
  double norm_omega = 0.0;  // ||u||_{L^p(Omega)}, all velocity components
  double norm_gamma = 0.0;  // ||u'(.,0)||_{L^p(Gamma)}
  double phi_norm = 0.0;    // ||phi||_{L^p(Gamma)}

  // Empirical constant of the first-order decay law,
  // (norm_omega + norm_gamma) * |lambda| / phi_norm.
  double constant() const;
};

struct DecayReport {
  int dim = 2;
  double p = 2.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<DecaySample> samples;  // ordered by modulus, then angle
  // Least-squares fit of log((norm_omega + norm_gamma)/phi_norm) against
  // log|lambda|; a clean resolvent decay gives slope -1.
  double fitted_slope = 0.0;
  double fit_intercept = 0.0;
  double fit_residual = 0.0;
  double max_constant = 0.0;
  double min_constant = 0.0;
  // Largest relative change of any sample norm when the wall grid of the
  // extreme samples (smallest and largest modulus, widest angle; largest
  // modulus, first angle) is doubled.
  double wall_refinement_shift = 0.0;
  bool under_resolved = false;  // wall_refinement_shift > 1%
  bool degenerate = false;      // phi vanishes; no fit was performed
};

// Solves the boundary problem with one fixed phi for every modulus/angle
// pair and fits the log-log decay of the solution norms. Samples run in
// parallel; assembly order is by modulus, then angle.
DecayReport resolvent_decay(const SweepConfig& cfg, std::span<const double> moduli,
                            std::span<const double> angles,
                            const fields::PhysicalBoundary& phi);

// Same with phi drawn from cfg.seed.
DecayReport resolvent_decay(const SweepConfig& cfg, std::span<const double> moduli,
                            std::span<const double> angles);

struct AlphaUniformityReport {
  int dim = 2;
  double p = 2.0;
  std::uint64_t seed = 0;
  std::vector<double> alphas;
  std::vector<DecayReport> per_alpha;  // same moduli/angles/phi throughout
  double max_constant = 0.0;           // max over alpha of that run's max
  double min_constant = 0.0;           // min over alpha of that run's max
  double spread = 0.0;                 // max_constant / min_constant
};

// Repeats the decay sweep for each alpha with identical boundary data and
// compares the per-alpha decay constants.
AlphaUniformityReport alpha_uniformity(const SweepConfig& cfg,
                                       std::span<const double> moduli,
                                       std::span<const double> angles,
                                       std::span<const double> alphas);

struct RatioSample {
  std::uint64_t seed = 0;   // sampler seed, 0 for caller-supplied data
  int band = 0;             // measured highest tangential wavenumber
  double phi_norm = 0.0;    // denominator norm of this draw
  double ratio = 0.0;
  bool degenerate = false;  // zero denominator
};

struct RatioReport {
  int dim = 2;
  double p = 2.0;
  Complex lambda{0.0, 0.0};
  double alpha = 0.0;
  std::vector<RatioSample> samples;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 0.0;            // max_ratio / min_ratio
  double refinement_shift = 0.0;  // relative ratio change under refinement
  bool degenerate = false;        // any sample degenerate or no samples
};

// Ratio (||u||_{W^{1,p}(Omega)} + ||pi||_{L^p(Omega)}) / ||phi||_{L^p(Gamma)}
// over the supplied boundary data; zero data is flagged, not solved. The
// refinement probe re-runs the first draw on a doubled wall grid.
RatioReport gradient_estimate(const SweepConfig& cfg, Complex lambda,
                              std::span<const fields::PhysicalBoundary> phis);

// Same over phi_count random band-limited draws with seeds cfg.seed + i;
// draws alternate between the full band n/4 and the half band n/8 so the
// spread reflects frequency-content variation.
RatioReport gradient_estimate(const SweepConfig& cfg, Complex lambda,
                              int phi_count);

// Ratio (||grad^2 u||_{L^p(Omega)} + ||grad pi||_{L^p(Omega)}) over the
// discrete boundary surrogate (||phi||_p^p + sum_a ||d_a phi||_p^p)^{1/p}.
// The surrogate is an upper proxy for the sharp trace norm, not a
// reproduction of it. All second derivatives are analytic per mode:
// tangential ones are i xi multipliers, wall-normal ones come from the
// kernel derivative chain. The refinement probe re-runs the first draw with
// the tangential resolution doubled and the same spectral data.
RatioReport second_order_proxy(const SweepConfig& cfg, Complex lambda,
                               std::span<const fields::PhysicalBoundary> phis);
RatioReport second_order_proxy(const SweepConfig& cfg, Complex lambda,
                               int phi_count);

}  // namespace hstokes::sweep
