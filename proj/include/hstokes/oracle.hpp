#pragma once

#include <span>
#include <vector>

#include "hstokes/kernels.hpp"
#include "hstokes/util.hpp"

// Independent per-wavenumber verification: the Fourier-side boundary value
// problem is solved by second-order finite differences on a truncated
// interval. The solve path uses only the problem data and its characteristic
// roots — never the closed-form kernels; kernels appear solely as the
// comparison target of compare_mode.
namespace hstokes::oracle {

enum class DecayBc {
  dirichlet_pair,  // u(Y) = 0 and w(Y) = 0
  asymptotic,      // (d/dy + s) u(Y) = 0 and w(Y) = 0
};

struct OdeOracleConfig {
  double truncation_length = 26.0;  // Y
  int steps = 1024;                 // N, uniform spacing h = Y/N
  DecayBc decay_bc = DecayBc::dirichlet_pair;

  void validate() const;  // throws std::invalid_argument
};

// Interval height and decay rows chosen from the mode's decay rates: the
// asymptotic row cancels the e^{-sy} branch exactly, so its interval only
// needs Re(q)*Y = 18; plain Dirichlet rows need both branches dead at the
// top (min(s, Re q)*Y = 26) and are preferred only when that costs at most
// 25% more interval.
OdeOracleConfig adequate_config(const kernels::ResolventParams& params, double s,
                                int steps);

// Sampled solution of the coupled second-order system. The fourth-order
// normal-velocity equation (lambda + s^2 - d^2/dy^2)(s^2 - d^2/dy^2) u = 0
// is factored through the auxiliary w = (s^2 - d^2/dy^2) u, interleaved as
// (u_0, w_0, u_1, w_1, ...) into one banded complex system.
struct ModeSolution {
  std::vector<double> y;   // N+1 uniform levels on [0, Y]
  std::vector<Complex> u;  // normal velocity samples
  std::vector<Complex> w;  // auxiliary (s^2 - d^2/dy^2) u samples
  // max_i |(A z - b)_i| / (|A|_inf |z|_inf + |b|_inf) of the assembled rows.
  double row_residual = 0.0;
};

// Normal velocity of the boundary-driven mode: boundary rows encode
// u(0) = 0 and (lambda + alpha - d/dy)(du/dy)(0) = -i xi . phi_hat with
// one-sided second-order stencils; decay rows per cfg. Requires |xi| > 0
// (the xi = 0 normal mode vanishes identically). Throws on a singular
// system and on an interval too short for Dirichlet decay rows.
ModeSolution solve_mode_fd(const kernels::ResolventParams& params,
                           std::span<const double> xi,
                           std::span<const Complex> rhs_phi_hat,
                           const OdeOracleConfig& cfg);

// Sampled tangential correction modes, one per component of h_hat.
struct VPrimeSolution {
  std::vector<double> y;
  std::vector<std::vector<Complex>> v;  // v[c] sampled on y
  double row_residual = 0.0;
};

// Each component solves (lambda + s^2 - d^2/dy^2) v = 0 with the dynamic row
// (lambda + alpha - d/dy) v(0) = h_hat_c and decay at Y per cfg; the
// continuum solution is h_hat_c e^{-yq}/(lambda + alpha + q).
VPrimeSolution solve_vprime_mode_fd(const kernels::ResolventParams& params,
                                    std::span<const double> xi,
                                    std::span<const Complex> h_hat,
                                    const OdeOracleConfig& cfg);

// Max deviation between the finite-difference solve and the closed-form
// normal velocity for boundary data phi_hat = xi/s, measured relative to the
// sup of the closed form over the grid. Requires |xi| > 0.
double compare_mode(const kernels::ResolventParams& params,
                    std::span<const double> xi, const OdeOracleConfig& cfg);

}  // namespace hstokes::oracle
