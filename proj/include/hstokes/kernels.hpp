#pragma once
// Closed-form Fourier-multiplier kernels for the boundary-driven Stokes
// resolvent problem on the half-space x_d > 0 with a dynamic (Robin-type)
// tangential boundary condition, plus their analytic derivatives.
//
// Notation used throughout: s = |xi| (tangential frequency modulus), y = x_d,
// q = sqrt(lambda + s^2) (principal branch), D = alpha + lambda + s + q.
// Every kernel is a combination A e^{-yq} + B e^{-ys}, which makes all normal
// derivatives exact and keeps evaluation overflow-free on the closed sector.

#include <array>
#include <complex>
#include <span>

#include "hstokes/util.hpp"

namespace hstokes::kernels {

using hstokes::Complex;

// Admissible resolvent parameters: |arg lambda| <= pi - epsilon, |lambda| >= omega.
struct SectorSpec {
  double epsilon = M_PI / 6.0;
  double omega = 1.0;

  void validate() const;              // throws std::invalid_argument
  bool contains(Complex lambda) const;
};

struct ResolventParams {
  Complex lambda{1.0, 0.0};
  double alpha = 0.0;  // boundary damping coefficient, >= 0
  int dim = 2;         // ambient dimension d, 2 or 3

  void validate() const;  // lambda off the cut (-inf, 0], alpha >= 0, dim in {2,3}
  void validate(const SectorSpec& sector) const;
};

// Evaluation point of the scalar kernels: tangential modulus s >= 0, height y >= 0.
struct KernelPoint {
  double s = 0.0;
  double y = 0.0;
};

// q = sqrt(lambda + s^2), principal branch (arg in (-pi, pi]). Re q > 0
// always; Re q >= s exactly when Re lambda >= 0 (obtuse sector rays can dip
// below s), while Re q >= c(s + sqrt|lambda|) holds on the whole sector.
Complex sqrt_shifted(const ResolventParams& p, double s);

// E(s, y) = e^{-yq} - e^{-ys}, evaluated as (+-) e^{-y r} expm1(...) with r
// the slower-decaying exponent, so the cancellation regime |lambda| y << 1
// keeps full relative accuracy and neither factor can overflow.
Complex big_e(const ResolventParams& p, const KernelPoint& pt);

// s * E, same stabilized evaluation (radial factor of the |xi| m0 xi family).
Complex s_big_e(const ResolventParams& p, const KernelPoint& pt);

// P = (q+s)/(alpha+lambda+s+q), the scalar boundary factor shared by the
// normal velocity and pressure kernels.
Complex p_factor(const ResolventParams& p, double s);
Complex ds_p_factor(const ResolventParams& p, double s);  // d/ds of P

// m0 = P * E / lambda (normal-velocity generator); m0(s, 0) = 0 exactly.
Complex m0(const ResolventParams& p, const KernelPoint& pt);

// m1 = lambda * s * m0 = P * sE  (evaluated without the lambda round trip).
Complex m1(const ResolventParams& p, const KernelPoint& pt);

// m2 = lambda * dy_m0 = -m1 - lambda e^{-yq} / D.
Complex m2(const ResolventParams& p, const KernelPoint& pt);

// m3 = e^{-yq}.
Complex m3(const ResolventParams& p, const KernelPoint& pt);

// m4 = e^{-yq} / (lambda + alpha + q), the tangential (Robin) kernel.
Complex m4(const ResolventParams& p, const KernelPoint& pt);

// dy_m0 = -s m0 - e^{-yq}/D (identity form; no quotient differentiation).
Complex dy_m0(const ResolventParams& p, const KernelPoint& pt);

// Analytic s-derivatives.
Complex ds_m3(const ResolventParams& p, const KernelPoint& pt);  // -(s y / q) e^{-yq}
Complex ds_sE(const ResolventParams& p, const KernelPoint& pt);  // (1 - sy) E + lambda s y e^{-yq} / ((s+q) q)
Complex ds_m1(const ResolventParams& p, const KernelPoint& pt);
Complex ds_m2(const ResolventParams& p, const KernelPoint& pt);
Complex ds_m4(const ResolventParams& p, const KernelPoint& pt);

// All scalar kernels and the m0 normal-derivative stack at one (s, y); the
// solver's per-mode hot path. dy^{k+1} m0 = -s dy^k m0 - (-q)^k e^{-yq}/D.
struct KernelBundle {
  Complex q;
  Complex e_ys;                      // e^{-s y}
  Complex m0, dy1, dy2, dy3, dy4;    // m0 and its first four y-derivatives
  Complex m3, m4;
  Complex pressure;                  // P e^{-s y}: scalar part of the pressure symbol
};
KernelBundle kernel_bundle(const ResolventParams& p, const KernelPoint& pt);

// Matrix/vector symbols in the tangential frequency variable xi (size d-1).
// u'(xi, y)   = u_prime_symbol(xi, y) . phi_hat(xi)
// u_d(xi, y)  = u_d_symbol(xi, y) . phi_hat(xi)
// pi(xi, y)   = pressure_symbol(xi, y) . phi_hat(xi)
struct TangentialMatrix {
  int n = 1;  // d - 1
  std::array<Complex, 4> a{};  // row-major
  Complex at(int i, int j) const { return a[i * n + j]; }
  Complex& at(int i, int j) { return a[i * n + j]; }
};
struct TangentialCovector {
  int n = 1;
  std::array<Complex, 2> a{};
};

// -dy_m0 on the ray projector xi xi^T/s^2 plus m4 on its complement; the
// continuous extension at xi = 0 is m4(0, y) Id.
TangentialMatrix u_prime_symbol(const ResolventParams& p, std::span<const double> xi, double y);

// i xi m0; extension 0 at xi = 0.
TangentialCovector u_d_symbol(const ResolventParams& p, std::span<const double> xi, double y);

// -i (xi/s) P e^{-ys}; extension 0 at xi = 0 (zero-mean pressure gauge).
TangentialCovector pressure_symbol(const ResolventParams& p, std::span<const double> xi, double y);

}  // namespace hstokes::kernels
