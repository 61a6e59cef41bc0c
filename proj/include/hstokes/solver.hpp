#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "hstokes/fields.hpp"
#include "hstokes/kernels.hpp"

// Assembles the multiplier solution for given boundary data phi: velocity,
// pressure, traces, analytic wall-normal derivatives, and the residual
// diagnostics that certify the closed forms solve the problem.
namespace hstokes::solver {

// Everything a solve produces. Spectral stacks are retained next to their
// physical transforms; wall-normal derivatives are analytic (exponentials
// differentiate exactly), so residuals test formulas, not discretizations.
struct SolutionBundle {
  kernels::ResolventParams params;
  fields::SpectralBoundary phi_hat;  // transformed input data

  fields::SpectralField spec_u_prime;   // tangential velocity, d-1 components
  fields::SpectralField spec_u_d;       // normal velocity
  fields::SpectralField spec_pressure;  // pressure (zero tangential-mean gauge)
  fields::SpectralField spec_dy_u_prime;
  fields::SpectralField spec_dy_u_d;
  fields::SpectralField spec_dy_pressure;
  fields::SpectralBoundary spec_trace_u_prime;

  fields::PhysicalField u_prime;
  fields::PhysicalField u_d;
  fields::PhysicalField pressure;
  fields::PhysicalField dy_u_prime;
  fields::PhysicalField dy_u_d;
  fields::PhysicalField dy_pressure;
  fields::PhysicalBoundary trace_u_prime;
};

// Applies the multiplier symbols mode-by-mode to phi-hat and transforms
// back. phi must carry d-1 components matching the grid's tdim = d-1.
SolutionBundle solve_boundary_driven(const kernels::ResolventParams& params,
                                     const fields::TangentialGrid& tgrid,
                                     const fields::WallGrid& wgrid,
                                     const fields::PhysicalBoundary& phi);

// Residual magnitudes of one identity: raw sups/L2 aggregates and the same
// normalized by the boundary-data scale (sup of |phi-hat| for max, L2(Gamma)
// norm of phi for l2).
struct ResidualRecord {
  double max_abs = 0.0;
  double l2_abs = 0.0;
  double max_rel = 0.0;
  double l2_rel = 0.0;
};

struct InteriorResidual {
  ResidualRecord momentum;    // (lambda + s^2 - d^2/dy^2) u-hat + (i xi, d/dy) pi-hat
  ResidualRecord divergence;  // i xi . u'-hat + d/dy u_d-hat
};

struct BoundaryResidual {
  ResidualRecord dynamic;       // (lambda+alpha) u'(0) - d/dy u'(0) - phi
  ResidualRecord normal_trace;  // u_d(., 0)
};

struct BiharmonicRecord {
  ResidualRecord interior;      // (lambda+s^2-d^2/dy^2)(s^2-d^2/dy^2) u_d-hat
  ResidualRecord boundary_row;  // (lambda+alpha-d/dy)(d/dy) u_d-hat(0) + i xi.phi-hat
};

// Momentum and divergence identities per mode and level; second derivatives
// are analytic (multiplication by q^2 or s^2 on the exponential basis).
InteriorResidual residual_interior(const SolutionBundle& bundle);

// Dynamic boundary identity and the impermeability trace, both on y = 0.
BoundaryResidual residual_boundary(const SolutionBundle& bundle,
                                   const fields::PhysicalBoundary& phi);

// Factored fourth-order identity for the normal velocity; the biharmonic
// interior residual normalizes by the largest constituent term.
BiharmonicRecord biharmonic_check(const SolutionBundle& bundle);

// Analytic second wall-normal derivatives of the velocity, assembled from
// the same kernel chain as the solution itself (no finite differences).
struct SecondDerivatives {
  fields::SpectralField dyy_u_prime;
  fields::SpectralField dyy_u_d;
};
SecondDerivatives second_normal_derivatives(const SolutionBundle& bundle);

// Smooth solenoidal test field with zero normal trace:
//   v' = a w'(y) g(x'),  v_d = -w(y) (a . grad' g),  w(y) = y e^{-kappa y},
// with g a real band-limited sample. Analytic wall-normal derivatives ride
// along so quadrature is the only error source in the weak form.
struct TestField {
  fields::PhysicalField v_prime;
  fields::PhysicalField v_d;
  fields::PhysicalField dy_v_prime;
  fields::PhysicalField dy_v_d;
  fields::PhysicalBoundary trace_v_prime;  // w'(0) = 1, so just a g(x')
};

TestField solenoidal_test_field(const fields::TangentialGrid& tgrid,
                                const fields::WallGrid& wgrid,
                                std::span<const double> direction, double kappa,
                                std::uint64_t seed);

// Defect of the integral formulation
//   lambda (u, v) + 2 (D(u), D(v)) + (lambda+alpha) (u', v')_Gamma - (phi, v')_Gamma
// with the test field conjugated; scale is the largest term magnitude.
struct WeakFormRecord {
  Complex defect{};
  Complex volume_term{};
  Complex gradient_term{};
  Complex boundary_term{};
  Complex data_term{};
  double scale = 0.0;
  double rel() const {
    return scale > 0.0 ? std::abs(defect) / scale : std::abs(defect);
  }
};

WeakFormRecord weak_form_check(const SolutionBundle& bundle, const TestField& test);

}  // namespace hstokes::solver
