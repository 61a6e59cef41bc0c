#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hstokes/util.hpp"

// Discretization substrate: periodic tangential grids, wall-normal level
// sets, spectral/physical field containers, DFTs, and Lp/Sobolev quadrature.
//
// Conventions (fixed so field dumps are bit-comparable):
//   - forward DFT is the unnormalized sum; the inverse divides by n^tdim
//   - mode k of an axis carries frequency xi_k = 2*pi*k/L, k in [-n/2, n/2)
//   - storage layout is ((mode*levels + level)*components + c), i.e. the
//     flattened tangential index is slowest and the component index fastest
namespace hstokes::fields {

// Uniform periodic grid for the tangential directions (tdim = d-1 axes,
// n points per axis on a box of side box_length).
struct TangentialGrid {
  int tdim = 1;
  int n = 8;
  double box_length = 6.283185307179586476925286766559;

  void validate() const;  // throws std::invalid_argument

  int modes() const { return tdim == 1 ? n : n * n; }
  // Signed wavenumber of a per-axis index in [0, n): 0..n/2-1, then -n/2..-1.
  int wavenumber(int axis_index) const {
    return axis_index < n / 2 ? axis_index : axis_index - n;
  }
  double frequency(int axis_index) const;
  // Per-axis indices of a flattened mode (axis 0 slowest). For tdim == 1 the
  // second entry is 0.
  std::array<int, 2> axis_indices(int mode) const;
  // Signed wavenumber vector and frequency vector of a flattened mode.
  std::array<int, 2> wavenumbers(int mode) const;
  std::array<double, 2> frequencies(int mode) const;
  // Flattened index of the reflected mode -k (mod n per axis).
  int reflected_mode(int mode) const;
  // Physical coordinates of a flattened point index (spacing L/n).
  std::array<double, 2> point(int index) const;
};

// Strictly increasing wall-normal sample levels with y0 = 0 (the trace).
struct WallGrid {
  std::vector<double> levels;

  void validate() const;  // throws std::invalid_argument

  int count() const { return static_cast<int>(levels.size()); }
  double top() const { return levels.back(); }
  // Composite trapezoid weights over [0, top()].
  std::vector<double> trapezoid_weights() const;

  // Geometric grading y_j = Y*(r^j - 1)/(r^M - 1), j = 0..m_intervals, with
  // the ratio r solved so that the first level lands on y1. The default picks
  // y1 = 0.01*Y; solutions decay exponentially, so resolution belongs near
  // the wall.
  static WallGrid graded(double y_top, int m_intervals, double y1);
  static WallGrid graded(double y_top, int m_intervals);
};

enum class Space { spectral, physical };

// Complex field sampled on grid x wall levels with `components` channels.
// Spectral and physical layouts are identical; the tag records which side of
// the transform the values live on.
template <Space S>
struct Field {
  TangentialGrid grid;
  WallGrid wall;
  int components = 1;
  std::vector<Complex> values;

  Field() = default;
  Field(const TangentialGrid& g, const WallGrid& w, int c);

  std::size_t index(int mode, int level, int c) const {
    return (static_cast<std::size_t>(mode) * wall.count() + level) * components + c;
  }
  Complex& at(int mode, int level, int c) { return values[index(mode, level, c)]; }
  const Complex& at(int mode, int level, int c) const {
    return values[index(mode, level, c)];
  }
  void validate_shape() const;  // throws std::invalid_argument
};

using SpectralField = Field<Space::spectral>;
using PhysicalField = Field<Space::physical>;

// Field restricted to the trace level y = 0. Boundary data is tangential by
// construction: there is no slot for a normal component, and components is
// normally tdim (one channel per tangential direction).
template <Space S>
struct BoundaryField {
  TangentialGrid grid;
  int components = 1;
  std::vector<Complex> values;

  BoundaryField() = default;
  BoundaryField(const TangentialGrid& g, int c);

  std::size_t index(int mode, int c) const {
    return static_cast<std::size_t>(mode) * components + c;
  }
  Complex& at(int mode, int c) { return values[index(mode, c)]; }
  const Complex& at(int mode, int c) const { return values[index(mode, c)]; }
  void validate_shape() const;
};

using SpectralBoundary = BoundaryField<Space::spectral>;
using PhysicalBoundary = BoundaryField<Space::physical>;

// Transforms. Forward = unnormalized sum over points, inverse divides by
// n^tdim; the round trip is the identity to ~1e-13 relative. Wall levels and
// components transform independently (and in parallel).
SpectralField forward_dft(const PhysicalField& field);
PhysicalField inverse_dft(const SpectralField& field);
SpectralBoundary forward_dft(const PhysicalBoundary& field);
PhysicalBoundary inverse_dft(const SpectralBoundary& field);

// Multiply each mode by i*xi_axis (spectral differentiation along a
// tangential axis).
SpectralField tangential_derivative(const SpectralField& field, int axis);
SpectralBoundary tangential_derivative(const SpectralBoundary& field, int axis);

// Tensor quadrature: uniform weights (L/n)^tdim per tangential point,
// composite trapezoid across wall levels. Pointwise magnitude is the
// Euclidean norm over components. p must lie in (1, inf).
double lp_norm_omega(const PhysicalField& field, double p);
double lp_norm_gamma(const PhysicalBoundary& field, double p);

// L2 norm evaluated directly from spectral data via Parseval (same
// normalization as lp_norm_omega with p = 2).
double l2_norm_spectral(const SpectralField& field);

// W^{1,p} norm: (|u|_p^p + sum_axes |d_a u|_p^p + |du_dy|_p^p)^{1/p}, with
// tangential derivatives taken spectrally and the wall-normal derivative
// supplied by the caller (solvers have it analytically).
double sobolev_w1p_norm(const PhysicalField& u, const PhysicalField& du_dy, double p);

// Largest deviation from conjugate symmetry, max_k |f(-k) - conj(f(k))|.
// Zero (to rounding) exactly when the physical-side field is real.
double conjugate_symmetry_defect(const SpectralField& field);
double conjugate_symmetry_defect(const SpectralBoundary& field);

// Band-limited Gaussian boundary data: independent unit complex Gaussians on
// modes with |k| <= n/4, shaped by the envelope exp(-(|k|/(n/8))^2), then
// conjugate-symmetrized so the physical field is real.
SpectralBoundary random_band_limited(const TangentialGrid& grid, int components,
                                     std::uint64_t seed);

// Dump format: <prefix>.json header (grids, components, space, convention
// tag) plus <prefix>.bin holding little-endian f64 (re, im) pairs in storage
// order. load_field throws if the header disagrees with the requested space.
template <Space S>
void dump_field(const Field<S>& field, const std::string& prefix);
template <Space S>
Field<S> load_field(const std::string& prefix);

extern template void dump_field<Space::spectral>(const SpectralField&, const std::string&);
extern template void dump_field<Space::physical>(const PhysicalField&, const std::string&);
extern template SpectralField load_field<Space::spectral>(const std::string&);
extern template PhysicalField load_field<Space::physical>(const std::string&);

}  // namespace hstokes::fields
