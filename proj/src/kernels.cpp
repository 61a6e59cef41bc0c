#include "hstokes/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace hstokes::kernels {

namespace {

void check_point(const KernelPoint& pt) {
  if (!(pt.s >= 0.0) || !std::isfinite(pt.s) || !(pt.y >= 0.0) || !std::isfinite(pt.y))
    throw std::invalid_argument("kernels: point needs s >= 0 and y >= 0");
}

void check_params(const ResolventParams& p) { p.validate(); }

inline Complex q_of(const ResolventParams& p, double s) {
  return std::sqrt(p.lambda + s * s);
}

// E = e^{-yq} - e^{-ys} without cancellation or overflow. Factoring around
// e^{-ys} needs Re(q - s) >= 0, which fails at obtuse sector angles, so pick
// the factor with the larger modulus: E = e^{-ys} expm1(-y(q-s)) when
// Re q >= s, else E = -e^{-yq} expm1(+y(q-s)); q - s evaluated as
// lambda/(q+s) to stay cancellation-free when |lambda| << s^2.
inline Complex stable_e(const ResolventParams& p, Complex q, double s, double y) {
  const Complex z = y * (p.lambda / (q + s));  // y (q - s)
  if (q.real() >= s) return std::exp(-y * s) * expm1c(-z);
  return -std::exp(-y * q) * expm1c(z);
}

// D = alpha + lambda + s + q: common denominator of P and the dy recurrence.
inline Complex d_sum(const ResolventParams& p, double s, Complex q) {
  return p.alpha + p.lambda + s + q;
}

}  // namespace

void SectorSpec::validate() const {
  if (!(epsilon > 0.0) || !(epsilon < M_PI) || !std::isfinite(epsilon))
    throw std::invalid_argument("SectorSpec: epsilon must lie in (0, pi)");
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw std::invalid_argument("SectorSpec: omega must be positive");
}

bool SectorSpec::contains(Complex lambda) const {
  if (!(std::abs(lambda) >= omega)) return false;
  return std::abs(std::arg(lambda)) <= M_PI - epsilon;
}

void ResolventParams::validate() const {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::invalid_argument("ResolventParams: lambda must be finite");
  if (lambda == Complex(0.0, 0.0) || (lambda.imag() == 0.0 && lambda.real() < 0.0))
    throw std::invalid_argument("ResolventParams: lambda must avoid the cut (-inf, 0]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("ResolventParams: alpha must be >= 0");
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("ResolventParams: dim must be 2 or 3");
}

void ResolventParams::validate(const SectorSpec& sector) const {
  validate();
  sector.validate();
  if (!sector.contains(lambda))
    throw std::invalid_argument("ResolventParams: lambda outside the admissible sector");
}

Complex sqrt_shifted(const ResolventParams& p, double s) {
  check_params(p);
  if (!(s >= 0.0) || !std::isfinite(s))
    throw std::invalid_argument("sqrt_shifted: s must be >= 0");
  return q_of(p, s);
}

Complex big_e(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  return stable_e(p, q_of(p, pt.s), pt.s, pt.y);
}

Complex s_big_e(const ResolventParams& p, const KernelPoint& pt) {
  return pt.s * big_e(p, pt);
}

Complex p_factor(const ResolventParams& p, double s) {
  check_params(p);
  const Complex q = q_of(p, s);
  return (q + s) / d_sum(p, s, q);
}

Complex ds_p_factor(const ResolventParams& p, double s) {
  check_params(p);
  const Complex q = q_of(p, s);
  const Complex d = d_sum(p, s, q);
  return (1.0 + s / q) * (p.alpha + p.lambda) / (d * d);
}

Complex m0(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  const Complex q = q_of(p, pt.s);
  const Complex pf = (q + pt.s) / d_sum(p, pt.s, q);
  return pf * stable_e(p, q, pt.s, pt.y) / p.lambda;
}

Complex m1(const ResolventParams& p, const KernelPoint& pt) {
  return p_factor(p, pt.s) * s_big_e(p, pt);
}

Complex m2(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  const Complex q = q_of(p, pt.s);
  const Complex d = d_sum(p, pt.s, q);
  return -m1(p, pt) - p.lambda * std::exp(-pt.y * q) / d;
}

Complex m3(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  return std::exp(-pt.y * q_of(p, pt.s));
}

Complex m4(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  const Complex q = q_of(p, pt.s);
  return std::exp(-pt.y * q) / (p.lambda + p.alpha + q);
}

Complex dy_m0(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  const Complex q = q_of(p, pt.s);
  return -pt.s * m0(p, pt) - std::exp(-pt.y * q) / d_sum(p, pt.s, q);
}

Complex ds_m3(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  const Complex q = q_of(p, pt.s);
  return -(pt.s * pt.y / q) * std::exp(-pt.y * q);
}

Complex ds_sE(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  const Complex q = q_of(p, pt.s);
  const Complex e_yq = std::exp(-pt.y * q);
  return (1.0 - pt.s * pt.y) * big_e(p, pt) + p.lambda * pt.s * pt.y * e_yq / ((pt.s + q) * q);
}

Complex ds_m1(const ResolventParams& p, const KernelPoint& pt) {
  return ds_p_factor(p, pt.s) * s_big_e(p, pt) + p_factor(p, pt.s) * ds_sE(p, pt);
}

Complex ds_m2(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  const Complex q = q_of(p, pt.s);
  const Complex d = d_sum(p, pt.s, q);
  const Complex dprime = 1.0 + pt.s / q;
  const Complex e_yq = std::exp(-pt.y * q);
  const Complex quot = (ds_m3(p, pt) * d - e_yq * dprime) / (d * d);
  return -ds_m1(p, pt) - p.lambda * quot;
}

Complex ds_m4(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  const Complex q = q_of(p, pt.s);
  const Complex d4 = p.lambda + p.alpha + q;
  const Complex e_yq = std::exp(-pt.y * q);
  return (ds_m3(p, pt) * d4 - e_yq * (pt.s / q)) / (d4 * d4);
}

KernelBundle kernel_bundle(const ResolventParams& p, const KernelPoint& pt) {
  check_params(p);
  check_point(pt);
  KernelBundle b;
  const Complex q = q_of(p, pt.s);
  const Complex d = d_sum(p, pt.s, q);
  const Complex pf = (q + pt.s) / d;
  const double e_ys = std::exp(-pt.y * pt.s);
  b.q = q;
  b.e_ys = e_ys;
  b.m3 = std::exp(-pt.y * q);
  b.m4 = b.m3 / (p.lambda + p.alpha + q);
  b.pressure = pf * e_ys;
  b.m0 = pf * stable_e(p, q, pt.s, pt.y) / p.lambda;
  const Complex r = b.m3 / d;
  b.dy1 = -pt.s * b.m0 - r;
  b.dy2 = -pt.s * b.dy1 + q * r;
  b.dy3 = -pt.s * b.dy2 - (q * q) * r;
  b.dy4 = -pt.s * b.dy3 + (q * q * q) * r;
  return b;
}

namespace {

double norm_of(std::span<const double> xi) {
  double ss = 0;
  for (double c : xi) ss += c * c;
  return std::sqrt(ss);
}

void check_xi(const ResolventParams& p, std::span<const double> xi) {
  if (int(xi.size()) != p.dim - 1)
    throw std::invalid_argument("symbols: xi must have d-1 components");
  for (double c : xi)
    if (!std::isfinite(c)) throw std::invalid_argument("symbols: xi must be finite");
}

}  // namespace

TangentialMatrix u_prime_symbol(const ResolventParams& p, std::span<const double> xi, double y) {
  check_params(p);
  check_xi(p, xi);
  const int n = p.dim - 1;
  const double s = norm_of(xi);
  TangentialMatrix m;
  m.n = n;
  if (s == 0.0) {
    const Complex diag = m4(p, {0.0, y});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.at(i, j) = (i == j) ? diag : Complex{};
    return m;
  }
  const KernelPoint pt{s, y};
  const Complex ray = -dy_m0(p, pt);
  const Complex perp = m4(p, pt);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double proj = xi[i] * xi[j] / (s * s);
      m.at(i, j) = ray * proj + perp * ((i == j ? 1.0 : 0.0) - proj);
    }
  return m;
}

TangentialCovector u_d_symbol(const ResolventParams& p, std::span<const double> xi, double y) {
  check_params(p);
  check_xi(p, xi);
  TangentialCovector v;
  v.n = p.dim - 1;
  const double s = norm_of(xi);
  if (s == 0.0) return v;
  const Complex val = m0(p, {s, y});
  for (int i = 0; i < v.n; ++i) v.a[i] = Complex(0.0, 1.0) * xi[i] * val;
  return v;
}

TangentialCovector pressure_symbol(const ResolventParams& p, std::span<const double> xi, double y) {
  check_params(p);
  check_xi(p, xi);
  TangentialCovector v;
  v.n = p.dim - 1;
  const double s = norm_of(xi);
  if (s == 0.0) return v;
  const Complex coeff = p_factor(p, s) * std::exp(-y * s);
  for (int i = 0; i < v.n; ++i) v.a[i] = Complex(0.0, -1.0) * (xi[i] / s) * coeff;
  return v;
}

}  // namespace hstokes::kernels
